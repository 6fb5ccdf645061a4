"""Reading and writing the JSON problem format.

Layout::

    {"n": 2,
     "objectives":   [FN, ...],
     "inequalities": [FN, ...],          # optional
     "equalities":   [FN, ...],          # optional
     "box": [[lo, hi], ...],             # optional, default [-10, 10]^n
     "mscq": true,                       # optional
     "multipliers": {"alpha": [...], "lambda": [...], "mu": [...]}}   # optional

where ``FN`` is ``{"poly": {"terms": [{"c": 1.0, "e": [2, 0]}, ...]}}`` or
``{"piecewise": {"cells": [{"guards": [{"a": [...], "b": 0.0}], "poly": {...}}]}}``.
Unknown keys anywhere are rejected.
"""

import json
import numbers
from pathlib import Path

from .errors import ProblemFormatError
from .model import Cell, Halfspace, PiecewiseFn, Problem
from .polynomial import Polynomial

TOP_KEYS = {"n", "objectives", "inequalities", "equalities", "box", "mscq", "multipliers"}
MULT_KEYS = {"alpha", "lambda", "mu"}


def _keys(obj, allowed, where, required=()):
    if not isinstance(obj, dict):
        raise ProblemFormatError(f"{where}: expected an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise ProblemFormatError(f"{where}: unknown keys {sorted(extra)}")
    missing = set(required) - set(obj)
    if missing:
        raise ProblemFormatError(f"{where}: missing keys {sorted(missing)}")


def _real(v, where):
    if isinstance(v, bool) or not isinstance(v, numbers.Real):
        raise ProblemFormatError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _reals(v, where, length=None):
    if not isinstance(v, list):
        raise ProblemFormatError(f"{where}: expected a list")
    if length is not None and len(v) != length:
        raise ProblemFormatError(f"{where}: expected {length} entries, got {len(v)}")
    return [_real(x, f"{where}[{i}]") for i, x in enumerate(v)]


def _nat(v, where):
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ProblemFormatError(f"{where}: expected a natural number, got {v!r}")
    return v


def parse_poly(obj, n, where):
    _keys(obj, {"terms"}, where, required={"terms"})
    if not isinstance(obj["terms"], list):
        raise ProblemFormatError(f"{where}.terms: expected a list")
    terms = []
    for k, t in enumerate(obj["terms"]):
        w = f"{where}.terms[{k}]"
        _keys(t, {"c", "e"}, w, required={"c", "e"})
        if not isinstance(t["e"], list) or len(t["e"]) != n:
            raise ProblemFormatError(f"{w}.e: expected {n} exponents")
        terms.append((_real(t["c"], f"{w}.c"), [_nat(e, f"{w}.e") for e in t["e"]]))
    try:
        return Polynomial(n, terms)
    except Exception as exc:
        raise ProblemFormatError(f"{where}: {exc}") from exc


def parse_function(obj, n, box, where):
    if not isinstance(obj, dict) or len(obj) != 1 or next(iter(obj)) not in ("poly", "piecewise"):
        raise ProblemFormatError(f"{where}: expected {{'poly': ...}} or {{'piecewise': ...}}")
    if "poly" in obj:
        return PiecewiseFn.from_polynomial(parse_poly(obj["poly"], n, f"{where}.poly"), box=box)
    pw = obj["piecewise"]
    _keys(pw, {"cells"}, f"{where}.piecewise", required={"cells"})
    if not isinstance(pw["cells"], list) or not pw["cells"]:
        raise ProblemFormatError(f"{where}.piecewise.cells: expected a nonempty list")
    pieces = []
    for k, c in enumerate(pw["cells"]):
        w = f"{where}.piecewise.cells[{k}]"
        _keys(c, {"guards", "poly"}, w, required={"guards", "poly"})
        if not isinstance(c["guards"], list):
            raise ProblemFormatError(f"{w}.guards: expected a list")
        guards = []
        for r, g in enumerate(c["guards"]):
            gw = f"{w}.guards[{r}]"
            _keys(g, {"a", "b"}, gw, required={"a", "b"})
            try:
                guards.append(Halfspace(_reals(g["a"], f"{gw}.a", n), _real(g["b"], f"{gw}.b")))
            except ValueError as exc:
                raise ProblemFormatError(f"{gw}: {exc}") from exc
        pieces.append((Cell(tuple(guards)), parse_poly(c["poly"], n, f"{w}.poly")))
    return PiecewiseFn(n, tuple(pieces), box=box)


def parse_multipliers(obj, where="multipliers"):
    _keys(obj, MULT_KEYS, where)
    return {k: _reals(v, f"{where}.{k}") for k, v in obj.items()}


def problem_from_dict(doc):
    _keys(doc, TOP_KEYS, "problem", required={"n", "objectives"})
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ProblemFormatError("problem.n: expected a positive integer")
    box = None
    if "box" in doc:
        if not isinstance(doc["box"], list) or len(doc["box"]) != n:
            raise ProblemFormatError(f"problem.box: expected {n} intervals")
        box = tuple(tuple(_reals(r, f"problem.box[{i}]", 2)) for i, r in enumerate(doc["box"]))
        if any(lo >= hi for lo, hi in box):
            raise ProblemFormatError("problem.box: empty interval")
    lists = {}
    for key in ("objectives", "inequalities", "equalities"):
        items = doc.get(key, [])
        if not isinstance(items, list):
            raise ProblemFormatError(f"problem.{key}: expected a list")
        lists[key] = tuple(parse_function(f, n, box, f"problem.{key}[{i}]") for i, f in enumerate(items))
    if not lists["objectives"]:
        raise ProblemFormatError("problem.objectives: at least one objective required")
    mscq = doc.get("mscq", False)
    if not isinstance(mscq, bool):
        raise ProblemFormatError("problem.mscq: expected true or false")
    mult = parse_multipliers(doc["multipliers"]) if "multipliers" in doc else None
    return Problem(n, lists["objectives"], lists["inequalities"], lists["equalities"],
                   mscq_asserted=mscq, box=box, multipliers=mult)


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}") from exc
    return problem_from_dict(doc)


def load(path):
    return loads(Path(path).read_text())


def problem_to_dict(problem):
    doc = {
        "n": problem.n,
        "objectives": [f.to_json() for f in problem.objectives],
        "inequalities": [f.to_json() for f in problem.inequalities],
        "equalities": [f.to_json() for f in problem.equalities],
        "box": [list(r) for r in problem.box],
        "mscq": problem.mscq_asserted,
    }
    if problem.multipliers is not None:
        doc["multipliers"] = dict(problem.multipliers)
    return doc


def dumps(problem):
    return json.dumps(problem_to_dict(problem), indent=2)
