"""Command line entry point: ``c11cert validate | certify | oracle | taylor``.

Exit codes: 0 success, 1 a check failed (validation failure, FAIL_WITNESS,
infeasible point, failed Taylor bound), 2 the input could not be parsed,
3 an INCONCLUSIVE verdict was reported under ``--strict``.
"""

import argparse
import json
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import problem_file
from .bundles import taylor_check
from .certify import CertifyOptions, certify_point
from .config import DEFAULT_TOLERANCES
from .errors import C11CertError, NoMultipliers, ProblemFormatError, TooFewFeasible
from .model import validate
from .multipliers import MultiplierVector
from .oracle import empirical_growth, empirical_local_min
from .reporting import sig

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VALIDATION_SAMPLES = 2000


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str
    point: tuple | None = None
    seed: int = 42
    samples: int = 4096
    radius: float = 1e-2
    tolerances: object = DEFAULT_TOLERANCES
    output_format: str = "json"
    strict: bool = False
    multipliers: str | None = None
    oracle: bool = False
    oracle_samples: int = 100_000
    fn: str = "objectives:0"
    a: tuple | None = None
    b: tuple | None = None
    validation_samples: int = VALIDATION_SAMPLES

    def __post_init__(self):
        if self.samples < 1 or self.oracle_samples < 1 or self.validation_samples < 1:
            raise UsageError("sample counts must be at least 1")
        if self.radius <= 0:
            raise UsageError("--radius must be positive")

    def echo(self):
        out = {"command": self.command, "input": self.input,
               "point": None if self.point is None else list(self.point),
               "seed": self.seed, "samples": self.samples, "radius": self.radius,
               "tolerances": self.tolerances.as_dict(), "format": self.output_format,
               "strict": self.strict, "multipliers": self.multipliers,
               "validation_samples": self.validation_samples}
        if self.command == "certify":
            out["oracle"] = self.oracle
            out["oracle_samples"] = self.oracle_samples
        if self.command == "taylor":
            out.update(fn=self.fn, a=list(self.a), b=list(self.b))
        return out


# -- argument handling ----------------------------------------------------------

def _vector(text, name):
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="c11cert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, samples_default):
        sp.add_argument("file", help="problem file (JSON)")
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--samples", type=int, default=samples_default)
        sp.add_argument("--format", choices=("json", "text"), default="json", dest="output_format")
        sp.add_argument("--tol-q", type=float, default=None)
        sp.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override any tolerance, e.g. --tol tol_feas=1e-7")
        sp.add_argument("--validation-samples", type=int, default=VALIDATION_SAMPLES)

    sp = sub.add_parser("validate", help="check that every function is a valid C^{1,1} piecewise polynomial")
    common(sp, VALIDATION_SAMPLES)

    sp = sub.add_parser("certify", help="certify optimality conditions at a point")
    common(sp, 4096)
    sp.add_argument("--point", required=True)
    sp.add_argument("--multipliers", default=None, help="JSON file with alpha/lambda/mu")
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--oracle", action="store_true", help="attach an empirical growth estimate")
    sp.add_argument("--radius", type=float, default=1e-2)
    sp.add_argument("--oracle-samples", type=int, default=100_000)

    sp = sub.add_parser("oracle", help="empirical growth and local-minimality by sampling")
    common(sp, 100_000)
    sp.add_argument("--point", required=True)
    sp.add_argument("--radius", type=float, default=1e-2)

    sp = sub.add_parser("taylor", help="second-order Taylor bound on a segment")
    common(sp, VALIDATION_SAMPLES)
    sp.add_argument("--fn", default="objectives:0", help="which function, e.g. inequalities:1")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    return p


def _tolerances(args):
    tol = DEFAULT_TOLERANCES
    names = {f.name for f in fields(tol)}
    for item in args.tol:
        key, _, val = item.partition("=")
        if key not in names:
            raise UsageError(f"unknown tolerance {key!r}; choose from {sorted(names)}")
        try:
            tol = replace(tol, **{key: float(val)})
        except ValueError as exc:
            raise UsageError(f"--tol {item}: {exc}") from None
    if args.tol_q is not None:
        try:
            tol = replace(tol, tol_q=args.tol_q)
        except ValueError as exc:
            raise UsageError(f"--tol-q: {exc}") from None
    return tol


def config_from_args(args):
    kw = dict(command=args.command, input=args.file, seed=args.seed, samples=args.samples,
              tolerances=_tolerances(args), output_format=args.output_format,
              validation_samples=args.validation_samples)
    if getattr(args, "point", None) is not None:
        kw["point"] = _vector(args.point, "--point")
    for name in ("radius", "strict", "multipliers", "oracle", "oracle_samples", "fn"):
        if hasattr(args, name):
            kw[name] = getattr(args, name)
    if args.command == "taylor":
        kw["a"] = _vector(args.a, "--a")
        kw["b"] = _vector(args.b, "--b")
    return RunConfig(**kw)


# -- output ------------------------------------------------------------------------

def _emit(doc, text, cfg, out):
    if cfg.output_format == "json":
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(text + "\n")


def _validate_problem(problem, cfg):
    """Validation report per function, keyed ``objectives[0]`` etc."""
    reports = {}
    for key in ("objectives", "inequalities", "equalities"):
        for i, f in enumerate(getattr(problem, key)):
            reports[f"{key}[{i}]"] = validate(f, cfg.validation_samples, cfg.seed)
    return reports


def _validation_text(reports):
    lines = []
    for name, rep in reports.items():
        lines.append(f"{name:<18} {'accepted' if rep.accepted else 'REJECTED'}")
        lines += [f"  {m}" for m in rep.messages()]
    return "\n".join(lines)


def _check_point(problem, point):
    if point is not None and len(point) != problem.n:
        raise UsageError(f"--point has {len(point)} coordinates, problem has n = {problem.n}")


# -- commands -------------------------------------------------------------------------

def cmd_validate(problem, cfg, out):
    reports = _validate_problem(problem, cfg)
    ok = all(r.accepted for r in reports.values())
    doc = {"accepted": ok, "functions": {k: r.to_json() for k, r in reports.items()},
           "notes": ["validation is restricted to the bounding box"], "parameters": cfg.echo()}
    _emit(doc, _validation_text(reports) + f"\nresult             {'accepted' if ok else 'rejected'}", cfg, out)
    return EXIT_OK if ok else EXIT_FAIL


def _refuse(reports, cfg, out):
    doc = {"accepted": False, "functions": {k: r.to_json() for k, r in reports.items()},
           "parameters": cfg.echo()}
    _emit(doc, "input rejected by validation\n" + _validation_text(reports), cfg, out)
    return EXIT_FAIL


def _load_multipliers(path):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemFormatError(f"multipliers file: {exc}") from exc
    raw = problem_file.parse_multipliers(doc)
    return raw


def cmd_certify(problem, cfg, out):
    _check_point(problem, cfg.point)
    reports = _validate_problem(problem, cfg)
    if not all(r.accepted for r in reports.values()):
        return _refuse(reports, cfg, out)
    mult = None
    if cfg.multipliers is not None:
        raw = _load_multipliers(cfg.multipliers)
        alpha = raw.get("alpha", [1.0] if problem.q == 1 else None)
        if alpha is None:
            raise ProblemFormatError("multipliers file: 'alpha' is required with several objectives")
        mult = MultiplierVector(np.asarray(alpha, dtype=float),
                                np.asarray(raw.get("lambda", [0.0] * problem.m), dtype=float),
                                np.asarray(raw.get("mu", [0.0] * problem.p), dtype=float))
    opts = CertifyOptions(samples=cfg.samples, seed=cfg.seed, tol=cfg.tolerances, multipliers=mult,
                          oracle=cfg.oracle, oracle_radius=cfg.radius, oracle_samples=cfg.oracle_samples)
    rep = certify_point(problem, np.array(cfg.point), opts)
    doc = rep.to_json()
    doc["parameters"] = {"run": cfg.echo(), "certify": doc["parameters"]}
    _emit(doc, rep.render_text(), cfg, out)
    if rep.any_fail:
        return EXIT_FAIL
    if cfg.strict and rep.any_inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_oracle(problem, cfg, out):
    _check_point(problem, cfg.point)
    x = np.array(cfg.point)
    viol = problem.violations(x, cfg.tolerances.tol_feas)
    if viol:
        doc = {"point": sig(x), "feasible": False, "parameters": cfg.echo()}
        _emit(doc, f"point {sig(x)} is infeasible", cfg, out)
        return EXIT_FAIL
    problem = replace(problem, tol=cfg.tolerances)
    doc = {"point": sig(x), "feasible": True}
    try:
        est = empirical_growth(problem, x, cfg.radius, cfg.samples, cfg.seed)
        chk = empirical_local_min(problem, x, cfg.radius, cfg.samples, cfg.seed)
        doc["growth"] = est.to_json()
        doc["local_min"] = chk.to_json()
        text = (f"rho_emp   {sig(est.rho_emp)} at {sig(est.argmin)} "
                f"({est.feasible} feasible of {est.samples})\n"
                f"local min {chk.is_local_min} (worst gap {sig(chk.worst_gap)})")
    except TooFewFeasible as exc:
        doc["abstained"] = str(exc)
        text = f"oracle abstained: {exc}"
    doc["parameters"] = cfg.echo()
    _emit(doc, text, cfg, out)
    return EXIT_OK


def _select_function(problem, selector):
    kind, _, idx = selector.partition(":")
    if kind not in ("objectives", "inequalities", "equalities"):
        raise UsageError(f"--fn {selector!r}: expected objectives|inequalities|equalities:INDEX")
    try:
        i = int(idx or 0)
        return getattr(problem, kind)[i]
    except (ValueError, IndexError):
        raise UsageError(f"--fn {selector!r}: no such function") from None


def cmd_taylor(problem, cfg, out):
    f = _select_function(problem, cfg.fn)
    for v in (cfg.a, cfg.b):
        _check_point(problem, v)
    rep = validate(f, cfg.validation_samples, cfg.seed)
    if not rep.accepted:
        return _refuse({cfg.fn: rep}, cfg, out)
    res = taylor_check(f, np.array(cfg.a), np.array(cfg.b), tol=1e-8)
    doc = {"taylor": res.to_json(), "parameters": cfg.echo()}
    text = (f"delta {sig(res.delta)}  bounds [{sig(res.lower)}, {sig(res.upper)}]  "
            f"{'pass' if res.passed else 'FAIL'}")
    _emit(doc, text, cfg, out)
    return EXIT_OK if res.passed else EXIT_FAIL


COMMANDS = {"validate": cmd_validate, "certify": cmd_certify, "oracle": cmd_oracle, "taylor": cmd_taylor}


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        cfg = config_from_args(args)
        problem = problem_file.load(cfg.input)
        return COMMANDS[cfg.command](problem, cfg, out)
    except (UsageError, ProblemFormatError, NoMultipliers, OSError) as exc:
        err.write(f"c11cert: error: {exc}\n")
        return EXIT_PARSE
    except C11CertError as exc:
        err.write(f"c11cert: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
