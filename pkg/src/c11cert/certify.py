"""Certificates for first- and second-order optimality conditions at a candidate point.

Each check returns a :class:`Certificate`. Positive verdicts come in two
strengths: ``PROVED`` when the quadratic forms were minimized exactly over
the cone's faces, ``PASS_SAMPLED`` when only sampled directions were
examined. A ``FAIL_WITNESS`` always carries a replayable direction.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import bundles, cones, lp
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NoMultipliers
from .multipliers import (
    MultiplierVector,
    active_set,
    check_licq,
    check_mfcq,
    find_mop_multipliers,
    find_multipliers,
    kkt_residual,
    multiplier_defects,
    mop_descent_direction,
)
from .reporting import sig

PROVED = "PROVED"
PASS_SAMPLED = "PASS_SAMPLED"
FAIL_WITNESS = "FAIL_WITNESS"
VACUOUS = "VACUOUS"
INCONCLUSIVE = "INCONCLUSIVE"
POSITIVE = (PROVED, PASS_SAMPLED, VACUOUS)

FON, SON, SON_ISOLATED, SOS, MOP_FON, MOP_SOS = (
    "FON", "SON", "SON_ISOLATED", "SOS", "MOP_FON", "MOP_SOS")

FON_TOL = 1e-9


@dataclass(frozen=True)
class CertifyOptions:
    samples: int = 4096
    seed: int = 42
    tol: Tolerances = DEFAULT_TOLERANCES
    method: str = "auto"          # "auto": exact face enumeration when possible; "sampled": never
    max_rays: int = 12
    multipliers: MultiplierVector | None = None
    oracle: bool = False
    oracle_radius: float = 1e-2
    oracle_samples: int = 100_000

    def __post_init__(self):
        if self.samples < 1 or self.oracle_samples < 1:
            raise ValueError("sample counts must be positive")
        if self.method not in ("auto", "sampled"):
            raise ValueError("method must be 'auto' or 'sampled'")

    def echo(self):
        return {"samples": self.samples, "seed": self.seed, "method": self.method,
                "max_rays": self.max_rays, "tolerances": self.tol.as_dict(),
                "oracle": self.oracle, "oracle_radius": self.oracle_radius,
                "oracle_samples": self.oracle_samples}


@dataclass
class Certificate:
    condition: str
    status: str
    witness: dict | None = None        # {"v": unit direction, "qvalue": float}
    modulus: float | None = None
    assumptions: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    conclusion: str = ""
    details: dict = field(default_factory=dict)
    components: list = field(default_factory=list)

    @property
    def positive(self):
        return self.status in POSITIVE

    def to_json(self):
        out = {"condition": self.condition, "status": self.status,
               "witness": None if self.witness is None else
               {"v": sig(self.witness["v"]), "qvalue": sig(self.witness["qvalue"])},
               "modulus": sig(self.modulus) if self.modulus is not None else None,
               "assumptions": list(self.assumptions),
               "parameters": _jsonable(self.parameters),
               "conclusion": self.conclusion,
               "details": _jsonable(self.details)}
        if self.components:
            out["components"] = [c.to_json() for c in self.components]
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return sig(obj)


# -- evidence for the constraint qualification ---------------------------------------

def cq_assumptions(problem, x, active=None):
    """Which of {user flag, LICQ, MFCQ} backs the metric-subregularity assumption."""
    active = active_set(problem, x) if active is None else active
    out = []
    if problem.mscq_asserted:
        out.append("MSCQ_USER")
    if check_licq(problem, x, active)[0]:
        out.append("LICQ_VERIFIED")
    if check_mfcq(problem, x, active)[0]:
        out.append("MFCQ_VERIFIED")
    return out


def _downgrade(cert, cq):
    """A failed necessary condition refutes optimality only under a constraint qualification."""
    if cert.status == FAIL_WITNESS and not cq:
        cert.status = INCONCLUSIVE
        cert.conclusion = ("necessary condition violated on the linearized cone, but no constraint "
                           "qualification is available, so local optimality is not refuted")
    return cert


# -- the quadratic-form checks over a cone --------------------------------------------

def _sampling_params(opts):
    return {"samples": opts.samples, "seed": opts.seed, "tol_q": opts.tol.tol_q}


def _exact_params(opts):
    return {"tol_q": opts.tol.tol_q}


def _exact_minima(bundle, basis, opts):
    if opts.method == "sampled":
        return None
    out = []
    for H in bundle.matrices:
        r = bundles.min_quadratic_on_cone(H, basis, opts.max_rays)
        if r is None:
            return None
        out.append(r)
    return out


def _witness(v, q):
    return {"v": np.asarray(v, dtype=float), "qvalue": float(q)}


def check_sufficient_on_cone(cone, bundle, opts, condition=SOS):
    """Is ``<z, v> > 0`` for every ``z`` in the bundle image and every nonzero ``v`` in the cone?"""
    tol = opts.tol.tol_q
    basis = cones.extreme_rays(cone)
    details = {"cone": cone, "generators": basis, "bundle": bundle}
    if basis.is_trivial:
        return Certificate(condition, VACUOUS, parameters=_exact_params(opts), details=details,
                           conclusion="critical cone is {0}: the condition holds vacuously")
    exact = _exact_minima(bundle, basis, opts)
    if exact is not None:
        val, v = min(exact, key=lambda r: r[0])
        q = bundles.qmin(bundle, v)
        details["extremal_direction"] = v
        params = _exact_params(opts)
        if val > tol:
            return Certificate(condition, PROVED, modulus=val, parameters=params, details=details)
        status = FAIL_WITNESS if val <= -tol else INCONCLUSIVE
        return Certificate(condition, status, witness=_witness(v, q), parameters=params, details=details)
    dirs = cones.sample_directions(basis, opts.samples, opts.seed)
    qs = np.array([bundles.qmin(bundle, v) for v in dirs])
    k = int(np.argmin(qs))
    params = _sampling_params(opts)
    if qs[k] > tol:
        return Certificate(condition, PASS_SAMPLED, modulus=float(qs[k]), parameters=params, details=details)
    status = FAIL_WITNESS if qs[k] <= -tol else INCONCLUSIVE
    return Certificate(condition, status, witness=_witness(dirs[k], qs[k]), parameters=params, details=details)


def check_necessary_on_cone(cone, bundle, opts, strict, condition):
    """Does every direction ``v`` of the cone admit ``z`` with ``<z, v> >= 0`` (``> 0`` if strict)?"""
    tol = opts.tol.tol_q
    ok = (lambda q: q > tol) if strict else (lambda q: q >= -tol)
    basis = cones.extreme_rays(cone)
    details = {"cone": cone, "generators": basis, "bundle": bundle}
    if basis.is_trivial:
        return Certificate(condition, VACUOUS, parameters=_exact_params(opts), details=details,
                           conclusion="cone is {0}: the condition holds vacuously")
    exact = _exact_minima(bundle, basis, opts)
    extra = []
    if exact is not None:
        # max over the bundle dominates each single matrix, so one good matrix suffices
        best_val, best_v = max(exact, key=lambda r: r[0])
        if ok(best_val):
            details["lower_bound"] = best_val
            return Certificate(condition, PROVED, parameters=_exact_params(opts), details=details)
        if bundle.is_singleton:
            v = exact[0][1]
            return Certificate(condition, FAIL_WITNESS, witness=_witness(v, bundles.qmax(bundle, v)),
                               parameters=_exact_params(opts), details=details)
        extra = [v for _, v in exact]
    dirs = cones.sample_directions(basis, opts.samples, opts.seed)
    if extra:
        dirs = np.vstack([np.array(extra), dirs])
    qs = np.array([bundles.qmax(bundle, v) for v in dirs])
    k = int(np.argmin(qs))
    params = _sampling_params(opts)
    if ok(qs[k]):
        details["sampled_min_qmax"] = float(qs[k])
        return Certificate(condition, PASS_SAMPLED, parameters=params, details=details)
    return Certificate(condition, FAIL_WITNESS, witness=_witness(dirs[k], qs[k]), parameters=params,
                       details=details)


# -- the conditions ------------------------------------------------------------------

def _require_multipliers(problem, x, mult, tol):
    if mult is None:
        raise NoMultipliers("no multiplier vector available")
    defects = multiplier_defects(problem, x, mult, tol.tol_kkt)
    if defects:
        raise NoMultipliers("; ".join(defects))


def first_order_necessary(problem, x, opts=CertifyOptions(), active=None, cq=None):
    """``<grad f(x), v> >= 0`` on the linearization cone, decided by one LP over the unit box."""
    x = np.asarray(x, dtype=float)
    active = active_set(problem, x) if active is None else active
    cq = cq_assumptions(problem, x, active) if cq is None else cq
    cone = cones.linearization_cone(problem, x, active)
    A, E = cone.matrices()
    grad = problem.f.grad(x)
    val, v = lp.minimize_linear(grad, A, np.zeros(len(A)), [(-1.0, 1.0)] * problem.n,
                                E, np.zeros(len(E)))
    details = {"cone": cone, "lp_min": val}
    if val >= -FON_TOL:
        return Certificate(FON, PROVED, assumptions=cq, parameters={"tol": FON_TOL}, details=details,
                           conclusion="no first-order descent direction in the linearized cone")
    cert = Certificate(FON, FAIL_WITNESS, witness=_witness(v, grad @ v), assumptions=cq,
                       parameters={"tol": FON_TOL}, details=details,
                       conclusion="descent direction found: x is not a local minimizer")
    return _downgrade(cert, cq)


def _lagrangian_bundle(problem, x, mult):
    L = bundles.lagrangian(problem, mult, near=x)
    return bundles.bundle(L, x)


def second_order_necessary(problem, x, mult, opts=CertifyOptions(), active=None, cq=None, strict=False):
    """For every ``v`` of the X0 cone some ``z`` in the Lagrangian's bundle image has ``<z, v> >= 0``."""
    x = np.asarray(x, dtype=float)
    _require_multipliers(problem, x, mult, opts.tol)
    active = active_set(problem, x) if active is None else active
    cq = cq_assumptions(problem, x, active) if cq is None else cq
    cone = cones.x0_cone(problem, x, mult.lam, active, opts.tol.tol_mult)
    b = _lagrangian_bundle(problem, x, mult)
    condition = SON_ISOLATED if strict else SON
    cert = check_necessary_on_cone(cone, b, opts, strict, condition)
    cert.assumptions = list(cq) + ["ASSUMED_LINEARIZATION"]
    if cert.status == FAIL_WITNESS:
        cert.conclusion = ("x is not an isolated local solution of order 2" if strict
                           else "x is not a local minimizer")
    elif cert.status in (PROVED, PASS_SAMPLED):
        cert.conclusion = "necessary condition satisfied"
    return _downgrade(cert, cq)


def second_order_necessary_isolated(problem, x, mult, opts=CertifyOptions(), active=None, cq=None):
    return second_order_necessary(problem, x, mult, opts, active, cq, strict=True)


def second_order_sufficient(problem, x, mult, opts=CertifyOptions(), active=None):
    """``<z, v> > 0`` for every bundle image ``z`` and nonzero ``v`` in the critical cone.

    The linearization cone contains the tangent cone, so checking over it is
    sound without any constraint qualification.
    """
    x = np.asarray(x, dtype=float)
    _require_multipliers(problem, x, mult, opts.tol)
    active = active_set(problem, x) if active is None else active
    cone = cones.critical_cone(problem, x, active)
    b = _lagrangian_bundle(problem, x, mult)
    cert = check_sufficient_on_cone(cone, b, opts, SOS)
    cert.assumptions = ["NO_CQ_REQUIRED", "LINEARIZED_TANGENT_CONE"]
    cert.conclusion = _sufficient_conclusion(cert.status)
    return cert


def _sufficient_conclusion(status):
    if status in POSITIVE:
        return "x is an isolated local solution of order 2"
    if status == FAIL_WITNESS:
        return "sufficient condition violated along the witness; optimality is neither proved nor refuted"
    return "quadratic form within the tolerance band of zero; strict positivity undecided"


def mop_first_order(problem, x, opts=CertifyOptions(), active=None, cq=None):
    """Stationarity of the multiobjective program, equivalently nonemptiness of its multiplier set."""
    x = np.asarray(x, dtype=float)
    active = active_set(problem, x) if active is None else active
    cq = cq_assumptions(problem, x, active) if cq is None else cq
    res = find_mop_multipliers(problem, x, active)
    if res.found:
        return Certificate(MOP_FON, PROVED, assumptions=cq, details={"multipliers": res.multipliers},
                           conclusion="x is a stationary point")
    v = mop_descent_direction(problem, x, active)
    F, _, _ = problem.jacobians(x)
    cert = Certificate(MOP_FON, FAIL_WITNESS, witness=_witness(v, (F @ v).max()), assumptions=cq,
                       conclusion="all objectives decrease along v: x is not locally weakly efficient")
    return _downgrade(cert, cq)


def _aggregate(certs):
    statuses = [c.status for c in certs]
    for s in (FAIL_WITNESS, INCONCLUSIVE):
        if s in statuses:
            return s, certs[statuses.index(s)]
    if all(s == VACUOUS for s in statuses):
        return VACUOUS, None
    if PASS_SAMPLED in statuses:
        return PASS_SAMPLED, None
    return PROVED, None


def mop_second_order_sufficient(problem, x, mult, opts=CertifyOptions(), active=None):
    """The sufficient check on every component of the multiobjective critical set."""
    x = np.asarray(x, dtype=float)
    _require_multipliers(problem, x, mult, opts.tol)
    active = active_set(problem, x) if active is None else active
    union = cones.mop_critical_union(problem, x, active)
    b = _lagrangian_bundle(problem, x, mult)
    comps = []
    for l, cone in union.components:
        c = check_sufficient_on_cone(cone, b, opts, MOP_SOS)
        c.details["objective"] = l + 1
        comps.append(c)
    status, bad = _aggregate(comps)
    moduli = [c.modulus for c in comps if c.modulus is not None and c.positive]
    cert = Certificate(MOP_SOS, status, assumptions=["NO_CQ_REQUIRED", "LINEARIZED_TANGENT_CONE"],
                       components=comps, details={"bundle": b})
    if bad is not None:
        cert.witness = bad.witness
        cert.details["failing_objective"] = bad.details["objective"]
    if status in (PROVED, PASS_SAMPLED):
        cert.modulus = min(moduli)
    cert.parameters = _sampling_params(opts) if status == PASS_SAMPLED else _exact_params(opts)
    cert.conclusion = _sufficient_conclusion(status)
    return cert


# -- the whole pipeline ----------------------------------------------------------------

@dataclass
class PointReport:
    point: np.ndarray
    feasible: bool
    violations: list = field(default_factory=list)
    active_set: tuple = ()
    constraint_qualification: dict = field(default_factory=dict)
    multipliers: object = None
    certificates: list = field(default_factory=list)
    oracle: dict | None = None
    parameters: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def certificate(self, condition):
        for c in self.certificates:
            if c.condition == condition:
                return c
        return None

    @property
    def any_fail(self):
        return (not self.feasible) or any(c.status == FAIL_WITNESS for c in self.certificates)

    @property
    def any_inconclusive(self):
        return any(c.status == INCONCLUSIVE for c in self.certificates)

    def to_json(self):
        return {
            "point": sig(self.point),
            "feasible": self.feasible,
            "violations": [f"{k}{i + 1} = {sig(v)}" for k, i, v in self.violations],
            "active_set": [f"g{i + 1}" for i in self.active_set],
            "constraint_qualification": _jsonable(self.constraint_qualification),
            "multipliers": _jsonable(self.multipliers) if self.multipliers is not None else None,
            "certificates": [c.to_json() for c in self.certificates],
            "oracle": _jsonable(self.oracle) if self.oracle is not None else None,
            "parameters": _jsonable(self.parameters),
            "notes": list(self.notes),
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    def render_text(self):
        lines = [f"point            {sig(self.point)}",
                 f"feasible         {self.feasible}"]
        for k, i, v in self.violations:
            lines.append(f"  violated       {k}{i + 1} = {v:.3e}")
        lines.append(f"active set       {[f'g{i + 1}' for i in self.active_set]}")
        cq = self.constraint_qualification
        if cq:
            lines.append(f"CQ evidence      {cq.get('evidence', [])}")
        if isinstance(self.multipliers, dict):
            lines.append(f"multipliers      {json.dumps(_jsonable(self.multipliers))}")
        for c in self.certificates:
            extra = ""
            if c.modulus is not None:
                extra += f"  rho={sig(c.modulus)}"
            if c.witness is not None:
                extra += f"  witness v={sig(c.witness['v'])} q={sig(c.witness['qvalue'])}"
            lines.append(f"{c.condition:<16} {c.status}{extra}")
            if c.conclusion:
                lines.append(f"{'':<16} {c.conclusion}")
        if self.oracle is not None:
            lines.append(f"oracle           {json.dumps(_jsonable(self.oracle))}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def _user_multipliers(problem, opts):
    if opts.multipliers is not None:
        return opts.multipliers
    raw = problem.multipliers
    if raw is None:
        return None
    alpha = raw.get("alpha", [1.0] if problem.q == 1 else None)
    if alpha is None:
        raise NoMultipliers("multiobjective problems need 'alpha' in the multipliers block")
    return MultiplierVector(np.asarray(alpha, dtype=float),
                            np.asarray(raw.get("lambda", [0.0] * problem.m), dtype=float),
                            np.asarray(raw.get("mu", [0.0] * problem.p), dtype=float))


def certify_point(problem, x, opts=CertifyOptions()):
    """Feasibility, active set, CQ evidence, multipliers, then every applicable certificate."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != problem.n:
        raise ValueError(f"point has {x.size} coordinates, problem has {problem.n}")
    problem = replace(problem, tol=opts.tol) if problem.tol != opts.tol else problem
    rep = PointReport(point=x, feasible=True, parameters=opts.echo())
    rep.violations = problem.violations(x, opts.tol.tol_feas)
    if rep.violations:
        rep.feasible = False
        rep.notes.append("point is infeasible; no optimality analysis performed")
        return rep
    active = active_set(problem, x, opts.tol.tol_act, opts.tol.tol_feas)
    rep.active_set = tuple(active)
    licq, licq_ev = check_licq(problem, x, active)
    mfcq, mfcq_ev = check_mfcq(problem, x, active)
    cq = cq_assumptions(problem, x, active)
    rep.constraint_qualification = {"licq": licq, "licq_evidence": licq_ev, "mfcq": mfcq,
                                    "mfcq_evidence": mfcq_ev, "mscq_asserted": problem.mscq_asserted,
                                    "evidence": cq}
    rep.notes.append("critical cone uses <grad f(x), v> = 0 (equality form)")
    rep.notes.append("second-order necessary checks assume MSCQ; the sufficient checks need no CQ")

    user = _user_multipliers(problem, opts)
    if problem.q == 1:
        rep.certificates.append(first_order_necessary(problem, x, opts, active, cq))
        if user is not None:
            defects = multiplier_defects(problem, x, user, opts.tol.tol_kkt)
            res = kkt_residual(problem, x, user) if not defects else None
            rep.multipliers = {"source": "user", "values": user, "defects": defects,
                               "residual": None if res is None else res.norm}
            mult = None if defects else user
        else:
            found = find_multipliers(problem, x, active)
            rep.multipliers = {"source": "simplex", **found.to_json()}
            mult = found.multipliers
        if mult is None:
            rep.notes.append("NO_MULTIPLIERS: second-order analysis skipped")
            return _finish(problem, x, rep, opts)
        rep.certificates.append(second_order_necessary(problem, x, mult, opts, active, cq))
        rep.certificates.append(second_order_necessary_isolated(problem, x, mult, opts, active, cq))
        rep.certificates.append(second_order_sufficient(problem, x, mult, opts, active))
    else:
        rep.certificates.append(mop_first_order(problem, x, opts, active, cq))
        if user is not None:
            defects = multiplier_defects(problem, x, user, opts.tol.tol_kkt)
            rep.multipliers = {"source": "user", "values": user, "defects": defects}
            mult = None if defects else user
        else:
            found = find_mop_multipliers(problem, x, active)
            rep.multipliers = {"source": "simplex", **found.to_json()}
            mult = found.multipliers
        if mult is None:
            rep.notes.append("NO_MULTIPLIERS: second-order analysis skipped")
            return _finish(problem, x, rep, opts)
        rep.certificates.append(mop_second_order_sufficient(problem, x, mult, opts, active))
    return _finish(problem, x, rep, opts)


def _finish(problem, x, rep, opts):
    sos = rep.certificate(SOS)
    son = rep.certificate(SON)
    if sos is not None and son is not None and sos.positive and son.status == FAIL_WITNESS:
        rep.notes.append("INCONSISTENT: sufficient condition holds while the necessary one fails")
    if opts.oracle:
        from .oracle import empirical_growth
        from .errors import TooFewFeasible
        try:
            est = empirical_growth(problem, x, opts.oracle_radius, opts.oracle_samples, opts.seed)
            rep.oracle = est.to_json()
        except TooFewFeasible as exc:
            rep.oracle = {"abstained": str(exc)}
    return rep
