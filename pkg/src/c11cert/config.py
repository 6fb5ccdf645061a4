"""Numerical tolerances shared by every module.

All values can be overridden by building a new :class:`Tolerances` with
``dataclasses.replace(DEFAULT_TOLERANCES, tol_q=...)``.
"""

from dataclasses import asdict, dataclass, fields

DEFAULT_BOX_HALFWIDTH = 10.0
MAX_DEGREE = 6
MAX_CONE_DIMENSION = 8


@dataclass(frozen=True)
class Tolerances:
    tol_c0: float = 1e-9      # value mismatch across shared facets
    tol_c1: float = 1e-9      # gradient mismatch across shared facets
    tol_cell: float = 1e-10   # guard slack when testing cell membership
    tol_act: float = 1e-8     # active-set threshold
    tol_feas: float = 1e-8    # feasibility threshold
    tol_mult: float = 1e-8    # strict-multiplier threshold for the X0 cone
    tol_q: float = 1e-8       # quadratic-form decision band
    tol_kkt: float = 1e-9     # accepted KKT residual

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")

    def as_dict(self):
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
