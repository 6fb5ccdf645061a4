"""Certificates of first- and second-order optimality for programs with C^{1,1} piecewise-polynomial data."""

from .bundles import HessianBundle, bundle, lagrangian, min_quadratic_on_cone, qmax, qmin, taylor_check
from .certify import (
    Certificate,
    CertifyOptions,
    PointReport,
    certify_point,
    first_order_necessary,
    mop_first_order,
    mop_second_order_sufficient,
    second_order_necessary,
    second_order_necessary_isolated,
    second_order_sufficient,
)
from .cones import (
    LinearCone,
    RayBasis,
    contains,
    critical_cone,
    extreme_rays,
    is_trivial,
    linearization_cone,
    mop_critical_union,
    x0_cone,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .model import Cell, Halfspace, PiecewiseFn, Problem, validate
from .multipliers import (
    MultiplierVector,
    active_set,
    check_licq,
    check_mfcq,
    find_mop_multipliers,
    find_multipliers,
    kkt_residual,
)
from .oracle import GrowthEstimate, contingent_probe, empirical_growth, empirical_local_min
from .polynomial import Polynomial
from .problem_file import load, loads

__version__ = "0.1.0"
