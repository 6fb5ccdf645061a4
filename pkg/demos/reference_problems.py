"""Certify the three small reference problems and compare with the sampling oracle.

    python demos/reference_problems.py
"""

import numpy as np

from c11cert import certify_point, instances
from c11cert.oracle import empirical_growth, empirical_local_min


def show(title, problem, x):
    print(f"== {title}  (x = {x.tolist()})")
    rep = certify_point(problem, x)
    print(rep.render_text())
    est = empirical_growth(problem, x, radius=1e-2, count=100_000, seed=42)
    chk = empirical_local_min(problem, x)
    print(f"oracle: rho_emp = {est.rho_emp:.4f} from {est.feasible} feasible samples, local min = {chk.is_local_min}")
    print()


def main():
    show("kink objective on a segment", instances.kink_equality(), np.array([1.0, 0.0]))
    show("linear plus square on the orthant", instances.orthant_linear(), np.zeros(2))
    show("two objectives, one of them kinked", instances.biobjective_kink(), np.zeros(1))


if __name__ == "__main__":
    main()
