"""Certified growth moduli against sampled growth on random programs.

Prints the ratio rho_emp / rho for every instance whose sufficient check
succeeds; a sound certificate keeps the ratio at or above 0.5.

    python demos/growth_crosscheck.py
"""

from collections import Counter

from c11cert import instances
from c11cert.certify import SOS, certify_point
from c11cert.oracle import empirical_growth


def main(count=60):
    tally = Counter()
    ratios = []
    for seed in range(count):
        problem, x = instances.random_sufficient_candidate(seed)
        sos = certify_point(problem, x).certificate(SOS)
        status = "none" if sos is None else sos.status
        tally[status] += 1
        if sos is None or sos.modulus is None or not sos.positive:
            continue
        rho = empirical_growth(problem, x, radius=1e-2, count=20_000, seed=seed).rho_emp
        ratios.append(rho / sos.modulus)
        print(f"seed {seed:2d}  n={problem.n}  {status:<12} rho={sos.modulus:.4f}  rho_emp={rho:.4f}  ratio={rho / sos.modulus:.3f}")
    print("verdicts:", dict(tally))
    if ratios:
        print(f"smallest ratio {min(ratios):.3f} over {len(ratios)} certified instances")


if __name__ == "__main__":
    main()
