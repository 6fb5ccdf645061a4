"""Random saddles: the necessary check returns a witness direction of negative curvature.

The witness is replayed against the cone and the Hessian bundle, and the
oracle confirms that moving along it decreases the objective.

    python demos/saddle_detection.py
"""

import numpy as np

from c11cert import bundles, cones, instances
from c11cert.certify import SON, certify_point


def main(count=10):
    for seed in range(count):
        problem, x = instances.random_saddle_problem(seed)
        son = certify_point(problem, x).certificate(SON)
        v = np.asarray(son.witness["v"])
        inside = cones.contains(son.details["cone"], v)
        replay = bundles.qmax(son.details["bundle"], v)
        t = 1e-3
        drop = problem.objectives[0].eval(x + t * v) - problem.objectives[0].eval(x)
        feasible = not problem.violations(x + t * v, 1e-12)
        print(f"seed {seed:2d}  n={problem.n}  {son.status:<12} q(v)={replay:+.4f}  "
              f"in cone={inside}  f(x+tv)-f(x)={drop:+.2e}  feasible={feasible}")


if __name__ == "__main__":
    main()
