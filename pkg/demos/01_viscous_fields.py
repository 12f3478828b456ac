"""
Exact viscous fields and the finite-difference solver
=====================================================

"""

import numpy as np

from deltawave import QuadratureSpec, RiemannData, ViscousParams, build_primitives, eval_fields_many
from deltawave.experiments import compare_solvers, smooth_data

# rarefaction data: u fans out while v, w, z ride along with it
rd = RiemannData(-1, 2, 1, 0, 1, 2, 1, 0)
quad = QuadratureSpec()
prims = build_primitives(rd.initial_data(), quad)

# sample the exact solution at t = 1 for a few viscosities
x = np.linspace(-2, 2, 9)
for gamma in (0.1, 0.01, 0.001):
    f = eval_fields_many(prims, ViscousParams(gamma, quad), x, 1.0)
    print(f"gamma={gamma:g}")
    print("  u:", np.round(f.u, 4))
    print("  w:", np.round(f.w, 3))

# w piles up near the fan edges as gamma shrinks; u approaches clip(x, -1, 1)

# the FD solver should agree with the exact formula on smooth data
for h, comp, err in compare_solvers(smooth_data(), 0.5, 0.25, [0.02, 0.01], half_width=4.0):
    print(f"h={h:g} {comp}: sup gap {err:.2e}")
