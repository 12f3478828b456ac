"""
Shadow waves: weak residuals and the entropy test
=================================================

"""

import numpy as np

from deltawave import RiemannData, shadow_wave
from deltawave.distcalc import EpsilonFamily, bump, fitted_order, weak_residual_family
from deltawave.entropy import admissibility_report, quadratic_entropy

rd = RiemannData(-1, 2, 1, 1, 1, 2, 1, 1)
swf, _ = shadow_wave(rd)
fam = EpsilonFamily(swf, breaks=swf.breaks)

# residuals of all four equations against a bump sitting on the left line
phi = bump((-1.0, 1.0), (0.6, 0.5))
eps = [0.1, 0.03, 0.01, 0.003, 0.001]
R = np.array([weak_residual_family(fam, phi, e) for e in eps])
for e, r in zip(eps, R):
    print(f"eps={e:<6g}", "  ".join(f"{v: .3e}" for v in r))

# u is an exact weak solution, so its residual sits at roundoff
for k, c in enumerate("uvwz"):
    p = fitted_order(eps, np.abs(R[:, k]), floor=1e-10)
    print(c, "order", "n/a (roundoff)" if p is None else round(p, 3))

# entropy test with eta = u^2/2
rep = admissibility_report(swf, quadratic_entropy(), eps)
for ln in rep.lines:
    print(f"line {ln.speed:+g}: term1 -> {ln.term1_limit:.1e}, term2 -> {ln.term2_limit:.1e}, {ln.verdict}")
