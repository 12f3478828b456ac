"""
Delta and dipole content of the viscous limit
=============================================

"""

from deltawave import RiemannData, shadow_wave, vanishing_viscosity_limit
from deltawave.distcalc import EpsilonFamily, measure_moments, richardson, viscous_family
from deltawave.quadrature import QuadratureSpec

rd = RiemannData(-1, 2, 1, 0, 1, 2, 1, 0)
sol = vanishing_viscosity_limit(rd)
left = min(ln.speed for ln in sol.lines)
ln = sol.line(left)

# amplitudes predicted for the limit at t = 1
print("predicted delta(w), delta(z):", ln.delta("w")(1.0), ln.delta("z")(1.0))
print("predicted delta'(z):", ln.delta_prime("z")(1.0))

# moments of the viscous profiles in a window around the left line
gammas = [1e-2, 3e-3, 1e-3]
fam = viscous_family(rd.initial_data())
reps = [measure_moments(fam, sol, left, 1.0, 0.9, g, QuadratureSpec(1e-9)) for g in gammas]
for g, r in zip(gammas, reps):
    print(f"gamma={g:g}  M0(w)={r.M0[2]:.5f}  M0(z)={r.M0[3]:.5f}  M1(z)={r.M1[3]:.5f}")

# extrapolate to gamma = 0, first order in gamma
for name, k in (("M0(w)", 2), ("M0(z)", 3)):
    print(name, "->", round(richardson(gammas, [r.M0[k] for r in reps]).value, 5))
print("M1(z) ->", round(richardson(gammas, [r.M1[3] for r in reps]).value, 5))

# the shadow-wave family carries the same mass but no dipole in z
swf, ssol = shadow_wave(rd)
sfam = EpsilonFamily(swf, breaks=swf.breaks)
srep = measure_moments(sfam, ssol, left, 1.0, 0.9, 1e-3)
print(f"shadow eps=1e-3  M0(z)={srep.M0[3]:.5f}  M1(z)={srep.M1[3]:.2e}")
