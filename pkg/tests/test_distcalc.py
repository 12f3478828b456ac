import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import dblquad, quad

from deltawave.distcalc import (EpsilonFamily, ResolutionError, bump, constant_family, fitted_order,
                                measure_moments, mollified_family, pair, pair_family, richardson,
                                viscous_family, weak_residual_family)
from deltawave.quadrature import QuadratureSpec
from deltawave.riemann import (Amplitude, DistributionalSolution, Region, RiemannData, SingularLine, ZERO,
                               combine, shadow_wave, vanishing_viscosity_limit, volpert_solution)

from oracles import BUMP_MASS

EQUAL = RiemannData(-1, 2, 1, 0, 1, 2, 1, 0)


def test_bump_mass_oracle():
    I = quad(lambda s: np.exp(-1 / (1 - s * s)) if abs(s) < 1 else 0.0, -1, 1, epsabs=1e-14)[0]
    assert I == pytest.approx(0.443994, abs=1e-6)
    assert I == pytest.approx(BUMP_MASS, rel=1e-12)


def test_bump_normalisation_and_support():
    phi = bump((0.3, 1.0), (0.5, 0.25))
    assert phi(0.3, 1.0) == 1.0
    for x, t in ((0.8, 1.0), (-0.2, 1.0), (0.3, 0.75), (0.3, 1.25)):
        assert phi(x, t) == 0.0 and phi.dx(x, t) == 0.0 and phi.dt(x, t) == 0.0
    with pytest.raises(ValueError):
        bump((0, 1), (0, 1))


def test_bump_integral_and_derivatives():
    phi = bump((0.3, 1.0), (0.5, 0.25))
    num = dblquad(lambda t, x: phi(x, t), -0.2, 0.8, 0.75, 1.25, epsabs=1e-12)[0]
    assert num == pytest.approx(0.5 * 0.25 * (np.e * BUMP_MASS) ** 2, rel=1e-6)
    h = 1e-6
    assert phi.dx(0.5, 1.1) == pytest.approx((phi(0.5 + h, 1.1) - phi(0.5 - h, 1.1)) / (2 * h), rel=1e-6)
    assert phi.dt(0.5, 1.1) == pytest.approx((phi(0.5, 1.1 + h) - phi(0.5, 1.1 - h)) / (2 * h), rel=1e-6)


def _zero_solution():
    return DistributionalSolution((Region(-np.inf, np.inf, (0.0, 0.0, 0.0, 0.0)),), ())


def test_pair_zero_and_pure_delta():
    phi = bump((0.0, 1.0), (0.5, 0.5))
    assert pair(_zero_solution(), phi, "w") == 0.0
    line = SingularLine(0.0, (ZERO, ZERO, Amplitude.of((3.0, 0)), ZERO))
    sol = DistributionalSolution((Region(-np.inf, np.inf, (0.0, 0.0, 0.0, 0.0)),), (line,))
    expected = 3.0 * 0.5 * np.e * BUMP_MASS
    assert pair(sol, phi, "w") == pytest.approx(expected, rel=1e-9)


def test_pair_rejects_support_reaching_t0():
    with pytest.raises(ValueError):
        pair(_zero_solution(), bump((0, 0.3), (1, 0.5)), "u")


def test_pair_dipole_sign_convention():
    # <h delta', phi> = -h phi_x on the line
    line = SingularLine(0.0, delta_prime_amp=(ZERO, ZERO, ZERO, Amplitude.of((1.0, 0))))
    sol = DistributionalSolution((Region(-np.inf, np.inf, (0.0, 0.0, 0.0, 0.0)),), (line,))
    phi = bump((-0.2, 1.0), (0.5, 0.5))
    expected = -quad(lambda t: phi.dx(0.0, t), 0.5, 1.5, epsabs=1e-13)[0]
    assert pair(sol, phi, "z") == pytest.approx(expected, rel=1e-8)


@settings(max_examples=10)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 2), st.floats(0, 2))
def test_pair_linearity(a, b, c1, c2):
    A, B = volpert_solution(EQUAL, c1), volpert_solution(EQUAL, c2)
    phi = bump((-0.9, 1.0), (0.4, 0.3))
    lhs = pair(combine(a, A, b, B), phi, "z")
    rhs = a * pair(A, phi, "z") + b * pair(B, phi, "z")
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-9)


def test_translation_along_line():
    line = SingularLine(0.5, (ZERO, ZERO, Amplitude.of((1.0, 1)), ZERO))
    sol = DistributionalSolution((Region(-np.inf, np.inf, (0.0, 0.0, 0.0, 0.0)),), (line,))
    phi0 = bump((0.5, 1.0), (0.3, 0.4))
    phi1 = bump((0.5 + 0.5 * 0.3, 1.3), (0.3, 0.4))
    # amplitude t: shifting by dt adds dt * int phi(line) dt
    shift = 0.3 * quad(lambda t: phi0(0.5 * t, t), 0.6, 1.4)[0]
    assert pair(sol, phi1, "w") - pair(sol, phi0, "w") == pytest.approx(shift, rel=1e-8)


@settings(max_examples=10)
@given(st.tuples(*(st.floats(-3, 3),) * 4), st.sampled_from([0.1, 0.01, 0.001]))
def test_constant_family_has_zero_residual(state, eps):
    R = weak_residual_family(constant_family(state), bump((0.2, 1.0), (0.7, 0.5)), eps)
    assert np.all(np.abs(R) < 1e-10)


def test_shadow_wave_residual_decays():
    fam, _ = shadow_wave(RiemannData(-1, 2, 1, 1, 1, 2, 1, 1))
    phi = bump((-1.0, 1.0), (0.6, 0.5))
    eps = [0.1, 0.01, 0.001]
    R = np.array([weak_residual_family(EpsilonFamily(fam, breaks=fam.breaks), phi, e) for e in eps])
    for k in range(1, 4):
        assert fitted_order(eps, R[:, k]) > 0.9
    assert np.all(np.abs(R[:, 0]) < 1e-10)  # u is an exact weak solution


class _SecondDerivative:
    """``phi_xx`` in the shape ``pair_family`` expects."""

    def __init__(self, phi):
        self.phi, self.support = phi, phi.support

    def __call__(self, x, t):
        return self.phi.dxx(x, t)


@pytest.mark.slow
def test_viscous_residual_is_the_viscous_term():
    # q_t + f(q)_x = (gamma/2) q_xx, so the inviscid residual is (gamma/2) <q, phi_xx>
    fam = viscous_family(EQUAL.initial_data(), QuadratureSpec(1e-10))
    phi = bump((-1.0, 1.0), (0.5, 0.3))
    R = {}
    for g in (0.1, 0.01):
        R[g] = weak_residual_family(fam, phi, g, QuadratureSpec(1e-6))
        visc = [0.5 * g * pair_family(fam, _SecondDerivative(phi), c, g, t_panels=4) for c in "uvwz"]
        assert np.allclose(R[g], visc, rtol=0, atol=1e-4)
    assert np.all(np.abs(R[0.01]) < np.abs(R[0.1]))


def test_moments_of_mollified_delta():
    A = 1.7
    line = SingularLine(0.0, (ZERO, ZERO, Amplitude.of((A, 0)), ZERO))
    sol = DistributionalSolution((Region(-np.inf, np.inf, (0.0, 0.0, 0.0, 0.0)),), (line,))
    rep = measure_moments(mollified_family(sol), sol, 0.0, 1.0, 0.5, 0.05)
    assert rep.M0[2] == pytest.approx(A, rel=1e-9)
    assert abs(rep.M1[2]) < 1e-12


@pytest.mark.parametrize("c", [0.0, 0.8])
def test_moment_consistency_for_realised_solution(c):
    sol = volpert_solution(RiemannData(-1, 2, 1, 1, 1, -1, 0.5, 2), c)
    fam = mollified_family(sol)
    for ln in sol.lines:
        rep = measure_moments(fam, sol, ln.speed, 1.2, 0.9, 0.02)
        for k in range(4):
            assert rep.M0[k] == pytest.approx(ln.delta_amp[k](1.2), abs=1e-8)
            assert rep.M1[k] == pytest.approx(-ln.delta_prime_amp[k](1.2), abs=1e-8)


def test_window_overlap_rejected():
    sol = vanishing_viscosity_limit(EQUAL)
    with pytest.raises(ValueError, match="reaches"):
        measure_moments(mollified_family(sol), sol, -1.0, 1.0, 2.5, 0.01)


def test_under_resolved_layer_detected():
    fam = viscous_family(EQUAL.initial_data())
    sol = vanishing_viscosity_limit(EQUAL)
    with pytest.raises(ResolutionError):
        measure_moments(fam, sol, -1.0, 1.0, 0.9, 1e-6, QuadratureSpec(max_panels=50))


def test_richardson_exact_for_linear_data():
    ex = richardson([0.1, 0.03, 0.01], [2 + 3 * 0.1, 2 + 3 * 0.03, 2 + 3 * 0.01])
    assert ex.value == pytest.approx(2.0, rel=1e-14) and ex.order == 1.0
    assert fitted_order([0.1, 0.01], [0.0, 0.0]) is None


@pytest.mark.slow
def test_viscous_pairing_extrapolates_to_limit():
    sol = vanishing_viscosity_limit(EQUAL)
    phi = bump((-1.0, 1.0), (0.5, 0.3))
    fam = viscous_family(EQUAL.initial_data())
    gam = [1e-2, 3e-3, 1e-3]
    vals = [pair_family(fam, phi, "z", g) for g in gam]
    assert richardson(gam, vals).value == pytest.approx(pair(sol, phi, "z"), rel=0.05)


def test_fixed_rule_pairing_is_accurate():
    sol = volpert_solution(EQUAL)
    fam = mollified_family(sol)
    phi = bump((-1.0, 1.0), (0.5, 0.3))
    ref = pair(sol, phi, "w")
    assert pair_family(fam, phi, "w", 1e-3, t_panels=4) == pytest.approx(ref, rel=1e-3)
