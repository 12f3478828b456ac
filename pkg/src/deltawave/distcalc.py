"""Test functions, pairings, weak residuals and moment extraction.

This is the measuring side of the package: it pairs closed-form
distributional solutions with smooth test functions, evaluates weak
residuals of epsilon-families, and reads off delta and delta' amplitudes
from a family through its zeroth and first moments around a line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .hopf_cole import FieldSample, ViscousParams, eval_fields
from .initial_data import COMPONENTS, PiecewiseInitialData, build_primitives
from .quadrature import QuadratureError, QuadratureSpec, adaptive_gl, gl_nodes, panel_edges
from .riemann import DistributionalSolution

_BUMP_1D_MASS = 0.443993816168079  # int_{-1}^{1} exp(-1/(1-s^2)) ds


class ResolutionError(QuadratureError):
    """A thin layer would be sampled by too few quadrature nodes."""


def _psi(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    inside = np.abs(s) < 1
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


def _dpsi(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    inside = np.abs(s) < 1
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si)) * (-2.0 * si / (1.0 - si * si) ** 2)
    return out


@dataclass(frozen=True)
class TestFunction:
    """Product bump ``psi((x-x0)/rx) * psi((t-t0)/rt)`` with peak value 1."""

    __test__ = False  # keep pytest from collecting this class

    x0: float
    t0: float
    rx: float
    rt: float

    @property
    def support(self):
        return (self.x0 - self.rx, self.x0 + self.rx), (self.t0 - self.rt, self.t0 + self.rt)

    def __call__(self, x, t):
        return _psi((x - self.x0) / self.rx) * _psi((t - self.t0) / self.rt)

    def dx(self, x, t):
        return _dpsi((x - self.x0) / self.rx) / self.rx * _psi((t - self.t0) / self.rt)

    def dt(self, x, t):
        return _psi((x - self.x0) / self.rx) * _dpsi((t - self.t0) / self.rt) / self.rt

    def dxx(self, x, t):
        """Second x-derivative by a centred difference of the analytic first derivative."""
        h = 1e-5 * self.rx
        return (self.dx(x + h, t) - self.dx(x - h, t)) / (2 * h)

    @property
    def integral(self) -> float:
        """Exact ``int int phi``, using the tabulated 1-D bump mass."""
        return self.rx * self.rt * (np.e * _BUMP_1D_MASS) ** 2


def bump(center, radii) -> TestFunction:
    """Smooth compactly supported bump centred at ``(x0, t0)``."""
    (x0, t0), (rx, rt) = center, radii
    if not (rx > 0 and rt > 0):
        raise ValueError("bump radii must be positive")
    return TestFunction(float(x0), float(t0), float(rx), float(rt))


@dataclass
class EpsilonFamily:
    """Family ``(eps, x, t) -> FieldSample`` of approximate solutions.

    ``breaks(eps, t)`` lists jump locations (piecewise-smooth families) and
    ``layer_width(eps, t)`` the thinnest smooth layer (smooth families);
    quadrature uses whichever is provided to resolve the layers.
    """

    func: Callable
    eps_range: tuple = (0.0, 1.0)
    breaks: Optional[Callable] = None
    layer_width: Optional[Callable] = None
    label: str = ""

    def __call__(self, eps, x, t) -> FieldSample:
        return self.func(eps, x, t)


def as_family(obj) -> EpsilonFamily:
    if isinstance(obj, EpsilonFamily):
        return obj
    return EpsilonFamily(obj, getattr(obj, "eps_range", (0.0, 1.0)),
                         breaks=getattr(obj, "breaks", None),
                         layer_width=getattr(obj, "layer_width", None))


def constant_family(state) -> EpsilonFamily:
    state = tuple(float(s) for s in state)

    def func(eps, x, t):
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        return FieldSample(*(np.full(x.shape, s) for s in state))

    return EpsilonFamily(func, breaks=lambda eps, t: [], label="constant")


def viscous_family(data: PiecewiseInitialData, quad: QuadratureSpec | None = None,
                   extent: float = 40.0, mollify_radius: Optional[Callable] = None) -> EpsilonFamily:
    """Exact viscous solutions with ``gamma = eps``.

    With ``mollify_radius`` the data are first mollified at radius
    ``mollify_radius(eps)`` (one primitive cache per eps).
    """
    quad = quad or QuadratureSpec()
    cache = {}

    def prims_for(eps):
        if mollify_radius is None:
            key = None
        else:
            key = float(eps)
        if key not in cache:
            d = data
            if mollify_radius is not None:
                from .experiments import MollifierSpec, mollify
                d = mollify(data, MollifierSpec(mollify_radius(eps)))
            cache[key] = build_primitives(d, quad, extent)
        return cache[key]

    def func(eps, x, t):
        prims = prims_for(eps)
        params = ViscousParams(float(eps), quad)
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        rows = [eval_fields(prims, params, xi, ti) for xi, ti in zip(x.ravel(), t.ravel())]
        arr = np.array(rows, dtype=float).reshape(x.shape + (4,))
        return FieldSample(*np.moveaxis(arr, -1, 0))

    return EpsilonFamily(func, (0.0, np.inf),
                         layer_width=lambda eps, t: np.sqrt(eps * t), label="viscous")


def _rho(s):
    return _psi(s) / (np.e * _BUMP_1D_MASS)


def _drho(s):
    return _dpsi(s) / (np.e * _BUMP_1D_MASS)


def mollified_family(sol: DistributionalSolution) -> EpsilonFamily:
    """Realise a distributional solution as a smooth-in-lines family.

    Every ``A delta`` on a line becomes ``A rho_eps`` and every
    ``B delta'`` becomes ``B rho_eps'`` with the unit-mass bump ``rho_eps``
    of radius ``eps``; the background is kept as it is.
    """

    def func(eps, x, t):
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        out = np.array(sol.background(x, t))
        for ln in sol.lines:
            s = (x - ln.speed * t) / eps
            r, dr = _rho(s) / eps, _drho(s) / eps**2
            for k in range(4):
                a, b = ln.delta_amp[k], ln.delta_prime_amp[k]
                if not a.is_zero:
                    out[k] += a(t) * r
                if not b.is_zero:
                    out[k] += b(t) * dr
        return FieldSample(*out)

    def breaks(eps, t):
        pts = list(sol.breaks(t))
        for ln in sol.lines:
            pts += [ln.speed * t - eps, ln.speed * t + eps]
        return sorted(pts)

    return EpsilonFamily(func, breaks=breaks, label=f"mollified {sol.label}")


def _x_edges(fam: EpsilonFamily, eps, t, lo, hi, max_panels, base_width):
    """Panel edges in x resolving the family's layers at time t."""
    if fam.breaks is not None:
        br = [b for b in fam.breaks(eps, t) if lo < b < hi]
        return panel_edges(lo, hi, base_width, br)
    if fam.layer_width is not None:
        width = min(base_width, 2.0 * fam.layer_width(eps, t))  # 16 nodes per panel: >= 8 per layer
        n = (hi - lo) / width
        if n > max_panels:
            raise ResolutionError(
                f"resolving layers of width {fam.layer_width(eps, t):g} needs {n:.0f} panels"
            )
        return panel_edges(lo, hi, width)
    raise ResolutionError("family declares neither breaks nor a layer width")


def _double_integral(inner, t_lo, t_hi, quad, n_out):
    """Integrate a stacked inner integral over t.

    ``inner(t)`` returns the x-integrals and the x-integrals of their
    absolute integrands, each of shape ``(n_out,)``. The outer threshold is
    floored at ``rel_tol`` times the double integral of ``|f|``, the scale
    of the inner quadrature error, so rows whose x-integral vanishes
    identically do not chase roundoff.
    """
    cache = {}

    def cached(t):
        if t not in cache:
            val, mag = inner(t)
            cache[t] = (np.asarray(val, float), np.asarray(mag, float))
        return cache[t]

    def outer(tn, part=0):
        flat = tn.ravel()
        vals = np.array([cached(float(ti))[part] for ti in flat]).T
        return vals.reshape((n_out,) + tn.shape)

    edges = panel_edges(t_lo, t_hi, (t_hi - t_lo) / 4)
    y, w = gl_nodes(edges[:-1], edges[1:])
    scale = (outer(y, part=1) * w).sum(axis=(-2, -1))
    return adaptive_gl(outer, edges, quad.rel_tol, quad.max_panels,
                       abs_tol=quad.rel_tol * scale).value


def pair(sol: DistributionalSolution, phi: TestFunction, component,
         quad: QuadratureSpec | None = None) -> float:
    """``<sol_k, phi>``: background integral plus line contributions."""
    quad = quad or QuadratureSpec(rel_tol=1e-10)
    k = COMPONENTS.index(component) if isinstance(component, str) else int(component)
    (x_lo, x_hi), (t_lo, t_hi) = phi.support
    if t_lo <= 0:
        raise ValueError("test function must be supported in t > 0")

    def inner(t):
        edges = panel_edges(x_lo, x_hi, (x_hi - x_lo) / 4,
                            [b for b in sol.breaks(t) if x_lo < b < x_hi])

        def f(x):
            return sol.background(x, t)[k] * phi(x, t)

        res = adaptive_gl(f, edges, quad.rel_tol, quad.max_panels)
        return np.array([res.value]), np.array([res.abs_value])

    total = _double_integral(inner, t_lo, t_hi, quad, 1)[0]
    for ln in sol.lines:
        a, b = ln.delta_amp[k], ln.delta_prime_amp[k]
        if a.is_zero and b.is_zero:
            continue

        def g(t, ln=ln, a=a, b=b):
            xl = ln.speed * t
            return a(t) * phi(xl, t) - b(t) * phi.dx(xl, t)

        edges = panel_edges(t_lo, t_hi, (t_hi - t_lo) / 4)
        total += adaptive_gl(g, edges, quad.rel_tol, quad.max_panels).value
    return float(total)


def pair_family(fam, phi: TestFunction, component, eps: float, t_panels: int = 2,
                max_panels: int = 20000) -> float:
    """``int int f_k(eps) phi`` by a fixed tensor Gauss-Legendre rule.

    Cheaper than the adaptive rule for expensive families such as exact
    viscous solutions; x-panels resolve the family's layers as in
    :func:`weak_residual_family` and ``t_panels`` 16-point panels span
    the time support.
    """
    fam = as_family(fam)
    k = COMPONENTS.index(component) if isinstance(component, str) else int(component)
    (x_lo, x_hi), (t_lo, t_hi) = phi.support
    if t_lo <= 0:
        raise ValueError("test function must be supported in t > 0")
    te = np.linspace(t_lo, t_hi, t_panels + 1)
    tn, tw = gl_nodes(te[:-1], te[1:])
    total = 0.0
    for t, wt in zip(tn.ravel(), tw.ravel()):
        edges = _x_edges(fam, eps, t, x_lo, x_hi, max_panels, (x_hi - x_lo) / 4)
        xn, xw = gl_nodes(edges[:-1], edges[1:])
        vals = np.asarray(fam(eps, xn.ravel(), t)[k]) * phi(xn.ravel(), t)
        total += wt * np.dot(vals, xw.ravel())
    return float(total)


def inviscid_fluxes(q):
    """Fluxes of the inviscid system for a stacked state ``q = (u, v, w, z)``."""
    u, v, w, z = q
    return np.stack([0.5 * u * u, u * v, 0.5 * v * v + u * w, v * w + u * z])


def weak_residual_family(fam, phi: TestFunction, eps: float,
                         quad: QuadratureSpec | None = None) -> np.ndarray:
    """``R_k = -int int (q_k phi_t + f_k phi_x)`` for the four equations."""
    fam = as_family(fam)
    quad = quad or QuadratureSpec(rel_tol=1e-10)
    (x_lo, x_hi), (t_lo, t_hi) = phi.support
    if t_lo <= 0:
        raise ValueError("test function must be supported in t > 0")

    def inner(t):
        edges = _x_edges(fam, eps, t, x_lo, x_hi, quad.max_panels, (x_hi - x_lo) / 4)

        def f(x):
            q = np.array(fam(eps, x, t))
            return -(q * phi.dt(x, t) + inviscid_fluxes(q) * phi.dx(x, t))

        res = adaptive_gl(f, edges, quad.rel_tol, quad.max_panels)
        return res.value, res.abs_value

    return _double_integral(inner, t_lo, t_hi, quad, 4)


@dataclass(frozen=True)
class MomentReport:
    """Zeroth and first moments of ``family - background`` around a line."""

    line_speed: float
    t: float
    eps: float
    M0: tuple
    M1: tuple
    window: float

    def rows(self):
        for k, c in enumerate(COMPONENTS):
            yield (self.eps, c, self.line_speed, self.t, self.M0[k], self.M1[k])


def measure_moments(fam, sol: DistributionalSolution, line_speed: float, t: float,
                    window: float, eps: float, quad: QuadratureSpec | None = None) -> MomentReport:
    """Moments over ``[c t - window, c t + window]``.

    ``M0 -> delta amplitude`` and ``M1 -> -(delta' amplitude)`` as the
    family concentrates, since ``<h delta', x - c t> = -h``.
    """
    fam = as_family(fam)
    quad = quad or QuadratureSpec(rel_tol=1e-9)
    if not t > 0:
        raise ValueError("t must be positive")
    xc = line_speed * t
    for ln in sol.lines:
        if ln.speed != line_speed and abs(ln.speed * t - xc) <= window:
            raise ValueError(f"window {window:g} reaches the line of speed {ln.speed:g}")
    lo, hi = xc - window, xc + window
    edges = _x_edges(fam, eps, t, lo, hi, quad.max_panels, window / 4)
    extra = [b for b in sol.breaks(t) if lo < b < hi]
    edges = np.unique(np.concatenate([edges, extra]))

    def f(x):
        d = np.array(fam(eps, x, t)) - np.array(sol.background(x, t))
        return np.concatenate([d, d * (x - xc)])

    val = adaptive_gl(f, edges, quad.rel_tol, quad.max_panels, abs_tol=1e-14).value
    return MomentReport(line_speed, t, eps, tuple(val[:4]), tuple(val[4:]), window)


@dataclass(frozen=True)
class Extrapolation:
    value: float
    order: float
    params: tuple
    raw: tuple


def richardson(params, values, order: float = 1.0) -> Extrapolation:
    """Least-squares fit ``value = A + B * param**order``; returns ``A``.

    With two points this is classical two-point Richardson extrapolation.
    """
    p = np.asarray(params, dtype=float) ** order
    v = np.asarray(values, dtype=float)
    A = np.vstack([np.ones_like(p), p]).T
    coef = np.linalg.lstsq(A, v, rcond=None)[0]
    return Extrapolation(float(coef[0]), order, tuple(params), tuple(values))


def fitted_order(params, values, floor: float = 1e-12):
    """Slope of ``log|value|`` against ``log param``; None if all below ``floor``."""
    v = np.abs(np.asarray(values, dtype=float))
    if np.all(v <= floor):
        return None
    return float(np.polyfit(np.log(params), np.log(np.maximum(v, floor)), 1)[0])
