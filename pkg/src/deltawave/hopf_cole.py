"""Exact viscous solution through generalised Hopf-Cole integrals.

For viscosity ``gamma`` and primitives ``U0, V0, W0, Z0`` the solution at
``(x, t)`` is a ratio of integrals against the positive weight
``exp(E(y))``, ``E(y) = -(U0(y) + (x - y)**2 / (2 t)) / gamma``. The
weight underflows for small ``gamma``, so every integral is taken against
``exp(E - m)`` with ``m`` the largest exponent on the quadrature nodes and
only scale-free combinations are exposed.

Practical floor: double precision handles ``gamma >= 1e-4`` comfortably;
below that the kernel panels become numerous and the cumulant cancellations
in ``z`` lose digits.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .initial_data import Primitives
from .quadrature import QuadratureError, QuadratureSpec, adaptive_gl, gl_nodes, panel_edges


class FieldSample(NamedTuple):
    """State ``(u, v, w, z)`` at a point or on an array of points."""

    u: float
    v: float
    w: float
    z: float


@dataclass(frozen=True)
class ViscousParams:
    gamma: float
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    t_min: float = 1e-6

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class KernelMoments:
    """Kernel integrals ``a, b, c, d`` and their x-derivatives.

    All eight share the positive factor ``exp(log_scale)``: the true value
    of ``a`` is ``a * exp(log_scale)`` and likewise for the others.
    """

    a: float
    b: float
    c: float
    d: float
    a_x: float
    b_x: float
    c_x: float
    d_x: float
    log_scale: float


@dataclass
class _KernelRule:
    y: np.ndarray
    weight: np.ndarray      # quadrature weight * exp(E - shift)
    shift: float
    n_panels: int


def _exponent(prims, gamma, x, t, y):
    return -(prims.U0(y) + (x - y) ** 2 / (2.0 * t)) / gamma


def _kernel_rule(prims: Primitives, params: ViscousParams, x: float, t: float) -> _KernelRule:
    gamma, quad = params.gamma, params.quad
    sigma = np.sqrt(gamma * t)
    lip = prims.U0.lipschitz
    radius = lip * t + quad.window_safety * np.sqrt(2.0 * gamma * t * np.log(1.0 / quad.rel_tol))
    breaks = prims.data.breaks
    width = 0.5 * sigma

    for _ in range(8):
        edges = panel_edges(x - radius, x + radius, width, breaks)
        y0, _w0 = gl_nodes(edges[:-1], edges[1:])
        shift = float(np.max(_exponent(prims, gamma, x, t, y0)))

        def integrand(y):
            e = _exponent(prims, gamma, x, t, y) - shift
            if np.max(e) > 600.0:
                raise QuadratureError("kernel exponent shift failed; refine panels")
            g = np.exp(e)
            return np.stack([g, g * (y - x) / sigma])

        res = adaptive_gl(integrand, edges, quad.rel_tol, quad.max_panels)
        y = res.nodes
        e = _exponent(prims, gamma, x, t, y)
        final_shift = float(np.max(e))
        weight = res.weights * np.exp(e - final_shift)
        total = weight.sum()
        # tail check: mass in the outermost panel widths must be negligible
        edge_mass = weight[(y < x - radius + width) | (y > x + radius - width)].sum()
        if edge_mass <= quad.rel_tol * total:
            return _KernelRule(y, weight, final_shift, res.n_panels)
        radius *= 2.0
    raise QuadratureError(f"kernel window did not close around x={x:g}, t={t:g}")


def eval_kernel_moments(prims: Primitives, params: ViscousParams, x: float, t: float) -> KernelMoments:
    """Normalised kernel integrals and their x-derivatives at ``(x, t)``."""
    if not t > 0:
        raise ValueError("t must be positive")
    g = params.gamma
    rule = _kernel_rule(prims, params, x, t)
    y, wt = rule.y, rule.weight
    V, W, Z = prims.V0(y), prims.W0(y), prims.Z0(y)
    fb = -V / g
    fc = V**2 / (2 * g**2) - W / g
    fd = -Z / g - V**3 / (6 * g**3) + V * W / g**2
    s = (y - x) / (g * t)
    vals = [np.sum(wt * f) for f in (np.ones_like(y), fb, fc, fd)]
    ders = [np.sum(wt * f * s) for f in (np.ones_like(y), fb, fc, fd)]
    log_scale = rule.shift - 0.5 * np.log(2 * np.pi * t * g)
    return KernelMoments(*vals, *ders, log_scale=log_scale)


def fields_from_moments(m: KernelMoments, gamma: float) -> FieldSample:
    """Quotient formulas for ``(u, v, w, z)`` in terms of kernel moments.

    Exact algebra but prone to cancellation for small ``gamma``; kept as an
    independent route to the cumulant form used by :func:`eval_fields`.
    """
    a = m.a
    B, Cc, D = m.b / a, m.c / a, m.d / a
    Bp = (m.b_x * a - m.b * m.a_x) / a**2
    Cp = (m.c_x * a - m.c * m.a_x) / a**2
    Dp = (m.d_x * a - m.d * m.a_x) / a**2
    u = -gamma * m.a_x / a
    v = -gamma * Bp
    w = -gamma * (Cp - B * Bp)
    z = -gamma * (B**2 * Bp - Bp * Cc - B * Cp + Dp)
    return FieldSample(u, v, w, z)


def eval_fields(prims: Primitives, params: ViscousParams, x: float, t: float) -> FieldSample:
    """Exact viscous solution at one point.

    The quotient formulas are rewritten as joint cumulants under the
    normalised kernel ``p(y)``, with ``s = (y - x)/(gamma t)``::

        u = <x - y> / t
        v = k(V0, s)
        w = k(W0, s) - k(V0, V0, s) / (2 gamma)
        z = k(Z0, s) - k(V0, W0, s) / gamma + k(V0, V0, V0, s) / (6 gamma^2)

    Every quantity is centred before it is multiplied, which removes the
    large cancellations of the raw quotients.
    """
    if t == 0:
        return FieldSample(*(float(c) for c in prims.data(np.array([x]))[:, 0]))
    if t < params.t_min:
        raise ValueError(f"t={t:g} is below t_min={params.t_min:g}")
    g = params.gamma
    rule = _kernel_rule(prims, params, x, t)
    y = rule.y
    p = rule.weight / rule.weight.sum()

    def centred(f):
        return f - np.dot(p, f)

    s = centred((y - x) / (g * t))
    V, W, Z = centred(prims.V0(y)), centred(prims.W0(y)), centred(prims.Z0(y))
    u = np.dot(p, x - y) / t
    Vs = np.dot(p, V * s)
    v = Vs
    w = np.dot(p, W * s) - np.dot(p, V * V * s) / (2 * g)
    k4 = np.dot(p, V**3 * s) - 3.0 * np.dot(p, V * V) * Vs
    z = np.dot(p, Z * s) - np.dot(p, V * W * s) / g + k4 / (6 * g * g)
    return FieldSample(float(u), float(v), float(w), float(z))


def eval_fields_many(prims: Primitives, params: ViscousParams, xs, t: float, workers=None) -> FieldSample:
    """:func:`eval_fields` over an array of ``x`` at fixed ``t``."""
    xs = np.asarray(xs, dtype=float)
    flat = xs.ravel()
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda x: eval_fields(prims, params, x, t), flat))
    else:
        rows = [eval_fields(prims, params, x, t) for x in flat]
    arr = np.array(rows, dtype=float).reshape(xs.shape + (4,))
    return FieldSample(*np.moveaxis(arr, -1, 0))


def sample_grid(prims: Primitives, params: ViscousParams, x_range, t_range, nx: int, nt: int,
                workers=None):
    """Evaluate the solution on a tensor grid.

    Returns ``(x, t, fields)`` where ``fields`` holds ``(nt, nx)`` arrays in
    row-major order (rows are times).
    """
    if not t_range[0] > 0:
        raise ValueError("t_range must start at a positive time")
    x = np.linspace(*x_range, nx)
    t = np.linspace(*t_range, nt)
    pts = [(xi, ti) for ti in t for xi in x]

    def one(pt):
        return eval_fields(prims, params, *pt)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, pts))
    else:
        rows = [one(pt) for pt in pts]
    arr = np.array(rows, dtype=float).reshape(nt, nx, 4)
    return x, t, FieldSample(*np.moveaxis(arr, -1, 0))
