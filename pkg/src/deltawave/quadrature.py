"""Composite Gauss-Legendre quadrature with adaptive panel bisection.

All integrals in the package go through :func:`adaptive_gl`. Panels are
evaluated in vectorised batches: every pending panel is integrated once
whole and once as two halves, and panels whose two estimates disagree are
bisected. Accepted panels keep the (more accurate) halves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GL_ORDER = 16
_XI, _WI = np.polynomial.legendre.leggauss(GL_ORDER)


_UNRESOLVABLE = np.finfo(float).tiny / np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be resolved within the panel budget."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy controls shared by the quadrature-backed modules.

    Parameters
    ----------
    rel_tol : float
        Target relative accuracy, in (0, 1).
    max_panels : int
        Upper bound on the number of panels of one integral (>= 4).
    window_safety : float
        Multiplier (>= 1) on the Gaussian tail width used to size
        integration windows of the heat kernel.
    """

    rel_tol: float = 1e-12
    max_panels: int = 20000
    window_safety: float = 1.5

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_panels < 4:
            raise ValueError(f"max_panels must be >= 4, got {self.max_panels}")
        if self.window_safety < 1.0:
            raise ValueError(f"window_safety must be >= 1, got {self.window_safety}")


@dataclass
class AdaptiveResult:
    """Outcome of :func:`adaptive_gl`.

    ``nodes`` and ``weights`` are flat arrays of the final rule, so callers
    can integrate further functions on the same nodes.
    """

    value: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    n_panels: int
    abs_value: np.ndarray = None


def gl_nodes(lo, hi):
    """Nodes and weights of the 16-point rule on each panel ``[lo, hi]``.

    Returns arrays of shape ``(n_panels, 16)``.
    """
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    half = 0.5 * (hi - lo)
    return lo + half * (_XI + 1.0), half * _WI


def panel_edges(a, b, max_width, breaks=()):
    """Edges covering ``[a, b]`` with every break inside included."""
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    inner = [p for p in breaks if a < p < b]
    knots = np.array([a, *sorted(inner), b], dtype=float)
    edges = [knots[:1]]
    for lo, hi in zip(knots[:-1], knots[1:]):
        n = max(1, int(np.ceil((hi - lo) / max_width)))
        edges.append(np.linspace(lo, hi, n + 1)[1:])
    return np.concatenate(edges)


def adaptive_gl(func, edges, rel_tol=1e-12, max_panels=20000, abs_tol=0.0):
    """Integrate ``func`` over the union of panels given by ``edges``.

    Parameters
    ----------
    func : callable
        Maps a node array of shape ``S`` to values of shape ``S`` or
        ``(k,) + S`` (a stack of ``k`` integrands checked together).
    edges : array_like
        Increasing panel edges; kinks of the integrand belong here.
    rel_tol : float
        Per-panel acceptance threshold relative to the integral of
        ``|func|`` (per stacked integrand).
    max_panels : int
        Budget; exceeding it raises :class:`QuadratureError`.
    abs_tol : float or array_like
        Absolute floor on the acceptance threshold, scalar or one per
        stacked integrand.
    """
    edges = np.asarray(edges, dtype=float)
    pending_lo, pending_hi = edges[:-1], edges[1:]
    done_nodes, done_weights, done_vals, done_abs = [], [], [], []
    abs_scale = None
    n_done = 0

    while pending_lo.size:
        if n_done + pending_lo.size > max_panels:
            raise QuadratureError(
                f"quadrature did not converge within {max_panels} panels "
                f"(rel_tol={rel_tol:g})"
            )
        mid = 0.5 * (pending_lo + pending_hi)
        y, w = gl_nodes(pending_lo, pending_hi)
        yl, wl = gl_nodes(pending_lo, mid)
        yr, wr = gl_nodes(mid, pending_hi)
        fy, fl, fr = func(y), func(yl), func(yr)
        stacked = np.ndim(fy) == 3
        if not stacked:
            fy, fl, fr = fy[None], fl[None], fr[None]
        whole = (fy * w).sum(-1)
        halves = (fl * wl).sum(-1) + (fr * wr).sum(-1)
        if not (np.all(np.isfinite(halves)) and np.all(np.isfinite(whole))):
            raise QuadratureError("non-finite integrand value")

        panel_abs = (np.abs(fl) * wl).sum(-1) + (np.abs(fr) * wr).sum(-1)
        total_abs = panel_abs.sum(-1)
        if abs_scale is None:
            abs_scale = total_abs
        else:
            abs_scale = np.maximum(abs_scale, total_abs)
        # below the normal range only absolute accuracy exists
        tol = np.maximum(np.maximum(rel_tol * abs_scale, abs_tol), _UNRESOLVABLE)[:, None]
        ok = np.all(np.abs(whole - halves) <= tol, axis=0)

        if ok.any():
            done_nodes.append(np.concatenate([yl[ok], yr[ok]], axis=-1).ravel())
            done_weights.append(np.concatenate([wl[ok], wr[ok]], axis=-1).ravel())
            done_vals.append(halves[:, ok].sum(-1))
            done_abs.append(panel_abs[:, ok].sum(-1))
            n_done += int(ok.sum())
        bad = ~ok
        pending_lo = np.concatenate([pending_lo[bad], mid[bad]])
        pending_hi = np.concatenate([mid[bad], pending_hi[bad]])

    value = np.sum(done_vals, axis=0) if done_vals else np.zeros(1)
    abs_value = np.sum(done_abs, axis=0) if done_abs else np.zeros(1)
    nodes = np.concatenate(done_nodes) if done_nodes else np.zeros(0)
    weights = np.concatenate(done_weights) if done_weights else np.zeros(0)
    order = np.argsort(nodes, kind="stable")
    if not stacked:
        value, abs_value = value[0], abs_value[0]
    return AdaptiveResult(value, nodes[order], weights[order], n_done, abs_value)


def integrate(func, a, b, breaks=(), rel_tol=1e-12, max_panels=20000,
              max_width=None, abs_tol=0.0):
    """Adaptive integral of a scalar-valued vectorised ``func`` over [a, b]."""
    if a == b:
        return 0.0
    if a > b:
        return -integrate(func, b, a, breaks, rel_tol, max_panels, max_width, abs_tol)
    width = (b - a) / 4 if max_width is None else max_width
    if not width > 0:  # subnormal interval: one panel
        width = b - a
    edges = panel_edges(a, b, width, breaks)
    return adaptive_gl(func, edges, rel_tol, max_panels, abs_tol).value
