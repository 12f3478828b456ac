"""Piecewise initial data and their cached primitives.

A component is a :class:`Piecewise` function: ordered breakpoints and one
piece per interval, each piece either a number or a vectorised callable.
:func:`build_primitives` turns the four components into antiderivatives
anchored at 0. Constant pieces integrate exactly; callable pieces are
replaced on a cache of panels by Chebyshev interpolants whose
antiderivatives are exact, so a primitive evaluation costs one binary
search plus one short polynomial evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Real
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial import chebyshev as C

from .quadrature import QuadratureError, QuadratureSpec

Piece = Union[float, Callable[[np.ndarray], np.ndarray]]

COMPONENTS = ("u", "v", "w", "z")

_CHEB_DEG = 24
_CHEB_PTS = np.cos(np.pi * (np.arange(_CHEB_DEG + 1) + 0.5) / (_CHEB_DEG + 1))
# interior probe points used to accept an interpolant
_PROBE = np.array([-0.93, -0.61, -0.27, 0.11, 0.44, 0.79, 0.97])


def _is_const(piece) -> bool:
    return isinstance(piece, Real)


class Piecewise:
    """Piecewise function of one variable.

    Parameters
    ----------
    breaks : sequence of float
        Strictly increasing breakpoints ``b_0 < ... < b_{m-1}``.
    pieces : sequence
        ``m + 1`` pieces; piece ``i`` lives on ``(b_{i-1}, b_i)``.
    bound : float, optional
        Declared sup-norm. Computed for piecewise-constant data; required
        when any piece is callable.
    """

    def __init__(self, breaks: Sequence[float], pieces: Sequence[Piece], bound=None):
        self.breaks = tuple(float(b) for b in breaks)
        self.pieces = tuple(float(p) if _is_const(p) else p for p in pieces)
        if len(self.pieces) != len(self.breaks) + 1:
            raise ValueError("need exactly len(breaks) + 1 pieces")
        if any(b1 <= b0 for b0, b1 in zip(self.breaks, self.breaks[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if not all(np.isfinite(self.breaks)):
            raise ValueError("breakpoints must be finite")
        if bound is None:
            if not self.is_piecewise_constant:
                raise ValueError("a sup-norm bound is required for callable pieces")
            bound = max(abs(p) for p in self.pieces)
        self.bound = float(bound)
        if not self.bound >= 0.0:
            raise ValueError("bound must be non-negative")

    @classmethod
    def constant(cls, value: float) -> "Piecewise":
        return cls((), (float(value),))

    @classmethod
    def step(cls, left: float, right: float, at: float = 0.0) -> "Piecewise":
        if left == right:
            return cls.constant(left)
        return cls((at,), (float(left), float(right)))

    @property
    def is_piecewise_constant(self) -> bool:
        return all(_is_const(p) for p in self.pieces)

    def interval(self, i):
        lo = self.breaks[i - 1] if i > 0 else -np.inf
        hi = self.breaks[i] if i < len(self.breaks) else np.inf
        return lo, hi

    def _eval_piece(self, i, x):
        p = self.pieces[i]
        if _is_const(p):
            return np.full(x.shape, p)
        return np.asarray(p(x), dtype=float) * np.ones(x.shape)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        idx = np.searchsorted(self.breaks, x, side="right")
        for i in range(len(self.pieces)):
            sel = idx == i
            if sel.any():
                out[sel] = self._eval_piece(i, x[sel])
        # value at a breakpoint is the mean of the one-sided limits
        for j, b in enumerate(self.breaks):
            at = x == b
            if at.any():
                xb = np.array([b])
                left = self._eval_piece(j, xb)[0]
                right = self._eval_piece(j + 1, xb)[0]
                out[at] = 0.5 * (left + right)
        return out

    def check(self, extent: float = 40.0, n: int = 257):
        """Spot-check finiteness and the declared bound by sampling."""
        for i, p in enumerate(self.pieces):
            if _is_const(p):
                vals = np.array([p])
            else:
                lo, hi = self.interval(i)
                lo = max(lo, (self.breaks[0] if self.breaks else 0.0) - extent)
                hi = min(hi, (self.breaks[-1] if self.breaks else 0.0) + extent)
                s = np.linspace(lo, hi, n)
                vals = self._eval_piece(i, s)
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"non-finite sample in piece {i}")
            if np.max(np.abs(vals)) > self.bound * (1 + 1e-9) + 1e-12:
                raise ValueError(
                    f"piece {i} exceeds declared bound {self.bound:g} "
                    f"(sampled {np.max(np.abs(vals)):g})"
                )


@dataclass(frozen=True)
class PiecewiseInitialData:
    """The four initial profiles ``u0, v0, w0, z0``."""

    u: Piecewise
    v: Piecewise
    w: Piecewise
    z: Piecewise

    def components(self):
        return (self.u, self.v, self.w, self.z)

    @property
    def bounds(self):
        return tuple(c.bound for c in self.components())

    @property
    def breaks(self):
        """Union of the breakpoints of all components."""
        return tuple(sorted({b for c in self.components() for b in c.breaks}))

    def __call__(self, x):
        """Stack of the four profiles at ``x``, shape ``(4,) + x.shape``."""
        return np.stack([c(x) for c in self.components()])

    @classmethod
    def constant(cls, u, v, w, z):
        return cls(*(Piecewise.constant(c) for c in (u, v, w, z)))

    @classmethod
    def riemann(cls, left, right, at=0.0):
        """Riemann data from two 4-tuples of side states."""
        return cls(*(Piecewise.step(l, r, at) for l, r in zip(left, right)))

    @classmethod
    def from_functions(cls, funcs, bounds):
        """Smooth data given as four vectorised callables on the whole line."""
        return cls(*(Piecewise((), (f,), b) for f, b in zip(funcs, bounds)))

    def validate(self, extent=40.0):
        for c in self.components():
            c.check(extent)


class Primitive:
    """Antiderivative ``P(x) = int_0^x f`` of one :class:`Piecewise`.

    Panels cover ``[edges[0], edges[-1]]``; outside that range the primitive
    is extended linearly when the outermost piece is constant and is
    undefined otherwise.
    """

    def __init__(self, f: Piecewise, quad: QuadratureSpec, extent: float = 40.0,
                 max_width: float = 0.25):
        self.source = f
        self.lipschitz = f.bound
        br = f.breaks
        lo = br[0] if br else 0.0
        hi = br[-1] if br else 0.0
        if not _is_const(f.pieces[0]):
            lo = min(lo, -extent)
        if not _is_const(f.pieces[-1]):
            hi = max(hi, extent)

        knots = sorted({lo, hi, *br})
        seg_edges, seg_coef = [], []
        for a, b in zip(knots[:-1], knots[1:]):
            i = int(np.searchsorted(br, 0.5 * (a + b), side="right"))
            e, cf = self._fit_segment(f, i, a, b, quad, max_width)
            seg_edges.append(e[:-1])
            seg_coef.append(cf)
        if seg_edges:
            self.edges = np.concatenate(seg_edges + [np.array([knots[-1]])])
            self.coef = np.concatenate(seg_coef, axis=0)
        else:
            self.edges = np.array([knots[0]])
            self.coef = np.zeros((0, 2))

        # cumulative values at panel edges; antiderivatives vanish at s = -1
        half = 0.5 * np.diff(self.edges)
        panel_int = half * C.chebval(1.0, self.coef.T, tensor=False) if len(half) else half
        self.cum = np.concatenate([[0.0], np.cumsum(panel_int)])
        self._left_slope = f.pieces[0] if _is_const(f.pieces[0]) else None
        self._right_slope = f.pieces[-1] if _is_const(f.pieces[-1]) else None
        self.cum = self.cum - self._raw(np.array([0.0]))[0]

    @staticmethod
    def _fit_segment(f, i, a, b, quad, max_width):
        piece = f.pieces[i]
        if _is_const(piece):
            # d/ds of the antiderivative is piece; integral coefficients exact
            coef = C.chebint([piece], lbnd=-1)
            return np.array([a, b]), np.pad(coef, (0, _CHEB_DEG + 2 - len(coef)))[None]
        n = max(1, int(np.ceil((b - a) / max_width)))
        pending = list(zip(np.linspace(a, b, n + 1)[:-1], np.linspace(a, b, n + 1)[1:]))
        accepted = []
        scale = max(f.bound, 1e-300)
        while pending:
            if len(accepted) + len(pending) > quad.max_panels:
                raise QuadratureError("primitive cache exceeded max_panels")
            lo = np.array([p[0] for p in pending])
            hi = np.array([p[1] for p in pending])
            mid, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
            vals = np.asarray(piece(mid[:, None] + hw[:, None] * _CHEB_PTS), float)
            if not np.all(np.isfinite(vals)):
                raise ValueError("non-finite sample of initial data")
            coefs = np.array([C.chebfit(_CHEB_PTS, v, _CHEB_DEG) for v in vals])
            probe = np.asarray(piece(mid[:, None] + hw[:, None] * _PROBE), float)
            approx = np.array([C.chebval(_PROBE, c) for c in coefs])
            err = np.max(np.abs(probe - approx), axis=1)
            nxt = []
            for k in range(len(pending)):
                if err[k] <= quad.rel_tol * scale:
                    integ = C.chebint(coefs[k], lbnd=-1)
                    accepted.append((lo[k], hi[k], integ))
                elif hw[k] < 1e-10:
                    raise QuadratureError(
                        f"initial data not resolvable near x={mid[k]:.6g}"
                    )
                else:
                    nxt += [(lo[k], mid[k]), (mid[k], hi[k])]
            pending = nxt
        accepted.sort(key=lambda r: r[0])
        edges = np.array([r[0] for r in accepted] + [accepted[-1][1]])
        coef = np.array([np.pad(r[2], (0, _CHEB_DEG + 2 - len(r[2]))) for r in accepted])
        return edges, coef

    def _raw(self, y):
        e = self.edges
        out = np.empty(y.shape)
        left = y < e[0]
        right = y > e[-1]
        mid = ~(left | right)
        if left.any():
            if self._left_slope is None:
                raise ValueError("primitive queried left of its cached range")
            out[left] = self.cum[0] + self._left_slope * (y[left] - e[0])
        if right.any():
            if self._right_slope is None:
                raise ValueError("primitive queried right of its cached range")
            out[right] = self.cum[-1] + self._right_slope * (y[right] - e[-1])
        if mid.any() and len(e) > 1:
            ym = y[mid]
            k = np.clip(np.searchsorted(e, ym, side="right") - 1, 0, len(e) - 2)
            lo, hi = e[k], e[k + 1]
            s = (2 * ym - lo - hi) / (hi - lo)
            out[mid] = self.cum[k] + 0.5 * (hi - lo) * C.chebval(s, self.coef[k].T, tensor=False)
        elif mid.any():
            out[mid] = 0.0
        return out

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        flat = y.ravel()
        return self._raw(flat).reshape(y.shape)


@dataclass(frozen=True)
class Primitives:
    """Antiderivatives ``U0, V0, W0, Z0`` of the initial data, zero at 0."""

    U0: Primitive
    V0: Primitive
    W0: Primitive
    Z0: Primitive
    data: PiecewiseInitialData

    def all(self):
        return (self.U0, self.V0, self.W0, self.Z0)


def build_primitives(data: PiecewiseInitialData, quad: QuadratureSpec | None = None,
                     extent: float = 40.0) -> Primitives:
    """Cache the four primitives of ``data``.

    Raises
    ------
    ValueError
        On a non-finite sample or a violated sup-norm bound.
    """
    quad = quad or QuadratureSpec()
    data.validate(extent)
    prims = [Primitive(c, quad, extent) for c in data.components()]
    return Primitives(*prims, data=data)
