"""Closed-form distributional solutions for rarefaction Riemann data.

When ``u_l < u_r`` the first component opens a fan between the lines
``x = u_l t`` and ``x = u_r t``. The components ``w`` and ``z`` then carry
Dirac masses on both lines, and ``z`` also carries dipoles. ``delta'``
always means the x-derivative of ``delta``, so an amplitude ``h`` on a
dipole pairs as ``<h delta', phi> = -h * phi_x``.

Three constructions live here:

* :func:`vanishing_viscosity_limit` for equal side states of ``v, w, z``;
* :func:`shadow_wave`, an epsilon-family of piecewise-constant states and
  its distributional limit;
* :func:`volpert_solution`, a one-parameter family with a free constant
  ``c`` in the dipole strength.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .hopf_cole import FieldSample
from .initial_data import COMPONENTS, PiecewiseInitialData


class UnsupportedRiemannError(ValueError):
    """Shock and contact configurations are not constructed here."""


class WaveType(enum.Enum):
    RAREFACTION = "rarefaction"
    CONTACT = "contact"
    SHOCK = "shock"


@dataclass(frozen=True)
class RiemannData:
    u_l: float
    v_l: float
    w_l: float
    z_l: float
    u_r: float
    v_r: float
    w_r: float
    z_r: float

    def __post_init__(self):
        if not all(np.isfinite(self.left + self.right)):
            raise ValueError("Riemann states must be finite")

    @classmethod
    def from_states(cls, left, right):
        return cls(*left, *right)

    @property
    def left(self):
        return (self.u_l, self.v_l, self.w_l, self.z_l)

    @property
    def right(self):
        return (self.u_r, self.v_r, self.w_r, self.z_r)

    @property
    def equal_sides(self) -> bool:
        return self.left[1:] == self.right[1:]

    def initial_data(self) -> PiecewiseInitialData:
        return PiecewiseInitialData.riemann(self.left, self.right)

    def reflected(self) -> "RiemannData":
        """Image under ``x -> -x``, ``u -> -u``: sides swap and ``u`` flips."""
        return RiemannData(-self.u_r, self.v_r, self.w_r, self.z_r,
                           -self.u_l, self.v_l, self.w_l, self.z_l)


def classify(rd: RiemannData) -> WaveType:
    if rd.u_l < rd.u_r:
        return WaveType.RAREFACTION
    if rd.u_l == rd.u_r:
        return WaveType.CONTACT
    return WaveType.SHOCK


def _require_rarefaction(rd):
    kind = classify(rd)
    if kind is not WaveType.RAREFACTION:
        raise UnsupportedRiemannError(
            f"{kind.value} Riemann data is not constructed here (rarefaction only)"
        )


@dataclass(frozen=True)
class Amplitude:
    """Sum of power terms ``sum(coef * t**power)``; exact and differentiable."""

    terms: tuple = ()

    @classmethod
    def of(cls, *pairs):
        acc = {}
        for c, p in pairs:
            acc[float(p)] = acc.get(float(p), 0.0) + float(c)
        return cls(tuple((c, p) for p, c in sorted(acc.items()) if c != 0.0))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for c, p in self.terms:
            out = out + c * t**p
        return out if out.ndim else float(out)

    def derivative(self) -> "Amplitude":
        return Amplitude.of(*((c * p, p - 1) for c, p in self.terms if p != 0))

    def __neg__(self):
        return Amplitude.of(*((-c, p) for c, p in self.terms))

    def __add__(self, other):
        return Amplitude.of(*self.terms, *other.terms)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: float):
        return Amplitude.of(*((k * c, p) for c, p in self.terms))

    __rmul__ = __mul__

    @property
    def is_zero(self):
        return not self.terms


ZERO = Amplitude()


@dataclass(frozen=True)
class SingularLine:
    """Line ``x = speed * t`` carrying delta and delta' amplitudes per component."""

    speed: float
    delta_amp: tuple = (ZERO, ZERO, ZERO, ZERO)
    delta_prime_amp: tuple = (ZERO, ZERO, ZERO, ZERO)
    name: str = ""

    def delta(self, comp) -> Amplitude:
        return self.delta_amp[_index(comp)]

    def delta_prime(self, comp) -> Amplitude:
        return self.delta_prime_amp[_index(comp)]


def _index(comp):
    return COMPONENTS.index(comp) if isinstance(comp, str) else int(comp)


@dataclass(frozen=True)
class Region:
    """Wedge ``lo_speed * t < x < hi_speed * t``.

    The background there is ``state + fan_weight * (x/t, 0, 0, 0)``.
    """

    lo_speed: float
    hi_speed: float
    state: tuple
    fan_weight: float = 0.0


@dataclass(frozen=True)
class DistributionalSolution:
    """Self-similar background of wedges plus singular lines."""

    regions: tuple
    lines: tuple
    label: str = ""

    def __post_init__(self):
        speeds = [ln.speed for ln in self.lines]
        if len(set(speeds)) != len(speeds):
            raise ValueError("singular lines must have distinct speeds")

    def background(self, x, t) -> FieldSample:
        """Background state off the singular lines (vectorised)."""
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        x, t = np.broadcast_arrays(x, t)
        out = np.full((4,) + x.shape, np.nan)
        xi = x / t
        for r in self.regions:
            sel = (xi >= r.lo_speed) & (xi <= r.hi_speed)
            for k in range(4):
                out[k][sel] = r.state[k]
            if r.fan_weight:
                out[0][sel] += r.fan_weight * xi[sel]
        return FieldSample(*out)

    def line(self, speed) -> SingularLine:
        for ln in self.lines:
            if ln.speed == speed:
                return ln
        raise KeyError(speed)

    def breaks(self, t):
        """Discontinuity locations of the background at time ``t``."""
        edges = {r.lo_speed for r in self.regions} | {r.hi_speed for r in self.regions}
        return sorted(s * t for s in edges if np.isfinite(s))

    def to_record(self, times: Sequence[float]) -> dict:
        """Structured record: region table plus amplitude samples per line."""
        regions = [
            {"lo_speed": _num(r.lo_speed), "hi_speed": _num(r.hi_speed),
             "state": list(r.state), "fan_weight": r.fan_weight}
            for r in self.regions
        ]
        lines = []
        for ln in self.lines:
            samples = []
            for t in times:
                samples.append({
                    "t": float(t),
                    "delta": {c: float(ln.delta(c)(t)) for c in COMPONENTS},
                    "delta_prime": {c: float(ln.delta_prime(c)(t)) for c in COMPONENTS},
                })
            lines.append({"name": ln.name, "speed": ln.speed, "samples": samples})
        return {"label": self.label, "regions": regions, "lines": lines}

    def dumps(self, times) -> str:
        return json.dumps(self.to_record(times), indent=2, allow_nan=False)

    def amplitude_rows(self, times):
        """Rows ``(line, speed, component, t, delta_amp, delta_prime_amp)``."""
        for ln in self.lines:
            for t in times:
                for c in COMPONENTS:
                    yield (ln.name, ln.speed, c, float(t),
                           float(ln.delta(c)(t)), float(ln.delta_prime(c)(t)))


def _num(s):
    return s if np.isfinite(s) else ("-inf" if s < 0 else "inf")


def combine(a: float, A: DistributionalSolution, b: float, B: DistributionalSolution) -> DistributionalSolution:
    """``a*A + b*B`` for solutions with the same wedges and line speeds."""
    if [(r.lo_speed, r.hi_speed) for r in A.regions] != [(r.lo_speed, r.hi_speed) for r in B.regions]:
        raise ValueError("solutions must share their wedge structure")
    if [ln.speed for ln in A.lines] != [ln.speed for ln in B.lines]:
        raise ValueError("solutions must share their singular lines")
    regions = tuple(
        Region(ra.lo_speed, ra.hi_speed,
               tuple(a * p + b * q for p, q in zip(ra.state, rb.state)),
               a * ra.fan_weight + b * rb.fan_weight)
        for ra, rb in zip(A.regions, B.regions)
    )
    lines = tuple(
        SingularLine(
            la.speed,
            tuple(p * a + q * b for p, q in zip(la.delta_amp, lb.delta_amp)),
            tuple(p * a + q * b for p, q in zip(la.delta_prime_amp, lb.delta_prime_amp)),
            la.name,
        )
        for la, lb in zip(A.lines, B.lines)
    )
    return DistributionalSolution(regions, lines, f"{a:g}*{A.label}+{b:g}*{B.label}")


def _rarefaction_regions(rd):
    return (
        Region(-np.inf, rd.u_l, rd.left),
        Region(rd.u_l, rd.u_r, (0.0, 0.0, 0.0, 0.0), 1.0),
        Region(rd.u_r, np.inf, rd.right),
    )


def background_uv(rd: RiemannData):
    """``(u, v)`` of the vanishing-viscosity limit as a function of ``(x, t)``."""
    _require_rarefaction(rd)

    def uv(x, t):
        x = np.asarray(x, dtype=float)
        u = np.where(x < rd.u_l * t, rd.u_l, np.where(x > rd.u_r * t, rd.u_r, x / t))
        v = np.where(x < rd.u_l * t, rd.v_l, np.where(x > rd.u_r * t, rd.v_r, 0.0))
        if u.ndim == 0:
            return float(u), float(v)
        return u, v

    return uv


def _lines(rd, w_l, z_l, zp_l, w_r, z_r, zp_r):
    left = SingularLine(rd.u_l, (ZERO, ZERO, w_l, z_l), (ZERO, ZERO, ZERO, zp_l), "left")
    right = SingularLine(rd.u_r, (ZERO, ZERO, w_r, z_r), (ZERO, ZERO, ZERO, zp_r), "right")
    return (left, right)


def vanishing_viscosity_limit(rd: RiemannData) -> DistributionalSolution:
    """Limit of the viscous solutions for equal side states of ``v, w, z``."""
    _require_rarefaction(rd)
    if not rd.equal_sides:
        raise ValueError("the vanishing-viscosity limit is known only for v, w, z equal on both sides")
    v, w = rd.v_l, rd.w_l
    lines = _lines(
        rd,
        Amplitude.of((v * v / 2, 1)), Amplitude.of((v * w, 1)), Amplitude.of((-v**3 / 6, 2)),
        Amplitude.of((-v * v / 2, 1)), Amplitude.of((-v * w, 1)), Amplitude.of((v**3 / 6, 2)),
    )
    return DistributionalSolution(_rarefaction_regions(rd), lines, "vanishing-viscosity")


def conjectured_limit(rd: RiemannData) -> DistributionalSolution:
    """Side-specific extension of :func:`vanishing_viscosity_limit` to unequal states.

    Not verified; provided as a documented alternative only. It reduces to
    the vanishing-viscosity limit when the side states agree.
    """
    _require_rarefaction(rd)
    lines = _lines(
        rd,
        Amplitude.of((rd.v_l**2 / 2, 1)), Amplitude.of((rd.v_l * rd.w_l, 1)),
        Amplitude.of((-rd.v_l**3 / 6, 2)),
        Amplitude.of((-rd.v_r**2 / 2, 1)), Amplitude.of((-rd.v_r * rd.w_r, 1)),
        Amplitude.of((rd.v_r**3 / 6, 2)),
    )
    return DistributionalSolution(_rarefaction_regions(rd), lines, "conjectured")


def volpert_average(left, right):
    """Volpert value of a jump: the arithmetic mean of the one-sided traces."""
    return 0.5 * (left + right)


def volpert_delta_product(v_left: float, v_right: float, amp: Amplitude) -> Amplitude:
    """Amplitude of ``v * (amp delta)`` for ``v`` jumping across the line."""
    return amp * volpert_average(v_left, v_right)


@dataclass(frozen=True)
class VolpertCoefficients:
    """Amplitude functions of the Volpert construction.

    ``e`` are the w-deltas, ``g`` the z-deltas and ``h`` the dipole
    strengths solving ``h' - h/(2t) = v**3 t / 4``; the left line carries
    ``-h_l`` on ``delta'`` and the right line ``+h_r``.
    """

    e_l: Amplitude
    e_r: Amplitude
    g_l: Amplitude
    g_r: Amplitude
    h_l: Amplitude
    h_r: Amplitude


def volpert_coefficients(rd: RiemannData, c: float = 0.0) -> VolpertCoefficients:
    v_l, w_l, v_r, w_r = rd.v_l, rd.w_l, rd.v_r, rd.w_r
    return VolpertCoefficients(
        e_l=Amplitude.of((v_l**2 / 2, 1)),
        e_r=Amplitude.of((-v_r**2 / 2, 1)),
        g_l=Amplitude.of((v_l * w_l, 1)),
        g_r=Amplitude.of((-v_r * w_r, 1)),
        h_l=Amplitude.of((v_l**3 / 6, 2), (c, 0.5)),
        h_r=Amplitude.of((v_r**3 / 6, 2), (c, 0.5)),
    )


def volpert_solution(rd: RiemannData, c: float = 0.0) -> DistributionalSolution:
    """Solution for ``w`` and ``z`` built with Volpert products.

    ``c`` is the free constant of the homogeneous dipole solution
    ``c * sqrt(t)``; ``c = 0`` reproduces the vanishing-viscosity limit
    when the side states agree.
    """
    _require_rarefaction(rd)
    k = volpert_coefficients(rd, c)
    lines = _lines(rd, k.e_l, k.g_l, -k.h_l, k.e_r, k.g_r, k.h_r)
    return DistributionalSolution(_rarefaction_regions(rd), lines, f"volpert(c={c:g})")


@dataclass(frozen=True)
class ShadowLine:
    """Geometry of one shadow-wave line for the entropy test.

    ``outer`` are the states outside the layers, ``layer(eps)`` the states
    inside them, ``widths(eps)`` the layer widths per unit time.
    """

    speed: float
    outer: tuple
    layer: Callable
    widths: Callable
    name: str


@dataclass(frozen=True)
class ShadowWaveFamily:
    """Piecewise-constant approximations with epsilon-scaled layers.

    States, left to right: the left state; the left layer
    ``(u_l, v1/sqrt(eps), w1/eps, z1/eps)`` on ``((u_l - eps) t, u_l t)``; the
    fan ``(x/t, 0, 0, 0)``; the right layer ``(u_r, v2/sqrt(eps), w2/eps,
    z2/eps)`` on ``(u_r t, (u_r + eps) t)``; the right state.
    """

    rd: RiemannData
    v1: float = 0.0
    v2: float = 0.0
    w1: float = 0.0
    w2: float = 0.0
    z1: float = 0.0
    z2: float = 0.0
    eps_range: tuple = (0.0, 1.0)

    def left_layer(self, eps):
        return (self.rd.u_l, self.v1 / np.sqrt(eps), self.w1 / eps, self.z1 / eps)

    def right_layer(self, eps):
        return (self.rd.u_r, self.v2 / np.sqrt(eps), self.w2 / eps, self.z2 / eps)

    def breaks(self, eps, t):
        rd = self.rd
        return [(rd.u_l - eps) * t, rd.u_l * t, rd.u_r * t, (rd.u_r + eps) * t]

    def __call__(self, eps, x, t) -> FieldSample:
        rd = self.rd
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        x, t = np.broadcast_arrays(x, t)
        b0, b1, b2, b3 = self.breaks(eps, t)
        zones = [x < b0, (x >= b0) & (x < b1), (x >= b1) & (x <= b2),
                 (x > b2) & (x <= b3), x > b3]
        with np.errstate(divide="ignore", invalid="ignore"):
            fan_u = x / t
        comps = []
        states = [rd.left, self.left_layer(eps), None, self.right_layer(eps), rd.right]
        for k in range(4):
            choices = [np.full(x.shape, s[k]) if s is not None else
                       (fan_u if k == 0 else np.zeros(x.shape)) for s in states]
            comps.append(np.select(zones, choices))
        return FieldSample(*comps)

    def shadow_lines(self):
        rd = self.rd
        fan_left = (rd.u_l, 0.0, 0.0, 0.0)
        fan_right = (rd.u_r, 0.0, 0.0, 0.0)
        left = ShadowLine(
            rd.u_l, (rd.left, fan_left),
            lambda eps: (self.left_layer(eps), fan_left),
            lambda eps: (eps, 0.0), "left",
        )
        right = ShadowLine(
            rd.u_r, (fan_right, rd.right),
            lambda eps: (fan_right, self.right_layer(eps)),
            lambda eps: (0.0, eps), "right",
        )
        return (left, right)


def shadow_wave(rd: RiemannData):
    """Shadow-wave family and its distributional limit.

    The layer constants follow from requiring the weak residual of every
    equation to vanish with ``eps``::

        v1 = v2 = 0,  w1 = v_l**2/2,  w2 = -v_r**2/2,  z1 = v_l w_l,  z2 = -v_r w_r
    """
    _require_rarefaction(rd)
    fam = ShadowWaveFamily(
        rd, v1=0.0, v2=0.0,
        w1=rd.v_l**2 / 2, w2=-rd.v_r**2 / 2,
        z1=rd.v_l * rd.w_l, z2=-rd.v_r * rd.w_r,
    )
    # layer of width eps*t carrying w1/eps gives mass w1*t
    lines = _lines(
        rd,
        Amplitude.of((fam.w1, 1)), Amplitude.of((fam.z1, 1)), ZERO,
        Amplitude.of((fam.w2, 1)), Amplitude.of((fam.z2, 1)), ZERO,
    )
    return fam, DistributionalSolution(_rarefaction_regions(rd), lines, "shadow-wave")
