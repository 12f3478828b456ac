"""Convex entropy pairs and the entropy test for shadow waves.

Entropies have the form ``eta = eta_bar(u) + c1 v + c2 w + c3 z`` with
flux ``q = Q(u) + c1 u v + c2 (v**2/2 + u w) + c3 (v w + u z)`` and
``Q' = u eta_bar'``. For a shadow wave the entropy inequality reduces to
two scalar sequences per line, ``term1(eps)`` and ``term2(eps)``; the
wave is admissible when ``limsup term1 <= 0`` and ``term2 -> 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .hopf_cole import FieldSample
from .quadrature import integrate
from .riemann import ShadowWaveFamily

PROLONGED_SCALE = np.array([2.0, 1.0, 4.0, 24.0])


def to_prolonged(sample) -> FieldSample:
    """Linear map ``(u, v, w, z) -> (2u, v, 4w, 24z)``."""
    return FieldSample(*(s * np.asarray(q, dtype=float) for s, q in zip(PROLONGED_SCALE, sample)))


def from_prolonged(sample) -> FieldSample:
    return FieldSample(*(np.asarray(q, dtype=float) / s for s, q in zip(PROLONGED_SCALE, sample)))


class ConvexityError(ValueError):
    """``eta_bar`` has a negative sampled second difference."""


@dataclass(frozen=True)
class EntropyPair:
    eta_bar: Callable
    d_eta_bar: Callable
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    _Q: Callable = field(default=None, repr=False, compare=False)

    def Q(self, u):
        u = np.asarray(u, dtype=float)
        out = np.array([self._Q(float(x)) for x in u.ravel()]).reshape(u.shape)
        return out if out.ndim else float(out)

    def eta(self, U):
        u, v, w, z = U
        return self.eta_bar(u) + self.c1 * v + self.c2 * w + self.c3 * z

    def q(self, U):
        u, v, w, z = U
        return (self.Q(u) + self.c1 * u * v + self.c2 * (0.5 * v * v + u * w)
                + self.c3 * (v * w + u * z))

    @property
    def u_only(self) -> bool:
        return self.c1 == self.c2 == self.c3 == 0.0


def _central_derivative(f):
    def df(u):
        u = np.asarray(u, dtype=float)
        h = 1e-5 * np.maximum(1.0, np.abs(u))
        return (f(u + h) - f(u - h)) / (2 * h)

    return df


def make_entropy_pair(eta_bar, c1=0.0, c2=0.0, c3=0.0, d_eta_bar: Optional[Callable] = None,
                      u_range=(-10.0, 10.0), rel_tol=1e-12) -> EntropyPair:
    """Entropy pair from a convex ``eta_bar`` (checked on ``u_range``).

    ``Q(u) = int_0^u s eta_bar'(s) ds`` is integrated adaptively and
    memoised per argument.
    """
    d_eta_bar = d_eta_bar or _central_derivative(eta_bar)
    s = np.linspace(*u_range, 401)
    h = s[1] - s[0]
    second = (eta_bar(s[2:]) - 2 * eta_bar(s[1:-1]) + eta_bar(s[:-2])) / h**2
    if np.min(second) < -1e-9:
        raise ConvexityError(f"eta_bar is not convex near u={s[1 + np.argmin(second)]:g}")

    @lru_cache(maxsize=4096)
    def Q(u: float) -> float:
        if u == 0.0:
            return 0.0
        return float(integrate(lambda y: y * d_eta_bar(y), 0.0, u, rel_tol=rel_tol))

    return EntropyPair(eta_bar, d_eta_bar, float(c1), float(c2), float(c3), Q)


def quadratic_entropy(c1=0.0, c2=0.0, c3=0.0) -> EntropyPair:
    """``eta_bar = u**2/2``, the default for admissibility runs."""
    return make_entropy_pair(lambda u: 0.5 * np.asarray(u) ** 2, c1, c2, c3,
                             d_eta_bar=lambda u: np.asarray(u, dtype=float))


@dataclass(frozen=True)
class LineEntropy:
    """Entropy sequences across one shadow line."""

    name: str
    speed: float
    eps: tuple
    term1: tuple
    term2: tuple
    term1_limit: float
    term2_limit: float
    term2_fit_residual: float
    verdict: str


@dataclass(frozen=True)
class AdmissibilityReport:
    lines: tuple
    tol: float
    header: str = ("term sums use eta(U1eps) + eta(U2eps), one term per layer state "
                   "(the doubled eta(u1eps) in the printed condition is read as a typo)")

    @property
    def admissible(self) -> bool:
        return all(ln.verdict == "admissible" for ln in self.lines)

    def rows(self):
        for ln in self.lines:
            for e, a, b in zip(ln.eps, ln.term1, ln.term2):
                yield (ln.speed, e, a, b, ln.verdict)


def _linear_fit(eps, vals):
    """Intercept and max residual of ``vals = alpha + beta * eps``."""
    e, v = np.asarray(eps, dtype=float), np.asarray(vals, dtype=float)
    A = np.vstack([np.ones_like(e), e]).T
    coef = np.linalg.lstsq(A, v, rcond=None)[0]
    resid = np.max(np.abs(A @ coef - v)) if len(e) > 2 else 0.0
    return float(coef[0]), float(resid)


def admissibility_report(fam: ShadowWaveFamily, pair: EntropyPair, eps_list,
                         tol: float = 1e-8) -> AdmissibilityReport:
    """Evaluate ``term1`` and ``term2`` along ``eps_list`` for each line.

    The limits are the intercepts of straight-line fits in ``eps``. With
    all ``c_i = 0`` the verdict is ``admissible`` or ``inadmissible``; for
    nonzero ``c_i`` a failing limit is reported as ``unresolved``, since
    the scaled layer states make ``eps * eta`` of order one there.
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2 or any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must hold at least two strictly decreasing values")
    out = []
    for ln in fam.shadow_lines():
        c = ln.speed
        U1, U2 = ln.outer
        t1, t2 = [], []
        for eps in eps_list:
            L1, L2 = ln.layer(eps)
            s_eta = pair.eta(L1) + pair.eta(L2)
            s_q = pair.q(L1) + pair.q(L2)
            t1.append(-c * (pair.eta(U2) - pair.eta(U1)) + eps * s_eta + pair.q(U2) - pair.q(U1))
            t2.append(-c * eps * s_eta + eps * s_q)
        a1, _ = _linear_fit(eps_list, t1)
        a2, r2 = _linear_fit(eps_list, t2)
        ok = a1 <= tol and abs(a2) <= tol
        verdict = "admissible" if ok else ("inadmissible" if pair.u_only else "unresolved")
        out.append(LineEntropy(ln.name, c, tuple(eps_list), tuple(map(float, t1)),
                               tuple(map(float, t2)), a1, a2, r2, verdict))
    return AdmissibilityReport(tuple(out), tol)
