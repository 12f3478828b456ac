"""Explicit finite-difference solver for the viscous system.

The system is triangular: ``u`` solves viscous Burgers, ``v`` is advected
by ``u``, ``w`` by ``u`` with source flux ``v**2/2`` and ``z`` by ``u``
with source flux ``v*w``. Components are advanced in that order and each
one uses the already-updated upstream components. Convective fluxes are
central with local Lax-Friedrichs (Rusanov) dissipation; diffusion is the
standard three-point second difference scaled by ``gamma/2``.

The Rusanov term is reduced by the physical viscosity already present:
each face carries ``max(alpha - gamma/h, 0)/2`` times the jump, so the
total face diffusion is ``max(gamma/2, alpha h/2)``. That is the least
diffusion keeping the update monotone; the scheme is second order where
the viscous layers are resolved and plain Rusanov where they are not.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .initial_data import PiecewiseInitialData

VEL_FLOOR = 1e-12


class CFLError(ValueError):
    """Time step violates the explicit stability bound."""


@dataclass(frozen=True)
class FDGrid:
    x_min: float
    x_max: float
    n_cells: int
    safety: float = 0.45

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be < x_max")
        if self.n_cells < 16:
            raise ValueError("n_cells must be >= 16")
        if not 0 < self.safety < 1:
            raise ValueError("safety must lie in (0, 1)")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells + 1)

    @classmethod
    def with_spacing(cls, half_width: float, h: float, safety: float = 0.45) -> "FDGrid":
        n = int(round(2 * half_width / h))
        return cls(-half_width, half_width, n, safety)


@dataclass(frozen=True)
class FDState:
    grid: FDGrid
    time: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        n = self.grid.n_cells + 1
        for name in ("u", "v", "w", "z"):
            a = getattr(self, name)
            if a.shape != (n,):
                raise ValueError(f"{name} has shape {a.shape}, expected ({n},)")

    def components(self):
        return (self.u, self.v, self.w, self.z)

    def masses(self):
        """Discrete integrals sum(q) * h."""
        h = self.grid.h
        return np.array([q.sum() * h for q in self.components()])


def init_state(data: PiecewiseInitialData, grid: FDGrid) -> FDState:
    """Sample the data at the grid nodes; endpoint values become far-field states."""
    vals = data(grid.x)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite initial data")
    return FDState(grid, 0.0, *(np.array(v) for v in vals))


def _as_viscosities(gamma):
    g = np.broadcast_to(np.asarray(gamma, dtype=float), (4,))
    if np.any(g < 0):
        raise ValueError("viscosities must be non-negative")
    return g


def stable_dt(state: FDState, gamma) -> float:
    """Largest step allowed by the safety-scaled stability bound."""
    g = _as_viscosities(gamma).max()
    h = state.grid.h
    alpha = np.max(np.abs(state.u)) + VEL_FLOOR
    return state.grid.safety / (g / h**2 + alpha / h)


def _check_dt(state, gamma, dt):
    g = _as_viscosities(gamma).max()
    h = state.grid.h
    alpha = np.max(np.abs(state.u)) + VEL_FLOOR
    # combined bound; implies dt <= safety * min(h^2/g, h/alpha)
    if not 0 < dt <= state.grid.safety / (g / h**2 + alpha / h) * (1 + 1e-12):
        raise CFLError(f"dt={dt:g} exceeds the stability bound for h={h:g}")


def _update(q, flux, speed, g, dt, h):
    """Conservative update of one component; returns (new q, edge fluxes)."""
    alpha = np.maximum(np.abs(speed[:-1]), np.abs(speed[1:]))
    alpha = np.maximum(alpha - g / h, 0.0)
    F = 0.5 * (flux[:-1] + flux[1:]) - 0.5 * alpha * np.diff(q)
    F = F - 0.5 * g * np.diff(q) / h
    new = q.copy()
    new[1:-1] = q[1:-1] - dt / h * np.diff(F)
    return new, F[0], F[-1]


def _advance_arrays(q, g, dt, h):
    u, v, w, z = q
    un, fl_u, fr_u = _update(u, 0.5 * u * u, u, g[0], dt, h)
    vn, fl_v, fr_v = _update(v, un * v, un, g[1], dt, h)
    wn, fl_w, fr_w = _update(w, 0.5 * vn * vn + un * w, un, g[2], dt, h)
    zn, fl_z, fr_z = _update(z, vn * wn + un * z, un, g[3], dt, h)
    boundary = dt * np.array([fl_u - fr_u, fl_v - fr_v, fl_w - fr_w, fl_z - fr_z])
    return (un, vn, wn, zn), boundary


def _advance(state: FDState, gamma, dt):
    q, boundary = _advance_arrays(state.components(), _as_viscosities(gamma), dt, state.grid.h)
    return replace(state, time=state.time + dt, u=q[0], v=q[1], w=q[2], z=q[3]), boundary


def step(state: FDState, gamma, dt: float) -> FDState:
    """One explicit step of size ``dt``.

    ``gamma`` may be a scalar or one viscosity per component; the diffusion
    term of component ``k`` is ``gamma[k]/2 * q_xx``.
    """
    _check_dt(state, gamma, dt)
    return _advance(state, gamma, dt)[0]


@dataclass
class FDRun:
    """Result of :func:`run`."""

    state: FDState
    snapshots: list = field(default_factory=list)
    conservation_defect: np.ndarray = None
    n_steps: int = 0


def run(data: PiecewiseInitialData, gamma, T: float, grid: FDGrid, snapshot_times=(),
        callback=None, dt=None) -> FDRun:
    """Advance from the sampled data to time ``T``.

    The step is chosen from the stability bound unless ``dt`` is given, in
    which case every step is checked against the bound first.

    The conservation defect per component is the change of the discrete
    mass minus the time-integrated boundary fluxes; it measures round-off.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    state = init_state(data, grid)
    pending = sorted(t for t in snapshot_times if 0 <= t <= T)
    snaps = []
    while pending and pending[0] == 0:
        snaps.append(state)
        pending.pop(0)
    mass0 = state.masses()
    flux_in = np.zeros(4)
    g = _as_viscosities(gamma)
    h = grid.h
    q = state.components()
    time = 0.0
    n = 0
    while time < T:
        alpha = np.max(np.abs(q[0])) + VEL_FLOOR
        bound = grid.safety / (g.max() / h**2 + alpha / h)
        if dt is None:
            step_dt = bound
        elif dt <= bound * (1 + 1e-12):
            step_dt = dt
        else:
            raise CFLError(f"dt={dt:g} exceeds the stability bound {bound:g} for h={h:g}")
        target = min(T, pending[0]) if pending else T
        last = time + step_dt >= target
        if last:
            step_dt = target - time
        q, bflux = _advance_arrays(q, g, step_dt, h)
        flux_in += bflux
        time = target if last else time + step_dt
        n += 1
        if last and pending and target == pending[0]:
            snaps.append(FDState(grid, time, *q))
            pending.pop(0)
        if callback is not None:
            callback(time, q)
        if not np.all(np.isfinite(q[0])):
            raise FloatingPointError("finite-difference solution blew up")
    state = FDState(grid, time, *q)
    # edge cells are frozen: drop their mass from the balance
    edge0 = np.array([q[[0, -1]].sum() * h for q in init_state(data, grid).components()])
    edge1 = np.array([q[[0, -1]].sum() * h for q in state.components()])
    defect = (state.masses() - edge1) - (mass0 - edge0) - flux_in
    return FDRun(state, snaps, defect, n)


SNAPSHOT_HEADER = ("t", "x", "u", "v", "w", "z")  # io.SCHEMAS["snapshots"]


def write_snapshots(path, states) -> None:
    """CSV rows ``(t, x, u, v, w, z)`` for every node of every state."""
    from .io import fmt

    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(SNAPSHOT_HEADER)
        for s in states:
            for i, x in enumerate(s.grid.x):
                out.writerow([fmt(s.time), fmt(x), *(fmt(q[i]) for q in s.components())])
