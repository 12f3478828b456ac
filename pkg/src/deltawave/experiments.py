"""Experiment drivers: mollification, macroscopic runs, growth probes, configs.

Every experiment is described by an :class:`ExperimentConfig`, which
round-trips through an INI file, and executed by :func:`run_experiment`,
which writes CSV artifacts and returns an exit status. Failure modes map
to distinct statuses (see ``EXIT_CODES``).
"""

from __future__ import annotations

import configparser
import dataclasses
import enum
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson, trapezoid
from scipy.interpolate import CubicHermiteSpline

from . import io
from .distcalc import (EpsilonFamily, ResolutionError, TestFunction, bump, measure_moments,
                       richardson, viscous_family, weak_residual_family)
from .fd_solver import CFLError, FDGrid, run as fd_run, write_snapshots
from .hopf_cole import ViscousParams, eval_fields_many, sample_grid
from .initial_data import COMPONENTS, Piecewise, PiecewiseInitialData, build_primitives
from .quadrature import QuadratureError, QuadratureSpec, gl_nodes
from .riemann import (RiemannData, UnsupportedRiemannError, conjectured_limit, shadow_wave,
                      vanishing_viscosity_limit, volpert_solution)

# ---------------------------------------------------------------- mollifier


def _bump_cdf():
    """Cumulative distribution of the unit-mass bump on [-1, 1] as a spline."""
    s = np.linspace(-1.0, 1.0, 2001)
    y, w = gl_nodes(s[:-1], s[1:])
    with np.errstate(divide="ignore"):
        dens = np.where(np.abs(y) < 1, np.exp(-1.0 / (1.0 - y * y)), 0.0)
    cum = np.concatenate([[0.0], np.cumsum((dens * w).sum(axis=1))])
    mass = cum[-1]
    with np.errstate(divide="ignore"):
        rho = np.where(np.abs(s) < 1, np.exp(-1.0 / (1.0 - s * s)), 0.0) / mass
    return CubicHermiteSpline(s, cum / mass, rho), mass


_CDF, _BUMP_MASS = _bump_cdf()


def _unit_bump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2)) / _BUMP_MASS
    return out


def bump_cdf(s):
    """``int_{-1}^{s}`` of the unit-mass bump."""
    return _CDF(np.clip(s, -1.0, 1.0))


@dataclass(frozen=True)
class MollifierSpec:
    """Friedrichs mollifier ``N * exp(-1/(1 - (x/r)**2))`` of radius ``r``."""

    radius: float
    n_panels: int = 16  # GL panels per piece for callable pieces

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("mollifier radius must be positive")

    @property
    def normalization(self) -> float:
        return 1.0 / (self.radius * _BUMP_MASS)

    def __call__(self, x):
        return _unit_bump(np.asarray(x) / self.radius) / self.radius


def _mollify_piecewise(f: Piecewise, spec: MollifierSpec) -> Piecewise:
    if not f.breaks and not callable(f.pieces[0]):
        return f
    r = spec.radius
    outer_const = not callable(f.pieces[0]) and not callable(f.pieces[-1])
    xi, wi = gl_nodes(np.linspace(-1, 1, spec.n_panels + 1)[:-1], np.linspace(-1, 1, spec.n_panels + 1)[1:])
    xi, wi = xi.ravel(), wi.ravel()

    def smoothed(x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.zeros(flat.shape)
        for i, piece in enumerate(f.pieces):
            lo, hi = f.interval(i)
            # A(x - r s) lies in piece i for s in [(x - hi)/r, (x - lo)/r]
            s_lo = np.clip((flat - hi) / r, -1.0, 1.0)
            s_hi = np.clip((flat - lo) / r, -1.0, 1.0)
            if not callable(piece):
                out += piece * (bump_cdf(s_hi) - bump_cdf(s_lo))
                continue
            live = s_hi > s_lo
            if not live.any():
                continue
            mid = 0.5 * (s_hi[live] + s_lo[live])[:, None]
            half = 0.5 * (s_hi[live] - s_lo[live])[:, None]
            s = mid + half * xi
            vals = np.asarray(piece(flat[live][:, None] - r * s), dtype=float)
            out[live] += (vals * _unit_bump(s) * wi).sum(axis=1) * half[:, 0]
        return out.reshape(x.shape)

    if outer_const:
        breaks = (f.breaks[0] - r, f.breaks[-1] + r)
        return Piecewise(breaks, (f.pieces[0], smoothed, f.pieces[-1]), f.bound)
    return Piecewise((), (smoothed,), f.bound)


def mollify(data: PiecewiseInitialData, spec) -> PiecewiseInitialData:
    """Convolve each component with the mollifier.

    ``spec`` may be a single :class:`MollifierSpec` or one per component.
    """
    specs = spec if isinstance(spec, (tuple, list)) else (spec,) * 4
    return PiecewiseInitialData(*(_mollify_piecewise(c, s) for c, s in zip(data.components(), specs)))


# ------------------------------------------------------------ data presets


def smooth_data() -> PiecewiseInitialData:
    """Bounded smooth profiles used for solver cross-checks."""
    return PiecewiseInitialData.from_functions(
        (lambda x: -0.5 * np.tanh(x), lambda x: np.exp(-x * x),
         lambda x: 0.5 / np.cosh(x), lambda x: 0.25 * np.tanh(2 * x)),
        (0.5, 1.0, 0.5, 0.25),
    )


def read_data_file(path) -> PiecewiseInitialData:
    """Piecewise-linear data from a CSV with header ``x,u,v,w,z``.

    Values are held constant beyond the first and last sample.
    """
    header, rows = io.read_csv(path)
    if tuple(h.strip() for h in header) != ("x", "u", "v", "w", "z"):
        raise ValueError(f"{path}: header must be x,u,v,w,z")
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2 or not np.all(np.isfinite(arr)):
        raise ValueError(f"{path}: need at least two finite rows")
    x = arr[:, 0]
    if np.any(np.diff(x) <= 0):
        raise ValueError(f"{path}: x must be strictly increasing")
    comps = []
    for k in range(1, 5):
        q = arr[:, k]
        pieces = [q[0]]
        for i in range(len(x) - 1):
            slope = (q[i + 1] - q[i]) / (x[i + 1] - x[i])
            pieces.append(lambda y, a=q[i], x0=x[i], m=slope: a + m * (y - x0))
        pieces.append(q[-1])
        comps.append(Piecewise(x, pieces, float(np.max(np.abs(q)))))
    return PiecewiseInitialData(*comps)


# ---------------------------------------------------- macroscopic solutions


def beta_schedule(eps, K: float = 1.0) -> float:
    """``beta(eps) = (K / log(1/sqrt(eps)))**2``."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return (K / math.log(1.0 / math.sqrt(eps))) ** 2


@dataclass(frozen=True)
class MacroscopicRow:
    epsilon: float
    beta: float
    sup_z: float
    sup_zx: float
    sup_z_sqrt_eps: float
    sup_zx_eps: float
    residual_z: float

    def row(self):
        return dataclasses.astuple(self)


def macroscopic_viscosities(eps, K=1.0):
    """FD viscosities for ``q_t + f_x = (g/2) q_xx``: beta/2 on u, v, w and eps on z."""
    b = beta_schedule(eps, K)
    return np.array([b, b, b, 2.0 * eps])


def _macroscopic_one(data, eps, K, T, h, safety, phi, n_phi_times):
    beta = beta_schedule(eps, K)
    md = mollify(data, (MollifierSpec(beta),) * 3 + (MollifierSpec(eps),))
    g = macroscopic_viscosities(eps, K)
    reach = max(data.bounds[0], 1e-12) * T + 6.0 * math.sqrt(g.max() * T)
    span = max([abs(b) for b in data.breaks] + [0.0]) + beta
    half = reach + span + 1.0
    if phi is not None:
        half = max(half, abs(phi.x0) + phi.rx + reach)
    grid = FDGrid.with_spacing(half, h, safety)
    sup = np.zeros(2)

    def track(t, q):
        z = q[3]
        sup[0] = max(sup[0], np.max(np.abs(z)))
        sup[1] = max(sup[1], np.max(np.abs(np.diff(z))) / grid.h)

    times = []
    if phi is not None:
        (_, _), (t_lo, t_hi) = phi.support
        if t_hi > T:
            raise ValueError("test function extends beyond T")
        times = list(np.linspace(t_lo, t_hi, n_phi_times))
    z0 = md.z(grid.x)
    sup[0] = np.max(np.abs(z0))
    sup[1] = np.max(np.abs(np.diff(z0))) / grid.h
    res = fd_run(md, g, T, grid, snapshot_times=times, callback=track)
    residual = float("nan")
    if phi is not None:
        x = grid.x
        per_t = []
        for s in res.snapshots:
            u, v, w, z = s.components()
            integrand = z * phi.dt(x, s.time) + (v * w + u * z) * phi.dx(x, s.time)
            per_t.append(trapezoid(integrand, x))
        residual = -float(simpson(per_t, x=times))
    return MacroscopicRow(eps, beta, sup[0], sup[1], sup[0] * math.sqrt(eps), sup[1] * eps, residual)


def macroscopic_run(data, K: float = 1.0, eps_list=(0.1, 0.05, 0.02), T: float = 1.0,
                    h: float = 5e-3, safety: float = 0.45, phi: TestFunction | None = None,
                    n_phi_times: int = 33, workers=None):
    """Bound probe for the two-viscosity system along ``eps_list``.

    ``u, v, w`` are mollified at ``beta(eps)`` and diffuse with
    ``beta/2``; ``z`` is mollified at ``eps`` and diffuses with ``eps``.
    Sup-norms of ``z`` and ``z_x`` are taken over every grid point and time
    step; ``residual_z`` is the weak residual of the inviscid z-equation
    against ``phi`` (``nan`` without a test function).
    """
    if isinstance(data, RiemannData):
        data = data.initial_data()
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValueError("eps_list is empty")

    def one(e):
        return _macroscopic_one(data, e, K, T, h, safety, phi, n_phi_times)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, eps_list))
    return [one(e) for e in eps_list]


# ---------------------------------------------------------- moderateness


@dataclass(frozen=True)
class ModeratenessResult:
    j: int
    eps: tuple
    sup_norms: tuple
    p: float
    fit_residual: float

    def rows(self):
        for e, s in zip(self.eps, self.sup_norms):
            yield (self.j, e, s, self.p, self.fit_residual)


def moderateness_probe(fam, j: int, eps_list, component="z", x_range=(-3.0, 3.0),
                       t_values=(0.25, 0.5, 1.0), nx: int = 241, spacing=None) -> ModeratenessResult:
    """Fit ``sup |d^j f| ~ C eps**(-p)`` over ``eps_list``.

    The sup is taken on an ``x``-grid at the given times. For ``j = 1``
    the derivative is a centred difference at ``spacing(eps)``, by default
    an eighth of the family's layer width.
    """
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2:
        raise ValueError("need at least two eps values")
    k = COMPONENTS.index(component)
    x = np.linspace(*x_range, nx)
    sups = []
    for eps in eps_list:
        best = 0.0
        for t in t_values:
            if j == 0:
                vals = np.asarray(fam(eps, x, t)[k])
            else:
                if spacing is not None:
                    d = spacing(eps)
                elif getattr(fam, "layer_width", None) is not None:
                    d = fam.layer_width(eps, t) / 8
                else:
                    d = eps / 8
                vals = (np.asarray(fam(eps, x + d, t)[k]) - np.asarray(fam(eps, x - d, t)[k])) / (2 * d)
            if not np.all(np.isfinite(vals)):
                raise FloatingPointError(f"non-finite samples at eps={eps:g}, t={t:g}")
            best = max(best, float(np.max(np.abs(vals))))
        sups.append(best)
    logs = np.log(np.maximum(sups, 1e-300))
    inv = np.log(1.0 / np.asarray(eps_list))
    slope, icpt = np.polyfit(inv, logs, 1)
    resid = float(np.max(np.abs(slope * inv + icpt - logs)))
    return ModeratenessResult(j, tuple(eps_list), tuple(sups), float(slope), resid)


def scaled_bump_family(power: float = 1.0) -> EpsilonFamily:
    """``eps**(-power) * bump(x)`` in every component; a calibration family."""
    def func(eps, x, t):
        x = np.asarray(x, dtype=float)
        b = np.exp(1.0) * _BUMP_MASS * _unit_bump(x) * eps ** (-power)
        return (b, b, b, b)

    return EpsilonFamily(func, breaks=lambda eps, t: [], label=f"eps^-{power:g} bump")


# ---------------------------------------------------------------- config


class Kind(str, enum.Enum):
    EXACT_EVAL = "exact-eval"
    FD_RUN = "fd-run"
    COMPARE = "compare"
    RIEMANN = "riemann"
    MEASURE = "measure"
    ENTROPY_CHECK = "entropy-check"
    MACROSCOPIC = "macroscopic"
    MODERATENESS = "moderateness"


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


EXIT_CODES = {"ok": 0, "other": 1, "config": 2, "quadrature": 3, "cfl": 4,
              "unsupported": 5, "resolution": 6}


def _floats(text):
    return tuple(float(s) for s in str(text).replace(",", " ").split())


def _fmt_list(vals):
    return " ".join(repr(float(v)) for v in vals)


@dataclass
class ExperimentConfig:
    """Description of one experiment; see :data:`Kind` for the kinds.

    ``data`` is ``riemann`` (use ``left``/``right``), ``smooth`` (built-in
    smooth profiles) or a path to a CSV with header ``x,u,v,w,z``.
    """

    kind: Kind
    output: str = "out.csv"
    data: str = "riemann"
    left: tuple = (-1.0, 2.0, 1.0, 0.0)
    right: tuple = (1.0, 2.0, 1.0, 0.0)
    gammas: tuple = (0.5,)
    eps: tuple = (0.1, 0.05, 0.02)
    times: tuple = (1.0,)
    T: float = 1.0
    c: float = 0.0
    K: float = 1.0
    solution: str = "volpert"
    family: str = "viscous"
    window: float = 0.9
    residuals: bool = False
    entropy: tuple = (0.0, 0.0, 0.0)
    j: int = 0
    component: str = "z"
    x_range: tuple = (-3.0, 3.0)
    t_range: tuple = (0.1, 1.0)
    nx: int = 61
    nt: int = 5
    h: tuple = (3e-3,)
    half_width: float = 6.0
    safety: float = 0.45
    dt: float = 0.0
    rel_tol: float = 1e-12
    max_panels: int = 20000
    window_safety: float = 1.5
    phi: tuple = ()
    workers: int = 1
    plot: bool = False

    def __post_init__(self):
        try:
            self.kind = Kind(self.kind)
        except ValueError:
            raise ConfigError(f"unknown experiment kind {self.kind!r}") from None

    _SECTIONS = {
        "experiment": ("kind", "output", "workers", "plot"),
        "data": ("data", "left", "right"),
        "parameters": ("gammas", "eps", "times", "T", "c", "K", "solution", "family", "window",
                       "residuals", "entropy", "j", "component", "phi"),
        "grid": ("x_range", "t_range", "nx", "nt", "h", "half_width", "safety", "dt"),
        "quadrature": ("rel_tol", "max_panels", "window_safety"),
    }

    def validate(self):
        if self.data not in ("riemann", "smooth") and not os.path.isfile(self.data):
            raise ConfigError(f"data file {self.data!r} does not exist")
        for name in ("gammas", "eps", "times", "h"):
            vals = getattr(self, name)
            if not vals:
                raise ConfigError(f"{name} list is empty")
            if any(not v > 0 for v in vals):
                raise ConfigError(f"{name} must be positive")
        if len(self.left) != 4 or len(self.right) != 4:
            raise ConfigError("left and right need four values")
        if len(self.entropy) != 3:
            raise ConfigError("entropy needs three constants c1 c2 c3")
        if self.phi and len(self.phi) != 4:
            raise ConfigError("phi needs x0 t0 rx rt")
        if self.component not in COMPONENTS:
            raise ConfigError(f"unknown component {self.component!r}")
        if self.kind is Kind.MACROSCOPIC and any(not e < 1 for e in self.eps):
            raise ConfigError("macroscopic eps must lie in (0, 1)")
        if not (0 < self.rel_tol < 1 and self.max_panels >= 4 and self.window_safety >= 1):
            raise ConfigError("invalid quadrature settings")
        if not 0 < self.safety < 1:
            raise ConfigError("safety must lie in (0, 1)")
        if self.dt < 0:
            raise ConfigError("dt must be non-negative (0 selects it automatically)")
        return self

    @property
    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(self.rel_tol, self.max_panels, self.window_safety)

    @property
    def riemann_data(self) -> RiemannData:
        return RiemannData.from_states(self.left, self.right)

    def initial_data(self) -> PiecewiseInitialData:
        if self.data == "riemann":
            return self.riemann_data.initial_data()
        if self.data == "smooth":
            return smooth_data()
        return read_data_file(self.data)

    def dumps(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        for sec, names in self._SECTIONS.items():
            cp[sec] = {}
            for n in names:
                v = getattr(self, n)
                if isinstance(v, Kind):
                    s = v.value
                elif isinstance(v, bool):
                    s = "true" if v else "false"
                elif isinstance(v, tuple):
                    s = _fmt_list(v)
                elif isinstance(v, float):
                    s = repr(v)
                else:
                    s = str(v)
                cp[sec][n] = s
        from io import StringIO
        buf = StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        kwargs = {}
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        defaults = {f.name: f.default for f in dataclasses.fields(cls)}
        for sec in cp.sections():
            for n, s in cp[sec].items():
                if n not in types:
                    raise ConfigError(f"unknown key {n!r} in [{sec}]")
                kwargs[n] = _parse_value(n, s, defaults[n])
        if "kind" not in kwargs:
            raise ConfigError("missing experiment kind")
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.loads(fh.read())

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())


def _parse_value(name, text, default):
    try:
        if name == "kind":
            return text.strip()
        if isinstance(default, bool):
            low = text.strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(text)
            return low in ("true", "yes", "1")
        if isinstance(default, tuple):
            return _floats(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        return text.strip()
    except ValueError:
        raise ConfigError(f"bad value for {name}: {text!r}") from None


# ---------------------------------------------------------------- runner


def _write(cfg, schema, rows, path=None, x_col=None, y_cols=()):
    path = path or cfg.output
    io.write_csv(path, schema, rows)
    if cfg.plot and x_col:
        with open(os.path.splitext(path)[0] + ".gp", "w") as fh:
            fh.write(io.gnuplot_script(path, x_col, y_cols, schema))
    return [path]


def _phi(cfg, default):
    return bump(cfg.phi[:2], cfg.phi[2:]) if cfg.phi else default


def _exact_eval(cfg):
    prims = build_primitives(cfg.initial_data(), cfg.quad)
    params = ViscousParams(cfg.gammas[0], cfg.quad)
    x, t, f = sample_grid(prims, params, cfg.x_range, cfg.t_range, cfg.nx, cfg.nt, cfg.workers)
    rows = []
    for i, ti in enumerate(t):
        for k, xi in enumerate(x):
            rows.append((xi, ti, f.u[i, k], f.v[i, k], f.w[i, k], f.z[i, k]))
    return _write(cfg, "fields", rows, x_col="x", y_cols=("u", "v", "w", "z"))


def _fd_run(cfg):
    grid = FDGrid.with_spacing(cfg.half_width, cfg.h[0], cfg.safety)
    times = sorted(set(t for t in cfg.times if t <= cfg.T) | {cfg.T})
    res = fd_run(cfg.initial_data(), cfg.gammas[0], cfg.T, grid, snapshot_times=times,
                 dt=cfg.dt or None)
    write_snapshots(cfg.output, res.snapshots)
    return [cfg.output]


def compare_solvers(data, gamma, T, hs, half_width=6.0, safety=0.45, quad=None,
                    compare_half_width=None, max_points=801, workers=None):
    """Sup-norm gap between the FD solver and the exact formula at ``T``.

    The gap is taken on FD nodes with ``|x| <= compare_half_width``
    (default: two thirds of the domain), thinned to at most ``max_points``.
    """
    quad = quad or QuadratureSpec()
    prims = build_primitives(data, quad)
    params = ViscousParams(gamma, quad)
    ch = compare_half_width if compare_half_width is not None else 2 * half_width / 3
    rows = []
    for h in hs:
        grid = FDGrid.with_spacing(half_width, h, safety)
        st = fd_run(data, gamma, T, grid).state
        sel = np.flatnonzero(np.abs(grid.x) <= ch)
        sel = sel[:: max(1, len(sel) // max_points)]
        exact = eval_fields_many(prims, params, grid.x[sel], T, workers)
        for k, c in enumerate(COMPONENTS):
            err = np.max(np.abs(st.components()[k][sel] - exact[k]))
            rows.append((h, c, float(err)))
    return rows


def _compare(cfg):
    rows = compare_solvers(cfg.initial_data(), cfg.gammas[0], cfg.T, cfg.h, cfg.half_width,
                           cfg.safety, cfg.quad, workers=cfg.workers)
    return _write(cfg, "compare", rows)


def _solution(cfg):
    rd = cfg.riemann_data
    if cfg.solution == "volpert":
        return volpert_solution(rd, cfg.c)
    if cfg.solution == "vanishing":
        return vanishing_viscosity_limit(rd)
    if cfg.solution == "shadow":
        return shadow_wave(rd)[1]
    if cfg.solution == "conjectured":
        return conjectured_limit(rd)
    raise ConfigError(f"unknown solution {cfg.solution!r}")


def _riemann(cfg):
    sol = _solution(cfg)
    paths = _write(cfg, "amplitudes", list(sol.amplitude_rows(cfg.times)))
    rec = os.path.splitext(cfg.output)[0] + ".json"
    with open(rec, "w") as fh:
        fh.write(sol.dumps(cfg.times) + "\n")
    return paths + [rec]


def _measure(cfg):
    rd = cfg.riemann_data
    if cfg.family == "viscous":
        sol = vanishing_viscosity_limit(rd) if rd.equal_sides else conjectured_limit(rd)
        fam = viscous_family(rd.initial_data(), cfg.quad)
        params = cfg.gammas
        order = 1.0
    elif cfg.family == "shadow":
        swf, sol = shadow_wave(rd)
        fam = EpsilonFamily(swf, breaks=swf.breaks, label="shadow-wave")
        params = cfg.eps
        order = 1.0
    else:
        raise ConfigError(f"unknown family {cfg.family!r}")
    rows, extrap = [], []
    for t in cfg.times:
        for ln in sol.lines:
            reps = []
            for e in params:
                rep = measure_moments(fam, sol, ln.speed, t, cfg.window, e,
                                      QuadratureSpec(1e-9, cfg.max_panels))
                if cfg.residuals:
                    phi = _phi(cfg, bump((ln.speed * t, t), (min(cfg.window, 0.5 * t), 0.5 * t)))
                    R = weak_residual_family(fam, phi, e, QuadratureSpec(1e-8, cfg.max_panels))
                else:
                    R = ("",) * 4
                for k, c in enumerate(COMPONENTS):
                    rows.append((e, c, ln.speed, t, rep.M0[k], rep.M1[k], *R))
                reps.append(rep)
            if len(params) >= 2:
                for k, c in enumerate(COMPONENTS):
                    for name, vals in (("M0", [r.M0[k] for r in reps]), ("M1", [r.M1[k] for r in reps])):
                        ex = richardson(params, vals, order)
                        extrap.append((c, ln.speed, t, name, order, ex.value))
    paths = _write(cfg, "moments", rows)
    if extrap:
        path = os.path.splitext(cfg.output)[0] + ".extrapolated.csv"
        io.write_csv(path, "extrapolation", extrap)
        paths.append(path)
    return paths


def _entropy_check(cfg):
    from .entropy import admissibility_report, quadratic_entropy

    fam, _ = shadow_wave(cfg.riemann_data)
    eps = sorted(cfg.eps, reverse=True)
    rep = admissibility_report(fam, quadratic_entropy(*cfg.entropy), eps)
    return _write(cfg, "entropy", list(rep.rows()))


def _macroscopic(cfg):
    data = cfg.initial_data()
    phi = _phi(cfg, bump((0.0, 0.5 * cfg.T), (2.0, 0.25 * cfg.T)))
    rows = macroscopic_run(data, cfg.K, cfg.eps, cfg.T, cfg.h[0], cfg.safety, phi,
                           workers=cfg.workers)
    return _write(cfg, "macroscopic", [r.row() for r in rows], x_col="epsilon",
                  y_cols=("sup_z_sqrt_eps", "sup_zx_eps"))


def _moderateness(cfg):
    fam = viscous_family(cfg.initial_data(), cfg.quad, mollify_radius=lambda e: e)
    res = moderateness_probe(fam, cfg.j, cfg.eps, cfg.component, cfg.x_range,
                             np.linspace(*cfg.t_range, cfg.nt), cfg.nx)
    return _write(cfg, "moderateness", list(res.rows()))


_RUNNERS = {
    Kind.EXACT_EVAL: _exact_eval,
    Kind.FD_RUN: _fd_run,
    Kind.COMPARE: _compare,
    Kind.RIEMANN: _riemann,
    Kind.MEASURE: _measure,
    Kind.ENTROPY_CHECK: _entropy_check,
    Kind.MACROSCOPIC: _macroscopic,
    Kind.MODERATENESS: _moderateness,
}


@dataclass
class ExperimentResult:
    status: int
    artifacts: list = field(default_factory=list)
    message: str = ""


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one experiment; never raises for expected failure modes."""
    try:
        cfg.validate()
        paths = _RUNNERS[cfg.kind](cfg)
        return ExperimentResult(0, paths, "ok")
    except ConfigError as exc:
        return ExperimentResult(EXIT_CODES["config"], [], f"config error: {exc}")
    except UnsupportedRiemannError as exc:
        return ExperimentResult(EXIT_CODES["unsupported"], [], f"unsupported: {exc}")
    except ResolutionError as exc:
        return ExperimentResult(EXIT_CODES["resolution"], [], f"resolution failure: {exc}")
    except QuadratureError as exc:
        return ExperimentResult(EXIT_CODES["quadrature"], [], f"quadrature failure: {exc}")
    except CFLError as exc:
        return ExperimentResult(EXIT_CODES["cfl"], [], f"stability bound violated: {exc}")
    except Exception as exc:  # noqa: BLE001 - reported as a generic failure
        return ExperimentResult(EXIT_CODES["other"], [], f"{type(exc).__name__}: {exc}")


def run_batch(configs, workers: int = 1):
    """Run independent experiments, concurrently when ``workers > 1``."""
    configs = list(configs)
    outs = [c.output for c in configs]
    if len(set(outs)) != len(outs):
        raise ConfigError("batch experiments must write to distinct outputs")
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run_experiment, configs))
    return [run_experiment(c) for c in configs]


def report(result: ExperimentResult, stream=sys.stderr):
    if result.status:
        print(result.message, file=stream)
