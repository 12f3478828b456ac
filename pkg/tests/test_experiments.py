import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deltawave import io
from deltawave.distcalc import constant_family
from deltawave.experiments import (ConfigError, ExperimentConfig, Kind, MollifierSpec, beta_schedule,
                                   bump_cdf, macroscopic_run, macroscopic_viscosities, moderateness_probe,
                                   mollify, read_data_file, run_batch, run_experiment, scaled_bump_family,
                                   smooth_data)
from deltawave.initial_data import PiecewiseInitialData
from deltawave.riemann import RiemannData


def _step(a=-1.0, b=2.0):
    return RiemannData(a, 0, 0, 0, b, 0, 0, 0).initial_data()


def test_bump_cdf_endpoints():
    assert bump_cdf(-1.0) == 0.0
    assert bump_cdf(1.0) == pytest.approx(1.0, abs=1e-12)
    assert bump_cdf(0.0) == pytest.approx(0.5, abs=1e-12)


def test_mollifier_has_unit_mass():
    spec = MollifierSpec(0.3)
    x = np.linspace(-0.3, 0.3, 20001)
    from scipy.integrate import simpson
    assert simpson(spec(x), x=x) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        MollifierSpec(0.0)


def test_mollify_leaves_constants():
    data = PiecewiseInitialData.constant(1.0, -2.0, 0.5, 3.0)
    m = mollify(data, MollifierSpec(0.2))
    x = np.linspace(-2, 2, 9)
    assert np.allclose(m.u(x), 1.0) and np.allclose(m.z(x), 3.0)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 1.0))
def test_mollified_step_properties(a, b, r):
    m = mollify(_step(a, b), MollifierSpec(r)).u
    x = np.linspace(-2 * r, 2 * r, 401)
    y = m(x)
    d = np.diff(y) * np.sign(b - a)
    assert np.all(d >= -1e-12)
    assert m(0.0) == pytest.approx(0.5 * (a + b), abs=1e-8)
    assert np.max(np.abs(y)) <= max(abs(a), abs(b)) + 1e-12
    assert m(-r) == pytest.approx(a, abs=1e-12) and m(r) == pytest.approx(b, abs=1e-12)


def test_mollified_smooth_data_matches_direct_convolution():
    from scipy.integrate import quad
    spec = MollifierSpec(0.25)
    m = mollify(smooth_data(), spec)
    for x0 in (-0.7, 0.0, 1.3):
        ref = quad(lambda s: float(smooth_data().v(x0 - s)) * float(spec(s)), -0.25, 0.25, epsabs=1e-13)[0]
        assert float(m.v(x0)) == pytest.approx(ref, abs=1e-10)


def test_beta_schedule():
    assert beta_schedule(math.exp(-2), 1.0) == pytest.approx(1.0)
    assert beta_schedule(0.01, 2.0) == pytest.approx((2 / math.log(10)) ** 2)
    with pytest.raises(ValueError):
        beta_schedule(1.0)
    v = macroscopic_viscosities(0.01)
    assert v[3] == pytest.approx(0.02) and v[0] == v[1] == v[2]


def test_macroscopic_constant_data():
    data = PiecewiseInitialData.constant(0.5, 1.0, -1.0, 0.25)
    rows = macroscopic_run(data, eps_list=(0.1, 0.05), T=0.1, h=0.05)
    for r in rows:
        assert r.sup_z == pytest.approx(0.25, rel=1e-12)
        assert r.sup_zx == pytest.approx(0.0, abs=1e-12)
        assert r.sup_z_sqrt_eps == pytest.approx(0.25 * math.sqrt(r.epsilon))
        assert math.isnan(r.residual_z)


def test_moderateness_calibration():
    eps = [0.1, 0.03, 0.01, 0.003]
    res0 = moderateness_probe(constant_family((1, 1, 1, 1)), 0, eps)
    assert abs(res0.p) < 1e-12
    res1 = moderateness_probe(scaled_bump_family(1.0), 0, eps, x_range=(-1, 1), nx=201)
    assert res1.p == pytest.approx(1.0, abs=0.05) and res1.fit_residual < 1e-8
    with pytest.raises(ValueError):
        moderateness_probe(scaled_bump_family(), 2, eps)


def test_read_data_file(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("x,u,v,w,z\n-1,0,1,2,3\n1,2,1,0,-1\n")
    d = read_data_file(p)
    assert float(d.u(0.0)) == pytest.approx(1.0)
    assert float(d.z(-5.0)) == 3.0 and float(d.z(5.0)) == -1.0
    bad = tmp_path / "bad.csv"
    bad.write_text("x,u,v,w\n0,1,1,1\n")
    with pytest.raises(ValueError):
        read_data_file(bad)


_names = st.sampled_from(["a.csv", "out/b.csv", "run_1.csv"])


@settings(max_examples=30)
@given(kind=st.sampled_from(list(Kind)), output=_names,
       left=st.tuples(*(st.floats(-5, 5),) * 4), eps=st.lists(st.floats(1e-4, 0.9), min_size=1, max_size=5),
       T=st.floats(0.01, 10), j=st.sampled_from([0, 1]), residuals=st.booleans(),
       phi=st.sampled_from([(), (0.0, 1.0, 0.5, 0.25)]))
def test_config_round_trip(kind, output, left, eps, T, j, residuals, phi):
    cfg = ExperimentConfig(kind, output=output, left=left, eps=tuple(eps), T=T, j=j,
                           residuals=residuals, phi=phi)
    back = ExperimentConfig.loads(cfg.dumps())
    assert back == cfg


def test_unknown_kind():
    with pytest.raises(ConfigError):
        ExperimentConfig("nope")


def _cfg(kind, tmp_path, **kw):
    return ExperimentConfig(kind, output=str(tmp_path / f"{kind}.csv"), **kw)


def test_riemann_artifacts_and_headers(tmp_path):
    res = run_experiment(_cfg("riemann", tmp_path, times=(0.5, 1.0)))
    assert res.status == 0 and len(res.artifacts) == 2
    header, rows = io.read_csv(res.artifacts[0])
    assert tuple(header) == io.SCHEMAS["amplitudes"]
    assert rows


def test_riemann_is_deterministic(tmp_path):
    a = run_experiment(ExperimentConfig("riemann", output=str(tmp_path / "a.csv"), c=0.7))
    b = run_experiment(ExperimentConfig("riemann", output=str(tmp_path / "b.csv"), c=0.7))
    assert open(a.artifacts[0], "rb").read() == open(b.artifacts[0], "rb").read()


def test_exit_codes(tmp_path):
    assert run_experiment(_cfg("riemann", tmp_path, eps=())).status == 2
    assert run_experiment(_cfg("fd-run", tmp_path, data=str(tmp_path / "missing.csv"))).status == 2
    assert run_experiment(_cfg("riemann", tmp_path, left=(1, 0, 0, 0), right=(-1, 0, 0, 0))).status == 5
    assert run_experiment(_cfg("exact-eval", tmp_path, max_panels=4, gammas=(1e-3,), nx=5, nt=2)).status == 3
    assert run_experiment(_cfg("fd-run", tmp_path, h=(0.05,), T=0.1, dt=1.0, gammas=(0.1,))).status == 4
    assert run_experiment(_cfg("measure", tmp_path, gammas=(1e-6, 1e-7), max_panels=50)).status == 6
    bad = tmp_path / "bad.csv"
    bad.write_text("x,u\n0,1\n")
    assert run_experiment(_cfg("fd-run", tmp_path, data=str(bad))).status == 1


def test_small_runs_write_schema_headers(tmp_path):
    cases = {
        "exact-eval": dict(gammas=(0.5,), nx=5, nt=2),
        "fd-run": dict(gammas=(0.2,), h=(0.05,), T=0.1, times=(0.05,)),
        "compare": dict(data="smooth", gammas=(0.5,), h=(0.05,), T=0.05, half_width=3.0),
        "entropy-check": dict(eps=(0.1, 0.05, 0.02)),
        "moderateness": dict(eps=(0.1, 0.05), nx=21, nt=2, t_range=(0.5, 1.0)),
    }
    schemas = {"exact-eval": "fields", "fd-run": "snapshots", "compare": "compare",
               "entropy-check": "entropy", "moderateness": "moderateness"}
    for kind, kw in cases.items():
        res = run_experiment(_cfg(kind, tmp_path, **kw))
        assert res.status == 0, (kind, res.message)
        header, rows = io.read_csv(res.artifacts[0])
        assert tuple(header) == io.SCHEMAS[schemas[kind]] and rows


def test_measure_writes_extrapolation(tmp_path):
    res = run_experiment(_cfg("measure", tmp_path, family="shadow", eps=(0.01, 0.005)))
    assert res.status == 0, res.message
    header, rows = io.read_csv(res.artifacts[1])
    assert tuple(header) == io.SCHEMAS["extrapolation"]


def test_batch(tmp_path):
    cfgs = [_cfg("riemann", tmp_path), ExperimentConfig("riemann", output=str(tmp_path / "x.csv"))]
    assert [r.status for r in run_batch(cfgs, workers=2)] == [0, 0]
    with pytest.raises(ConfigError):
        run_batch([cfgs[0], cfgs[0]])
