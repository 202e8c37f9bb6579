"""Smoke tests for the python bindings: model constructors, pointwise kernel
calls, a tiny flow run, and the blow-up fitter."""

import math

import numpy as np
import pytest

import crflow


def test_hopf_scalar_values():
    m = crflow.HopfModel(2, 2.0)
    g = crflow.hopf_metric(m)
    assert crflow.chern_scalar(g, [1.0 + 0j, 0.0 + 0j]) == pytest.approx(2.0, abs=1e-12)
    assert crflow.hopf_exact_scalar(m, 0.25) == pytest.approx(4.0, abs=1e-12)
    assert crflow.hopf_singular_time(m) == 0.5
    g3 = crflow.hopf_metric(crflow.HopfModel(3, 2.0))
    assert crflow.chern_scalar(g3, [1.0, 0.3 + 0.2j, -0.1j]) == pytest.approx(6.0, abs=1e-11)


def test_hopf_ricci_matrix():
    m = crflow.HopfModel(2, 2.0)
    g = crflow.hopf_metric(m)
    ric = crflow.chern_ricci(g, [1.0 + 0j, 0.0 + 0j])
    assert np.allclose(ric, np.diag([0.0, 2.0]), atol=1e-12)
    ric_trace = crflow.chern_ricci(g, [1.1 + 0.2j, 0.4 - 0.3j], method=crflow.RicciMethod.trace)
    ric_logdet = crflow.chern_ricci(g, [1.1 + 0.2j, 0.4 - 0.3j], method=crflow.RicciMethod.logdet)
    assert np.allclose(ric_trace, ric_logdet, atol=1e-11)


def test_torsion_and_residuals():
    m = crflow.HopfModel(2, 2.0)
    g = crflow.hopf_metric(m)
    tensor, trace = crflow.torsion(g, [1.0 + 0j, 0.0 + 0j])
    assert tensor[0, 1, 1] == pytest.approx(-1.0)
    dbar, gaud = crflow.kahler_gauduchon_residuals(
        g, [[1.0 + 0j, 0.2 + 0.1j], [1.3 - 0.4j, 0.5 + 0j]]
    )
    assert dbar > 0.1
    assert gaud < 1e-10


def test_positivity_and_trace_norms():
    ok, eig = crflow.positivity(np.eye(2, dtype=complex))
    assert ok and eig == pytest.approx(1.0)
    bad, eig = crflow.positivity(np.diag([1.0, -0.1]).astype(complex))
    assert not bad and eig == pytest.approx(-0.1)
    tr, nrm = crflow.trace_and_norms(
        np.diag([2.0, 1.0]).astype(complex), np.diag([4.0, 3.0]).astype(complex)
    )
    assert tr == pytest.approx(5.0)
    assert nrm == pytest.approx(13.0)


def test_flat_run_and_csv():
    cfg = crflow.builtin_scenario("flat-torus")
    cfg.t_end = 0.05
    tr = crflow.run_flow(cfg)
    assert tr.termination == "reached_t_end"
    assert tr.label == ""
    rows = tr.rows
    assert rows.shape[1] == 12
    assert abs(rows[:, 1]).max() < 1e-12  # sup_R column
    assert tr.csv().startswith("t,sup_R,inf_R,")


def test_hopf_run_blows_up_and_fits():
    cfg = crflow.builtin_scenario("hopf-n2")
    cfg.hopf_samples = 16
    tr = crflow.run_flow(cfg)
    assert tr.termination == "step_underflow"
    assert tr.label == "curvature_blowup"
    assert abs(tr.t_final - 0.5) < 1e-3
    rows = tr.rows
    fit = crflow.fit_blowup(list(rows[:, 0]), list(rows[:, 1]), 0.1, tr.t_final)
    assert fit.T_fit == pytest.approx(0.5, abs=1e-3)
    assert fit.exponent == pytest.approx(1.0, abs=0.05)
    assert fit.constant == pytest.approx(1.0, rel=0.02)
    assert crflow.blowup_type_label(fit) == "Type I"


def test_maximal_time_proxy():
    g0 = np.eye(2, dtype=complex)[None, :, :]
    ric = np.diag([2.0, 1.0]).astype(complex)[None, :, :]
    assert crflow.maximal_time_proxy(g0, ric) == pytest.approx(0.5, abs=1e-9)
    assert math.isinf(crflow.maximal_time_proxy(g0, np.zeros_like(g0)))


def test_config_parsing_and_errors():
    cfg = crflow.parse_config("model.type = hopf\nflow.formulation = closed_form\n")
    assert cfg.t_end > 0
    with pytest.raises(crflow.ConfigError):
        crflow.parse_config("flow.dt0 = 1e-3\nflow.dt_min = 1\n")
    names = crflow.builtin_scenario_names()
    assert "hopf-n2" in names and "smooth-torus-n1" in names
