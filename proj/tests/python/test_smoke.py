import math

import numpy as np
import pytest

import gaugetrunc as gt


@pytest.fixture(scope="module")
def basis():
    return gt.solve_double_well(gt.calibrate_potential(70.0, 1.0))


def system(basis, eta, nm=8, nph=20):
    return gt.make_system(basis.truncated(nm), gt.ModeSpec(n_photons=nph), eta)


def test_calibration(basis):
    assert basis.anharmonicity == pytest.approx(70.0, rel=1e-3)
    assert basis.omega0 == pytest.approx(1.0, abs=1e-8)
    assert basis.x10 == pytest.approx(0.27435839, rel=1e-6)
    assert basis.eps.shape == (30,)


def test_hamiltonians_and_gauges(basis):
    sys = system(basis, 0.5, 12, 30)
    h0, h1 = gt.h_alpha(0.0, sys), gt.h_alpha(1.0, sys)
    assert h0.shape == (360, 360)
    assert np.allclose(h1, h1.conj().T)
    e0 = np.linalg.eigvalsh(h0)[:3]
    e1 = np.linalg.eigvalsh(h1)[:3]
    assert np.allclose(e0, e1, rtol=1e-3)
    es = gt.eigensolve(gt.ModelKind.exact(1.0), sys)
    assert np.allclose(es.energies[:3], e1)
    qrm = gt.eigensolve(gt.ModelKind.standard(1.0), sys)
    assert qrm.on_subspace and qrm.vectors.shape[0] == 60


def test_delta_forms_agree(basis):
    sys = system(basis, 0.4)
    closed = gt.delta_operator(sys, "closed")
    assert np.abs(closed - gt.delta_operator(sys, "hamiltonian")).max() < 1e-10
    assert gt.delta_operator(system(basis, 0.0), "closed").max() == 0.0
    with pytest.raises(gt.GaugetruncError) as err:
        gt.delta_operator(sys, "sideways")
    assert err.value.args[0] == "InvalidSpec"


def test_observables_and_bound(basis):
    sys = system(basis, 1.0, 12, 40)
    ctx = gt.FrameContext(sys)
    exact = gt.eigensolve(gt.ModelKind.exact(0.0), sys)
    n = gt.average(gt.Observable.n_et(), gt.Frame.exact_gauge(0.0), ctx, exact)
    assert 0.1 < n < 0.2
    qrm = gt.eigensolve(gt.ModelKind.standard(1.0), sys)
    exact1 = gt.eigensolve(gt.ModelKind.exact(1.0), sys)
    rec = gt.paired_fidelity(qrm, exact1, sys)
    assert rec["fidelity"] <= rec["bound"] + 1e-10
    assert gt.cs_bound(exact1.state(0), sys) == pytest.approx(rec["bound"])


def test_lindblad_contracts(basis):
    sys = system(basis, 0.5, 10, 24)
    ctx = gt.FrameContext(sys)
    es = gt.eigensolve(gt.ModelKind.exact(0.0), sys)
    q = gt.represent(gt.Observable.q_et(), gt.Frame.exact_gauge(0.0), ctx)
    lb = gt.make_lindblad(es, q, 0.05, 8)
    rho0 = np.zeros((8, 8), dtype=complex)
    rho0[1, 1] = 1.0
    tr = gt.evolve(lb, rho0, list(np.linspace(0.0, 50.0, 11)), [np.diag(np.arange(8.0)).astype(complex)])
    assert tr["max_trace_error"] < 1e-8
    assert tr["min_eigenvalue"] > -1e-7
    pops = tr["expectations"][0]
    assert pops[-1] < pops[0]
    rate = gt.decay_rate(lb, 1)
    assert gt.fitted_decay_rate(lb, 1) == pytest.approx(rate, rel=1e-3)
    ss = gt.stationary_state(lb)
    assert abs(ss[0, 0] - 1.0) < 1e-8


def test_experiment_roundtrip():
    names = [n for n, _ in gt.list_experiments()]
    assert "fig1b" in names and "figS5" in names
    assert gt.default_config()["n_mat"] == 30
    assert gt.validate(experiment="fig3") == []
    issues = gt.validate(experiment="fig3", n_ph=4)
    assert issues and issues[0]["key"] == "n_ph"
    res = gt.run("figS3", eta_values=[0.0, 0.5])
    table = res["tables"][0]
    assert table["data"].shape[0] == 2
    assert res["provenance"]["experiment"] == "figS3"
    assert np.abs(table["data"][:, 1:]).max() < 0.02
    with pytest.raises(gt.GaugetruncError):
        gt.run("fig9")


def test_csv_format():
    text = gt.format_csv("demo", ["eta", "v"], "# units", [[0.5, 1.0 / 3.0]])
    assert text == "# units\neta,v\n5.000000000000e-01,3.333333333333e-01\n"
    assert math.isfinite(float(text.splitlines()[-1].split(",")[1]))
