import math
import pathlib

import numpy as np
import pytest

import paraswap

REFERENCE = str(pathlib.Path(__file__).resolve().parents[2] / "configs" / "reference.json")
TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def device():
    return paraswap.Device(REFERENCE)


def test_sweet_spot_and_anchor(device):
    assert device.coupler_frequency(0.0) == pytest.approx(TWO_PI * 5.977e9)
    assert device.coupler_frequency(device.point_phi(0)) / TWO_PI == pytest.approx(5.905e9, rel=2e-4)
    assert [name for name, _ in device.operating_points] == ["P1", "P2", "P3", "P4"]


def test_off_flux_zeroes_j12(device):
    assert abs(device.effective_coupling_j12(device.find_off_flux())) < TWO_PI


def test_static_zz_signs(device):
    zz = [device.static_zz(device.point_phi(i)) for i in range(4)]
    assert all(z < 0 for z in zz[1:])
    assert abs(zz[1]) < abs(zz[2]) < abs(zz[3])


def test_injected_zz_error_matrix():
    t = 204e-9
    theta = TWO_PI * -100e3 * t
    zz = np.diag(np.exp(1j * theta * np.array([1, -1, -1, 1])))
    chi = paraswap.ideal_chi(paraswap.iswap() @ zz)
    err = paraswap.error_matrix(chi, paraswap.iswap())
    assert paraswap.dynamic_zz(err, t) == pytest.approx(math.sin(theta) * math.cos(theta) / t, rel=1e-9)
    assert paraswap.decoherence_error(err) < 1e-9
    assert paraswap.process_fidelity(chi, paraswap.ideal_chi(paraswap.iswap())) == pytest.approx(math.cos(theta) ** 2)
    assert paraswap.pauli_labels()[15] == "ZZ"


def test_coherence_budget_and_decay_fit():
    assert paraswap.coherence_budget(math.inf, math.inf, math.inf, math.inf, 204e-9) == 0.0
    pts = [(n, 0.951 * 0.94**n + 1 / 16) for n in range(1, 22, 2)]
    fit = paraswap.fit_fidelity_decay(pts)
    assert fit["P"] == pytest.approx(0.94, rel=1e-9)


def test_errors_are_python_exceptions():
    with pytest.raises(paraswap.ConfigError):
        paraswap.Device("/nonexistent.json")
    assert paraswap.validate_config("{}")
    with pytest.raises(paraswap.ParaswapError):
        paraswap.coherence_budget(-1.0, 1.0, 1.0, 1.0, 1e-7)


def test_calibration_hits_gate_time(device):
    cal = paraswap.calibrate_gate(device, 1)
    assert cal["swap_time"] == pytest.approx(204e-9, rel=1 / 204)
    assert cal["transfer"] > 0.99
