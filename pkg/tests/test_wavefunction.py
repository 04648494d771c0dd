import numpy as np
import pytest
from scipy.integrate import simpson

from qesrel.models import Model, ModelSector, sample_wavefunction, solve_sector, wavefunction

FIXTURES = {
    "kg_q1": ModelSector(Model.KLEIN_GORDON, 1, 1, 1.0, ell=0, z_s=1.0, z_v=1.0),
    "kg_q2": ModelSector(Model.KLEIN_GORDON, 2, 1, 1.0, ell=0, z_s=2.0, z_v=0.0),
    "dirac_q1": ModelSector(Model.DIRAC, 1, 1, 1.0, kappa=1, z_delta=-4.0),
    "dirac_q2": ModelSector(Model.DIRAC, 2, 1, 1.0, kappa=2, z_delta=-4.0),
    "dirac_q1_n2": ModelSector(Model.DIRAC, 1, 2, 1.0, kappa=1, z_delta=-4.0),
}


@pytest.fixture(scope="module")
def waves():
    return {k: [wavefunction(s) for s in solve_sector(sec)] for k, sec in FIXTURES.items()}


def test_kg_fixture_shape(waves):
    (wf,) = waves["kg_q1"]
    r = np.linspace(0.05, 20, 400)
    want = r * np.exp(-0.8 * (r + 1.25)) * (r + 1.25)
    np.testing.assert_allclose(wf.value(r), want, rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("name", list(FIXTURES))
def test_small_r_log_slope(waves, name):
    for wf in waves[name]:
        r = np.geomspace(1e-4, 1e-2, 50)
        slope = np.polyfit(np.log(r), np.log(np.abs(wf.value(r))), 1)[0]
        assert abs(slope - wf.prefactor_power) < 1e-3


@pytest.mark.parametrize("name", list(FIXTURES))
def test_decays(waves, name):
    for wf in waves[name]:
        r = np.linspace(1e-3, 50.0 / wf.decay_rate, 4000)
        v = np.abs(wf.value(r))
        assert v[-1] < 1e-12 * v.max()


def test_dirac_upper_component_matches_definition(waves):
    # F = (G' - kappa G / r) / gamma, checked by central differences
    for wf in waves["dirac_q2"] + waves["dirac_q1"]:
        r = np.linspace(0.5, 5.0, 25)
        h = 1e-5
        dG = (wf.value(r + h) - wf.value(r - h)) / (2 * h)
        F = (dG - wf.prefactor_power * wf.value(r) / r) / wf.gamma
        np.testing.assert_allclose(wf.upper(r), F, rtol=1e-6, atol=1e-9)


def test_sampling_and_normalization(waves):
    (wf,) = waves["dirac_q1"]
    tab = sample_wavefunction(wf, points=401, normalize=True)
    assert tab.columns == ("r", "G", "F")
    r = tab.rows[:, 0]
    assert r[0] == pytest.approx(30.0 / 401) and r[-1] == pytest.approx(30.0)
    assert simpson(tab.rows[:, 1] ** 2 + tab.rows[:, 2] ** 2, x=r) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        sample_wavefunction(wf, points=1)
    with pytest.raises(ValueError):
        wf_kg = waves["kg_q1"][0]
        wf_kg.upper(1.0)


def test_node_count(waves):
    # n=2 Dirac: root 0 lies below the cut-off; the second root counts only if > beta
    for wf in waves["dirac_q1_n2"]:
        roots = np.roots(wf.poly_factor.coeffs[::-1]).real
        assert wf.node_count() == int(np.sum(roots > wf.beta))
    assert waves["kg_q2"][0].node_count() == 0
