import numpy as np
import pytest

from qesrel.models import Model, ModelSector, build_ode, solve_sector
from qesrel.polyvec import Poly
from qesrel.qes import QesOde
from qesrel.sl2 import (
    InvarianceError,
    OperatorMatrix,
    QesConditionError,
    assemble_H,
    direct_matrix,
    dirac_q1_printed_form,
    generators,
    max_deviation,
    qes_condition,
    spectrum,
)


def comm(a, b):
    return a @ b - b @ a


@pytest.mark.parametrize("n", range(0, 7))
def test_commutators(n):
    jm, j0, jp = generators(n)
    assert np.max(np.abs((comm(jp, jm) + 2 * j0).entries)) <= 1e-14
    assert np.max(np.abs((comm(j0, jp) - jp).entries)) <= 1e-14
    assert np.max(np.abs((comm(j0, jm) + jm).entries)) <= 1e-14


def test_generator_entries():
    jm, j0, jp = generators(1)
    np.testing.assert_array_equal(j0.entries, np.diag([-0.5, 0.5]))
    _, _, jp2 = generators(2)
    assert not jp2.entries[:, 2].any()
    np.testing.assert_array_equal(generators(2)[0].entries, [[0, 1, 0], [0, 0, 2], [0, 0, 0]])
    with pytest.raises(ValueError):
        generators(-1)


def test_generators_act_as_differential_operators():
    # J^+ t^k = t^2 (k t^{k-1}) - n t^{k+1} = (k - n) t^{k+1}
    n = 4
    _, _, jp = generators(n)
    for k in range(n + 1):
        e = np.zeros(n + 1)
        e[k] = 1.0
        img = jp.apply(e)
        want = np.zeros(n + 1)
        if k < n:
            want[k + 1] = k - n
        np.testing.assert_array_equal(img, want)


def fixture_ode(kind, q, n=1):
    if kind is Model.DIRAC:
        sec = ModelSector(kind, q, n, 1.0, kappa=1, z_delta=-4.0)
    else:
        sec = ModelSector(kind, q, n, 1.0, ell=0, z_s=1.0 if q == 1 else 2.0, z_v=1.0 if q == 1 else 0.0)
    sol = solve_sector(sec)[0]
    return sol, build_ode(sol.sector, sol.derived)


def test_dirac_q1_fixture():
    sol, ode = fixture_ode(Model.DIRAC, 1)
    assert qes_condition(ode)
    D = direct_matrix(ode)
    np.testing.assert_allclose(D.entries, [[0, 0], [2, 4]], atol=1e-14)
    assert max_deviation(assemble_H(ode), D)[0] <= 1e-12
    spec = spectrum(D)
    assert spec.contains(-ode.c(0))
    assert -ode.c(0) == pytest.approx(4.0)


def test_printed_dirac_form_differs_by_a_constant():
    for n in (1, 2, 3):
        sec = ModelSector(Model.DIRAC, 1, n, 1.0, kappa=2, z_delta=-3.0)
        for sol in solve_sector(sec):
            ode = build_ode(sol.sector, sol.derived)
            D = direct_matrix(ode)
            pf = dirac_q1_printed_form(n, 2, sol.derived.decay, sol.beta)
            diff = pf.entries - D.entries
            offset = n * (2 + sol.w) / 2
            np.testing.assert_allclose(diff, -offset * np.eye(n + 1), atol=1e-12)


@pytest.mark.parametrize("kind,q", [(Model.DIRAC, 2), (Model.KLEIN_GORDON, 1), (Model.KLEIN_GORDON, 2)])
def test_negative_controls(kind, q):
    _, ode = fixture_ode(kind, q)
    cond = qes_condition(ode)
    assert not cond
    assert any(v.startswith("b3") for v in cond.violations)
    with pytest.raises(QesConditionError):
        assemble_H(ode)
    with pytest.raises(InvarianceError):
        direct_matrix(ode)


def test_identity_only_toy():
    b1, n = 1.5, 4
    ode = QesOde(Poly([]), Poly([0.0, b1]), Poly([]), n)
    H = assemble_H(ode)
    np.testing.assert_allclose(H.entries, b1 * np.diag(np.arange(n + 1)), atol=1e-14)
    assert spectrum(H).real == pytest.approx([b1 * k for k in range(n + 1)])


def test_spectrum_reports_complex_pairs():
    rot = OperatorMatrix([[0.0, -1.0], [1.0, 0.0]])
    s = spectrum(rot)
    assert s.real == () and not s.all_real
    assert s.complex_pairs[0] == pytest.approx(1j)
    with pytest.raises(ValueError):
        spectrum(OperatorMatrix(np.eye(9)))


def test_operator_matrix_must_be_square():
    with pytest.raises(ValueError):
        OperatorMatrix(np.zeros((2, 3)))
