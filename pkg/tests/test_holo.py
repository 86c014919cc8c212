import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parafermions.holo import (
    DegenerateFugacityError,
    SpinParams,
    build_c2_system,
    build_on_system,
    build_potts_system,
    c2_determinant,
    c2_dependency_residual,
    determinant_scan,
    isotropic_beta,
    null_space,
    numeric_determinant,
    on_determinant,
    on_dependency_residuals,
    potts_determinant,
    potts_real_determinant,
    potts_weight_ratio,
    projection_cosine,
    spectral_parameter,
)
from parafermions.models import (
    ModelId,
    c2_integrable_weights,
    fugacity_from_eta,
    on_integrable_weights,
    on_v0_dense_weights,
    on_v0_n1_weights,
    spin_value,
)

spins = st.floats(-1, 1)
alphas = st.floats(0.1, math.pi - 0.1)
fugacities = st.floats(-2, 2).filter(lambda n: abs(n * n - 1) > 1e-3)


def test_spin_params():
    p = SpinParams(ModelId.C2, 0.25, 1.0)
    assert p.spin_factor == 2
    assert p.lam == pytest.approx(1j)
    assert p.phi == pytest.approx(1.5)
    assert SpinParams("dense", 0.3, 1.0, beta=0.5).phi == pytest.approx(1.15)


@given(st.floats(0.01, 4), spins, alphas)
def test_potts_determinant_closed_form(Q, s, alpha):
    p = SpinParams("dense", s, alpha)
    det = numeric_determinant(build_potts_system(Q, p))
    assert abs(det - potts_determinant(Q, p)) < 1e-12 * max(1.0, abs(det))


@given(st.floats(0.01, 4), spins, alphas)
def test_potts_real_determinant(Q, s, alpha):
    p = SpinParams("dense", s, alpha)
    value = potts_real_determinant(Q, p)
    phi = p.phi
    expected = 4 * math.cos(phi / 2) * math.sin((phi - math.pi * s) / 2) * (2 * math.cos(math.pi * s) + Q - 2)
    assert value == pytest.approx(expected, abs=1e-12)
    rotated = 1j * cmath.exp(-1j * (phi - math.pi * s / 2)) * potts_determinant(Q, p)
    assert abs(rotated.imag) < 1e-12


def test_potts_system_rejects_negative_q():
    with pytest.raises(ValueError):
        build_potts_system(-1, SpinParams("dense", 0, 1))


@pytest.mark.parametrize("gamma", [math.pi / 8, math.pi / 3, 0.44 * math.pi])
@pytest.mark.parametrize("alpha", [math.pi / 6, 2 * math.pi / 3])
def test_potts_null_vector_ratio(gamma, alpha):
    s = spin_value("dense", gamma)
    system = build_potts_system(4 * math.cos(gamma) ** 2, SpinParams("dense", s, alpha))
    (vec,) = null_space(system)
    a, b = vec
    u = spectral_parameter(gamma, alpha)
    assert abs(b * math.sin(u) - a * math.sin(gamma - u)) < 1e-12
    assert b / a == pytest.approx(potts_weight_ratio(gamma, alpha), rel=1e-10)


def test_potts_weight_ratio_pole():
    gamma, alpha = math.pi / 3, math.pi / 4
    with pytest.raises(ZeroDivisionError):
        potts_weight_ratio(gamma, alpha)


@given(st.floats(0.05, 1.5), alphas)
def test_isotropic_beta_makes_u_linear_in_alpha(gamma, alpha):
    u = spectral_parameter(gamma, alpha, isotropic_beta(alpha))
    assert u == pytest.approx(gamma * alpha / math.pi, abs=1e-14)


@given(fugacities, spins, alphas, st.lists(st.floats(-3, 3), min_size=6, max_size=6))
@settings(max_examples=50)
def test_on_dependency_identities(n, s, alpha, vec):
    r1, r2 = on_dependency_residuals(n, SpinParams("dilute", s, alpha), np.array(vec))
    assert abs(r1) < 1e-12 and abs(r2) < 1e-12


@given(fugacities, spins, alphas)
def test_on_determinants(n, s, alpha):
    p = SpinParams("dilute", s, alpha)
    for branch in ("v_nonzero", "v_zero"):
        det = numeric_determinant(build_on_system(n, p, branch))
        assert det == pytest.approx(on_determinant(n, p, branch), abs=1e-10)


def test_on_system_shapes_and_notes():
    p = SpinParams("dilute", 0.1, 1.0)
    assert build_on_system(0.5, p).matrix.shape == (6, 6)
    assert build_on_system(0.5, p, "v_zero").matrix.shape == (5, 5)
    assert build_on_system(1.0, p).notes
    with pytest.raises(ValueError):
        build_on_system(0.5, p, "other")


@pytest.mark.parametrize("eta", [-3 * math.pi / 4, math.pi / 5, 0.9, 2.5])
@pytest.mark.parametrize("alpha", [math.pi / 4, 2.0])
def test_on_null_vector_is_integrable_branch(eta, alpha):
    s = spin_value("dilute", eta)
    n = fugacity_from_eta(eta)
    system = build_on_system(n, SpinParams("dilute", s, alpha))
    basis = null_space(system)
    assert len(basis) == 1
    w = on_integrable_weights(eta, (s + 1) * alpha)
    assert projection_cosine(basis, w.vector()) > 1 - 1e-10
    printed = on_integrable_weights(eta, (s + 1) * alpha, printed=True)
    assert projection_cosine(basis, printed.vector()) < 1 - 1e-4


@given(st.floats(-1, 1), st.floats(-3, 3))
def test_on_v0_n1_solves_the_first_three_equations(s, phi):
    w = on_v0_n1_weights(s, phi)
    alpha = phi / (s + 1) if abs(s + 1) > 1e-6 else 1.0
    if abs(s + 1) <= 1e-6:
        return
    res = build_on_system(1.0, SpinParams("dilute", s, alpha)).residuals(w)
    assert np.max(np.abs(res[:3])) < 1e-12


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), alphas)
def test_on_v0_dense_solves_at_s_minus_one(a, b, n, alpha):
    res = build_on_system(n, SpinParams("dilute", -1.0, alpha)).residuals(on_v0_dense_weights(a, b, n))
    assert np.max(np.abs(res[:3])) < 1e-12


@given(fugacities, spins, alphas, st.lists(st.floats(-3, 3), min_size=5, max_size=5))
@settings(max_examples=50)
def test_c2_dependency_identity(n, s, alpha, vec):
    assert abs(c2_dependency_residual(n, SpinParams("c2", s, alpha), np.array(vec))) < 1e-11


def test_c2_printed_dependency_sign_fails():
    n, p = 2.0, SpinParams("c2", 0.13, 0.9)
    system = build_c2_system(n, p)
    lam, mu = p.lam, p.mu
    e1, e2, e3 = system.residuals(np.array([0.3, -1.2, 0.7, 0.4, 1.1]))
    printed = (n * lam - 1 / lam) * e1 / mu + lam * (lam - n / lam) * e2 / mu + (n * n - 1) * e3
    assert abs(printed.imag) > 1e-3


@given(fugacities, spins, alphas)
def test_c2_determinant(n, s, alpha):
    p = SpinParams("c2", s, alpha)
    assert numeric_determinant(build_c2_system(n, p)) == pytest.approx(c2_determinant(n, p), abs=1e-10)


@pytest.mark.parametrize("eta", [math.pi / 6, math.pi / 2, 0.8, 2.4])
@pytest.mark.parametrize("alpha", [math.pi / 4, math.pi / 2])
def test_c2_null_space_contains_integrable_branch(eta, alpha):
    s = spin_value("c2", eta)
    n = fugacity_from_eta(eta)
    system = build_c2_system(n, SpinParams("c2", s, alpha))
    basis = null_space(system)
    w = c2_integrable_weights(eta, (2 * s + 1) * alpha)
    assert projection_cosine(basis, w.vector()) > 1 - 1e-10
    if abs(n * n - 1) > 1e-9:
        assert len(basis) == 1
    else:
        assert system.notes


def test_null_space_rejects_bad_tol():
    with pytest.raises(ValueError):
        null_space(build_c2_system(0.5, SpinParams("c2", 0, 1)), tol=0)


def test_projection_cosine_edge_cases():
    assert projection_cosine([], np.ones(3)) == 0.0
    assert projection_cosine([np.array([1.0, 0, 0])], np.zeros(3)) == 0.0
    assert projection_cosine([np.array([1.0, 0])], np.array([1.0, 1.0])) == pytest.approx(1 / math.sqrt(2))


def test_determinant_scan_dense_finds_potts_spin():
    gamma = 0.7
    res = determinant_scan("dense", 4 * math.cos(gamma) ** 2, 1.1)
    assert any(abs(x - spin_value("dense", gamma)) < 1e-9 for x in res.spins)
    for r in res.roots:
        assert r.to_dict()["kind"] == r.kind


def test_determinant_scan_dilute():
    eta, alpha = 0.9, 1.1
    res = determinant_scan("dilute", fugacity_from_eta(eta), alpha)
    assert any(abs(x - spin_value("dilute", eta)) < 1e-9 for x in res.spins)
    assert res.method != "singular-value"


def test_determinant_scan_c2_degenerate_fallback():
    res = determinant_scan("c2", fugacity_from_eta(math.pi / 3), math.pi / 2)
    assert res.method == "singular-value"
    for target in (0.0, 0.5, -0.5):
        assert any(abs(x - target) < 1e-6 for x in res.spins)
    with pytest.raises(DegenerateFugacityError):
        determinant_scan("c2", 1.0, math.pi / 2, degenerate="reject")
