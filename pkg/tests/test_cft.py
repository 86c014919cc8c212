import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parafermions.cft import (
    CoulombGas,
    c_regime34,
    central_charge,
    conformal_weight,
    dense_coupling,
    dilute_coupling,
    regime34_coupling,
    sle_c_of_s,
    spin_from_boundary_weight,
)
from parafermions.models import spin_value


def test_known_central_charges():
    assert central_charge(1.0) == 1.0
    assert central_charge(2 / 3) == pytest.approx(0.0)  # percolation
    assert central_charge(3 / 4) == pytest.approx(0.5)  # Ising
    assert CoulombGas(3 / 4).c == pytest.approx(0.5)


def test_known_weights():
    gas = CoulombGas(4 / 3)  # Ising in the dilute branch
    assert gas.h(2, 1) == pytest.approx(0.5)
    assert conformal_weight(1.0, 1, 1) == 0.0


@pytest.mark.parametrize("g", [0.0, -1.0])
def test_nonpositive_coupling_rejected(g):
    with pytest.raises(ValueError):
        central_charge(g)
    with pytest.raises(ValueError):
        CoulombGas(g)


@given(st.floats(0, math.pi / 2))
def test_dense_spin_is_h31(gamma):
    g = dense_coupling(gamma)
    assert abs(spin_value("dense", gamma) - conformal_weight(g, 3, 1)) < 1e-12


@given(st.floats(0.01, math.pi))
def test_dilute_spin_is_h21(eta):
    g = dilute_coupling(eta)
    assert abs(spin_value("dilute", eta) - conformal_weight(g, 2, 1)) < 1e-12 * max(1.0, 1 / g)


@given(st.floats(-math.pi + 0.01, -0.01))
def test_regime34_relation_holds_for_shifted_spin(eta):
    c = c_regime34(regime34_coupling(eta))
    sp = 3 * eta / (2 * math.pi) + 0.5
    assert c == pytest.approx((2 - 5 * sp - 16 * sp**2) / (2 * sp + 2), abs=1e-10)
    s = spin_value("dilute", eta)
    assert c == pytest.approx(-(16 * s**2 + 37 * s + 19) / (2 * s + 4), abs=1e-10)


def test_regime34_literal_relation_fails_for_holomorphic_spin():
    etas = np.linspace(-math.pi, 0, 66)[1:-1]
    diffs = []
    for eta in etas:
        s = spin_value("dilute", eta)
        diffs.append(abs(c_regime34(regime34_coupling(eta)) - (2 - 5 * s - 16 * s**2) / (2 * s + 2)))
    assert max(diffs) > 1.0


def test_sle_relation():
    assert sle_c_of_s(0.0) == 0.0
    assert sle_c_of_s(0.5) == pytest.approx(0.5)  # Ising interface, kappa = 3
    with pytest.raises(ZeroDivisionError):
        sle_c_of_s(-0.5)


@given(st.floats(0.01, math.pi / 2))
def test_spin_from_kappa_matches_dense(gamma):
    kappa = 4 * math.pi / (math.pi - gamma)
    assert spin_from_boundary_weight(2, kappa) == pytest.approx(spin_value("dense", gamma), abs=1e-12)


@given(st.floats(math.pi / 4, math.pi / 2))
def test_spin_from_kappa_matches_dilute(eta):
    kappa = 4 / dilute_coupling(eta)
    assert spin_from_boundary_weight(1, kappa) == pytest.approx(spin_value("dilute", eta), abs=1e-12)


def test_spin_from_boundary_weight_validation():
    with pytest.raises(ValueError):
        spin_from_boundary_weight(0, 4.0)
    with pytest.raises(ValueError):
        spin_from_boundary_weight(1, 0.0)


@given(st.floats(0, math.pi / 2))
def test_spin_fugacity_relation(gamma):
    s = spin_value("dense", gamma)
    assert abs(2 * math.sin(math.pi * s / 2) - 2 * math.cos(gamma)) < 1e-12
