import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parafermions.enumeration import (
    EnumerationCapError,
    build_network,
    default_origin,
    enumerate_configurations,
    holo_residual_report,
    interior_origin,
    observable,
    pairwise_cancellation_check,
    partition_function,
)
from parafermions.geometry import build_domain
from parafermions.models import (
    ModelId,
    WeightSet,
    c2_integrable_weights,
    dense_weights,
    on_integrable_weights,
    spin_value,
)


def dense_point(gamma: float, alpha: float) -> tuple[WeightSet, float]:
    s = spin_value("dense", gamma)
    u = gamma - math.pi / 2 + (s + 1) * alpha / 2
    return dense_weights(gamma, u), s


def dilute_point(eta: float, alpha: float) -> tuple[WeightSet, float]:
    s = spin_value("dilute", eta)
    return on_integrable_weights(eta, (s + 1) * alpha), s


def c2_point(eta: float, alpha: float) -> tuple[WeightSet, float]:
    s = spin_value("c2", eta)
    return c2_integrable_weights(eta, (2 * s + 1) * alpha), s


@pytest.mark.parametrize("shape", [(1, 1), (1, 2), (2, 2), (2, 3)])
def test_dense_configuration_count(shape):
    d = build_domain(*shape, 1.0)
    net = build_network(d, "dense")
    w = WeightSet(ModelId.DENSE, {"a": 1.0, "b": 1.0}, 1.0)
    configs = list(enumerate_configurations(net, w.weights, w.fugacity))
    assert len(configs) == 2 ** (shape[0] * shape[1])
    assert partition_function(d, w) == 2 ** (shape[0] * shape[1])


def test_dense_1x1_partition_function():
    d = build_domain(1, 1, 1.0)
    a, b, sq = 0.3, 0.8, 1.7
    assert partition_function(d, WeightSet(ModelId.DENSE, {"a": a, "b": b}, sq)) == pytest.approx(a * sq**2 + b * sq)


def test_dilute_1x1_hand_count():
    d = build_domain(1, 1, 1.0)
    rng = np.random.default_rng(3)
    vec = rng.normal(size=6)
    n = 0.6
    w = WeightSet.from_vector(ModelId.DILUTE, vec, n)
    t, u1, u2, v, w1, w2 = vec
    assert partition_function(d, w) == pytest.approx(t + 2 * u1 * n + w1 * n**2 + w2 * n)


def test_enumeration_cap():
    d = build_domain(3, 3, 1.0)
    with pytest.raises(EnumerationCapError):
        partition_function(d, on_integrable_weights(0.5, 0.3), cap=1000)


def test_empty_boundary_is_dilute_only():
    with pytest.raises(ValueError):
        build_network(build_domain(1, 1, 1.0), "dense", "empty")


@pytest.mark.parametrize(
    "model, shape, alpha, coupling",
    [
        ("dense", (2, 2), 1.0, 0.7),
        ("dense", (2, 3), 0.6, 0.3),
        ("dense", (3, 2), 2.0, 1.2),
        ("dilute", (2, 2), 1.1, 0.9),
        ("dilute", (2, 2), 0.7, -0.9),
        ("dilute", (2, 3), 1.3, 2.0),
        ("c2", (2, 2), 1.1, 0.8),
        ("c2", (2, 2), 2.2, 2.5),
    ],
)
def test_integrable_points_are_holomorphic(model, shape, alpha, coupling):
    point = {"dense": dense_point, "dilute": dilute_point, "c2": c2_point}[model]
    w, s = point(coupling, alpha)
    d = build_domain(*shape, alpha)
    field = observable(d, w, s)
    report = holo_residual_report(field, d)
    scale = max(abs(v) for v in field.values.values())
    assert report.interior_max < 1e-12 * max(1.0, scale)
    assert field.multi_visits == 0


def test_perturbed_weights_break_holomorphicity():
    w, s = dilute_point(0.9, 1.1)
    d = build_domain(2, 2, 1.1)
    bad = WeightSet.from_vector(ModelId.DILUTE, w.vector() * (1 + 0.01 * np.arange(1, 7) / 6), w.fugacity)
    assert holo_residual_report(observable(d, bad, s), d).interior_max > 1e-4


def test_wrong_spin_breaks_holomorphicity():
    w, s = dense_point(0.7, 1.0)
    d = build_domain(2, 2, 1.0)
    assert holo_residual_report(observable(d, w, s + 0.1), d).interior_max > 1e-4


def test_printed_on_weights_are_not_holomorphic():
    eta, alpha = 0.9, 1.1
    s = spin_value("dilute", eta)
    d = build_domain(2, 2, alpha)
    w = on_integrable_weights(eta, (s + 1) * alpha, printed=True)
    assert holo_residual_report(observable(d, w, s), d).interior_max > 1e-2


def test_printed_c2_weights_are_not_holomorphic():
    eta, alpha = 0.8, 1.1
    s = spin_value("c2", eta)
    d = build_domain(2, 2, alpha)
    w = c2_integrable_weights(eta, (2 * s + 1) * alpha, printed=True)
    assert holo_residual_report(observable(d, w, s), d).interior_max > 1e-2


@given(st.floats(0.1, 1.4), st.floats(0.3, 2.8), st.floats(0.1, 10))
@settings(max_examples=15, deadline=None)
def test_observable_is_invariant_under_weight_scaling(gamma, alpha, k):
    w, s = dense_point(gamma, alpha)
    if min(abs(w["a"]), abs(w["b"])) < 1e-3:
        return
    d = build_domain(2, 2, alpha)
    F, G = observable(d, w, s), observable(d, w.scaled(k), s)
    for e in F:
        assert abs(F[e] - G[e]) < 1e-12 * max(1.0, abs(F[e]))


def test_observable_is_one_at_the_origin_for_dense():
    w, s = dense_point(0.7, 1.0)
    d = build_domain(2, 3, 1.0)
    F = observable(d, w, s)
    assert F[F.origin.edge] == pytest.approx(1.0)


def test_interior_origin_holomorphic_only_at_half_spin():
    alpha = 1.0
    d = build_domain(3, 2, alpha)
    origin = interior_origin(d, "dense")
    w, s = dense_point(math.pi / 4, alpha)  # s = 1/2
    assert s == pytest.approx(0.5)
    assert holo_residual_report(observable(d, w, s, origin), d).interior_max < 1e-12
    w, s = dense_point(0.7, alpha)
    assert holo_residual_report(observable(d, w, s, origin), d).interior_max > 1e-6


def test_u_sign_flip_changes_sign_on_crossed_edge_families():
    w, s = dilute_point(0.9, 1.1)
    d = build_domain(2, 2, 1.1)
    flipped = WeightSet.from_vector(ModelId.DILUTE, w.vector() * np.array([1, -1, -1, 1, 1, 1]), w.fugacity)
    F, G = observable(d, w, s), observable(d, flipped, s)
    assert F.partition == pytest.approx(G.partition)
    origin_dir = d.edge_vector(F.origin.edge)
    for e in F:
        parallel = abs((d.edge_vector(e) / origin_dir).imag) < 1e-9
        expected = F[e] if parallel else -F[e]
        assert G[e] == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("gamma, alpha", [(0.7, 1.0), (0.3, 2.1), (1.2, 0.5)])
def test_pairwise_cancellation(gamma, alpha):
    w, s = dense_point(gamma, alpha)
    d = build_domain(2, 2, alpha)
    origin_edge = default_origin(d, "dense").edge
    checked = 0
    for p, edges in enumerate(d.plaquettes):
        if origin_edge in edges:
            continue
        res = pairwise_cancellation_check(d, p, w, s)
        assert res.pairs == res.case1 + res.case2 > 0
        assert res.ratio_max_error < 1e-13
        assert res.cancellation_max < 1e-13
        checked += 1
    assert checked == 3


def test_pairwise_rejects_origin_plaquette_and_other_models():
    w, s = dense_point(0.7, 1.0)
    d = build_domain(2, 2, 1.0)
    with pytest.raises(ValueError):
        pairwise_cancellation_check(d, 0, w, s)
    with pytest.raises(ValueError):
        pairwise_cancellation_check(d, 1, on_integrable_weights(0.5, 0.3), s)
