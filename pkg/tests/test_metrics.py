"""Metric battery: hand-computed fixtures, oracle equivalences, invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordinal_tir import (
    EmbeddingConfig,
    compute_metrics,
    des,
    dip,
    extract_all_patterns,
    m2_closed_forms,
    p_tas,
    p_tir,
    permutation_entropy,
    ys_divergence,
)
from ordinal_tir.patterns import PatternDistribution

FIXTURE = [1.0, 2.0, 2.0, 1.0, 0.0]  # 4 windows at m=2: up, equal, down, down

GS2 = EmbeddingConfig(m=2, tau=1, equal_rule="group_smallest")
OCC2 = EmbeddingConfig(m=2, tau=1, equal_rule="occurrence")


def dist(counts, total, config=GS2):
    return PatternDistribution(counts, total, config)


# ---------------------------------------------------------------------------
# ys_divergence
# ---------------------------------------------------------------------------


def test_ys_equal_probabilities():
    assert ys_divergence(0.5, 0.5) == 0.0
    assert ys_divergence(0.0, 0.0) == 0.0


def test_ys_against_forbidden():
    for p in (0.1, 0.5, 1.0):
        assert ys_divergence(p, 0.0) == p
        assert ys_divergence(0.0, p) == p


def test_ys_arithmetic():
    assert abs(ys_divergence(0.5, 0.25) - 1.0 / 6.0) < 1e-15


def test_ys_symmetry_and_bounds():
    rng = np.random.default_rng(1)
    for _ in range(500):
        a, b = rng.uniform(0, 1, 2)
        d = ys_divergence(a, b)
        assert d == ys_divergence(b, a)
        assert 0.0 <= d <= max(a, b)


def test_ys_domain():
    with pytest.raises(ValueError):
        ys_divergence(1.5, 0.0)
    with pytest.raises(ValueError):
        ys_divergence(0.5, -0.1)


# ---------------------------------------------------------------------------
# fixture series (hand counts)
# ---------------------------------------------------------------------------


def test_fixture_group_rule_estimators():
    # group rule: up 1/4, down 2/4, equal 1/4
    assert abs(p_tir(FIXTURE, GS2) - 1.0 / 6.0) < 1e-15
    assert abs(p_tas(FIXTURE, GS2) - 1.0 / 6.0) < 1e-15


def test_fixture_occurrence_rule_estimators():
    # occurrence: forward up' 1/2, down 1/2; backward up' 3/4, down 1/4
    expected_noe_tir = 0.5 * (0.15 + 1.0 / 6.0)
    assert abs(p_tir(FIXTURE, OCC2) - expected_noe_tir) < 1e-15
    assert p_tas(FIXTURE, OCC2) == 0.0


def test_alternating_series_is_symmetric():
    x = [1.0, 2.0] * 20
    assert p_tas(x[:-1], GS2) == 0.0
    assert p_tir(x[:-1], GS2) == 0.0


def test_constant_series():
    c = [3.0] * 50
    assert p_tir(c, GS2) == 0.0
    assert p_tas(c, GS2) == 0.0
    assert p_tas(c, OCC2) == 1.0  # all-equal turns into pure "false up"
    assert p_tir(c, OCC2) == 0.0


def test_estimators_require_amp():
    with pytest.raises(ValueError):
        p_tir(FIXTURE, EmbeddingConfig(m=2, tau=1, kind="orp"))
    with pytest.raises(ValueError):
        p_tas(FIXTURE, EmbeddingConfig(m=2, tau=1, kind="orp"))


# ---------------------------------------------------------------------------
# m = 2 closed forms
# ---------------------------------------------------------------------------


def test_m2_closed_forms_uniform():
    cf = m2_closed_forms(1 / 3, 1 / 3, 1 / 3)
    assert cf["pTIR"] == 0.0
    assert cf["pTAS"] == 0.0
    assert abs(cf["noeTAS"] - 2.0 / 9.0) < 1e-15


def test_m2_closed_forms_no_equals_coincide():
    rng = np.random.default_rng(2)
    for _ in range(100):
        u = rng.uniform(0, 1)
        cf = m2_closed_forms(u, 1.0 - u, 0.0)
        assert cf["pTIR"] == cf["noeTIR"] == cf["pTAS"] == cf["noeTAS"]


def test_m2_closed_forms_all_equal():
    cf = m2_closed_forms(0.0, 0.0, 1.0)
    assert cf["pTAS"] == 0.0
    assert cf["pTIR"] == 0.0
    assert cf["noeTAS"] == 1.0
    assert cf["noeTIR"] == 0.0


def test_m2_closed_forms_validation():
    with pytest.raises(ValueError):
        m2_closed_forms(0.5, 0.6, 0.2)
    with pytest.raises(ValueError):
        m2_closed_forms(-0.1, 0.6, 0.5)


def test_general_estimators_match_closed_forms():
    rng = np.random.default_rng(3)
    for _ in range(200):
        x = rng.integers(0, 4, size=rng.integers(20, 200)).astype(float)
        probs = extract_all_patterns(x, GS2).probabilities()
        u = probs.get((1, 2), 0.0)
        d = probs.get((2, 1), 0.0)
        e = probs.get((1, 1), 0.0)
        cf = m2_closed_forms(u, d, e)
        assert abs(p_tir(x, GS2) - cf["pTIR"]) <= 1e-12
        assert abs(p_tas(x, GS2) - cf["pTAS"]) <= 1e-12
        assert abs(p_tir(x, OCC2) - cf["noeTIR"]) <= 1e-12
        assert abs(p_tas(x, OCC2) - cf["noeTAS"]) <= 1e-12


# ---------------------------------------------------------------------------
# permutation entropy
# ---------------------------------------------------------------------------


def test_pen_single_pattern():
    assert permutation_entropy(dist({(1, 2): 9}, 9)) == 0.0


def test_pen_uniform_is_log_k():
    assert abs(permutation_entropy(dist({(1, 2): 5, (2, 1): 5}, 10)) - math.log(2)) < 1e-15
    d3 = dist({(1, 2): 4, (2, 1): 4, (1, 1): 4}, 12)
    assert abs(permutation_entropy(d3) - math.log(3)) < 1e-15


def test_pen_three_counts():
    d = dist({(1, 2): 1, (2, 1): 1, (1, 1): 1}, 3)
    assert abs(permutation_entropy(d) - math.log(3)) < 1e-12


def test_pen_uniform_is_maximal():
    rng = np.random.default_rng(4)
    uniform = dist({(1, 2): 10, (2, 1): 10, (1, 1): 10}, 30)
    h_max = permutation_entropy(uniform)
    for _ in range(50):
        counts = rng.multinomial(30, [0.5, 0.3, 0.2])
        if 0 in counts:
            continue
        d = dist({(1, 2): int(counts[0]), (2, 1): int(counts[1]), (1, 1): int(counts[2])}, 30)
        assert permutation_entropy(d) <= h_max + 1e-12


# ---------------------------------------------------------------------------
# DES
# ---------------------------------------------------------------------------


def test_des_constant():
    assert des([5.0] * 10, 1) == 1.0


def test_des_strictly_monotone():
    assert des(list(range(10)), 1) == 0.0


def test_des_hand_count():
    assert des([1, 1, 2, 2, 3], 1) == 0.5


def test_des_threshold():
    x = [0.0, 0.4, 1.0, 1.3]
    assert des(x, 1, threshold=0.5) == 2.0 / 3.0


def test_des_lag():
    assert des([1, 2, 1, 2, 1], 2) == 1.0


def test_des_errors():
    with pytest.raises(ValueError):
        des([1.0, 2.0], 2)
    with pytest.raises(ValueError):
        des([1.0, 2.0, 3.0], 1, threshold=-0.5)
    with pytest.raises(ValueError):
        des([1.0, 2.0, 3.0], 0)


# ---------------------------------------------------------------------------
# DIP
# ---------------------------------------------------------------------------


def test_dip_all_reverses_present():
    assert dip(dist({(1, 2): 5, (2, 1): 5}, 10)) == 0.0


def test_dip_all_individual():
    cfg3 = EmbeddingConfig(m=3, tau=1)
    d = dist({(1, 2, 3): 5, (2, 1, 3): 5}, 10, cfg3)
    assert dip(d) == 1.0
    assert dip(d, mode="distinct") == 1.0


def test_dip_self_symmetric_not_individual():
    cfg3 = EmbeddingConfig(m=3, tau=1)
    d = dist({(1, 3, 1): 4, (1, 2, 3): 4, (3, 2, 1): 2}, 10, cfg3)
    assert dip(d) == 0.0


def test_dip_modes_differ():
    cfg3 = EmbeddingConfig(m=3, tau=1)
    d = dist({(1, 2, 3): 8, (3, 2, 1): 1, (1, 3, 2): 1}, 10, cfg3)
    # (1,3,2)'s reverse (2,3,1) is forbidden -> individual
    assert dip(d) == 0.1
    assert dip(d, mode="distinct") == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        dip(d, mode="bogus")


# ---------------------------------------------------------------------------
# compute_metrics
# ---------------------------------------------------------------------------


def test_compute_metrics_constant_series():
    rec = compute_metrics([2.0] * 40, GS2)
    assert rec.p_tir == 0.0
    assert rec.p_tas == 0.0
    assert rec.noe_tas == 1.0
    assert rec.noe_tir == 0.0
    assert rec.des == 1.0
    assert rec.pen == 0.0
    assert rec.dip == 0.0
    assert rec.n_windows == 39


def test_compute_metrics_matches_components():
    rng = np.random.default_rng(8)
    x = rng.integers(0, 5, size=300).astype(float)
    for m in (2, 3):
        for tau in (1, 2):
            c = EmbeddingConfig(m=m, tau=tau)
            occ = EmbeddingConfig(m=m, tau=tau, equal_rule="occurrence")
            rec = compute_metrics(x, c)
            assert rec.p_tir == pytest.approx(p_tir(x, c), abs=1e-15)
            assert rec.p_tas == pytest.approx(p_tas(x, c), abs=1e-15)
            assert rec.noe_tir == pytest.approx(p_tir(x, occ), abs=1e-15)
            assert rec.noe_tas == pytest.approx(p_tas(x, occ), abs=1e-15)
            assert rec.pen == pytest.approx(permutation_entropy(extract_all_patterns(x, c)), abs=1e-15)
            assert rec.des == des(x, tau)
            assert rec.n_windows == 300 - (m - 1) * tau


def test_compute_metrics_occurrence_config():
    x = np.random.default_rng(10).integers(0, 3, size=200).astype(float)
    rec = compute_metrics(x, OCC2)
    assert rec.p_tir == rec.noe_tir
    assert rec.p_tas == rec.noe_tas


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


@given(st.lists(st.integers(0, 4), min_size=30, max_size=120), st.integers(2, 4))
@settings(max_examples=150, deadline=None)
def test_ptir_equals_ptas_under_group_rule(values, m):
    x = [float(v) for v in values]
    c = EmbeddingConfig(m=m, tau=1, equal_rule="group_smallest")
    assert abs(p_tir(x, c) - p_tas(x, c)) <= 1e-12


def test_tie_free_series_all_estimators_coincide():
    rng = np.random.default_rng(12)
    x = rng.standard_normal(400)
    for m in (2, 3):
        c = EmbeddingConfig(m=m, tau=1)
        occ = EmbeddingConfig(m=m, tau=1, equal_rule="occurrence")
        vals = [p_tir(x, c), p_tas(x, c), p_tir(x, occ), p_tas(x, occ)]
        assert max(vals) - min(vals) <= 1e-12


def test_time_reversal_symmetry_of_estimators():
    rng = np.random.default_rng(13)
    x = rng.integers(0, 4, size=300).astype(float)
    for c in (GS2, EmbeddingConfig(m=3, tau=2)):
        assert p_tir(x, c) == pytest.approx(p_tir(x[::-1], c), abs=1e-12)
        assert p_tas(x, c) == pytest.approx(p_tas(x[::-1], c), abs=1e-12)


def test_ordinal_invariance_of_estimators():
    rng = np.random.default_rng(14)
    x = rng.integers(0, 6, size=400).astype(float)
    y = np.exp(x / 3.0)  # strictly increasing map, exact on this value set
    c = EmbeddingConfig(m=3, tau=1)
    assert p_tir(x, c) == pytest.approx(p_tir(y, c), abs=1e-12)
    assert p_tas(x, c) == pytest.approx(p_tas(y, c), abs=1e-12)
    rec_x = compute_metrics(x, c)
    rec_y = compute_metrics(y, c)
    assert rec_x.pen == pytest.approx(rec_y.pen, abs=1e-12)
    assert rec_x.dip == pytest.approx(rec_y.dip, abs=1e-12)
    assert rec_x.des == rec_y.des  # threshold 0 tracks exact ties only


def test_order_direction_invariance_under_group_rule():
    rng = np.random.default_rng(15)
    x = rng.integers(0, 4, size=300).astype(float)
    for m in (2, 3, 4):
        asc = EmbeddingConfig(m=m, tau=1, order="ascending")
        desc = EmbeddingConfig(m=m, tau=1, order="descending")
        assert p_tir(x, asc) == pytest.approx(p_tir(x, desc), abs=1e-12)
        assert p_tas(x, asc) == pytest.approx(p_tas(x, desc), abs=1e-12)
        pen_a = permutation_entropy(extract_all_patterns(x, asc))
        pen_d = permutation_entropy(extract_all_patterns(x, desc))
        assert pen_a == pytest.approx(pen_d, abs=1e-12)


def test_noe_tas_differs_between_orders_on_tied_series():
    # ascending treats equals as up, descending as down; on an asymmetric
    # tied series the two disagree
    x = [1.0, 2.0, 2.0, 1.0, 0.0, 0.0, 0.0]
    asc = EmbeddingConfig(m=2, tau=1, equal_rule="occurrence", order="ascending")
    desc = EmbeddingConfig(m=2, tau=1, equal_rule="occurrence", order="descending")
    assert p_tas(x, asc) != p_tas(x, desc)


def test_estimator_bounds_random_series():
    rng = np.random.default_rng(16)
    for _ in range(60):
        x = rng.integers(0, 3, size=rng.integers(30, 200)).astype(float)
        m = int(rng.integers(2, 5))
        rec = compute_metrics(x, EmbeddingConfig(m=m, tau=1))
        for v in (rec.p_tir, rec.p_tas, rec.noe_tir, rec.noe_tas, rec.des, rec.dip):
            assert 0.0 <= v <= 1.0
        assert rec.pen >= 0.0


def test_pen_zero_iff_single_pattern():
    assert permutation_entropy(dist({(1, 2): 7}, 7)) == 0.0
    assert permutation_entropy(dist({(1, 2): 6, (2, 1): 1}, 7)) > 0.0
