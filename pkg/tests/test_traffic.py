import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import prob_vectors
from oracles import brute_selection
from dtaoi.traffic import Discipline, Scenario, cross_traffic_coeffs, selection_probabilities


def test_tau_examples():
    np.testing.assert_array_equal(cross_traffic_coeffs([0.4], 1), [1.0])
    np.testing.assert_allclose(cross_traffic_coeffs([0.9, 0.3], 1), [0.7, 0.3])
    np.testing.assert_allclose(cross_traffic_coeffs([0.2, 0.5, 0.5], 1), [0.25, 0.5, 0.25])


def test_gamma_examples():
    g = selection_probabilities([0.5], 1)
    assert (g.gamma0, g.gamma1, g.gamma2) == (0.5, 0.5, 0.0)
    g = selection_probabilities([0.5, 0.5], 1)
    assert g.gamma0 == 0.25
    assert g.gamma1 == pytest.approx(0.375, abs=1e-15)
    assert g.gamma2 == pytest.approx(0.375, abs=1e-15)
    g = selection_probabilities([0.2, 0.5, 0.5], 1)
    assert g.gamma1 == pytest.approx(0.2 * (0.25 + 0.25 + 0.25 / 3), abs=1e-15)


def test_tagged_range():
    with pytest.raises(ValueError, match="tagged_source out of range"):
        selection_probabilities([0.5, 0.5], 3)


class TestScenario:
    def test_parse_and_retag(self):
        sc = Scenario((0.1, 0.2, 0.3), 0.5, "PB", 2)
        assert sc.discipline is Discipline.PB
        assert sc.tagged_first() == (0.2, 0.1, 0.3)
        assert sc.retag(3).tagged_first() == (0.3, 0.1, 0.2)
        assert sc.load == pytest.approx(1.2)

    @pytest.mark.parametrize("kw", [
        dict(p=(0.5,), q=0.0),
        dict(p=(1.5,), q=0.5),
        dict(p=(0.5, 0.5), q=0.5, tagged_source=0),
        dict(p=(0.0, 0.5), q=0.5),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            Scenario(**kw)

    def test_unknown_discipline(self):
        with pytest.raises(ValueError, match="unknown discipline"):
            Discipline.parse("fcfs")


@settings(max_examples=300)
@given(prob_vectors(1, 6, lo=0.0), st.data())
def test_gammas_sum_and_match_enumeration(p, data):
    tagged = data.draw(st.integers(1, len(p)))
    g = selection_probabilities(p, tagged)
    assert abs(g.gamma0 + g.gamma1 + g.gamma2 - 1.0) <= 1e-14
    ref = brute_selection(p, tagged)
    np.testing.assert_allclose((g.gamma0, g.gamma1, g.gamma2), ref, atol=1e-13)
    assert min(g.gamma0, g.gamma1, g.gamma2) >= 0


@settings(max_examples=200)
@given(prob_vectors(2, 6, lo=0.0), st.randoms(use_true_random=False))
def test_exchangeable(p, rnd):
    others = list(p[1:])
    rnd.shuffle(others)
    a = selection_probabilities(p, 1)
    b = selection_probabilities((p[0], *others), 1)
    np.testing.assert_allclose((a.gamma1, a.gamma2), (b.gamma1, b.gamma2), atol=1e-15)


@settings(max_examples=200)
@given(st.integers(1, 8), st.floats(0.0, 1.0))
def test_symmetric_sources(n, pn):
    g = selection_probabilities([pn] * n, 1)
    assert g.gamma1 == pytest.approx((1 - g.gamma0) / n, abs=1e-14)


@settings(max_examples=200)
@given(prob_vectors(1, 6, lo=0.0), st.data())
def test_saturation(p, data):
    i = data.draw(st.integers(0, len(p) - 1))
    p = list(p)
    p[i] = 1.0
    assert selection_probabilities(p, 1).gamma0 == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_monte_carlo(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(1, 6))
    p = rng.uniform(0.05, 0.95, n)
    slots = 10**6
    arrived = rng.random((slots, n)) < p
    k = arrived.sum(axis=1)
    u = rng.random(slots)
    # position of the chosen arrival among the slot's arrivals
    rank = np.floor(u * k)
    pos_tag = np.cumsum(arrived, axis=1)[:, 0] - 1
    tag_chosen = arrived[:, 0] & (rank == pos_tag)
    est = np.array([np.mean(k == 0), np.mean(tag_chosen), 0.0])
    est[2] = 1.0 - est[0] - est[1]
    g = selection_probabilities(p, 1)
    exact = np.array([g.gamma0, g.gamma1, g.gamma2])
    se = np.sqrt(exact * (1 - exact) / slots) + 1e-12
    assert np.all(np.abs(est - exact) <= 3 * se + 1e-9), (p, est, exact)
