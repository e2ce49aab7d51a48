import numpy as np
import pytest

from dtaoi import Scenario, analyze
from dtaoi.optimizer import (
    EmptyGridError,
    MeanAgeGrid,
    SearchSpec,
    argmin_cost,
    cost,
    evaluate_grid,
    grid_search,
    grid_values,
)
from dtaoi.traffic import Discipline


class TestCost:
    def test_alpha_zero(self):
        assert cost(0.3, 0.2, 0.5, 0.0, "npb") == analyze(Scenario((0.3, 0.2), 0.5)).mean_aoi

    def test_symmetric(self):
        one = analyze(Scenario((0.4, 0.4), 0.3, "pb")).mean_aoi
        assert cost(0.4, 0.4, 0.3, 1.0, "pb") == pytest.approx(2 * one, rel=1e-13)

    def test_saturated_pb(self):
        assert cost(1.0, 1.0, 0.1, 1.0, "pb") == pytest.approx(40.0, abs=0.05)

    def test_undefined(self):
        with pytest.raises(ValueError, match="p2 = 0"):
            cost(0.5, 0.0, 0.5, 0.5, "npb")
        assert cost(0.5, 0.0, 0.5, 0.0, "npb") > 0


class TestSpec:
    def test_defaults(self):
        assert SearchSpec(q=0.1).grid_step == 0.01
        s = SearchSpec(q=0.1, beta=0.1)
        assert s.grid_step == 0.001 and s.p_min == 0.001 and s.decimals == 3

    def test_empty_grid(self):
        with pytest.raises(EmptyGridError):
            SearchSpec(q=0.1, beta=0.001, grid_step=0.001)

    @pytest.mark.parametrize("kw", [
        dict(q=0.0), dict(q=0.5, alpha=1.5), dict(q=0.5, grid_step=-0.1),
        dict(q=0.5, grid_step=0.1, p_min=0.05), dict(q=0.5, beta=2.5),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            SearchSpec(**kw)


def test_grid_values():
    v = grid_values(0.01, 0.01)
    assert len(v) == 100 and v[0] == 0.01 and v[-1] == 1.0
    assert len(grid_values(0.001, 0.001)) == 1000


@pytest.mark.parametrize("disc", list(Discipline))
def test_transposed_mean_is_source_two(disc):
    g = evaluate_grid(0.3, disc, 0.25)
    for i, j in [(0, 1), (2, 3), (1, 1)]:
        direct = analyze(Scenario((g.values[i], g.values[j]), 0.3, disc, 2)).mean_aoi
        assert g.mean2[i, j] == pytest.approx(direct, rel=1e-12)


def test_constraint_mask():
    g = evaluate_grid(0.2, "npb", 0.1, beta=0.5)
    feas = g.feasible()
    pv = g.values[:, None] + g.values[None, :]
    np.testing.assert_array_equal(feas, pv <= 0.5 + 1e-12)


def test_tie_breaking_prefers_larger_p():
    vals = np.array([0.5, 1.0])
    grid = MeanAgeGrid(values=vals, mean1=np.ones((2, 2)), q=0.5,
                       discipline=Discipline.NPB, beta=None, step=0.5)
    res = argmin_cost(grid, 1.0, SearchSpec(q=0.5, grid_step=0.5))
    assert (res.p1, res.p2) == (1.0, 1.0)
    m = np.ones((2, 2))
    m[1, 1] = 2.0
    grid.mean1 = m
    res = argmin_cost(grid, 0.0, SearchSpec(q=0.5, grid_step=0.5))
    assert (res.p1, res.p2) == (1.0, 0.5)


@pytest.mark.parametrize("disc", list(Discipline))
def test_cost_monotone_in_alpha(disc):
    spec0 = SearchSpec(q=0.2, discipline=disc, grid_step=0.05)
    g = evaluate_grid(0.2, disc, 0.05)
    costs = [grid_search(SearchSpec(q=0.2, alpha=a / 10, discipline=disc, grid_step=0.05), g).cost
             for a in range(1, 11)]
    assert np.all(np.diff(costs) >= -1e-12)
    assert spec0.decimals == 2


def test_npb_npsbr_agree_at_saturation():
    out = {}
    for disc in ("npb", "npsbr"):
        out[disc] = grid_search(SearchSpec(q=0.25, alpha=0.5, discipline=disc, grid_step=0.05))
    a, b = out["npb"], out["npsbr"]
    assert a.p1 == 1.0
    assert (a.p1, a.p2) == (b.p1, b.p2)
    assert a.cost == pytest.approx(b.cost, abs=1e-6)


def test_summary_format():
    res = grid_search(SearchSpec(q=0.25, alpha=1.0, discipline="pb", grid_step=0.25))
    assert res.summary() == "p1*=1.00 p2*=1.00 C*=16.0"
    assert res.table.shape == (16, 5)
