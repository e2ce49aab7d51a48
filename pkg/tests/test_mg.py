import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import phase_type
from dtaoi.errors import DistributionError, IterationCapError
from dtaoi.mg import MatGeom

GEO = MatGeom.geometric(0.5)


class TestExamples:
    def test_pmf(self):
        assert GEO.pmf_at(1) == 0.5
        assert GEO.pmf_at(0) == 0.0
        assert GEO.pmf_at(3) == pytest.approx(0.125, abs=1e-15)
        assert GEO.pmf_at(-1) == 0.0

    def test_cdf(self):
        assert GEO.cdf_at(2) == pytest.approx(0.75, abs=1e-15)
        assert GEO.cdf_at(0) == 0.0
        assert GEO.cdf_at(10**4) == pytest.approx(1.0, abs=1e-9)

    def test_pgf(self):
        assert GEO.pgf_at(1.0) == pytest.approx(1.0, abs=1e-15)
        assert GEO.pgf_at(0.5) == pytest.approx(1 / 3, abs=1e-15)
        pm = MatGeom.point_mass_zero(3)
        for z in (0.0, 0.3, 1.0):
            assert pm.pgf_at(z) == 1.0

    def test_factorial_moments(self):
        assert GEO.factorial_moment(1) == pytest.approx(2.0, rel=1e-14)
        assert GEO.factorial_moment(2) == pytest.approx(4.0, rel=1e-14)
        assert GEO.var() == pytest.approx(2.0, rel=1e-14)
        assert MatGeom.point_mass_zero().factorial_moment(1) == 0.0
        with pytest.raises(ValueError):
            GEO.factorial_moment(0)

    def test_truncate(self):
        np.testing.assert_allclose(GEO.truncate_pmf(0.3), [0.0, 0.5, 0.25], atol=1e-15)
        np.testing.assert_array_equal(MatGeom.point_mass_zero().truncate_pmf(1e-3), [1.0])
        assert len(GEO.truncate_pmf(1e-9)) == 31

    def test_truncate_cap(self):
        slow = MatGeom.geometric(1e-4)
        with pytest.raises(IterationCapError):
            slow.truncate_pmf(1e-9, max_len=100)

    def test_tail(self):
        assert GEO.tail_at(3) == pytest.approx(0.125, rel=1e-14)
        assert GEO.tail_at(-1) == 1.0


class TestValidation:
    def test_bad_mass(self):
        with pytest.raises(DistributionError, match="total mass"):
            MatGeom(c=[0.4], A=[[0.5]], b=[1.0], d=0.0)

    def test_radius(self):
        with pytest.raises(DistributionError, match="spectral radius"):
            MatGeom(c=[0.0], A=[[1.0]], b=[0.0], d=1.0)

    def test_bad_d(self):
        with pytest.raises(DistributionError):
            MatGeom(c=[0.0], A=[[0.0]], b=[1.0], d=1.5)

    def test_non_square(self):
        with pytest.raises(DistributionError, match="square"):
            MatGeom(c=[1, 0], A=np.zeros((2, 3)), b=[1, 1], d=0)

    def test_negative_pmf_is_error(self):
        # mass 1 but pmf(2) = -0.1
        mg = MatGeom(c=[1.0, 1.0], A=[[0.5, 0.0], [0.0, 0.0]], b=[-0.2, 1.4], d=0.0)
        assert mg.total_mass() == pytest.approx(1.0)
        with pytest.raises(DistributionError, match="negative pmf"):
            mg.pmf_at(2)

    def test_immutable(self):
        with pytest.raises(ValueError):
            GEO.A[0, 0] = 0.1


@settings(max_examples=250)
@given(phase_type())
def test_normalization(mg):
    assert abs(mg.total_mass() - 1.0) <= 1e-9
    pmf = mg.truncate_pmf(1e-12)
    assert abs(pmf.sum() - 1.0) <= 1e-9


@settings(max_examples=250)
@given(phase_type())
def test_moment_pmf_consistency(mg):
    pmf = mg.truncate_pmf(1e-13)
    ell = np.arange(len(pmf))
    # tail beyond the truncation adds at most eps * (L + mean_tail)
    assert mg.mean() == pytest.approx(float(ell @ pmf), rel=1e-8, abs=1e-9)
    fm2 = float((ell * (ell - 1)) @ pmf)
    assert mg.factorial_moment(2) == pytest.approx(fm2, rel=1e-7, abs=1e-8)


@settings(max_examples=250)
@given(phase_type(), st.integers(0, 60))
def test_cdf_monotone_and_consistent(mg, n):
    cdf = np.array([mg.cdf_at(ell) for ell in range(n + 1)])
    assert np.all(np.diff(cdf) >= -1e-15)
    assert np.all((cdf >= 0) & (cdf <= 1))
    partial = np.cumsum([mg.pmf_at(ell) for ell in range(n + 1)])
    np.testing.assert_allclose(cdf, partial, atol=1e-12)
    assert mg.tail_at(n) == pytest.approx(1.0 - cdf[-1], abs=1e-12)


@settings(max_examples=250)
@given(phase_type(max_row=0.9))
def test_pgf_derivative_matches_mean(mg):
    h = 1e-6
    slope = (mg.pgf_at(1.0) - mg.pgf_at(1.0 - h)) / h
    assert slope == pytest.approx(mg.mean(), abs=1e-4, rel=1e-4)


@settings(max_examples=200)
@given(phase_type(), st.floats(0.0, 1.0))
def test_pgf_matches_series(mg, z):
    pmf = mg.truncate_pmf(1e-14)
    series = float(np.polyval(pmf[::-1], z))
    assert mg.pgf_at(z) == pytest.approx(series, abs=1e-11)
