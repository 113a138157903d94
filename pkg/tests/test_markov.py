import numpy as np
import pytest
from scipy.integrate import quad

from extl import match_markov, sir_cdf, sir_mean, sir_pgf


class TestSirCdf:
    def test_zero_at_origin(self):
        assert sir_cdf(0.66, -0.0683, 0.0) == 0.0

    def test_limit_one(self):
        assert sir_cdf(0.66, -0.0683, 1e4) >= 1.0 - 1e-6

    def test_reference_value(self):
        # direct 30-digit evaluation of the displayed formula
        assert sir_cdf(0.66, -0.0683, 10.0) == pytest.approx(0.7423868215273117, abs=1e-12)

    def test_monotone_in_unit_interval(self):
        ts = np.linspace(0.0, 500.0, 2001)
        vals = sir_cdf(0.66, -0.0683, ts)
        assert np.all(np.diff(vals) >= -1e-15)  # nondecreasing up to rounding
        assert vals.min() >= 0.0 and vals.max() <= 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            sir_cdf(1.2, -0.1, 1.0)
        with pytest.raises(ValueError):
            sir_cdf(0.66, 0.1, 1.0)
        with pytest.raises(ValueError):
            sir_cdf(0.66, -0.1, -1.0)


class TestSirPgf:
    def test_normalization(self):
        for t in (0.0, 1.0, 10.0, 100.0):
            assert sir_pgf(0.13, 0.2, 1.0, t) == pytest.approx(1.0, rel=1e-14)

    def test_zero_argument_is_cdf(self):
        lam, mu = match_markov(0.66, -0.0683)
        ts = np.linspace(0.0, 200.0, 101)
        np.testing.assert_allclose(
            sir_pgf(lam, mu, 0.0, ts), sir_cdf(0.66, -0.0683, ts), rtol=1e-13
        )

    def test_time_zero_identity(self):
        for s in (0.0, 0.3, 0.99):
            assert sir_pgf(0.13, 0.2, s, 0.0) == pytest.approx(s, abs=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            sir_pgf(0.3, 0.2, 0.5, 1.0)
        with pytest.raises(ValueError):
            sir_pgf(0.13, 0.2, 1.5, 1.0)


class TestSirMean:
    def test_reference_values(self):
        assert sir_mean(0.66, -0.0683) == pytest.approx(8.1369, abs=1e-4)
        assert sir_mean(0.8, -0.03816) == pytest.approx(10.544, abs=1e-3)

    def test_small_reproduction_limit(self):
        assert sir_mean(1e-6, -0.1) == pytest.approx(10.0, rel=1e-4)

    def test_matches_tail_integral(self):
        r, rho = 0.66, -0.0683
        val, _ = quad(lambda t: 1.0 - sir_cdf(r, rho, t), 0.0, np.inf, epsabs=1e-10)
        assert sir_mean(r, rho) == pytest.approx(val, rel=1e-5)

    def test_domain(self):
        with pytest.raises(ValueError):
            sir_mean(1.0, -0.1)
        with pytest.raises(ValueError):
            sir_mean(0.66, 0.0)
