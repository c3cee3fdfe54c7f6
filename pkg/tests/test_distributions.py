import numpy as np
import pytest
from fractions import Fraction
from scipy import integrate, stats

from lossorder.distributions import (
    CategoricalDistribution,
    Gamma,
    Gaussian,
    Gumbel,
    HistogramDistribution,
    LatticeDistribution,
    PiecewisePolyDensity,
    PointMass,
    SupportInterval,
    Weibull,
    descending_pmf,
    truncate,
)
from lossorder.errors import (
    EmptyTruncation,
    InvalidOrder,
    MomentsUndefined,
    NoDensity,
)


class TestSupportInterval:
    def test_compactness(self):
        assert SupportInterval(1.0, 3.0).is_compact
        assert not SupportInterval(1.0, np.inf).is_compact

    def test_intersect(self):
        a = SupportInterval(1.0, 5.0)
        b = SupportInterval(3.0, np.inf)
        assert a.intersect(b) == SupportInterval(3.0, 5.0)

    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError):
            SupportInterval(2.0, 1.0)


class TestCategorical:
    def make(self):
        return CategoricalDistribution(
            labels=("H", "M", "L"), ranks=(3.0, 2.0, 1.0), probs=(0.5, 0.3, 0.2)
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            CategoricalDistribution(("H", "H"), (2.0, 1.0), (0.5, 0.5))
        with pytest.raises(ValueError):
            CategoricalDistribution(("H", "M"), (1.0, 2.0), (0.5, 0.5))
        with pytest.raises(ValueError):
            CategoricalDistribution(("H", "M"), (2.0, 1.0), (0.6, 0.6))

    def test_pmf_and_cdf(self):
        d = self.make()
        assert d.pmf("M") == 0.3
        assert d.cdf(0.5) == 0.0
        assert d.cdf(1.0) == pytest.approx(0.2)
        assert d.cdf(2.5) == pytest.approx(0.5)
        assert d.cdf(3.0) == pytest.approx(1.0)
        assert d.sf(2.0) == pytest.approx(0.5)

    def test_no_density(self):
        with pytest.raises(NoDensity):
            self.make().pdf(2.0)

    def test_moment_matches_exact_arithmetic(self):
        d = self.make()
        for k in (1, 3, 7):
            exact = (
                Fraction(1, 2) * 3**k
                + Fraction(3, 10) * 2**k
                + Fraction(1, 5) * 1**k
            )
            assert np.exp(d.log_moment(k)) == pytest.approx(float(exact), rel=1e-12)

    def test_moment_order_validation(self):
        with pytest.raises(InvalidOrder):
            self.make().log_moment(0)
        with pytest.raises(InvalidOrder):
            self.make().log_moment(1.5)


class TestHistogram:
    def test_normalization_and_cdf(self):
        h = HistogramDistribution((1.0, 2.0, 5.0), (10, 30, 60))
        assert h.total == 100
        assert h.probs == pytest.approx((0.1, 0.3, 0.6))
        assert h.cdf(1.0) == pytest.approx(0.1)
        assert h.cdf(4.9) == pytest.approx(0.4)
        assert h.sf(5.0) == pytest.approx(0.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            HistogramDistribution((2.0, 1.0), (1, 1))
        with pytest.raises(ValueError):
            HistogramDistribution((1.0,), (0,))

    def test_moment(self):
        h = HistogramDistribution((2.0, 4.0), (1, 3))
        assert np.exp(h.log_moment(2)) == pytest.approx(0.25 * 4 + 0.75 * 16)


class TestPiecewisePoly:
    def test_uniform(self):
        u = PiecewisePolyDensity.uniform(1.0, 3.0)
        assert u.pdf(2.0) == pytest.approx(0.5)
        assert u.pdf(0.5) == 0.0
        assert u.cdf(2.0) == pytest.approx(0.5)
        # E[X^k] = (b^(k+1) - a^(k+1)) / ((k+1)(b-a))
        for k in (1, 2, 5):
            exact = (3.0 ** (k + 1) - 1.0) / ((k + 1) * 2.0)
            assert np.exp(u.log_moment(k)) == pytest.approx(exact, rel=1e-9)

    def test_triangular(self):
        # density (x-1)/2 on [1, 3]
        t = PiecewisePolyDensity([1.0, 3.0], [[-0.5, 0.5]])
        assert t.pdf(3.0) == pytest.approx(1.0)
        assert t.cdf(3.0) == pytest.approx(1.0)
        exact, _ = integrate.quad(lambda x: x * (x - 1) / 2, 1, 3)
        assert np.exp(t.log_moment(1)) == pytest.approx(exact, rel=1e-9)

    def test_derivative(self):
        t = PiecewisePolyDensity([1.0, 3.0], [[-0.5, 0.5]])
        assert t.derivative(2.0, 1) == pytest.approx(0.5)
        assert t.derivative(2.0, 2) == 0.0

    def test_bad_density_rejected(self):
        with pytest.raises(ValueError):
            PiecewisePolyDensity([0.0, 1.0], [[2.0]])  # integrates to 2
        with pytest.raises(ValueError):
            PiecewisePolyDensity([0.0, 1.0], [[-1.0, 2.0]])  # negative near 0


class TestParametric:
    def test_gamma_moment_closed_form_vs_quadrature(self):
        d = Gamma(3.5, 2.0)
        for k in (1, 2, 4):
            oracle, _ = integrate.quad(
                lambda x: x**k * stats.gamma(3.5, scale=2.0).pdf(x), 0, np.inf
            )
            assert np.exp(d.log_moment(k)) == pytest.approx(oracle, rel=1e-8)

    def test_weibull_moment_closed_form_vs_quadrature(self):
        d = Weibull(2.0, 3.0)
        for k in (1, 3):
            oracle, _ = integrate.quad(
                lambda x: x**k * stats.weibull_min(2.0, scale=3.0).pdf(x), 0, np.inf
            )
            assert np.exp(d.log_moment(k)) == pytest.approx(oracle, rel=1e-8)

    def test_gumbel_mean_and_variance(self):
        # minimum-extreme-value parametrisation: mean = a - γb, var = π²b²/6
        d = Gumbel(31.0063, 1.74346)
        m1 = np.exp(d.log_moment(1))
        m2 = np.exp(d.log_moment(2))
        assert m1 == pytest.approx(31.0063 - np.euler_gamma * 1.74346, rel=1e-4)
        assert m2 - m1**2 == pytest.approx(np.pi**2 * 1.74346**2 / 6, rel=1e-3)

    def test_gumbel_moment_with_negative_mass(self):
        # location small enough that a visible share of mass sits below 0;
        # the signed split must still reproduce the quadrature oracle
        d = Gumbel(6.19073, 2.06288)
        frozen = stats.gumbel_l(loc=6.19073, scale=2.06288)
        for k in (1, 2, 3):
            with np.errstate(over="ignore"):  # oracle pdf overflows far right
                oracle, _ = integrate.quad(
                    lambda x: x**k * frozen.pdf(x), -np.inf, np.inf
                )
            assert np.exp(d.log_moment(k)) == pytest.approx(oracle, rel=1e-6)

    def test_gaussian_moments(self):
        d = Gaussian(10.0, 2.0)
        assert np.exp(d.log_moment(1)) == pytest.approx(10.0, rel=1e-9)
        assert np.exp(d.log_moment(2)) == pytest.approx(104.0, rel=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            Gamma(-1.0, 1.0)
        with pytest.raises(ValueError):
            Gumbel(0.0, -1.0)

    def test_nonpositive_moment_rejected(self):
        # centred gaussian: E[X] = 0, not representable in log-domain
        with pytest.raises(MomentsUndefined):
            Gaussian(0.0, 1.0).log_moment(1)


class TestTruncated:
    def test_renormalization(self):
        base = Gamma(2.0, 1.0)
        t = truncate(base, 1.0, 4.0)
        mass = base.cdf(4.0) - base.cdf(1.0)
        assert t.renormalization == pytest.approx(mass)
        assert t.cdf(1.0) == pytest.approx(0.0)
        assert t.cdf(4.0) == pytest.approx(1.0)
        assert t.pdf(2.0) == pytest.approx(base.pdf(2.0) / mass)
        assert t.pdf(5.0) == 0.0

    def test_moment_vs_quadrature(self):
        base = Gamma(2.0, 1.0)
        t = truncate(base, 1.0, 4.0)
        mass = base.cdf(4.0) - base.cdf(1.0)
        oracle, _ = integrate.quad(lambda x: x**2 * base.pdf(x) / mass, 1.0, 4.0)
        assert np.exp(t.log_moment(2)) == pytest.approx(oracle, rel=1e-9)

    def test_empty_window(self):
        with pytest.raises(EmptyTruncation):
            truncate(Gamma(2.0, 1.0), 1e6, 2e6)
        with pytest.raises(ValueError):
            truncate(Gamma(2.0, 1.0), 3.0, 2.0)


class TestPointMass:
    def test_basics(self):
        p = PointMass(4.0)
        assert p.cdf(3.9) == 0.0
        assert p.cdf(4.0) == 1.0
        assert np.exp(p.log_moment(3)) == pytest.approx(64.0)

    def test_minimum_loss(self):
        with pytest.raises(ValueError):
            PointMass(0.5)


class TestLattice:
    def geometric(self, q=0.5):
        return LatticeDistribution(
            lambda j: np.log(1 - q) + (j - 1) * np.log(q), lower=1
        )

    def test_pmf_and_cdf(self):
        g = self.geometric()
        assert g.pmf(1) == pytest.approx(0.5)
        assert g.cdf(3) == pytest.approx(1 - 0.5**3)
        assert g.quantile(0.9) == 4

    def test_truncated_renormalizes(self):
        g = self.geometric()
        t = g.truncated(1, 3)
        assert sum(t.probs) == pytest.approx(1.0)
        # masses keep their ratios: 4 : 2 : 1 over values 1, 2, 3
        values, probs = descending_pmf(t)
        assert values.tolist() == [3.0, 2.0, 1.0]
        assert probs == pytest.approx(np.array([1, 2, 4]) / 7.0)

    def test_moment_matches_series(self):
        g = self.geometric()
        series = sum(j**2 * 0.5**j for j in range(1, 300))
        assert np.exp(g.log_moment(2)) == pytest.approx(series, rel=1e-10)


def test_descending_pmf_orders_worst_first():
    h = HistogramDistribution((1.0, 2.0, 3.0), (1, 2, 1))
    values, probs = descending_pmf(h)
    assert values.tolist() == [3.0, 2.0, 1.0]
    assert probs.tolist() == pytest.approx([0.25, 0.5, 0.25])
