"""Nystrom grids, Hopf-bracketed power iteration, and the refined radius."""

import math
from fractions import Fraction

import numpy as np
import pytest

from magrad.kernels import plain_reduced_kernel, reduced_kernel
from magrad.magnus import w_plain
from magrad.specrad import (
    InvalidKernelError,
    InvalidUseError,
    OperatorGrid,
    convolution_radius,
    discretize,
    grid_convolve,
    power_iteration_hopf,
    radius_refined,
)
from magrad.umqnorm import ConvexityClass

Q1 = ConvexityClass.from_q(1)


class TestDiscretize:
    def test_constant_kernel(self):
        g = discretize(lambda s, t: 0.7, 8)
        assert np.allclose(g.matrix, 0.7 / 8)
        assert g.kernel_min == g.kernel_max == pytest.approx(0.7)

    def test_degree_zero_two_value_toeplitz(self):
        lam = Fraction(1, 3)
        g = discretize(plain_reduced_kernel(0, lam).two_sided(), 16)
        col, row = g.toeplitz
        assert np.allclose(row, float(lam) / 16)          # above the diagonal
        assert np.allclose(col[1:], float(1 - lam) / 16)  # strictly below
        assert col[0] == row[0]                           # diagonal: lam branch

    def test_negative_kernel_rejected(self):
        with pytest.raises(InvalidKernelError):
            discretize(lambda s, t: s - t, 8)

    def test_needs_two_nodes(self):
        with pytest.raises(InvalidUseError):
            discretize(lambda s, t: 1.0, 1)


class TestPowerIteration:
    def test_constant_kernel_collapses_immediately(self):
        g = discretize(lambda s, t: 0.3, 32)
        res = power_iteration_hopf(g, tol=1e-12)
        assert res.iterations == 1
        assert res.radius == pytest.approx(0.3, abs=1e-12)

    def test_zero_kernel(self):
        g = OperatorGrid.from_matrix(np.zeros((5, 5)))
        res = power_iteration_hopf(g)
        assert res.radius == 0.0 and res.bracket == (0.0, 0.0)

    def test_random_matrices_bracket_dense_eigenvalue(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            A = rng.uniform(0, 1, size=(8, 8))
            g = OperatorGrid.from_matrix(A)
            res = power_iteration_hopf(g, tol=1e-10)
            r = float(np.abs(np.linalg.eigvals(A)).max())
            lo, hi = res.bracket
            assert lo - 1e-9 <= r <= hi + 1e-9
            widths = [b[1] - b[0] for b in res.brackets]
            assert all(widths[i + 1] <= widths[i] for i in range(len(widths) - 1))

    def test_hopf_width_bound(self):
        g = discretize(lambda s, t: 1.0 + 0.5 * s * t, 32)
        res = power_iteration_hopf(g, tol=1e-13, max_iter=200)
        rate = g.hopf_rate
        spread = g.kernel_max - g.kernel_min
        for i, (lo, hi) in enumerate(res.brackets):
            assert hi - lo <= rate ** i * spread * (1 + 1e-9)

    def test_nonconvergence_flagged(self):
        g = discretize(lambda s, t: 1.0 + s + t, 64)
        res = power_iteration_hopf(g, tol=1e-15, max_iter=3)
        assert not res.converged and res.warning

    def test_hopf_rate_absent_when_infimum_zero(self):
        g = discretize(lambda s, t: max(t - s, 0.0), 16)
        assert g.kernel_min == 0.0 and g.hopf_rate is None


class TestConvolutionRadius:
    def test_constant_half_point_kernel(self):
        two = reduced_kernel(4, Fraction(1, 2), Q1).two_sided()
        assert convolution_radius(two) == Fraction(5, 192)

    def test_zero_kernel(self):
        from magrad.kernels import ReducedKernel
        rk = ReducedKernel(coeffs=(), lam=Fraction(1, 2), p_minus_1=1)
        assert convolution_radius(rk) == 0

    def test_plain_degree_zero(self):
        two = plain_reduced_kernel(0, Fraction(1, 2)).two_sided()
        assert convolution_radius(two) == Fraction(1, 2)

    def test_off_center_two_sided_rejected(self):
        two = plain_reduced_kernel(0, Fraction(1, 3)).two_sided()
        with pytest.raises(InvalidUseError):
            convolution_radius(two)

    def test_reduced_kernel_is_always_convolution(self):
        rk = plain_reduced_kernel(2, Fraction(1, 3))
        assert convolution_radius(rk) == rk.integral01()


class TestRadiusRefined:
    @pytest.mark.parametrize("lam", [Fraction(1, 10), Fraction(3, 10),
                                     Fraction(7, 10)])
    def test_plain_closed_form(self, lam):
        two = plain_reduced_kernel(0, lam).two_sided()
        res = radius_refined(two, tol=1e-8)
        assert res.converged
        assert res.radius == pytest.approx(w_plain(float(lam)), abs=1e-6)

    def test_dominant_eigenvector(self):
        lam = Fraction(3, 10)
        two = plain_reduced_kernel(0, lam).two_sided()
        g = discretize(two, 1024)
        res = power_iteration_hopf(g, tol=1e-10)
        f = ((1 - float(lam)) / float(lam)) ** g.nodes
        err = np.abs(res.eigvec / res.eigvec.max() - f / f.max()).max()
        assert err < 1e-4

    def test_budget_exhaustion_flag(self):
        two = plain_reduced_kernel(0, Fraction(1, 10)).two_sided()
        res = radius_refined(two, tol=1e-14, n0=32, max_doublings=1)
        assert not res.converged and res.warning

    def test_monotone_in_kernel(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            c = rng.uniform(0.1, 1.0, size=3)
            d = rng.uniform(0.0, 0.5, size=3)
            k1 = lambda s, t, c=c: c[0] + c[1] * s + c[2] * t
            k2 = lambda s, t, c=c, d=d: c[0] + d[0] + (c[1] + d[1]) * s \
                + (c[2] + d[2]) * t
            r1 = power_iteration_hopf(discretize(k1, 64), tol=1e-10).radius
            r2 = power_iteration_hopf(discretize(k2, 64), tol=1e-10).radius
            assert r1 <= r2 + 1e-12


class TestSubmultiplicativity:
    @staticmethod
    def _refine(vals):
        """Two-level Richardson over a grid-doubling triple."""
        t1 = [2 * vals[i + 1] - vals[i] for i in range(2)]
        return (4 * t1[1] - t1[0]) / 3

    @pytest.mark.parametrize("lam", [Fraction(3, 10), Fraction(1, 2)])
    def test_family_product_dominates(self, lam):
        # degree-5 kernel against the convolution of degrees 0 and 4; the
        # plain family is exactly multiplicative, so after removing the
        # discretization error the radii agree and the inequality is tight
        k5 = plain_reduced_kernel(5, lam).two_sided()
        k0 = plain_reduced_kernel(0, lam).two_sided()
        k4 = plain_reduced_kernel(4, lam).two_sided()
        for pair in ((k0, k4), (k4, k0)):
            r5s, rcs = [], []
            for n in (128, 256, 512):
                r5s.append(power_iteration_hopf(discretize(k5, n),
                                                tol=1e-11).radius)
                rcs.append(power_iteration_hopf(grid_convolve(*pair, n),
                                                tol=1e-11).radius)
            r5, rc = self._refine(r5s), self._refine(rcs)
            assert r5 <= rc + 2e-6
            assert r5 == pytest.approx(rc, abs=2e-6)


class TestSpectralLocality:
    def test_bracket_form_converges_to_dense_radius(self):
        rng = np.random.default_rng(3)
        for _ in range(3):
            A = rng.uniform(0, 1, size=(32, 32))
            r_dense = float(np.abs(np.linalg.eigvals(A)).max())
            logscale, B = 0.0, A.copy()
            for _ in range(30):
                s = float(np.abs(B).max())
                B = (B / s) @ B
                logscale = 2.0 * logscale + math.log(s)
            val = math.exp((logscale + math.log(float(B.sum()))) / 2.0 ** 30)
            assert val == pytest.approx(r_dense, abs=1e-4)
