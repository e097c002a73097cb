"""Sampled operator-inequality checks on finite p-norm spaces."""

import numpy as np
import pytest

from magrad.convexity import (
    LpSpace,
    check_umd_sampled,
    check_umq_sampled,
    clarkson_delta,
    _opnorm_upper,
)


class TestLpSpace:
    def test_exponents(self):
        assert LpSpace(4, 2.0).q == 2.0
        assert LpSpace(4, 3.0).q == 3.0
        assert LpSpace(4, 1.5).q == 3.0
        assert LpSpace(4, 3.0).q_prime == 1.5

    def test_validation(self):
        with pytest.raises(ValueError):
            LpSpace(0, 2.0)
        with pytest.raises(ValueError):
            LpSpace(4, 1.0)


class TestClarksonDelta:
    def test_extremes(self):
        assert clarkson_delta(2.0, 2.0) == 1.0
        assert clarkson_delta(2.0, 5.0) == 1.0
        assert clarkson_delta(1e-9, 2.0) == pytest.approx(0.0, abs=1e-12)

    def test_unit_value(self):
        assert clarkson_delta(1.0, 2.0) == pytest.approx(1 - np.sqrt(3) / 2)

    def test_monotone_in_eps(self):
        for q in (2.0, 3.0):
            vals = [clarkson_delta(e, q) for e in np.linspace(0.05, 2.0, 40)]
            assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            clarkson_delta(2.5, 2.0)


class TestCollapseCases:
    def test_equal_first_pair(self):
        rng = np.random.default_rng(0)
        X, Z, W = (rng.standard_normal((6, 6)) for _ in range(3))
        lhs = (X @ Z + X @ Z + X @ W - X @ W) / 4
        assert np.allclose(lhs, X @ Z / 2)
        # then the ratio against |X||Z|/2 is at most 1 trivially
        assert _opnorm_upper(lhs) <= _opnorm_upper(X) * _opnorm_upper(Z) / 2 + 1e-12

    def test_kleinian_collapse(self):
        rng = np.random.default_rng(1)
        S1, S3, S4 = (rng.standard_normal((5, 5)) for _ in range(3))
        M = (S1 @ S1 @ S3 @ S4 + S1 @ S1 @ S3 @ S4
             + S1 @ S1 @ S4 @ S3 - S1 @ S1 @ S4 @ S3) / 4
        assert np.allclose(M, S1 @ S1 @ S3 @ S4 / 2)

    def test_commuting_diagonal_case(self):
        rng = np.random.default_rng(2)
        diags = [np.diag(rng.uniform(-1, 1, size=6)) for _ in range(4)]
        S1, S2, S3, S4 = diags
        M = (S1 @ S2 @ S3 @ S4 + S2 @ S1 @ S3 @ S4
             + S1 @ S2 @ S4 @ S3 - S2 @ S1 @ S4 @ S3) / 4
        prod = S1 @ S2 @ S3 @ S4
        assert np.allclose(M, prod / 2)
        norms = np.prod([np.abs(np.diag(S)).max() for S in diags])
        assert np.abs(np.diag(M)).max() <= norms / 2 + 1e-12


class TestSampledChecks:
    def test_deterministic_per_seed(self):
        sp = LpSpace(8, 2.0)
        a = check_umd_sampled(sp, 200, seed=5)
        b = check_umd_sampled(sp, 200, seed=5)
        assert a.max_ratio == b.max_ratio
        c = check_umd_sampled(sp, 200, seed=6)
        assert c.max_ratio != a.max_ratio

    @pytest.mark.parametrize("p,n", [(2.0, 8), (3.0, 6), (1.5, 6)])
    def test_no_violations_smoke(self, p, n):
        sp = LpSpace(n, p)
        r1 = check_umd_sampled(sp, 500, seed=42)
        r2 = check_umq_sampled(sp, 500, seed=42)
        assert r1.passed and r2.passed
        assert 0 < r1.max_ratio <= 1 and 0 < r2.max_ratio <= 1

    def test_report_fields(self):
        r = check_umq_sampled(LpSpace(4, 2.0), 50, seed=0)
        data = r.to_jsonable()
        assert data["passed"] and data["trials"] == 50

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            check_umd_sampled(LpSpace(4, 2.0), 0)
