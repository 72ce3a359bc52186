import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_spd
from oracles import bivariate_second_moment, det_moment_bartlett, product_moment_untransformed
from wishart_minors.errors import DomainError
from wishart_minors.hyperfun.series import gauss_2f1
from wishart_minors.linalg import BlockSplit, SpdMatrix, swap_blocks
from wishart_minors.wishart import (
    MomentQuery,
    WishartModel,
    coupling,
    det_moment,
    generalized_moment,
    mgf,
    minor_moment,
    moment_factors,
    product_moment,
)


def bivariate(alpha, rho):
    return WishartModel.from_blocks(alpha, [[1.0, rho], [rho, 1.0]], 1)


def random_model(seed, p1, p2, extra_dof=1.5):
    rng = np.random.default_rng(seed)
    sigma = random_spd(rng, p1 + p2, cond=10.0)
    return WishartModel.from_blocks(p1 + p2 - 1 + extra_dof, sigma, p1)


class TestModel:
    def test_dof_bound(self):
        with pytest.raises(DomainError):
            WishartModel.from_blocks(1.0, np.eye(2), 1)
        WishartModel.from_blocks(1.0 + 1e-9, np.eye(2), 1)

    def test_sigma_pd(self):
        with pytest.raises(DomainError):
            WishartModel.from_blocks(5.0, [[1.0, 2.0], [2.0, 1.0]], 1)

    def test_split_mismatch(self):
        with pytest.raises(DomainError):
            WishartModel(5.0, SpdMatrix(np.eye(3)), BlockSplit(1, 1))

    def test_json_round_trip(self):
        m = random_model(1, 2, 1)
        back = WishartModel.from_json(json.loads(json.dumps(m.to_json())))
        assert back.alpha == m.alpha and back.split == m.split and back.sigma == m.sigma

    def test_json_missing(self):
        with pytest.raises(ValueError):
            WishartModel.from_json({"alpha": 3.0})

    def test_swapped(self):
        m = random_model(2, 1, 2)
        s = m.swapped()
        assert s.split == BlockSplit(2, 1)
        np.testing.assert_array_equal(s.block(1), m.block(2))


class TestQuery:
    def test_boundary_rejected(self):
        m = bivariate(5.0, 0.3)
        with pytest.raises(DomainError, match="nu1"):
            MomentQuery(0, -2.5, 0).validate(m)
        MomentQuery(0, -2.5 + 1e-9, 0).validate(m)

    def test_nu0_range(self):
        m = bivariate(5.0, 0.3)
        with pytest.raises(DomainError, match="nu0"):
            MomentQuery(-2.0, 0, 0).validate(m)

    def test_nu_ranges_shift_with_nu0(self):
        m = bivariate(5.0, 0.3)
        MomentQuery(1.0, -3.4, 0).validate(m)
        with pytest.raises(DomainError, match="nu2"):
            MomentQuery(-1.0, 0, -1.5).validate(m)

    def test_tilt_must_keep_pd(self):
        m = bivariate(5.0, 0.0)
        with pytest.raises(DomainError):
            MomentQuery(tilt=np.eye(2) * 0.5).validate(m)

    def test_json_round_trip(self):
        q = MomentQuery(0.25, 1.0, -0.5, np.diag([0.1, -0.3]))
        back = MomentQuery.from_json(json.loads(json.dumps(q.to_json())))
        assert back == q


class TestMgf:
    def test_zero(self):
        assert mgf(bivariate(5.0, 0.3), np.zeros((2, 2))) == 1.0
        assert mgf(bivariate(5.0, 0.3)) == 1.0

    def test_chi_square(self):
        # p = 1 cannot be split, so use p = 2 with an independent second coordinate
        m = WishartModel.from_blocks(3.0, np.eye(2), 1)
        assert mgf(m, np.diag([0.25, 0.0])) == pytest.approx(2 * math.sqrt(2), rel=1e-14)

    def test_quarter_precision(self, rng):
        sigma = random_spd(rng, 3)
        m = WishartModel.from_blocks(4.2, sigma, 1)
        t = np.linalg.inv(sigma) / 4
        assert mgf(m, t) == pytest.approx(2 ** (3 * 4.2 / 2), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            mgf(bivariate(5.0, 0.0), np.eye(2))


class TestCoupling:
    def test_block_diagonal(self):
        m = WishartModel.from_blocks(6.0, np.diag([1.0, 2.0, 3.0]), 1)
        c = coupling(m)
        assert np.all(c.p_mat == 0) and np.all(c.ppt_eigenvalues == 0)

    @pytest.mark.parametrize("rho", [-0.9, -0.2, 0.5, 0.99])
    def test_bivariate(self, rho):
        c = coupling(bivariate(5.0, rho))
        assert c.ppt_eigenvalues[0] == pytest.approx(rho**2, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_eigenvalues_in_unit_interval(self, p1, p2, seed):
        c = coupling(random_model(seed, p1, p2))
        assert np.all(c.ppt_eigenvalues >= 0) and np.all(c.ppt_eigenvalues < 1)

    def test_tilted(self, rng):
        sigma = random_spd(rng, 3)
        t = np.diag([0.05, -0.1, 0.02])
        c = coupling(WishartModel.from_blocks(5.0, sigma, 1), t)
        np.testing.assert_allclose(c.a_mat.entries, np.linalg.inv(sigma) / 2 - t, atol=1e-13)


class TestMinorMoments:
    def test_chi_square_mean(self):
        assert minor_moment(bivariate(5.0, 0.4), 1, 1.0) == pytest.approx(5.0, rel=1e-14)

    def test_zero(self):
        assert minor_moment(bivariate(5.0, 0.4), 2, 0.0) == 1.0
        assert det_moment(bivariate(5.0, 0.4), 0.0) == 1.0

    def test_two_by_two_block(self):
        m = WishartModel.from_blocks(6.0, np.eye(3), 2)
        assert minor_moment(m, 1, 1.0) == pytest.approx(30.0, rel=1e-13)

    def test_inverse_determinant(self):
        m = WishartModel.from_blocks(5.0, np.eye(2), 1)
        assert det_moment(m, -1.0) == pytest.approx(1 / 6, rel=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.floats(-0.4, 3.0), st.integers(0, 2**32 - 1))
    def test_against_bartlett(self, p1, p2, nu, seed):
        m = random_model(seed, p1, p2)
        for i, block in ((1, m.block(1)), (2, m.block(2))):
            assert minor_moment(m, i, nu) == pytest.approx(det_moment_bartlett(m.alpha, block, nu), rel=1e-11)
        assert det_moment(m, nu) == pytest.approx(det_moment_bartlett(m.alpha, m.sigma.entries, nu), rel=1e-11)

    def test_range(self):
        with pytest.raises(DomainError):
            minor_moment(bivariate(5.0, 0.0), 1, -2.5)
        with pytest.raises(ValueError):
            minor_moment(bivariate(5.0, 0.0), 3, 1.0)


class TestProductMoment:
    def test_second_moment(self):
        value, diag = product_moment(bivariate(5.0, 0.5), 1.0, 1.0)
        assert value == pytest.approx(27.5, rel=1e-14)
        assert diag.terminated_exactly

    def test_block_diagonal(self):
        m = WishartModel.from_blocks(7.0, np.diag([1.0, 2.0, 0.5, 3.0]), 2)
        value, diag = product_moment(m, 0.7, 1.3)
        assert diag.value == 1.0
        assert value == pytest.approx(minor_moment(m, 1, 0.7) * minor_moment(m, 2, 1.3), rel=1e-14)

    def test_nu2_zero(self):
        m = random_model(3, 2, 2)
        assert product_moment(m, 1.4, 0.0)[0] == pytest.approx(minor_moment(m, 1, 1.4), rel=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(1.01, 10.0), st.floats(-0.99, 0.99), st.floats(0.05, 5.0))
    def test_bivariate_identity(self, alpha, rho, scale):
        m = WishartModel.from_blocks(alpha, scale * np.array([[1.0, rho], [rho, 1.0]]), 1)
        expected = bivariate_second_moment(alpha, scale, scale, scale * rho)
        assert product_moment(m, 1.0, 1.0)[0] == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.floats(-0.3, 2.0), st.floats(-0.3, 2.0),
           st.integers(0, 2**32 - 1))
    def test_against_untransformed_form(self, p1, p2, nu1, nu2, seed):
        m = random_model(seed, p1, p2)
        f21 = lambda a, b, c, e: gauss_2f1(a, b, c, e, tol=1e-15).value  # noqa: E731
        if p1 > p2:
            expected = product_moment_untransformed(m.alpha, swap_blocks(m.sigma.entries, m.split), p2, nu2, nu1, f21)
        else:
            expected = product_moment_untransformed(m.alpha, m.sigma.entries, p1, nu1, nu2, f21)
        assert product_moment(m, nu1, nu2, tol=1e-14)[0] == pytest.approx(expected, rel=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.floats(-0.3, 2.0), st.floats(-0.3, 2.0),
           st.integers(0, 2**32 - 1))
    def test_block_swap(self, p1, p2, nu1, nu2, seed):
        m = random_model(seed, p1, p2)
        a = product_moment(m, nu1, nu2)[0]
        b = product_moment(m.swapped(), nu2, nu1)[0]
        assert a == pytest.approx(b, rel=1e-12)

    @pytest.mark.parametrize("nu1,nu2", [(0, 0), (1, 2), (3, 3), (2, 1)])
    def test_integer_exponents_terminate(self, nu1, nu2):
        m = random_model(5, 2, 3)
        loose, d1 = product_moment(m, nu1, nu2, tol=1e-4)
        tight, d2 = product_moment(m, nu1, nu2, tol=1e-15)
        assert d1.terminated_exactly and d2.terminated_exactly
        assert loose == tight

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.1, 10.0), st.floats(-0.3, 2.0), st.floats(-0.3, 2.0), st.integers(0, 2**32 - 1))
    def test_scaling_covariance(self, c, nu1, nu2, seed):
        m = random_model(seed, 1, 2)
        scaled = WishartModel(m.alpha, SpdMatrix(c * m.sigma.entries), m.split)
        ratio = product_moment(scaled, nu1, nu2)[0] / product_moment(m, nu1, nu2)[0]
        assert ratio == pytest.approx(c ** (nu1 + 2 * nu2), rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.floats(0.0, 3.0), st.floats(0.0, 3.0),
           st.integers(0, 2**32 - 1))
    def test_product_inequality(self, p1, p2, nu1, nu2, seed):
        m = random_model(seed, p1, p2)
        marginal = minor_moment(m, 1, nu1) * minor_moment(m, 2, nu2)
        assert product_moment(m, nu1, nu2)[0] >= marginal * (1 - 1e-12)


class TestGeneralizedMoment:
    def test_reduces_bit_for_bit(self):
        m = random_model(7, 1, 2)
        assert generalized_moment(m, MomentQuery(0, 0.6, 1.1)) == product_moment(m, 0.6, 1.1)

    def test_only_mgf_survives(self, rng):
        m = random_model(8, 2, 1)
        t = 0.05 * (lambda a: a + a.T)(rng.standard_normal((3, 3)))
        value, _ = generalized_moment(m, MomentQuery(tilt=t))
        assert value == pytest.approx(mgf(m, t), rel=1e-13)

    def test_only_determinant(self):
        m = random_model(9, 1, 1)
        value, _ = generalized_moment(m, MomentQuery(nu0=0.8))
        assert value == pytest.approx(det_moment(m, 0.8), rel=1e-12)

    def test_tilted_equals_reweighted_model(self):
        # with nu0 = 0 the tilt factors into mgf(T) times moments of W(alpha, (Sigma^-1 - 2T)^-1)
        m = random_model(10, 1, 2)
        t = np.diag([0.05, -0.1, 0.02])
        tilted = m.tilted(t, 0.0)
        value, _ = generalized_moment(m, MomentQuery(0, 0.9, 0.4, t))
        assert value == pytest.approx(mgf(m, t) * product_moment(tilted, 0.9, 0.4)[0], rel=1e-12)

    def test_factors(self):
        m = WishartModel.from_blocks(5.0, np.eye(2), 1)
        f = moment_factors(m, MomentQuery(0.5, 1, 1, np.diag([0.1, -0.2])))
        assert set(f.as_dict()) == {"mgf", "det_moment_inv", "minor1", "minor2", "f21"}
        assert f.value == pytest.approx(math.prod(f.as_dict().values()), rel=1e-14)
