import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import zonal_monomial_coefficients, zonal_oracle
from wishart_minors.hyperfun.partitions import partitions_of
from wishart_minors.hyperfun.zonal import jack_p_table, zonal

eigs = st.lists(st.floats(-2.0, 2.0, allow_nan=False), min_size=1, max_size=4)


def test_degree_one_is_trace():
    x = [0.3, -1.2, 2.0]
    assert zonal((1,), x) == pytest.approx(sum(x), rel=1e-14)


def test_degree_two_power_sums():
    x = np.array([0.4, -0.7, 1.1])
    p1, p2 = x.sum(), (x**2).sum()
    assert zonal((2,), x) == pytest.approx((p1**2 + 2 * p2) / 3, rel=1e-13)
    assert zonal((1, 1), x) == pytest.approx(2 * (p1**2 - p2) / 3, rel=1e-13)


def test_too_many_parts():
    assert zonal((1, 1, 1), [0.5, 0.2]) == 0.0


def test_empty_partition():
    assert zonal((), [0.5, 0.2]) == 1.0


@pytest.mark.parametrize("k", range(1, 6))
def test_matches_monomial_oracle(k):
    rng = np.random.default_rng(k)
    for m in (1, 2, 3, 4):
        x = rng.uniform(-1.5, 1.5, m)
        for kappa in zonal_monomial_coefficients(k):
            expected = zonal_oracle(kappa, x)
            assert zonal(kappa, x) == pytest.approx(expected, rel=1e-11, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(eigs, st.integers(0, 8))
def test_sum_identity(x, k):
    total = sum(zonal(kappa, x) for kappa in partitions_of(k, len(x)))
    expected = sum(x) ** k
    assert total == pytest.approx(expected, rel=1e-9, abs=1e-9 * max(1.0, sum(abs(v) for v in x)) ** k)


@settings(max_examples=30, deadline=None)
@given(eigs, st.randoms(use_true_random=False))
def test_permutation_invariance_is_bitwise(x, random):
    y = list(x)
    random.shuffle(y)
    for kappa in [(2,), (1, 1), (3, 1), (2, 2, 1)]:
        assert zonal(kappa, x) == zonal(kappa, y)


def test_specialised_kernels_match_generic():
    rng = np.random.default_rng(3)
    for m in (2, 3):
        x = rng.uniform(-1, 1, m)
        parts_a, fast = jack_p_table(x, 30)
        parts_b, slow = jack_p_table(x, 30, specialised=False)
        np.testing.assert_array_equal(parts_a, parts_b)
        np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-300)


def test_homogeneity():
    x = np.array([0.3, 0.5, -0.2])
    for kappa in [(3,), (2, 1), (1, 1, 1)]:
        assert zonal(kappa, 2 * x) == pytest.approx(8 * zonal(kappa, x), rel=1e-13)
