import math
from fractions import Fraction

import pytest
from scipy.special import zeta

from dirlaw.arith import parse_model
from dirlaw.errors import DomainError, ResourceError
from dirlaw.series import a0_local_check, d_direct, d_euler, prime_sum_diag


def test_single_variable_is_partial_zeta(sieve_small):
    for sigma in (1.6, 2.0, 3.0):
        val, tail = d_direct((sigma,), 1, 500, sieve_small)
        partial = math.fsum(n ** -sigma for n in range(1, 501))
        assert val == pytest.approx(partial, rel=1e-14)
        true_tail = zeta(sigma) - partial
        assert 0 < true_tail <= tail * (1 + 1e-12)


def test_tiny_truncations_by_hand(sieve_small):
    val, _ = d_direct((2.0, 2.0), 2, 1, sieve_small)
    assert val == pytest.approx(1.0, rel=1e-15)
    # n pairs up to 2: (1,1) -> 1, (1,2) and (2,1) -> (1/2)/4 each,
    # (2,2) -> (1/3)/16
    val2, _ = d_direct((2.0, 2.0), 2, 2, sieve_small)
    want = 1 + 2 * (1 / 2) / 4 + (1 / 3) / 16
    assert val2 == pytest.approx(want, rel=1e-15)


def test_direct_tail_brackets_refinement(sieve_small):
    coarse, tail_c = d_direct((2.0, 2.0), 2, 200, sieve_small)
    fine, tail_f = d_direct((2.0, 2.0), 2, 2000, sieve_small)
    assert tail_f < tail_c
    assert abs(fine - coarse) <= tail_c + tail_f


@pytest.mark.parametrize("k,s,nmax,pmax,vmax", [
    (2, 2.0, 2000, 2000, 30),
    (2, 3.0, 1000, 1000, 25),
    (3, 3.0, 300, 500, 25),
])
def test_euler_product_matches_direct_sum(k, s, nmax, pmax, vmax,
                                          sieve_small):
    point = (s,) * k
    direct, tail_d = d_direct(point, k, nmax, sieve_small)
    euler, tail_e = d_euler(point, k, pmax, vmax)
    assert abs(euler - direct) <= tail_d + tail_e


def test_complex_point_is_finite(sieve_small):
    point = (2.0 + 0.7j, 2.5 - 0.3j)
    val, tail = d_direct(point, 2, 500, sieve_small)
    val_e, tail_e = d_euler(point, 2, 500, 30)
    assert abs(val) < 10 and tail > 0
    assert abs(val - val_e) <= tail + tail_e


def test_a0_local_identity():
    for p in (2, 3, 97):
        for k in (1, 2, 5):
            for v in (1, 7, 30):
                want = 1 - Fraction(1, p ** (v + 1))
                assert a0_local_check(p, k, v) == want


def test_prime_sum_vanishes_for_balanced_models():
    uniform = parse_model("uniform", 2)
    assert prime_sum_diag(uniform, 0, 2.0, 5000) == 0
    sqfree = parse_model("squarefree", 2)
    assert prime_sum_diag(sqfree, 1, 2.0, 5000) == 0
    with pytest.raises(DomainError):
        prime_sum_diag(uniform, 2, 2.0, 5000)


def test_prime_sum_bounded_for_two_squares():
    model = parse_model("two-squares", 2)
    val = prime_sum_diag(model, 0, 2.0, 20_000)
    assert abs(val) < 0.05
    # alternating character sum over p^-2: tiny but not identically zero
    assert abs(val) > 1e-4


def test_series_guards(sieve_small):
    with pytest.raises(DomainError):
        d_direct((1.2, 2.0), 2, 100, sieve_small)  # sigma below 1.5
    with pytest.raises(ResourceError):
        d_direct((2.0, 2.0, 2.0), 3, 100_000, sieve_small)  # cost guard
    with pytest.raises(DomainError):
        d_euler((2.0, 2.0), 2, 1000, 10)  # local tail not certified
