import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst
from sympy import primerange

from murmur.errors import DomainError, NonPositiveBetaError, PoleError
from murmur.zeta import (
    RankInvariants,
    a_rank_n,
    asymptotic_main_term,
    beta_sequence,
    counting_miracle_alpha,
    delta_n,
    functional_equation_check,
    rank_invariants,
    rh_check,
    theta_n,
    zeta_eval,
    zeta_eval_rational,
    zeta_polynomial,
)

PRIMES = list(primerange(2, 10**6))


@hst.composite
def hasse_pairs(draw, qmax=10**6):
    q = draw(hst.sampled_from([p for p in PRIMES if p <= qmax]))
    r = math.isqrt(4 * q)
    return q, draw(hst.integers(-r, r))


def a_via_previous(q, a1, n, prev):
    """Independent oracle: a_n from a_(n-1) by the rearranged recursion."""
    return 1 + a1 + Fraction(-(q**n) - 2 * q ** (n - 1) + prev * q ** (n - 1) + q, q ** (n - 1) + 1 - prev)


# hand-unrolled: q=3, a1=0
#   2 b1 = 4                    -> b1 = 2
#   8 b2 = 12*2 - 0*1           -> b2 = 3
#   26 b3 = 36*3 - 6*2 = 96     -> b3 = 48/13
def test_beta_fixture_q3():
    bs = beta_sequence(3, 0, 3)
    assert [bs[n] for n in range(-1, 4)] == [0, 1, 2, 3, Fraction(48, 13)]
    assert a_rank_n(bs, 2) == -2
    assert a_rank_n(bs, 3) == -4


def test_beta_fixture_q5():
    bs = beta_sequence(5, -2, 2)
    assert bs[1] == 2 and bs[2] == Fraction(8, 3)
    assert a_rank_n(bs, 2) == -6


def test_initial_values():
    bs = beta_sequence(7, 3, 0)
    assert bs.betas == (0, 1)
    assert bs.n_max == 0


def test_rejects_small_q():
    with pytest.raises(DomainError):
        beta_sequence(1, 0, 3)


def test_beta_positivity_guard():
    with pytest.raises(NonPositiveBetaError):
        beta_sequence(2, 5, 3)
    assert beta_sequence(2, 5, 3, strict=False)[1] == -2


def test_index_errors():
    bs = beta_sequence(3, 0, 3)
    with pytest.raises(IndexError):
        a_rank_n(bs, 4)
    with pytest.raises(IndexError):
        a_rank_n(bs, 0)
    with pytest.raises(IndexError):
        counting_miracle_alpha(bs, 5)


def test_a_rank_2_q101():
    assert a_rank_n(beta_sequence(101, 10, 2), 2) == -90


def test_counting_miracle_alpha():
    assert counting_miracle_alpha(beta_sequence(3, 0, 2), 2) == 2
    assert counting_miracle_alpha(beta_sequence(3, 0, 2), 1) == 1
    assert counting_miracle_alpha(beta_sequence(5, -2, 2), 3) == Fraction(8, 3)


def test_zeta_polynomial_examples():
    assert zeta_polynomial(beta_sequence(3, 0, 2), 2).P_coeffs == (2, 4, 18)
    assert zeta_polynomial(beta_sequence(5, -2, 2), 2).P_coeffs == (2, 12, 50)
    assert zeta_polynomial(beta_sequence(13, 4, 1), 1).P_coeffs == (1, -4, 13)


def test_zeta_eval_examples():
    bs = beta_sequence(3, 0, 3)
    assert zeta_eval(bs, 1, -1) == pytest.approx(0.5, rel=1e-15)
    for n in (1, 2, 3):
        assert zeta_eval(bs, n, 0) == float(bs[n - 1])
    T = 1 / 3
    assert zeta_eval(bs, 2, T) == pytest.approx(zeta_eval_rational(zeta_polynomial(bs, 2), T), rel=1e-12)


def test_zeta_eval_exact_point():
    # T = 1/81 evaluated in exact rationals on both forms
    bs = beta_sequence(3, 0, 2)
    T = Fraction(1, 81)
    Q = 9
    exact = bs[1] + bs[2] * (Q - 1) * T / ((1 - T) * (1 - Q * T))
    assert zeta_eval(bs, 2, complex(T)) == pytest.approx(float(exact), rel=1e-14)


def test_zeta_poles():
    bs = beta_sequence(3, 0, 3)
    with pytest.raises(PoleError):
        zeta_eval(bs, 2, 1)
    with pytest.raises(PoleError):
        zeta_eval(bs, 2, 1 / 9)


@settings(max_examples=50, deadline=None)
@given(hasse_pairs(10**4), hst.integers(1, 8), hst.complex_numbers(max_magnitude=3, allow_nan=False))
def test_beta_and_rational_forms_agree(qa, n, T):
    q, a1 = qa
    bs = beta_sequence(q, a1, n)
    Q = q**n
    if abs(1 - T) < 1e-6 or abs(1 - Q * T) < 1e-6:
        return
    lhs = zeta_eval(bs, n, T)
    rhs = zeta_eval_rational(zeta_polynomial(bs, n), T)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1e-300)


def test_rh_check_examples():
    assert rh_check(rank_invariants(3, 0, 3))
    assert not rh_check(rank_invariants(2, 5, 1, strict=False))
    ri = rank_invariants(101, 10, 2)
    assert ri.a_n == -90 and rh_check(ri)


def test_functional_equation_examples():
    assert functional_equation_check(beta_sequence(7, 1, 2), 2, [0.5]) == 0.0
    assert functional_equation_check(beta_sequence(3, 0, 2), 2, [2]) <= 1e-9
    assert functional_equation_check(beta_sequence(5, -2, 3), 3, [0.7 + 1.3j]) <= 1e-9


def test_functional_equation_exact_oracle():
    # s = 2 and 1 - s = -1 map to T = 1/81 and T = 9 for Q = 9
    bs = beta_sequence(3, 0, 2)
    ri = zeta_polynomial(bs, 2)

    def z(T):
        return sum(c * T**k for k, c in enumerate(ri.P_coeffs)) / ((1 - T) * (1 - 9 * T))

    assert z(Fraction(1, 81)) == z(Fraction(9))


def test_theta_examples():
    assert theta_n(rank_invariants(5, -2, 1)).theta_n == pytest.approx(math.acos(-1 / math.sqrt(5)), abs=1e-15)
    assert theta_n(rank_invariants(5, -2, 1)).theta_n == pytest.approx(2.034444, abs=1e-6)
    assert theta_n(rank_invariants(3, 0, 3)).theta_n == pytest.approx(math.acos(-2 / math.sqrt(27)), abs=1e-15)
    assert theta_n(rank_invariants(3, 0, 3)).theta_n == pytest.approx(1.965896, abs=1e-6)
    zero = RankInvariants(7, 3, 343, Fraction(0), Fraction(1), (1, 0, 343))
    assert theta_n(zero).theta_n == math.pi / 2


def test_theta_clamps_forged_input():
    ang = theta_n(rank_invariants(2, 5, 1, strict=False))
    assert ang.clamped and ang.theta_n == 0.0


def test_delta_examples():
    d2 = delta_n(rank_invariants(5, -2, 2))
    oracle = math.sqrt(5) * (-0.6) + 0.5 * (math.sqrt(5) - 1 / math.sqrt(5))
    assert d2.delta_n == pytest.approx(oracle, abs=1e-12)
    assert d2.delta_n == pytest.approx(-1 / math.sqrt(5), abs=1e-12)

    ri = rank_invariants(3, 0, 3)
    th = math.acos(-4 / (2 * math.sqrt(27)))
    oracle = 1.5 * (math.pi / 2 - th) + 0.5 * (math.sqrt(3) - 1 / math.sqrt(3))
    assert delta_n(ri).delta_n == pytest.approx(oracle, abs=1e-12)
    assert delta_n(ri).delta_n == pytest.approx(-0.015299, abs=1e-6)

    for p in (11, 101, 10007):
        zero = RankInvariants(p, 5, p**5, Fraction(0), Fraction(1), (1, 0, p**5))
        assert delta_n(zero).delta_n == pytest.approx(0.5 * math.sqrt(p), rel=1e-14)


def test_delta_rank_one_rejected():
    with pytest.raises(DomainError):
        delta_n(rank_invariants(5, 1, 1))


def test_asymptotic_main_term_examples():
    assert asymptotic_main_term(3, 0, 3) == -4
    assert asymptotic_main_term(101, 10, 3) == -180
    assert asymptotic_main_term(101, 10, 2) == -90
    assert asymptotic_main_term(101, 10, 1) == 10


def test_q101_rank3_against_rearranged_recursion():
    a2 = Fraction(1 + 10 - 101)
    a3 = a_via_previous(101, 10, 3, a2)
    assert a_rank_n(beta_sequence(101, 10, 3), 3) == a3
    assert float(a3) == pytest.approx(-180.284, abs=1e-3)


# ---------------------------------------------------------------- properties


@settings(max_examples=60, deadline=None)
@given(hasse_pairs(10**4))
def test_recursion_recheck(qa):
    q, a1 = qa
    bs = beta_sequence(q, a1, 10)
    assert all(bs.recursion_residual(n) == 0 for n in range(1, 11))
    assert all(b > 0 for b in bs.betas[1:])


@settings(max_examples=60, deadline=None)
@given(hasse_pairs())
def test_naturality_and_rank_two(qa):
    q, a1 = qa
    bs = beta_sequence(q, a1, 2)
    assert a_rank_n(bs, 1) == a1
    assert zeta_polynomial(bs, 1).P_coeffs == (1, -a1, q)
    assert a_rank_n(bs, 2) == 1 + a1 - q


@settings(max_examples=40, deadline=None)
@given(hasse_pairs(10**3))
def test_rearranged_recursion_oracle(qa):
    q, a1 = qa
    bs = beta_sequence(q, a1, 9)
    prev = a_rank_n(bs, 2)
    for n in range(3, 10):
        cur = a_via_previous(q, a1, n, prev)
        assert a_rank_n(bs, n) == cur
        prev = cur


@settings(max_examples=40, deadline=None)
@given(hasse_pairs(10**3))
def test_rh_all_ranks(qa):
    q, a1 = qa
    bs = beta_sequence(q, a1, 12)
    for n in range(1, 13):
        ri = zeta_polynomial(bs, n)
        assert rh_check(ri)
        assert ri.P_coeffs[0] * Fraction(1) == bs[n - 1]
        assert tuple(c / bs[n - 1] for c in ri.P_coeffs) == (1, -ri.a_n, ri.Q)


@settings(max_examples=40, deadline=None)
@given(hasse_pairs())
def test_delta2_identity(qa):
    p, a1 = qa
    assert delta_n(rank_invariants(p, a1, 2)).delta_n == pytest.approx(a1 / (2 * math.sqrt(p)), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(hasse_pairs(10**3), hst.integers(1, 8))
def test_theta_cos_invariant(qa, n):
    q, a1 = qa
    ri = rank_invariants(q, a1, n)
    ang = theta_n(ri)
    assert 0 <= ang.theta_n <= math.pi
    # theta sits near pi/2 for large Q, so compare on the normalised scale
    assert math.cos(ang.theta_n) == pytest.approx(float(ri.a_n) / (2 * math.sqrt(ri.Q)), abs=1e-15)


def test_functional_equation_random_samples():
    rng = random.Random(3)
    for q, a1 in [(2, 1), (3, 0), (101, 10), (499, -30)]:
        for n in (1, 2, 5, 12):
            bs = beta_sequence(q, a1, n)
            s = [complex(rng.uniform(-1, 2), rng.uniform(-8, 8)) for _ in range(20)]
            assert functional_equation_check(bs, n, s) <= 1e-9


def _decade_max(fn, lo_exp, hi_exp, count=40):
    rng = random.Random(11)
    out = []
    for k in range(lo_exp, hi_exp):
        ps = [p for p in PRIMES if 10**k <= p < 10 ** (k + 1)] or list(primerange(10**k, 10 ** (k + 1)))
        sample = rng.sample(ps, min(count, len(ps)))
        out.append(max(fn(p, rng.randint(-math.isqrt(4 * p), math.isqrt(4 * p))) for p in sample))
    return out


@pytest.mark.parametrize("n", [2, 3, 5])
def test_small_delta_trend(n):
    maxima = _decade_max(lambda p, a: abs(theta_n(rank_invariants(p, a, n)).theta_n - math.pi / 2), 1, 6)
    assert all(b < a for a, b in zip(maxima, maxima[1:]))


@pytest.mark.parametrize("n", [3, 4, 6])
def test_big_delta_structure_trend(n):
    maxima = _decade_max(
        lambda p, a: abs(delta_n(rank_invariants(p, a, n)).delta_n - a / (2 * math.sqrt(p))), 2, 6
    )
    assert all(b < a for a, b in zip(maxima, maxima[1:]))
    assert maxima[-1] < 1e-2


@pytest.mark.parametrize("n", range(3, 9))
def test_residual_bound_large_q(n):
    rng = random.Random(n)
    for p in rng.sample([p for p in PRIMES if 100 <= p < 10**5], 50):
        a1 = rng.randint(-math.isqrt(4 * p), math.isqrt(4 * p))
        res = abs(a_rank_n(beta_sequence(p, a1, n), n) - asymptotic_main_term(p, a1, n))
        assert float(res) * math.sqrt(p) <= 10 * n
