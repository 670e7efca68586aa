"""Exact rank-n zeta invariants of an elliptic curve over F_q.

Everything is driven by the beta invariants, defined by

    (q^n - 1) b_n = (q^n + q^(n-1) - a) b_(n-1) - (q^(n-1) - q) b_(n-2),
    b_0 = 1, b_(-1) = 0,

where a is the rank-one Frobenius trace. The rank-n zeta function is

    zeta_n(s) = b_(n-1) + b_n (Q-1) T / ((1-T)(1-QT)),   Q = q^n, T = Q^(-s),

with numerator b_(n-1) (1 - a_n T + Q T^2). All of this is computed in exact
rationals; floats only appear in the angle and Delta normalisations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import mpmath

from murmur.errors import DomainError, NonPositiveBetaError, PoleError

DEFAULT_N_MAX = 16


@dataclass(frozen=True)
class BetaSequence:
    """beta_(-1), beta_0, ..., beta_(n_max) for fixed (q, a1).

    ``betas[k]`` holds beta_(k-1); use ``bs[n]`` or ``bs.beta(n)`` for the
    natural index n >= -1.
    """

    q: int
    a1: int
    betas: tuple[Fraction, ...]

    @property
    def n_max(self) -> int:
        return len(self.betas) - 2

    def beta(self, n: int) -> Fraction:
        if not -1 <= n <= self.n_max:
            raise IndexError(f"beta_{n} outside computed range -1..{self.n_max}")
        return self.betas[n + 1]

    __getitem__ = beta

    def recursion_residual(self, n: int) -> Fraction:
        """Left minus right side of the recursion at index n (zero when exact)."""
        q, a = self.q, self.a1
        return (q**n - 1) * self[n] - (q**n + q ** (n - 1) - a) * self[n - 1] + (q ** (n - 1) - q) * self[n - 2]


@dataclass(frozen=True)
class RankInvariants:
    q: int
    n: int
    Q: int
    a_n: Fraction
    alpha_n: Fraction
    P_coeffs: tuple[Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class AngleData:
    theta_n: float
    delta_n: float | None = None
    clamped: bool = False


def beta_sequence(q: int, a1: int, n_max: int = DEFAULT_N_MAX, strict: bool = True) -> BetaSequence:
    """Run the two-step recursion up to beta_(n_max).

    With ``strict`` (the default) a non-positive beta raises, which is how an
    a1 outside the Hasse range usually shows up. Pass ``strict=False`` to probe
    forged inputs.
    """
    if q < 2:
        raise DomainError(f"q must be at least 2, got {q}")
    if n_max < 0:
        raise DomainError(f"n_max must be non-negative, got {n_max}")
    betas = [Fraction(0), Fraction(1)]
    qn1 = 1  # q^(n-1)
    for n in range(1, n_max + 1):
        qn = qn1 * q
        b = ((qn + qn1 - a1) * betas[-1] - (qn1 - q) * betas[-2]) / (qn - 1)
        if strict and b <= 0:
            hasse = "inside" if a1 * a1 <= 4 * q else "outside"
            raise NonPositiveBetaError(
                f"beta_{n} = {b} <= 0 for q={q}, a1={a1} (a1 is {hasse} the Hasse range)"
            )
        betas.append(b)
        qn1 = qn
    return BetaSequence(q, a1, tuple(betas))


def _check_rank(bs: BetaSequence, n: int) -> None:
    if not 1 <= n <= bs.n_max:
        raise IndexError(f"rank {n} outside 1..{bs.n_max}")


def a_rank_n(bs: BetaSequence, n: int) -> Fraction:
    """a_n = (Q+1) - (Q-1) beta_n / beta_(n-1)."""
    _check_rank(bs, n)
    Q = bs.q**n
    prev = bs[n - 1]
    if prev == 0:
        raise DomainError(f"beta_{n - 1} vanishes; a_{n} undefined")
    return (Q + 1) - (Q - 1) * bs[n] / prev


def counting_miracle_alpha(bs: BetaSequence, n: int) -> Fraction:
    """alpha_n(0), which equals beta_(n-1)."""
    if n < 1 or n - 1 > bs.n_max:
        raise IndexError(f"alpha_{n} needs beta_{n - 1}, outside -1..{bs.n_max}")
    return bs[n - 1]


def zeta_polynomial(bs: BetaSequence, n: int) -> RankInvariants:
    a = a_rank_n(bs, n)
    Q = bs.q**n
    alpha = bs[n - 1]
    return RankInvariants(bs.q, n, Q, a, alpha, (alpha, -alpha * a, alpha * Q))


def rank_invariants(q: int, a1: int, n: int, strict: bool = True) -> RankInvariants:
    return zeta_polynomial(beta_sequence(q, a1, n, strict=strict), n)


def rh_check(ri: RankInvariants) -> bool:
    """Exact test that both roots of P lie on |T| = Q^(-1/2)."""
    return ri.a_n * ri.a_n <= 4 * ri.Q


def asymptotic_main_term(q: int, a1: int, n: int) -> Fraction:
    if n < 1:
        raise DomainError(f"rank must be >= 1, got {n}")
    if n == 1:
        return Fraction(a1)
    if n == 2:
        return Fraction(1 + a1 - q)
    return Fraction((5 - n) + (n - 1) * a1 - (n - 1) * q)


# --------------------------------------------------------------------------
# complex evaluation


def _dps_for(Q: int) -> int:
    # b_(n-1) + b_n X cancels to relative size ~Q^(-1) near the critical line
    return 30 + 2 * len(str(Q))


def _eval_beta_form(bs: BetaSequence, n: int, T) -> mpmath.mpc:
    Q = bs.q**n
    T = mpmath.mpc(T)
    one = mpmath.mpf(1)
    if abs(one - T) < mpmath.mpf(10) ** (-mpmath.mp.dps // 2) or abs(one - Q * T) < mpmath.mpf(10) ** (
        -mpmath.mp.dps // 2
    ):
        raise PoleError(f"T={complex(T)} is a pole of zeta_{n} (Q={Q})")
    b0 = mpmath.mpf(bs[n - 1].numerator) / bs[n - 1].denominator
    b1 = mpmath.mpf(bs[n].numerator) / bs[n].denominator
    return b0 + b1 * (Q - 1) * T / ((one - T) * (one - Q * T))


def zeta_eval(bs: BetaSequence, n: int, T: complex) -> complex:
    """zeta_n at T = Q^(-s), from the beta form."""
    _check_rank(bs, n)
    with mpmath.workdps(_dps_for(bs.q**n)):
        return complex(_eval_beta_form(bs, n, T))


def zeta_eval_rational(ri: RankInvariants, T: complex) -> complex:
    """zeta_n at T from the numerator polynomial P(T) / ((1-T)(1-QT))."""
    if T == 1 or T * ri.Q == 1:
        raise PoleError(f"T={T} is a pole of zeta_{ri.n}")
    with mpmath.workdps(_dps_for(ri.Q)):
        T = mpmath.mpc(T)
        c = [mpmath.mpf(x.numerator) / x.denominator for x in ri.P_coeffs]
        val = (c[0] + c[1] * T + c[2] * T * T) / ((1 - T) * (1 - ri.Q * T))
        return complex(val)


def functional_equation_check(
    bs: BetaSequence, n: int, samples: Iterable[complex], relative: bool = True
) -> float:
    """Largest gap |zeta(1-s) - zeta(s)| over the sample points.

    The gap is scaled by max(|zeta(s)|, |zeta(1-s)|) unless ``relative`` is
    false; either way it is formed at working precision before rounding.
    """
    _check_rank(bs, n)
    Q = bs.q**n
    worst = 0.0
    with mpmath.workdps(_dps_for(Q)):
        logQ = mpmath.log(Q)
        for s in samples:
            s = mpmath.mpc(s)
            z = _eval_beta_form(bs, n, mpmath.exp(-s * logQ))
            zr = _eval_beta_form(bs, n, mpmath.exp((s - 1) * logQ))
            scale = max(abs(z), abs(zr)) if relative else 1
            if scale == 0:
                continue
            worst = max(worst, float(abs(zr - z) / scale))
    return worst


# --------------------------------------------------------------------------
# angles


def _normalised_trace(ri: RankInvariants) -> tuple[float, bool]:
    """a_n / (2 sqrt(Q)) clamped to [-1, 1], and whether clamping happened."""
    sq = ri.a_n * ri.a_n / (4 * ri.Q)
    if sq > 1:
        return math.copysign(1.0, ri.a_n), True
    return math.copysign(math.sqrt(float(sq)), ri.a_n), False


def theta_n(ri: RankInvariants) -> AngleData:
    x, clamped = _normalised_trace(ri)
    return AngleData(math.acos(x), None, clamped)


def delta_n(ri: RankInvariants, angle: AngleData | None = None) -> AngleData:
    """The normalised big-Delta statistic for rank n >= 2.

    pi/2 - theta_n is evaluated as asin of the normalised trace; for large Q
    the trace is tiny and subtracting acos from pi/2 would lose all digits.
    """
    n, q = ri.n, ri.q
    if n < 2:
        raise DomainError("Delta is defined for n >= 2 only; use theta_n at rank one")
    x, clamped = _normalised_trace(ri)
    if angle is None:
        angle = AngleData(math.acos(x), None, clamped)
    rq = math.sqrt(q)
    if n == 2:
        # cos(theta_2) is x itself
        delta = rq * x + 0.5 * (rq - 1 / rq)
    else:
        mag = q ** ((n - 1) / 2) / (n - 1)
        delta = mag * math.asin(x) + 0.5 * (rq + (n - 5) / ((n - 1) * rq))
    return AngleData(angle.theta_n, delta, angle.clamped or clamped)


def angle_data(ri: RankInvariants) -> AngleData:
    if ri.n == 1:
        return theta_n(ri)
    return delta_n(ri)
