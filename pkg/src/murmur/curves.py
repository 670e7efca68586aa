"""Weierstrass models over Q and F_p, reduction, point counting and CM detection.

Models are kept in general Weierstrass form

    y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6

so that reduction at p = 2 and p = 3 never divides by 2 or 3. Input models
are assumed minimal (the LMFDB convention); no minimisation is attempted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Literal, Sequence

import numpy as np
from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod

from murmur.errors import AmbiguousOrderError, BadReductionError, DomainError, SingularCurveError

NAIVE_CUTOFF = 2**14
# numpy enumeration keeps x*x below 2^62
NAIVE_MAX_P = 2**31

# The 13 j-invariants of elliptic curves over Q with complex multiplication.
CM_J_INVARIANTS = frozenset(
    {
        0,
        1728,
        -3375,
        8000,
        -32768,
        54000,
        287496,
        -884736,
        -12288000,
        16581375,
        -884736000,
        -147197952000,
        -262537412640768000,
    }
)

Strategy = Literal["auto", "naive", "bsgs"]


def b_invariants(a1: int, a2: int, a3: int, a4: int, a6: int) -> tuple[int, int, int, int]:
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def c_invariants(a1: int, a2: int, a3: int, a4: int, a6: int) -> tuple[int, int]:
    b2, b4, b6, _ = b_invariants(a1, a2, a3, a4, a6)
    return b2 * b2 - 24 * b4, -(b2**3) + 36 * b2 * b4 - 216 * b6


def _disc(a1: int, a2: int, a3: int, a4: int, a6: int) -> int:
    b2, b4, b6, b8 = b_invariants(a1, a2, a3, a4, a6)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class CurveOverQ:
    """Integral Weierstrass model over Q with optional LMFDB metadata."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: str | None = None
    conductor: int | None = None
    arithmetic_rank: int | None = None
    cm_flag: bool | None = None

    def __post_init__(self) -> None:
        if _disc(*self.ainvs) == 0:
            raise SingularCurveError(f"singular Weierstrass model {list(self.ainvs)}")
        if self.conductor is not None and self.conductor < 1:
            raise DomainError(f"conductor must be positive, got {self.conductor}")

    @classmethod
    def from_ainvs(cls, ainvs: Sequence[int], **meta) -> CurveOverQ:
        if len(ainvs) != 5:
            raise DomainError(f"expected 5 a-invariants, got {len(ainvs)}")
        return cls(*(int(a) for a in ainvs), **meta)

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def key(self) -> str:
        """Stable identifier: the label, or the a-invariant list."""
        if self.label:
            return self.label
        return "[" + ",".join(str(a) for a in self.ainvs) + "]"


@dataclass(frozen=True)
class ReducedCurve:
    p: int
    coeffs: tuple[int, int, int, int, int]
    good: bool

    def __post_init__(self) -> None:
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise DomainError("coefficients must be canonical residues in [0, p)")
        if self.good and _disc(*self.coeffs) % self.p == 0:
            raise DomainError(f"model is singular mod {self.p} but marked good")


@dataclass(frozen=True)
class PointCount:
    p: int
    N: int
    a1_trace: int = field(init=False)

    def __post_init__(self) -> None:
        t = self.p + 1 - self.N
        object.__setattr__(self, "a1_trace", t)
        if t * t > 4 * self.p:
            raise AssertionError(f"Hasse bound violated: a_p={t}, p={self.p}")


def discriminant(curve: CurveOverQ | Sequence[int]) -> int:
    """Discriminant of the supplied model; zero means the model is singular."""
    ainvs = curve.ainvs if isinstance(curve, CurveOverQ) else tuple(curve)
    return _disc(*ainvs)


def j_invariant(curve: CurveOverQ | Sequence[int]) -> Fraction:
    ainvs = curve.ainvs if isinstance(curve, CurveOverQ) else tuple(curve)
    d = _disc(*ainvs)
    if d == 0:
        raise SingularCurveError("j-invariant undefined for a singular model")
    c4, _ = c_invariants(*ainvs)
    return Fraction(c4**3, d)


def is_cm(curve: CurveOverQ) -> bool:
    """True iff the curve has CM; an explicit ``cm_flag`` wins over the table."""
    if curve.cm_flag is not None:
        return curve.cm_flag
    j = j_invariant(curve)
    return j.denominator == 1 and j.numerator in CM_J_INVARIANTS


def reduce(curve: CurveOverQ, p: int) -> ReducedCurve:
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    coeffs = tuple(a % p for a in curve.ainvs)
    if curve.conductor is not None:
        good = curve.conductor % p != 0
    else:
        good = discriminant(curve) % p != 0
    # a non-minimal model can be singular at a prime not dividing the conductor
    good = good and _disc(*coeffs) % p != 0
    return ReducedCurve(p, coeffs, good)


# --------------------------------------------------------------------------
# naive enumeration


def _count_pairs(coeffs: Sequence[int], p: int) -> int:
    a1, a2, a3, a4, a6 = coeffs
    n = 1
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                n += 1
    return n


_square_tables: dict[int, np.ndarray] = {}


def _squares_mod(p: int) -> np.ndarray:
    table = _square_tables.get(p)
    if table is None:
        x = np.arange(p, dtype=np.int64)
        table = np.zeros(p, dtype=bool)
        table[(x * x) % p] = True
        if len(_square_tables) > 64:
            _square_tables.clear()
        _square_tables[p] = table
    return table


def _count_naive(coeffs: Sequence[int], p: int) -> int:
    if p < 5:
        return _count_pairs(coeffs, p)
    if p >= NAIVE_MAX_P:
        raise DomainError(f"naive enumeration is not supported for p={p}")
    a1, a2, a3, a4, a6 = coeffs
    x = np.arange(p, dtype=np.int64)
    # for odd p the number of y over a given x is 1 + chi(disc of the quadratic in y)
    lin = (a1 * x + a3) % p
    cub = (((x + a2) % p * x + a4) % p * x + a6) % p
    d = (lin * lin + 4 * cub) % p
    sq = _squares_mod(p)
    nonzero = d != 0
    chi = np.where(sq[d], 1, -1)
    return 1 + p + int(chi[nonzero].sum())


# --------------------------------------------------------------------------
# baby-step giant-step on the short model y^2 = x^3 + A x + B (p >= 5)


def _ec_add(P, Q, A, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _ec_mul(k, P, A, p):
    R = None
    while k:
        if k & 1:
            R = _ec_add(R, P, A, p)
        k >>= 1
        if k:
            P = _ec_add(P, P, A, p)
    return R


def _random_point(rng: random.Random, A: int, B: int, p: int):
    while True:
        x = rng.randrange(p)
        f = (x * x * x + A * x + B) % p
        if f == 0:
            return (x, 0)
        if pow(f, (p - 1) // 2, p) == 1:
            if p % 4 == 3:
                y = pow(f, (p + 1) // 4, p)
            else:
                y = sqrt_mod(f, p)
            return (x, y)


def _point_order(P, A: int, p: int, lo: int, hi: int) -> int:
    """Exact order of P, given that some multiple of it is killed in [lo, hi]."""
    w = hi - lo
    s = isqrt(w) + 1
    table: dict = {}
    R = None
    for j in range(s):
        if j and R is None:
            return j
        table.setdefault(R, j)
        R = _ec_add(R, P, A, p)
    G = R
    Rk = _ec_mul(lo, P, A, p)
    m = None
    for k in range(w // s + 1):
        neg = None if Rk is None else (Rk[0], -Rk[1] % p)
        j = table.get(neg)
        if j is not None and lo + k * s + j <= hi:
            m = lo + k * s + j
            break
        Rk = _ec_add(Rk, G, A, p)
    if m is None:
        raise AmbiguousOrderError(f"no multiple of the point vanishes in [{lo}, {hi}] (p={p})")
    order = m
    for ell in factorint(m):
        while order % ell == 0 and _ec_mul(order // ell, P, A, p) is None:
            order //= ell
    return order


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _multiples(L: int, lo: int, hi: int) -> list[int]:
    first = -(-lo // L) * L
    return list(range(first, hi + 1, L))


def _count_bsgs(coeffs: Sequence[int], p: int, max_points: int = 8) -> int:
    """Group order via point orders; Mestre's twist trick settles leftovers."""
    c4, c6 = c_invariants(*coeffs)
    A, B = (-27 * c4) % p, (-54 * c6) % p
    r = isqrt(4 * p)
    lo, hi = p + 1 - r, p + 1 + r
    rng = random.Random(f"{p}:{A}:{B}")

    L = 1
    for _ in range(max_points):
        P = _random_point(rng, A, B, p)
        L = _lcm(L, _point_order(P, A, p, lo, hi))
        cands = _multiples(L, lo, hi)
        if len(cands) == 1:
            return cands[0]

    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    At, Bt = A * d * d % p, B * d * d * d % p
    Lt = 1
    for _ in range(max_points):
        P = _random_point(rng, At, Bt, p)
        Lt = _lcm(Lt, _point_order(P, At, p, lo, hi))
        cands = [n for n in _multiples(L, lo, hi) if (2 * p + 2 - n) % Lt == 0]
        if len(cands) == 1:
            return cands[0]
    raise AmbiguousOrderError(f"BSGS left {len(cands)} candidate orders at p={p}")


def count_points(rc: ReducedCurve, strategy: Strategy = "auto", cutoff: int = NAIVE_CUTOFF) -> PointCount:
    """Number of F_p-points of a good reduction, infinity included.

    ``auto`` enumerates for p <= cutoff and uses BSGS above. BSGS falls back to
    enumeration if neither the curve nor its twist pins the order.
    """
    if not rc.good:
        raise BadReductionError(f"bad reduction at p={rc.p}")
    p = rc.p
    if strategy == "auto":
        strategy = "naive" if p <= cutoff else "bsgs"
    if strategy == "naive" or p < 5:
        return PointCount(p, _count_naive(rc.coeffs, p))
    if strategy != "bsgs":
        raise DomainError(f"unknown counting strategy {strategy!r}")
    try:
        n = _count_bsgs(rc.coeffs, p)
    except AmbiguousOrderError:
        n = _count_naive(rc.coeffs, p)
    return PointCount(p, n)


def trace_of_frobenius(curve: CurveOverQ, p: int, strategy: Strategy = "auto", cutoff: int = NAIVE_CUTOFF) -> int:
    return count_points(reduce(curve, p), strategy, cutoff).a1_trace


def singular_trace(curve: CurveOverQ, p: int) -> int:
    """p + 1 - #(all points incl. the singular one) of a bad reduction.

    For multiplicative reduction this is the usual +1/-1 and for additive
    reduction 0, matching LMFDB's a_p at bad primes when the model is minimal.
    """
    coeffs = tuple(a % p for a in curve.ainvs)
    if p < 5:
        n = _count_pairs(coeffs, p)
    else:
        n = _count_naive(coeffs, p)
    return p + 1 - n
