"""Rank-n non-abelian zeta invariants of elliptic curves over prime fields.

The core objects are the beta invariants of a curve over F_q, produced by an
exact two-step recursion from the Frobenius trace. Everything else (rank-n
a-invariants, zeta polynomials, angles, the normalised Delta statistic,
family averages and Sato-Tate samples) is derived from them.
"""

from murmur.curves import (
    CurveOverQ,
    PointCount,
    ReducedCurve,
    count_points,
    discriminant,
    is_cm,
    j_invariant,
    reduce,
)
from murmur.zeta import (
    AngleData,
    BetaSequence,
    RankInvariants,
    a_rank_n,
    angle_data,
    asymptotic_main_term,
    beta_sequence,
    counting_miracle_alpha,
    delta_n,
    functional_equation_check,
    rh_check,
    theta_n,
    zeta_eval,
    zeta_polynomial,
)

__all__ = [
    "AngleData",
    "BetaSequence",
    "CurveOverQ",
    "PointCount",
    "RankInvariants",
    "ReducedCurve",
    "a_rank_n",
    "angle_data",
    "asymptotic_main_term",
    "beta_sequence",
    "count_points",
    "counting_miracle_alpha",
    "delta_n",
    "discriminant",
    "functional_equation_check",
    "is_cm",
    "j_invariant",
    "reduce",
    "rh_check",
    "theta_n",
    "zeta_eval",
    "zeta_polynomial",
]

__version__ = "0.1.0"
