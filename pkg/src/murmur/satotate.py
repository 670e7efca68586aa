"""Empirical Sato-Tate statistics for the rank-n Delta invariant of one curve.

Each good prime p <= N gives a sample: Delta_n at p for n >= 2, or the
normalised trace a_p / (2 sqrt p) at rank one. The angle
theta~ = arccos(clamp(Delta, -1, 1)) is compared against the law
(2/pi) sin^2 theta on [0, pi], whose CDF is (theta - sin theta cos theta)/pi.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.stats import kstest

from murmur.curves import NAIVE_CUTOFF, CurveOverQ, is_cm, reduce
from murmur.errors import CMCurveError, DomainError
from murmur.family import ApCache, CurveRecord, ap_table
from murmur.plots import histogram_svg, scatter_svg
from murmur.primes import sieve
from murmur.zeta import delta_n, rank_invariants

ClampPolicy = Literal["include", "exclude"]
CLAMP_POLICIES = ("include", "exclude")


@dataclass(frozen=True)
class STSample:
    p: int
    delta: float
    theta_tilde: float
    clamped: bool


@dataclass
class STReport:
    n: int
    N: int
    sample_count: int
    clamp_count: int
    bins: list[float]
    counts: list[int]
    ks_statistic: float
    bad_primes: list[int] = field(default_factory=list)
    clamp_policy: str = "include"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "N": self.N,
            "sample_count": self.sample_count,
            "clamp_count": self.clamp_count,
            "clamp_policy": self.clamp_policy,
            "bad_primes": self.bad_primes,
            "ks": float(f"{self.ks_statistic:.12g}"),
            "bins": [float(f"{b:.12g}") for b in self.bins],
            "counts": self.counts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def st_cdf(theta: float) -> float:
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta={theta} outside [0, pi]")
    return (theta - math.sin(theta) * math.cos(theta)) / math.pi


def st_pdf(theta: float) -> float:
    return 2.0 / math.pi * math.sin(theta) ** 2


def _cdf_vec(theta):
    theta = np.clip(np.asarray(theta, dtype=float), 0.0, math.pi)
    return (theta - np.sin(theta) * np.cos(theta)) / math.pi


def sample_from_delta(p: int, delta: float, clamped: bool = False) -> STSample:
    out = delta < -1.0 or delta > 1.0
    return STSample(p, delta, math.acos(min(1.0, max(-1.0, delta))), clamped or out)


def sample_at(p: int, ap: int, n: int) -> STSample:
    if n == 1:
        return sample_from_delta(p, ap / (2.0 * math.sqrt(p)))
    ad = delta_n(rank_invariants(p, ap, n))
    return sample_from_delta(p, ad.delta_n, ad.clamped)


def bad_primes_up_to(curve: CurveOverQ, N: int) -> list[int]:
    return [int(p) for p in sieve(N) if not reduce(curve, int(p)).good]


def delta_samples(
    curve: CurveOverQ | CurveRecord,
    n: int,
    N: int,
    allow_cm: bool = False,
    cache: ApCache | None = None,
    workers: int = 1,
    cutoff: int = NAIVE_CUTOFF,
) -> list[STSample]:
    """One sample per good prime p <= N; bad primes are skipped."""
    base = curve.curve if isinstance(curve, CurveRecord) else curve
    if n < 1:
        raise DomainError(f"rank must be >= 1, got {n}")
    if is_cm(base) and not allow_cm:
        raise CMCurveError(f"{base.key} has complex multiplication; Sato-Tate does not apply")
    table = ap_table(base, (int(p) for p in sieve(N)), cache, workers, cutoff)
    return [sample_at(p, ap, n) for p, ap in table.items() if ap is not None]


def _thetas(samples: Iterable[STSample | float]) -> np.ndarray:
    return np.array([s.theta_tilde if isinstance(s, STSample) else float(s) for s in samples], dtype=float)


def ks_statistic(samples: Sequence[STSample | float]) -> float:
    """Sup distance between the ECDF of theta~ and the Sato-Tate CDF."""
    thetas = _thetas(samples)
    if thetas.size == 0:
        raise DomainError("KS statistic of an empty sample")
    return float(kstest(thetas, _cdf_vec).statistic)


def histogram(samples: Sequence[STSample | float], bins: int) -> tuple[list[float], list[int]]:
    """Equal-width bins on [0, pi], half-open except the last."""
    if bins < 1:
        raise DomainError("need at least one bin")
    counts, edges = np.histogram(_thetas(samples), bins=bins, range=(0.0, math.pi))
    return [float(e) for e in edges], [int(c) for c in counts]


def build_report(
    samples: Sequence[STSample],
    n: int,
    N: int,
    bins: int = 20,
    clamp_policy: ClampPolicy = "include",
    bad_primes: Sequence[int] = (),
) -> STReport:
    """Clamped samples sit at 0 or pi under ``include``; ``exclude`` drops them."""
    clamp_count = sum(s.clamped for s in samples)
    used = [s for s in samples if not s.clamped] if clamp_policy == "exclude" else list(samples)
    edges, counts = histogram(used, bins)
    ks = ks_statistic(used) if used else 1.0
    return STReport(n, N, len(used), clamp_count, edges, counts, ks, list(bad_primes), clamp_policy)


def samples_csv(samples: Sequence[STSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "delta", "theta_tilde", "clamped"])
    for s in samples:
        w.writerow([s.p, f"{s.delta:.12g}", f"{s.theta_tilde:.12g}", int(s.clamped)])
    return buf.getvalue()


def report_svg(report: STReport, title: str = "") -> str:
    return histogram_svg(report.bins, report.counts, st_pdf, title=title or f"Sato-Tate, n={report.n}, N={report.N}")


def scatter_svg_samples(samples: Sequence[STSample], n: int) -> str:
    return scatter_svg([s.p for s in samples], [s.delta for s in samples], f"Delta_n, n={n}", "p", "Delta")
