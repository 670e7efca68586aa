"""Rank-n murmuration series over curve families, and the oscillatory fit.

For the i-th prime p and rank n the per-curve quantity is

    n = 1:   a_p
    n = 2:   a_(p,2) + p - 1
    n >= 3:  (a_(p,n) + (n-1) p + n - 5) / (n - 1)

which is computed exactly and only then converted to float. The series value
is its mean over the curves with usable data at p.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import least_squares

from murmur.errors import BadReductionError, DomainError, EmptyFamilyError
from murmur.family import ApCache, BadPrimePolicy, CurveRecord, FamilyFilter, ap_table
from murmur.plots import scatter_svg
from murmur.primes import first_k_primes
from murmur.zeta import a_rank_n, beta_sequence

FLOAT_FMT = "{:.12g}"


@dataclass(frozen=True)
class SeriesPoint:
    i: int
    p: int
    value: float
    count: int


@dataclass
class MurmurationSeries:
    n: int
    points: list[SeriesPoint]
    filter: FamilyFilter | None = None
    family_size: int = 0
    policy: str = "skip"
    warnings: list[str] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        return [pt.value for pt in self.points]


@dataclass(frozen=True)
class SeriesDiff:
    diffs: list[float]
    max: float
    mean: float


@dataclass(frozen=True)
class FitResult:
    A: float
    alpha: float
    B: float
    beta: float
    residual_rms: float
    converged: bool = True
    x_axis: str = "i"

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * x**self.alpha * np.sin(self.B * x**self.beta)


@lru_cache(maxsize=1 << 16)
def rank_n_term(p: int, ap: int, n: int) -> Fraction:
    """The exact per-curve summand at prime p."""
    if n == 1:
        return Fraction(ap)
    a_n = a_rank_n(beta_sequence(p, ap, n), n)
    if n == 2:
        return a_n + p - 1
    return (a_n + (n - 1) * p + n - 5) / (n - 1)


def f_series(
    family: Sequence[CurveRecord],
    n: int,
    i_max: int,
    policy: BadPrimePolicy = "skip",
    cache: ApCache | None = None,
    workers: int = 1,
    filter: FamilyFilter | None = None,
) -> MurmurationSeries:
    """Average the rank-n summand over the family at p_1, ..., p_(i_max).

    Bad primes are skipped under ``skip``; ``formal`` feeds the ingested a_p
    (if any) through the recursion; ``strict`` refuses them. The policy is
    applied the same way for every n.
    """
    if not family:
        raise EmptyFamilyError("family is empty")
    if n < 1:
        raise DomainError(f"rank must be >= 1, got {n}")
    curves = sorted(family, key=lambda r: r.label)
    primes = list(first_k_primes(i_max))
    tables = [ap_table(rec, primes, cache, workers) for rec in curves]
    series = MurmurationSeries(n, [], filter, len(curves), policy)
    for i, p in enumerate(primes, start=1):
        terms = []
        for rec, table in zip(curves, tables):
            ap = table[p]
            if ap is None:
                if policy == "strict" and p not in rec.bad_ap:
                    raise BadReductionError(f"{rec.label} has bad reduction at p={p}")
                if policy == "skip" or p not in rec.bad_ap:
                    continue
                ap = rec.bad_ap[p]
            terms.append(float(rank_n_term(p, ap, n)))
        if terms:
            value = math.fsum(terms) / len(terms)
        else:
            value = math.nan
            series.warnings.append(f"every curve has bad reduction at p_{i}={p}")
        series.points.append(SeriesPoint(i, p, value, len(terms)))
    return series


def compare_series(s1: MurmurationSeries, s2: MurmurationSeries) -> SeriesDiff:
    grid1 = [(pt.i, pt.p) for pt in s1.points]
    grid2 = [(pt.i, pt.p) for pt in s2.points]
    if grid1 != grid2:
        raise DomainError("series are on different prime grids")
    diffs = [abs(a.value - b.value) for a, b in zip(s1.points, s2.points)]
    finite = [d for d in diffs if math.isfinite(d)]
    if not finite:
        return SeriesDiff(diffs, 0.0, 0.0)
    return SeriesDiff(diffs, max(finite), math.fsum(finite) / len(finite))


# --------------------------------------------------------------------------
# fitting y = A x^alpha sin(B x^beta)


def _model(params, x):
    A, alpha, B, beta = params
    return A * x**alpha * np.sin(B * x**beta)


def _jac(params, x, y):
    A, alpha, B, beta = params
    lx = np.log(x)
    xa = x**alpha
    xb = x**beta
    s = np.sin(B * xb)
    c = np.cos(B * xb)
    return np.column_stack([xa * s, A * xa * lx * s, A * xa * xb * c, A * xa * B * xb * lx * c])


def _grid_search(x, y, top: int):
    """Variable projection over (alpha, B, beta): A is solved in closed form."""
    xmax = x.max()
    xn = x / xmax
    alphas = np.linspace(-1.0, 2.0, 25)
    betas = np.geomspace(0.1, 2.0, 90)
    phase_max = min(math.pi * len(x) / 2, 150.0)
    phases = np.arange(0.25, phase_max, 0.2)
    W = x[None, :] ** alphas[:, None]
    Wy = (W * y).T
    W2 = (W * W).T
    yy = float(y @ y)
    cands = []
    for beta in betas:
        S = np.sin(np.outer(phases, xn**beta))
        num = S @ Wy
        den = (S * S) @ W2
        with np.errstate(divide="ignore", invalid="ignore"):
            rss = np.where(den > 0, yy - num * num / den, np.inf)
        flat = np.argsort(rss, axis=None)[:top]
        for k in flat:
            pi, ai = np.unravel_index(k, rss.shape)
            A = num[pi, ai] / den[pi, ai]
            B = phases[pi] / xmax**beta
            cands.append((float(rss[pi, ai]), (float(A), float(alphas[ai]), float(B), float(beta))))
    cands.sort(key=lambda c: c[0])
    return [c[1] for c in cands[:top]]


def fit_oscillatory(x, y, top: int = 6, x_axis: str = "i") -> FitResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(y) & (x > 0)
    x, y = x[keep], y[keep]
    if len(x) < 8:
        raise DomainError(f"need at least 8 points to fit, got {len(x)}")
    if not np.any(y):
        return FitResult(0.0, 0.0, 1.0, 1.0, 0.0, True, x_axis)
    starts = _grid_search(x, y, top)
    best = None
    for p0 in starts:
        try:
            sol = least_squares(
                lambda p: _model(p, x) - y, p0, jac=lambda p: _jac(p, x, y), method="lm", xtol=1e-15, ftol=1e-15,
                gtol=1e-15, max_nfev=4000,
            )
        except (ValueError, FloatingPointError):
            continue
        if not sol.success or not np.all(np.isfinite(sol.x)):
            continue
        if best is None or sol.cost < best.cost:
            best = sol
    if best is None:
        params = np.array(starts[0])
        converged = False
    else:
        params = best.x
        converged = True
    A, alpha, B, beta = (float(v) for v in params)
    if B < 0:
        A, B = -A, -B
    rms = float(np.sqrt(np.mean((_model((A, alpha, B, beta), x) - y) ** 2)))
    return FitResult(A, alpha, B, beta, rms, converged, x_axis)


def fit_murmuration(series: MurmurationSeries, x: Literal["i", "p"] = "i") -> FitResult:
    xs = [pt.i if x == "i" else pt.p for pt in series.points]
    return fit_oscillatory(xs, series.values, x_axis=x)


# --------------------------------------------------------------------------
# output


def _fmt(v: float) -> str:
    return FLOAT_FMT.format(v)


def series_csv(series: MurmurationSeries) -> str:
    lines = ["i,p,value,count"]
    lines += [f"{pt.i},{pt.p},{_fmt(pt.value)},{pt.count}" for pt in series.points]
    return "\n".join(lines) + "\n"


def series_json(series: MurmurationSeries) -> str:
    flt = series.filter
    doc = {
        "n": series.n,
        "filter": asdict(flt) if flt is not None else None,
        "family_size": series.family_size,
        "bad_prime_policy": series.policy,
        "warnings": series.warnings,
        "points": [
            {"i": pt.i, "p": pt.p, "value": float(_fmt(pt.value)) if math.isfinite(pt.value) else None,
             "count": pt.count}
            for pt in series.points
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def series_svg(series: MurmurationSeries, x: str = "i") -> str:
    xs = [pt.i if x == "i" else pt.p for pt in series.points]
    r = series.filter.rank if series.filter is not None else None
    title = f"f_(r={r if r is not None else '*'}, n={series.n})"
    return scatter_svg(xs, series.values, title=title, xlabel="i" if x == "i" else "p_i", ylabel="average")


def emit_series(series: MurmurationSeries, path, format: Literal["csv", "json", "svg"] = "csv", x: str = "i") -> Path:
    path = Path(path)
    if format == "csv":
        text = series_csv(series)
    elif format == "json":
        text = series_json(series)
    elif format == "svg":
        text = series_svg(series, x)
    else:
        raise DomainError(f"unknown output format {format!r}")
    path.write_text(text, encoding="utf-8")
    return path


def read_series_csv(path) -> list[SeriesPoint]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            SeriesPoint(int(r["i"]), int(r["p"]), float(r["value"]), int(r["count"])) for r in csv.DictReader(fh)
        ]
