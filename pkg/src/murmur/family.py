"""Curve families from LMFDB-style CSV exports, and a persistent a_p cache.

Family CSV (UTF-8, decimal integers)::

    label,isogeny_class,a1,a2,a3,a4,a6,conductor,rank[,cm][,bad_ap_json]

``cm`` is true/false/blank; ``bad_ap_json`` is a JSON object mapping bad
primes to their ingested a_p, e.g. ``{"37": -1}``. An optional first line
``# schema: murmur-family/1`` pins the format version.

Cache file: append-only CSV ``label,p,ap``.
"""

from __future__ import annotations

import csv
import io
import json
import os
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Sequence

from murmur.curves import NAIVE_CUTOFF, CurveOverQ, count_points, reduce
from murmur.errors import BadReductionError, DomainError, ParseError, SchemaError

SCHEMA_VERSION = 1
REQUIRED_COLUMNS = ["label", "isogeny_class", "a1", "a2", "a3", "a4", "a6", "conductor", "rank"]
OPTIONAL_COLUMNS = ["cm", "bad_ap_json"]

BadPrimePolicy = Literal["skip", "formal", "strict"]
BAD_PRIME_POLICIES = ("skip", "formal", "strict")


@dataclass(frozen=True)
class CurveRecord:
    label: str
    isogeny_class: str
    ainvs: tuple[int, int, int, int, int]
    conductor: int
    arithmetic_rank: int
    cm_flag: bool | None = None
    bad_ap: dict[int, int] = field(default_factory=dict, compare=False, hash=False)

    @property
    def curve(self) -> CurveOverQ:
        return CurveOverQ(
            *self.ainvs,
            label=self.label,
            conductor=self.conductor,
            arithmetic_rank=self.arithmetic_rank,
            cm_flag=self.cm_flag,
        )


@dataclass(frozen=True)
class FamilyFilter:
    rank: int | None = None
    n1: int = 1
    n2: int | None = None

    def __post_init__(self):
        if self.n1 < 1:
            raise DomainError(f"conductor lower bound must be >= 1, got {self.n1}")
        if self.n2 is not None and self.n2 < self.n1:
            raise DomainError(f"empty conductor range [{self.n1}, {self.n2}]")
        if self.rank is not None and self.rank < 0:
            raise DomainError("arithmetic rank must be non-negative")

    def accepts(self, rec: CurveRecord) -> bool:
        if self.rank is not None and rec.arithmetic_rank != self.rank:
            return False
        if rec.conductor < self.n1:
            return False
        return self.n2 is None or rec.conductor <= self.n2

    @classmethod
    def parse_range(cls, rank: int | None, spec: str | None) -> FamilyFilter:
        """Build from a rank and an ``N1:N2`` conductor string."""
        if not spec:
            return cls(rank)
        try:
            lo, _, hi = spec.partition(":")
            return cls(rank, int(lo) if lo else 1, int(hi) if hi else None)
        except ValueError as exc:
            raise ParseError(f"bad conductor range {spec!r}; expected N1:N2") from exc


def _parse_bool(text: str) -> bool | None:
    t = text.strip().lower()
    if t in ("", "none", "null"):
        return None
    if t in ("1", "true", "yes", "t"):
        return True
    if t in ("0", "false", "no", "f"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_record(row: dict[str, str]) -> CurveRecord:
    ainvs = tuple(int(row[k]) for k in ("a1", "a2", "a3", "a4", "a6"))
    bad = {}
    raw = (row.get("bad_ap_json") or "").strip()
    if raw:
        bad = {int(p): int(ap) for p, ap in json.loads(raw).items()}
    rec = CurveRecord(
        label=row["label"].strip(),
        isogeny_class=row["isogeny_class"].strip(),
        ainvs=ainvs,
        conductor=int(row["conductor"]),
        arithmetic_rank=int(row["rank"]),
        cm_flag=_parse_bool(row.get("cm") or ""),
        bad_ap=bad,
    )
    rec.curve  # validates the model
    return rec


def read_family(path: str | os.PathLike) -> list[CurveRecord]:
    """Parse every record in the file, no filtering."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read family file {path}: {exc}") from exc
    lines = text.splitlines(keepends=True)
    offset = 0
    if lines and lines[0].startswith("#"):
        head = lines[0].lstrip("#").strip()
        if head.startswith("schema:"):
            version = head.split(":", 1)[1].strip()
            if version != f"murmur-family/{SCHEMA_VERSION}":
                raise SchemaError(f"{path}: unsupported schema {version!r}")
        offset = 1
    reader = csv.DictReader(io.StringIO("".join(lines[offset:])))
    header = reader.fieldnames or []
    if header[: len(REQUIRED_COLUMNS)] != REQUIRED_COLUMNS or any(
        c not in OPTIONAL_COLUMNS for c in header[len(REQUIRED_COLUMNS) :]
    ):
        raise SchemaError(f"{path}: header {header} does not match {REQUIRED_COLUMNS + OPTIONAL_COLUMNS}")
    records = []
    for row in reader:
        lineno = reader.line_num + offset
        try:
            records.append(_parse_record(row))
        except (ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return records


def dedupe_records(records: Iterable[CurveRecord]) -> list[CurveRecord]:
    """One representative per isogeny class: the lexicographically smallest label."""
    best: dict[str, CurveRecord] = {}
    for rec in records:
        cur = best.get(rec.isogeny_class)
        if cur is None or rec.label < cur.label:
            best[rec.isogeny_class] = rec
    return sorted(best.values(), key=lambda r: r.label)


def load_family(path, filter: FamilyFilter | None = None, dedupe: bool = True) -> list[CurveRecord]:
    records = read_family(path)
    if filter is not None:
        records = [r for r in records if filter.accepts(r)]
    if dedupe:
        return dedupe_records(records)
    return sorted(records, key=lambda r: r.label)


def write_family(records: Sequence[CurveRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema: murmur-family/{SCHEMA_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REQUIRED_COLUMNS + OPTIONAL_COLUMNS)
        for r in records:
            cm = "" if r.cm_flag is None else str(r.cm_flag).lower()
            bad = json.dumps({str(p): ap for p, ap in sorted(r.bad_ap.items())}) if r.bad_ap else ""
            w.writerow([r.label, r.isogeny_class, *r.ainvs, r.conductor, r.arithmetic_rank, cm, bad])


def find_record(path, label: str) -> CurveRecord:
    for rec in read_family(path):
        if rec.label == label:
            return rec
    raise ParseError(f"label {label!r} not found in {path}")


# --------------------------------------------------------------------------
# a_p cache


class ApCache:
    """Map (curve key, p) -> a_p, optionally backed by an append-only CSV.

    Writes are buffered and appended under a lock by ``flush``; a torn last
    line left by a crash is truncated away on load.
    """

    HEADER = "label,p,ap\n"

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path else None
        self._data: dict[tuple[str, int], int] = {}
        self._pending: list[tuple[str, int, int]] = []
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    @classmethod
    def from_env(cls, path=None) -> ApCache:
        return cls(path or os.environ.get("MURMUR_CACHE") or None)

    def _load(self) -> None:
        raw = self.path.read_bytes()
        good_end = 0
        pos = 0
        for line in raw.splitlines(keepends=True):
            end = pos + len(line)
            pos = end
            if not line.endswith(b"\n"):
                break
            text = line.decode("utf-8").strip()
            if not text or text == self.HEADER.strip():
                good_end = end
                continue
            try:
                label, p, ap = text.rsplit(",", 2)
                self._data[(label, int(p))] = int(ap)
            except ValueError:
                break
            good_end = end
        if good_end < len(raw):
            with open(self.path, "r+b") as fh:
                fh.truncate(good_end)

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, key) -> bool:
        return key in self._data

    def get(self, label: str, p: int) -> int | None:
        return self._data.get((label, p))

    def put(self, label: str, p: int, ap: int) -> None:
        with self._lock:
            if self._data.get((label, p)) == ap:
                return
            self._data[(label, p)] = ap
            self._pending.append((label, p, ap))

    def flush(self) -> None:
        with self._lock:
            if self.path is None or not self._pending:
                self._pending.clear()
                return
            new = not self.path.exists() or self.path.stat().st_size == 0
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8", newline="") as fh:
                if new:
                    fh.write(self.HEADER)
                fh.writelines(f"{label},{p},{ap}\n" for label, p, ap in self._pending)
            self._pending.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.flush()


def _unpack(curve) -> tuple[CurveOverQ, dict[int, int]]:
    if isinstance(curve, CurveRecord):
        return curve.curve, curve.bad_ap
    return curve, {}


def get_ap(
    cache: ApCache | None,
    curve: CurveOverQ | CurveRecord,
    p: int,
    policy: BadPrimePolicy = "skip",
    bad_ap: dict[int, int] | None = None,
    cutoff: int = NAIVE_CUTOFF,
) -> int | None:
    """a_p of the curve, from the cache or computed and stored.

    At a bad prime an ingested value is returned when present; otherwise
    ``None``, or ``BadReductionError`` under the strict policy.
    """
    curve, ingested = _unpack(curve)
    if bad_ap:
        ingested = {**ingested, **bad_ap}
    key = curve.key
    if cache is not None:
        hit = cache.get(key, p)
        if hit is not None:
            return hit
    rc = reduce(curve, p)
    if rc.good:
        ap = count_points(rc, "auto", cutoff).a1_trace
    elif p in ingested:
        ap = ingested[p]
    elif policy == "strict":
        raise BadReductionError(f"{key} has bad reduction at p={p} and no ingested a_p")
    else:
        return None
    if cache is not None:
        cache.put(key, p, ap)
    return ap


def _ap_chunk(args):
    ainvs, conductor, primes, cutoff = args
    curve = CurveOverQ(*ainvs, conductor=conductor)
    out = []
    for p in primes:
        rc = reduce(curve, p)
        out.append(count_points(rc, "auto", cutoff).a1_trace if rc.good else None)
    return out


def ap_table(
    curve: CurveOverQ | CurveRecord,
    primes: Iterable[int],
    cache: ApCache | None = None,
    workers: int = 1,
    cutoff: int = NAIVE_CUTOFF,
    chunk: int = 2048,
) -> dict[int, int | None]:
    """a_p for every prime in ``primes``; ``None`` marks bad reduction.

    Misses are computed in worker processes when ``workers > 1`` and merged
    in prime order, so the result does not depend on the worker count.
    Ingested bad-prime values are not consulted here; see ``get_ap``.
    """
    curve, _ = _unpack(curve)
    key = curve.key
    primes = list(primes)
    result: dict[int, int | None] = {}
    missing = []
    for p in primes:
        if not reduce(curve, p).good:
            result[p] = None
            continue
        hit = cache.get(key, p) if cache is not None else None
        if hit is None:
            missing.append(p)
        else:
            result[p] = hit
    jobs = [(curve.ainvs, curve.conductor, missing[i : i + chunk], cutoff) for i in range(0, len(missing), chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_ap_chunk, jobs))
    else:
        outs = [_ap_chunk(j) for j in jobs]
    for job, out in zip(jobs, outs):
        for p, ap in zip(job[2], out):
            result[p] = ap
            if cache is not None:
                cache.put(key, p, ap)
    if cache is not None:
        cache.flush()
    return {p: result[p] for p in primes}
