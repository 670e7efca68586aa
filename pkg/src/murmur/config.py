"""Runtime configuration: defaults < key=value file < environment < flags."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from murmur.curves import NAIVE_CUTOFF
from murmur.errors import DomainError, ParseError
from murmur.family import BAD_PRIME_POLICIES
from murmur.satotate import CLAMP_POLICIES
from murmur.zeta import DEFAULT_N_MAX


@dataclass(frozen=True)
class Config:
    cache: str | None = None
    bsgs_cutoff: int = NAIVE_CUTOFF
    n_max: int = DEFAULT_N_MAX
    threads: int = 1
    out_dir: str = "."
    bad_prime_policy: str = "skip"
    clamp_policy: str = "include"

    def __post_init__(self):
        if self.bsgs_cutoff < 5:
            raise DomainError("bsgs_cutoff must be >= 5")
        if self.threads < 1:
            raise DomainError("threads must be >= 1")
        if self.n_max < 1:
            raise DomainError("n_max must be >= 1")
        if self.bad_prime_policy not in BAD_PRIME_POLICIES:
            raise DomainError(f"bad_prime_policy must be one of {BAD_PRIME_POLICIES}")
        if self.clamp_policy not in CLAMP_POLICIES:
            raise DomainError(f"clamp_policy must be one of {CLAMP_POLICIES}")


_INT_KEYS = {"bsgs_cutoff", "n_max", "threads"}
_ENV = {"MURMUR_CACHE": "cache", "MURMUR_THREADS": "threads"}


def _coerce(key: str, value: str):
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError as exc:
            raise ParseError(f"{key} must be an integer, got {value!r}") from exc
    if key == "cache":
        return value or None
    return value


def parse_config_file(path) -> dict:
    known = {f.name for f in fields(Config)}
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in known:
            raise ParseError(f"{path}:{lineno}: expected key=value with key in {sorted(known)}")
        out[key] = _coerce(key, value.strip())
    return out


def load_config(path=None, env=None, **overrides) -> Config:
    env = os.environ if env is None else env
    values = parse_config_file(path) if path else {}
    for var, key in _ENV.items():
        if env.get(var):
            values[key] = _coerce(key, env[var])
    values.update({k: v for k, v in overrides.items() if v is not None})
    return replace(Config(), **values)
