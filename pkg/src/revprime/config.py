"""Run configuration, config-file loading, and seeded RNG streams.

The config file is JSON, one flat object.  Recognized keys mirror the
RunConfig fields: rng_seed (integer), rng_algorithm (must be "pcg64"),
sieve_limit, census_tolerance, c_cal (object mapping verifier name to
its calibrated ratio ceiling), threads.  Unknown keys are rejected so a
typo cannot silently fall back to a default.

The config hash covers only result-affecting fields; thread count and
output paths change neither the numbers nor the hash, which is what
makes byte-identical reports across --threads settings possible.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

DEFAULT_RNG_SEED = 20260818
RNG_ALGORITHM = "pcg64"
DEFAULT_SIEVE_LIMIT = 100_000
DEFAULT_CENSUS_TOLERANCE = 0.25

# Calibrated ceilings for the implicit-constant verifiers, measured on
# the declared grids in verify.py with the default rng_seed and frozen
# here; regenerate with scripts/calibrate_all.py.  Verify runs treat
# these as regression ceilings (make_report slack on top).
DEFAULT_C_CAL: dict[str, float] = {
    "hybrid": 0.2679720313089526,
    "prime-exp-sum": 1.3514671363615083e-05,
    "truncation": 1.0,
    "type-i": 0.009086085233362963,
    "type-ii": 0.0002798620677296803,
}


@dataclass(frozen=True)
class RunConfig:
    rng_seed: int = DEFAULT_RNG_SEED
    rng_algorithm: str = RNG_ALGORITHM
    sieve_limit: int = DEFAULT_SIEVE_LIMIT
    threads: int = 1
    census_tolerance: float = DEFAULT_CENSUS_TOLERANCE
    c_cal: dict = field(default_factory=lambda: dict(DEFAULT_C_CAL))

    def __post_init__(self):
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in 64 bits")
        if self.rng_algorithm != RNG_ALGORITHM:
            raise ValueError(f"unsupported rng algorithm {self.rng_algorithm!r}")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.sieve_limit < 2:
            raise ValueError("sieve_limit must be at least 2")
        if not 0 < self.census_tolerance < 1:
            raise ValueError("census_tolerance must lie in (0, 1)")

    def hash_fields(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "rng_algorithm": self.rng_algorithm,
            "sieve_limit": self.sieve_limit,
            "census_tolerance": self.census_tolerance,
            "c_cal": {k: self.c_cal[k] for k in sorted(self.c_cal)},
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.hash_fields(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_CONFIG_KEYS = {
    "rng_seed",
    "rng_algorithm",
    "sieve_limit",
    "threads",
    "census_tolerance",
    "c_cal",
}


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config file must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**raw)


def merge_overrides(
    cfg: RunConfig,
    *,
    rng_seed: Optional[int] = None,
    sieve_limit: Optional[int] = None,
    threads: Optional[int] = None,
    census_tolerance: Optional[float] = None,
) -> RunConfig:
    """Apply command-line overrides on top of a loaded config."""
    changes = {}
    if rng_seed is not None:
        changes["rng_seed"] = rng_seed
    if sieve_limit is not None:
        changes["sieve_limit"] = sieve_limit
    if threads is not None:
        changes["threads"] = threads
    if census_tolerance is not None:
        changes["census_tolerance"] = census_tolerance
    return replace(cfg, **changes) if changes else cfg


def make_rng(cfg: RunConfig, *stream: int) -> np.random.Generator:
    """Independent generator for one work cell.

    The stream indices name the cell; the same (seed, stream) always
    yields the same draws, no matter how cells are scheduled over
    threads.
    """
    seq = np.random.SeedSequence(entropy=cfg.rng_seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.PCG64(seq))
