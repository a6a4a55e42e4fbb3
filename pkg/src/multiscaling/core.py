"""Domain types and increment/moment arithmetic shared by every other module.

A :class:`Series` is the universal currency: a 1-d float64 array of either
increments (log-returns) or levels (prices / cumulated walks), plus metadata
recording where it came from.  All operations here are pure; arrays are
frozen after construction so values can be shared across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError

KINDS = ("increments", "levels")


def _as_finite_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError(f"series values must be 1-d, got shape {arr.shape}")
    if arr.size < 1:
        raise DomainError("series must contain at least one value")
    if not np.all(np.isfinite(arr)):
        raise DomainError("series values must be finite (no NaN/Inf)")
    return arr


@dataclass(frozen=True)
class Series:
    """An ordered sequence of increments or levels with provenance metadata.

    Parameters
    ----------
    values : array_like
        Finite real values; copied to a read-only float64 array.
    kind : {'increments', 'levels'}
    label : str
        Free-text description carried through transforms.
    seed_provenance : dict or None
        Record of generator name, master seed, realization index, params.
    """

    values: np.ndarray
    kind: str = "increments"
    label: str = ""
    seed_provenance: dict[str, Any] | None = None

    def __post_init__(self):
        arr = _as_finite_array(self.values).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}, got {self.kind!r}")

    def __len__(self) -> int:
        return self.values.size

    def to_levels(self) -> "Series":
        """Cumulate increments into a level path anchored at 0 (length N+1)."""
        if self.kind == "levels":
            return self
        levels = np.concatenate(([0.0], np.cumsum(self.values)))
        return Series(levels, kind="levels", label=self.label,
                      seed_provenance=self.seed_provenance)

    def to_increments(self) -> "Series":
        """First differences of a level path (length N-1)."""
        if self.kind == "increments":
            return self
        if len(self) < 2:
            raise DomainError("need at least 2 levels to form increments")
        return Series(np.diff(self.values), kind="increments", label=self.label,
                      seed_provenance=self.seed_provenance)

    def replace_values(self, values, **meta) -> "Series":
        extra = dict(self.seed_provenance or {})
        extra.update(meta)
        return Series(values, kind=self.kind, label=self.label,
                      seed_provenance=extra or None)


@dataclass(frozen=True)
class LagWindow:
    """Integer lag range [tau_min, tau_max] over which moments are regressed."""

    tau_min: int
    tau_max: int

    def __post_init__(self):
        if not (isinstance(self.tau_min, (int, np.integer))
                and isinstance(self.tau_max, (int, np.integer))):
            raise DomainError("lags must be integers")
        if not 1 <= self.tau_min < self.tau_max:
            raise DomainError(
                f"need 1 <= tau_min < tau_max, got [{self.tau_min}, {self.tau_max}]")

    @property
    def taus(self) -> np.ndarray:
        return np.arange(self.tau_min, self.tau_max + 1)

    def check_length(self, n: int) -> None:
        """Largest lag must stay below a quarter of the series length."""
        if self.tau_max >= n / 4:
            raise DomainError(
                f"tau_max={self.tau_max} too large for series of length {n} "
                "(need tau_max < length/4)")

    def __str__(self) -> str:
        return f"{self.tau_min}:{self.tau_max}"


SMALL_WINDOW = LagWindow(1, 19)
LARGE_WINDOW = LagWindow(30, 250)


@dataclass(frozen=True)
class QGrid:
    """Strictly increasing grid of positive moment orders."""

    qs: np.ndarray = field(default_factory=lambda: np.round(np.arange(1, 11) * 0.1, 10))

    def __post_init__(self):
        arr = np.asarray(self.qs, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("q grid must be a nonempty 1-d sequence")
        if np.any(arr <= 0):
            raise DomainError("all q must be > 0")
        if np.any(np.diff(arr) <= 0):
            raise DomainError("q grid must be strictly increasing")
        arr.setflags(write=False)
        object.__setattr__(self, "qs", arr)

    def __len__(self) -> int:
        return self.qs.size

    def __iter__(self):
        return iter(self.qs)


@dataclass(frozen=True)
class MasterSeed:
    """64-bit master seed; realization k gets substream spawn_key=(k,).

    The derivation is positional, so (seed, k) yields the identical stream
    no matter how many realizations run, in what order, or on which worker.
    """

    seed: int

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))

    def stream(self, k: int = 0, sub: int | None = None) -> np.random.Generator:
        key = (int(k),) if sub is None else (int(k), int(sub))
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key)))

    def child(self, *key: int) -> "MasterSeed":
        """Derived master seed for a named sub-task (deterministic in key)."""
        ss = np.random.SeedSequence(self.seed,
                                    spawn_key=tuple(int(i) for i in key))
        return MasterSeed(int(ss.generate_state(1, np.uint64)[0]))

    @classmethod
    def from_entropy(cls) -> "MasterSeed":
        return cls(int(np.random.SeedSequence().entropy) % 2 ** 64)


def increments(series: Series, tau: int) -> Series:
    """Overlapping lag-``tau`` differences of a level series.

    Output[i] = values[i+tau] - values[i], one per admissible start, so a
    level path of M points gives M - tau increments.
    """
    if series.kind != "levels":
        raise DomainError("increments() expects a levels series")
    tau = int(tau)
    if tau < 1:
        raise DomainError("tau must be a positive integer")
    if tau >= len(series):
        raise DomainError(f"tau={tau} >= series length {len(series)}")
    x = series.values
    return Series(x[tau:] - x[:-tau], kind="increments", label=series.label,
                  seed_provenance=series.seed_provenance)


def abs_moment(values, q: float) -> float:
    """Sample q-th absolute moment: mean of |x|^q."""
    arr = np.asarray(getattr(values, "values", values), dtype=np.float64)
    if arr.size == 0:
        raise DomainError("abs_moment of an empty sample")
    if q <= 0:
        raise DomainError("q must be > 0")
    return float(np.mean(np.abs(arr) ** q))
