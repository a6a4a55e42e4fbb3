"""Surrogate transforms that isolate one source of multiscaling at a time.

Shuffling keeps the unconditional distribution and destroys the temporal
structure; rank-Gaussianization keeps the rank ordering (and with it the
causal structure) while forcing a standard-normal marginal.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from .core import MasterSeed, Series
from .errors import DomainError


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    master = seed if isinstance(seed, MasterSeed) else MasterSeed(seed)
    return master.stream(0)


def shuffle(series: Series, seed) -> Series:
    """Uniformly random permutation of the values (multiset preserved)."""
    if len(series) < 2:
        raise DomainError("nothing to shuffle in a series shorter than 2")
    rng = _rng(seed)
    return series.replace_values(rng.permutation(series.values),
                                 surrogate="shuffle")


def gaussianize(series: Series, seed=0) -> Series:
    """Rank-preserving remap of the values onto standard-normal quantiles.

    The value of rank i (1-based, among M) becomes Phi^-1((i - 0.5)/M), so
    the output is a deterministic monotone relabeling of the input's ranks.
    ``seed`` only matters for ties, which are broken by a seeded random
    permutation among the tied values to avoid repeated output values.
    """
    if len(series) < 2:
        raise DomainError("need at least 2 values to gaussianize")
    values = series.values
    m = values.size
    rng = _rng(seed)
    tiebreak = rng.permutation(m)
    order = np.lexsort((tiebreak, values))
    ranks = np.empty(m, dtype=np.int64)
    ranks[order] = np.arange(m)
    out = ndtri((ranks + 0.5) / m)
    n_ties = int(m - np.unique(values).size)
    return series.replace_values(out, surrogate="gaussianize", ties=n_ties)
