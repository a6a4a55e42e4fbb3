"""Synthetic processes: Brownian increments, heavy-tailed t innovations, and
the multifractal random walk (lognormal volatility modulation), each paired
with its closed-form scaling-exponent oracle.

All generators return increment series.  The volatility field of the random
walk is synthesized exactly (no burn-in) by circulant embedding of its
log-decay autocovariance, which is O(N log N) and feasible at millions of
steps where a Cholesky factorization is not.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.fft import next_fast_len

from .core import MasterSeed, Series
from .errors import DomainError, EstimationError

# Relative spectral mass of negative embedding eigenvalues we silently clip;
# anything above this means the embedding is genuinely not nonneg-definite.
EMBEDDING_CLIP_TOL = 1e-6


@dataclass(frozen=True)
class TbmParams:
    """Random walk with i.i.d. t-distributed innovations, n may be non-integer."""

    n: float
    length: int

    def __post_init__(self):
        if self.n <= 0:
            raise DomainError("degrees of freedom n must be > 0")
        if self.length < 2:
            raise DomainError("length must be >= 2")

    @property
    def variance(self) -> float:
        """Innovation variance n/(n-2); infinite below n=2."""
        return self.n / (self.n - 2.0) if self.n > 2 else float("inf")


@dataclass(frozen=True)
class MrwParams:
    """Multifractal random walk parameters.

    increment(k) = eps(k) * exp(omega(k)) with eps ~ N(0, sigma^2 dt) i.i.d.
    and omega a stationary Gaussian sequence with mean -lambda2*ln(L/dt) and
    autocovariance lambda2*ln(L/((h+1) dt)) up to lag L/dt, zero beyond.
    """

    lambda2: float
    L: float
    sigma: float = 1.0
    dt: float = 1.0
    length: int = 0

    def __post_init__(self):
        if self.lambda2 <= 0:
            raise DomainError("lambda2 must be > 0")
        if self.dt <= 0:
            raise DomainError("dt must be > 0")
        if self.L <= self.dt:
            raise DomainError("autocorrelation length L must exceed dt")
        if self.sigma <= 0:
            raise DomainError("sigma must be > 0")
        if self.length < 2:
            raise DomainError("length must be >= 2")
        if self.length < self.L / self.dt:
            warnings.warn("series shorter than the autocorrelation length; "
                          "scaling estimates will be unreliable", stacklevel=2)

    @property
    def omega_mean(self) -> float:
        return -self.lambda2 * np.log(self.L / self.dt)

    def omega_autocovariance(self, lags) -> np.ndarray:
        h = np.asarray(lags, dtype=np.float64)
        rho = self.L / ((h + 1.0) * self.dt)
        return self.lambda2 * np.log(np.maximum(rho, 1.0))


@dataclass(frozen=True)
class TheorySpectrum:
    """Closed-form scaling exponents q -> zeta(q), valid for q < valid_q_max."""

    zeta: Callable[[np.ndarray], np.ndarray]
    valid_q_max: float
    model: str

    def hurst(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64)
        return self.zeta(q) / q


def theory_spectrum(model: str, *, n: float | None = None,
                    lambda2: float | None = None) -> TheorySpectrum:
    """Theoretical zeta(q) for 'bm', 'tbm' (needs n) or 'mrw' (needs lambda2).

    bm: q/2.  tbm: q/n below n=2 (stable regime), else q/2, valid for q < n.
    mrw: -(lambda2/2) q^2 + (lambda2 + 1/2) q.
    """
    if model == "bm":
        return TheorySpectrum(lambda q: np.asarray(q) / 2.0, np.inf, "bm")
    if model == "tbm":
        if n is None or n <= 0:
            raise DomainError("tbm theory needs n > 0")
        slope = 1.0 / n if n < 2 else 0.5
        return TheorySpectrum(lambda q, s=slope: np.asarray(q) * s, float(n), "tbm")
    if model == "mrw":
        if lambda2 is None or lambda2 <= 0:
            raise DomainError("mrw theory needs lambda2 > 0")
        lam2 = float(lambda2)

        def zeta(q, lam2=lam2):
            q = np.asarray(q, dtype=np.float64)
            return -(lam2 / 2.0) * q ** 2 + (lam2 + 0.5) * q

        # zeta is increasing (moments finite) up to q* = 1 + 1/(2 lambda2)
        return TheorySpectrum(zeta, 1.0 + 1.0 / (2.0 * lam2), "mrw")
    raise DomainError(f"unknown model {model!r}")


def gen_bm(length: int, seed: MasterSeed | int, realization: int = 0) -> Series:
    """Standard Gaussian i.i.d. increments (the uniscaling baseline)."""
    if length < 2:
        raise DomainError("length must be >= 2")
    master = seed if isinstance(seed, MasterSeed) else MasterSeed(seed)
    rng = master.stream(realization)
    x = rng.standard_normal(length)
    return Series(x, kind="increments", label="bm",
                  seed_provenance={"generator": "bm", "master_seed": master.seed,
                                   "realization": realization, "length": length})


def gen_tbm(params: TbmParams, seed: MasterSeed | int, realization: int = 0) -> Series:
    """I.i.d. t-distributed increments via the Gaussian-over-scaled-chi form.

    A Gamma(n/2, scale 2) draw builds the chi-square denominator, so
    non-integer and sub-1 shapes (n < 2) are supported.
    """
    master = seed if isinstance(seed, MasterSeed) else MasterSeed(seed)
    rng = master.stream(realization)
    z = rng.standard_normal(params.length)
    chi2 = 2.0 * rng.standard_gamma(params.n / 2.0, size=params.length)
    x = z / np.sqrt(chi2 / params.n)
    return Series(x, kind="increments", label=f"tbm(n={params.n:g})",
                  seed_provenance={"generator": "tbm", "master_seed": master.seed,
                                   "realization": realization, "n": params.n,
                                   "length": params.length})


def gaussian_from_covariance(cov: np.ndarray, length: int,
                             rng: np.random.Generator,
                             clip_tol: float = EMBEDDING_CLIP_TOL) -> np.ndarray:
    """Exact stationary Gaussian sequence with the given autocovariance.

    Circulant embedding: the covariance (assumed zero beyond its last entry)
    is periodized onto a ring large enough that wrap-around never reaches the
    first ``length`` samples; the ring's FFT gives the embedding eigenvalues.
    Slightly negative eigenvalues are clipped to zero; if the clipped
    relative spectral mass exceeds ``clip_tol`` the embedding is rejected.
    """
    cov = np.asarray(cov, dtype=np.float64)
    support = cov.size
    m = next_fast_len(length + support)
    ring = np.zeros(m)
    ring[:support] = cov
    ring[m - support + 1:] = cov[1:][::-1]
    eig = np.fft.fft(ring).real
    neg = eig < 0
    if np.any(neg):
        clipped = -eig[neg].sum() / np.abs(eig).sum()
        if clipped > clip_tol:
            raise EstimationError(
                f"circulant embedding not nonneg-definite: relative spectral "
                f"mass clipped {clipped:.3e} > {clip_tol:g}")
        eig[neg] = 0.0
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    x = np.fft.fft(z * np.sqrt(eig / m)).real
    return x[:length]


def gen_mrw(params: MrwParams, seed: MasterSeed | int, realization: int = 0) -> Series:
    """Multifractal random walk increments eps(k) * exp(omega(k))."""
    master = seed if isinstance(seed, MasterSeed) else MasterSeed(seed)
    rng = master.stream(realization)
    kmax = int(np.ceil(params.L / params.dt))
    cov = params.omega_autocovariance(np.arange(kmax))
    omega = params.omega_mean + gaussian_from_covariance(cov, params.length, rng)
    eps = rng.standard_normal(params.length) * (params.sigma * np.sqrt(params.dt))
    x = eps * np.exp(omega)
    return Series(x, kind="increments",
                  label=f"mrw(lambda2={params.lambda2:g}, L={params.L:g})",
                  seed_provenance={"generator": "mrw", "master_seed": master.seed,
                                   "realization": realization,
                                   "lambda2": params.lambda2, "L": params.L,
                                   "sigma": params.sigma, "dt": params.dt,
                                   "length": params.length})
