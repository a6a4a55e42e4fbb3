"""Measurement machinery: scaling exponents of q-order increment moments,
the parabolic multiscaling coefficient, the log-volatility autocovariance
fit, and power-law tail exponents.

Conventions fixed here:

* One equally-weighted OLS fit of ln-moment against ln-lag per q over the
  whole lag window; no averaging over nested windows.
* Increments at lag tau overlap (all N - tau of them) unless asked otherwise.
* The tail exponent ``alpha`` is the decay exponent of the CCDF
  P(X >= x) ~ x^-alpha (so t innovations with n degrees of freedom have
  alpha = n, and daily index returns land around 3).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import LagWindow, QGrid, Series
from .errors import DomainError, EstimationError

MIN_TAIL_COUNT = 50


def _ols_line(x: np.ndarray, y: np.ndarray):
    """Slope, intercept, their standard errors, covariance and R^2."""
    n = x.size
    xbar = x.mean()
    ybar = y.mean()
    dx = x - xbar
    sxx = np.dot(dx, dx)
    slope = np.dot(dx, y - ybar) / sxx
    intercept = ybar - slope * xbar
    resid = y - (slope * x + intercept)
    rss = np.dot(resid, resid)
    tss = np.dot(y - ybar, y - ybar)
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    if n > 2:
        s2 = rss / (n - 2)
        se_slope = np.sqrt(s2 / sxx)
        se_intercept = np.sqrt(s2 * (1.0 / n + xbar ** 2 / sxx))
        cov_si = -xbar * s2 / sxx
    else:
        se_slope = se_intercept = cov_si = np.nan
    return slope, intercept, se_slope, se_intercept, cov_si, r2


# ---------------------------------------------------------------------------
# Generalized Hurst exponent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingResult:
    """Per-q scaling exponents with regression diagnostics."""

    window: LagWindow
    qs: np.ndarray
    zeta: np.ndarray
    stderr: np.ndarray
    r2: np.ndarray
    ln_taus: np.ndarray
    ln_moments: np.ndarray  # shape (n_taus, n_qs)

    @property
    def hurst(self) -> np.ndarray:
        """H(q) = zeta(q)/q."""
        return self.zeta / self.qs

    def hurst_at(self, q: float) -> float:
        idx = np.flatnonzero(np.isclose(self.qs, q, rtol=0, atol=1e-9))
        if idx.size == 0:
            raise DomainError(f"q={q} not on the estimation grid")
        return float(self.hurst[idx[0]])


def _log_abs_moments(levels: np.ndarray, taus: np.ndarray, qs: np.ndarray,
                     overlapping: bool) -> np.ndarray:
    """ln mean |X(t+tau)-X(t)|^q for every (tau, q); raises on zero moments.

    For an arithmetic grid q_j = j*q_1 the powers are built by cumulative
    multiplication from a single |.|^q_1 pass, which is what makes large
    windows affordable.
    """
    nq = qs.size
    arithmetic = np.allclose(qs, qs[0] * np.arange(1, nq + 1), rtol=1e-12, atol=0.0)
    out = np.empty((taus.size, nq))
    for i, tau in enumerate(taus):
        if overlapping:
            d = levels[tau:] - levels[:-tau]
        else:
            d = np.diff(levels[::tau])
        a = np.abs(d)
        if arithmetic:
            base = a ** qs[0]
            acc = base.copy()
            out[i, 0] = acc.mean()
            for j in range(1, nq):
                acc *= base
                out[i, j] = acc.mean()
        else:
            with np.errstate(divide="ignore"):
                la = np.log(a)  # -inf at exact zeros; exp maps them back to 0
            out[i] = np.exp(la[:, None] * qs[None, :]).mean(axis=0)
    if np.any(out <= 0.0) or not np.all(np.isfinite(out)):
        raise EstimationError("zero moment encountered (degenerate series); "
                              "cannot take logs for the scaling regression")
    return np.log(out)


def estimate_ghe(series: Series, window: LagWindow, grid: QGrid | None = None,
                 overlapping: bool = True) -> ScalingResult:
    """Scaling exponents zeta(q) from one log-log OLS fit per q.

    The series' increments are cumulated into a path, the absolute q-moments
    of its lag-tau differences are computed at every integer lag in the
    window, and the slope of ln-moment vs ln-tau is zeta(q).
    """
    grid = grid or QGrid()
    if len(series) < 2:
        raise DomainError("series too short to estimate anything")
    x = series.to_increments() if series.kind == "levels" else series
    window.check_length(len(x))
    levels = x.to_levels().values
    taus = window.taus
    ln_taus = np.log(taus.astype(np.float64))
    ln_m = _log_abs_moments(levels, taus, grid.qs, overlapping)

    nq = len(grid)
    zeta = np.empty(nq)
    stderr = np.empty(nq)
    r2 = np.empty(nq)
    for j in range(nq):
        zeta[j], _, stderr[j], _, _, r2[j] = _ols_line(ln_taus, ln_m[:, j])
    return ScalingResult(window=window, qs=grid.qs.copy(), zeta=zeta,
                         stderr=stderr, r2=r2, ln_taus=ln_taus, ln_moments=ln_m)


# ---------------------------------------------------------------------------
# Parabolic multiscaling coefficient
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParabolaFit:
    """zeta(q) ~ B q^2 + A q + c; B < 0 flags multiscaling."""

    B: float
    A: float
    c: float
    se_B: float
    se_A: float
    se_c: float


def parabola_ols(qs: np.ndarray, zeta: np.ndarray) -> ParabolaFit:
    """Quadratic OLS of zeta on {q^2, q, 1} with coefficient standard errors."""
    qs = np.asarray(qs, dtype=np.float64)
    zeta = np.asarray(zeta, dtype=np.float64)
    if qs.size < 3:
        raise DomainError("parabola fit needs at least 3 grid points")
    if np.unique(qs).size != qs.size:
        raise DomainError("duplicate q values make the design rank-deficient")
    X = np.column_stack([qs ** 2, qs, np.ones_like(qs)])
    gram = X.T @ X
    coef = np.linalg.solve(gram, X.T @ zeta)
    resid = zeta - X @ coef
    dof = qs.size - 3
    if dof > 0:
        s2 = float(resid @ resid) / dof
        se = np.sqrt(np.diag(np.linalg.inv(gram)) * s2)
    else:
        se = np.full(3, np.nan)
    return ParabolaFit(B=float(coef[0]), A=float(coef[1]), c=float(coef[2]),
                       se_B=float(se[0]), se_A=float(se[1]), se_c=float(se[2]))


def fit_parabola(result: ScalingResult) -> ParabolaFit:
    return parabola_ols(result.qs, result.zeta)


# ---------------------------------------------------------------------------
# Log-absolute-increment autocovariance (volatility correlation) fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CovFit:
    """Fit of Cov[ln|r(t+T)|, ln|r(t)|] = lambda2 * ln(L/(T+1))."""

    lambda2_hat: float
    L_hat: float
    se_lambda2: float
    se_L: float
    t_range: tuple[int, int]
    r2: float
    zero_count: int
    lags: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)

    def predicted(self, lags=None) -> np.ndarray:
        t = np.asarray(self.lags if lags is None else lags, dtype=np.float64)
        return self.lambda2_hat * np.log(self.L_hat / (t + 1.0))


def _log_abs_autocov(x: np.ndarray, lags: np.ndarray) -> np.ndarray:
    """Sample autocovariance of ln|x| at each lag, excluding zero pairs."""
    nonzero = x != 0.0
    with np.errstate(divide="ignore"):
        y = np.where(nonzero, np.log(np.abs(np.where(nonzero, x, 1.0))), 0.0)
    clean = bool(nonzero.all())
    out = np.empty(lags.size)
    for i, lag in enumerate(lags):
        a, b = y[:-lag], y[lag:]
        if clean:
            npairs = a.size
            out[i] = np.dot(a, b) / npairs - a.mean() * b.mean()
        else:
            valid = nonzero[:-lag] & nonzero[lag:]
            npairs = int(valid.sum())
            if npairs < 2:
                raise EstimationError(f"no valid pairs at lag {lag}")
            aa, bb = a[valid], b[valid]
            out[i] = np.dot(aa, bb) / npairs - aa.mean() * bb.mean()
    return out


def fit_log_autocovariance(series: Series, t_max: int | None = None) -> CovFit:
    """Estimate the intermittency lambda2 and correlation length L.

    Regresses the lag-T autocovariance of ln|increments| on ln(T+1):
    slope = -lambda2, intercept = lambda2 * ln(L).  When ``t_max`` is not
    given, a coarse first pass up to 300 picks the final range
    [1, min(L_hat/2, 300)], since the log-decay form only holds below L.
    """
    x = series.to_increments().values if series.kind == "levels" else series.values
    n = x.size
    if n < 64:
        raise DomainError("series too short for an autocovariance fit")
    zero_count = int((x == 0.0).sum())
    zero_frac = zero_count / n
    if zero_frac > 0.10:
        raise EstimationError(f"{zero_frac:.1%} zero increments; ln|r| undefined "
                              "on too much of the sample")
    if zero_frac > 0.01:
        warnings.warn(f"{zero_count} zero increments ({zero_frac:.2%}) excluded "
                      "pairwise from the autocovariance", stacklevel=2)

    def fit_range(upper: int) -> CovFit:
        upper = int(max(8, min(upper, n // 4)))
        lags = np.arange(1, upper + 1)
        cov = _log_abs_autocov(x, lags)
        lt = np.log(lags + 1.0)
        slope, intercept, se_s, se_i, cov_si, r2 = _ols_line(lt, cov)
        lam2 = -slope
        se_lam2 = se_s
        if lam2 > 0:
            L_hat = float(np.exp(intercept / lam2))
            # delta method incl. slope/intercept covariance
            g_b = L_hat / lam2
            g_m = L_hat * intercept / lam2 ** 2
            var_L = (g_b ** 2 * se_i ** 2 + g_m ** 2 * se_s ** 2
                     + 2.0 * g_b * g_m * cov_si)
            se_L = float(np.sqrt(max(var_L, 0.0)))
        else:
            L_hat = float("nan")
            se_L = float("nan")
        return CovFit(lambda2_hat=float(lam2), L_hat=L_hat,
                      se_lambda2=float(se_lam2), se_L=se_L,
                      t_range=(1, upper), r2=float(r2),
                      zero_count=zero_count, lags=lags, cov=cov)

    if t_max is not None:
        if t_max < 2:
            raise DomainError("t_max must be at least 2")
        return fit_range(int(t_max))
    coarse = fit_range(300)
    if not np.isfinite(coarse.L_hat) or coarse.L_hat <= 20:
        return coarse
    return fit_range(int(min(coarse.L_hat / 2, 300)))


# ---------------------------------------------------------------------------
# Power-law tail fit (Hill MLE + KS-minimizing cutoff)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailFit:
    """CCDF tail exponent with the KS-selected cutoff."""

    alpha: float
    xmin: float
    ks_distance: float
    stderr_alpha: float
    side: str
    tail_count: int
    side_count: int
    sorted_values: np.ndarray = field(repr=False)

    def ccdf_fit(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return (x / self.xmin) ** (-self.alpha)


def fit_tail(series: Series, side: str = "right",
             min_tail: int = MIN_TAIL_COUNT) -> TailFit:
    """Tail exponent of one side of the increment distribution.

    ``side='right'`` uses the positive values, ``side='left'`` the negated
    negative values.  For every candidate cutoff (the unique sorted values
    between the side's 50th and 99th percentiles) the maximum-likelihood
    exponent of the CCDF above the cutoff is
    ``alpha = m / sum(ln(x/xmin))``, and the cutoff minimizing the
    Kolmogorov-Smirnov distance between empirical and fitted CCDF wins.
    """
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    x = series.to_increments().values if series.kind == "levels" else series.values
    vals = x[x > 0] if side == "right" else -x[x < 0]
    if vals.size < min_tail:
        raise EstimationError(
            f"only {vals.size} values on the {side} side; need >= {min_tail}")
    svals = np.sort(vals)
    n = svals.size
    ls = np.log(svals)
    # suffix[i] = sum of ls[i:]
    suffix = np.concatenate((np.cumsum(ls[::-1])[::-1], [0.0]))

    lo, hi = np.quantile(svals, [0.50, 0.99])
    cand_idx = np.flatnonzero((svals >= lo) & (svals <= hi))
    # one candidate per unique value (first occurrence), leaving >= min_tail above
    keep = np.ones(cand_idx.size, dtype=bool)
    keep[1:] = svals[cand_idx[1:]] != svals[cand_idx[:-1]]
    cand_idx = cand_idx[keep]
    cand_idx = cand_idx[n - cand_idx >= min_tail]
    if cand_idx.size == 0:
        raise EstimationError("no admissible tail cutoff with enough mass above it")

    grades = np.arange(n, dtype=np.float64)
    best = (np.inf, -1, np.nan)
    for i0 in cand_idx:
        m = n - i0
        denom = suffix[i0] - m * ls[i0]
        if denom <= 0.0:
            continue
        alpha = m / denom
        fitted = np.exp(-alpha * (ls[i0:] - ls[i0]))
        emp = 1.0 - (grades[:m] / m)  # P(X >= x_j) just below x_j
        d = float(np.abs(emp - fitted).max())
        if d < best[0]:
            best = (d, int(i0), float(alpha))
    ks, i0, alpha = best
    if i0 < 0:
        raise EstimationError("tail fit failed: all candidate cutoffs degenerate")
    m = n - i0
    return TailFit(alpha=alpha, xmin=float(svals[i0]), ks_distance=ks,
                   stderr_alpha=alpha / np.sqrt(m), side=side,
                   tail_count=m, side_count=n, sorted_values=svals)
