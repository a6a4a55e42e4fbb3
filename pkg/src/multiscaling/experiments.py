"""Monte Carlo harness: generate-or-load K realizations, optionally apply a
surrogate, estimate over one or more lag windows, and aggregate mean +/- std
against the closed-form oracles.

Aggregation order is fixed by realization index, so reports are bit-identical
for a given plan and master seed no matter how many worker threads run.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .core import LagWindow, MasterSeed, QGrid, Series
from .errors import DomainError, EstimationError
from .estimators import (TailFit, estimate_ghe, fit_log_autocovariance,
                         fit_parabola, fit_tail, parabola_ols)
from .generators import (MrwParams, TbmParams, gen_bm, gen_mrw, gen_tbm,
                         theory_spectrum)
from .surrogates import gaussianize, shuffle

MODELS = ("bm", "tbm", "mrw")
SURROGATES = ("none", "shuffle", "gaussianize")
HURST_QS = (0.5, 1.0)


@dataclass(frozen=True)
class ExperimentPlan:
    """One (source, surrogate) combination to be run K times."""

    model: str | None = None          # None means an externally supplied series
    params: dict[str, float] = field(default_factory=dict)
    surrogate: str = "none"
    realizations: int = 100
    length: int | None = None
    windows: tuple[LagWindow, ...] = ()
    grid: QGrid = field(default_factory=QGrid)
    seed: MasterSeed = field(default_factory=lambda: MasterSeed(0))
    input_path: str | None = None
    overlapping: bool = True

    def __post_init__(self):
        if self.model is None and self.input_path is None:
            raise DomainError("plan needs either a model or an input file")
        if self.model is not None and self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        if self.surrogate not in SURROGATES:
            raise DomainError(f"unknown surrogate {self.surrogate!r}")
        if self.realizations < 1:
            raise DomainError("need at least one realization")
        if not self.windows:
            raise DomainError("plan needs at least one lag window")
        if self.model is not None:
            if self.length is None or self.length < 2:
                raise DomainError("model plans need a length >= 2")
            for w in self.windows:
                w.check_length(self.length)

    def generator_params(self):
        if self.model == "tbm":
            return TbmParams(n=float(self.params["n"]), length=self.length)
        if self.model == "mrw":
            return MrwParams(lambda2=float(self.params["lambda2"]),
                             L=float(self.params.get("L", 1000.0)),
                             sigma=float(self.params.get("sigma", 1.0)),
                             dt=float(self.params.get("dt", 1.0)),
                             length=self.length)
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "params": {k: float(v) for k, v in sorted(self.params.items())},
            "input": self.input_path,
            "surrogate": self.surrogate,
            "realizations": self.realizations,
            "length": self.length,
            "windows": [str(w) for w in self.windows],
            "qgrid": [float(q) for q in self.grid.qs],
            "seed": self.seed.seed,
            "overlapping": self.overlapping,
        }


def _realize(plan: ExperimentPlan, k: int, base: Series | None) -> Series:
    """Build realization k: generate (or reuse the input) and apply the surrogate."""
    if plan.model == "bm":
        s = gen_bm(plan.length, plan.seed, k)
    elif plan.model == "tbm":
        s = gen_tbm(plan.generator_params(), plan.seed, k)
    elif plan.model == "mrw":
        s = gen_mrw(plan.generator_params(), plan.seed, k)
    else:
        s = base
    if plan.surrogate == "shuffle":
        s = shuffle(s, plan.seed.stream(k, 1))
    elif plan.surrogate == "gaussianize":
        s = gaussianize(s, plan.seed.stream(k, 1))
    return s


def _theory(plan: ExperimentPlan, lambda2_eff: float | None):
    """Oracle spectrum for the plan, or None for data without one.

    Shuffling leaves an i.i.d. model unchanged but turns the correlated walk
    into an uncorrelated one (Brownian scaling); Gaussianization keeps the
    causal structure but with the reduced intermittency it is actually
    measured to have, so its oracle uses the fitted lambda2_eff.
    """
    if plan.model is None:
        return None
    if plan.surrogate == "none":
        return theory_spectrum(plan.model, n=plan.params.get("n"),
                               lambda2=plan.params.get("lambda2"))
    if plan.surrogate == "shuffle":
        if plan.model == "mrw":
            return theory_spectrum("bm")
        return theory_spectrum(plan.model, n=plan.params.get("n"),
                               lambda2=plan.params.get("lambda2"))
    # gaussianize: marginal is exactly normal; only mrw keeps correlations
    if plan.model == "mrw" and lambda2_eff is not None and lambda2_eff > 0:
        return theory_spectrum("mrw", lambda2=lambda2_eff)
    return theory_spectrum("bm")


@dataclass(frozen=True)
class StatSummary:
    mean: float
    std: float
    theory: float | None
    z: float | None

    def to_dict(self):
        return {"mean": self.mean, "std": self.std,
                "theory": self.theory, "z": self.z}


@dataclass(frozen=True)
class WindowReport:
    window: LagWindow
    stats: dict[str, StatSummary]
    qs: np.ndarray
    zeta_mean: np.ndarray
    zeta_std: np.ndarray
    zeta_theory: np.ndarray | None

    def to_dict(self):
        zrows = []
        for j, q in enumerate(self.qs):
            row = {"q": float(q), "mean": float(self.zeta_mean[j]),
                   "std": float(self.zeta_std[j])}
            if self.zeta_theory is not None:
                row["theory"] = float(self.zeta_theory[j])
            zrows.append(row)
        return {"window": str(self.window),
                "stats": {k: v.to_dict() for k, v in self.stats.items()},
                "zeta": zrows}


@dataclass(frozen=True)
class ExperimentReport:
    plan: ExperimentPlan
    windows: list[WindowReport]
    realizations_used: int

    def stat(self, window: LagWindow | str, name: str) -> StatSummary:
        key = str(window)
        for wr in self.windows:
            if str(wr.window) == key:
                return wr.stats[name]
        raise KeyError(f"no window {key} in report")

    def to_dict(self):
        return {"kind": "experiment",
                "plan": self.plan.to_dict(),
                "realizations_used": self.realizations_used,
                "windows": [w.to_dict() for w in self.windows],
                "code_version": __version__}


def _summarize(values: np.ndarray, theory: float | None, k: int) -> StatSummary:
    mean = float(values.mean())
    std = float(values.std(ddof=1)) if k > 1 else 0.0
    z = None
    if theory is not None and std > 0:
        z = float((mean - theory) / (std / np.sqrt(k)))
    return StatSummary(mean=mean, std=std, theory=theory, z=z)


def run_experiment(plan: ExperimentPlan, base_series: Series | None = None,
                   threads: int = 1) -> ExperimentReport:
    """Execute the plan and aggregate per-window statistics across K runs.

    Any realization that fails to estimate aborts the whole run (silently
    dropping failures would bias the ensemble means).
    """
    if plan.model is None and base_series is None:
        raise DomainError("plan references an input series but none was given")
    if base_series is not None and plan.model is None:
        for w in plan.windows:
            w.check_length(len(base_series.to_increments()
                                if base_series.kind == "levels" else base_series))
    k_total = plan.realizations
    fit_cov = plan.model == "mrw" or (plan.model is None
                                      and plan.surrogate == "gaussianize")
    cov_tmax = None
    if plan.model == "mrw":
        cov_tmax = int(min(plan.params.get("L", 1000.0) / 2, 300))

    def one(k: int):
        try:
            s = _realize(plan, k, base_series)
            per_window = []
            for w in plan.windows:
                res = estimate_ghe(s, w, plan.grid, overlapping=plan.overlapping)
                pf = fit_parabola(res)
                hs = {q: res.hurst_at(q) for q in HURST_QS
                      if np.any(np.isclose(res.qs, q, rtol=0, atol=1e-9))}
                per_window.append((pf.B, hs, res.zeta))
            lam_eff = None
            if fit_cov:
                lam_eff = fit_log_autocovariance(s, t_max=cov_tmax).lambda2_hat
            return per_window, lam_eff
        except EstimationError as exc:
            raise EstimationError(
                f"realization {k} (seed {plan.seed.seed}) failed: {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(k_total)))
    else:
        results = [one(k) for k in range(k_total)]

    lam_effs = np.array([r[1] for r in results], dtype=np.float64) \
        if fit_cov else None
    lam_mean = float(lam_effs.mean()) if lam_effs is not None else None
    spectrum = _theory(plan, lam_mean if plan.surrogate == "gaussianize" else None)

    window_reports = []
    for i, w in enumerate(plan.windows):
        b_vals = np.array([r[0][i][0] for r in results])
        zeta_all = np.vstack([r[0][i][2] for r in results])
        qs = plan.grid.qs
        if spectrum is not None:
            zeta_th = spectrum.zeta(qs)
            th_parab = parabola_ols(qs, zeta_th)
            b_theory = th_parab.B
        else:
            zeta_th = None
            b_theory = None
        stats = {"B": _summarize(b_vals, b_theory, k_total)}
        for q in HURST_QS:
            if not results[0][0][i][1] or q not in results[0][0][i][1]:
                continue
            h_vals = np.array([r[0][i][1][q] for r in results])
            h_theory = float(spectrum.hurst(q)) if spectrum is not None else None
            stats[f"H({q:g})"] = _summarize(h_vals, h_theory, k_total)
        if lam_effs is not None:
            lam_theory = plan.params.get("lambda2") if plan.model == "mrw" \
                and plan.surrogate == "none" else None
            stats["lambda2_eff"] = _summarize(lam_effs, lam_theory, k_total)
        window_reports.append(WindowReport(
            window=w, stats=stats, qs=qs.copy(),
            zeta_mean=zeta_all.mean(axis=0),
            zeta_std=zeta_all.std(axis=0, ddof=1) if k_total > 1
            else np.zeros(len(qs)),
            zeta_theory=zeta_th))
    return ExperimentReport(plan=plan, windows=window_reports,
                            realizations_used=k_total)


# ---------------------------------------------------------------------------
# Surrogate battery for a real series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BatteryReport:
    """Plain estimates plus shuffle/gaussianize/matched-t ensembles."""

    tails: dict[str, TailFit]
    matched_n: float
    plain: dict[str, dict[str, float]]
    shuffled: ExperimentReport
    gaussianized: ExperimentReport
    matched_tbm: ExperimentReport

    def to_dict(self):
        tails = {side: {"alpha": tf.alpha, "xmin": tf.xmin,
                        "ks_distance": tf.ks_distance,
                        "stderr_alpha": tf.stderr_alpha,
                        "tail_count": tf.tail_count,
                        "side_count": tf.side_count}
                 for side, tf in self.tails.items()}
        return {"kind": "battery",
                "tails": tails,
                "matched_n": self.matched_n,
                "plain": self.plain,
                "shuffled": self.shuffled.to_dict(),
                "gaussianized": self.gaussianized.to_dict(),
                "matched_tbm": self.matched_tbm.to_dict(),
                "code_version": __version__}


def surrogate_battery(series: Series, reps: int, windows: tuple[LagWindow, ...],
                      grid: QGrid | None = None, seed: MasterSeed | int = 0,
                      threads: int = 1) -> BatteryReport:
    """The full real-data protocol: tails, plain estimates, K shuffles,
    K Gaussianizations, and a matched uniscaling t ensemble whose degrees of
    freedom equal the heavier (smaller) fitted tail exponent.
    """
    if reps < 30:
        raise DomainError("battery needs at least 30 repetitions")
    grid = grid or QGrid()
    master = seed if isinstance(seed, MasterSeed) else MasterSeed(seed)
    x = series.to_increments() if series.kind == "levels" else series

    tails = {side: fit_tail(x, side) for side in ("left", "right")}
    matched_n = min(tails["left"].alpha, tails["right"].alpha)
    if grid.qs.max() >= matched_n:
        warnings.warn(f"grid max q={grid.qs.max():g} >= fitted tail exponent "
                      f"{matched_n:.2f}; top moments may not exist", stacklevel=2)

    plain = {}
    for w in windows:
        res = estimate_ghe(x, w, grid)
        pf = fit_parabola(res)
        plain[str(w)] = {"B": pf.B, "H(0.5)": res.hurst_at(0.5),
                         "H(1)": res.hurst_at(1.0)}

    def plan_for(surrogate, model=None, params=None, length=None, key=0):
        return ExperimentPlan(model=model, params=params or {},
                              surrogate=surrogate, realizations=reps,
                              length=length, windows=windows, grid=grid,
                              seed=master.child(7, key))

    shuf = run_experiment(plan_for("shuffle", key=1), base_series=x,
                          threads=threads)
    gaus = run_experiment(plan_for("gaussianize", key=2), base_series=x,
                          threads=threads)
    tbm = run_experiment(plan_for("none", model="tbm",
                                  params={"n": matched_n},
                                  length=len(x), key=3), threads=threads)
    return BatteryReport(tails=tails, matched_n=matched_n, plain=plain,
                         shuffled=shuf, gaussianized=gaus, matched_tbm=tbm)
