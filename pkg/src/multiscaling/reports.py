"""Report construction and plot-ready data emission.

JSON is the only report format; plot data goes out as tidy CSV with named
columns so any plotting tool can consume it.  The same row dicts feed the
bundled matplotlib renderers.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .errors import UsageError
from .estimators import CovFit, ScalingResult, TailFit, fit_parabola
from .generators import TheorySpectrum

PLOT_KINDS = ("zeta_vs_q", "moments_loglog", "tail_ccdf", "cov_curve")
CCDF_MAX_POINTS = 512


def estimate_report(result: ScalingResult, cov: CovFit | None = None,
                    spectrum: TheorySpectrum | None = None,
                    label: str = "") -> dict:
    """JSON-ready report for a single-series scaling estimation."""
    pf = fit_parabola(result)
    zeta = [{"q": float(q), "value": float(z), "stderr": float(se),
             "r2": float(r2)}
            for q, z, se, r2 in zip(result.qs, result.zeta, result.stderr,
                                    result.r2)]
    hurst = [{"q": float(q), "value": float(h)}
             for q, h in zip(result.qs, result.hurst)]
    moments = []
    taus = np.exp(result.ln_taus)
    for i, lt in enumerate(result.ln_taus):
        for j, q in enumerate(result.qs):
            moments.append({"tau": int(round(taus[i])), "q": float(q),
                            "ln_tau": float(lt),
                            "ln_moment": float(result.ln_moments[i, j])})
    report = {
        "kind": "estimate",
        "label": label,
        "window": str(result.window),
        "grid": [float(q) for q in result.qs],
        "zeta": zeta,
        "hurst": hurst,
        "parabola": {"B": pf.B, "A": pf.A, "c": pf.c,
                     "se_B": pf.se_B, "se_A": pf.se_A, "se_c": pf.se_c},
        "moments": moments,
        "code_version": __version__,
    }
    if spectrum is not None:
        report["theory"] = [{"q": float(q), "zeta": float(z)}
                            for q, z in zip(result.qs,
                                            spectrum.zeta(result.qs))]
    if cov is not None:
        curve = [{"T": int(t), "ln_T1": float(np.log(t + 1.0)),
                  "cov": float(c), "fit": float(f)}
                 for t, c, f in zip(cov.lags, cov.cov, cov.predicted())]
        report["cov"] = {"lambda2": cov.lambda2_hat, "L": cov.L_hat,
                         "se_lambda2": cov.se_lambda2, "se_L": cov.se_L,
                         "t_range": list(cov.t_range), "r2": cov.r2,
                         "zero_count": cov.zero_count, "curve": curve}
    return report


def _ccdf_points(tf: TailFit) -> list[dict]:
    """Downsampled empirical CCDF of one side plus the fitted line above xmin."""
    svals = tf.sorted_values
    n = svals.size
    ccdf = 1.0 - np.arange(n) / n
    if n > CCDF_MAX_POINTS:
        # keep the extreme tail dense, thin the bulk
        u = np.linspace(0.0, 1.0, CCDF_MAX_POINTS)
        idx = np.unique(np.round((1.0 - (1.0 - u) ** 3) * (n - 1)).astype(int))
    else:
        idx = np.arange(n)
    rows = []
    for i in idx:
        x = float(svals[i])
        row = {"x": x, "ccdf": float(ccdf[i])}
        if x >= tf.xmin:
            row["ccdf_fit"] = float(tf.ccdf_fit(x) * tf.tail_count / n)
        else:
            row["ccdf_fit"] = None
        rows.append(row)
    return rows


def tails_report(fits: dict[str, TailFit], label: str = "") -> dict:
    sides = {}
    for side, tf in fits.items():
        sides[side] = {"alpha": tf.alpha, "xmin": tf.xmin,
                       "ks_distance": tf.ks_distance,
                       "stderr_alpha": tf.stderr_alpha,
                       "tail_count": tf.tail_count,
                       "side_count": tf.side_count,
                       "ccdf": _ccdf_points(tf)}
    return {"kind": "tails", "label": label, "sides": sides,
            "code_version": __version__}


def write_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=1) + "\n")


def load_report(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load report {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Plot-data emission
# ---------------------------------------------------------------------------

def _require(report: dict, key: str, kind: str):
    if key not in report:
        raise UsageError(f"report of kind {report.get('kind')!r} carries no "
                         f"{key!r} section required for {kind}")


def emit_plot_data(report: dict, kind: str) -> tuple[list[str], list[dict]]:
    """Tidy rows (column names + dicts) for one of the four curve kinds."""
    if kind not in PLOT_KINDS:
        raise UsageError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    rkind = report.get("kind")

    if kind == "zeta_vs_q":
        if rkind == "estimate":
            theory = {t["q"]: t["zeta"] for t in report.get("theory", [])}
            cols = ["q", "zeta_hat", "stderr", "h_hat", "zeta_theory"]
            rows = []
            hur = {h["q"]: h["value"] for h in report["hurst"]}
            for rec in report["zeta"]:
                rows.append({"q": rec["q"], "zeta_hat": rec["value"],
                             "stderr": rec["stderr"], "h_hat": hur[rec["q"]],
                             "zeta_theory": theory.get(rec["q"])})
            return cols, rows
        if rkind == "experiment":
            cols = ["window", "q", "zeta_mean", "zeta_std", "zeta_theory"]
            rows = []
            for wrep in report["windows"]:
                for rec in wrep["zeta"]:
                    rows.append({"window": wrep["window"], "q": rec["q"],
                                 "zeta_mean": rec["mean"],
                                 "zeta_std": rec["std"],
                                 "zeta_theory": rec.get("theory")})
            return cols, rows
        raise UsageError(f"zeta_vs_q needs an estimate or experiment report, "
                         f"got {rkind!r}")

    if kind == "moments_loglog":
        if rkind != "estimate":
            raise UsageError("moments_loglog needs an estimate report")
        _require(report, "moments", kind)
        cols = ["tau", "q", "ln_tau", "ln_moment"]
        return cols, [dict(rec) for rec in report["moments"]]

    if kind == "tail_ccdf":
        if rkind != "tails":
            raise UsageError("tail_ccdf needs a tails report")
        cols = ["side", "x", "ccdf", "ccdf_fit"]
        rows = []
        for side in sorted(report["sides"]):
            for rec in report["sides"][side]["ccdf"]:
                rows.append({"side": side, **rec})
        return cols, rows

    # cov_curve
    if rkind != "estimate":
        raise UsageError("cov_curve needs an estimate report with a cov fit")
    _require(report, "cov", kind)
    cols = ["T", "ln_T1", "cov", "fit"]
    return cols, [dict(rec) for rec in report["cov"]["curve"]]


def write_plot_csv(cols: list[str], rows: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row[k])
                             for k in cols})


def experiment_table(report: dict) -> tuple[list[str], list[dict]]:
    """Flat mean/std/theory table mirroring the ensemble-comparison layout."""
    cols = ["window", "statistic", "mean", "std", "theory", "z"]
    rows = []
    for wrep in report["windows"]:
        for name, s in wrep["stats"].items():
            rows.append({"window": wrep["window"], "statistic": name,
                         "mean": s["mean"], "std": s["std"],
                         "theory": s.get("theory"), "z": s.get("z")})
    return cols, rows
