"""Matplotlib rendering of the four plot-data kinds to image files.

Each renderer consumes the same tidy rows that go into the CSV, so the
figure and the delimited file always agree.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import UsageError  # noqa: E402

FIGSIZE = (6.0, 4.0)
DPI = 150


def _group(rows, key):
    groups = defaultdict(list)
    for row in rows:
        groups[row[key]].append(row)
    return groups


def render_zeta_vs_q(rows, ax=None):
    ax = ax or plt.figure(figsize=FIGSIZE).add_subplot()
    if rows and "window" in rows[0]:
        for window, part in _group(rows, "window").items():
            qs = [r["q"] for r in part]
            ax.errorbar(qs, [r["zeta_mean"] for r in part],
                        yerr=[r["zeta_std"] for r in part],
                        fmt="o-", ms=3.5, capsize=2, label=f"tau {window}")
            if part[0].get("zeta_theory") is not None:
                ax.plot(qs, [r["zeta_theory"] for r in part], "--",
                        color="0.4", lw=1)
    else:
        qs = [r["q"] for r in rows]
        ax.errorbar(qs, [r["zeta_hat"] for r in rows],
                    yerr=[r["stderr"] for r in rows], fmt="o-", ms=3.5,
                    capsize=2, label="measured")
        if rows and rows[0].get("zeta_theory") is not None:
            ax.plot(qs, [r["zeta_theory"] for r in rows], "r--", lw=1,
                    label="theory")
    ax.set_xlabel("q")
    ax.set_ylabel(r"$\zeta(q)$")
    ax.legend(frameon=False, fontsize=8)
    return ax.figure


def render_moments_loglog(rows, ax=None):
    ax = ax or plt.figure(figsize=FIGSIZE).add_subplot()
    for q, part in sorted(_group(rows, "q").items()):
        ax.plot([r["ln_tau"] for r in part], [r["ln_moment"] for r in part],
                lw=0.9, label=f"q={q:g}")
    ax.set_xlabel(r"$\ln \tau$")
    ax.set_ylabel(r"$\ln E[|\Delta_\tau X|^q]$")
    ax.legend(frameon=False, fontsize=7, ncol=2)
    return ax.figure


def render_tail_ccdf(rows, ax=None):
    ax = ax or plt.figure(figsize=FIGSIZE).add_subplot()
    colors = {"left": "C0", "right": "C1"}
    for side, part in _group(rows, "side").items():
        c = colors.get(side, "C2")
        ax.loglog([r["x"] for r in part], [r["ccdf"] for r in part],
                  ".", ms=2.5, color=c, label=f"{side} tail")
        fit = [(r["x"], r["ccdf_fit"]) for r in part
               if r.get("ccdf_fit") not in (None, "")]
        if fit:
            ax.loglog([f[0] for f in fit], [float(f[1]) for f in fit],
                      "--", color=c, lw=1)
    ax.set_xlabel("|return|")
    ax.set_ylabel(r"$P(X \geq x)$")
    ax.legend(frameon=False, fontsize=8)
    return ax.figure


def render_cov_curve(rows, ax=None):
    ax = ax or plt.figure(figsize=FIGSIZE).add_subplot()
    ax.plot([r["ln_T1"] for r in rows], [r["cov"] for r in rows],
            "o", ms=3, label="measured")
    ax.plot([r["ln_T1"] for r in rows], [r["fit"] for r in rows],
            "r--", lw=1, label="log-decay fit")
    ax.set_xlabel(r"$\ln(T+1)$")
    ax.set_ylabel(r"$C(T)$")
    ax.legend(frameon=False, fontsize=8)
    return ax.figure


RENDERERS = {
    "zeta_vs_q": render_zeta_vs_q,
    "moments_loglog": render_moments_loglog,
    "tail_ccdf": render_tail_ccdf,
    "cov_curve": render_cov_curve,
}


def render(kind: str, rows, path: str | Path) -> Path:
    """Render one plot kind to ``path`` (PNG) and return the path."""
    if kind not in RENDERERS:
        raise UsageError(f"no renderer for plot kind {kind!r}")
    fig = RENDERERS[kind](rows)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path
