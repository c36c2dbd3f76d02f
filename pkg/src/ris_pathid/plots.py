"""Figure rendering for the report commands.

Each report command writes a PNG next to its CSV. Figures are rendered
headless and with fixed metadata so repeated runs produce identical
files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
    "font.size": 10,
}
_PNG_METADATA = {"Software": "ris-pathid"}


def _save(fig, out_path):
    fig.savefig(out_path, format="png", metadata=_PNG_METADATA)
    plt.close(fig)


def render_sweep(rows, x_key, out_path, title):
    """Two-axis sweep figure: error probability left, power difference right."""
    x = [row[x_key] for row in rows]
    with plt.rc_context(_STYLE):
        fig, ax_err = plt.subplots()
        ax_err.plot(x, [row["p_error_analytic"] for row in rows],
                    color="tab:red", label="analytic")
        ax_err.plot(x, [row["p_error_empirical"] for row in rows],
                    "o", color="black", markersize=4, fillstyle="none",
                    label="simulated")
        ax_err.set_xlabel(x_key)
        ax_err.set_ylabel("detection error probability")
        ax_gd = ax_err.twinx()
        ax_gd.plot(x, [row["g_d_analytic_db"] for row in rows],
                   color="tab:blue", linestyle="--", label="analytic")
        ax_gd.plot(x, [row["g_d_empirical_db"] for row in rows],
                   "s", color="tab:blue", markersize=4, fillstyle="none",
                   label="simulated")
        ax_gd.set_ylabel("relative power difference [dB]")
        ax_gd.grid(False)
        handles1, labels1 = ax_err.get_legend_handles_labels()
        ax_err.legend(handles1, [f"P_error {s}" for s in labels1], loc="upper center")
        ax_err.set_title(title)
        fig.tight_layout()
        _save(fig, out_path)


def render_cdf_compare(rows, out_path, title):
    """Analytic vs empirical power CDFs for both patterns."""
    x = [row["x"] for row in rows]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(x, [row["cdf_analytic_p1"] for row in rows],
                color="tab:red", label="analytic, dynamic coherent")
        ax.plot(x, [row["cdf_empirical_p1"] for row in rows],
                color="black", linestyle="--", label="empirical, dynamic coherent")
        ax.plot(x, [row["cdf_analytic_p2"] for row in rows],
                color="tab:orange", label="analytic, dynamic random")
        ax.plot(x, [row["cdf_empirical_p2"] for row in rows],
                color="dimgray", linestyle="--", label="empirical, dynamic random")
        ax.set_xlabel("channel power")
        ax.set_ylabel("CDF")
        ax.legend(loc="lower right", fontsize=8)
        ax.set_title(title)
        fig.tight_layout()
        _save(fig, out_path)


def render_eval(dist1, dist2, threshold, out_path, title):
    """Analytic CDFs of both patterns with the decision threshold marked."""
    import numpy as np

    from .stats import power_cdf

    hi = max(dist1.mean + 6.0 * dist1.variance ** 0.5,
             dist2.mean + 6.0 * dist2.variance ** 0.5)
    grid = np.linspace(0.0, hi, 400)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(grid, power_cdf(grid, dist1), color="tab:red",
                label="dynamic coherent")
        ax.plot(grid, power_cdf(grid, dist2), color="tab:orange",
                label="dynamic random")
        ax.axvline(threshold, color="black", linestyle=":",
                   label="decision threshold")
        ax.set_xlabel("channel power")
        ax.set_ylabel("CDF")
        ax.legend(loc="lower right", fontsize=8)
        ax.set_title(title)
        fig.tight_layout()
        _save(fig, out_path)
