"""Static SVG figures for the command-line reports.

All text is converted to paths (no font dependencies), the id hash
salt is pinned, and no timestamp metadata is written, so the same
data always renders to the same bytes. matplotlib is imported lazily
to keep plain solves fast.
"""

from __future__ import annotations

import math

import numpy as np


def _new_figure(width: float = 6.4, height: float = 4.4, ncols: int = 1):
    import matplotlib

    matplotlib.rcParams["svg.fonttype"] = "path"
    matplotlib.rcParams["svg.hashsalt"] = "wage-band-lab"
    from matplotlib.figure import Figure

    fig = Figure(figsize=(width, height))
    axes = fig.subplots(1, ncols)
    return fig, axes


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None},
                bbox_inches="tight")


def frontier_figure(result, path) -> None:
    """Surplus possibility cloud, fitted frontier, no-intervention mark."""
    fig, ax = _new_figure()
    cloud_r = [p.firm_surplus for p in result.points]
    cloud_s = [p.worker_surplus for p in result.points]
    ax.scatter(cloud_r, cloud_s, s=4, color="0.75", label="achievable bands")
    front = result.frontier_points
    ax.plot([p.firm_surplus for p in front],
            [p.worker_surplus for p in front],
            "o-", color="tab:blue", markersize=3, label="frontier")
    base = result.no_intervention
    ax.plot([base.firm_surplus], [base.worker_surplus], "*",
            color="tab:red", markersize=11, label="no intervention")
    ax.set_xlabel("firm surplus")
    ax.set_ylabel("worker surplus")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def sweep_thresholds_figure(rows, path) -> None:
    """Optimal ability thresholds against the swept parameter."""
    fig, ax = _new_figure()
    values = [r.value for r in rows]
    ax.plot(values, [r.z_lo for r in rows], "o-", label="z_lo")
    ax.plot(values, [r.z_hi for r in rows], "s-", label="z_hi")
    ax.set_xlabel(rows[0].param if rows else "value")
    ax.set_ylabel("ability threshold")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def sweep_gains_figure(rows, path) -> None:
    """Welfare gains of both policies against the swept parameter."""
    fig, ax = _new_figure()
    values = [r.value for r in rows]
    ax.plot(values, [r.gain_full_pct for r in rows], "o-", label="full band")
    ax.plot(values, [r.gain_minonly_pct for r in rows], "s-",
            label="floor only")
    ax.set_xlabel(rows[0].param if rows else "value")
    ax.set_ylabel("welfare gain over no intervention (%)")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def schedule_figure(eq, path) -> None:
    """Education and wage schedules of one equilibrium."""
    fig, (left, right) = _new_figure(9.0, 4.0, ncols=2)
    if eq.path is not None:
        left.plot(eq.path.mu, eq.path.s, color="tab:blue")
        right.plot(eq.path.s, eq.path.tau, color="tab:blue")
    if eq.pooling is not None:
        left.plot([eq.pooling.z_hi], [eq.pooling.s_hi], "o",
                  color="tab:orange", label="pooled contract")
        right.plot([eq.pooling.s_hi], [eq.pooling.t_hi], "o",
                   color="tab:orange")
        left.legend(loc="best", fontsize=8)
    left.set_xlabel("ability")
    left.set_ylabel("education")
    right.set_xlabel("education")
    right.set_ylabel("wage")
    _save(fig, path)


def profiles_figure(worker, firm, path) -> None:
    """Utility and profit by agent, policy against reference.

    `firm` may be None when the model admits no firm index (flat
    match technology); the panel is then omitted.
    """
    ncols = 2 if firm is not None else 1
    fig, axes = _new_figure(4.6 * ncols + 0.4, 4.0, ncols=ncols)
    axes = np.atleast_1d(axes)
    axes[0].plot(worker.grid, worker.policy_values, label="policy")
    axes[0].plot(worker.grid, worker.reference_values, "--",
                 label="no intervention")
    for crossing in worker.crossings:
        axes[0].axvline(crossing, color="0.8", linewidth=0.8)
    axes[0].set_xlabel("ability")
    axes[0].set_ylabel("worker utility")
    axes[0].legend(loc="best", fontsize=8)
    if firm is not None:
        axes[1].plot(firm.grid, firm.policy_values, label="policy")
        axes[1].plot(firm.grid, firm.reference_values, "--",
                     label="no intervention")
        for crossing in firm.crossings:
            axes[1].axvline(crossing, color="0.8", linewidth=0.8)
        axes[1].set_xlabel("match quality")
        axes[1].set_ylabel("firm profit")
        axes[1].legend(loc="best", fontsize=8)
    _save(fig, path)


def cdf_figure(distributions, path) -> None:
    """Education and wage distribution functions."""
    fig, (left, right) = _new_figure(9.0, 4.0, ncols=2)
    edu, wages = distributions.education, distributions.wages
    left.step(edu[:, 0], edu[:, 1], where="post", color="tab:blue")
    right.step(wages[:, 0], wages[:, 1], where="post", color="tab:blue")
    left.set_xlabel("education")
    left.set_ylabel("cumulative share")
    right.set_xlabel("wage")
    right.set_ylabel("cumulative share")
    for ax in (left, right):
        ax.set_ylim(-0.02, 1.02)
    _save(fig, path)
