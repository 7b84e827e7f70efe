"""Figure and CSV report generation.

Writes three paired artifacts into a directory:

* mintime — minimum synthesis time over a sweep of target triples for a
  fixed drift (CSV table + scatter figure colored by T).
* contraction — off-Cartan norm decay of the second-order reduction at two
  step sizes (CSV + semilog figure).
* flow — projection-flow deviation versus Euler step (CSV + log-log figure).
"""

from __future__ import annotations

import csv
import os

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _mintime_sweep(outdir: str, seed: int) -> list[str]:
    from .weyl import OrbitType, min_time

    drift = np.array([1.0, 0.5, 0.25])
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(120):
        target = rng.uniform(-1.2, 1.2, 3)
        t, _ = min_time(target, drift, OrbitType.TWO_QUBIT_24)
        rows.append([*target, t])
    csv_path = os.path.join(outdir, "mintime.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "gamma", "T"])
        writer.writerows(rows)

    data = np.array(rows)
    fig, ax = plt.subplots(figsize=(5, 4))
    sc = ax.scatter(data[:, 0], data[:, 1], c=data[:, 3], s=18, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="minimum time T")
    ax.set_xlabel(r"target $\alpha$")
    ax.set_ylabel(r"target $\beta$")
    ax.set_title(f"Minimum time, drift {tuple(drift)}")
    fig_path = os.path.join(outdir, "mintime.png")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return [csv_path, fig_path]


def _contraction(outdir: str, seed: int) -> list[str]:
    from .flow import second_order_reduce
    from .roots import builtin_ordering, builtin_pair, compute_roots

    system = compute_roots(builtin_pair("twospin"), builtin_ordering("twospin"))
    rng = np.random.default_rng(seed)
    x = sum(c * f for c, f in zip(0.2 * rng.standard_normal(3), system.a_frame))
    for root in system.positive:
        x = x + 0.05 * rng.standard_normal() * root.p_part
        x = x + 0.05 * rng.standard_normal() * root.k_part

    csv_path = os.path.join(outdir, "contraction.csv")
    fig, ax = plt.subplots(figsize=(5, 4))
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["delta", "iteration", "off_cartan_norm"])
        for delta in (1e-2, 1e-3):
            tr = second_order_reduce(system, x, delta)
            sizes = [b + c for _, b, c in tr.iterates]
            for i, s in enumerate(sizes):
                writer.writerow([delta, i, s])
            ax.semilogy(sizes, marker="o", label=rf"$\Delta$ = {delta:g}")
    ax.set_xlabel("iteration")
    ax.set_ylabel(r"$\|b_k\| + \|c_k\|$")
    ax.set_title("Second-order reduction contraction")
    ax.legend()
    fig_path = os.path.join(outdir, "contraction.png")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return [csv_path, fig_path]


def _flow_deviation(outdir: str, seed: int) -> list[str]:
    from .flow import projection_flow, random_schedule
    from .kak import Family

    lam = np.array([0.9, 0.2, -0.4, -0.7])
    drift = -1j * np.diag(lam).astype(complex)
    schedule = random_schedule(Family.SUN_SON, 4, 3, seed=seed + 5, mean_tau=0.15)
    steps = [4e-2, 2e-2, 1e-2, 5e-3]
    devs = [
        projection_flow(drift, schedule, step=s, hull_stride=10).max_deviation
        for s in steps
    ]
    csv_path = os.path.join(outdir, "flow_deviation.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "max_deviation"])
        writer.writerows(zip(steps, devs))

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(steps, devs, marker="s")
    ax.set_xlabel("Euler step")
    ax.set_ylabel("max coordinate deviation")
    ax.set_title("Projection flow vs exact coordinates")
    fig_path = os.path.join(outdir, "flow_deviation.png")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return [csv_path, fig_path]


def write_report(outdir: str, seed: int = 0) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    paths = []
    paths += _mintime_sweep(outdir, seed)
    paths += _contraction(outdir, seed)
    paths += _flow_deviation(outdir, seed)
    return paths
