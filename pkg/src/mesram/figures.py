"""Matplotlib figure rendering for the CLI report paths.

Figures are rendered headless (Agg) to files next to the delimited
output.  They are presentation artifacts: the CSV/JSON payloads remain
the authoritative, byte-reproducible results.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_device_trace(rows, path) -> None:
    """Magnetization components and gate voltage vs. time."""
    t = [r[0] * 1e12 for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    for idx, label in ((1, "mx"), (2, "my"), (3, "mz")):
        ax1.plot(t, [r[idx] for r in rows], label=label, lw=0.8)
    ax1.set_ylabel("magnetization")
    ax1.legend(loc="best", fontsize=8)
    ax2.plot(t, [r[4] * 1e3 for r in rows], color="tab:red", lw=0.8)
    ax2.set_ylabel("gate voltage (mV)")
    ax2.set_xlabel("time (ps)")
    _save(fig, path)


def plot_cell_trace(trace, path) -> None:
    """Per-operation energy along the scenario timeline."""
    fig, ax = plt.subplots(figsize=(6, 3))
    cycles = [row[0] for row in trace]
    energies = [row[4] * 1e15 for row in trace]
    ax.bar(cycles, energies, color="tab:blue")
    ax.set_xticks(cycles)
    ax.set_xticklabels([row[1] for row in trace], rotation=45, fontsize=8)
    ax.set_ylabel("energy (fJ)")
    _save(fig, path)


def plot_mc_curves(curves: dict, path) -> None:
    """Failure rate vs. 3-sigma percentage, one line per operation."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for op, pts in curves.items():
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, marker="o", ms=3, label=op)
    ax.set_xlabel(r"3$\sigma$ variation (%)")
    ax.set_ylabel("failure rate")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_margin_hist(samples: dict, path) -> None:
    """Histograms of the model-derived noise-margin proxies."""
    fig, axes = plt.subplots(1, len(samples), figsize=(4 * len(samples), 3))
    if len(samples) == 1:
        axes = [axes]
    for ax, (name, data) in zip(axes, samples.items()):
        ax.hist(data, bins=40, color="tab:green", alpha=0.8)
        ax.set_xlabel(f"{name} (mV, model proxy)")
    _save(fig, path)


def plot_bnn_energy(per_layer, path) -> None:
    """Per-layer workload energy breakdown."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    xs = [f"conv{d['layer'] + 1}" for d in per_layer]
    ax.bar(xs, [d["xnor_energy_j"] * 1e6 for d in per_layer],
           label="in-array XNOR", color="tab:blue")
    adders = [d["adder_energy_j"] * 1e6 for d in per_layer]
    if any(adders):
        ax.bar(xs, adders, bottom=[d["xnor_energy_j"] * 1e6 for d in per_layer],
               label="popcount/add", color="tab:orange")
        ax.legend(fontsize=8)
    ax.set_ylabel(r"energy ($\mu$J)")
    _save(fig, path)
