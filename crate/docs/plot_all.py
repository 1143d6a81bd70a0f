#!/usr/bin/env python3
"""Render quick-look PNGs from nems-chaos CSV artifacts.

Usage:
    python3 docs/plot_all.py <artifact-dir> [more-dirs ...] [--out <dir>]

Scans each directory for the known artifact stems and writes one PNG per
experiment type into --out (default: the first artifact directory). Multiple
directories can be mixed, e.g. one per experiment; files from all of them are
grouped by stem. Requires numpy and matplotlib.
"""

import argparse
import re
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

NAME_RE = re.compile(r"^(?P<stem>[a-z_]+?)_K(?P<K>[0-9.eE+-]+)_seed(?P<seed>\d+)\.csv$")


def scan(dirs):
    """Group artifact files as {stem: {K: [(seed, path), ...]}}, seeds sorted."""
    groups = defaultdict(lambda: defaultdict(list))
    for d in dirs:
        for path in sorted(Path(d).glob("*.csv")):
            m = NAME_RE.match(path.name)
            if m:
                groups[m["stem"]][float(m["K"])].append((int(m["seed"]), path))
    for by_k in groups.values():
        for files in by_k.values():
            files.sort()
    return groups


def load(path):
    """Header-aware CSV load; returns a structured array (possibly empty)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return np.atleast_1d(data)


def k_axes(by_k, **kwargs):
    """One subplot per K value, smallest K first."""
    ks = sorted(by_k)
    fig, axes = plt.subplots(1, len(ks), squeeze=False, **kwargs)
    return fig, [(k, axes[0][i]) for i, k in enumerate(ks)]


def plot_phase_portrait(by_k, out):
    fig, axes = k_axes(by_k, figsize=(11, 4.5), sharey=True)
    for k, ax in axes:
        for _, path in by_k[k]:
            d = load(path)
            ax.plot(d["theta"], d["I"], ",", alpha=0.5)
        ax.set(title=f"K = {k:g}", xlabel="θ")
    axes[0][1].set_ylabel("I")
    finish(fig, out, "phase_portrait.png")


def plot_spin_dynamics(by_k, out):
    fig, axes = k_axes(by_k, figsize=(11, 4), sharey=True)
    for k, ax in axes:
        _, path = by_k[k][0]  # lowest seed
        d = load(path)
        for comp in ("sx", "sy", "sz"):
            ax.plot(d["n"], d[comp], lw=0.6, label=f"⟨σ{comp[1]}⟩")
        ax.set(title=f"K = {k:g}", xlabel="kick n", ylim=(-1.05, 1.05))
    axes[0][1].legend(loc="lower right", fontsize=8)
    finish(fig, out, "spin_dynamics.png")


def plot_psd(by_k, out):
    fig, axes = k_axes(by_k, figsize=(11, 4), sharey=True)
    for k, ax in axes:
        _, path = by_k[k][0]
        d = load(path)
        half = len(d) // 2 + 1  # real series: upper half mirrors the lower
        for comp in ("Ix", "Iy", "Iz"):
            ax.semilogy(d["omega"][:half], d[comp][:half], lw=0.6, label=comp)
        ax.set(title=f"K = {k:g}", xlabel="ω")
    axes[0][1].legend(fontsize=8)
    finish(fig, out, "psd.png")


def plot_series(stem, column, ylabel, by_k, out):
    fig, ax = plt.subplots(figsize=(9, 4))
    for k in sorted(by_k):
        _, path = by_k[k][0]
        d = load(path)
        ax.plot(d["n"], d[column], lw=0.7, label=f"K = {k:g}")
    ax.set(xlabel="kick n", ylabel=ylabel)
    ax.legend()
    finish(fig, out, f"{stem}.png")


def plot_levels(by_k, out):
    fig, ax = plt.subplots(figsize=(9, 4))
    for k in sorted(by_k):
        _, path = by_k[k][0]
        d = load(path)
        edges = np.append(d["bin_lo"], d["bin_hi"][-1])
        ax.stairs(d["density"], edges, label=f"K = {k:g}")
    ax.set(xlabel="level spacing S", ylabel="density")
    ax.legend()
    finish(fig, out, "levels.png")


def plot_diffusion(moments_by_k, fits_by_k, out):
    fig, ax = plt.subplots(figsize=(9, 4))
    for k in sorted(moments_by_k):
        _, path = moments_by_k[k][0]
        d = load(path)
        (line,) = ax.plot(d["n"], d["msd"], lw=0.9, label=f"K = {k:g}")
        fits = fits_by_k.get(k)
        if fits:
            fit = load(fits[0][1])
            slope = float(fit["fitted_slope"][0])
            ax.plot(d["n"], slope * d["n"], "--", lw=0.8, color=line.get_color())
    ax.set(xlabel="kick n", ylabel="⟨(I_n − I_0)²⟩")
    ax.legend()
    finish(fig, out, "diffusion.png")


def plot_correlations(by_k, out):
    fig, ax = plt.subplots(figsize=(9, 4))
    for k in sorted(by_k):
        _, path = by_k[k][0]
        d = load(path)
        ax.plot(d["lag"], d["covariance"] / d["covariance"][0], lw=0.8, label=f"K = {k:g}")
    ax.set(xlabel="lag", ylabel="C(lag) / C(0)")
    ax.legend()
    finish(fig, out, "correlations.png")


def plot_ttsb(by_k, out):
    fig, axes = k_axes(by_k, figsize=(11, 4))
    for k, ax in axes:
        _, path = by_k[k][0]
        d = load(path)
        ax.set(title=f"K = {k:g}", xlabel="n", ylabel="k")
        if d.size == 0:
            ax.text(0.5, 0.5, "no recurrences", ha="center", transform=ax.transAxes)
            continue
        broken = d["observable_recurred"] == 0
        ax.plot(d["n"][~broken], d["k"][~broken], ".", ms=2, label="full recurrence")
        if broken.any():
            ax.plot(d["n"][broken], d["k"][broken], "x", ms=4, label="observables differ")
        ax.legend(fontsize=8)
    finish(fig, out, "ttsb.png")


def finish(fig, out, name):
    fig.tight_layout()
    target = Path(out) / name
    fig.savefig(target, dpi=150)
    plt.close(fig)
    print(f"wrote {target}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dirs", nargs="+", help="directories containing nems-chaos CSVs")
    ap.add_argument("--out", help="directory for PNGs (default: first input dir)")
    args = ap.parse_args()
    out = Path(args.out or args.dirs[0])
    out.mkdir(parents=True, exist_ok=True)

    groups = scan(args.dirs)
    if not groups:
        sys.exit(f"no recognized artifact CSVs under {args.dirs}")

    if "phase_portrait" in groups:
        plot_phase_portrait(groups["phase_portrait"], out)
    if "spin_dynamics" in groups:
        plot_spin_dynamics(groups["spin_dynamics"], out)
    if "psd" in groups:
        plot_psd(groups["psd"], out)
    if "coherence" in groups:
        plot_series("coherence", "coherence", "relative entropy of coherence", groups["coherence"], out)
    if "recurrence" in groups:
        plot_series("recurrence", "recurrence", "‖ψ_n − ψ_0‖² distance", groups["recurrence"], out)
    if "levels_hist" in groups:
        plot_levels(groups["levels_hist"], out)
    if "diffusion" in groups:
        plot_diffusion(groups["diffusion"], groups.get("diffusion_fit", {}), out)
    if "correlations" in groups:
        plot_correlations(groups["correlations"], out)
    if "ttsb" in groups:
        plot_ttsb(groups["ttsb"], out)


if __name__ == "__main__":
    main()
