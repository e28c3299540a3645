"""Figure rendering for the report path.

Each writer takes already-computed data and saves a PNG next to the CSV the
CLI emits; nothing here feeds back into the solvers.
"""

from __future__ import annotations

import json
import math
import os
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .config import RunConfig
from .divisor import Exponent
from .trains import train
from .primes import factorize
from .wolke import WolkeConfig, build
from . import stats

_DPI = 150


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def train_figure(t, path: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 5))
    for idx, c in enumerate(t.cars):
        ps = [p for p, _ in c.entries]
        vs = [float(v) for _, v in c.entries]
        ax.plot(ps, vs, "o-", ms=4, lw=0.8, label=f"car {idx} (base {c.base})")
        ax.axhline(float(c.inf_value), color="gray", lw=0.5, ls=":")
    ax.set_xscale("log")
    ax.set_xlabel("absorbed prime p")
    ax.set_ylabel(f"f_{t.s}(base * p)")
    ax.set_title(f"Linked decreasing sequences from n = {t.origin}")
    ax.legend(fontsize=8)
    _save(fig, path)


def scan_figure(values: np.ndarray, s, path: str, hline: float = None,
                seed: int = 0, max_points: int = 60000) -> None:
    n = np.arange(1, len(values) + 1)
    if len(values) > max_points:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(values), size=max_points, replace=False))
        n, values = n[keep], values[keep]
    fig, ax = plt.subplots(figsize=(9, 5))
    ax.plot(n, values, ",", color="tab:blue")
    if hline is not None:
        ax.axhline(hline, color="tab:red", lw=1.0, label="zeta(s)")
        ax.legend(fontsize=8)
    ax.set_xlabel("n")
    ax.set_ylabel(f"f_{s}(n)")
    ax.set_title(f"Values of f_{s} up to {len(values)}")
    _save(fig, path)


def wolke_figure(seq, path: str) -> None:
    expo = float(seq.config.bound_exponent)
    ks, gaps, bounds = [], [], []
    for st in seq.steps:
        ks.append(st.k)
        g = float(st.gap) if isinstance(st.gap, Fraction) else st.gap.midpoint_float()
        gaps.append(max(g, 1e-320))
        bounds.append(math.exp(-expo * float(st.log_n.value)))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(ks, gaps, "o-", label="a - f(n_k)")
    ax.semilogy(ks, bounds, "s--", label="n_k^-(0.4s - eps)")
    ax.set_xlabel("step k")
    ax.set_ylabel("gap")
    ax.set_title(
        f"Approach to a = {seq.config.a} at s = {seq.config.s} "
        f"(stop: {seq.stop_reason})"
    )
    ax.legend(fontsize=8)
    _save(fig, path)


def mean_figure(idx: np.ndarray, means: np.ndarray, ref: float, s, path: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(idx, means, lw=1.0, label="running mean of f_s")
    ax.axhline(ref, color="tab:red", lw=1.0, label="zeta(s+1)")
    ax.set_xlabel("N")
    ax.set_ylabel("mean")
    ax.set_title(f"Law of large numbers for f_{s}")
    ax.legend(fontsize=8)
    _save(fig, path)


def curve_figure(s_vals, means, refs, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(s_vals, means, "o", label="empirical mean")
    ax.plot(s_vals, refs, "-", label="zeta(s+1)")
    ax.set_xlabel("s")
    ax.set_ylabel("expectation")
    ax.set_title("Expectation of f_s against zeta(s+1)")
    ax.legend(fontsize=8)
    _save(fig, path)


def write_report(out_dir: str, scan_n: int, stats_n: int, cfg: RunConfig) -> None:
    """The standard study: train, two scans, a sequence run, running mean
    and the expectation curve; CSV plus PNG for each."""
    from .cli import csv_payload, dec_str, frac_str, value_cells, wolke_rows

    os.makedirs(out_dir, exist_ok=True)
    artifacts = []

    def put(name: str, payload: str) -> str:
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        artifacts.append(name)
        return path

    # linked sequences from n = 6
    t = train(factorize(6), Exponent.of(1), 3, 40, cfg.precision_bits)
    rows = []
    for idx, c in enumerate(t.cars):
        for p, value in c.entries:
            rows.append([str(idx), str(p)] + value_cells(value))
    put("train_n6_s1.csv", csv_payload(
        ["car_index", "p", "value_decimal", "value_fraction"], rows))
    train_figure(t, os.path.join(out_dir, "train_n6_s1.png"))
    artifacts.append("train_n6_s1.png")

    # dense scan at s = 1, ruptured scan at s = 2
    for s_int, hline in ((1, None), (2, float(stats.zeta(2).value))):
        sig = stats.sigma_values(scan_n, s_int, scan_cap=cfg.scan_cap)
        vals = sig / (np.arange(1, scan_n + 1, dtype=np.float64) ** s_int)
        rows = [
            [str(n), f"{vals[n - 1]:.17g}",
             frac_str(Fraction(int(sig[n - 1]), n**s_int))]
            for n in range(1, scan_n + 1)
        ]
        put(f"scan_s{s_int}.csv", csv_payload(
            ["n", "value_decimal", "value_fraction"], rows))
        scan_figure(vals, s_int, os.path.join(out_dir, f"scan_s{s_int}.png"),
                    hline=hline, seed=cfg.seed)
        artifacts.append(f"scan_s{s_int}.png")

    # density-strength sequence toward a = 2
    seq = build(WolkeConfig.of(2, 1, "0.1", max_steps=10,
                               prime_cap=cfg.prime_cap), cfg.precision_bits)
    put("wolke_a2_s1.csv", csv_payload(
        ["k", "p", "log10_n", "f_value_decimal", "gap_decimal",
         "bound_decimal", "verdict"], wolke_rows(seq)))
    wolke_figure(seq, os.path.join(out_dir, "wolke_a2_s1.png"))
    artifacts.append("wolke_a2_s1.png")

    # running mean at s = 1 and the expectation curve
    idx, means = stats.running_mean(stats_n, 1, scan_cap=cfg.scan_cap)
    ref = float(stats.zeta(2).value)
    put("running_mean_s1.csv", csv_payload(
        ["N", "mean"], [[str(int(i)), f"{m:.17g}"] for i, m in zip(idx, means)]))
    mean_figure(idx, means, ref, 1, os.path.join(out_dir, "running_mean_s1.png"))
    artifacts.append("running_mean_s1.png")

    grid = ["0.5", "1", "1.5", "2", "2.5", "3"]
    curve = stats.expectation_curve(grid, stats_n, scan_cap=cfg.scan_cap,
                                    bits=cfg.precision_bits)
    put("expectation_curve.csv", csv_payload(
        ["s", "mean", "zeta_s_plus_1", "deviation"],
        [[str(s), dec_str(m), dec_str(z), dec_str(d)] for s, m, z, d in curve]))
    curve_figure(
        [float(s.fraction) for s, _, _, _ in curve],
        [m.midpoint_float() for _, m, _, _ in curve],
        [z.midpoint_float() for _, _, z, _ in curve],
        os.path.join(out_dir, "expectation_curve.png"),
    )
    artifacts.append("expectation_curve.png")

    manifest = {
        "schema": "divisor-lab/1",
        "command": "report",
        "scan_n": scan_n,
        "stats_n": stats_n,
        "artifacts": artifacts,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
