"""File outputs for the CLI: delimited telemetry and matplotlib figures.

Everything renders through the Agg backend so reports work headless.
"""

from __future__ import annotations

import csv
import os
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .adhesion import PullTestSample
from .firmware import ARM_THRESHOLD_MM, TOF_MAX_MM, TOF_MIN_MM
from .firmware import (
    STATUS_AUTO,
    STATUS_EXPERIMENT,
    STATUS_PAIR_A,
    STATUS_PAIR_B,
    STATUS_WRIST,
)
from .scenario import CampaignResult, ScenarioResult

TELEMETRY_FIELDS = [
    "t_ms", "x_m", "y_m", "theta_rad", "vx_m_s",
    "gap_mm", "tof_mm", "tof_valid", "status", "pinned",
]


def write_telemetry_csv(path: str, result: ScenarioResult) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TELEMETRY_FIELDS)
        writer.writeheader()
        for row in result.telemetry:
            writer.writerow(row)
    return path


def plot_trajectory(path: str, result: ScenarioResult) -> str:
    rows = result.telemetry
    t = [r["t_ms"] / 1000.0 for r in rows]
    gap = [r["gap_mm"] for r in rows]
    vx = [r["vx_m_s"] * 1000.0 for r in rows]
    fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
    ax0.plot(t, gap, lw=1.2, color="tab:blue")
    ax0.axhline(ARM_THRESHOLD_MM, color="tab:orange", ls="--", lw=0.8, label="arm threshold")
    ax0.set_ylabel("gap [mm]")
    ax0.legend(loc="upper right", fontsize=8)
    ax0.set_title(f"approach trajectory (exp {result.experiment_id})")
    ax1.plot(t, vx, lw=1.2, color="tab:green")
    ax1.set_ylabel("closing speed [mm/s]")
    ax1.set_xlabel("time [s]")
    if result.contact_time_ms is not None:
        for ax in (ax0, ax1):
            ax.axvline(result.contact_time_ms / 1000.0, color="k", ls=":", lw=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_timeline(path: str, result: ScenarioResult) -> str:
    rows = result.telemetry
    t = [r["t_ms"] / 1000.0 for r in rows]
    lanes = [
        ("pair A", STATUS_PAIR_A),
        ("pair B", STATUS_PAIR_B),
        ("wrist locked", STATUS_WRIST),
        ("auto", STATUS_AUTO),
        ("logging", STATUS_EXPERIMENT),
    ]
    fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True, figsize=(8, 5),
                                   gridspec_kw={"height_ratios": [2, 3]})
    tof_t = [r["t_ms"] / 1000.0 for r in rows if r["tof_valid"]]
    tof_v = [r["tof_mm"] for r in rows if r["tof_valid"]]
    ax0.plot(tof_t, tof_v, ".", ms=2, color="tab:blue", label="tof (valid)")
    ax0.axhspan(TOF_MIN_MM, TOF_MAX_MM, color="tab:blue", alpha=0.06)
    ax0.set_ylabel("range [mm]")
    ax0.legend(loc="upper right", fontsize=8)
    ax0.set_title("status timeline")
    for i, (label, bit) in enumerate(lanes):
        level = [i + 0.8 * ((r["status"] & bit) != 0) for r in rows]
        ax1.step(t, level, where="post", lw=1.0)
    ax1.set_yticks([i + 0.4 for i in range(len(lanes))])
    ax1.set_yticklabels([name for name, _ in lanes], fontsize=8)
    ax1.set_xlabel("time [s]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_success_rates(path: str, campaign: CampaignResult) -> str:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    centers, rates, err_lo, err_hi, labels = [], [], [], [], []
    for b in campaign.bins:
        if b.trials == 0:
            continue
        lo, hi = b.interval()
        centers.append((b.lo + b.hi) / 2.0)
        rates.append(b.rate)
        # rounding can put the interval a hair inside the point estimate
        err_lo.append(max(0.0, b.rate - lo))
        err_hi.append(max(0.0, hi - b.rate))
        labels.append(f"{b.lo:.0f}-{b.hi:.0f}\n(n={b.trials})")
    ax.bar(range(len(rates)), rates, width=0.6, color="tab:green", alpha=0.7)
    ax.errorbar(range(len(rates)), rates, yerr=[err_lo, err_hi],
                fmt="none", ecolor="k", capsize=4, lw=1.2)
    ax.set_xticks(range(len(rates)))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_xlabel("contact speed bin [mm/s]")
    ax.set_ylabel("perch success rate")
    ax.set_title(f"success by contact speed, {len(campaign.trials)} trials "
                 f"(Wilson 95%)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_pull_forces(path: str, samples: List[PullTestSample],
                     band: Optional[tuple] = None) -> str:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    xs = [s.cycle for s in samples]
    ys = [s.measured_n for s in samples]
    ax.plot(xs, ys, "o", ms=4, color="tab:blue", label="measured")
    if samples:
        mean = sum(ys) / len(ys)
        ax.axhline(mean, color="tab:red", lw=1.0, label=f"mean {mean:.2f} N")
    if band:
        ax.axhspan(band[0], band[1], color="tab:green", alpha=0.12,
                   label=f"expected {band[0]:.1f}-{band[1]:.1f} N")
    ax.set_xlabel("cycle")
    ax.set_ylabel("failure load [N]")
    ax.set_title("pull-to-failure")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_bins_csv(path: str, campaign: CampaignResult) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lo_mm_s", "bin_hi_mm_s", "trials", "successes",
                         "rate", "wilson_lo", "wilson_hi"])
        for b in campaign.bins:
            lo, hi = b.interval()
            writer.writerow([b.lo, b.hi, b.trials, b.successes,
                             f"{b.rate:.4f}", f"{lo:.4f}", f"{hi:.4f}"])
    return path


def write_pull_csv(path: str, samples: List[PullTestSample]) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cycle", "measured_n", "true_n", "wear_warning"])
        for s in samples:
            writer.writerow([s.cycle, f"{s.measured_n:.4f}", f"{s.true_n:.4f}",
                             int(s.wear_warning)])
    return path
