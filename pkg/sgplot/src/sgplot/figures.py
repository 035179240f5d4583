"""Figure builders: one function per figure id, each taking parsed CSV rows
and returning a matplotlib Figure.

Rendering is read-only over the CSVs and deterministic: styling comes from
the fixed tables below and PNG output carries no timestamps, so re-running
produces an identical byte stream.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

# one fixed style table so figure diffs stay reviewable
CYCLE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
MARKERS = ["o", "s", "^", "d", "v", "p"]


class ColumnError(ValueError):
    """A required CSV column is missing (the message names it)."""


def load_rows(path: str, required: tuple[str, ...]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise ColumnError(f"{path}: missing required column '{column}'")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def _series(rows, key_col, x_col, y_col):
    """Group rows by key_col, returning {key: (xs, ys)} in file order."""
    out: dict = {}
    for row in rows:
        key = row[key_col]
        xs, ys = out.setdefault(key, ([], []))
        xs.append(float(row[x_col]))
        ys.append(float(row[y_col]))
    return out


def _style(i):
    return {"color": CYCLE[i % len(CYCLE)], "marker": MARKERS[i % len(MARKERS)],
            "markersize": 3.5, "linewidth": 1.2}


def figure_survival(csv_paths: list[str]):
    """Vacuum survival probability, one curve per cutoff; markers are the
    evolution grid points."""
    rows = [r for p in csv_paths for r in load_rows(p, ("t", "survival_prob", "lambda"))]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i, (lam, (xs, ys)) in enumerate(_series(rows, "lambda", "t", "survival_prob").items()):
        ax.plot(xs, ys, label=f"Λ={lam}", **_style(i))
    ax.set_xlabel("t")
    ax.set_ylabel("survival probability")
    ax.set_ylim(-0.02, 1.05)
    ax.legend()
    fig.tight_layout()
    return fig


def figure_qite(csv_paths: list[str]):
    """Imaginary-time traces: energy (left) and ground-state fidelity
    (right), one curve per beta; markers are the QITE steps."""
    rows = [r for p in csv_paths
            for r in load_rows(p, ("tau", "energy", "fidelity", "beta"))]
    fig, (ax_e, ax_f) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    for i, (beta, (xs, ys)) in enumerate(_series(rows, "beta", "tau", "energy").items()):
        ax_e.plot(xs, ys, label=f"β={beta}", **_style(i))
    fid_rows = [r for r in rows if r["fidelity"] not in ("", None)]
    for i, (beta, (xs, ys)) in enumerate(_series(fid_rows, "beta", "tau", "fidelity").items()):
        ax_f.plot(xs, ys, label=f"β={beta}", **_style(i))
    ax_e.set_xlabel("τ")
    ax_e.set_ylabel("energy")
    ax_f.set_xlabel("τ")
    ax_f.set_ylabel("fidelity")
    ax_e.legend()
    if ax_f.get_lines():
        ax_f.legend()
    fig.tight_layout()
    return fig


def figure_correlator(csv_paths: list[str]):
    """|G_c(t)| per ground-state source; pass one CSV per source (or one CSV
    carrying several sources)."""
    rows = [r for p in csv_paths
            for r in load_rows(p, ("t", "re_gc", "im_gc", "abs_gc", "ground_source"))]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i, (src, (xs, ys)) in enumerate(_series(rows, "ground_source", "t", "abs_gc").items()):
        ax.plot(xs, ys, label=src.upper(), **_style(i))
    ax.set_xlabel("t")
    ax.set_ylabel("|G_c|")
    ax.legend()
    fig.tight_layout()
    return fig


def figure_kink(csv_paths: list[str]):
    """Kink profile: per-site mean field (top) and variance (bottom), one
    curve per beta."""
    rows = [r for p in csv_paths
            for r in load_rows(p, ("site", "mean_phi", "variance", "beta"))]
    fig, (ax_m, ax_v) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    for i, (beta, (xs, ys)) in enumerate(_series(rows, "beta", "site", "mean_phi").items()):
        ax_m.plot(xs, ys, label=f"β={beta}", **_style(i))
    for i, (beta, (xs, ys)) in enumerate(_series(rows, "beta", "site", "variance").items()):
        ax_v.plot(xs, ys, label=f"β={beta}", **_style(i))
    ax_m.set_ylabel("⟨φ⟩")
    ax_v.set_ylabel("variance")
    ax_v.set_xlabel("site")
    ax_m.legend()
    fig.tight_layout()
    return fig


FIGURES = {
    "survival": figure_survival,
    "qite": figure_qite,
    "correlator": figure_correlator,
    "kink": figure_kink,
}


def render(figure_id: str, csv_paths: list[str], out_path: str) -> Path:
    """Build the requested figure and write it; no file is written on error."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure id {figure_id!r} (choose from {sorted(FIGURES)})")
    fig = FIGURES[figure_id](csv_paths)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    # strip the writer's Software tag so re-renders are byte-identical
    fig.savefig(out, format="png", dpi=110, metadata={"Software": None})
    plt.close(fig)
    return out
