"""Report rendering: delimited check tables and matplotlib figures.

Given a run result, writes ``checks.csv`` plus task-appropriate figures
(residual chart, minimization trace, mass spectrum, refinement curve) into
a report directory, next to whatever JSON the driver emitted.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .driver import RunResult  # noqa: E402

FLOOR = 1e-17  # display floor for zero residuals on log axes


def write_checks_csv(result: RunResult, path: str):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "status", "residual", "tolerance", "note"])
        for c in result.checks:
            writer.writerow(
                [c["name"], c["status"], repr(c["residual"]), repr(c["tolerance"]), c["note"]]
            )


def residual_figure(result: RunResult, path: str):
    rows = [c for c in result.checks if c["status"] != "skipped" and c["tolerance"] > 0]
    if not rows:
        return
    names = [c["name"] for c in rows]
    margins = [max(c["residual"], FLOOR) / c["tolerance"] for c in rows]
    colors = ["tab:red" if c["status"] == "fail" else "tab:blue" for c in rows]
    fig, ax = plt.subplots(figsize=(8, 0.28 * len(rows) + 1.2))
    ax.barh(range(len(rows)), margins, color=colors)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(names, fontsize=6)
    ax.set_xscale("log")
    ax.axvline(1.0, color="k", lw=0.8, ls="--")
    ax.set_xlabel("residual / tolerance (1 = at tolerance)")
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def trace_figure(result: RunResult, path: str, csv_path: str):
    trace = result.results.get("trace")
    if not trace:
        return
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "action"])
        for i, v in enumerate(trace):
            writer.writerow([i, repr(v)])
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.semilogy(range(len(trace)), [max(v, FLOOR) for v in trace])
    ax.set_xlabel("iteration")
    ax.set_ylabel("action")
    ax.set_title(f"{result.results.get('kind', '')} minimization")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def spectrum_figure(result: RunResult, path: str):
    spectrum = result.results.get("mass_spectrum") or result.results.get("eigenvalues")
    if spectrum is None:
        return
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.stem(range(len(spectrum)), spectrum)
    ax.set_xlabel("mode")
    ax.set_ylabel("eigenvalue")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def refinement_figure(result: RunResult, path: str):
    errs = result.results.get("curvature_errors")
    if not errs:
        return
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.loglog([48, 96, 192][: len(errs)], errs, "o-")
    ax.set_xlabel("grid points")
    ax.set_ylabel("max relative curvature error")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report(result: RunResult, outdir: str):
    """Write the delimited table and any applicable figures."""
    os.makedirs(outdir, exist_ok=True)
    write_checks_csv(result, os.path.join(outdir, "checks.csv"))
    residual_figure(result, os.path.join(outdir, "residuals.png"))
    trace_figure(
        result,
        os.path.join(outdir, "trace.png"),
        os.path.join(outdir, "trace.csv"),
    )
    spectrum_figure(result, os.path.join(outdir, "spectrum.png"))
    refinement_figure(result, os.path.join(outdir, "refinement.png"))
