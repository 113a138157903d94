#!/usr/bin/env python3
"""Render the extinction-time comparison figure and table.

Consumes the artifacts of ``extl compare`` (a CSV with columns
``t,F_vi,F_markov`` and its JSON summary) and produces a two-curve figure
plus a two-row text table on stdout.  Pure presentation: nothing is
recomputed here.

Usage:
    render_compare.py --csv cmp.csv --summary cmp.json --out fig.png

The output format (PNG or SVG) follows the ``--out`` extension.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = ("t", "F_vi", "F_markov")
SUMMARY_KEYS = ("r_eff", "rho", "mean_vi", "mean_markov")

VI_LABEL = "varying infectivity"
MARKOV_LABEL = "constant-rate benchmark"


class ArtifactError(ValueError):
    """Comparison artifact is missing, malformed, or empty."""


@dataclass(frozen=True)
class CompareArtifact:
    t: list[float]
    f_vi: list[float]
    f_markov: list[float]
    summary: dict


def load_artifact(csv_path: str, summary_path: str) -> CompareArtifact:
    try:
        with open(csv_path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise ArtifactError(f"{csv_path}: missing column(s) {missing}")
            rows = [(float(r["t"]), float(r["F_vi"]), float(r["F_markov"])) for r in reader]
    except OSError as exc:
        raise ArtifactError(f"{csv_path}: {exc}") from exc
    except ValueError as exc:
        raise ArtifactError(f"{csv_path}: non-numeric cell ({exc})") from exc
    if not rows:
        raise ArtifactError(f"{csv_path}: no data rows")
    t = [r[0] for r in rows]
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ArtifactError(f"{csv_path}: t must be strictly increasing")

    try:
        with open(summary_path, encoding="utf-8") as fh:
            summary = json.load(fh)
    except OSError as exc:
        raise ArtifactError(f"{summary_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{summary_path}: line {exc.lineno}: {exc.msg}") from exc
    missing = [k for k in SUMMARY_KEYS if k not in summary]
    if missing:
        raise ArtifactError(f"{summary_path}: missing key(s) {missing}")
    return CompareArtifact(
        t=t, f_vi=[r[1] for r in rows], f_markov=[r[2] for r in rows], summary=summary
    )


def format_table(summary: dict) -> str:
    rows = [
        (VI_LABEL, summary["mean_vi"]),
        (MARKOV_LABEL, summary["mean_markov"]),
    ]
    width = max(len(name) for name, _ in rows)
    header = (
        f"{'model':<{width}}  {'R_eff':>7}  {'rho':>10}  mean extinction [days]"
    )
    lines = [header, "-" * len(header)]
    for name, mean in rows:
        lines.append(
            f"{name:<{width}}  {summary['r_eff']:>7.4g}  {summary['rho']:>10.5g}  "
            f"{mean:.4f}"
        )
    return "\n".join(lines)


def render(artifact: CompareArtifact, out_path: str) -> None:
    s = artifact.summary
    fig, ax = plt.subplots(figsize=(7.5, 5.0))
    ax.plot(artifact.t, artifact.f_vi, label=VI_LABEL, color="tab:blue")
    ax.plot(artifact.t, artifact.f_markov, label=MARKOV_LABEL, color="tab:red",
            linestyle="--")
    ax.set_xlabel("days since the start of the decline")
    ax.set_ylabel("P(epidemic extinct by t)")
    ax.set_ylim(0.0, 1.02)
    ax.legend(loc="lower right")
    ax.grid(alpha=0.3)
    ax.set_title(
        f"Extinction time at matched R_eff = {s['r_eff']:.4g}, rho = {s['rho']:.4g}\n"
        f"mean: {s['mean_vi']:.4f} d ({VI_LABEL}) vs {s['mean_markov']:.4f} d "
        f"({MARKOV_LABEL})"
    )
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--csv", required=True, help="comparison CSV (t,F_vi,F_markov)")
    parser.add_argument("--summary", required=True, help="comparison summary JSON")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    args = parser.parse_args(argv)
    try:
        artifact = load_artifact(args.csv, args.summary)
        render(artifact, args.out)
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(format_table(artifact.summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
