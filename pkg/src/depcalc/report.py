"""CSV tables and PNG figures summarizing corpus runs.

Three tables: round-trip verdicts per algebra, the distribution of principal
protection levels over small types, and noninterference fuzz outcomes.  Each
table gets a bar chart next to it.
"""

from __future__ import annotations

import csv
from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .algebra import DIAMOND, L2  # noqa: E402
from .generators import generate_corpus  # noqa: E402
from .observer import fuzz_ni_dcce, fuzz_ni_lcirc  # noqa: E402
from .oracle import enumerate_types  # noqa: E402
from .rewrite import Verdict, decide_equal  # noqa: E402
from .translate import overline, underline  # noqa: E402
from .typecheck_dcce import principal_level  # noqa: E402

ALGEBRAS = (L2, DIAMOND)


def roundtrip_rows(n: int, seed: int) -> list[dict]:
    rows = []
    for alg in ALGEBRAS:
        counts = Counter()
        for ctx, t, _, _ in generate_corpus(alg, "gmcc", n, seed):
            back = underline(alg, overline(alg, t, ctx), ctx)
            counts[decide_equal(alg, t, back, "gmcc", ctx).verdict.value] += 1
        for v in Verdict:
            rows.append({"algebra": alg.name, "verdict": v.value, "count": counts[v.value]})
    return rows


def protection_rows(max_depth: int = 3) -> list[dict]:
    rows = []
    for alg in ALGEBRAS:
        counts = Counter(principal_level(alg, ty) for ty in enumerate_types(alg, max_depth))
        for level in alg.elements:
            rows.append({"algebra": alg.name, "principal_level": level, "types": counts[level]})
    return rows


def ni_rows(trials: int, seed: int) -> list[dict]:
    reports = [fuzz_ni_dcce(alg, trials, seed) for alg in ALGEBRAS]
    reports.append(fuzz_ni_lcirc(trials, seed))
    return [{"mode": r.mode, "algebra": r.algebra, "trials": r.trials,
             "failures": len(r.failures), "observer_disagreements": r.observer_disagreements,
             "inadequate": r.inadequate} for r in reports]


def _write_csv(path: Path, rows: list[dict]) -> Path:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    return path


def _grouped_bars(path: Path, rows, group: str, label: str, value: str, title: str) -> Path:
    groups = list(dict.fromkeys(r[group] for r in rows))
    fig, axes = plt.subplots(1, len(groups), figsize=(5 * len(groups), 3.5), squeeze=False)
    for ax, g in zip(axes[0], groups):
        sub = [r for r in rows if r[group] == g]
        ax.bar([str(r[label]) for r in sub], [r[value] for r in sub], color="#4c72b0")
        ax.set_title(f"{title}: {g}")
        ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def write_report(out_dir: Path, trials: int = 200, seed: int = 0) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    rt = roundtrip_rows(trials, seed)
    files.append(_write_csv(out_dir / "roundtrip.csv", rt))
    files.append(_grouped_bars(out_dir / "roundtrip.png", rt, "algebra", "verdict", "count",
                               "round trip"))
    prot = protection_rows()
    files.append(_write_csv(out_dir / "protection.csv", prot))
    files.append(_grouped_bars(out_dir / "protection.png", prot, "algebra", "principal_level",
                               "types", "principal level"))
    nis = ni_rows(trials, seed)
    files.append(_write_csv(out_dir / "ni.csv", nis))
    files.append(_grouped_bars(out_dir / "ni.png", [dict(r, run="all") for r in nis], "run",
                               "algebra", "trials", "NI trials"))
    return files
