"""CSV-to-figure rendering.

A FigureSpec names one or more sweep CSVs, the grouping keys that define the
series, and the axes. Theory series are drawn dashed, simulated series solid
with confidence-interval error bars; error-probability axes default to a log
scale. The returned series data is a pure function of the CSV contents.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

# The sweep file contract, in exact column order. Kept as a literal copy so
# this package never imports the simulator.
HARNESS_COLUMNS = [
    "scheme",
    "channel",
    "modulation",
    "n_sources",
    "snr_db",
    "snr_sr_db",
    "snr_rd_db",
    "L",
    "frames",
    "source",
    "throughput_per_ts",
    "throughput_per_source_ts",
    "sep_sr",
    "sep_rd",
    "sep_e2e",
    "ci_halfwidth",
    "seed",
]

_LOG_SCALE_COLUMNS = {"sep_sr", "sep_rd", "sep_e2e"}

# grouping keys computed from schema columns: the per-hop SNR offsets that
# identify relay-placement settings (constant per series while the absolute
# link SNRs track the swept x axis)
DERIVED_COLUMNS = {
    "offset_sr_db": lambda r: float(r["snr_sr_db"]) - float(r["snr_db"]),
    "offset_rd_db": lambda r: float(r["snr_rd_db"]) - float(r["snr_db"]),
}


def _cell(row: dict, col: str):
    if col in DERIVED_COLUMNS:
        return DERIVED_COLUMNS[col](row)
    return row[col]


class RenderError(Exception):
    """Base class for rendering failures."""


class SchemaMismatch(RenderError):
    """CSV header or referenced columns deviate from the harness schema."""

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = list(missing)


class EmptyData(RenderError):
    """CSV carries no data rows to plot."""


@dataclass(frozen=True)
class FigureSpec:
    """What to plot and how."""

    csv_paths: tuple
    group_by: tuple = ("scheme", "source")
    x: str = "snr_db"
    y: str = "throughput_per_ts"
    yscale: str | None = None  # default inferred from the y column
    title: str = ""
    xlabel: str = "SNR (dB)"
    ylabel: str | None = None
    out: str = "figure.png"

    @classmethod
    def from_json(cls, path: str) -> "FigureSpec":
        with open(path) as fh:
            raw = json.load(fh)
        csv_paths = raw.get("csv") or raw.get("csv_paths")
        if not csv_paths:
            raise SchemaMismatch("spec must list at least one csv path")
        return cls(
            csv_paths=tuple(csv_paths),
            group_by=tuple(raw.get("group_by", ("scheme", "source"))),
            x=raw.get("x", "snr_db"),
            y=raw.get("y", "throughput_per_ts"),
            yscale=raw.get("yscale"),
            title=raw.get("title", ""),
            xlabel=raw.get("xlabel", "SNR (dB)"),
            ylabel=raw.get("ylabel"),
            out=raw.get("out", "figure.png"),
        )

    def validate_columns(self) -> None:
        wanted = [self.x, self.y, *self.group_by]
        known = set(HARNESS_COLUMNS) | set(DERIVED_COLUMNS)
        missing = [c for c in wanted if c not in known]
        if missing:
            raise SchemaMismatch(
                f"spec references columns outside the harness schema: {missing}", missing
            )


@dataclass(frozen=True)
class Series:
    key: tuple
    x: tuple
    y: tuple
    yerr: tuple | None
    style: str  # "solid" or "dashed"


@dataclass(frozen=True)
class RenderResult:
    series: tuple
    image_path: str
    yscale: str


def load_rows(path: str) -> list[dict]:
    """Read one sweep CSV, enforcing the exact header contract."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path}: file is empty, expected the harness header") from None
        if header != HARNESS_COLUMNS:
            missing = [c for c in HARNESS_COLUMNS if c not in header]
            extra = [c for c in header if c not in HARNESS_COLUMNS]
            detail = []
            if missing:
                detail.append(f"missing {missing}")
            if extra:
                detail.append(f"unexpected {extra}")
            if not detail:
                detail.append("columns out of order")
            raise SchemaMismatch(f"{path}: header mismatch ({'; '.join(detail)})", missing)
        rows = [dict(zip(HARNESS_COLUMNS, line)) for line in reader if line]
    return rows


def _error_bars(spec: FigureSpec, rows: list[dict]) -> tuple | None:
    # the ci_halfwidth column is the per-source throughput halfwidth; scale it
    # to the plotted column where that makes sense, otherwise draw no bars
    if spec.y == "throughput_per_source_ts":
        return tuple(float(r["ci_halfwidth"]) for r in rows)
    if spec.y == "throughput_per_ts":
        return tuple(float(r["ci_halfwidth"]) * float(r["n_sources"]) for r in rows)
    return None


def render(spec: FigureSpec, out_dir: str = ".") -> RenderResult:
    """Render one figure; returns the plotted series for inspection."""
    spec.validate_columns()
    rows: list[dict] = []
    for path in spec.csv_paths:
        rows.extend(load_rows(path))
    if not rows:
        raise EmptyData(f"no data rows in {', '.join(spec.csv_paths)}")

    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = tuple(_cell(row, k) for k in spec.group_by)
        groups.setdefault(key, []).append(row)

    yscale = spec.yscale or ("log" if spec.y in _LOG_SCALE_COLUMNS else "linear")
    series = []
    for key in sorted(groups):
        grp = sorted(groups[key], key=lambda r: float(r[spec.x]))
        xs = tuple(float(r[spec.x]) for r in grp)
        ys = tuple(float(r[spec.y]) for r in grp)
        yerr = _error_bars(spec, grp)
        dashed = any(v == "theory" for v in key) or all(r["source"] == "theory" for r in grp)
        series.append(Series(key=key, x=xs, y=ys, yerr=yerr, style="dashed" if dashed else "solid"))

    os.makedirs(out_dir, exist_ok=True)
    image_path = os.path.join(out_dir, spec.out)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for s in series:
        label = " / ".join(str(k) for k in s.key)
        ls = "--" if s.style == "dashed" else "-"
        if s.yerr is not None and s.style == "solid":
            ax.errorbar(s.x, s.y, yerr=s.yerr, linestyle=ls, marker="o",
                        markersize=3, capsize=2, label=label)
        else:
            ax.plot(s.x, s.y, linestyle=ls, marker="s" if s.style == "dashed" else "o",
                    markersize=3, label=label)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel or spec.y.replace("_", " "))
    ax.set_yscale(yscale)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3, linestyle=":")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(image_path, dpi=150)
    plt.close(fig)
    return RenderResult(series=tuple(series), image_path=image_path, yscale=yscale)
