"""Rendering from synthetic sweep CSVs: series counts, schema enforcement."""

import json
import os

import pytest

from twopath_figures import (
    EmptyData,
    FigureSpec,
    HARNESS_COLUMNS,
    SchemaMismatch,
    load_rows,
    render,
)
from twopath_figures.cli import EXIT_IO, EXIT_OK, EXIT_SCHEMA, main


def _row(**kw):
    base = {
        "scheme": "TwoPathIRIC",
        "channel": "awgn",
        "modulation": "BPSK",
        "n_sources": "2",
        "snr_db": "0",
        "snr_sr_db": "0.0",
        "snr_rd_db": "0.0",
        "L": "16",
        "frames": "100",
        "source": "sim",
        "throughput_per_ts": "1.0",
        "throughput_per_source_ts": "0.5",
        "sep_sr": "0.01",
        "sep_rd": "0.02",
        "sep_e2e": "0.03",
        "ci_halfwidth": "0.004",
        "seed": "1",
    }
    base.update({k: str(v) for k, v in kw.items()})
    return base


def _write_csv(path, rows, header=None):
    header = header or HARNESS_COLUMNS
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(r[c] for c in HARNESS_COLUMNS) + "\n")


def _fig5_rows():
    rows = []
    for scheme, tp in (("TwoPathIRIC", 1.8), ("BaselineCFNC", 0.9)):
        for source in ("sim", "theory"):
            for snr in (0, 10, 20):
                rows.append(
                    _row(scheme=scheme, source=source, snr_db=snr,
                         throughput_per_ts=tp, throughput_per_source_ts=tp / 2)
                )
    return rows


def test_fig5_like_render_has_four_series(tmp_path):
    p = tmp_path / "fig5.csv"
    _write_csv(p, _fig5_rows())
    spec = FigureSpec(csv_paths=(str(p),), out="fig5.png")
    result = render(spec, str(tmp_path))
    assert len(result.series) == 4
    assert os.path.exists(result.image_path)
    assert result.yscale == "linear"
    styles = {s.key: s.style for s in result.series}
    assert styles[("TwoPathIRIC", "theory")] == "dashed"
    assert styles[("TwoPathIRIC", "sim")] == "solid"
    for s in result.series:
        assert s.x == tuple(sorted(s.x))


def test_fig8_like_render_has_three_series(tmp_path):
    # the three relay-placement settings are keyed by the per-hop SNR offsets,
    # which the renderer derives from the absolute link-SNR columns
    rows = []
    for off_sr, off_rd in ((10.0, 0.0), (0.0, 10.0), (0.0, 0.0)):
        for snr in (0, 10, 20):
            rows.append(
                _row(channel="rayleigh", snr_db=snr,
                     snr_sr_db=snr + off_sr, snr_rd_db=snr + off_rd)
            )
    p = tmp_path / "fig8.csv"
    _write_csv(p, rows)
    spec = FigureSpec(csv_paths=(str(p),), group_by=("offset_sr_db", "offset_rd_db"),
                      out="fig8.png")
    result = render(spec, str(tmp_path))
    assert len(result.series) == 3
    assert {s.key for s in result.series} == {(10.0, 0.0), (0.0, 10.0), (0.0, 0.0)}


def test_sep_axis_defaults_to_log(tmp_path):
    p = tmp_path / "sep.csv"
    _write_csv(p, _fig5_rows())
    spec = FigureSpec(csv_paths=(str(p),), y="sep_e2e", out="sep.png")
    result = render(spec, str(tmp_path))
    assert result.yscale == "log"


def test_render_is_pure_function_of_csv(tmp_path):
    p = tmp_path / "fig5.csv"
    _write_csv(p, _fig5_rows())
    spec = FigureSpec(csv_paths=(str(p),), out="a.png")
    r1 = render(spec, str(tmp_path))
    r2 = render(FigureSpec(csv_paths=(str(p),), out="b.png"), str(tmp_path))
    assert r1.series == r2.series


def test_column_shuffled_csv_is_rejected(tmp_path):
    shuffled = list(HARNESS_COLUMNS)
    shuffled[0], shuffled[4] = shuffled[4], shuffled[0]
    p = tmp_path / "bad.csv"
    with open(p, "w") as fh:
        fh.write(",".join(shuffled) + "\n")
        fh.write(",".join(["x"] * len(shuffled)) + "\n")
    with pytest.raises(SchemaMismatch):
        load_rows(str(p))


def test_missing_column_listed(tmp_path):
    header = [c for c in HARNESS_COLUMNS if c != "sep_rd"]
    p = tmp_path / "short.csv"
    with open(p, "w") as fh:
        fh.write(",".join(header) + "\n")
    with pytest.raises(SchemaMismatch) as exc:
        load_rows(str(p))
    assert exc.value.missing == ["sep_rd"]


def test_spec_referencing_unknown_column(tmp_path):
    spec = FigureSpec(csv_paths=("whatever.csv",), y="not_a_column")
    with pytest.raises(SchemaMismatch) as exc:
        spec.validate_columns()
    assert "not_a_column" in exc.value.missing


def test_empty_csv_raises(tmp_path):
    p = tmp_path / "empty.csv"
    _write_csv(p, [])
    with pytest.raises(EmptyData):
        render(FigureSpec(csv_paths=(str(p),)), str(tmp_path))


def test_cli_roundtrip_and_exit_codes(tmp_path):
    p = tmp_path / "fig5.csv"
    _write_csv(p, _fig5_rows())
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(
        json.dumps({"csv": [str(p)], "out": "fig5.png", "title": "throughput"})
    )
    assert main(["--spec", str(spec_path), "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "fig5.png").exists()

    shuffled = list(HARNESS_COLUMNS)
    shuffled[1], shuffled[2] = shuffled[2], shuffled[1]
    bad = tmp_path / "bad.csv"
    with open(bad, "w") as fh:
        fh.write(",".join(shuffled) + "\n")
        fh.write(",".join(["0"] * len(shuffled)) + "\n")
    bad_spec = tmp_path / "bad_spec.json"
    bad_spec.write_text(json.dumps({"csv": [str(bad)], "out": "bad.png"}))
    assert main(["--spec", str(bad_spec), "--out", str(tmp_path)]) == EXIT_SCHEMA

    gone_spec = tmp_path / "gone.json"
    gone_spec.write_text(json.dumps({"csv": [str(tmp_path / "gone.csv")], "out": "g.png"}))
    assert main(["--spec", str(gone_spec), "--out", str(tmp_path)]) == EXIT_IO

    empty = tmp_path / "empty.csv"
    _write_csv(empty, [])
    empty_spec = tmp_path / "empty_spec.json"
    empty_spec.write_text(json.dumps({"csv": [str(empty)], "out": "e.png"}))
    assert main(["--spec", str(empty_spec), "--out", str(tmp_path)]) == EXIT_SCHEMA
