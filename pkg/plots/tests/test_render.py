from fractions import Fraction
from pathlib import Path

import matplotlib.pyplot as plt
import pytest

from plots import PlotError, PlotSpec, SchemaError, build_figure, render
from plots.cli import main

SAMPLE = Path(__file__).resolve().parents[1] / "sample"
RESULTS = str(SAMPLE / "results.csv")
SUMMARIES = [str(SAMPLE / f"summary-n{n}.json") for n in (16, 64, 256)]

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_series_cli_renders_png(tmp_path):
    out = tmp_path / "tail.png"
    rc = main(["render", "--kind", "series", "--in", RESULTS,
               "--out", str(out)])
    assert rc == 0
    assert out.read_bytes()[:8] == PNG_MAGIC


def test_series_has_one_line_per_trial():
    fig = build_figure(PlotSpec(inputs=(RESULTS,), kind="series",
                                out="unused.png"))
    try:
        trials = {int(r.split(",")[0]) for r in
                  Path(RESULTS).read_text().splitlines()[1:]}
        assert len(fig.axes[0].lines) == len(trials) == 3
    finally:
        plt.close(fig)


def test_rerender_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    for out in (a, b):
        assert main(["render", "--kind", "series", "--metric", "backlog",
                     "--in", RESULTS, "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_scatter_is_log_x_with_all_points(tmp_path):
    spec = PlotSpec(inputs=tuple(SUMMARIES), kind="scatter-vs-n",
                    out=str(tmp_path / "tails.png"))
    fig = build_figure(spec)
    try:
        ax = fig.axes[0]
        assert ax.get_xscale() == "log"
        xs = sorted(x for x, _ in ax.collections[0].get_offsets())
        assert xs == [16, 64, 256]
    finally:
        plt.close(fig)
    assert main(["render", "--kind", "scatter-vs-n", "--in", *SUMMARIES,
                 "--out", str(tmp_path / "tails.png")]) == 0


def test_per_phase_bars_mean_over_trials():
    rows = [r.split(",") for r in
            Path(RESULTS).read_text().splitlines()[1:]]
    wasted = [(int(r[1]), Fraction(int(r[3]), int(r[4])))
              for r in rows if r[2] == "wasted_steps"]
    first_end = min(s for s, _ in wasted)
    first_vals = [v for s, v in wasted if s == first_end]
    fig = build_figure(PlotSpec(inputs=(RESULTS,), kind="per-phase-bars",
                                out="unused.png"))
    try:
        bars = fig.axes[0].patches
        assert len(bars) == len({s for s, _ in wasted}) == 9
        expected = float(sum(first_vals) / len(first_vals))
        assert bars[0].get_height() == pytest.approx(expected)
    finally:
        plt.close(fig)


def test_missing_column_is_named(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("trial,step,metric,value_num\n0,1,backlog,2\n")
    rc = main(["render", "--kind", "series", "--in", str(bad),
               "--out", str(tmp_path / "x.png")])
    assert rc == 2
    assert "value_den" in capsys.readouterr().err


def test_absent_metric_is_named(tmp_path, capsys):
    csv = tmp_path / "r.csv"
    csv.write_text("trial,step,metric,value_num,value_den\n"
                   "0,1,backlog,2,1\n")
    rc = main(["render", "--kind", "series", "--metric", "tail_size",
               "--in", str(csv), "--out", str(tmp_path / "x.png")])
    assert rc == 2
    err = capsys.readouterr().err
    assert "tail_size" in err and "backlog" in err


def test_empty_input_rejected(tmp_path, capsys):
    csv = tmp_path / "empty.csv"
    csv.write_text("trial,step,metric,value_num,value_den\n")
    rc = main(["render", "--kind", "series", "--in", str(csv),
               "--out", str(tmp_path / "x.png")])
    assert rc == 2
    assert "no data rows" in capsys.readouterr().err


def test_summary_missing_aggregate_is_named(tmp_path, capsys):
    doc = tmp_path / "summary.json"
    doc.write_text('{"key": {"n": 4}, "aggregates": {}}')
    rc = main(["render", "--kind", "scatter-vs-n", "--in", str(doc),
               "--out", str(tmp_path / "x.png")])
    assert rc == 2
    assert "max_tail" in capsys.readouterr().err


def test_spec_validation():
    with pytest.raises(PlotError, match="unknown kind"):
        PlotSpec(inputs=(RESULTS,), kind="pie", out="x.png")
    with pytest.raises(PlotError, match="exactly one"):
        PlotSpec(inputs=(RESULTS, RESULTS), kind="series", out="x.png")
    with pytest.raises(PlotError, match=".png"):
        PlotSpec(inputs=(RESULTS,), kind="series", out="fig.svg")
    with pytest.raises(PlotError, match="no input"):
        PlotSpec(inputs=(), kind="series", out="x.png")


def test_malformed_row_is_schema_error(tmp_path):
    csv = tmp_path / "r.csv"
    csv.write_text("trial,step,metric,value_num,value_den\n"
                   "0,1,backlog,two,1\n")
    with pytest.raises(SchemaError, match="row 2"):
        render(PlotSpec(inputs=(str(csv),), kind="series", metric="backlog",
                        out=str(tmp_path / "x.png")))


def test_render_creates_output_directory(tmp_path):
    out = tmp_path / "nested" / "dir" / "fig.png"
    render(PlotSpec(inputs=(RESULTS,), kind="per-phase-bars", out=str(out)))
    assert out.read_bytes()[:8] == PNG_MAGIC
