"""Files written by a figure run.

A run of figure ``figX`` produces, inside ``<out>/figX/``::

    <key>.csv          one per histogram or curve
    summary.csv        name,value,stderr,n
    plot_figX.py       matplotlib script reading the CSVs above
    manifest.json      config echo, output list, wall time and version

Numbers are written with ``repr`` (shortest round-trip form), so equal
results give byte-identical files. Empty curve bins leave the mean,
second-moment and variance fields blank. The two run-dependent manifest
entries live in a separate ``"volatile"`` object at the end of the file.
"""

import csv
import io
import json
import math
import os
import shutil
import tempfile
from pathlib import Path

HISTOGRAM_HEADER = ("bin_lo", "bin_hi", "count", "density")
CURVE_HEADER = ("bin_center", "count", "mean", "second_moment", "variance")
SUMMARY_HEADER = ("name", "value", "stderr", "n")
MANIFEST = "manifest.json"
SUMMARY = "summary.csv"


class MissingOutput(FileNotFoundError):
    """A CSV referenced by a manifest or plot request does not exist."""

    def __init__(self, path):
        super().__init__(f"missing CSV: {path}")
        self.path = path


def _num(x):
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def histogram_csv(hist):
    edges = hist.axis.edges
    rows = [
        (_num(edges[i]), _num(edges[i + 1]), int(hist.counts[i]), _num(d))
        for i, d in enumerate(hist.density)
    ]
    return _csv_text(HISTOGRAM_HEADER, rows)


def curve_csv(curve):
    mean, m2, var = curve.mean, curve.second_moment, curve.variance
    rows = [
        (_num(c), int(curve.count[i]), _num(mean[i]), _num(m2[i]), _num(var[i]))
        for i, c in enumerate(curve.bin_centers)
    ]
    return _csv_text(CURVE_HEADER, rows)


def summary_csv(scalars):
    rows = [(name, _num(s.value), _num(s.stderr), int(s.n)) for name, s in scalars.items()]
    return _csv_text(SUMMARY_HEADER, rows)


def read_csv(path):
    """Rows of a CSV as dicts of strings (blank fields stay ``""``)."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def read_summary(path):
    out = {}
    for row in read_csv(path):
        out[row["name"]] = float(row["value"]) if row["value"] else math.nan
    return out


# -- plot script -------------------------------------------------------------

_PLOT_TEMPLATE = '''\
"""Plot {figure} from the CSV files next to this script.

Usage: python {script}  (writes {figure}.png)
"""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))

# (csv file, kind, label, [(column, panel title, xlabel, ylabel), ...])
SERIES = {series}


def load(name, kind, column):
    xs, ys = [], []
    with open(os.path.join(HERE, name), newline="") as fh:
        for row in csv.DictReader(fh):
            if row[column] == "":
                continue  # empty bin: no estimate, nothing to draw
            if kind == "histogram":
                x = 0.5 * (float(row["bin_lo"]) + float(row["bin_hi"]))
            else:
                x = float(row["bin_center"])
            xs.append(x)
            ys.append(float(row[column]))
    return xs, ys


def main():
    panels = []
    for _, _, _, spec in SERIES:
        for column, title, xlabel, ylabel in spec:
            if (title, ylabel) not in [(p[0], p[2]) for p in panels]:
                panels.append((title, xlabel, ylabel))
    fig, axes = plt.subplots(1, len(panels), figsize=(5 * len(panels), 4), squeeze=False)
    index = {{(p[0], p[2]): ax for p, ax in zip(panels, axes[0])}}
    for (title, xlabel, ylabel), ax in zip(panels, axes[0]):
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
    for name, kind, label, spec in SERIES:
        for column, title, _, ylabel in spec:
            xs, ys = load(name, kind, column)
            ax = index[(title, ylabel)]
            if kind == "histogram":
                ax.step(xs, ys, where="mid", label=label)
            else:
                ax.plot(xs, ys, marker=".", label=label)
    for ax in axes[0]:
        ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "{figure}.png"), dpi=150)


if __name__ == "__main__":
    main()
'''


def plot_script(figure, entries):
    """Source of a standalone matplotlib script for ``figure``.

    ``entries`` are manifest output records with ``file``, ``kind``,
    ``label`` and ``panels``. Only file names are embedded, never data.
    """
    series = [
        (e["file"], e["kind"], e["label"], [tuple(p) for p in e["panels"]])
        for e in entries
        if e["kind"] in ("histogram", "curve")
    ]
    body = "[\n" + "".join(f"    {s!r},\n" for s in series) + "]"
    return _PLOT_TEMPLATE.format(figure=figure, script=f"plot_{figure}.py", series=body)


def emit_plot_script(directory, figure=None):
    """Write ``plot_<figure>.py`` into a finished run directory.

    Raises :class:`MissingOutput` naming the first CSV that is absent.
    """
    directory = Path(directory)
    manifest = load_manifest(directory)
    figure = figure or manifest["figure"]
    entries = manifest["outputs"]
    for e in entries:
        path = directory / e["file"]
        if not path.is_file():
            raise MissingOutput(str(path))
    target = directory / f"plot_{figure}.py"
    target.write_text(plot_script(figure, entries))
    return target


# -- run directory -----------------------------------------------------------


def manifest_text(result, shards, wall_time, version):
    cfg = result.config
    outputs = []
    for key in sorted(result.histograms):
        s = result.series.get(key)
        outputs.append(_entry(key, "histogram", s))
    for key in sorted(result.curves):
        s = result.series.get(key)
        outputs.append(_entry(key, "curve", s))
    outputs.append({"file": SUMMARY, "kind": "summary", "label": "", "panels": []})
    doc = {
        "figure": result.figure,
        "config": cfg.as_dict(),
        "seed": cfg.seed,
        "shards": shards,
        "outputs": outputs,
        "plot_script": f"plot_{result.figure}.py",
        "volatile": {"wall_time_s": round(wall_time, 3), "version": version},
    }
    return json.dumps(doc, indent=2) + "\n"


def _entry(key, kind, series):
    if series is None:
        return {"file": f"{key}.csv", "kind": kind, "label": key, "panels": []}
    return {
        "file": f"{key}.csv",
        "kind": kind,
        "label": series.label,
        "panels": [list(p) for p in series.panels],
    }


def load_manifest(directory):
    path = Path(directory) / MANIFEST
    if not path.is_file():
        raise MissingOutput(str(path))
    return json.loads(path.read_text())


def write_run(result, out_dir, shards, wall_time, version):
    """Write every output of ``result`` to ``<out_dir>/<figure>`` atomically.

    Files go to a temporary sibling directory first, which replaces the
    target only once everything (plot script included) is written.
    Returns the final directory.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    final = out_dir / result.figure
    tmp = Path(tempfile.mkdtemp(prefix=f".{result.figure}.", dir=out_dir))
    try:
        tmp.chmod(0o755)
        for key, hist in result.histograms.items():
            (tmp / f"{key}.csv").write_text(histogram_csv(hist))
        for key, curve in result.curves.items():
            (tmp / f"{key}.csv").write_text(curve_csv(curve))
        (tmp / SUMMARY).write_text(summary_csv(result.scalars))
        (tmp / MANIFEST).write_text(manifest_text(result, shards, wall_time, version))
        emit_plot_script(tmp, result.figure)
        if final.exists():
            shutil.rmtree(final)
        os.replace(tmp, final)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return final
