"""CSV and JSON data files with provenance headers.

CSV files start with ``# key: value`` comment lines, followed by one header
row and the data rows.  Floats are written with ``repr`` so files round-trip
exactly and are byte-identical between runs.
"""

import csv
import io
import json
from importlib.metadata import PackageNotFoundError, version

CURVE_COLUMNS = ["x", "mean", "std_error", "trials", "N1"]
ANALYTIC_COLUMNS = ["p", "e0", "extrapolated"]
TRANSFORM_COLUMNS = ["p", "eqc_original", "eqc_transformed", "diff", "diff_stderr"]
THETA_COLUMNS = ["p", "theta_p", "theta_std_error", "eqc", "eqc_std_error"]


def code_version():
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(meta, columns, rows):
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def render_json(meta, columns, rows):
    doc = {"meta": meta, "columns": columns, "rows": [{c: row[c] for c in columns} for row in rows]}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def render(fmt, meta, columns, rows):
    if fmt == "json":
        return render_json(meta, columns, rows)
    return render_csv(meta, columns, rows)


def read_table(path):
    """Rows of a CSV or JSON data file as dicts of strings or numbers, plus its metadata."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return doc.get("meta", {}), doc["rows"]
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    if not body:
        raise ValueError(f"{path}: no header row")
    return meta, list(csv.DictReader(body))


def column(rows, name, cast=float):
    try:
        return [cast(r[name]) for r in rows]
    except KeyError:
        raise ValueError(f"missing column {name!r}") from None
