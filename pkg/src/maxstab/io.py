"""Dataset and coordinate CSV files.

Dataset layout::

    # scale=gumbel
    # <any further comment lines, e.g. a config echo>
    s1,s2,...
    0.123,-1.5,...

Coordinates layout: header ``site_id,x,y`` then one row per site.
"""
import csv
import io
from pathlib import Path

import numpy as np

from .data import ReplicateMatrix, Scale, SiteGrid
from .errors import DataError, DomainError


def fmt(x):
    """17 significant digits, enough to round-trip any double."""
    return format(float(x), ".17g")


def _comment_lines(comments):
    return "".join(f"# {c}\n" for c in comments)


def dumps_dataset(matrix, comments=()):
    buf = io.StringIO()
    buf.write(f"# scale={matrix.scale.value}\n")
    buf.write(_comment_lines(comments))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(matrix.site_ids)
    for row in matrix.values:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def save_dataset(matrix, path, comments=()):
    Path(path).write_text(dumps_dataset(matrix, comments))


def save_coords(grid, site_ids, path):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["site_id", "x", "y"])
    for sid, (x, y) in zip(site_ids, grid.coords):
        w.writerow([sid, fmt(x), fmt(y)])
    Path(path).write_text(buf.getvalue())


def _parse_float(cell, lineno):
    try:
        return float(cell)
    except ValueError:
        raise DataError(f"non-numeric cell {cell!r}", lineno) from None


def load_coords(path, site_ids=None):
    """Read a coordinates file, ordering sites like ``site_ids`` if given."""
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["site_id", "x", "y"]:
            raise DataError("coordinates header must be site_id,x,y", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DataError(f"expected 3 fields, got {len(row)}", lineno)
            sid = row[0].strip()
            if sid in rows:
                raise DataError(f"duplicate site id {sid!r}", lineno)
            rows[sid] = (_parse_float(row[1], lineno), _parse_float(row[2], lineno))
    if site_ids is None:
        site_ids = list(rows)
    missing = [s for s in site_ids if s not in rows]
    if missing:
        raise DataError(f"no coordinates for sites {missing[:5]}")
    try:
        return SiteGrid(np.array([rows[s] for s in site_ids], dtype=float))
    except DomainError as exc:
        raise DataError(str(exc)) from None


def load_dataset(path, coords_path=None):
    """Parse a dataset CSV (and optional coordinates file) into a matrix.

    The declared scale is kept as is; callers convert raw data with
    :func:`maxstab.margins.empirical_to_gumbel`.
    """
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise DataError("first line must be '# scale=gumbel|frechet|raw'", 1)
    key, _, value = lines[0].lstrip("#").strip().partition("=")
    if key.strip() != "scale":
        raise DataError("first line must declare the scale", 1)
    try:
        scale = Scale(value.strip().lower())
    except ValueError:
        raise DataError(f"unknown scale {value.strip()!r}", 1) from None

    body = [(i, line) for i, line in enumerate(lines[1:], start=2)
            if line.strip() and not line.startswith("#")]
    if not body:
        raise DataError("missing header row")
    hdr_line, hdr = body[0]
    site_ids = [s.strip() for s in next(csv.reader([hdr]))]
    seen = set()
    for sid in site_ids:
        if not sid or sid in seen:
            raise DataError(f"duplicate or empty site id {sid!r}", hdr_line)
        seen.add(sid)
    values = []
    for lineno, line in body[1:]:
        cells = next(csv.reader([line]))
        if len(cells) != len(site_ids):
            raise DataError(f"expected {len(site_ids)} fields, got {len(cells)}", lineno)
        values.append([_parse_float(c, lineno) for c in cells])
    if not values:
        raise DataError("no replicate rows")
    values = np.array(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DataError("values must be finite")
    if scale is Scale.FRECHET and np.any(values <= 0):
        bad = int(np.flatnonzero((values <= 0).any(axis=1))[0])
        raise DomainError(f"line {body[1 + bad][0]}: Frechet values must be positive")
    grid = load_coords(coords_path, site_ids) if coords_path is not None else None
    return ReplicateMatrix(values, scale, grid, tuple(site_ids))
