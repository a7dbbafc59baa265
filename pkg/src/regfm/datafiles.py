"""File formats: complex CSV, real CSV, P2 PGM, boundary overlay.

Every CSV starts with one ``#``-prefixed line holding a JSON object of
metadata.  Complex matrices store ``re, im`` interleaved per entry, so an
``n x n`` matrix has ``2 n`` columns.  Numbers are written with 17
significant digits, which round-trips IEEE doubles exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


class DataFileError(ValueError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _header(meta: dict) -> str:
    return "# " + json.dumps({**meta, "format_version": FORMAT_VERSION}, sort_keys=True)


def _read(path):
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise DataFileError(f"{path}: missing '#' metadata line")
    try:
        meta = json.loads(lines[0][1:])
    except json.JSONDecodeError as exc:
        raise DataFileError(f"{path}: bad metadata: {exc}") from None
    rows = [ln for ln in lines[1:] if ln.strip()]
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in rows])
    except ValueError as exc:
        raise DataFileError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.size == 0:
        raise DataFileError(f"{path}: ragged or empty table")
    return meta, data


def write_complex_csv(path, m, meta: dict) -> None:
    m = np.asarray(m, dtype=complex)
    inter = np.empty((m.shape[0], 2 * m.shape[1]))
    inter[:, 0::2] = m.real
    inter[:, 1::2] = m.imag
    body = "\n".join(",".join(_fmt(v) for v in row) for row in inter)
    Path(path).write_text(_header(meta) + "\n" + body + "\n")


def read_complex_csv(path):
    meta, data = _read(path)
    if data.shape[1] % 2:
        raise DataFileError(f"{path}: odd number of columns in complex table")
    return meta, data[:, 0::2] + 1j * data[:, 1::2]


def write_real_csv(path, m, meta: dict) -> None:
    m = np.asarray(m, dtype=float)
    body = "\n".join(",".join(_fmt(v) for v in row) for row in m)
    Path(path).write_text(_header(meta) + "\n" + body + "\n")


def read_real_csv(path):
    return _read(path)


def to_gray(values) -> np.ndarray:
    """Linear map of finite values onto 0..255; infinite sentinels map to 255."""
    v = np.asarray(values, dtype=float)
    fin = np.isfinite(v)
    out = np.full(v.shape, 255, dtype=int)
    if fin.any():
        lo, hi = v[fin].min(), v[fin].max()
        span = hi - lo
        scaled = (v[fin] - lo) / span if span > 0 else np.zeros(np.count_nonzero(fin))
        out[fin] = np.rint(255 * scaled).astype(int)
    return out


def write_pgm(path, values) -> None:
    """ASCII (P2) greymap; row 0 of ``values`` becomes the bottom image row."""
    g = to_gray(values)[::-1]
    lines = ["P2", f"{g.shape[1]} {g.shape[0]}", "255"]
    lines += [" ".join(str(x) for x in row) for row in g]
    Path(path).write_text("\n".join(lines) + "\n")


def read_pgm(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise DataFileError(f"{path}: not a P2 greymap")
    w, h, _ = (int(t) for t in tokens[1:4])
    return np.array(tokens[4:], dtype=int).reshape(h, w)[::-1]
