"""CSV / label-file / PPM heatmap input and output for the CLI."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import as_matrix


def read_csv_matrix(path, header: bool = False, rownames: bool = False) -> np.ndarray:
    """Read a numeric CSV matrix; optionally skip a header row and a
    leading row-name column."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for idx, rec in enumerate(reader):
            if idx == 0 and header:
                continue
            if not rec:
                continue
            if rownames:
                rec = rec[1:]
            rows.append([float(v) for v in rec])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged rows (widths {sorted(widths)})")
    return as_matrix(np.array(rows), name=str(path))


def write_csv_matrix(path, m: np.ndarray) -> None:
    """Write a matrix as plain comma-separated values, 17 significant digits."""
    np.savetxt(path, np.atleast_2d(m), fmt="%.17g", delimiter=",")


def write_labels(path, labels) -> None:
    np.savetxt(path, np.asarray(labels, dtype=int).reshape(-1, 1), fmt="%d")


def read_labels(path) -> np.ndarray:
    vals = np.loadtxt(path, dtype=int, ndmin=1)
    return vals.ravel()


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def diverging_rgb(values: np.ndarray) -> np.ndarray:
    """Map values to 8-bit RGB with blue at the minimum, white at the
    median, red at the maximum."""
    v = np.asarray(values, dtype=np.float64)
    lo, mid, hi = float(v.min()), float(np.median(v)), float(v.max())
    rgb = np.full(v.shape + (3,), 255, dtype=np.uint8)
    below = v < mid
    if mid > lo:
        t = (v - lo) / (mid - lo)  # 0 at min -> 1 at median
        frac = np.clip(t, 0.0, 1.0)
        rgb[below, 0] = (255 * frac[below]).astype(np.uint8)
        rgb[below, 1] = (255 * frac[below]).astype(np.uint8)
    above = v > mid
    if hi > mid:
        t = (v - mid) / (hi - mid)  # 0 at median -> 1 at max
        frac = np.clip(t, 0.0, 1.0)
        rgb[above, 1] = (255 * (1 - frac[above])).astype(np.uint8)
        rgb[above, 2] = (255 * (1 - frac[above])).astype(np.uint8)
    return rgb


def write_ppm_heatmap(path, m: np.ndarray) -> None:
    """Write a binary P6 portable pixmap of the matrix under the diverging
    blue-white-red colormap."""
    rgb = diverging_rgb(np.asarray(m, dtype=np.float64))
    h, w = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
