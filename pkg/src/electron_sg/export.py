"""CSV and binary PGM writers shared by the command line tools."""
from __future__ import annotations

import csv

import numpy as np

__all__ = ["fmt", "write_csv", "write_pgm", "counts_to_gray", "linear_to_gray",
           "write_hits_csv", "write_fieldmap_csv", "write_trajectory_csv", "write_report_csv"]

REPORT_HEADER = ("scenario_id", "gradient", "voltage", "splitting_m",
                 "lorentz_deflection_m", "resolved", "screen_splitting_m")


def fmt(value) -> str:
    """Shortest round-trip decimal text for floats; ints and strings unchanged."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_pgm(path, gray: np.ndarray) -> None:
    """Binary P5 graymap, row-major, maxval 255."""
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())


def counts_to_gray(counts: np.ndarray) -> np.ndarray:
    peak = int(counts.max()) if counts.size else 0
    if peak == 0:
        return np.zeros(counts.shape, dtype=np.uint8)
    return (counts.astype(np.int64) * 255 // peak).astype(np.uint8)


def linear_to_gray(values: np.ndarray) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.zeros(values.shape, dtype=np.uint8)
    return np.floor((values - lo) / (hi - lo) * 255.0 + 0.5).astype(np.uint8)


def screen_to_gray(image) -> np.ndarray:
    """Screen histogram as an upright image: columns are y, top row is max z."""
    return counts_to_gray(image.grid.T[::-1])


def write_hits_csv(path, image) -> None:
    write_csv(path, ("y", "z", "spin_sign"),
              zip(image.y.tolist(), image.z.tolist(), image.spin.tolist()))


def write_fieldmap_csv(path, fmap) -> None:
    Z, Y = np.meshgrid(fmap.z, fmap.y, indexing="ij")
    cols = (Y, Z, fmap.H, fmap.B, fmap.dBdz, fmap.epsilon)
    write_csv(path, ("y", "z", "H", "B", "dBdz", "epsilon"),
              zip(*(c.ravel().tolist() for c in cols)))


def write_trajectory_csv(path, rows: np.ndarray) -> None:
    out = ((t, x, y, z, vx, vy, vz, int(s)) for t, x, y, z, vx, vy, vz, s, _ in rows.tolist())
    write_csv(path, ("t", "x", "y", "z", "vx", "vy", "vz", "spin_sign"), out)


def write_report_csv(path, rows) -> None:
    """``rows`` are ``(scenario_id, SplitReport)`` pairs."""
    write_csv(path, REPORT_HEADER, (
        (sid, r.gradient, r.voltage, r.splitting, r.lorentz_deflection, r.resolved,
         r.screen_splitting) for sid, r in rows))
