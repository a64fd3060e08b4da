"""File formats: signal CSV, PGM/PPM rasters, plan CSV, distance matrices.

Signal CSV columns are ``x1,...,xd,w,f1,...,fm`` with the weight column
optional (uniform weights assumed when absent). Images use PGM (P2/P5) for
grayscale and PPM (P3/P6) for color, divided by maxval on read. Plans are
``i,j,mass`` triplets with 0-based indices.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .measures import DiscreteMeasure, ImageRaster, Signal, TransportPlan, normalize_domain

SCHEMA_VERSION = 1


# ---------------------------------------------------------------- signals

def write_signal_csv(signal: Signal, path):
    header = ([f"x{k+1}" for k in range(signal.domain_dim)] + ["w"]
              + [f"f{k+1}" for k in range(signal.channel_dim)])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for pt, wt, val in zip(signal.measure.points, signal.measure.weights,
                               signal.values):
            w.writerow([repr(float(x)) for x in pt] + [repr(float(wt))]
                       + [repr(float(v)) for v in val])


def read_signal_csv(path) -> Signal:
    """Read a signal, normalizing coordinates into [0,1]^d if needed."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidArgumentError(f"{path}: empty signal file")
    header = [h.strip() for h in rows[0]]
    xcols = [i for i, h in enumerate(header) if h.startswith("x")]
    fcols = [i for i, h in enumerate(header) if h.startswith("f")]
    wcols = [i for i, h in enumerate(header) if h == "w"]
    if not xcols or not fcols:
        raise InvalidArgumentError(f"{path}: header must name x* and f* columns")
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    if data.size == 0:
        raise InvalidArgumentError(f"{path}: no data rows")
    pts, extent = normalize_domain(data[:, xcols])
    if wcols:
        weights = data[:, wcols[0]]
        s = weights.sum()
        if s <= 0:
            raise InvalidArgumentError(f"{path}: weights sum to {s}")
        weights = weights / s
    else:
        weights = np.full(len(data), 1.0 / len(data))
    return Signal(DiscreteMeasure(pts, weights, extent=extent), data[:, fcols])


# ---------------------------------------------------------------- images

def _pnm_tokens(data: bytes):
    """Yield whitespace-separated header tokens, skipping # comments."""
    i = 0
    while i < len(data):
        ch = data[i:i + 1]
        if ch in b" \t\r\n":
            i += 1
        elif ch == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
        else:
            j = i
            while j < len(data) and data[j:j + 1] not in b" \t\r\n":
                j += 1
            yield data[i:j], j
            i = j


def read_image(path) -> ImageRaster:
    raw = Path(path).read_bytes()
    toks = _pnm_tokens(raw)
    try:
        magic, _ = next(toks)
    except StopIteration:
        raise InvalidArgumentError(f"{path}: empty image file") from None
    magic = magic.decode("ascii", "replace")
    if magic not in ("P2", "P3", "P5", "P6"):
        raise InvalidArgumentError(f"{path}: unsupported magic {magic!r}")
    (wtok, _), (htok, _), (mtok, end) = next(toks), next(toks), next(toks)
    width, height, maxval = int(wtok), int(htok), int(mtok)
    if width < 1 or height < 1 or maxval < 1:
        raise InvalidArgumentError(f"{path}: bad PNM header")
    channels = 3 if magic in ("P3", "P6") else 1
    count = width * height * channels
    if magic in ("P2", "P3"):
        vals = []
        for tok, _ in _pnm_tokens(raw[end:]):
            vals.append(int(tok))
            if len(vals) == count:
                break
        arr = np.array(vals, dtype=float)
    else:
        body = raw[end + 1:]  # single whitespace byte after maxval
        if maxval < 256:
            arr = np.frombuffer(body[:count], dtype=np.uint8).astype(float)
        else:
            arr = np.frombuffer(body[:2 * count], dtype=">u2").astype(float)
    if arr.size != count:
        raise InvalidArgumentError(f"{path}: truncated pixel data")
    return ImageRaster(width, height, arr.reshape(-1, channels) / maxval)


def write_image(img: ImageRaster, path, binary: bool = True, maxval: int = 255):
    quant = np.rint(img.pixels * maxval).astype(int).clip(0, maxval)
    color = img.channel_dim == 3
    magic = ("P6" if color else "P5") if binary else ("P3" if color else "P2")
    header = f"{magic}\n{img.width} {img.height}\n{maxval}\n".encode()
    with open(path, "wb") as fh:
        fh.write(header)
        if binary:
            dtype = np.uint8 if maxval < 256 else ">u2"
            fh.write(quant.astype(dtype).tobytes())
        else:
            flat = quant.ravel()
            for off in range(0, len(flat), 12):
                fh.write((" ".join(str(v) for v in flat[off:off + 12]) + "\n").encode())


# ---------------------------------------------------------------- plans

def write_plan_csv(plan: TransportPlan, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "mass"])
        for i, j, m in plan.entries:
            w.writerow([i, j, repr(m)])


def read_plan_csv(path, source_size: int, target_size: int) -> TransportPlan:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    body = [r for r in rows[1:] if r]
    if not body:
        raise InvalidArgumentError(f"{path}: plan has no entries")
    idx = np.array([[int(r[0]), int(r[1])] for r in body], dtype=np.intp)
    mass = np.array([float(r[2]) for r in body])
    n = source_size
    is_perm = (source_size == target_size and len(mass) == n
               and len(np.unique(idx[:, 0])) == n and len(np.unique(idx[:, 1])) == n
               and np.max(np.abs(mass - 1.0 / n)) <= 1e-9)
    return TransportPlan(idx[:, 0], idx[:, 1], mass, source_size, target_size,
                         is_permutation=bool(is_perm))


# ------------------------------------------------------ distance matrices

def write_distance_matrix(labels, values: np.ndarray, path, spec_info: dict | None = None):
    """CSV with label header row plus a JSON sidecar describing the method."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(labels))
        for row in values:
            w.writerow([repr(float(v)) for v in row])
    sidecar = {"schema_version": SCHEMA_VERSION, "labels": list(labels),
               "spec": spec_info or {}}
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def read_distance_matrix(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    labels = [h.strip() for h in rows[0]]
    values = np.array([[float(v) for v in r] for r in rows[1:] if r])
    if values.shape != (len(labels), len(labels)):
        raise InvalidArgumentError(f"{path}: matrix shape {values.shape} does not "
                                   f"match {len(labels)} labels")
    return labels, values
