"""Bit-exact file I/O for light-fields, float maps, and rendered disparity.

A light-field on disk is a directory holding one PNG per valid view plus a
``manifest.txt`` of ordered ``key=value`` lines (UTF-8, ``#`` comments).
Views are stored as 16-bit RGB PNGs (8-bit accepted on input) and normalized
to [0, 1] on load. Float maps use the Portable Float Map format with rows
stored bottom-to-top and the sign of the scale line encoding endianness.
See FORMATS.md at the repository root for the exact layouts.
"""

from __future__ import annotations

import os

import cv2
import numpy as np

from ._colormap import COLORMAP_RGB8
from .core import ContractViolation, DataError, DisparityField, LightField, View, ViewIndex

MANIFEST_NAME = "manifest.txt"

_REQUIRED_KEYS = ("ns", "nt", "center_s", "center_t", "view_pattern")
_KNOWN_KEYS = set(_REQUIRED_KEYS) | {"kappa_k", "valid_views"}


def _parse_manifest(path: str) -> dict:
    if not os.path.isfile(path):
        raise DataError(f"manifest not found: {path}")
    entries: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in _KNOWN_KEYS:
                raise DataError(f"{path}:{lineno}: unknown manifest key {key!r}")
            if key in entries:
                raise DataError(f"{path}:{lineno}: duplicate manifest key {key!r}")
            entries[key] = value.strip()
    missing = [k for k in _REQUIRED_KEYS if k not in entries]
    if missing:
        raise DataError(f"{path}: missing manifest keys: {', '.join(missing)}")
    return entries


def _parse_valid_views(text: str, ns: int, nt: int, path: str) -> list[ViewIndex]:
    indices = []
    for token in text.split():
        parts = token.split(",")
        if len(parts) != 2:
            raise DataError(f"{path}: bad valid_views token {token!r} (want s,t)")
        try:
            s, t = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise DataError(f"{path}: bad valid_views token {token!r}") from exc
        if not (0 <= s < ns and 0 <= t < nt):
            raise DataError(f"{path}: valid view ({s},{t}) outside {ns}x{nt} grid")
        indices.append(ViewIndex(s, t))
    if not indices:
        raise DataError(f"{path}: valid_views present but empty")
    return indices


def _load_view_png(path: str) -> np.ndarray:
    img = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if img is None:
        raise DataError(f"cannot read view image: {path}")
    if img.ndim == 2:
        img = np.stack([img] * 3, axis=-1)
    if img.shape[2] == 4:
        img = img[:, :, :3]
    img = img[:, :, ::-1]  # BGR -> RGB
    if img.dtype == np.uint8:
        return img.astype(np.float64) / 255.0
    if img.dtype == np.uint16:
        return img.astype(np.float64) / 65535.0
    raise DataError(f"{path}: unsupported PNG sample type {img.dtype}")


def load_lightfield(dir_path: str) -> LightField:
    """Load a light-field directory, normalizing samples to [0, 1].

    Collects every missing or mismatched view file and reports them in a
    single error.
    """
    manifest_path = os.path.join(dir_path, MANIFEST_NAME)
    entries = _parse_manifest(manifest_path)
    try:
        ns, nt = int(entries["ns"]), int(entries["nt"])
        center = ViewIndex(int(entries["center_s"]), int(entries["center_t"]))
        kappa_k = float(entries.get("kappa_k", "1.0"))
    except ValueError as exc:
        raise DataError(f"{manifest_path}: non-numeric manifest value: {exc}") from exc
    pattern = entries["view_pattern"]

    if "valid_views" in entries:
        wanted = _parse_valid_views(entries["valid_views"], ns, nt, manifest_path)
    else:
        wanted = [ViewIndex(s, t) for t in range(nt) for s in range(ns)]
    if center not in wanted:
        raise DataError(f"{manifest_path}: central view ({center.s},{center.t}) not valid")

    views: dict[ViewIndex, View] = {}
    problems: list[str] = []
    dims: tuple[int, int] | None = None
    for vi in wanted:
        path = os.path.join(dir_path, pattern.format(s=vi.s, t=vi.t))
        if not os.path.isfile(path):
            problems.append(f"view ({vi.s},{vi.t}): missing file {path}")
            continue
        img = _load_view_png(path)
        if dims is None:
            dims = img.shape[:2]
        elif img.shape[:2] != dims:
            problems.append(
                f"view ({vi.s},{vi.t}): size {img.shape[1]}x{img.shape[0]} "
                f"!= expected {dims[1]}x{dims[0]}"
            )
            continue
        views[vi] = View(img)
    if problems:
        raise DataError("; ".join(problems))
    try:
        return LightField(views=views, ns=ns, nt=nt, center=center, kappa_k=kappa_k)
    except ContractViolation as exc:
        raise DataError(str(exc)) from exc


def save_lightfield(lf: LightField, dir_path: str) -> None:
    """Write a light-field directory with 16-bit PNG views.

    Quantization to 16 bits is idempotent: loading and saving again
    reproduces every file byte-exactly.
    """
    os.makedirs(dir_path, exist_ok=True)
    pattern = "view_{s}_{t}.png"
    lines = [
        "# lumen light-field",
        f"ns={lf.ns}",
        f"nt={lf.nt}",
        f"center_s={lf.center.s}",
        f"center_t={lf.center.t}",
        f"kappa_k={lf.kappa_k!r}",
        f"view_pattern={pattern}",
    ]
    if len(lf.views) < lf.ns * lf.nt:
        tokens = " ".join(f"{vi.s},{vi.t}" for vi in lf.valid_indices())
        lines.append(f"valid_views={tokens}")
    with open(os.path.join(dir_path, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    for vi in lf.valid_indices():
        img = np.clip(lf.views[vi].channels, 0.0, 1.0)
        u16 = np.round(img * 65535.0).astype(np.uint16)
        path = os.path.join(dir_path, pattern.format(s=vi.s, t=vi.t))
        if not cv2.imwrite(path, u16[:, :, ::-1]):
            raise DataError(f"failed to write view image: {path}")


def write_pfm(grid: np.ndarray, path: str) -> None:
    """Write a single-channel PFM (little-endian, rows bottom-to-top)."""
    grid = np.asarray(grid)
    if grid.ndim != 2:
        raise ContractViolation("PFM payload must be a 2D grid")
    if not np.all(np.isfinite(grid)):
        raise ContractViolation("PFM payload must be finite")
    data = grid.astype(np.float32)
    with open(path, "wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{data.shape[1]} {data.shape[0]}\n".encode("ascii"))
        fh.write(b"-1.0\n")
        fh.write(data[::-1, :].tobytes())


def read_pfm(path: str) -> np.ndarray:
    """Read a single-channel PFM; inverts write_pfm exactly."""
    with open(path, "rb") as fh:
        magic = fh.readline().strip()
        if magic != b"Pf":
            raise DataError(f"{path}: not a single-channel PFM (header {magic!r})")
        dims = fh.readline().split()
        if len(dims) != 2:
            raise DataError(f"{path}: malformed dimensions line")
        try:
            width, height = int(dims[0]), int(dims[1])
        except ValueError as exc:
            raise DataError(f"{path}: malformed dimensions line") from exc
        try:
            scale = float(fh.readline().strip())
        except ValueError as exc:
            raise DataError(f"{path}: malformed scale line") from exc
        payload = fh.read(width * height * 4)
    if len(payload) != width * height * 4:
        raise DataError(f"{path}: truncated payload")
    dtype = "<f4" if scale < 0 else ">f4"
    data = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return data[::-1, :].astype(np.float32)


def render_disparity_png(
    field: DisparityField,
    value_range: tuple[float, float] | None,
    path: str,
) -> None:
    """Render the field through the repository color map to an 8-bit PNG.

    ``value_range`` defaults to (min, max); out-of-range values clamp to the
    end colors. A degenerate range (constant field under auto-ranging) maps
    everything to the middle of the color map.
    """
    values = field.values
    if value_range is None:
        lo, hi = float(values.min()), float(values.max())
    else:
        lo, hi = value_range
        if lo >= hi:
            raise ContractViolation("render range must satisfy lo < hi")
    if lo == hi:
        indices = np.full(values.shape, 128, dtype=np.intp)
    else:
        t = np.clip((values - lo) / (hi - lo), 0.0, 1.0)
        indices = np.round(t * 255.0).astype(np.intp)
    rgb = COLORMAP_RGB8[indices]
    if not cv2.imwrite(path, rgb[:, :, ::-1]):
        raise DataError(f"failed to write disparity rendering: {path}")
