"""System-spec files (JSON) and grid-field binary files.

A spec file holds::

    {"name": "...", "d": 3, "N": 6, "mu": 2,
     "A": [[[[re, im], ...], ...], ...],      # d + 1 matrices, row-major
     "B": [[[re, im], ...], ...],             # mu x N
     "symbol": "wave",                        # optional, replaces "A"
     "boundary_symbol": {"tag": "oblique", "b": [1.0]},  # optional
     "preset": {"name": "maxwell", "params": {...}}}     # optional

A grid-field file is ``MAGIC``, ``uint32`` rank, ``rank`` x ``uint64`` dims,
``rank - 1`` x ``float64`` grid spacings (the first axis indexes
components), ``float64`` gamma, then the little-endian complex128 payload
(interleaved real and imaginary float64) in C order.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError
from .hyperbolic import HyperbolicSystem, SymbolMode
from .lopatinskii import BoundaryOperator
from .models import Preset, boundary_symbol, custom_symbol, get_preset

__all__ = [
    "SystemSpec",
    "load_spec",
    "parse_spec",
    "spec_to_dict",
    "preset_to_dict",
    "write_spec",
    "GridField",
    "read_field",
    "write_field",
]

MAGIC = b"HYPBCGF1"


@dataclass
class SystemSpec:
    name: str
    system: HyperbolicSystem
    B: BoundaryOperator
    preset: dict | None = None


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", path)
    return obj[key]


def _int(obj: dict, key: str, minimum: int = 1) -> int:
    v = _require(obj, key, "")
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ParseError(f"expected integer >= {minimum}", key)
    return v


def _number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {type(x).__name__}", path)
    if not math.isfinite(x):
        raise ParseError("NaN or infinite entry", path)
    return float(x)


def _matrix(value, rows: int, cols: int, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != rows:
        got = len(value) if isinstance(value, list) else type(value).__name__
        raise ParseError(f"expected {rows} rows, got {got}", path)
    out = np.empty((rows, cols), dtype=complex)
    for i, row in enumerate(value):
        rp = f"{path}[{i}]"
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ParseError(f"expected {cols} entries, got {got}", rp)
        for j, entry in enumerate(row):
            ep = f"{rp}[{j}]"
            if not isinstance(entry, list) or len(entry) != 2:
                raise ParseError("expected an [re, im] pair", ep)
            out[i, j] = complex(_number(entry[0], ep + "[0]"), _number(entry[1], ep + "[1]"))
    return out


def parse_spec(data: dict) -> SystemSpec:
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    if "preset" in data and "A" not in data and "symbol" not in data:
        p = data["preset"]
        try:
            preset = get_preset(p["name"], **p.get("params", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(str(exc), "preset") from exc
        return SystemSpec(preset.name, preset.system, preset.B, p)
    name = str(data.get("name", ""))
    d, N, mu = _int(data, "d"), _int(data, "N"), _int(data, "mu", 0)
    if "symbol" in data:
        try:
            sym = custom_symbol(str(data["symbol"]), d)
        except (KeyError, ValueError) as exc:
            raise ParseError(str(exc), "symbol") from exc
        if sym.Ad.shape != (N, N):
            raise ParseError(f"symbol {data['symbol']!r} has size {sym.Ad.shape[0]}, N = {N}", "N")
        system = HyperbolicSystem(d, N, [], SymbolMode.CUSTOM, sym, name)
    else:
        A = _require(data, "A", "")
        if not isinstance(A, list) or len(A) != d + 1:
            raise ParseError(f"expected {d + 1} matrices", "A")
        mats = [_matrix(a, N, N, f"A[{j}]") for j, a in enumerate(A)]
        try:
            system = HyperbolicSystem(d, N, mats, name=name)
        except ValueError as exc:
            raise ParseError(str(exc), "A[0]") from exc
    Bm = _matrix(_require(data, "B", ""), mu, N, "B")
    bsym, tag, params = None, "", {}
    if "boundary_symbol" in data:
        spec = dict(data["boundary_symbol"])
        tag = str(spec.pop("tag", ""))
        try:
            bsym = boundary_symbol(tag, **spec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(str(exc), "boundary_symbol") from exc
        params = spec
    return SystemSpec(name, system, BoundaryOperator(Bm, mu, bsym, tag, params), data.get("preset"))


def load_spec(path: str | Path) -> SystemSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc), str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path)) from exc
    return parse_spec(data)


def _pairs(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def spec_to_dict(system: HyperbolicSystem, B: BoundaryOperator, name: str = "", preset: dict | None = None) -> dict:
    out = {"name": name or system.name, "d": system.d, "N": system.N, "mu": B.mu}
    if system.symbol_mode is SymbolMode.CUSTOM:
        out["symbol"] = system.custom_symbol.tag
    else:
        out["A"] = [_pairs(a) for a in system.A]
    out["B"] = _pairs(B.B)
    if B.symbol is not None:
        out["boundary_symbol"] = {"tag": B.tag, **B.params}
    if preset is not None:
        out["preset"] = preset
    return out


def preset_to_dict(preset: Preset) -> dict:
    return spec_to_dict(preset.system, preset.B, preset.name, {"name": preset.name, "params": preset.params})


def write_spec(path: str | Path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=1) + "\n")


@dataclass
class GridField:
    data: np.ndarray
    spacings: tuple[float, ...]
    gamma: float = 0.0


def write_field(path: str | Path, field: GridField) -> None:
    a = np.ascontiguousarray(field.data, dtype="<c16")
    if len(field.spacings) != a.ndim - 1:
        raise ValueError(f"need {a.ndim - 1} spacings, got {len(field.spacings)}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", a.ndim))
        fh.write(struct.pack(f"<{a.ndim}Q", *a.shape))
        fh.write(struct.pack(f"<{a.ndim - 1}d", *field.spacings))
        fh.write(struct.pack("<d", field.gamma))
        fh.write(a.tobytes())


def read_field(path: str | Path) -> GridField:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(str(exc), str(path)) from exc
    if raw[:8] != MAGIC:
        raise ParseError("not a grid-field file (bad magic)", str(path))
    try:
        (rank,) = struct.unpack_from("<I", raw, 8)
        off = 12
        dims = struct.unpack_from(f"<{rank}Q", raw, off)
        off += 8 * rank
        spacings = struct.unpack_from(f"<{rank - 1}d", raw, off)
        off += 8 * (rank - 1)
        (gamma,) = struct.unpack_from("<d", raw, off)
        off += 8
    except struct.error as exc:
        raise ParseError(f"truncated header: {exc}", str(path)) from exc
    count = int(np.prod(dims))
    if len(raw) - off != 16 * count:
        raise ParseError(f"payload has {len(raw) - off} bytes, expected {16 * count}", str(path))
    data = np.frombuffer(raw, dtype="<c16", count=count, offset=off).reshape(dims).astype(complex)
    if not np.all(np.isfinite(data)):
        raise ParseError("NaN or infinite entry in payload", str(path))
    return GridField(data, tuple(spacings), gamma)
