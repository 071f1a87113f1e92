"""Bit-exact file formats for weights, calibration data, and packed outputs.

DAQT tensor file (little-endian throughout):

    magic "DAQT" | version u32 = 1 | rows u64 | cols u64
    payload: rows * cols float32, row-major

DAQQ packed file:

    magic "DAQQ" | version u32 = 1 | format_id u32 | bits u32
    group_size i64 (-1 = per-row) | rows u64 | cols u64
    per-group (s f32, z f32) in row-major group order
    codes: k bits per weight, row-major, packed contiguously; within a byte
    earlier weights occupy lower-order bits

Values are stored as 32-bit floats; loaders widen to float64 exactly so all
downstream arithmetic runs in doubles. Non-finite payloads are rejected at
load and save since every downstream formula is undefined on them.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadMagic,
    CodeOutOfRange,
    InvalidShape,
    IoError,
    LayoutMismatch,
    NonFiniteValue,
    TruncatedPayload,
    VersionMismatch,
)
from .formats import FORMAT_IDS, FORMAT_KINDS, QuantFormat
from .quantizer import GroupLayout, QuantizedGroup, QuantParams

TENSOR_MAGIC = b"DAQT"
PACKED_MAGIC = b"DAQQ"
FORMAT_VERSION = 1

_TENSOR_HEADER = struct.Struct("<4sIQQ")
_PACKED_HEADER = struct.Struct("<4sIIIqQQ")


@dataclass
class PackedQuantizedTensor:
    """In-memory image of a DAQQ artifact."""

    layout: GroupLayout
    kind: str
    bits: int
    params: np.ndarray  # (n_groups, 2) float32: s, z
    codes_packed: bytes

    def __eq__(self, other):
        if not isinstance(other, PackedQuantizedTensor):
            return NotImplemented
        return (
            self.layout == other.layout
            and self.kind == other.kind
            and self.bits == other.bits
            and np.array_equal(
                self.params.view(np.uint32), other.params.view(np.uint32)
            )
            and self.codes_packed == other.codes_packed
        )


def _read_exact(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e


def _write_exact(path: str, blob: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(blob)
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


# --- DAQT ------------------------------------------------------------------

def tensor_to_bytes(t) -> bytes:
    arr = np.asarray(t, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidShape(f"tensor must be non-empty and 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("tensor contains NaN or Inf")
    payload = np.ascontiguousarray(arr, dtype="<f4")
    header = _TENSOR_HEADER.pack(
        TENSOR_MAGIC, FORMAT_VERSION, arr.shape[0], arr.shape[1]
    )
    return header + payload.tobytes()


def tensor_from_bytes(blob: bytes, source: str = "<bytes>") -> np.ndarray:
    if len(blob) < _TENSOR_HEADER.size:
        raise TruncatedPayload(f"{source}: {len(blob)} bytes is too short for a header")
    magic, version, rows, cols = _TENSOR_HEADER.unpack_from(blob, 0)
    if magic != TENSOR_MAGIC:
        raise BadMagic(f"{source}: expected {TENSOR_MAGIC!r}, found {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{source}: unsupported version {version}")
    if rows == 0 or cols == 0:
        raise InvalidShape(f"{source}: degenerate shape {rows}x{cols}")
    expected = rows * cols * 4
    got = len(blob) - _TENSOR_HEADER.size
    if got != expected:
        raise TruncatedPayload(
            f"{source}: payload is {got} bytes, need {expected} for {rows}x{cols}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=_TENSOR_HEADER.size)
    arr = data.reshape(rows, cols).astype(np.float64)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{source}: payload contains NaN or Inf")
    return arr


def save_tensor(t, path: str) -> None:
    _write_exact(path, tensor_to_bytes(t))


def load_tensor(path: str) -> np.ndarray:
    return tensor_from_bytes(_read_exact(path), source=path)


# --- code bit-packing --------------------------------------------------------

def pack_codes(codes: np.ndarray, bits: int) -> bytes:
    """Pack integer codes into a contiguous little-endian bitstream."""
    flat = np.asarray(codes).ravel()
    if flat.size and (flat.min() < 0 or flat.max() >= (1 << bits)):
        raise CodeOutOfRange(
            f"codes must fit in {bits} bits, got range "
            f"[{flat.min()}, {flat.max()}]"
        )
    flat = flat.astype(np.uint8)
    bit_cols = (flat[:, None] >> np.arange(bits, dtype=np.uint8)) & 1
    return np.packbits(bit_cols.ravel(), bitorder="little").tobytes()


def unpack_codes(blob: bytes, bits: int, count: int) -> np.ndarray:
    """Inverse of pack_codes for a known code count."""
    needed = (count * bits + 7) // 8
    if len(blob) != needed:
        raise TruncatedPayload(f"code stream is {len(blob)} bytes, need {needed}")
    bits_flat = np.unpackbits(
        np.frombuffer(blob, dtype=np.uint8), bitorder="little"
    )[: count * bits]
    cols = bits_flat.reshape(count, bits).astype(np.int64)
    return cols @ (1 << np.arange(bits, dtype=np.int64))


# --- DAQQ ------------------------------------------------------------------

def pack_quantized(
    groups: list[QuantizedGroup], layout: GroupLayout, fmt: QuantFormat
) -> PackedQuantizedTensor:
    if len(groups) != layout.n_groups:
        raise LayoutMismatch(
            f"layout expects {layout.n_groups} groups, got {len(groups)}"
        )
    params = np.empty((layout.n_groups, 2), dtype=np.float32)
    all_codes = np.empty(layout.rows * layout.cols, dtype=np.int64)
    pos = 0
    for i, g in enumerate(groups):
        codes = np.asarray(g.codes, dtype=np.int64).ravel()
        if codes.size != layout.group_len:
            raise LayoutMismatch(
                f"group {i} has {codes.size} codes, layout expects {layout.group_len}"
            )
        params[i, 0] = g.params.s
        params[i, 1] = g.params.z
        all_codes[pos : pos + codes.size] = codes
        pos += codes.size
    return PackedQuantizedTensor(
        layout=layout,
        kind=fmt.kind,
        bits=fmt.bits,
        params=params,
        codes_packed=pack_codes(all_codes, fmt.bits),
    )


def unpack_quantized(
    p: PackedQuantizedTensor, fmt: QuantFormat
) -> list[QuantizedGroup]:
    if fmt.kind != p.kind or fmt.bits != p.bits:
        raise LayoutMismatch(
            f"artifact is {p.kind}{p.bits}, format given is {fmt.kind}{fmt.bits}"
        )
    layout = p.layout
    all_codes = unpack_codes(p.codes_packed, p.bits, layout.rows * layout.cols)
    groups = []
    for i in range(layout.n_groups):
        start = i * layout.group_len
        groups.append(
            QuantizedGroup(
                codes=all_codes[start : start + layout.group_len],
                params=QuantParams(float(p.params[i, 0]), float(p.params[i, 1])),
            )
        )
    return groups


def packed_to_bytes(p: PackedQuantizedTensor) -> bytes:
    header = _PACKED_HEADER.pack(
        PACKED_MAGIC,
        FORMAT_VERSION,
        FORMAT_IDS[p.kind],
        p.bits,
        p.layout.group_size,
        p.layout.rows,
        p.layout.cols,
    )
    return header + np.ascontiguousarray(p.params, dtype="<f4").tobytes() + p.codes_packed


def packed_from_bytes(blob: bytes, source: str = "<bytes>") -> PackedQuantizedTensor:
    if len(blob) < _PACKED_HEADER.size:
        raise TruncatedPayload(f"{source}: {len(blob)} bytes is too short for a header")
    magic, version, format_id, bits, group_size, rows, cols = _PACKED_HEADER.unpack_from(
        blob, 0
    )
    if magic != PACKED_MAGIC:
        raise BadMagic(f"{source}: expected {PACKED_MAGIC!r}, found {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{source}: unsupported version {version}")
    if format_id not in FORMAT_KINDS:
        raise VersionMismatch(f"{source}: unknown format id {format_id}")
    if not 2 <= bits <= 8:
        raise VersionMismatch(f"{source}: unsupported bit width {bits}")
    layout = GroupLayout(group_size, rows, cols)
    params_bytes = layout.n_groups * 8
    code_bytes = (rows * cols * bits + 7) // 8
    expected = _PACKED_HEADER.size + params_bytes + code_bytes
    if len(blob) != expected:
        raise TruncatedPayload(
            f"{source}: file is {len(blob)} bytes, format requires {expected}"
        )
    params = (
        np.frombuffer(blob, dtype="<f4", count=layout.n_groups * 2, offset=_PACKED_HEADER.size)
        .reshape(layout.n_groups, 2)
        .copy()
    )
    if not np.all(np.isfinite(params)):
        raise NonFiniteValue(f"{source}: group parameters contain NaN or Inf")
    codes_packed = blob[_PACKED_HEADER.size + params_bytes :]
    return PackedQuantizedTensor(
        layout=layout,
        kind=FORMAT_KINDS[format_id],
        bits=bits,
        params=params,
        codes_packed=codes_packed,
    )


def save_packed(p: PackedQuantizedTensor, path: str) -> None:
    _write_exact(path, packed_to_bytes(p))


def load_packed(path: str) -> PackedQuantizedTensor:
    return packed_from_bytes(_read_exact(path), source=path)
