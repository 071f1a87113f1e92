"""Reader/writer for the toolkit's DAQT tensor interchange format.

Layout (little-endian): magic "DAQT" | version u32 = 1 | rows u64 | cols u64 |
payload rows*cols float32 row-major. Implemented here from the documented
format so the exporter stays decoupled from the toolkit's internals.
"""

import struct

import numpy as np

MAGIC = b"DAQT"
VERSION = 1
HEADER = struct.Struct("<4sIQQ")


def write_daqt(array, path: str) -> None:
    arr = np.asarray(array, dtype=np.float32)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"DAQT holds non-empty 2-D tensors, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("refusing to write NaN/Inf payload")
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, arr.shape[0], arr.shape[1]))
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_daqt(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    magic, version, rows, cols = HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a DAQT file")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    payload = np.frombuffer(blob, dtype="<f4", offset=HEADER.size)
    if payload.size != rows * cols:
        raise ValueError(f"{path}: payload size mismatch")
    return payload.reshape(rows, cols).copy()
