"""Versioned binary container for fitted trees.

Layout of a tree file::

    bytes 0-7    magic  b"TMTREE\\x00\\x00"
    bytes 8-11   format version, uint32 little-endian
    bytes 12-19  metadata length in bytes, uint64 little-endian
    ...          metadata: UTF-8 JSON (config, node structure, array refs)
    ...          blob: all numeric arrays, float64 little-endian, C-order

Configs and structure are JSON because humans read and diff them; mode data
is raw float64 because it is large and must round-trip bit-exactly (including
infinities, which JSON cannot carry). Complex arrays are stored as separate
real and imaginary planes. Every array reference in the metadata is an
(offset, shape) pair into the blob.

A file holds everything needed to reconstruct and extend the tree without
the original data: windows, modes, eigenvalues, amplitudes, strides, and —
unless stripped — the root's streaming cache.
"""

from __future__ import annotations

import io
import json
from dataclasses import asdict

import numpy as np

from .dmd import DMDResult
from .mrdmd import LevelCache, MrDMDConfig, MrDMDNode, MrDMDTree
from .svd import SVDFactors

MAGIC = b"TMTREE\x00\x00"
FORMAT_VERSION = 1


class TreeFileError(ValueError):
    """The file is not a readable tree container."""


class _BlobWriter:
    """Accumulates arrays and hands back their metadata references."""

    def __init__(self) -> None:
        self.buffer = io.BytesIO()
        self.offset = 0

    def add(self, array: np.ndarray) -> dict:
        data = np.ascontiguousarray(array, dtype="<f8")
        ref = {"offset": self.offset, "shape": list(data.shape)}
        raw = data.tobytes()
        self.buffer.write(raw)
        self.offset += len(raw)
        return ref


class _BlobReader:
    def __init__(self, blob: bytes) -> None:
        self.blob = blob

    def get(self, ref: dict) -> np.ndarray:
        shape = tuple(int(s) for s in ref["shape"])
        count = int(np.prod(shape)) if shape else 1
        offset = int(ref["offset"])
        end = offset + count * 8
        if end > len(self.blob):
            raise TreeFileError("array reference beyond end of blob")
        flat = np.frombuffer(self.blob, dtype="<f8", count=count, offset=offset)
        return flat.reshape(shape).astype(np.float64, copy=True)


def _encode_complex(writer: _BlobWriter, array: np.ndarray) -> dict:
    array = np.asarray(array, dtype=np.complex128)
    return {"re": writer.add(array.real), "im": writer.add(array.imag)}


def _decode_complex(reader: _BlobReader, ref: dict) -> np.ndarray:
    return reader.get(ref["re"]) + 1j * reader.get(ref["im"])


def _encode_dmd(writer: _BlobWriter, result: DMDResult) -> dict:
    return {
        "n_sensors": result.n_sensors,
        "delta_t": result.delta_t,
        "modes": _encode_complex(writer, result.modes),
        "eigenvalues": _encode_complex(writer, result.eigenvalues),
        "exponents": _encode_complex(writer, result.exponents),
        "amplitudes": _encode_complex(writer, result.amplitudes),
    }


def _decode_dmd(reader: _BlobReader, obj: dict) -> DMDResult:
    return DMDResult(
        modes=_decode_complex(reader, obj["modes"]),
        eigenvalues=_decode_complex(reader, obj["eigenvalues"]),
        exponents=_decode_complex(reader, obj["exponents"]),
        amplitudes=_decode_complex(reader, obj["amplitudes"]),
        delta_t=float(obj["delta_t"]),
    )


def _encode_cache(writer: _BlobWriter, cache: LevelCache) -> dict:
    return {
        "stride": cache.stride,
        "data_norm": cache.data_norm,
        "columns": writer.add(cache.columns),
        "factors": {
            "u": writer.add(cache.factors.u),
            "sigma": writer.add(cache.factors.sigma),
            "v": writer.add(cache.factors.v),
            "updates": cache.factors.updates,
        },
    }


def _decode_cache(reader: _BlobReader, obj: dict) -> LevelCache:
    factors = obj["factors"]
    return LevelCache(
        stride=int(obj["stride"]),
        columns=reader.get(obj["columns"]),
        factors=SVDFactors(
            u=reader.get(factors["u"]),
            sigma=reader.get(factors["sigma"]),
            v=reader.get(factors["v"]),
            updates=int(factors["updates"]),
        ),
        data_norm=float(obj["data_norm"]),
    )


def _encode_node(writer: _BlobWriter, node: MrDMDNode, include_cache: bool) -> dict:
    obj = {
        "level": node.level,
        "t_start": node.t_start,
        "t_end": node.t_end,
        "stride": node.stride,
        "rho": node.rho,
        "dmd": _encode_dmd(writer, node.dmd),
        "superseded": (
            _encode_dmd(writer, node.superseded)
            if node.superseded is not None
            else None
        ),
        "cache": (
            _encode_cache(writer, node.svd_cache)
            if include_cache and node.svd_cache is not None
            else None
        ),
        "children": [
            _encode_node(writer, child, include_cache) for child in node.children
        ],
    }
    return obj


def _decode_node(reader: _BlobReader, obj: dict) -> MrDMDNode:
    return MrDMDNode(
        level=int(obj["level"]),
        t_start=int(obj["t_start"]),
        t_end=int(obj["t_end"]),
        stride=int(obj["stride"]),
        rho=float(obj["rho"]),
        dmd=_decode_dmd(reader, obj["dmd"]),
        children=tuple(_decode_node(reader, c) for c in obj["children"]),
        svd_cache=(
            _decode_cache(reader, obj["cache"]) if obj.get("cache") else None
        ),
        superseded=(
            _decode_dmd(reader, obj["superseded"]) if obj.get("superseded") else None
        ),
    )


def save_tree(tree: MrDMDTree, path, *, include_cache: bool = True) -> None:
    """Write a tree container; ``include_cache=False`` strips streaming state.

    A stripped file reconstructs and exports identically but cannot be
    extended with new data.
    """
    writer = _BlobWriter()
    meta = {
        "config": asdict(tree.config),
        "sensor_ids": list(tree.sensor_ids),
        "total_timesteps": tree.total_timesteps,
        "delta_t": tree.delta_t,
        "root": _encode_node(writer, tree.root, include_cache),
    }
    encoded = json.dumps(meta, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(np.uint32(FORMAT_VERSION).tobytes())
        handle.write(np.uint64(len(encoded)).tobytes())
        handle.write(encoded)
        handle.write(writer.buffer.getvalue())


def load_tree(path) -> MrDMDTree:
    """Read a tree container written by save_tree."""
    with open(path, "rb") as handle:
        raw = handle.read()
    if len(raw) < 20 or raw[:8] != MAGIC:
        raise TreeFileError(f"{path}: not a tree container")
    version = int(np.frombuffer(raw, dtype="<u4", count=1, offset=8)[0])
    if version != FORMAT_VERSION:
        raise TreeFileError(
            f"{path}: unsupported container version {version} "
            f"(this build reads {FORMAT_VERSION})"
        )
    meta_len = int(np.frombuffer(raw, dtype="<u8", count=1, offset=12)[0])
    meta_end = 20 + meta_len
    if meta_end > len(raw):
        raise TreeFileError(f"{path}: truncated metadata")
    try:
        meta = json.loads(raw[20:meta_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TreeFileError(f"{path}: unreadable metadata: {exc}") from None
    reader = _BlobReader(raw[meta_end:])
    try:
        return MrDMDTree(
            root=_decode_node(reader, meta["root"]),
            config=MrDMDConfig(**meta["config"]),
            sensor_ids=tuple(meta["sensor_ids"]),
            total_timesteps=int(meta["total_timesteps"]),
            delta_t=float(meta["delta_t"]),
        )
    except (KeyError, TypeError) as exc:
        raise TreeFileError(f"{path}: malformed metadata: {exc}") from None
