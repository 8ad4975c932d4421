"""Asset catalog: metadata JSON + packed little-endian float32 embedding binary.

Binary layout:
    magic     8 bytes  b"ASSETVEC"
    version   u32 LE
    d_img     u32
    d_txt     u32
    n_assets  u32
    per asset: n_views u32, n_texts u32, offset u64 (bytes into payload)
    payload:  for each asset, n_views*d_img float32 then n_texts*d_txt float32

Every embedding vector must be unit-norm within 1e-6; enum fields must be
valid plan vocabulary. load_catalog re-validates all of it.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np

from ..planner.plans import PRIMARY_FUNCTIONS, SIZE_CLASSES

MAGIC = b"ASSETVEC"
VERSION = 1
_HEADER = struct.Struct("<8sIIII")
_ASSET_HEADER = struct.Struct("<IIQ")

NORM_TOLERANCE = 1e-6


class HeaderMismatchError(ValueError):
    pass


class NormViolationError(ValueError):
    def __init__(self, asset_id: str, slot: str):
        self.asset_id = asset_id
        self.slot = slot
        super().__init__(f"embedding {slot} of asset {asset_id} is not unit-norm")


class UnknownEnumError(ValueError):
    def __init__(self, asset_id: str, detail: str):
        self.asset_id = asset_id
        super().__init__(f"asset {asset_id}: {detail}")


class EmptyCatalogError(ValueError):
    pass


@dataclass(frozen=True)
class AssetRecord:
    asset_id: str
    function: str
    size_class: str
    floors: int
    footprint_dims_m: Tuple[float, float]
    style: str
    annotations: Tuple[str, ...]
    view_embeddings: np.ndarray  # (n_views, d_img) float32, unit rows
    text_embeddings: np.ndarray  # (n_texts, d_txt) float32, unit rows

    def validate(self) -> None:
        if self.function not in PRIMARY_FUNCTIONS:
            raise UnknownEnumError(self.asset_id, f"unknown function {self.function!r}")
        if self.size_class not in SIZE_CLASSES:
            raise UnknownEnumError(self.asset_id, f"unknown size_class {self.size_class!r}")
        w, d = self.footprint_dims_m
        if not (w > 0 and d > 0):
            raise UnknownEnumError(self.asset_id, f"footprint dims must be positive, got {w}x{d}")
        if len(self.annotations) != len(self.text_embeddings):
            raise HeaderMismatchError(
                f"asset {self.asset_id}: {len(self.annotations)} annotations vs "
                f"{len(self.text_embeddings)} text embeddings"
            )
        for name, vectors in (("view", self.view_embeddings), ("text", self.text_embeddings)):
            norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
            bad = np.flatnonzero(np.abs(norms - 1.0) > NORM_TOLERANCE)
            if bad.size:
                raise NormViolationError(self.asset_id, f"{name}[{int(bad[0])}]")


def write_catalog(records: List[AssetRecord], directory: Path) -> Tuple[Path, Path]:
    """Write catalog.json + embeddings.bin into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if not records:
        raise EmptyCatalogError("refusing to write an empty catalog")
    d_img = records[0].view_embeddings.shape[1]
    d_txt = records[0].text_embeddings.shape[1]

    payload = bytearray()
    asset_headers = bytearray()
    meta_assets = []
    for rec in records:
        rec.validate()
        offset = len(payload)
        payload += np.ascontiguousarray(rec.view_embeddings, dtype="<f4").tobytes()
        payload += np.ascontiguousarray(rec.text_embeddings, dtype="<f4").tobytes()
        asset_headers += _ASSET_HEADER.pack(
            rec.view_embeddings.shape[0], rec.text_embeddings.shape[0], offset
        )
        meta_assets.append(
            {
                "asset_id": rec.asset_id,
                "function": rec.function,
                "size_class": rec.size_class,
                "floors": rec.floors,
                "footprint_dims_m": list(rec.footprint_dims_m),
                "style": rec.style,
                "annotations": list(rec.annotations),
                "n_views": rec.view_embeddings.shape[0],
                "n_texts": rec.text_embeddings.shape[0],
            }
        )

    bin_path = directory / "embeddings.bin"
    with bin_path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, d_img, d_txt, len(records)))
        fh.write(bytes(asset_headers))
        fh.write(bytes(payload))

    meta_path = directory / "catalog.json"
    meta = {
        "version": VERSION,
        "d_img": d_img,
        "d_txt": d_txt,
        "embeddings_file": bin_path.name,
        "assets": meta_assets,
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return meta_path, bin_path


def load_catalog(path: Path) -> List[AssetRecord]:
    """Load and validate a catalog from its directory or catalog.json path."""
    path = Path(path)
    meta_path = path / "catalog.json" if path.is_dir() else path
    if not meta_path.exists():
        raise HeaderMismatchError(f"catalog metadata not found at {meta_path}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("version") != VERSION:
        raise HeaderMismatchError(f"unsupported catalog version {meta.get('version')!r}")
    blob = (meta_path.parent / meta["embeddings_file"]).read_bytes()

    if len(blob) < _HEADER.size:
        raise HeaderMismatchError("embedding binary shorter than its header")
    magic, version, d_img, d_txt, n_assets = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise HeaderMismatchError(f"bad magic {magic!r}")
    if version != VERSION:
        raise HeaderMismatchError(f"unsupported binary version {version}")
    if n_assets != len(meta["assets"]):
        raise HeaderMismatchError(
            f"binary holds {n_assets} assets but metadata lists {len(meta['assets'])}"
        )
    if d_img != meta["d_img"] or d_txt != meta["d_txt"]:
        raise HeaderMismatchError("embedding dimensions disagree between metadata and binary")

    table_start = _HEADER.size
    payload_start = table_start + n_assets * _ASSET_HEADER.size
    expected = payload_start
    headers = []
    for i in range(n_assets):
        n_views, n_texts, offset = _ASSET_HEADER.unpack_from(blob, table_start + i * _ASSET_HEADER.size)
        headers.append((n_views, n_texts, offset))
        expected += 4 * (n_views * d_img + n_texts * d_txt)
    if len(blob) != expected:
        raise HeaderMismatchError(f"embedding binary is {len(blob)} bytes, expected {expected}")

    records: List[AssetRecord] = []
    for entry, (n_views, n_texts, offset) in zip(meta["assets"], headers):
        if entry["n_views"] != n_views or entry["n_texts"] != n_texts:
            raise HeaderMismatchError(
                f"asset {entry['asset_id']}: slot counts disagree between metadata and binary"
            )
        start = payload_start + offset
        view_bytes = 4 * n_views * d_img
        views = np.frombuffer(blob, dtype="<f4", count=n_views * d_img, offset=start)
        texts = np.frombuffer(blob, dtype="<f4", count=n_texts * d_txt, offset=start + view_bytes)
        record = AssetRecord(
            asset_id=entry["asset_id"],
            function=entry["function"],
            size_class=entry["size_class"],
            floors=int(entry["floors"]),
            footprint_dims_m=tuple(entry["footprint_dims_m"]),
            style=entry["style"],
            annotations=tuple(entry["annotations"]),
            view_embeddings=views.reshape(n_views, d_img).copy(),
            text_embeddings=texts.reshape(n_texts, d_txt).copy(),
        )
        record.validate()
        records.append(record)
    return records
