"""Deterministic hash-based pseudo-embedder.

Produces unit vectors from strings without running any neural model: a
SHA-256 of (space, text) seeds a Gaussian draw which is then normalized.
Like texts map to identical vectors; the image and text spaces are salted
apart. A real CLIP/SBERT adapter can replace this behind the same call
shape.
"""
from __future__ import annotations

import hashlib

import numpy as np

IMAGE_SPACE = "image"
TEXT_SPACE = "text"


def unit_f32(v: np.ndarray) -> np.ndarray:
    """Normalize to unit length, returned as float32 with norm within 1e-6 of 1."""
    v = np.asarray(v, dtype=np.float64)
    u = (v / np.linalg.norm(v)).astype(np.float32)
    norm = np.linalg.norm(u.astype(np.float64))
    return (u.astype(np.float64) / norm).astype(np.float32)


def pseudo_embed(text: str, dim: int, space: str) -> np.ndarray:
    seed_bytes = hashlib.sha256(f"{space}|{text}".encode()).digest()
    rng = np.random.default_rng(int.from_bytes(seed_bytes[:8], "little"))
    return unit_f32(rng.standard_normal(dim))


def plan_aspects(primary_function: str, size_class: str, style: str) -> list[str]:
    """Aspect strings shared by catalog annotations and plan queries."""
    return [
        f"function: {primary_function}",
        f"size: {size_class}",
        f"style: {style}",
    ]


def plan_view_text(primary_function: str, size_class: str, style: str) -> str:
    return f"render of a {style} {size_class} {primary_function} building"
