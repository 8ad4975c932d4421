"""Deterministic procedural layout backend.

Stands in for a learned generator so the whole pipeline runs offline. The
city pattern (road lattice, parcels, water/vegetation noise) is a pure
function of (seed, global pixel coordinate): tiles generated at different
origins of the same seed line up, which is what makes outpainting-style
expansion testable. Ratio conditions are honored by solving the lattice
period analytically and then iteratively nudging noise thresholds and
parcel fill against measured ratios.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..layout import DEFAULT_METERS_PER_PIXEL, GenerationCondition, SemanticLayout
from ..palette import (
    BUILDING,
    FOOTPATH,
    GROUND,
    N_CLASSES,
    RAIL,
    TRAFFIC_ROAD,
    VEGETATION,
    WATER,
)
from .backend import GeneratorBackend, KnownRegion

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_B = 0xBF58476D1CE4E5B9
_MIX_C = 0x94D049BB133111EB


def derive_seed(seed: int, label: str) -> int:
    """Stable 64-bit sub-seed from a master seed and a label."""
    digest = hashlib.sha256(f"{seed}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _mix64(h: np.ndarray) -> np.ndarray:
    h = h.astype(np.uint64, copy=True)
    h ^= h >> np.uint64(30)
    h *= np.uint64(_MIX_B)
    h ^= h >> np.uint64(27)
    h *= np.uint64(_MIX_C)
    h ^= h >> np.uint64(31)
    return h


def _hash01(ix: np.ndarray, iy: np.ndarray, salt: int) -> np.ndarray:
    """Uniform [0,1) hash of integer lattice coordinates."""
    ix = np.asarray(ix, dtype=np.int64).astype(np.uint64)
    iy = np.asarray(iy, dtype=np.int64).astype(np.uint64)
    h = ix * np.uint64(_GOLDEN) ^ iy * np.uint64(_MIX_B) ^ np.uint64(salt & _MASK64)
    return (_mix64(h) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def _hash01_scalar(salt: int, *parts: int) -> float:
    h = salt & _MASK64
    for i, p in enumerate(parts):
        h ^= ((p & _MASK64) * ((_GOLDEN + 2 * i + 1) & _MASK64)) & _MASK64
        h ^= h >> 30
        h = (h * _MIX_B) & _MASK64
        h ^= h >> 27
        h = (h * _MIX_C) & _MASK64
        h ^= h >> 31
    return (h >> 11) * (1.0 / (1 << 53))


def _value_noise(gx: np.ndarray, gy: np.ndarray, salt: int, scale: float) -> np.ndarray:
    """Smooth [0,1) lattice noise over global pixel coordinates (H, W)."""
    fx = gx / scale
    fy = gy / scale
    x0 = np.floor(fx).astype(np.int64)
    y0 = np.floor(fy).astype(np.int64)
    tx = fx - x0
    ty = fy - y0
    tx = tx * tx * (3.0 - 2.0 * tx)
    ty = ty * ty * (3.0 - 2.0 * ty)
    x0c = x0[None, :]
    y0c = y0[:, None]
    h00 = _hash01(x0c, y0c, salt)
    h10 = _hash01(x0c + 1, y0c, salt)
    h01 = _hash01(x0c, y0c + 1, salt)
    h11 = _hash01(x0c + 1, y0c + 1, salt)
    top = h00 + (h10 - h00) * tx[None, :]
    bot = h01 + (h11 - h01) * tx[None, :]
    return top + (bot - top) * ty[:, None]


# Parcel grid options per block and their hash-weight breakpoints.
_SUBDIVISIONS = ((1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3))
_SUBDIV_CUM = (0.20, 0.30, 0.40, 0.72, 0.81, 0.90, 1.0)

_SIDEWALK_PX = 3
_PARCEL_GAP_PX = 1
_NOISE_SCALE_PX = 192.0
_ROAD_WIDTH_PX = 10
_NARROW_ROAD_WIDTH_PX = 6
_FOOTPATH_WIDTH_PX = 4
_RAIL_WIDTH_PX = 6


@dataclass(frozen=True)
class _Pattern:
    period_x: int
    period_y: int
    phase_x: int
    phase_y: int
    road_width: int
    paint_roads: bool
    footpath_keep: float
    rail_period: int  # 0 disables rail
    rail_phase: int
    water_threshold: float  # >= 1.0 disables
    veg_threshold: float
    building_fill: float


class ProceduralBackend(GeneratorBackend):
    name = "procedural"
    supports_ratios = True
    supports_text = True
    supports_partial = True

    def __init__(self, ratio_iters: int = 8):
        self.ratio_iters = ratio_iters

    # -- pattern parameters ------------------------------------------------

    def _base_pattern(self, condition: GenerationCondition) -> _Pattern:
        seed = condition.seed
        if condition.text:
            seed = derive_seed(seed, f"text:{condition.text}")
        u = _hash01_scalar(derive_seed(seed, "lattice"), 1)
        period = 128 + int(u * 65)  # 128..192 px blocks
        phase_x = int(_hash01_scalar(derive_seed(seed, "phase_x"), 1) * period)
        phase_y = int(_hash01_scalar(derive_seed(seed, "phase_y"), 1) * period)
        rail_on = _hash01_scalar(derive_seed(seed, "rail"), 1) < 0.5
        rail_phase = int(_hash01_scalar(derive_seed(seed, "rail_phase"), 1) * 640)
        return _Pattern(
            period_x=period,
            period_y=period,
            phase_x=phase_x,
            phase_y=phase_y,
            road_width=_ROAD_WIDTH_PX,
            paint_roads=True,
            footpath_keep=1.0,
            rail_period=640 if rail_on else 0,
            rail_phase=rail_phase,
            water_threshold=0.80,
            veg_threshold=0.64,
            building_fill=0.62,
        )

    def _solve_conditioned(self, condition: GenerationCondition, pat: _Pattern) -> _Pattern:
        ratios = condition.ratios.ratios
        road = float(ratios[TRAFFIC_ROAD])
        if road <= 0.0:
            pat = replace(pat, paint_roads=False)
        else:
            width = _ROAD_WIDTH_PX if road >= 0.05 else _NARROW_ROAD_WIDTH_PX
            period = int(round(width / (1.0 - np.sqrt(max(1.0 - road, 1e-9)))))
            period = int(np.clip(period, 3 * width, 480))
            pat = replace(
                pat,
                road_width=width,
                period_x=period,
                period_y=period,
                phase_x=pat.phase_x % period,
                phase_y=pat.phase_y % period,
            )
        rail = float(ratios[RAIL])
        if rail <= 0.0:
            pat = replace(pat, rail_period=0)
        else:
            pat = replace(pat, rail_period=int(np.clip(round(_RAIL_WIDTH_PX / rail), 48, 20000)))
        if ratios[FOOTPATH] <= 0.0:
            pat = replace(pat, footpath_keep=0.0)
        else:
            approx = 2.0 * _FOOTPATH_WIDTH_PX / pat.period_x * 0.85
            pat = replace(pat, footpath_keep=float(np.clip(ratios[FOOTPATH] / max(approx, 1e-9), 0.0, 1.0)))
        if ratios[BUILDING] <= 0.0:
            pat = replace(pat, building_fill=0.0)
        if ratios[WATER] <= 0.0:
            pat = replace(pat, water_threshold=2.0)
        if ratios[VEGETATION] <= 0.0:
            pat = replace(pat, veg_threshold=2.0)
        return pat

    # -- painting ----------------------------------------------------------

    def _paint(
        self,
        seed: int,
        pat: _Pattern,
        width: int,
        height: int,
        ox: int,
        oy: int,
        noise_w: np.ndarray,
        noise_v: np.ndarray,
    ) -> np.ndarray:
        gx = np.arange(ox, ox + width, dtype=np.int64)
        gy = np.arange(oy, oy + height, dtype=np.int64)
        labels = np.full((height, width), GROUND, dtype=np.uint8)

        if pat.veg_threshold < 1.0:
            labels[noise_v > pat.veg_threshold] = VEGETATION
        if pat.water_threshold < 1.0:
            labels[noise_w > pat.water_threshold] = WATER

        px, py = pat.period_x, pat.period_y
        if pat.footpath_keep > 0.0:
            salt_f = derive_seed(seed, "footpath")
            for axis, g, phase, period in (("v", gx, pat.phase_x, px), ("h", gy, pat.phase_y, py)):
                shifted = g - phase - period // 2
                in_line = (shifted % period) < _FOOTPATH_WIDTH_PX
                line_idx = shifted // period
                keep = _hash01(line_idx, np.full_like(line_idx, 1 if axis == "v" else 2), salt_f)
                line = in_line & (keep < pat.footpath_keep)
                if axis == "v":
                    labels[:, line] = FOOTPATH
                else:
                    labels[line, :] = FOOTPATH

        if pat.paint_roads:
            road_v = ((gx - pat.phase_x) % px) < pat.road_width
            road_h = ((gy - pat.phase_y) % py) < pat.road_width
            labels[:, road_v] = TRAFFIC_ROAD
            labels[road_h, :] = TRAFFIC_ROAD

        if pat.rail_period > 0:
            rail_rows = ((gy - pat.rail_phase) % pat.rail_period) < _RAIL_WIDTH_PX
            labels[rail_rows, :] = RAIL

        if pat.building_fill > 0.0:
            self._paint_buildings(seed, pat, labels, ox, oy, noise_w)
        return labels

    def _paint_buildings(
        self, seed: int, pat: _Pattern, labels: np.ndarray, ox: int, oy: int, noise_w: np.ndarray
    ) -> None:
        height, width = labels.shape
        px, py = pat.period_x, pat.period_y
        salt_sub = derive_seed(seed, "subdivision")
        salt_occ = derive_seed(seed, "occupancy")
        salt_jit = derive_seed(seed, "jitter")
        k0 = (ox - pat.phase_x) // px - 1
        k1 = (ox + width - pat.phase_x) // px + 1
        l0 = (oy - pat.phase_y) // py - 1
        l1 = (oy + height - pat.phase_y) // py + 1
        road_w = pat.road_width if pat.paint_roads else 0
        for l in range(l0, l1 + 1):
            by0 = pat.phase_y + l * py + road_w + _SIDEWALK_PX
            by1 = pat.phase_y + (l + 1) * py - _SIDEWALK_PX
            if by1 <= by0:
                continue
            for k in range(k0, k1 + 1):
                bx0 = pat.phase_x + k * px + road_w + _SIDEWALK_PX
                bx1 = pat.phase_x + (k + 1) * px - _SIDEWALK_PX
                if bx1 <= bx0:
                    continue
                u_sub = _hash01_scalar(salt_sub, k, l)
                nx, ny = _SUBDIVISIONS[-1]
                for idx, cum in enumerate(_SUBDIV_CUM):
                    if u_sub < cum:
                        nx, ny = _SUBDIVISIONS[idx]
                        break
                for pi in range(nx):
                    for pj in range(ny):
                        if _hash01_scalar(salt_occ, k, l, pi, pj) >= pat.building_fill:
                            continue
                        # Siblings are separated by a single 1-px alley (pixel
                        # distance 2, so they register as Chebyshev-2 neighbors);
                        # block-facing sides get the setback plus jitter.
                        jit = [
                            int(_hash01_scalar(salt_jit, k, l, pi, pj, s) * 3.0) for s in range(4)
                        ]
                        cx0 = bx0 + (bx1 - bx0) * pi // nx
                        cx1 = bx0 + (bx1 - bx0) * (pi + 1) // nx
                        cy0 = by0 + (by1 - by0) * pj // ny
                        cy1 = by0 + (by1 - by0) * (pj + 1) // ny
                        cx0 += 1 if pi > 0 else _PARCEL_GAP_PX + jit[0]
                        cx1 -= 0 if pi < nx - 1 else _PARCEL_GAP_PX + jit[1]
                        cy0 += 1 if pj > 0 else _PARCEL_GAP_PX + jit[2]
                        cy1 -= 0 if pj < ny - 1 else _PARCEL_GAP_PX + jit[3]
                        if cx1 - cx0 < 4 or cy1 - cy0 < 4:
                            continue
                        # clip to this tile
                        tx0 = max(cx0 - ox, 0)
                        tx1 = min(cx1 - ox, labels.shape[1])
                        ty0 = max(cy0 - oy, 0)
                        ty1 = min(cy1 - oy, labels.shape[0])
                        if tx1 <= tx0 or ty1 <= ty0:
                            continue
                        if pat.water_threshold < 1.0:
                            mx = min(max((cx0 + cx1) // 2 - ox, 0), labels.shape[1] - 1)
                            my = min(max((cy0 + cy1) // 2 - oy, 0), labels.shape[0] - 1)
                            if noise_w[my, mx] > pat.water_threshold:
                                continue
                        labels[ty0:ty1, tx0:tx1] = BUILDING

    # -- backend entry point -------------------------------------------------

    def generate_tile(
        self,
        condition: GenerationCondition,
        width: int,
        height: int,
        known: Optional[KnownRegion] = None,
    ) -> SemanticLayout:
        ox, oy = known.origin if known is not None else (0, 0)
        seed = condition.seed
        if condition.text:
            seed = derive_seed(seed, f"text:{condition.text}")
        gx = np.arange(ox, ox + width, dtype=np.int64)
        gy = np.arange(oy, oy + height, dtype=np.int64)
        noise_w = _value_noise(gx, gy, derive_seed(seed, "water"), _NOISE_SCALE_PX)
        noise_v = _value_noise(gx, gy, derive_seed(seed, "veg"), _NOISE_SCALE_PX)

        pat = self._base_pattern(condition)
        if condition.ratios is None:
            labels = self._paint(seed, pat, width, height, ox, oy, noise_w, noise_v)
            return SemanticLayout(labels, DEFAULT_METERS_PER_PIXEL)

        pat = self._solve_conditioned(condition, pat)
        target = condition.ratios.ratios
        raw_water = float(target[WATER])
        raw_veg = float(target[VEGETATION])
        fill = 0.55 if target[BUILDING] > 0 else 0.0
        keep = pat.footpath_keep
        best_labels = None
        best_err = np.inf
        n_px = float(width * height)
        for _ in range(self.ratio_iters):
            if target[WATER] > 0.0:
                pat = replace(pat, water_threshold=float(np.quantile(noise_w, 1.0 - min(raw_water, 0.97))))
            if target[VEGETATION] > 0.0:
                pat = replace(pat, veg_threshold=float(np.quantile(noise_v, 1.0 - min(raw_veg, 0.97))))
            pat = replace(pat, building_fill=fill, footpath_keep=keep)
            labels = self._paint(seed, pat, width, height, ox, oy, noise_w, noise_v)
            achieved = np.bincount(labels.ravel(), minlength=N_CLASSES) / n_px
            err = float(np.abs(achieved - target).max())
            if err < best_err:
                best_err = err
                best_labels = labels
            if err < 0.005:
                break
            if target[WATER] > 0.0:
                raw_water = float(np.clip(raw_water + (target[WATER] - achieved[WATER]), 0.0, 0.97))
            if target[VEGETATION] > 0.0:
                raw_veg = float(np.clip(raw_veg + (target[VEGETATION] - achieved[VEGETATION]), 0.0, 0.97))
            if target[BUILDING] > 0.0:
                if achieved[BUILDING] <= 0.0:
                    fill = min(1.0, fill + 0.2)
                else:
                    fill = float(np.clip(fill * target[BUILDING] / achieved[BUILDING], 0.0, 1.0))
            if target[FOOTPATH] > 0.0 and achieved[FOOTPATH] > 0.0:
                keep = float(np.clip(keep * target[FOOTPATH] / achieved[FOOTPATH], 0.0, 1.0))
        return SemanticLayout(best_labels, DEFAULT_METERS_PER_PIXEL)
