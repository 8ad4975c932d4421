"""Fit asset footprints onto instance masks by maximizing pixel IoU.

The footprint is a rectangle (from catalog metadata) under uniform scale,
rotation, and translation; the objective is 1 - IoU between the rectangle's
pixel-center rasterization and the instance mask. The IoU landscape is
multi-modal in rotation, so Powell runs from four rotation starts seeded by
the mask's principal axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .. import _kernels
from ..instances import Instance, InstanceId
from .powell import powell_minimize

SCALE_BOUNDS = (0.3, 3.0)


class DegenerateFootprintError(ValueError):
    pass


def wrap_rotation(theta: float) -> float:
    """Wrap into (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def canonical_rotation(theta: float) -> float:
    """Wrap into (-pi/2, pi/2] (rectangles are symmetric under half turns)."""
    wrapped = math.fmod(theta + math.pi / 2.0, math.pi)
    if wrapped <= 0.0:
        wrapped += math.pi
    return wrapped - math.pi / 2.0


@dataclass(frozen=True)
class PlacementParams:
    scale: float
    rotation: float  # radians, CCW in the world frame (x east, y north)
    tx: float = 0.0  # meters east of the instance centroid
    ty: float = 0.0  # meters north of the instance centroid

    def __post_init__(self) -> None:
        if not SCALE_BOUNDS[0] <= self.scale <= SCALE_BOUNDS[1]:
            raise ValueError(f"scale {self.scale} outside bounds {SCALE_BOUNDS}")
        object.__setattr__(self, "rotation", wrap_rotation(self.rotation))


@dataclass(frozen=True)
class Placement:
    instance: InstanceId
    asset_id: str
    params: PlacementParams
    iou: float
    converged: bool


@dataclass(frozen=True)
class InstanceMask:
    """Boolean window over an instance's bbox plus its global offset."""

    window: np.ndarray  # bool (h, w)
    row0: int
    col0: int
    count: int
    centroid_px: Tuple[float, float]  # (x=col, y=row) in global pixel coords

    @staticmethod
    def from_instance(instance: Instance) -> "InstanceMask":
        rows, cols = instance.rows_cols()
        r0, c0 = int(rows.min()), int(cols.min())
        window = np.zeros((int(rows.max()) - r0 + 1, int(cols.max()) - c0 + 1), dtype=bool)
        window[rows - r0, cols - c0] = True
        centroid = (float(cols.mean()) + 0.5, float(rows.mean()) + 0.5)
        return InstanceMask(window, r0, c0, instance.pixel_count, centroid)

    def principal_axis(self) -> float:
        """Orientation of the mask's major axis in the world frame, radians."""
        rows, cols = np.nonzero(self.window)
        x = cols.astype(np.float64)
        y = -rows.astype(np.float64)  # world y runs north (up), rows run south
        x -= x.mean()
        y -= y.mean()
        mxx = float((x * x).mean())
        myy = float((y * y).mean())
        mxy = float((x * y).mean())
        return 0.5 * math.atan2(2.0 * mxy, mxx - myy)


def footprint_iou(
    mask: InstanceMask,
    footprint_dims_m: Tuple[float, float],
    params: PlacementParams,
    meters_per_pixel: float,
) -> float:
    """IoU between the transformed rectangle's pixel set and the mask."""
    if mask.count == 0:
        raise ValueError("instance mask is empty")
    w_m, d_m = footprint_dims_m
    if w_m <= 0 or d_m <= 0:
        raise ValueError("footprint dims must be positive")
    half_w = params.scale * w_m / 2.0 / meters_per_pixel
    half_d = params.scale * d_m / 2.0 / meters_per_pixel
    center_x = mask.centroid_px[0] + params.tx / meters_per_pixel
    center_y = mask.centroid_px[1] - params.ty / meters_per_pixel
    # World rotation is CCW with y north; raster y runs south, so the raster
    # angle is the negation.
    cos_a = math.cos(-params.rotation)
    sin_a = math.sin(-params.rotation)
    inter, rect_total = _kernels.rect_overlap(
        mask.window, mask.row0, mask.col0, center_x, center_y, half_w, half_d, cos_a, sin_a
    )
    if rect_total == 0:
        raise DegenerateFootprintError(
            f"footprint at scale {params.scale:.3f} covers no pixel centers"
        )
    return inter / float(mask.count + rect_total - inter)


@dataclass(frozen=True)
class PlacementConfig:
    ftol: float = 1e-6
    xtol: float = 1e-4
    max_iters: int = 200
    rotation_starts: Tuple[float, ...] = (0.0, math.pi / 4.0, math.pi / 2.0, 3.0 * math.pi / 4.0)
    iou_converged: float = 0.5


def place_asset(
    mask: InstanceMask,
    asset_id: str,
    footprint_dims_m: Tuple[float, float],
    instance: InstanceId,
    meters_per_pixel: float,
    config: PlacementConfig = PlacementConfig(),
) -> Placement:
    """Best placement of the footprint over the mask (multi-start Powell)."""
    w_m, d_m = footprint_dims_m
    mask_area_m2 = mask.count * meters_per_pixel * meters_per_pixel
    scale0 = float(np.clip(math.sqrt(mask_area_m2 / (w_m * d_m)), *SCALE_BOUNDS))
    axis = mask.principal_axis()

    lo, hi = SCALE_BOUNDS

    def objective(v: np.ndarray) -> float:
        scale = float(np.clip(v[0], lo, hi))
        penalty = (v[0] - scale) ** 2
        params = PlacementParams(scale, v[1], v[2], v[3])
        try:
            iou = footprint_iou(mask, footprint_dims_m, params, meters_per_pixel)
        except DegenerateFootprintError:
            return 2.0 + penalty
        return 1.0 - iou + penalty

    steps = [0.08, 0.15, 2.0 * meters_per_pixel, 2.0 * meters_per_pixel]
    best: Optional[np.ndarray] = None
    best_f = math.inf
    for offset in config.rotation_starts:
        start = np.array([scale0, axis + offset, 0.0, 0.0])
        result = powell_minimize(
            objective, start, ftol=config.ftol, xtol=config.xtol,
            max_iters=config.max_iters, steps=steps,
        )
        if result.fval < best_f:
            best_f = result.fval
            best = result.x

    params = PlacementParams(
        scale=float(np.clip(best[0], lo, hi)),
        rotation=canonical_rotation(float(best[1])),
        tx=float(best[2]),
        ty=float(best[3]),
    )
    iou = footprint_iou(mask, footprint_dims_m, params, meters_per_pixel)
    return Placement(
        instance=instance,
        asset_id=asset_id,
        params=params,
        iou=iou,
        converged=iou >= config.iou_converged,
    )


# -- collision resolution ------------------------------------------------------

_COLLISION_SHARE = 0.05
_SHRINK_FACTOR = 0.95


def _rect_pixels(
    mask: InstanceMask, footprint_dims_m: Tuple[float, float], params: PlacementParams, mpp: float
) -> np.ndarray:
    """Flat (row << 32 | col) keys of the rectangle's pixel centers."""
    half_w = params.scale * footprint_dims_m[0] / 2.0 / mpp
    half_d = params.scale * footprint_dims_m[1] / 2.0 / mpp
    cx = mask.centroid_px[0] + params.tx / mpp
    cy = mask.centroid_px[1] - params.ty / mpp
    ca, sa = math.cos(-params.rotation), math.sin(-params.rotation)
    ex = half_w * abs(ca) + half_d * abs(sa)
    ey = half_w * abs(sa) + half_d * abs(ca)
    cols = np.arange(int(math.floor(cx - ex - 0.5)), int(math.ceil(cx + ex - 0.5)) + 1)
    rows = np.arange(int(math.floor(cy - ey - 0.5)), int(math.ceil(cy + ey - 0.5)) + 1)
    dx = cols + 0.5 - cx
    dy = rows + 0.5 - cy
    u = dx[None, :] * ca + dy[:, None] * sa
    v = -(dx[None, :] * sa) + dy[:, None] * ca
    inside = (np.abs(u) <= half_w) & (np.abs(v) <= half_d)
    rr, cc = np.nonzero(inside)
    return (rows[rr].astype(np.int64) << 32) | (cols[cc].astype(np.int64) & 0xFFFFFFFF)


@dataclass(frozen=True)
class CollisionEvent:
    instance: InstanceId
    against: InstanceId
    final_scale: float
    resolved: bool


def resolve_collisions(
    placements: Sequence[Placement],
    masks: Dict[InstanceId, InstanceMask],
    footprints: Dict[str, Tuple[float, float]],
    meters_per_pixel: float,
) -> Tuple[List[Placement], List[CollisionEvent]]:
    """Shrink later placements until footprint overlaps drop to <= 5% of the
    smaller footprint. Deterministic: ascending instance id order."""
    ordered = sorted(placements, key=lambda p: p.instance)
    committed: List[Placement] = []
    committed_pixels: List[np.ndarray] = []
    events: List[CollisionEvent] = []
    for placement in ordered:
        mask = masks[placement.instance]
        dims = footprints[placement.asset_id]
        params = placement.params
        pixels = _rect_pixels(mask, dims, params, meters_per_pixel)
        last_offender: Optional[InstanceId] = None
        resolved = True
        while True:
            worst = 0.0
            offender: Optional[InstanceId] = None
            for other, other_pixels in zip(committed, committed_pixels):
                smaller = min(len(pixels), len(other_pixels))
                if smaller == 0:
                    continue
                shared = len(np.intersect1d(pixels, other_pixels, assume_unique=True))
                if shared / smaller > worst:
                    worst = shared / smaller
                    offender = other.instance
            if worst <= _COLLISION_SHARE:
                break
            if params.scale * _SHRINK_FACTOR < SCALE_BOUNDS[0]:
                last_offender = offender
                resolved = False
                break
            params = replace(params, scale=params.scale * _SHRINK_FACTOR)
            pixels = _rect_pixels(mask, dims, params, meters_per_pixel)
            last_offender = offender
        if last_offender is not None:
            if params is not placement.params:
                iou = footprint_iou(mask, dims, params, meters_per_pixel)
                placement = replace(
                    placement,
                    params=params,
                    iou=iou,
                    converged=iou >= PlacementConfig().iou_converged,
                )
            events.append(
                CollisionEvent(placement.instance, last_offender, params.scale, resolved)
            )
        committed.append(placement)
        committed_pixels.append(pixels)
    return committed, events
