"""Scene hosts: where objects get created.

``BlenderHost`` drives bpy and only imports inside Blender. ``StubHost``
implements the same contract in memory, storing transforms at float32 like
a real DCC scene graph, so transform read-back tests run anywhere.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

Vec3 = Tuple[float, float, float]


@dataclass
class HostObject:
    name: str
    kind: str
    position: Vec3
    rotation_z: float
    scale: float
    mesh_file: Optional[str] = None
    color: Optional[Tuple[float, float, float, float]] = None


def _f32(value: float) -> float:
    return struct.unpack("<f", struct.pack("<f", value))[0]


class StubHost:
    """In-memory host with float32 transform storage."""

    def __init__(self):
        self.objects: Dict[str, HostObject] = {}

    def add_object(
        self,
        name: str,
        kind: str,
        position: Vec3,
        rotation_z: float,
        scale: float,
        mesh_file: Optional[str] = None,
        dimensions: Optional[Vec3] = None,
    ) -> str:
        if name in self.objects:
            raise ValueError(f"duplicate object name {name!r}")
        self.objects[name] = HostObject(
            name=name,
            kind=kind,
            position=tuple(_f32(v) for v in position),
            rotation_z=_f32(rotation_z),
            scale=_f32(scale),
            mesh_file=mesh_file,
        )
        return name

    def set_color(self, name: str, rgba: Tuple[float, float, float, float]) -> None:
        self.objects[name].color = rgba

    def get_transform(self, name: str) -> Tuple[Vec3, float, float]:
        obj = self.objects[name]
        return obj.position, obj.rotation_z, obj.scale

    def object_count(self) -> int:
        return len(self.objects)

    def scene_bounds(self) -> Tuple[Vec3, Vec3]:
        if not self.objects:
            return (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)
        xs = [o.position[0] for o in self.objects.values()]
        ys = [o.position[1] for o in self.objects.values()]
        zs = [o.position[2] for o in self.objects.values()]
        return (min(xs), min(ys), min(zs)), (max(xs), max(ys), max(zs))


class BlenderHost:
    """bpy-backed host; constructable only inside a Blender interpreter."""

    def __init__(self):
        import bpy  # noqa: F401  (resolved by Blender's bundled interpreter)

        self._bpy = bpy

    def _link(self, obj) -> None:
        self._bpy.context.scene.collection.objects.link(obj)

    def add_object(
        self,
        name: str,
        kind: str,
        position: Vec3,
        rotation_z: float,
        scale: float,
        mesh_file: Optional[str] = None,
        dimensions: Optional[Vec3] = None,
    ) -> str:
        bpy = self._bpy
        if mesh_file:
            before = set(bpy.data.objects)
            bpy.ops.wm.obj_import(filepath=mesh_file)
            imported = [o for o in bpy.data.objects if o not in before]
            obj = imported[0]
            obj.name = name
        else:
            dims = dimensions or (1.0, 1.0, 1.0)
            mesh = bpy.data.meshes.new(name + "_mesh")
            half = [d / 2.0 for d in dims]
            verts = [
                (sx * half[0], sy * half[1], sz * half[2] + half[2])
                for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)
            ]
            faces = [
                (0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1),
                (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3),
            ]
            mesh.from_pydata(verts, [], faces)
            obj = bpy.data.objects.new(name, mesh)
            self._link(obj)
        obj.location = position
        obj.rotation_euler = (0.0, 0.0, rotation_z)
        obj.scale = (scale, scale, scale)
        return name

    def set_color(self, name: str, rgba) -> None:
        obj = self._bpy.data.objects[name]
        obj.color = rgba

    def get_transform(self, name: str):
        obj = self._bpy.data.objects[name]
        return tuple(obj.location), float(obj.rotation_euler[2]), float(obj.scale[0])

    def object_count(self) -> int:
        return len(self._bpy.context.scene.collection.objects)

    def scene_bounds(self):
        objs = self._bpy.context.scene.collection.objects
        if not objs:
            return (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)
        xs = [o.location[0] for o in objs]
        ys = [o.location[1] for o in objs]
        zs = [o.location[2] for o in objs]
        return (min(xs), min(ys), min(zs)), (max(xs), max(ys), max(zs))


def make_host(name: str):
    if name == "stub":
        return StubHost()
    if name == "blender":
        return BlenderHost()
    raise ValueError(f"unknown host {name!r} (use 'stub' or 'blender')")
