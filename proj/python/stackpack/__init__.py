"""Top-down packing planner for irregular rigid items."""

import json

from ._stackpack import (
    Container,
    DegeneracyError,
    FormatError,
    NoGraspError,
    RigidTransform,
    SearchConfig,
    TriangleMesh,
    ValidationError,
    export_scene,
    generate_test_item,
    is_stable,
    load_mesh,
    make_box,
    object_heightmaps,
    stable_orientations,
    write_obj,
)
from . import _stackpack


def pack(meshes, containers, config=None, sequence=(), masses=()):
    """Plan an order. Returns (exit_code, plan dict)."""
    code, text = _stackpack.pack(meshes, containers, config or SearchConfig(), list(sequence), list(masses))
    return code, json.loads(text)


def validate_plan(plan, meshes, masses=()):
    """Replay a plan given as a dict or JSON string. Returns the report dict."""
    text = plan if isinstance(plan, str) else json.dumps(plan)
    return json.loads(_stackpack.validate_plan(text, meshes, list(masses)))


__all__ = [
    "Container",
    "DegeneracyError",
    "FormatError",
    "NoGraspError",
    "RigidTransform",
    "SearchConfig",
    "TriangleMesh",
    "ValidationError",
    "export_scene",
    "generate_test_item",
    "is_stable",
    "load_mesh",
    "make_box",
    "object_heightmaps",
    "pack",
    "stable_orientations",
    "validate_plan",
    "write_obj",
]
