"""JSON formats for theories, channels, partitions and programming instances."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import Channel, make_channel, min_tensor
from .core import StateSpace, StateSpaceError, make_state_space
from .lp import Tolerances
from .programming import ProgrammingInstance, make_instance
from .structure import Partition


class FormatError(ValueError):
    """Malformed input; the message names the offending field."""


def _matrix(obj, key, where):
    if key not in obj:
        raise FormatError(f"{where}: missing field '{key}'")
    try:
        arr = np.array(obj[key], dtype=float)
    except (TypeError, ValueError):
        raise FormatError(f"{where}: field '{key}' is not a numeric array")
    if not np.isfinite(arr).all():
        raise FormatError(f"{where}: field '{key}' has non-finite entries")
    return arr


def theory_to_dict(space: StateSpace) -> dict:
    return {"name": space.name, "dim": space.dim,
            "extreme_points": space.extreme_points.tolist(), "unit_effect": space.unit.tolist()}


def theory_from_dict(obj, tol: Tolerances = None, where: str = "theory") -> StateSpace:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    pts = _matrix(obj, "extreme_points", where)
    unit = _matrix(obj, "unit_effect", where)
    if pts.ndim != 2:
        raise FormatError(f"{where}: field 'extreme_points' must be a list of vectors")
    if "dim" in obj and obj["dim"] != unit.size:
        raise FormatError(f"{where}: field 'dim' is {obj['dim']} but 'unit_effect' has {unit.size} entries")
    try:
        return make_state_space(pts, unit, name=str(obj.get("name", "")), tol=tol)
    except StateSpaceError as exc:
        raise FormatError(f"{where}: field 'extreme_points': {exc}")


def channel_to_dict(c: Channel) -> dict:
    return {"source": c.source.name, "target": c.target.name, "matrix": c.matrix.tolist()}


def channel_from_dict(obj, source: StateSpace, target: StateSpace, tol: Tolerances = None,
                      where: str = "channel") -> Channel:
    L = _matrix(obj, "matrix", where)
    for key, space in (("source", source), ("target", target)):
        if key in obj and obj[key] != space.name:
            raise FormatError(f"{where}: field '{key}' names {obj[key]!r}, expected {space.name!r}")
    try:
        return make_channel(L, source, target, tol)
    except ValueError as exc:
        raise FormatError(f"{where}: field 'matrix': {exc}")


def partition_to_dict(p: Partition) -> dict:
    return {"space": p.space.name, "blocks": [list(b) for b in p.blocks]}


def partition_from_dict(obj, space: StateSpace) -> Partition:
    if "blocks" not in obj:
        raise FormatError("partition: missing field 'blocks'")
    try:
        return Partition(space, tuple(tuple(int(i) for i in b) for b in obj["blocks"]))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"partition: field 'blocks': {exc}")


def instance_to_dict(inst: ProgrammingInstance) -> dict:
    progs = []
    for p in inst.programs:
        progs.append({"state": p.state.tolist(), "apparatus_index": p.apparatus_index,
                      "dynamics": p.dynamics.matrix.tolist()})
    return {"system": theory_to_dict(inst.system), "apparatus": theory_to_dict(inst.apparatus),
            "total_channel": channel_to_dict(inst.total_channel), "programs": progs}


def instance_from_dict(obj, tol: Tolerances = None) -> ProgrammingInstance:
    if not isinstance(obj, dict):
        raise FormatError("instance: expected an object")
    for key in ("system", "apparatus", "total_channel", "programs"):
        if key not in obj:
            raise FormatError(f"instance: missing field '{key}'")
    system = theory_from_dict(obj["system"], tol, "instance.system")
    apparatus = theory_from_dict(obj["apparatus"], tol, "instance.apparatus")
    comp = min_tensor(system, apparatus).space
    total = channel_from_dict({"matrix": obj["total_channel"].get("matrix")}, comp, comp, tol,
                              "instance.total_channel")
    programs = []
    for k, p in enumerate(obj["programs"]):
        where = f"instance.programs[{k}]"
        if "state" in p:
            state = _matrix(p, "state", where)
        elif p.get("apparatus_index") is not None:
            state = apparatus.pure(int(p["apparatus_index"]))
        else:
            raise FormatError(f"{where}: needs 'state' or 'apparatus_index'")
        dyn = channel_from_dict({"matrix": p.get("dynamics")}, system, system, tol, f"{where}.dynamics")
        programs.append((state, dyn))
    try:
        return make_instance(system, apparatus, total, programs, tol, allow_mixed=True)
    except ValueError as exc:
        raise FormatError(f"instance: {exc}")


def dump(obj, path=None) -> str:
    text = json.dumps(obj, indent=1)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}")
