"""Executable tour schedules and their JSON wire format.

A schedule is an ordered list of items the UAV executes from the base: fly
items (state 1) carry the target point and the leg duration; charge items
(state 0) carry the beam direction and the dwell time. The JSON form is

    {"items": [{"state": 1, "x": [..], "t": ..} | {"state": 0, "t": .., "v": [..]}],
     "tour": [position ids in visit order],
     "report": {energy bookkeeping}}

Serialization is deterministic (sorted keys, repr-exact floats), so equal
schedules produce byte-identical files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FLY = 1
CHARGE = 0


@dataclass
class ScheduleItem:
    """One fly or charge step. Fly items set x (target); charge items set v
    (unit beam direction). t is the step duration in seconds."""

    state: int
    t: float
    x: np.ndarray | None = None
    v: np.ndarray | None = None

    def as_dict(self) -> dict:
        out: dict = {"state": int(self.state), "t": float(self.t)}
        if self.x is not None:
            out["x"] = [float(c) for c in self.x]
        if self.v is not None:
            out["v"] = [float(c) for c in self.v]
        return out

    @staticmethod
    def from_dict(d: dict) -> "ScheduleItem":
        return ScheduleItem(
            state=int(d["state"]),
            t=float(d["t"]),
            x=np.asarray(d["x"], dtype=float) if "x" in d else None,
            v=np.asarray(d["v"], dtype=float) if "v" in d else None,
        )


@dataclass
class Schedule:
    """Ordered fly/charge items plus the visited position ids."""

    items: list[ScheduleItem] = field(default_factory=list)
    tour: list[int] = field(default_factory=list)

    @property
    def timespan(self) -> float:
        return float(sum(item.t for item in self.items))

    def as_dict(self, report=None) -> dict:
        out = {"items": [it.as_dict() for it in self.items],
               "tour": [int(i) for i in self.tour]}
        if report is not None:
            out["report"] = report.as_dict()
        return out

    @staticmethod
    def from_dict(d: dict) -> "Schedule":
        return Schedule(items=[ScheduleItem.from_dict(it) for it in d["items"]],
                        tour=[int(i) for i in d.get("tour", [])])


def dumps_schedule(schedule: Schedule, report=None) -> str:
    return json.dumps(schedule.as_dict(report), sort_keys=True, indent=1)


def save_schedule(schedule: Schedule, path, report=None) -> None:
    Path(path).write_text(dumps_schedule(schedule, report) + "\n")


def load_schedule(path) -> Schedule:
    return Schedule.from_dict(json.loads(Path(path).read_text()))
