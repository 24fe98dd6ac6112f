"""Scenario model: node field, UAV and transfer parameters, generation, IO.

A scenario bundles the sensor nodes (positions plus battery state: current
e_b, capacity e_u, demanded top-up e_d), the UAV and transfer-coefficient
parameters, the beam half-angle and the base location. Random scenarios are
generated from a seed with uniform node placement in a box region and
uniform battery draws, demands clamped so e_b + e_d never exceeds capacity.

The JSON format:

    {"nodes": [{"pos": [x, y, z], "e_B": .., "e_U": .., "e_D": ..}, ...],
     "uav": {"p0": .., "v_bar": .., "p_fly": .., "p_hov": .., "e_b0": .., "e_u0": ..},
     "wpt": {"delta": .., "alpha": .., "beta": .., "range": .., "c_max": ..,
             "half_angle": ..},
     "base": [x, y, z], "seed": ..}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energy import RotorParams, UavParams, WptParams
from .geometry import ConeParams


@dataclass
class Scenario:
    positions: np.ndarray
    e_b: np.ndarray
    e_u: np.ndarray
    e_d: np.ndarray
    uav: UavParams
    wpt: WptParams
    half_angle: float
    base: np.ndarray
    seed: int | None = None

    @property
    def n(self) -> int:
        return int(self.positions.shape[0])

    @property
    def cone(self) -> ConeParams:
        return ConeParams(half_angle=self.half_angle, range=self.wpt.range)


@dataclass(frozen=True)
class ScenarioParams:
    """Defaults for random scenarios.

    hover_ratio is p_hov / p_fly; p_fly itself defaults to a nominal
    rotary-wing cruise draw. p_alias is an auxiliary transmit-power figure
    carried along for completeness; the planner never reads it.
    """

    n: int = 50
    region: tuple[float, float, float] = (40.0, 40.0, 10.0)
    e_b_range: tuple[float, float] = (20.0, 90.0)
    e_d_range: tuple[float, float] = (20.0, 90.0)
    e_u: float = 90.0
    apex_angle: float = math.pi / 3
    d_max: float = 6.0
    delta: float = 12.0
    alpha: float = 2.0
    beta: float = 4.0
    c_max: float = 0.9
    p0: float = 1.0
    v_bar: float = 1.0
    p_fly: float = 160.0
    hover_ratio: float = 1.0
    p_alias: float = 8.0
    e_b0: float = 1e9
    base: tuple[float, float, float] = (0.0, 0.0, 0.0)


DESK_PRESET = ScenarioParams()
FIELD_PRESET = ScenarioParams(n=400, region=(100.0, 100.0, 20.0))

PRESETS = {"desk": DESK_PRESET, "field": FIELD_PRESET}


def generate_scenario(seed: int, params: ScenarioParams = DESK_PRESET) -> Scenario:
    """Draw a random scenario; identical (seed, params) give identical fields."""
    if params.n < 1:
        raise ValueError("need at least one node")
    region = np.asarray(params.region, dtype=float)
    if np.any(region <= 0):
        raise ValueError("region dimensions must be positive")
    rng = np.random.default_rng(seed)
    positions = rng.uniform(0.0, 1.0, size=(params.n, 3)) * region[None, :]
    e_b = rng.uniform(*params.e_b_range, size=params.n)
    e_d = rng.uniform(*params.e_d_range, size=params.n)
    e_u = np.full(params.n, params.e_u)
    e_d = np.minimum(e_d, e_u - e_b)
    uav = UavParams(p0=params.p0, v_bar=params.v_bar,
                    e_b0=params.e_b0, e_u0=params.e_b0,
                    p_fly=params.p_fly,
                    p_hov=params.hover_ratio * params.p_fly)
    wpt = WptParams(delta=params.delta, alpha=params.alpha, beta=params.beta,
                    range=params.d_max, c_max=params.c_max)
    return Scenario(positions=positions, e_b=e_b, e_u=e_u, e_d=e_d,
                    uav=uav, wpt=wpt, half_angle=params.apex_angle / 2.0,
                    base=np.asarray(params.base, dtype=float), seed=seed)


def scenario_to_dict(sc: Scenario) -> dict:
    uav: dict = {"p0": sc.uav.p0, "v_bar": sc.uav.v_bar,
                 "e_b0": sc.uav.e_b0, "e_u0": sc.uav.e_u0}
    if sc.uav.p_fly is not None:
        uav["p_fly"] = sc.uav.p_fly
    if sc.uav.p_hov is not None:
        uav["p_hov"] = sc.uav.p_hov
    if sc.uav.rotor is not None:
        r = sc.uav.rotor
        uav["rotor"] = {"p_b": r.p_b, "p_i": r.p_i, "u_tip": r.u_tip, "v0": r.v0,
                        "d0": r.d0, "rho": r.rho, "s": r.s, "a": r.a}
    out = {
        "nodes": [
            {"pos": [float(c) for c in sc.positions[j]],
             "e_B": float(sc.e_b[j]), "e_U": float(sc.e_u[j]),
             "e_D": float(sc.e_d[j])}
            for j in range(sc.n)
        ],
        "uav": uav,
        "wpt": {"delta": sc.wpt.delta, "alpha": sc.wpt.alpha, "beta": sc.wpt.beta,
                "range": sc.wpt.range, "c_max": sc.wpt.c_max,
                "half_angle": sc.half_angle},
        "base": [float(c) for c in sc.base],
    }
    if sc.seed is not None:
        out["seed"] = int(sc.seed)
    return out


def scenario_from_dict(d: dict) -> Scenario:
    nodes = d["nodes"]
    positions = np.array([n["pos"] for n in nodes], dtype=float)
    e_b = np.array([n["e_B"] for n in nodes], dtype=float)
    e_u = np.array([n["e_U"] for n in nodes], dtype=float)
    e_d = np.array([n["e_D"] for n in nodes], dtype=float)
    u = d["uav"]
    rotor = None
    if "rotor" in u:
        rotor = RotorParams(**u["rotor"])
    uav = UavParams(p0=float(u["p0"]), v_bar=float(u["v_bar"]),
                    e_b0=float(u.get("e_b0", 1e9)), e_u0=float(u.get("e_u0", 1e9)),
                    rotor=rotor,
                    p_fly=float(u["p_fly"]) if "p_fly" in u else None,
                    p_hov=float(u["p_hov"]) if "p_hov" in u else None)
    w = d["wpt"]
    wpt = WptParams(delta=float(w["delta"]), alpha=float(w["alpha"]),
                    beta=float(w["beta"]), range=float(w["range"]),
                    c_max=float(w["c_max"]))
    return Scenario(positions=positions, e_b=e_b, e_u=e_u, e_d=e_d,
                    uav=uav, wpt=wpt, half_angle=float(w["half_angle"]),
                    base=np.asarray(d["base"], dtype=float),
                    seed=d.get("seed"))


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), sort_keys=True, indent=1) + "\n")


def load_scenario(path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))
