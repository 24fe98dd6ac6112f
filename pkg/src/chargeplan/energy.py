"""UAV power, wireless-transfer coefficients, and schedule energy accounting.

Flight and hover power come either from explicit overrides or from the
standard rotary-wing power curve

    p(v) = p_b (1 + 3 v^2 / u_tip^2)
         + p_i (sqrt(1 + v^4 / (4 v0^4)) - v^2 / (2 v0^2))^(1/2)
         + 0.5 d0 rho s a v^3

(blade profile + induced + parasite terms). Received power at a covered
node is p0 * c with the distance-decay coefficient

    c = min(delta / (alpha + d)^beta, c_max)

valid only inside the beam cone; outside it the coefficient is zero. A node
sitting exactly at the transmitter position ("apex node") is charged at the
d = 0 coefficient regardless of beam direction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .directions import APEX_EPS, PosDirPair
from .geometry import ANGLE_TOL, angle_between


@dataclass(frozen=True)
class RotorParams:
    """Coefficients of the rotary-wing power curve.

    p_b, p_i: blade-profile and induced power in hover (W); u_tip: rotor tip
    speed (m/s); v0: mean induced velocity in hover (m/s); d0: fuselage drag
    ratio; rho: air density (kg/m^3); s: rotor solidity; a: disc area (m^2).
    """

    p_b: float = 79.86
    p_i: float = 88.63
    u_tip: float = 120.0
    v0: float = 4.03
    d0: float = 0.6
    rho: float = 1.225
    s: float = 0.05
    a: float = 0.503


def uav_power(v: float, rotor: RotorParams) -> float:
    """Rotor power draw (W) at horizontal speed v (m/s)."""
    if rotor is None:
        raise ValueError("rotor parameters required when no power override is set")
    if v < 0:
        raise ValueError("speed must be non-negative")
    blade = rotor.p_b * (1.0 + 3.0 * v * v / (rotor.u_tip ** 2))
    induced = rotor.p_i * math.sqrt(
        math.sqrt(1.0 + v ** 4 / (4.0 * rotor.v0 ** 4)) - v * v / (2.0 * rotor.v0 ** 2))
    parasite = 0.5 * rotor.d0 * rotor.rho * rotor.s * rotor.a * v ** 3
    return blade + induced + parasite


@dataclass(frozen=True)
class UavParams:
    """UAV traits: transmit power p0 (W), cruise speed v_bar (m/s), battery
    (e_b0 initial / e_u0 capacity, J), and flight/hover power resolution.

    Explicit p_fly/p_hov overrides win; otherwise the rotor curve supplies
    them at v_bar and 0. At least one source must resolve each value.
    """

    p0: float
    v_bar: float
    e_b0: float = 1e9
    e_u0: float = 1e9
    rotor: RotorParams | None = None
    p_fly: float | None = None
    p_hov: float | None = None

    def __post_init__(self):
        if self.p0 <= 0 or self.v_bar <= 0:
            raise ValueError("p0 and v_bar must be positive")
        fly, hov = self.fly_power, self.hover_power
        if not (hov > 0 and fly > 0):
            raise ValueError("flight and hover power must be positive")
        # explicit overrides must be ordered; the rotor curve may dip below
        # hover power at low cruise speed (induced-power bucket), which is fine
        if self.p_fly is not None and self.p_hov is not None and self.p_fly < self.p_hov:
            raise ValueError(f"flight power {fly} below hover power {hov}")

    @property
    def fly_power(self) -> float:
        if self.p_fly is not None:
            return self.p_fly
        return uav_power(self.v_bar, self.rotor)

    @property
    def hover_power(self) -> float:
        if self.p_hov is not None:
            return self.p_hov
        return uav_power(0.0, self.rotor)


@dataclass(frozen=True)
class WptParams:
    """Transfer-coefficient model: c = min(delta/(alpha+d)^beta, c_max) inside
    the beam, zero outside; range is the radial reach D (m)."""

    delta: float
    alpha: float
    beta: float
    range: float
    c_max: float

    def __post_init__(self):
        if self.delta <= 0 or self.alpha <= 0 or self.beta <= 0:
            raise ValueError("delta, alpha, beta must be positive")
        if self.range <= 0:
            raise ValueError("range must be positive")
        if not 0 < self.c_max <= 1:
            raise ValueError("c_max must be in (0, 1]")


def apex_coefficient(wpt: WptParams) -> float:
    """Transfer coefficient for a node at the transmitter position."""
    return min(wpt.delta / wpt.alpha ** wpt.beta, wpt.c_max)


def transfer_coefficient(pair_dir, node_dir, distance: float, wpt: WptParams,
                         half_angle: float, *, tol: float = ANGLE_TOL) -> float:
    """Received-power fraction for a node at ``distance`` along ``node_dir``.

    Zero outside the reach or outside the beam half-angle (with boundary
    slack ``tol``); otherwise the capped distance-decay value.
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if distance > wpt.range:
        return 0.0
    if angle_between(pair_dir, node_dir) > half_angle + tol:
        return 0.0
    return min(wpt.delta / (wpt.alpha + distance) ** wpt.beta, wpt.c_max)


def build_transfer_matrix(pairs: list[PosDirPair], node_positions: np.ndarray,
                          wpt: WptParams) -> np.ndarray:
    """Dense (pairs x nodes) matrix of transfer coefficients.

    Entry (i, j) is positive exactly when node j belongs to pair i's covered
    set; the coefficient depends only on the node-to-position distance, with
    apex nodes at the d = 0 value.
    """
    nodes = np.asarray(node_positions, dtype=float)
    c = np.zeros((len(pairs), nodes.shape[0]))
    for i, pair in enumerate(pairs):
        for j in sorted(pair.covered):
            d = float(np.linalg.norm(nodes[j] - pair.position))
            if d < APEX_EPS:
                c[i, j] = apex_coefficient(wpt)
            else:
                c[i, j] = min(wpt.delta / (wpt.alpha + d) ** wpt.beta, wpt.c_max)
    return c


@dataclass
class EnergyReport:
    """Energy bookkeeping of one executed schedule (all energies in J,
    times in s). e_f is the per-node final energy vector; e_f0 the UAV's
    remaining energy, negative when the mission overruns the battery."""

    e_fly: float
    e_hov: float
    e_chrg: float
    e_rcv: float
    e_loss_total: float
    e_loss_wpt_hov: float
    t_fly: float
    t_chrg: float
    timespan: float
    e_f: np.ndarray
    e_f0: float
    uav_energy_infeasible: bool

    def as_dict(self) -> dict:
        return {
            "e_fly": float(self.e_fly),
            "e_hov": float(self.e_hov),
            "e_chrg": float(self.e_chrg),
            "e_rcv": float(self.e_rcv),
            "e_loss_total": float(self.e_loss_total),
            "e_loss_wpt_hov": float(self.e_loss_wpt_hov),
            "t_fly": float(self.t_fly),
            "t_chrg": float(self.t_chrg),
            "timespan": float(self.timespan),
            "e_f": [float(x) for x in self.e_f],
            "e_f0": float(self.e_f0),
            "uav_energy_infeasible": bool(self.uav_energy_infeasible),
        }


def account_schedule(schedule, scenario) -> EnergyReport:
    """Replay a schedule against a scenario and tally all energy flows.

    Flight legs consume fly-power over the geometric distance at cruise
    speed; each charge item consumes transmit plus hover power for its
    duration and delivers p0 * c * t to every node its beam covers from the
    current position. Node batteries cap at e_u; energy received beyond the
    cap is lost. The total loss satisfies both readings: consumed minus
    banked, and initial-system minus final-system energy.
    """
    nodes = np.asarray(scenario.positions, dtype=float)
    n = nodes.shape[0]
    uav = scenario.uav
    wpt = scenario.wpt
    half_angle = scenario.half_angle
    p_fly = uav.fly_power
    p_hov = uav.hover_power
    cos_thr = math.cos(half_angle + ANGLE_TOL)

    cur = np.asarray(scenario.base, dtype=float)
    received = np.zeros(n)
    e_fly = e_hov = e_chrg = 0.0
    t_fly = t_chrg = timespan = 0.0

    for item in schedule.items:
        timespan += item.t
        if item.state == 1:
            target = np.asarray(item.x, dtype=float)
            dist = float(np.linalg.norm(target - cur))
            leg_t = dist / uav.v_bar
            e_fly += p_fly * leg_t
            t_fly += leg_t
            cur = target
            continue
        t = item.t
        e_chrg += uav.p0 * t
        e_hov += p_hov * t
        t_chrg += t
        diffs = nodes - cur[None, :]
        dist = np.linalg.norm(diffs, axis=1)
        coeff = np.zeros(n)
        apex = dist < APEX_EPS
        coeff[apex] = apex_coefficient(wpt)
        far = ~apex
        if np.any(far):
            in_reach = far & (dist <= wpt.range)
            if np.any(in_reach):
                v = np.asarray(item.v, dtype=float)
                cosang = (diffs[in_reach] / dist[in_reach, None]) @ v
                sel = cosang >= cos_thr
                idx = np.where(in_reach)[0][sel]
                coeff[idx] = np.minimum(
                    wpt.delta / (wpt.alpha + dist[idx]) ** wpt.beta, wpt.c_max)
        received += uav.p0 * coeff * t

    e_b = np.asarray(scenario.e_b, dtype=float)
    e_u = np.asarray(scenario.e_u, dtype=float)
    e_f = np.minimum(e_b + received, e_u)
    e_rcv = float(np.sum(e_f - e_b))
    e_total = e_fly + e_hov + e_chrg
    e_f0 = uav.e_b0 - e_total
    return EnergyReport(
        e_fly=e_fly, e_hov=e_hov, e_chrg=e_chrg, e_rcv=e_rcv,
        e_loss_total=e_total - e_rcv,
        e_loss_wpt_hov=e_hov + e_chrg - e_rcv,
        t_fly=t_fly, t_chrg=t_chrg, timespan=timespan,
        e_f=e_f, e_f0=e_f0,
        uav_energy_infeasible=e_f0 < 0.0,
    )
