import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chargeplan.directions import PosDirPair
from chargeplan.energy import (
    RotorParams,
    UavParams,
    WptParams,
    account_schedule,
    apex_coefficient,
    build_transfer_matrix,
    transfer_coefficient,
    uav_power,
)
from chargeplan.scenario import Scenario
from chargeplan.schedule import CHARGE, FLY, Schedule, ScheduleItem

H = math.pi / 6
WPT = WptParams(delta=12.0, alpha=2.0, beta=4.0, range=6.0, c_max=0.9)


def make_scenario(nodes, e_b, e_u, e_d, p_fly=2.0, p_hov=2.0, p0=1.0, e_b0=1e6):
    n = len(nodes)
    return Scenario(
        positions=np.asarray(nodes, dtype=float),
        e_b=np.asarray(e_b, dtype=float),
        e_u=np.asarray(e_u, dtype=float),
        e_d=np.asarray(e_d, dtype=float),
        uav=UavParams(p0=p0, v_bar=1.0, e_b0=e_b0, e_u0=e_b0,
                      p_fly=p_fly, p_hov=p_hov),
        wpt=WPT,
        half_angle=H,
        base=np.zeros(3),
    )


# ------------------------------------------------------------- power

def test_uav_power_hover_is_blade_plus_induced():
    rotor = RotorParams()
    assert uav_power(0.0, rotor) == pytest.approx(rotor.p_b + rotor.p_i)


def test_uav_power_asymptotically_cubic():
    rotor = RotorParams()
    ratio = uav_power(2000.0, rotor) / uav_power(1000.0, rotor)
    assert ratio == pytest.approx(8.0, rel=0.05)


def test_uav_power_rejects_negative_speed():
    with pytest.raises(ValueError):
        uav_power(-1.0, RotorParams())


def test_uav_params_override_ratio():
    uav = UavParams(p0=1.0, v_bar=1.0, p_fly=160.0, p_hov=80.0)
    assert uav.hover_power / uav.fly_power == pytest.approx(0.5)


def test_uav_params_rotor_fallback():
    rotor = RotorParams()
    uav = UavParams(p0=1.0, v_bar=1.0, rotor=rotor)
    assert uav.hover_power == pytest.approx(rotor.p_b + rotor.p_i)
    assert uav.fly_power == pytest.approx(uav_power(1.0, rotor))


def test_uav_params_missing_sources_rejected():
    with pytest.raises(ValueError):
        UavParams(p0=1.0, v_bar=1.0)
    with pytest.raises(ValueError):
        UavParams(p0=1.0, v_bar=1.0, p_fly=10.0, p_hov=20.0)


# ------------------------------------------------------------ transfer

def test_transfer_coefficient_decay_value():
    x = np.array([1.0, 0.0, 0.0])
    assert transfer_coefficient(x, x, 1.0, WPT, H) == pytest.approx(12.0 / 81.0)


def test_transfer_coefficient_cap():
    x = np.array([1.0, 0.0, 0.0])
    # at d=0 the raw value 12/16 = 0.75 stays under the 0.9 cap
    assert transfer_coefficient(x, x, 0.0, WPT, H) == pytest.approx(0.75)
    tight = WptParams(delta=12.0, alpha=2.0, beta=4.0, range=6.0, c_max=0.1)
    assert transfer_coefficient(x, x, 0.0, tight, H) == pytest.approx(0.1)
    assert apex_coefficient(WPT) == pytest.approx(0.75)


def test_transfer_coefficient_outside_cone_or_range():
    x = np.array([1.0, 0.0, 0.0])
    tilted = np.array([math.cos(H + 1e-6), math.sin(H + 1e-6), 0.0])
    assert transfer_coefficient(x, tilted, 1.0, WPT, H) == 0.0
    assert transfer_coefficient(x, x, 6.0001, WPT, H) == 0.0
    with pytest.raises(ValueError):
        transfer_coefficient(x, x, -0.1, WPT, H)


def test_transfer_matrix_entries_follow_covered_sets():
    nodes = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [3.0, 0.2, 0.0]])
    pairs = [
        PosDirPair(np.zeros(3), np.array([1.0, 0.0, 0.0]), frozenset({0, 1}), 0),
        PosDirPair(np.zeros(3), np.array([1.0, 0.0, 0.0]), frozenset({2}), 0),
    ]
    c = build_transfer_matrix(pairs, nodes, WPT)
    assert c.shape == (2, 3)
    assert c[0, 0] == pytest.approx(12.0 / 81.0)
    assert c[0, 1] == pytest.approx(0.75)  # apex node
    assert c[0, 2] == 0.0
    assert c[1, 2] > 0 and c[1, 0] == 0.0 and c[1, 1] == 0.0


# ----------------------------------------------------------- accounting

def test_account_empty_schedule():
    sc = make_scenario([[1.0, 0, 0]], [40.0], [90.0], [10.0])
    rep = account_schedule(Schedule(), sc)
    assert rep.e_loss_total == 0.0
    assert rep.timespan == 0.0
    assert np.allclose(rep.e_f, sc.e_b)


def test_account_single_charge_item():
    # beam from the base covers the node at distance 1 with c = 0.5
    wpt = WptParams(delta=40.5, alpha=2.0, beta=4.0, range=6.0, c_max=0.9)
    sc = make_scenario([[1.0, 0, 0]], [0.0], [100.0], [5.0])
    sc.wpt = wpt
    sched = Schedule(items=[
        ScheduleItem(CHARGE, 20.0, v=np.array([1.0, 0.0, 0.0])),
    ])
    rep = account_schedule(sched, sc)
    assert rep.e_chrg == pytest.approx(20.0)
    assert rep.e_hov == pytest.approx(2.0 * 20.0)
    assert rep.e_rcv == pytest.approx(10.0)
    assert rep.e_loss_wpt_hov == pytest.approx(20.0 + 2.0 * 20.0 - 10.0)
    assert rep.e_f[0] == pytest.approx(10.0)


def test_account_battery_cap_overflow():
    wpt = WptParams(delta=40.5, alpha=2.0, beta=4.0, range=6.0, c_max=0.9)
    sc = make_scenario([[1.0, 0, 0]], [95.0], [100.0], [0.0])
    sc.wpt = wpt
    sched = Schedule(items=[
        ScheduleItem(CHARGE, 20.0, v=np.array([1.0, 0.0, 0.0])),
    ])
    rep = account_schedule(sched, sc)
    # 10 J arrive but only 5 J fit in the battery
    assert rep.e_f[0] == pytest.approx(100.0)
    assert rep.e_rcv == pytest.approx(5.0)


def test_account_flight_legs_use_geometry():
    sc = make_scenario([[3.0, 4.0, 0.0]], [40.0], [90.0], [0.0], p_fly=7.0, p_hov=3.0)
    sched = Schedule(items=[
        ScheduleItem(FLY, 5.0, x=np.array([3.0, 4.0, 0.0])),
        ScheduleItem(FLY, 5.0, x=np.zeros(3)),
    ])
    rep = account_schedule(sched, sc)
    assert rep.t_fly == pytest.approx(10.0)
    assert rep.e_fly == pytest.approx(7.0 * 10.0)
    assert rep.timespan == pytest.approx(10.0)


def _random_schedule(rng, n_nodes):
    items = []
    for _ in range(int(rng.integers(0, 6))):
        if rng.random() < 0.5:
            items.append(ScheduleItem(FLY, float(rng.uniform(0, 10)),
                                      x=rng.uniform(-5, 5, 3)))
        else:
            v = rng.normal(size=3)
            v /= np.linalg.norm(v)
            items.append(ScheduleItem(CHARGE, float(rng.uniform(0, 30)), v=v))
    return Schedule(items=items)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_account_two_loss_computations_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    nodes = rng.uniform(-4, 4, (n, 3))
    e_b = rng.uniform(0, 80, n)
    e_u = e_b + rng.uniform(0, 30, n)
    sc = make_scenario(nodes, e_b, e_u, np.zeros(n), p_fly=9.0, p_hov=4.0)
    rep = account_schedule(_random_schedule(rng, n), sc)
    e_tb = sc.uav.e_b0 + float(np.sum(sc.e_b))
    e_tf = rep.e_f0 + float(np.sum(rep.e_f))
    assert rep.e_loss_total == pytest.approx(e_tb - e_tf, abs=1e-6)
    assert rep.e_loss_total == pytest.approx(
        rep.e_fly + rep.e_hov + rep.e_chrg - rep.e_rcv, abs=1e-9)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 20.0))
def test_account_monotone_in_charge_time(seed, extra):
    rng = np.random.default_rng(seed)
    n = 3
    nodes = rng.uniform(-3, 3, (n, 3))
    sc = make_scenario(nodes, [10.0] * n, [90.0] * n, [0.0] * n,
                       p_fly=5.0, p_hov=5.0)
    sched = _random_schedule(rng, n)
    v = np.array([0.0, 0.0, 1.0])
    sched.items.append(ScheduleItem(CHARGE, 4.0, v=v))
    rep1 = account_schedule(sched, sc)
    sched.items[-1] = ScheduleItem(CHARGE, 4.0 + extra, v=v)
    rep2 = account_schedule(sched, sc)
    assert rep2.e_chrg >= rep1.e_chrg
    assert rep2.e_hov >= rep1.e_hov
    assert np.all(rep2.e_f >= rep1.e_f - 1e-12)
