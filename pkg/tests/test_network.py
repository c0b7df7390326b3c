"""Walks on multiport networks, checked against independent dense models.

The two-vertex oracle builds the global one-step transfer operator of a
pair of triangle vertices joined by one edge, entry by entry from the
wiring convention, and powers it with numpy.  It shares nothing with the
engine's sparse stepping.
"""

import math

import numpy as np
import pytest

from multiport import exact
from multiport.device import MultiportSpec, exit_record, grover_coin
from multiport.errors import SpecError
from multiport.matrices import Matrix
from multiport.network import (
    GraphSpec,
    IdealVertex,
    PhysicalVertex,
    Schedule,
    build_network,
    coherence_budget,
    run_walk,
)


def single_triport(mode="exact"):
    return GraphSpec(
        vertices=[PhysicalVertex(MultiportSpec(n=3, mode=mode))],
        edges=[],
        leads=[0, 0, 0],
        mode=mode,
    )


# ---------------------------------------------------------------------------
# structure and validation
# ---------------------------------------------------------------------------


def test_triangle_structure():
    g = GraphSpec(
        vertices=[PhysicalVertex(MultiportSpec(n=3)) for _ in range(3)],
        edges=[(0, 1), (1, 2), (2, 0)],
        leads=[0, 1, 2],
    )
    engine = build_network(g)
    assert engine.lead_count == 3
    assert engine.inter_vertex_mode_count == 6
    assert engine.intra_vertex_mode_count == 36


def test_degree_mismatch_rejected():
    g = GraphSpec(
        vertices=[IdealVertex(grover_coin(3))],
        edges=[],
        leads=[0, 0],  # degree 2, coin dimension 3
    )
    with pytest.raises(SpecError):
        build_network(g)
    g2 = GraphSpec(
        vertices=[PhysicalVertex(MultiportSpec(n=4))],
        edges=[],
        leads=[0, 0, 0],
    )
    with pytest.raises(SpecError):
        build_network(g2)


def test_disconnected_needs_flag():
    verts = [IdealVertex(grover_coin(2)) for _ in range(2)]
    g = GraphSpec(vertices=verts, edges=[], leads=[0, 0, 1, 1])
    with pytest.raises(SpecError):
        build_network(g)
    g_ok = GraphSpec(
        vertices=verts, edges=[], leads=[0, 0, 1, 1], allow_disconnected=True
    )
    build_network(g_ok)


# ---------------------------------------------------------------------------
# ideal mode
# ---------------------------------------------------------------------------


def test_ideal_single_vertex_one_step_is_coin_column():
    coin = grover_coin(3)
    engine = build_network(
        GraphSpec(vertices=[IdealVertex(coin)], edges=[], leads=[0, 0, 0])
    )
    res = engine.run(1, 1)
    for lead in range(3):
        assert complex(res.steps[0].lead_step_amplitudes[lead]) == pytest.approx(
            complex(coin.entry(lead, 1)), abs=1e-15
        )
    assert res.cumulative_exit(1) == pytest.approx(1.0, abs=1e-14)


def test_grover_reinjection_is_identity():
    coin = grover_coin(4)
    engine = build_network(
        GraphSpec(vertices=[IdealVertex(coin)], edges=[], leads=[0, 0, 0, 0])
    )
    first = engine.run(2, 1).steps[0].lead_step_amplitudes
    second = engine.run(
        {lead: amp for lead, amp in enumerate(first)}, 1
    ).steps[0].lead_step_amplitudes
    for lead in range(4):
        expect = 1.0 if lead == 2 else 0.0
        assert complex(second[lead]) == pytest.approx(expect, abs=1e-14)


def test_ideal_conservation_on_a_path_graph():
    coins = [grover_coin(2), grover_coin(3), grover_coin(2)]
    g = GraphSpec(
        vertices=[IdealVertex(c) for c in coins],
        edges=[(0, 1), (1, 2)],
        leads=[0, 1, 2],
    )
    res = build_network(g).run(0, 30)
    assert res.steps[-1].conservation_dev < 1e-13
    assert res.cumulative_exit(30) <= 1.0 + 1e-12


def test_relabeling_equivariance():
    coin = grover_coin(3)
    g1 = GraphSpec(
        vertices=[IdealVertex(coin), IdealVertex(coin)],
        edges=[(0, 1)],
        leads=[0, 0, 1, 1],
    )
    # same graph with the two vertices swapped; leads follow the relabeling
    g2 = GraphSpec(
        vertices=[IdealVertex(coin), IdealVertex(coin)],
        edges=[(1, 0)],
        leads=[1, 1, 0, 0],
    )
    r1 = build_network(g1).run(0, 12)
    r2 = build_network(g2).run(0, 12)
    for s1, s2 in zip(r1.steps, r2.steps):
        assert s1.lead_cumulative_probability == pytest.approx(
            s2.lead_cumulative_probability, abs=1e-14
        )


# ---------------------------------------------------------------------------
# physical mode
# ---------------------------------------------------------------------------


def test_physical_single_vertex_equals_device_exact():
    engine = build_network(single_triport("exact"))
    res = engine.run(0, 20)
    rec = exit_record(MultiportSpec(n=3, mode="exact"), 0, 20)
    for k in range(20):
        for port in range(3):
            assert (
                res.steps[k].lead_step_amplitudes[port]
                == rec.steps[k].amplitudes[port]
            )
    assert res.cumulative_exit(10) == pytest.approx(511 / 512)


def test_two_vertex_network_matches_dense_oracle():
    spec = MultiportSpec(n=3)
    g = GraphSpec(
        vertices=[PhysicalVertex(spec), PhysicalVertex(spec)],
        edges=[(0, 1)],
        leads=[0, 0, 1, 1],
    )
    engine = build_network(g)
    steps = 16
    res = engine.run(0, steps)

    # dense one-step operator over 9 + 9 internal modes + 2 edge modes
    r = 1j / math.sqrt(2)
    t = 1 / math.sqrt(2)
    mirror = -1j
    # channel order per vertex: port 0 = shared edge, ports 1, 2 = leads
    def cw(v, p):
        return 11 * v + p

    def ccw(v, p):
        return 11 * v + 3 + p

    def mir(v, p):
        return 11 * v + 6 + p

    def edge_to(v):  # mode travelling toward vertex v
        return 9 if v == 1 else 10

    dim = 22
    T = np.zeros((dim, dim), dtype=complex)
    exits = {}  # (vertex, port) -> extraction row
    for v in (0, 1):
        for p in range(3):
            # arrivals: a_s from cw(p-1), a_e from ccw(p+1), a_m from mir(p),
            # a_x from the inter-vertex edge when p == 0
            row_ext = np.zeros(dim, dtype=complex)
            row_ext[ccw(v, (p + 1) % 3)] = t
            row_ext[cw(v, (p - 1) % 3)] = r
            if p == 0:
                T[edge_to(1 - v)] += row_ext  # out through the shared edge
            else:
                exits[(v, p)] = row_ext
            row_mir = np.zeros(dim, dtype=complex)
            row_mir[ccw(v, (p + 1) % 3)] = r
            row_mir[cw(v, (p - 1) % 3)] = t
            T[mir(v, p)] = row_mir * mirror
            row_e = np.zeros(dim, dtype=complex)
            row_e[mir(v, p)] = r
            if p == 0:
                row_e[edge_to(v)] += t
            T[cw(v, p)] += row_e
            row_s = np.zeros(dim, dtype=complex)
            row_s[mir(v, p)] = t
            if p == 0:
                row_s[edge_to(v)] += r
            T[ccw(v, p)] += row_s

    # injection on lead 0 = vertex 0 port 1: post-entry internal state
    x = np.zeros(dim, dtype=complex)
    x[cw(0, 1)] = t
    x[ccw(0, 1)] = r
    lead_ports = {0: (0, 1), 1: (0, 2), 2: (1, 1), 3: (1, 2)}
    for k in range(2, steps + 1):
        dense_exits = [exits[lead_ports[l]] @ x for l in range(4)]
        engine_exits = res.steps[k - 1].lead_step_amplitudes
        for l in range(4):
            assert complex(engine_exits[l]) == pytest.approx(
                dense_exits[l], abs=1e-12
            ), (k, l)
        x = T @ x
    assert res.steps[-1].conservation_dev < 1e-13


def test_physical_conservation_heterogeneous():
    g = GraphSpec(
        vertices=[
            PhysicalVertex(MultiportSpec(n=3, mirror_factor=np.exp(0.3j))),
            PhysicalVertex(MultiportSpec(n=4, edge_phases=0.7)),
        ],
        edges=[(0, 1)],
        leads=[0, 0, 1, 1, 1],
    )
    res = build_network(g).run(2, 40)
    assert res.steps[-1].conservation_dev < 1e-13


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------


def test_schedule_override_applies_on_its_step():
    coin = grover_coin(3)
    g = GraphSpec(vertices=[IdealVertex(coin)], edges=[], leads=[0, 0, 0])
    engine = build_network(g)
    # replacing the coin with the identity reroutes everything back out of
    # the input lead on step one
    schedule = Schedule({1: {0: Matrix.identity(3)}})
    res = run_walk(engine, 1, 1, schedule)
    amps = res.steps[0].lead_step_amplitudes
    assert complex(amps[1]) == pytest.approx(1.0, abs=1e-14)
    assert complex(amps[0]) == pytest.approx(0.0, abs=1e-14)


def test_schedule_rejects_nonunitary_override():
    g = GraphSpec(vertices=[IdealVertex(grover_coin(3))], edges=[], leads=[0, 0, 0])
    engine = build_network(g)
    bad = Matrix([[1, 0, 0], [0, 0.5, 0], [0, 0, 1]])
    with pytest.raises(SpecError):
        engine.run(0, 2, Schedule({1: {0: bad}}))


def test_physical_schedule_override():
    g = single_triport("float")
    engine = build_network(g)
    # retune the splitters to 70/30 for one step mid-walk
    lopsided = {"r": 1j * math.sqrt(0.7), "t": math.sqrt(0.3)}
    schedule = Schedule({4: {0: lopsided}})
    res_plain = build_network(g).run(0, 8)
    res_sched = engine.run(0, 8, schedule)
    # identical before the override bites, different after
    assert res_sched.steps[2].lead_cumulative_probability == pytest.approx(
        res_plain.steps[2].lead_cumulative_probability
    )
    assert abs(
        res_sched.steps[7].lead_cumulative_probability[0]
        - res_plain.steps[7].lead_cumulative_probability[0]
    ) > 1e-3
    assert res_sched.steps[-1].conservation_dev < 1e-13


# ---------------------------------------------------------------------------
# coherence budget
# ---------------------------------------------------------------------------


def test_coherence_budget_values():
    assert coherence_budget(1e-9, 3.3e-12).max_steps == 303
    assert coherence_budget(1e-12, 3.3e-12).max_steps == 0
    unbounded = coherence_budget(math.inf, 3.3e-12)
    assert unbounded.unbounded and unbounded.max_steps is None
    with pytest.raises(SpecError):
        coherence_budget(1e-9, 0.0)
