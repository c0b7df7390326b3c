"""Scattering walks on undirected graphs of unbiased multiports.

Two vertex models share one engine interface.  Ideal mode scatters the
amplitudes arriving on a vertex's channels through an n x n coin each
step and immediately translates them one edge.  Physical mode expands
every vertex into its full multiport (beam splitters, mirror stubs,
internal polygon edges); a step then advances every segment of the whole
network at once, so inter-vertex edges cost one step exactly like the
segments inside a vertex.

Channel ordering at a vertex is its incident edges in edge-list order
followed by its leads in lead-list order; coin dimension (ideal) or port
count (physical) must equal that degree.  Leads are absorbing: amplitude
that crosses onto a lead is accumulated and never re-enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import exact
from .device import MultiportSpec, compile_spec, grover_coin
from .errors import SpecError
from .matrices import Matrix

_COIN_TOL = 1e-12


@dataclass
class IdealVertex:
    """Vertex scattered by an explicit coin matrix."""

    coin: Matrix


@dataclass
class PhysicalVertex:
    """Vertex expanded into a full multiport."""

    spec: MultiportSpec


VertexSpec = Union[IdealVertex, PhysicalVertex]


@dataclass
class GraphSpec:
    vertices: Sequence[VertexSpec]
    edges: Sequence[Tuple[int, int]]
    leads: Sequence[int]
    mode: str = "float"
    allow_disconnected: bool = False


@dataclass
class Schedule:
    """Per-step parameter overrides, keyed by step index then vertex.

    Ideal vertices take a replacement coin Matrix; physical vertices take
    a dict with any of r, t, mirror_factor.  Overrides apply only on
    their step; the base parameters return afterwards.
    """

    overrides: Dict[int, Dict[int, object]] = field(default_factory=dict)

    def for_step(self, step: int) -> Dict[int, object]:
        return self.overrides.get(step, {})


@dataclass
class WalkStep:
    index: int
    edge_probabilities: Dict[Tuple[int, int], float]
    lead_step_amplitudes: tuple
    lead_cumulative_probability: tuple
    internal_probability: float
    conservation_dev: float


@dataclass
class WalkResult:
    steps: List[WalkStep]

    def cumulative_exit(self, step_index: int) -> float:
        return float(sum(self.steps[step_index - 1].lead_cumulative_probability))


def _vertex_channels(g: GraphSpec):
    """channels[v] = ordered list of ('edge', e) / ('lead', l) descriptors."""
    channels: List[List[Tuple[str, int]]] = [[] for _ in g.vertices]
    for e, (u, v) in enumerate(g.edges):
        if u == v:
            raise SpecError("self-loop edges are not supported")
        channels[u].append(("edge", e))
        channels[v].append(("edge", e))
    for l, v in enumerate(g.leads):
        channels[v].append(("lead", l))
    return channels


def _check_connected(g: GraphSpec):
    n = len(g.vertices)
    if n == 0:
        raise SpecError("graph needs at least one vertex")
    adj: List[set] = [set() for _ in range(n)]
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    if len(seen) != n and not g.allow_disconnected:
        raise SpecError("graph is disconnected (set allow_disconnected to permit)")


class WalkEngine:
    """Compiled walk over a GraphSpec; one run owns its state vector."""

    def __init__(self, g: GraphSpec):
        _check_connected(g)
        self.graph = g
        self.mode = g.mode
        self.channels = _vertex_channels(g)
        self.kind = "ideal" if isinstance(g.vertices[0], IdealVertex) else "physical"
        for v, vert in enumerate(g.vertices):
            expected = "ideal" if isinstance(vert, IdealVertex) else "physical"
            if expected != self.kind:
                raise SpecError("all vertices must share one vertex model")
            degree = len(self.channels[v])
            if isinstance(vert, IdealVertex):
                if vert.coin.dim != degree:
                    raise SpecError(
                        f"vertex {v}: coin dimension {vert.coin.dim} != degree {degree}"
                    )
                if vert.coin.mode != g.mode:
                    raise SpecError(f"vertex {v}: coin numeric mode differs from graph")
                if vert.coin.unitarity_dev() > _COIN_TOL:
                    raise SpecError(f"vertex {v}: coin is not unitary")
            else:
                if vert.spec.n != degree:
                    raise SpecError(
                        f"vertex {v}: multiport has {vert.spec.n} ports, degree is {degree}"
                    )
                if vert.spec.mode != g.mode:
                    raise SpecError(f"vertex {v}: multiport numeric mode differs from graph")
                compile_spec(vert.spec)

        self.lead_count = len(g.leads)
        self.inter_vertex_mode_count = 2 * len(g.edges)
        if self.kind == "physical":
            self.intra_vertex_mode_count = sum(
                4 * v.spec.n for v in g.vertices
            )
        else:
            self.intra_vertex_mode_count = 0

    # -- helpers --------------------------------------------------------

    def _edge_peer(self, e: int, v: int) -> int:
        u, w = self.graph.edges[e]
        return w if v == u else u

    def _zero(self):
        return exact.scalar_zero(self.mode)

    def _vertex_params(self, v: int, override):
        vert = self.graph.vertices[v]
        if self.kind == "ideal":
            coin = vert.coin
            if override is not None:
                if not isinstance(override, Matrix):
                    raise SpecError("ideal-vertex override must be a coin Matrix")
                if override.dim != coin.dim or override.mode != self.mode:
                    raise SpecError("override coin has the wrong shape or mode")
                if override.unitarity_dev() > _COIN_TOL:
                    raise SpecError("override coin is not unitary")
                coin = override
            return coin
        spec = vert.spec
        if override is not None:
            if not isinstance(override, dict):
                raise SpecError("physical-vertex override must be a parameter dict")
            spec = MultiportSpec(
                n=spec.n,
                r=override.get("r", spec.r),
                t=override.get("t", spec.t),
                mirror_factor=override.get("mirror_factor", spec.mirror_factor),
                edge_phases=override.get("edge_phases", spec.edge_phases),
                max_steps=spec.max_steps,
                mode=spec.mode,
            )
        return compile_spec(spec)

    # -- the run ---------------------------------------------------------

    def run(
        self,
        input_lead: Union[int, Dict[int, object]],
        steps: int,
        schedule: Optional[Schedule] = None,
    ) -> WalkResult:
        if steps < 1:
            raise SpecError("steps must be >= 1")
        if isinstance(input_lead, int):
            injection = {input_lead: exact.scalar_one(self.mode)}
        else:
            injection = dict(input_lead)
        for l in injection:
            if not 0 <= l < self.lead_count:
                raise SpecError(f"no lead {l}")

        zero = self._zero()
        # Directed inter-vertex modes keyed (edge, toward_vertex); physical
        # mode adds intra-vertex keys (vertex, kind, index).
        state: Dict = {}
        lead_cum = [0.0] * self.lead_count
        records: List[WalkStep] = []
        conservation = 0.0
        injected_prob = sum(float(exact.abs_sq(a)) for a in injection.values())

        for k in range(1, steps + 1):
            overrides = schedule.for_step(k) if schedule else {}
            inject = injection if k == 1 else {}
            if self.kind == "ideal":
                state, lead_amps = self._ideal_step(state, inject, overrides)
            else:
                state, lead_amps = self._physical_step(state, inject, overrides)
            for l, amp in enumerate(lead_amps):
                lead_cum[l] += float(exact.abs_sq(amp))
            internal = sum(float(exact.abs_sq(a)) for a in state.values())
            total = internal + sum(lead_cum)
            conservation = max(conservation, abs(total - injected_prob))
            records.append(
                WalkStep(
                    k,
                    self._edge_probs(state),
                    tuple(lead_amps),
                    tuple(lead_cum),
                    internal,
                    conservation,
                )
            )
        return WalkResult(records)

    def _edge_probs(self, state) -> Dict[Tuple[int, int], float]:
        out: Dict[Tuple[int, int], float] = {}
        for key, amp in state.items():
            if key[0] == "edge":
                out[(key[1], key[2])] = out.get((key[1], key[2]), 0.0) + float(
                    exact.abs_sq(amp)
                )
        return out

    def _ideal_step(self, state, inject, overrides):
        zero = self._zero()
        new: Dict = {}
        lead_amps = [zero] * self.lead_count
        for v in range(len(self.graph.vertices)):
            coin = self._vertex_params(v, overrides.get(v))
            chans = self.channels[v]
            incoming = []
            for kind, idx in chans:
                if kind == "edge":
                    incoming.append(state.get(("edge", idx, v), zero))
                else:
                    incoming.append(inject.get(idx, zero))
            if all(exact.abs_sq(a) == 0 for a in incoming):
                continue
            outgoing = coin.apply(incoming)
            for (kind, idx), amp in zip(chans, outgoing):
                if kind == "edge":
                    peer = self._edge_peer(idx, v)
                    key = ("edge", idx, peer)
                    cur = new.get(key)
                    new[key] = amp if cur is None else cur + amp
                else:
                    lead_amps[idx] = lead_amps[idx] + amp
        return new, lead_amps

    def _physical_step(self, state, inject, overrides):
        zero = self._zero()
        new: Dict = {}
        lead_amps = [zero] * self.lead_count
        for v in range(len(self.graph.vertices)):
            dev = self._vertex_params(v, overrides.get(v))
            chans = self.channels[v]
            n = dev.n
            for p in range(n):
                a_s = state.get((v, "cw", (p - 1) % n), zero)
                a_e = state.get((v, "ccw", (p + 1) % n), zero)
                a_m = state.get((v, "mir", p), zero)
                kind, idx = chans[p]
                if kind == "edge":
                    a_x = state.get(("edge", idx, v), zero)
                else:
                    a_x = inject.get(idx, zero)
                rv, tv = dev.r[p], dev.t[p]
                out_ext = tv * a_e + rv * a_s
                out_mir = rv * a_e + tv * a_s
                out_e = tv * a_x + rv * a_m
                out_s = rv * a_x + tv * a_m
                if kind == "edge":
                    peer = self._edge_peer(idx, v)
                    key = ("edge", idx, peer)
                    cur = new.get(key)
                    new[key] = out_ext if cur is None else cur + out_ext
                else:
                    lead_amps[idx] = lead_amps[idx] + out_ext
                if exact.abs_sq(out_e) != 0:
                    new[(v, "cw", p)] = out_e * dev.edge_factor[p]
                if exact.abs_sq(out_s) != 0:
                    new[(v, "ccw", p)] = out_s * dev.edge_factor[(p - 1) % n]
                if exact.abs_sq(out_mir) != 0:
                    new[(v, "mir", p)] = out_mir * dev.mirror[p]
        return new, lead_amps


def build_network(g: GraphSpec) -> WalkEngine:
    return WalkEngine(g)


def run_walk(
    engine: WalkEngine,
    input_lead: Union[int, Dict[int, object]],
    steps: int,
    schedule: Optional[Schedule] = None,
) -> WalkResult:
    return engine.run(input_lead, steps, schedule)


def grover_vertex(degree: int, mode: str = "float") -> IdealVertex:
    return IdealVertex(grover_coin(degree, mode))


@dataclass
class CoherenceBudget:
    """How many mutually coherent device traversals a source supports."""

    max_steps: Optional[int]
    unbounded: bool
    ratio: float
    coherence_time: float
    decay_time: float


def coherence_budget(coherence_time: float, decay_time: float) -> CoherenceBudget:
    """floor(coherence_time / decay_time), with the raw ratio attached."""
    if decay_time <= 0:
        raise SpecError("decay time must be positive")
    if coherence_time <= 0:
        raise SpecError("coherence time must be positive")
    if math.isinf(coherence_time):
        return CoherenceBudget(None, True, math.inf, coherence_time, decay_time)
    ratio = coherence_time / decay_time
    return CoherenceBudget(int(math.floor(ratio)), False, ratio, coherence_time, decay_time)
