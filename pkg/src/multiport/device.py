"""Directionally-unbiased n-port devices as directed-edge scattering graphs.

Wiring convention (validated against the exact exit-amplitude tables in
the test suite): every vertex carries one four-arm beam splitter whose
arms are the external port, a mirror stub, edge-E toward the next vertex
(clockwise) and edge-S toward the previous vertex.  Transmission t runs
along the through pairs (external <-> edge-E, mirror <-> edge-S);
reflection r couples external <-> edge-S and mirror <-> edge-E.  Each
vertex's edge-E meets the next vertex's edge-S, closing the polygon.

One step is one segment traversal: an inter-vertex edge, or the full
mirror round trip (both take the same time).  N counts beam-splitter
encounters including the entry encounter, so an N-encounter path has
traversed N - 1 segments.  Amplitude can leave a beam splitter through
the external arm only when it arrived on an edge arm, which is why exit
amplitudes vanish at every odd N.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from . import exact
from .errors import ConvergenceError, SpecError
from .matrices import Matrix
from .states import port_label

_EXACT_DEFAULT_R = exact.I * exact.INV_SQRT2
_EXACT_DEFAULT_T = exact.INV_SQRT2
_EXACT_DEFAULT_MIRROR = -exact.I

_FLOAT_DEFAULT_R = 1j / math.sqrt(2.0)
_FLOAT_DEFAULT_T = 1.0 / math.sqrt(2.0) + 0j
_FLOAT_DEFAULT_MIRROR = -1j

_UNITARY_TOL = 1e-12


def _phase_factor(phase: float, mode: str):
    """Unit-modulus traversal factor for a phase given in radians."""
    if mode == "float":
        return cmath.exp(1j * phase)
    k = phase / (math.pi / 4.0)
    rounded = round(k)
    if abs(k - rounded) > 1e-12:
        raise SpecError(
            "exact mode supports phases that are multiples of pi/4"
        )
    return exact.eighth_root(rounded)


def _broadcast(value, n, name):
    if isinstance(value, (list, tuple)):
        if len(value) != n:
            raise SpecError(f"{name} needs exactly {n} per-vertex entries")
        return tuple(value)
    return tuple([value] * n)


@dataclass
class MultiportSpec:
    """Parametric description of an n-sided unbiased multiport.

    ``r``, ``t`` and ``mirror_factor`` accept a single scalar applied to
    every vertex or a per-vertex sequence; ``edge_phases`` accepts one
    phase in radians or a per-edge sequence (edge k joins vertex k and
    k+1).  ``None`` selects the reference device: a 50/50 splitter with
    r = i/sqrt2, t = 1/sqrt2, mirror round-trip factor -i, edge phase 0.
    """

    n: int = 3
    r: object = None
    t: object = None
    mirror_factor: object = None
    edge_phases: object = 0.0
    max_steps: int = 100
    mode: str = "float"

    def resolved(self) -> "CompiledMultiport":
        return compile_spec(self)


@dataclass(frozen=True)
class CompiledMultiport:
    """Validated per-vertex scalars and per-edge traversal factors."""

    n: int
    mode: str
    r: tuple
    t: tuple
    mirror: tuple
    edge_factor: tuple
    max_steps: int

    @property
    def bs_node_count(self) -> int:
        return self.n

    @property
    def mirror_node_count(self) -> int:
        return self.n

    @property
    def inter_vertex_mode_count(self) -> int:
        return 2 * self.n

    @property
    def mirror_stub_mode_count(self) -> int:
        return 2 * self.n


#: Exposed under the name the rest of the package and the docs use.
DeviceGraph = CompiledMultiport


def compile_spec(spec: MultiportSpec) -> CompiledMultiport:
    """Validate a spec and expand it into per-vertex/per-edge scalars."""
    if spec.mode not in ("exact", "float"):
        raise SpecError(f"unknown numeric mode {spec.mode!r}")
    if spec.n < 3:
        raise SpecError(f"a multiport needs at least 3 ports, got {spec.n}")
    mode = spec.mode
    if mode == "exact":
        default_r, default_t, default_m = (
            _EXACT_DEFAULT_R,
            _EXACT_DEFAULT_T,
            _EXACT_DEFAULT_MIRROR,
        )
    else:
        default_r, default_t, default_m = (
            _FLOAT_DEFAULT_R,
            _FLOAT_DEFAULT_T,
            _FLOAT_DEFAULT_MIRROR,
        )

    r = _broadcast(spec.r if spec.r is not None else default_r, spec.n, "r")
    t = _broadcast(spec.t if spec.t is not None else default_t, spec.n, "t")
    mirror = _broadcast(
        spec.mirror_factor if spec.mirror_factor is not None else default_m,
        spec.n,
        "mirror_factor",
    )
    if mode == "float":
        r = tuple(complex(v) for v in r)
        t = tuple(complex(v) for v in t)
        mirror = tuple(complex(v) for v in mirror)

    for v in range(spec.n):
        rv, tv, mv = r[v], t[v], mirror[v]
        norm = float(exact.abs_sq(rv) + exact.abs_sq(tv))
        cross = complex(rv * tv.conjugate() + tv * rv.conjugate())
        if abs(norm - 1.0) > _UNITARY_TOL or abs(cross) > _UNITARY_TOL:
            raise SpecError(
                f"beam-splitter block at vertex {port_label(v)} is not unitary"
            )
        if abs(float(exact.abs_sq(mv)) - 1.0) > _UNITARY_TOL:
            raise SpecError(
                f"mirror factor at vertex {port_label(v)} is not unit modulus"
            )

    phases = spec.edge_phases
    if isinstance(phases, (list, tuple)):
        if len(phases) != spec.n:
            raise SpecError(f"edge_phases needs exactly {spec.n} entries")
        edge = tuple(_phase_factor(float(p), mode) for p in phases)
    else:
        edge = tuple([_phase_factor(float(phases), mode)] * spec.n)

    if spec.max_steps < 2:
        raise SpecError("max_steps must be at least 2")
    return CompiledMultiport(spec.n, mode, r, t, mirror, edge, spec.max_steps)


# ---------------------------------------------------------------------------
# Step evolution
# ---------------------------------------------------------------------------


@dataclass
class ExitStep:
    """Exit amplitudes and probabilities at one beam-splitter encounter."""

    n: int
    amplitudes: tuple
    step_probability: object
    cumulative_probability: object


@dataclass
class ExitRecord:
    input_port: int
    n_ports: int
    mode: str
    steps: List[ExitStep]
    conservation_dev: float

    def amplitude(self, n: int, port: int):
        return self.steps[n - 1].amplitudes[port]

    def cumulative(self, n: int):
        return self.steps[n - 1].cumulative_probability


class _Evolution:
    """Mutable state of one single-photon run; owned by a single caller."""

    def __init__(self, dev: CompiledMultiport, input_port: int):
        if not 0 <= input_port < dev.n:
            raise SpecError(f"input port {input_port} outside the device")
        self.dev = dev
        self.input_port = input_port
        self.zero = exact.scalar_zero(dev.mode)
        self.state = {}
        self.encounter = 0
        self.cumulative = self.zero if dev.mode == "exact" else 0.0
        self.conservation_dev = 0.0

    def internal_prob(self):
        total = self.zero if self.dev.mode == "exact" else 0.0
        for amp in self.state.values():
            total = total + exact.abs_sq(amp)
        return total

    def step(self) -> tuple:
        """Scatter every beam splitter once, then traverse all segments."""
        dev = self.dev
        n = dev.n
        zero = self.zero
        self.encounter += 1
        inject = self.input_port if self.encounter == 1 else None
        state = self.state
        new = {}
        exits = []
        step_prob = zero if dev.mode == "exact" else 0.0
        for v in range(n):
            a_s = state.get(("cw", (v - 1) % n), zero)
            a_e = state.get(("ccw", (v + 1) % n), zero)
            a_m = state.get(("mir", v), zero)
            rv, tv = dev.r[v], dev.t[v]
            out_ext = tv * a_e + rv * a_s
            out_mir = rv * a_e + tv * a_s
            if inject == v:
                one = exact.scalar_one(dev.mode)
                out_e = tv * one + rv * a_m
                out_s = rv * one + tv * a_m
            else:
                out_e = rv * a_m
                out_s = tv * a_m
            exits.append(out_ext)
            step_prob = step_prob + exact.abs_sq(out_ext)
            if not _amp_is_zero(out_e, dev.mode):
                new[("cw", v)] = out_e * dev.edge_factor[v]
            if not _amp_is_zero(out_s, dev.mode):
                new[("ccw", v)] = out_s * dev.edge_factor[(v - 1) % n]
            if not _amp_is_zero(out_mir, dev.mode):
                new[("mir", v)] = out_mir * dev.mirror[v]
        self.state = new
        self.cumulative = self.cumulative + step_prob
        total = self.internal_prob() + self.cumulative
        self.conservation_dev = max(self.conservation_dev, abs(float(total) - 1.0))
        return tuple(exits), step_prob


def _amp_is_zero(amp, mode: str) -> bool:
    if mode == "exact":
        return amp.is_zero()
    return abs(amp) <= 1e-300


def exit_record(spec: MultiportSpec, input_port: int, n_max: int) -> ExitRecord:
    """Exit amplitudes at each port for encounters N = 1..n_max."""
    if n_max < 2:
        raise SpecError("n_max must be at least 2")
    dev = compile_spec(spec)
    if n_max > dev.max_steps:
        raise SpecError(f"n_max {n_max} exceeds max_steps {dev.max_steps}")
    evo = _Evolution(dev, input_port)
    steps = []
    for n in range(1, n_max + 1):
        exits, prob = evo.step()
        steps.append(ExitStep(n, exits, prob, evo.cumulative))
    return ExitRecord(input_port, dev.n, dev.mode, steps, evo.conservation_dev)


@dataclass
class SteadyStateResult:
    """Coherent sum of all exit amplitudes, one column per input port."""

    matrix: Matrix
    residual: float
    steps_used: int
    converged: bool
    conservation_dev: float


def dense_step_operators(dev: CompiledMultiport):
    """One-step operators over the 3n internal modes, as numpy arrays.

    Modes are ordered cw_0..cw_{n-1}, ccw_0.., mir_0..; ``A`` maps the
    post-traversal internal state to the next one, ``B`` holds the
    post-entry state per input port and ``C`` extracts exit amplitudes.
    The map x -> (C x, A x) is an isometry, which is what per-step
    conservation asserts.
    """
    n = dev.n
    cw = lambda v: v
    ccw = lambda v: n + v
    mir = lambda v: 2 * n + v
    A = np.zeros((3 * n, 3 * n), dtype=complex)
    B = np.zeros((3 * n, n), dtype=complex)
    C = np.zeros((n, 3 * n), dtype=complex)
    for v in range(n):
        r = complex(dev.r[v])
        t = complex(dev.t[v])
        m = complex(dev.mirror[v])
        e_cw = complex(dev.edge_factor[v])
        e_ccw = complex(dev.edge_factor[(v - 1) % n])
        A[cw(v), mir(v)] = r * e_cw
        A[ccw(v), mir(v)] = t * e_ccw
        A[mir(v), ccw((v + 1) % n)] = r * m
        A[mir(v), cw((v - 1) % n)] = t * m
        C[v, ccw((v + 1) % n)] = t
        C[v, cw((v - 1) % n)] = r
        B[cw(v), v] = t * e_cw
        B[ccw(v), v] = r * e_ccw
    return A, B, C


def _steady_state_dense(dev: CompiledMultiport, tol: float) -> SteadyStateResult:
    A, B, C = dense_step_operators(dev)
    X = B.copy()
    U = np.zeros((dev.n, dev.n), dtype=complex)
    exited = np.zeros(dev.n)
    conservation = 0.0
    steps_used = dev.max_steps
    converged = False
    residual = float(np.sqrt((np.abs(X) ** 2).sum(axis=0)).max())
    for k in range(2, dev.max_steps + 1):
        exits = C @ X
        U += exits
        exited += (np.abs(exits) ** 2).sum(axis=0)
        X = A @ X
        internal = (np.abs(X) ** 2).sum(axis=0)
        conservation = max(conservation, float(np.abs(internal + exited - 1.0).max()))
        residual = float(np.sqrt(internal.max()))
        if residual < tol:
            steps_used = k
            converged = True
            break
    return SteadyStateResult(
        Matrix.from_numpy(U), residual, steps_used, converged, conservation
    )


def steady_state(spec: MultiportSpec, tol: float = 1e-12) -> SteadyStateResult:
    """Accumulate exit amplitudes until the un-exited amplitude norm < tol.

    The residual is the amplitude norm (square root of the remaining
    internal probability), the same scale as matrix-entry error.  If the
    device has not drained below ``tol`` within ``spec.max_steps``
    encounters the result is returned with ``converged=False``; nothing
    is extrapolated.
    """
    if not tol > 0:
        raise SpecError("tol must be positive")
    dev = compile_spec(spec)
    if dev.mode == "float":
        return _steady_state_dense(dev, tol)
    columns = []
    worst_residual = 0.0
    steps_used = 0
    converged = True
    conservation = 0.0
    for port in range(dev.n):
        evo = _Evolution(dev, port)
        acc = [exact.scalar_zero(dev.mode)] * dev.n
        this_residual = None
        for n in range(1, dev.max_steps + 1):
            exits, _prob = evo.step()
            for i in range(dev.n):
                acc[i] = acc[i] + exits[i]
            this_residual = math.sqrt(max(float(evo.internal_prob()), 0.0))
            if this_residual < tol:
                steps_used = max(steps_used, n)
                break
        else:
            steps_used = dev.max_steps
            converged = False
        worst_residual = max(worst_residual, this_residual)
        conservation = max(conservation, evo.conservation_dev)
        columns.append(acc)
    rows = tuple(
        tuple(columns[j][i] for j in range(dev.n)) for i in range(dev.n)
    )
    return SteadyStateResult(
        Matrix(rows, dev.mode), worst_residual, steps_used, converged, conservation
    )


# ---------------------------------------------------------------------------
# Path enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathTrace:
    """One path through the device, as beam-splitter and mirror symbols."""

    steps: Tuple[Tuple[str, int], ...]
    amplitude: object
    bs_encounters: int
    mirror_count: int

    @property
    def symbol_string(self) -> str:
        return "".join(sym for sym, _v in self.steps)

    @property
    def annotated(self) -> str:
        return " ".join(f"{sym}@{port_label(v)}" for sym, v in self.steps)


def enumerate_paths(
    spec: MultiportSpec, input_port: int, exit_port: int, n: int
) -> List[PathTrace]:
    """All paths entering ``input_port`` and exiting ``exit_port`` after
    exactly ``n`` beam-splitter encounters.

    The coherent sum of the returned amplitudes equals the corresponding
    exit-record entry; each path amplitude has magnitude 2^(-n/2) for the
    reference 50/50 device.
    """
    dev = compile_spec(spec)
    if not 0 <= exit_port < dev.n:
        raise SpecError(f"exit port {exit_port} outside the device")
    if n > dev.max_steps:
        raise SpecError(f"n {n} exceeds max_steps {dev.max_steps}")
    one = exact.scalar_one(dev.mode)
    paths: List[PathTrace] = []

    # Stack entries: (location kind, vertex, encounter index, amplitude,
    # symbols, mirror count).  Kinds: entering externally, arriving on the
    # S or E edge arm, or returning from the mirror stub.
    stack = [("ext", input_port, 1, one, (), 0)]
    while stack:
        kind, v, k, amp, syms, mirrors = stack.pop()
        if k > n:
            continue
        rv, tv = dev.r[v], dev.t[v]
        if kind == "ext":
            # entry encounter: out to both edges
            stack.append(
                (
                    "edge_s",
                    (v + 1) % dev.n,
                    k + 1,
                    amp * tv * dev.edge_factor[v],
                    syms + (("t", v),),
                    mirrors,
                )
            )
            stack.append(
                (
                    "edge_e",
                    (v - 1) % dev.n,
                    k + 1,
                    amp * rv * dev.edge_factor[(v - 1) % dev.n],
                    syms + (("r", v),),
                    mirrors,
                )
            )
        elif kind in ("edge_s", "edge_e"):
            exit_sym, exit_amp = ("r", rv) if kind == "edge_s" else ("t", tv)
            mir_sym, mir_amp = ("t", tv) if kind == "edge_s" else ("r", rv)
            if k == n and v == exit_port:
                paths.append(
                    PathTrace(syms + ((exit_sym, v),), amp * exit_amp, n, mirrors)
                )
            stack.append(
                (
                    "mir",
                    v,
                    k + 1,
                    amp * mir_amp * dev.mirror[v],
                    syms + ((mir_sym, v), ("M", v)),
                    mirrors + 1,
                )
            )
        else:  # returning from the mirror
            stack.append(
                (
                    "edge_s",
                    (v + 1) % dev.n,
                    k + 1,
                    amp * rv * dev.edge_factor[v],
                    syms + (("r", v),),
                    mirrors,
                )
            )
            stack.append(
                (
                    "edge_e",
                    (v - 1) % dev.n,
                    k + 1,
                    amp * tv * dev.edge_factor[(v - 1) % dev.n],
                    syms + (("t", v),),
                    mirrors,
                )
            )
    paths.sort(key=lambda p: p.symbol_string)
    return paths


# ---------------------------------------------------------------------------
# Series summation and closed forms
# ---------------------------------------------------------------------------


@dataclass
class AmplitudeSeries:
    """Truncated exit-amplitude series and its geometric extrapolation."""

    input_port: int
    output_port: int
    terms: List[Tuple[int, object]]
    partial_sums: List[Tuple[int, object]]
    ratio: object
    extrapolated: object


def amplitude_series(
    spec: MultiportSpec,
    input_port: int,
    output_port: int,
    n_max: int = 16,
    ratio_tol: float = 1e-9,
) -> AmplitudeSeries:
    """Sum the exit-amplitude series for one transition analytically.

    The nonzero step amplitudes must settle into a geometric progression
    (at least three consecutive equal ratios of modulus < 1); the head of
    the series is kept verbatim and the tail is summed in closed form.
    Raises ConvergenceError when no geometric suffix exists.
    """
    record = exit_record(spec, input_port, n_max)
    mode = record.mode
    terms = []
    for step in record.steps:
        amp = step.amplitudes[output_port]
        if not _reported_zero(amp, mode):
            terms.append((step.n, amp))
    if len(terms) < 4:
        raise ConvergenceError(
            f"only {len(terms)} nonzero terms up to N={n_max}; nothing to extrapolate"
        )
    partials = []
    acc = exact.scalar_zero(mode)
    for n, amp in terms:
        acc = acc + amp
        partials.append((n, acc))

    ratios = []
    for (_n1, a1), (_n2, a2) in zip(terms, terms[1:]):
        ratios.append(a2 / a1)
    last = ratios[-1]
    if abs(complex(last)) >= 1.0:
        raise ConvergenceError("series terms are not decaying; refusing to extrapolate")
    start = len(ratios)
    while start > 0 and _ratio_close(ratios[start - 1], last, mode, ratio_tol):
        start -= 1
    consistent = len(ratios) - start
    if consistent < 3:
        raise ConvergenceError(
            "nonzero terms do not settle into a constant ratio; refusing to extrapolate"
        )
    # terms[start] is the first member of the geometric suffix
    head = exact.scalar_zero(mode)
    for _n, amp in terms[:start]:
        head = head + amp
    one = exact.scalar_one(mode)
    tail = terms[start][1] / (one - last)
    return AmplitudeSeries(input_port, output_port, terms, partials, last, head + tail)


def _reported_zero(amp, mode: str) -> bool:
    if mode == "exact":
        return amp.is_zero()
    return abs(amp) <= 1e-12


def _ratio_close(a, b, mode: str, tol: float) -> bool:
    if mode == "exact":
        return a == b
    return abs(a - b) <= tol * max(abs(b), 1e-30)


def symmetric_unitary(phi_a: float, phi: float, mode: str = "float") -> Matrix:
    """The one-parameter family of symmetric 3x3 transition matrices.

    Diagonal entries e^{i phi_a} * alpha, off-diagonal entries
    e^{i phi_a} e^{i phi} * beta with alpha = 1/sqrt(1 + 8 cos^2 phi) and
    beta = -2 cos(phi) * alpha; unitary for every (phi_a, phi).  Exact
    mode accepts phi_a at multiples of pi/4 and phi at multiples of pi/2
    (the cases where alpha is rational).
    """
    if mode == "exact":
        lead = _phase_factor(phi_a, "exact")
        k = round(phi / (math.pi / 2.0))
        if abs(phi - k * math.pi / 2.0) > 1e-12:
            raise SpecError("exact mode supports phi in multiples of pi/2")
        c = (1, 0, -1, 0)[k % 4]
        if c == 0:
            alpha = exact.ONE
            beta = exact.ZERO
        else:
            alpha = exact.ExactComplex(Fraction(1, 3))
            beta = exact.ExactComplex(Fraction(-2 * c, 3))
        off = lead * _phase_factor(phi, "exact") * beta
        diag = lead * alpha
        rows = tuple(
            tuple(diag if i == j else off for j in range(3)) for i in range(3)
        )
        return Matrix(rows, "exact")
    c = math.cos(phi)
    alpha = 1.0 / math.sqrt(1.0 + 8.0 * c * c)
    beta = -2.0 * c * alpha
    lead = cmath.exp(1j * phi_a)
    diag = lead * alpha
    off = lead * cmath.exp(1j * phi) * beta
    rows = tuple(tuple(diag if i == j else off for j in range(3)) for i in range(3))
    return Matrix(rows, "float")


def grover_coin(n: int, mode: str = "float") -> Matrix:
    """The n x n involution with 2/n off the diagonal and 2/n - 1 on it."""
    if n < 2:
        raise SpecError("grover coin needs n >= 2")
    if mode == "exact":
        off = exact.ExactComplex(Fraction(2, n))
        diag = exact.ExactComplex(Fraction(2, n) - 1)
    else:
        off = complex(2.0 / n)
        diag = complex(2.0 / n - 1.0)
    rows = tuple(tuple(diag if i == j else off for j in range(n)) for i in range(n))
    return Matrix(rows, mode)


def triport_unitary(mode: str = "exact") -> Matrix:
    """Closed-form long-time transition matrix of the reference 3-port.

    Equals i times the 3-dimensional Grover coin: diagonal -i/3,
    off-diagonal 2i/3.
    """
    if mode == "exact":
        return grover_coin(3, "exact").scaled(exact.I)
    return grover_coin(3, "float").scaled(1j)


def compare_up_to_global_phase(
    m1: Matrix, m2: Matrix, tol: float = 1e-9
) -> Tuple[bool, complex, float]:
    """Best unit-modulus c and deviation max|m1 - c*m2|.

    The phase candidate is read off the largest entries of m2; the
    reported deviation is exact for that candidate, so a match at ``tol``
    certifies equality up to global phase.
    """
    if m1.dim != m2.dim:
        raise SpecError("matrix dimensions differ")
    a = m1.to_numpy()
    b = m2.to_numpy()
    best_phase = 1 + 0j
    best_dev = float("inf")
    flat = [(abs(b[i, j]), i, j) for i in range(m1.dim) for j in range(m1.dim)]
    flat.sort(reverse=True)
    for mag, i, j in flat[:3]:
        if mag == 0.0 or abs(a[i, j]) == 0.0:
            continue
        c = a[i, j] / b[i, j]
        c = c / abs(c)
        dev = float(abs(a - c * b).max())
        if dev < best_dev:
            best_dev = dev
            best_phase = complex(c)
    if best_dev == float("inf"):
        best_dev = float(abs(a - b).max())
    return best_dev <= tol, best_phase, best_dev
