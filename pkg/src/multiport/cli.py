"""Command-line surface: every simulator result as deterministic JSON/CSV.

Data goes to stdout, diagnostics to stderr.  Output is byte-stable for
identical configuration: no timestamps, sorted keys, metadata separated
from the data payload under a versioned schema.  Exit codes: 1 config
parse error, 2 invalid device/graph spec, 3 non-convergence, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from . import bell, device, exact, feasibility, network
from .errors import (
    ConfigError,
    ConvergenceError,
    InvariantViolation,
    SpecError,
)
from .matrices import Matrix
from .states import port_index, port_label

SCHEMA = "multiport/1"
MODE_ENV = "MULTIPORT_NUMERIC_MODE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# ---------------------------------------------------------------------------
# Value parsing and encoding
# ---------------------------------------------------------------------------


def parse_complex(text) -> complex:
    """Accept 're+imi' (e.g. '0.5+0.5i', '-i', '0.3i') or 'mag@phase'."""
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    if not isinstance(text, str):
        raise ConfigError(f"cannot read complex value from {text!r}")
    s = text.strip().replace(" ", "")
    if "@" in s:
        mag, _, phase = s.partition("@")
        try:
            return float(mag) * cmath.exp(1j * float(phase))
        except ValueError as err:
            raise ConfigError(f"bad mag@phase value {text!r}") from err
    try:
        return complex(s.replace("i", "j"))
    except ValueError as err:
        raise ConfigError(f"bad complex value {text!r}") from err


def _frac_pair(f: Fraction):
    return [f.numerator, f.denominator]


def encode_real(value, mode: str):
    if mode == "exact":
        out = {}
        names = ("rational", "sqrt2", "sqrt3", "sqrt6")
        coeffs = value.re_coefficients if isinstance(value, exact.ExactComplex) else (
            Fraction(value), Fraction(0), Fraction(0), Fraction(0)
        )
        for name, c in zip(names, coeffs):
            if c:
                out[name] = _frac_pair(c)
        if not out:
            out["rational"] = [0, 1]
        out["approx"] = float(exact.to_complex(value).real) if isinstance(
            value, exact.ExactComplex
        ) else float(value)
        return out
    return float(value)


def encode_scalar(value, mode: str):
    if mode == "exact":
        names = ("rational", "sqrt2", "sqrt3", "sqrt6")
        re = {n: _frac_pair(c) for n, c in zip(names, value.re_coefficients) if c}
        im = {n: _frac_pair(c) for n, c in zip(names, value.im_coefficients) if c}
        z = complex(value)
        return {"re": re, "im": im, "approx": [z.real, z.imag], "text": str(value)}
    z = complex(value)
    return [z.real, z.imag]


def encode_matrix(m: Matrix):
    return [[encode_scalar(v, m.mode) for v in row] for row in m.rows]


# ---------------------------------------------------------------------------
# Config handling
# ---------------------------------------------------------------------------


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {path} line {err.lineno}: {err.msg}") from err
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    return cfg


def resolve_mode(args, cfg) -> str:
    mode = args.mode or cfg.get("numeric_mode") or os.environ.get(MODE_ENV) or "float"
    if mode not in ("exact", "float"):
        raise ConfigError(f"numeric mode must be 'exact' or 'float', got {mode!r}")
    return mode


def _scalar_for_mode(value, mode):
    if value is None:
        return None
    z = parse_complex(value)
    if mode == "float":
        return z
    # exact mode accepts values expressible with eighth-root phases
    raise ConfigError("exact mode supports only the default r/t amplitudes")


def _phase_list(value):
    if value is None:
        return None
    if isinstance(value, str):
        return [float(p) for p in value.split(",")] if "," in value else float(value)
    return value


def device_spec(args, cfg) -> device.MultiportSpec:
    dcfg = dict(cfg.get("device", {}))
    n = args.n if args.n is not None else dcfg.get("n", 3)
    mode = resolve_mode(args, cfg)
    r = args.r if args.r is not None else dcfg.get("r")
    t = args.t if args.t is not None else dcfg.get("t")
    mirror_phase = (
        args.mirror_phase if args.mirror_phase is not None else dcfg.get("mirror_phase")
    )
    edge_phase = (
        args.edge_phase if args.edge_phase is not None else dcfg.get("edge_phase", 0.0)
    )
    max_steps = args.max_steps if args.max_steps is not None else dcfg.get("max_steps")

    kwargs = {"n": int(n), "mode": mode}
    if max_steps is not None:
        kwargs["max_steps"] = int(max_steps)
    if r is not None or t is not None:
        if mode == "exact":
            raise ConfigError("exact mode supports only the default r/t amplitudes")
        if r is None or t is None:
            raise ConfigError("override r and t together")
        kwargs["r"] = [parse_complex(v) for v in r] if isinstance(r, list) else parse_complex(r)
        kwargs["t"] = [parse_complex(v) for v in t] if isinstance(t, list) else parse_complex(t)
    if mirror_phase is not None:
        phases = _phase_list(mirror_phase)
        if mode == "exact":
            factor = (
                [_exact_phase(p) for p in phases]
                if isinstance(phases, list)
                else _exact_phase(phases)
            )
        else:
            factor = (
                [cmath.exp(1j * p) for p in phases]
                if isinstance(phases, list)
                else cmath.exp(1j * phases)
            )
        kwargs["mirror_factor"] = factor
    edge = _phase_list(edge_phase)
    if edge is not None:
        kwargs["edge_phases"] = edge
    return device.MultiportSpec(**kwargs)


def _exact_phase(p: float):
    k = p / (math.pi / 4.0)
    if abs(k - round(k)) > 1e-12:
        raise ConfigError("exact mode needs phases at multiples of pi/4")
    return exact.eighth_root(round(k))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_exits(args, cfg):
    spec = device_spec(args, cfg)
    record = device.exit_record(spec, port_index(args.input), args.steps)
    rows = []
    for step in record.steps:
        rows.append(
            {
                "n": step.n,
                "amplitudes": [encode_scalar(a, record.mode) for a in step.amplitudes],
                "step_probability": encode_real(step.step_probability, record.mode),
                "cumulative_probability": encode_real(
                    step.cumulative_probability, record.mode
                ),
            }
        )
    data = {
        "ports": [port_label(i) for i in range(record.n_ports)],
        "input": port_label(record.input_port),
        "rows": rows,
        "conservation_dev": record.conservation_dev,
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "port", "re", "im", "step_probability", "cumulative_probability"])
        for step in record.steps:
            for i, a in enumerate(step.amplitudes):
                z = complex(a)
                w.writerow(
                    [
                        step.n,
                        port_label(i),
                        repr(z.real),
                        repr(z.imag),
                        repr(float(step.step_probability)),
                        repr(float(step.cumulative_probability)),
                    ]
                )
        return data, buf.getvalue()
    return data, None


def cmd_paths(args, cfg):
    spec = device_spec(args, cfg)
    paths = device.enumerate_paths(
        spec, port_index(args.input), port_index(args.exit), args.length
    )
    total = exact.scalar_zero(spec.mode)
    for p in paths:
        total = total + p.amplitude
    data = {
        "input": args.input.upper(),
        "exit": args.exit.upper(),
        "length": args.length,
        "paths": [
            {
                "symbols": p.symbol_string,
                "annotated": p.annotated,
                "amplitude": encode_scalar(p.amplitude, spec.mode),
                "bs_encounters": p.bs_encounters,
                "mirror_count": p.mirror_count,
            }
            for p in paths
        ],
        "amplitude_sum": encode_scalar(total, spec.mode),
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["symbols", "re", "im", "bs_encounters", "mirror_count"])
        for p in paths:
            z = complex(p.amplitude)
            w.writerow([p.symbol_string, repr(z.real), repr(z.imag), p.bs_encounters, p.mirror_count])
        return data, buf.getvalue()
    return data, None


def cmd_unitary(args, cfg):
    spec = device_spec(args, cfg)
    result = device.steady_state(spec, tol=args.tol)
    if not result.converged:
        raise ConvergenceError(
            f"steady state not converged: residual {result.residual:.3e} "
            f"after {result.steps_used} steps"
        )
    data = {
        "matrix": encode_matrix(result.matrix),
        "residual": result.residual,
        "steps_used": result.steps_used,
        "converged": result.converged,
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["row", "col", "re", "im"])
        for i in range(result.matrix.dim):
            for j in range(result.matrix.dim):
                z = complex(result.matrix.entry(i, j))
                w.writerow([port_label(i), port_label(j), repr(z.real), repr(z.imag)])
        return data, buf.getvalue()
    return data, None


def cmd_family(args, cfg):
    if args.phi_sweep:
        try:
            start, stop, count = args.phi_sweep.split(":")
            phis = [
                float(start) + k * (float(stop) - float(start)) / max(int(count) - 1, 1)
                for k in range(int(count))
            ]
        except ValueError as err:
            raise ConfigError("--phi-sweep wants start:stop:count") from err
    else:
        phis = [args.phi]
    rows = []
    for phi in phis:
        m = device.symmetric_unitary(args.phi_a, phi)
        rows.append(
            {
                "phi_a": args.phi_a,
                "phi": phi,
                "alpha": 1.0 / math.sqrt(1.0 + 8.0 * math.cos(phi) ** 2),
                "beta": -2.0 * math.cos(phi) / math.sqrt(1.0 + 8.0 * math.cos(phi) ** 2),
                "matrix": encode_matrix(m),
                "unitarity_dev": m.unitarity_dev(),
            }
        )
    data = {"rows": rows}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["phi_a", "phi", "alpha", "beta", "unitarity_dev"])
        for r in rows:
            w.writerow([repr(r["phi_a"]), repr(r["phi"]), repr(r["alpha"]), repr(r["beta"]), repr(r["unitarity_dev"])])
        return data, buf.getvalue()
    return data, None


def cmd_bell_table(args, cfg):
    mode = resolve_mode(args, cfg)
    table = bell.full_truth_table(mode=mode)
    rows = [
        {
            "input": r.input,
            "control": r.control,
            "out_s": r.out_s,
            "out_o": r.out_o,
            "prob_s": r.prob_s,
            "prob_o": r.prob_o,
        }
        for r in table.rows
    ]
    data = {"rows": rows, "input_pair": "AB", "control_pair": "AC", "output_pair": "BC"}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["input", "control", "out_s", "out_o", "prob_s", "prob_o"])
        for r in rows:
            w.writerow([r["input"], r["control"], r["out_s"], r["out_o"], repr(r["prob_s"]), repr(r["prob_o"])])
        return data, buf.getvalue()
    return data, None


def cmd_group_table(args, cfg):
    mode = resolve_mode(args, cfg)
    table = bell.group_table(args.condition, mode=mode)
    data = {
        "condition": args.condition,
        "elements": list(table.elements),
        "table": table.as_grid(),
        "axioms": {
            "closure": table.axioms.closure,
            "commutative": table.axioms.commutative,
            "identity": table.axioms.identity,
            "self_inverse": table.axioms.self_inverse,
            "klein_isomorphic": table.axioms.klein_isomorphic,
            "violations": list(table.axioms.violations),
        },
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow([""] + list(table.elements))
        for a, row in zip(table.elements, table.as_grid()):
            w.writerow([a] + row)
        return data, buf.getvalue()
    return data, None


def cmd_cnot(args, cfg):
    mode = resolve_mode(args, cfg)
    rows = bell.cnot_table(mode=mode)
    data = {
        "encoding": {"0": "+ symmetry", "1": "- symmetry"},
        "rows": [
            {
                "input_bit": r.input_bit,
                "control_bit": r.control_bit,
                "output_bit": r.output_bit,
                "input": r.input,
                "control": r.control,
                "output": r.output,
            }
            for r in rows
        ],
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["input_bit", "control_bit", "output_bit", "input", "control", "output"])
        for r in rows:
            w.writerow([r.input_bit, r.control_bit, r.output_bit, r.input, r.control, r.output])
        return data, buf.getvalue()
    return data, None


def _graph_from_config(gcfg, mode) -> network.GraphSpec:
    try:
        vertices = []
        for v in gcfg["vertices"]:
            if "coin" in v:
                coin = v["coin"]
                if coin == "grover":
                    m = device.grover_coin(int(v["dim"]), mode)
                elif coin == "identity":
                    m = Matrix.identity(int(v["dim"]), mode)
                else:
                    if mode == "exact":
                        raise ConfigError("exact mode supports named coins only")
                    m = Matrix([[parse_complex(x) for x in row] for row in coin], "float")
                vertices.append(network.IdealVertex(m))
            elif "multiport" in v:
                d = v["multiport"]
                kwargs = {"n": int(d.get("n", 3)), "mode": mode}
                if "mirror_phase" in d:
                    p = float(d["mirror_phase"])
                    kwargs["mirror_factor"] = (
                        _exact_phase(p) if mode == "exact" else cmath.exp(1j * p)
                    )
                if "r" in d or "t" in d:
                    if mode == "exact":
                        raise ConfigError("exact mode supports only default r/t")
                    kwargs["r"] = parse_complex(d["r"])
                    kwargs["t"] = parse_complex(d["t"])
                if "edge_phase" in d:
                    kwargs["edge_phases"] = d["edge_phase"]
                vertices.append(network.PhysicalVertex(device.MultiportSpec(**kwargs)))
            else:
                raise ConfigError("vertex needs a 'coin' or 'multiport' entry")
        edges = [tuple(e) for e in gcfg.get("edges", [])]
        leads = list(gcfg.get("leads", []))
    except (KeyError, TypeError, ValueError) as err:
        raise ConfigError(f"bad walk configuration: {err}") from err
    return network.GraphSpec(vertices=vertices, edges=edges, leads=leads, mode=mode)


def _schedule_from_config(scfg, graph_mode) -> network.Schedule:
    overrides = {}
    for step, per_vertex in scfg.items():
        inner = {}
        for v, ov in per_vertex.items():
            if "coin" in ov:
                coin = ov["coin"]
                if coin == "grover":
                    inner[int(v)] = device.grover_coin(int(ov["dim"]), graph_mode)
                elif coin == "identity":
                    inner[int(v)] = Matrix.identity(int(ov["dim"]), graph_mode)
                else:
                    inner[int(v)] = Matrix(
                        [[parse_complex(x) for x in row] for row in coin], "float"
                    )
            else:
                params = {}
                if "r" in ov and "t" in ov:
                    params["r"] = parse_complex(ov["r"])
                    params["t"] = parse_complex(ov["t"])
                if "mirror_phase" in ov:
                    params["mirror_factor"] = cmath.exp(1j * float(ov["mirror_phase"]))
                inner[int(v)] = params
        overrides[int(step)] = inner
    return network.Schedule(overrides)


def cmd_walk(args, cfg):
    mode = resolve_mode(args, cfg)
    gcfg = cfg.get("walk")
    if gcfg is None:
        raise ConfigError("walk needs a config file with a 'walk' section")
    engine = network.build_network(_graph_from_config(gcfg, mode))
    schedule = None
    if "schedule" in gcfg:
        schedule = _schedule_from_config(gcfg["schedule"], mode)
    result = engine.run(args.input_lead, args.steps, schedule)
    steps = []
    for s in result.steps:
        steps.append(
            {
                "index": s.index,
                "edges": {
                    f"{e}->{v}": p for (e, v), p in sorted(s.edge_probabilities.items())
                },
                "lead_step_amplitudes": [
                    encode_scalar(a, mode) for a in s.lead_step_amplitudes
                ],
                "lead_cumulative_probability": list(s.lead_cumulative_probability),
                "internal_probability": s.internal_probability,
            }
        )
    data = {
        "leads": engine.lead_count,
        "steps": steps,
        "conservation_dev": result.steps[-1].conservation_dev,
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["step", "lead", "step_re", "step_im", "cumulative_probability"])
        for s in result.steps:
            for l in range(engine.lead_count):
                z = complex(s.lead_step_amplitudes[l])
                w.writerow([s.index, l, repr(z.real), repr(z.imag), repr(s.lead_cumulative_probability[l])])
        return data, buf.getvalue()
    return data, None


def cmd_feasibility(args, cfg):
    fcfg = dict(cfg.get("feasibility", {}))
    d = args.d if args.d is not None else fcfg.get("d")
    if d is None:
        raise ConfigError("feasibility needs --d (edge length, meters)")
    budget = feasibility.assess(
        float(d),
        refractive_index=float(
            args.index if args.index is not None else fcfg.get("refractive_index", 1.0)
        ),
        pulse_duration=(
            float(args.dt) if args.dt is not None else fcfg.get("pulse_duration")
        ),
        spectral_width=(
            float(args.dnu) if args.dnu is not None else fcfg.get("spectral_width")
        ),
        detector_time=(
            float(args.td) if args.td is not None else fcfg.get("detector_time")
        ),
    )
    data = {
        "d": budget.d,
        "refractive_index": budget.refractive_index,
        "transit_time": budget.transit_time,
        "decay_time": budget.decay_time,
        "max_sampling_rate": budget.max_sampling_rate,
        "pulse_duration": budget.pulse_duration,
        "spectral_width": budget.spectral_width,
        "coherence_time": budget.coherence_time,
        "coherence_length": budget.coherence_length,
        "detector_time": budget.detector_time,
        "phase_spread": budget.phase_spread,
        "constraints_ok": budget.constraints_ok,
        "violations": list(budget.violations),
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(sorted(k for k in data if k != "violations"))
        w.writerow([repr(data[k]) if isinstance(data[k], float) else data[k] for k in sorted(data) if k != "violations"])
        return data, buf.getvalue()
    return data, None


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="multiport", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_device=False):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--mode", choices=["exact", "float"], help="numeric mode")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if with_device:
            p.add_argument("--n", type=int, help="port count")
            p.add_argument("--r", help="reflection amplitude, 're+imi' or 'mag@phase'")
            p.add_argument("--t", help="transmission amplitude")
            p.add_argument("--mirror-phase", dest="mirror_phase", type=float)
            p.add_argument("--edge-phase", dest="edge_phase")
            p.add_argument("--max-steps", dest="max_steps", type=int)

    p = sub.add_parser("exits", help="per-encounter exit amplitude table")
    common(p, True)
    p.add_argument("--input", default="A")
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(fn=cmd_exits)

    p = sub.add_parser("paths", help="enumerate paths between two ports")
    common(p, True)
    p.add_argument("--input", default="A")
    p.add_argument("--exit", default="B")
    p.add_argument("--length", type=int, required=True, help="beam-splitter encounters")
    p.set_defaults(fn=cmd_paths)

    p = sub.add_parser("unitary", help="steady-state transition matrix")
    common(p, True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(fn=cmd_unitary)

    p = sub.add_parser("family", help="symmetric transition-matrix family")
    common(p)
    p.add_argument("--phi-a", dest="phi_a", type=float, default=-math.pi / 2)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--phi-sweep", dest="phi_sweep", help="start:stop:count")
    p.set_defaults(fn=cmd_family)

    p = sub.add_parser("bell-table", help="16-row Bell gate truth table")
    common(p)
    p.set_defaults(fn=cmd_bell_table)

    p = sub.add_parser("group-table", help="Klein group table and axiom report")
    common(p)
    p.add_argument("--condition", choices=["s", "o"], default="s")
    p.set_defaults(fn=cmd_group_table)

    p = sub.add_parser("cnot", help="CNOT bit table from the gate")
    common(p)
    p.set_defaults(fn=cmd_cnot)

    p = sub.add_parser("walk", help="scattering walk on a multiport network")
    common(p)
    p.add_argument("--input-lead", dest="input_lead", type=int, default=0)
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(fn=cmd_walk)

    p = sub.add_parser("feasibility", help="timing and coherence budget")
    common(p)
    p.add_argument("--d", type=float, help="edge length in meters")
    p.add_argument("--index", type=float, help="refractive index")
    p.add_argument("--dt", type=float, help="pulse duration in seconds")
    p.add_argument("--dnu", type=float, help="spectral width in Hz")
    p.add_argument("--td", type=float, help="detector response time in seconds")
    p.set_defaults(fn=cmd_feasibility)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config)
        mode = resolve_mode(args, cfg)
        data, csv_text = args.fn(args, cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except SpecError as err:
        print(f"invalid spec: {err}", file=sys.stderr)
        return 2
    except ConvergenceError as err:
        print(f"not converged: {err}", file=sys.stderr)
        return 3
    except InvariantViolation as err:
        print(f"internal invariant violated: {err}", file=sys.stderr)
        return 4

    if args.format == "csv":
        sys.stdout.write(csv_text)
        return 0
    payload = {
        "schema": SCHEMA,
        "command": args.command,
        "mode": mode,
        "data": data,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
