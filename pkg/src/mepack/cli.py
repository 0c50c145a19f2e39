"""Batch front end: scenario files in, CSV/JSON/report artifacts out.

Usage:
    mepack run scenario.json [--out DIR] [--mode MODE] [--expr "q*p"]
                             [--nu LIST] [--order N] [--cutoff N]

Exit codes: 0 success, 2 validation failure, 3 numeric horizon/cutoff
failure, 4 I/O failure.  MEPACK_THREADS caps sweep parallelism.

One scenario per JSON file; exact rationals are accepted as strings
("3/2").  Data files are deterministic: identical configs give byte
identical CSV/JSON, and run metadata lives in the report footer.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .algebra import (
    ParseError,
    format_expression,
    format_phase,
    format_weyl,
    parse_weyl,
)
from .algebra.expression import Expr
from .algebra.phase import PhasePolynomial
from .classical import moment_classical
from .dynamics import (
    PolynomialPotential,
    Trajectory,
    averaged_derivatives,
    derivatives_classical,
    derivatives_quantum,
    propagate,
    quantum_correction,
    trajectory_quadratic,
)
from .errors import CutoffError, DomainError, HorizonError, MepackError, ValidationError
from .oracle import fock_expectation, fock_state, gaussian_moment_numeric
from .packets import PacketMoments
from .quantum import expectation_quantum, restore_hbar
from .version import __version__

MODES = ("moments", "evolve", "derivatives", "corrections", "limit-sweep", "oracle-check")

TRAJECTORY_HEADER = "t,Q,P,dQ,dP,nu,S"

_DEFAULT_EXPRESSIONS = ("q", "p", "q^2", "p^2", "q*p", "p*q^2*p")


def _fmt(x: float) -> str:
    """Shortest round-trip decimal for doubles."""
    return repr(float(x))


# ---------------------------------------------------------------------------
# scenario loading / validation
# ---------------------------------------------------------------------------


def _number(value, field: str):
    if isinstance(value, bool):
        raise ValidationError("expected a number", field)
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational literal {value!r}: {exc}", field)
    raise ValidationError(f"expected a number, got {type(value).__name__}", field)


def _load_scenario(path: Path) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario: {exc}", str(path))
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            str(path),
        )
    if not isinstance(raw, dict):
        raise ValidationError("scenario must be a JSON object", str(path))
    return raw


def _parse_packet(raw: dict) -> PacketMoments:
    if not isinstance(raw, dict):
        raise ValidationError("must be an object", "packet")
    missing = [k for k in ("Q", "P", "dQ", "dP") if k not in raw]
    if missing:
        raise ValidationError(f"missing fields {missing}", "packet")
    values = {k: _number(raw[k], f"packet.{k}") for k in ("Q", "P", "dQ", "dP")}
    hbar = _number(raw["hbar"], "packet.hbar") if "hbar" in raw else None
    try:
        return PacketMoments(hbar=hbar, **values)
    except DomainError as exc:
        raise ValidationError(str(exc), "packet")


def _parse_potential(raw: dict) -> PolynomialPotential:
    if not isinstance(raw, dict):
        raise ValidationError("must be an object", "potential")
    if "m" not in raw or "V" not in raw:
        raise ValidationError("needs fields m and V", "potential")
    mass = _number(raw["m"], "potential.m")
    if not isinstance(raw["V"], list) or not raw["V"]:
        raise ValidationError("V must be a non-empty list", "potential")
    coeffs = tuple(_number(c, f"potential.V[{k}]") for k, c in enumerate(raw["V"]))
    try:
        return PolynomialPotential(mass, coeffs)
    except DomainError as exc:
        raise ValidationError(str(exc), "potential")


def _parse_grid(raw, field: str) -> List[float]:
    if raw is None:
        return []
    if isinstance(raw, list):
        times = [float(_number(t, field)) for t in raw]
    elif isinstance(raw, dict):
        for key in raw:
            if key not in ("start", "stop", "step", "times"):
                raise ValidationError(f"unknown grid key {key!r}", field)
        if "times" in raw:
            return _parse_grid(raw["times"], field)
        try:
            start = float(_number(raw.get("start", 0), field))
            stop = float(_number(raw["stop"], field))
            step = float(_number(raw["step"], field))
        except KeyError as exc:
            raise ValidationError(f"grid needs {exc.args[0]}", field)
        if step <= 0:
            raise ValidationError("grid step must be positive", field)
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        times = [start + i * step for i in range(n)]
    else:
        raise ValidationError("grid must be a list or {start, stop, step}", field)
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValidationError("grid times must be strictly increasing", field)
    return times


class Scenario:
    def __init__(self, raw: dict, path: Path):
        self.path = path
        self.packet = _parse_packet(raw.get("packet", {}))
        self.potential = _parse_potential(raw.get("potential", {"m": 1, "V": [0]}))
        run = raw.get("run", {})
        if not isinstance(run, dict):
            raise ValidationError("must be an object", "run")
        self.mode = run.get("mode", "moments")
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}; pick one of {MODES}", "run.mode")
        self.kind = run.get("kind", "classical")
        if self.kind not in ("classical", "quantum"):
            raise ValidationError(f"unknown kind {self.kind!r}", "run.kind")
        self.grid = _parse_grid(run.get("grid"), "run.grid")
        self.order = int(run.get("order", 4))
        self.orders = [int(n) for n in run.get("orders", [])]
        self.propagation = run.get("propagation")
        if self.propagation not in (None, "quadratic", "taylor-origin", "repacketized-stepping"):
            raise ValidationError(f"unknown propagation {self.propagation!r}", "run.propagation")
        self.nu_sweep = [float(_number(x, "run.nu_sweep")) for x in run.get("nu_sweep", [])]
        self.cutoff = run.get("cutoff")
        if self.cutoff is not None:
            self.cutoff = int(self.cutoff)
        self.expressions = list(run.get("expressions", []))
        self.volume = run.get("v")
        if self.volume is not None:
            self.volume = float(_number(self.volume, "run.v"))
        out = raw.get("output", {})
        if not isinstance(out, dict):
            raise ValidationError("must be an object", "output")
        self.out_dir = out.get("dir", "out")
        self.formats = out.get("formats", ["csv", "json", "txt"])
        bad = [f for f in self.formats if f not in ("csv", "json", "txt")]
        if bad:
            raise ValidationError(f"unknown formats {bad}", "output.formats")

    def validate_for_mode(self):
        quantum_needed = self.mode in ("moments", "limit-sweep", "oracle-check") or self.kind == "quantum"
        if quantum_needed and not self.packet.is_symbolic:
            self.packet.require_quantum()  # cites the uncertainty bound on failure
        if self.mode == "limit-sweep":
            if not self.nu_sweep:
                raise ValidationError("limit-sweep needs run.nu_sweep", "run.nu_sweep")
            bad = [x for x in self.nu_sweep if x <= 1]
            if bad:
                raise ValidationError(
                    f"nu values {bad} violate the uncertainty bound nu = 2*dQ*dP/hbar > 1",
                    "run.nu_sweep",
                )


# ---------------------------------------------------------------------------
# rendering helpers
# ---------------------------------------------------------------------------


def format_nu_polynomial(expr: Expr) -> str:
    """Render an expression grouped by powers of nu, e.g. `21 - 2/nu^2`."""
    if expr.is_zero():
        return "0"
    groups = expr.as_poly_in("nu")
    parts = []
    for e in sorted(groups, reverse=True):
        cs = format_expression(groups[e])
        if len(groups[e].terms()) > 1:
            cs = f"({cs})"
        if e == 0:
            parts.append(cs)
            continue
        power = ("nu" if e == 1 else f"nu^{e}") if e > 0 else ("/nu" if e == -1 else f"/nu^{-e}")
        if e > 0:
            if cs == "1":
                parts.append(power)
            elif cs == "-1":
                parts.append(f"-{power}")
            else:
                parts.append(f"{cs}*{power}")
        else:
            parts.append(f"{cs}{power}")
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            out += f" - {p[1:]}"
        else:
            out += f" + {p}"
    return out


def _max_workers(jobs: int) -> int:
    cap = os.environ.get("MEPACK_THREADS")
    limit = min(jobs, os.cpu_count() or 1, 8)
    if cap is not None:
        try:
            limit = max(1, min(limit, int(cap)))
        except ValueError:
            raise ValidationError(f"MEPACK_THREADS must be an integer, got {cap!r}")
    return max(1, limit)


def _parallel_map(fn, items):
    items = list(items)
    if not items:
        return []
    workers = _max_workers(len(items))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class OutputBundle:
    """Collects data artifacts plus a human-readable report with footer."""

    def __init__(self, scenario: Scenario, out_dir: Path):
        self.scenario = scenario
        self.out_dir = out_dir
        self.lines: List[str] = []
        self.files: Dict[str, str] = {}
        self.json_payload: Dict = {}
        self.footer: Dict[str, str] = {}

    def say(self, text: str = ""):
        self.lines.append(text)

    def add_csv(self, name: str, header: str, rows: List[List]):
        body = "\n".join(
            [header]
            + [",".join(x if isinstance(x, str) else _fmt(x) for x in row) for row in rows]
        )
        self.files[name] = body + "\n"

    def add_text(self, name: str, text: str):
        self.files[name] = text

    def write(self) -> List[Path]:
        formats = getattr(self.scenario, "formats", ["csv", "json", "txt"])
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            written = []
            for name, content in self.files.items():
                if name.rsplit(".", 1)[-1] not in formats:
                    continue
                path = self.out_dir / name
                path.write_text(content)
                written.append(path)
            if self.json_payload and "json" in formats:
                path = self.out_dir / "results.json"
                path.write_text(json.dumps(self.json_payload, indent=2, sort_keys=True) + "\n")
                written.append(path)
            if "txt" in formats:
                report = "\n".join(self.lines + ["", "---"] +
                                   [f"{k}: {v}" for k, v in self.footer.items()]) + "\n"
                path = self.out_dir / "report.txt"
                path.write_text(report)
                written.append(path)
            return written
        except OSError as exc:
            raise IOError(f"cannot write outputs under {self.out_dir}: {exc}") from exc


# ---------------------------------------------------------------------------
# modes
# ---------------------------------------------------------------------------


def _sym_packet() -> PacketMoments:
    return PacketMoments.symbolic()


def _expressions(scenario: Scenario) -> List[str]:
    return scenario.expressions or list(_DEFAULT_EXPRESSIONS)


def _parse_operator(text: str):
    try:
        return parse_weyl(text)
    except ParseError as exc:
        raise ValidationError(str(exc), f"expression {text!r}")


def run_moments(scenario: Scenario, out: OutputBundle):
    numeric = not scenario.packet.is_symbolic
    bindings = scenario.packet.bindings() if numeric else None
    rows = []
    out.say("expectation values of operator polynomials")
    out.say("")
    for text in _expressions(scenario):
        op = _parse_operator(text)
        quantum = expectation_quantum(_sym_packet(), op)
        classical = moment_classical(_sym_packet(), op.classical().map_coefficients(
            lambda c: c.drop_symbol("hbar")))
        quantum_str = format_expression(restore_hbar(quantum))
        classical_str = format_expression(classical)
        out.say(f"  <{text}>")
        out.say(f"    classical: {classical_str}")
        out.say(f"    quantum:   {quantum_str}")
        row = {"expr": text, "classical": classical_str, "quantum": quantum_str}
        if numeric:
            qv = quantum.evaluate(bindings)
            cv = classical.evaluate(bindings)
            row.update(
                classical_value=cv.real,
                quantum_value_re=qv.real,
                quantum_value_im=qv.imag,
            )
            out.say(f"    numeric:   classical {_fmt(cv.real)}, quantum "
                    f"{_fmt(qv.real)} + {_fmt(qv.imag)}*i")
        rows.append(row)
    csv_rows = [
        [
            r["expr"], r["classical"], r["quantum"],
            *(
                [r["classical_value"], r["quantum_value_re"], r["quantum_value_im"]]
                if numeric else []
            ),
        ]
        for r in rows
    ]
    header = "expr,classical,quantum" + (
        ",classical_value,quantum_value_re,quantum_value_im" if numeric else ""
    )
    out.add_csv("moments.csv", header, csv_rows)
    out.json_payload = {"mode": "moments", "rows": rows}
    out.footer["provenance"] = "symbolic-exact"
    out.footer["cutoff"] = "n/a"


def _trajectory(scenario: Scenario) -> Trajectory:
    propagation = scenario.propagation
    if propagation is None:
        propagation = "quadratic" if scenario.potential.effective_degree() <= 2 else "taylor-origin"
    if propagation == "quadratic":
        return trajectory_quadratic(
            scenario.packet, scenario.potential, scenario.grid,
            kind=scenario.kind, v=scenario.volume,
        )
    return propagate(
        scenario.packet, scenario.potential, scenario.grid,
        order=max(scenario.order, 2), mode=propagation,
        kind=scenario.kind, v=scenario.volume,
    )


def run_evolve(scenario: Scenario, out: OutputBundle):
    traj = _trajectory(scenario)
    rows = [list(row) for row in traj.rows()]
    out.add_csv("trajectory.csv", TRAJECTORY_HEADER, rows)
    out.json_payload = {
        "mode": "evolve",
        "columns": TRAJECTORY_HEADER.split(","),
        "rows": rows,
    }
    out.say(f"evolved {len(rows)} grid points ({traj.provenance}, {traj.kind} packet)")
    if traj.remainder_estimate:
        out.say(f"last Taylor term magnitude (remainder proxy): {_fmt(traj.remainder_estimate)}")
    out.footer["provenance"] = traj.provenance
    out.footer["cutoff"] = "n/a"


def run_derivatives(scenario: Scenario, out: OutputBundle):
    order = max(1, scenario.order)
    potential = scenario.potential
    label = "numeric" if potential.is_numeric else "symbolic"
    sym = _sym_packet()
    ct = derivatives_classical(potential, order)
    qt = derivatives_quantum(potential, order)
    ca = averaged_derivatives(ct, sym)
    qa = averaged_derivatives(qt, sym)
    out.say(f"time derivatives at t = 0 ({label} potential, degree {potential.degree})")
    for n in range(order):
        out.say("")
        out.say(f"  d^{n+1}p/dt^{n+1} classical: {format_phase(ct.p[n])}")
        out.say(f"  d^{n+1}p/dt^{n+1} quantum:   {format_weyl(qt.p[n])}")
        out.say(f"  d^{n+1}P/dt^{n+1} classical average: {format_expression(ca.p[n])}")
        out.say(f"  d^{n+1}P/dt^{n+1} quantum average:   {format_nu_polynomial(qa.p[n])}")
    out.footer["provenance"] = "symbolic-exact"
    out.json_payload = {
        "mode": "derivatives",
        "order": order,
        "classical_p": [format_phase(e) for e in ct.p],
        "quantum_p": [format_weyl(e) for e in qt.p],
        "classical_averaged_p": [format_expression(e) for e in ca.p],
        "quantum_averaged_p": [format_expression(e) for e in qa.p],
    }
    out.footer["cutoff"] = "n/a"


def run_corrections(scenario: Scenario, out: OutputBundle):
    degree = scenario.potential.degree
    potential = PolynomialPotential.symbolic(degree)
    orders = scenario.orders or list(range(1, max(scenario.order, 1) + 1))
    out.say(f"quantum corrections to d^n P/dt^n (symbolic potential of degree {degree})")
    rows = []
    for n in orders:
        corr = quantum_correction(potential, n)
        rendered = format_nu_polynomial(corr)
        out.say(f"  order {n}: {rendered}")
        rows.append({"order": n, "correction": rendered})
        if n == 5 and degree >= 4:
            fifth = averaged_derivatives(derivatives_quantum(potential, 5), _sym_packet()).p[-1]
            group = fifth
            for name, power in (("V3", 1), ("V4", 1), ("dQ", 2), ("dP", 2), ("Q", 0), ("P", 0)):
                group = group.coefficient_of(name, power)
            factor = format_nu_polynomial(group * Expr.number(2) * Expr.symbol("m") ** 3)
            line = f"  pq2p-descended factor at order 5: dQ^2*dP^2*({factor})"
            out.say(line)
            rows[-1]["pq2p_factor"] = factor
    out.json_payload = {"mode": "corrections", "rows": rows}
    out.footer["provenance"] = "symbolic-exact"
    out.footer["cutoff"] = "n/a"


def run_limit_sweep(scenario: Scenario, out: OutputBundle):
    order = scenario.order if scenario.order > 1 else 5
    degree = scenario.potential.degree
    sym_potential = PolynomialPotential.symbolic(degree)
    corr = quantum_correction(sym_potential, order)
    base = scenario.packet.bindings()
    base["m"] = scenario.potential.mass_value()
    for k in range(degree + 1):
        base[f"V{k}"] = scenario.potential.coefficient(k)

    def job(nu: float):
        b = dict(base)
        b["nu"] = nu
        b["hbar"] = 2.0 * b["dQ"] * b["dP"] / nu
        correction = abs(corr.evaluate(b))
        moment_dev = 2.0 * b["dQ"] ** 2 * b["dP"] ** 2 / nu ** 2
        return [nu, correction, moment_dev]

    rows = _parallel_map(job, scenario.nu_sweep)
    out.add_csv("sweep.csv", "nu,correction,moment_dev", rows)

    def slope(idx: int) -> Optional[float]:
        pts = [(math.log(r[0]), math.log(r[idx])) for r in rows if r[idx] > 0]
        if len(pts) < 2:
            return None
        xs, ys = zip(*pts)
        return float(np.polyfit(xs, ys, 1)[0])

    s_corr, s_mom = slope(1), slope(2)
    out.say(f"swept nu over {scenario.nu_sweep} at derivative order {order}")
    out.say(f"fitted log-log slope of |correction|: {s_corr if s_corr is not None else 'n/a'}")
    out.say(f"fitted log-log slope of moment deviation: {s_mom if s_mom is not None else 'n/a'}")
    out.json_payload = {
        "mode": "limit-sweep",
        "columns": ["nu", "correction", "moment_dev"],
        "rows": rows,
        "correction_slope": s_corr,
        "moment_slope": s_mom,
    }
    out.footer["provenance"] = "symbolic-evaluated"
    out.footer["cutoff"] = "n/a"


def run_oracle_check(scenario: Scenario, out: OutputBundle):
    packet = scenario.packet
    if packet.is_symbolic:
        raise ValidationError("oracle-check needs a numeric packet", "packet")
    expressions = _expressions(scenario)
    operators = [(text, _parse_operator(text)) for text in expressions]
    degree = max(op.degree() for _, op in operators)
    state = fock_state(packet, degree=degree, cutoff=scenario.cutoff)
    bindings = packet.bindings()

    def job(item):
        text, op = item
        engine = expectation_quantum(packet, op).evaluate(bindings)
        oracle = fock_expectation(state, op)
        delta = abs(engine - oracle)
        rel = delta / max(abs(oracle), 1e-300)
        return [text, engine, oracle, delta, rel]

    results = _parallel_map(job, operators)
    rows = [
        [r[0], r[1].real, r[1].imag, r[2].real, r[2].imag, r[3], r[4]] for r in results
    ]
    out.add_csv(
        "oracle.csv",
        "expr,engine_re,engine_im,oracle_re,oracle_im,abs_delta,rel_delta",
        rows,
    )
    out.say(f"fock oracle comparison at cutoff {state.cutoff} "
            f"(trace deficit {_fmt(state.trace_deficit)})")
    worst = 0.0
    for r in results:
        out.say(f"  <{r[0]}>: engine {r[1]:.12g}, oracle {r[2]:.12g}, rel delta {r[4]:.3e}")
        worst = max(worst, r[4])
    out.say(f"worst relative delta: {worst:.3e}")
    classical_rows = []
    for a, b in ((1, 0), (0, 1), (2, 0), (0, 2), (2, 2), (4, 2)):
        sym = moment_classical(packet, PhasePolynomial({(a, b): Expr.number(1)}))
        engine = sym.evaluate(bindings).real
        quad = gaussian_moment_numeric(packet, a, b)
        classical_rows.append([a, b, engine, quad, abs(engine - quad)])
    out.add_csv("classical_moments.csv", "a,b,engine,quadrature,abs_delta", classical_rows)
    out.json_payload = {
        "mode": "oracle-check",
        "cutoff": state.cutoff,
        "worst_rel_delta": worst,
        "rows": [[r[0], r[1].real, r[1].imag, r[2].real, r[2].imag, r[3], r[4]] for r in results],
    }
    out.footer["provenance"] = "fock-oracle"
    out.footer["cutoff"] = str(state.cutoff)


_RUNNERS = {
    "moments": run_moments,
    "evolve": run_evolve,
    "derivatives": run_derivatives,
    "corrections": run_corrections,
    "limit-sweep": run_limit_sweep,
    "oracle-check": run_oracle_check,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mepack", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mepack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario file")
    run.add_argument("scenario", type=Path)
    run.add_argument("--out", type=Path, default=None, help="output directory")
    run.add_argument("--mode", choices=MODES, default=None)
    run.add_argument("--expr", action="append", default=None,
                     help="operator expression, e.g. \"q*p\" (repeatable)")
    run.add_argument("--nu", default=None, help="comma-separated nu sweep list")
    run.add_argument("--order", type=int, default=None, help="Taylor/derivative order")
    run.add_argument("--cutoff", type=int, default=None, help="Fock cutoff override")
    return parser


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    if args.mode:
        scenario.mode = args.mode
    if args.expr:
        scenario.expressions = list(args.expr)
    if args.nu:
        try:
            scenario.nu_sweep = [float(Fraction(x)) for x in args.nu.split(",") if x]
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad --nu list: {exc}", "--nu")
    if args.order is not None:
        scenario.order = args.order
    if args.cutoff is not None:
        scenario.cutoff = args.cutoff
    if args.out is not None:
        scenario.out_dir = str(args.out)
    return scenario


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = Scenario(_load_scenario(args.scenario), args.scenario)
        scenario = _apply_overrides(scenario, args)
        scenario.validate_for_mode()
    except (ValidationError, DomainError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    out = OutputBundle(scenario, Path(scenario.out_dir))
    out.footer.update(
        mode=scenario.mode,
        kind=scenario.kind,
        order=str(scenario.order),
        scenario=str(args.scenario),
        package=f"mepack {__version__}",
    )
    try:
        _RUNNERS[scenario.mode](scenario, out)
        written = out.write()
    except (ValidationError, DomainError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (CutoffError, HorizonError) as exc:
        print(f"numeric range error: {exc}", file=sys.stderr)
        return 3
    except (IOError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except MepackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
