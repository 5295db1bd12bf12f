"""Command-line entry point.

Exit codes: 0 success, 1 parse or validation failure, 2 numerical failure,
64 usage error.  Metric lines have the form ``key=value``.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from typing import Sequence

from gsqc import __version__
from gsqc.analysis import VerificationReport, verify
from gsqc.circuit import Circuit, CircuitError, ParseError, build_grover_circuit, parse_circuit, stage_line_numbers, validate
from gsqc.eigen import SolverError, identity_chain_gap, spectral_gap_scan
from gsqc.hamiltonian import DEFAULT_BIAS, BiasSpec, assemble
from gsqc.hilbert import InstanceTooLarge, bits_of, format_bits, parse_bits

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _fmt(value) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.12g}"
    return str(value)


def _emit(metrics: dict) -> None:
    for key, value in metrics.items():
        print(f"{key}={_fmt(value)}")


def _load(path: str) -> Circuit:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CircuitError([f"{path}: {exc.strerror}"]) from None
    circuit = parse_circuit(text)
    problems = validate(circuit)
    if problems:
        lines = stage_line_numbers(text)

        def locate(p: str) -> str:
            m = re.match(r"stage (\d+)", p)
            if m and int(m.group(1)) <= len(lines):
                return f"line {lines[int(m.group(1)) - 1]}: {p}"
            return p

        raise CircuitError([locate(p) for p in problems])
    return circuit


def _input(text: str | None, circuit: Circuit) -> int:
    if text is None:
        return 0
    try:
        return parse_bits(text, circuit.num_qubits)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _summary(report: VerificationReport) -> None:
    r = report.readout
    m = report.num_qubits
    print(f"# input {format_bits(report.input, m)}: dim {report.dim} (sector {report.sector_dim}), solver {report.solver}")
    print("# output-row distribution, conditioned on every electron at the last row")
    print(f"# {'bits':>6}  {'probability':>14}")
    for c, p in enumerate(r.conditional_output):
        print(f"# {format_bits(c, m):>6}  {p:14.10f}")
    _emit(report.metrics())


def _stage_table(report: VerificationReport) -> None:
    print(f"# {'row':>4}  {'occupancy':>12}  {'fidelity':>16}")
    for j, (occ, fid) in enumerate(zip(report.readout.row_occupancy, report.per_stage_fidelity)):
        print(f"# {j:>4}  {occ:12.8f}  {fid:16.12f}")


def cmd_check(args) -> int:
    circuit = _load(args.file)
    print(f"# {args.file}: {circuit.num_qubits} qubit(s), {circuit.num_stages} stage(s)")
    _emit({"valid": 1, "qubits": circuit.num_qubits, "stages": circuit.num_stages, "epsilon": circuit.epsilon})
    return EXIT_OK


def cmd_solve(args) -> int:
    circuit = _load(args.file)
    report = verify(circuit, _input(args.input, circuit), args.bias, args.solver, args.seed)
    _summary(report)
    return EXIT_OK


def cmd_verify(args) -> int:
    circuit = _load(args.file)
    report = verify(circuit, _input(args.input, circuit), args.bias, args.solver, args.seed)
    _stage_table(report)
    _emit(report.metrics())
    for j, fid in enumerate(report.per_stage_fidelity):
        print(f"fidelity_{j}={_fmt(fid)}")
    return EXIT_OK


def _rows(text: str | None, default: int) -> list[int]:
    if not text:
        return [default]
    out = []
    for part in text.split(","):
        a, sep, b = part.partition("..")
        try:
            out += list(range(int(a), int(b) + 1)) if sep else [int(a)]
        except ValueError:
            raise UsageError(f"bad --rows entry {part!r}") from None
    if any(n < 1 for n in out):
        raise UsageError("--rows entries must be >= 1")
    return out


def cmd_gap(args) -> int:
    circuit = _load(args.file)
    if not circuit.stages:
        raise UsageError("gap scan needs at least one stage")

    def family(n: int) -> Circuit:
        # the file's stage list, repeated cyclically to n stages
        stages = tuple(circuit.stages[i % circuit.num_stages] for i in range(n))
        return Circuit(circuit.num_qubits, stages, circuit.epsilon)

    table = spectral_gap_scan(family, _rows(args.rows, circuit.num_stages), solver=args.solver)
    analytic = circuit.num_qubits == 1 and all(
        a.gate.kind == "I" for st in circuit.stages for a in st.assignments
    )
    print(f"# {'N':>4}  {'gap':>20}" + (f"  {'2eps(1-cos(pi/(N+1)))':>24}" if analytic else ""))
    for n, gap in table:
        extra = f"  {identity_chain_gap(n, circuit.epsilon):24.15e}" if analytic else ""
        print(f"# {n:>4}  {gap:20.15e}{extra}")
    for n, gap in table:
        print(f"gap_{n}={_fmt(gap)}")
    return EXIT_OK


def cmd_grover(args) -> int:
    circuit = build_grover_circuit()
    inputs = [_input(args.input, circuit)] if args.input else range(4)
    for n in inputs:
        report = verify(circuit, n, args.bias, args.solver, args.seed)
        _summary(report)
        _stage_table(report)
    return EXIT_OK


def cmd_dump(args) -> int:
    circuit = _load(args.file)
    bias = None
    if args.input is not None:
        bias = BiasSpec(bits_of(_input(args.input, circuit), circuit.num_qubits), args.bias)
    sys.stdout.write(assemble(circuit, bias).dump())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gsqc", description="Ground-state quantum computation on quantum-dot arrays.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def numeric(p):
        p.add_argument("--bias", type=float, default=DEFAULT_BIAS, help="bias energy delta (default 0.1)")
        p.add_argument("--solver", choices=("auto", "dense", "lanczos"), default="auto")
        p.add_argument("--seed", type=int, default=0, help="Lanczos start-block seed")

    p = sub.add_parser("check", help="parse and validate a circuit file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="ground state, gap and readout for one input")
    p.add_argument("file")
    p.add_argument("--input", required=True, help="input bits, qubit M-1 first")
    numeric(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="per-row fidelity table against the gate oracle")
    p.add_argument("file")
    p.add_argument("--input", required=True)
    numeric(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gap", help="spectral gap against the number of stages")
    p.add_argument("file")
    p.add_argument("--rows", help="stage counts N, e.g. 2,3,4 or 2..8 (default: the file's own N)")
    p.add_argument("--solver", choices=("auto", "dense", "lanczos"), default="auto")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("grover", help="two-qubit search demo")
    p.add_argument("--input", help="input bits (default: all four inputs)")
    numeric(p)
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("dump-h", help="print the upper triangle as 'i j value' lines")
    p.add_argument("file")
    p.add_argument("--input", help="add the bias for these input bits")
    p.add_argument("--bias", type=float, default=DEFAULT_BIAS)
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"gsqc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CircuitError as exc:
        for problem in exc.problems:
            print(f"{getattr(args, 'file', 'circuit')}: {problem}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, InstanceTooLarge) as exc:
        print(f"gsqc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
