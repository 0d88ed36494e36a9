"""Command line: gradient evaluation, scaling benchmark, built-in selftest."""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bench import run_benchmark, write_csv
from .circuit import (
    CircuitParseError,
    NonInvertibleGateError,
    parse_circuit,
    perturbed_derivative_scale,
)
from .gradients import (
    GradientReport,
    non_hermitian_gradient,
    reference_gradient,
    reverse_mode_gradient,
)
from .observable import (
    BUILTIN_OBSERVABLES,
    Observable,
    ObservableParseError,
    builtin_observable,
    parse_observable,
)
from .selftest import run_selftest
from .statevector import init_basis_state

EXIT_PARSE = 2
EXIT_SINGULAR = 3
EXIT_OUTPUT = 4


def _load_observable(spec: str, num_qubits: int) -> Observable:
    if spec in BUILTIN_OBSERVABLES:
        return builtin_observable(spec, num_qubits)
    with open(spec, encoding="utf-8") as fh:
        return parse_observable(fh.read())


def _load_params(spec: str) -> np.ndarray:
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            tokens = fh.read().split()
    else:
        tokens = [t for t in spec.split(",") if t.strip()]
    return np.array([float(t) for t in tokens], dtype=float)


def _print_report(report: GradientReport) -> None:
    print(f"energy {report.energy.real:.17g} {report.energy.imag:.17g}")
    for k, v in enumerate(report.values):
        print(f"p{k} {v.real:.17g} {v.imag:.17g}")
    c = report.counters
    print(
        "counters"
        f" gate_applies={c.gate_applies}"
        f" derivative_applies={c.derivative_applies}"
        f" clones={c.clones}"
        f" inner_products={c.inner_products}"
        f" observable_applies={c.observable_applies}"
    )


def _cmd_grad(args: argparse.Namespace) -> int:
    try:
        with open(args.circuit, encoding="utf-8") as fh:
            circuit = parse_circuit(fh.read())
        obs = _load_observable(args.observable, circuit.num_qubits)
        params = _load_params(args.params)
    except (CircuitParseError, ObservableParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    input_state = init_basis_state(circuit.num_qubits)
    try:
        if not obs.is_hermitian:
            if args.method == "reference":
                print(
                    "error: the reference method needs a Hermitian observable",
                    file=sys.stderr,
                )
                return EXIT_PARSE
            report = non_hermitian_gradient(circuit, params, obs, input_state)
        elif args.method == "reverse":
            report = reverse_mode_gradient(circuit, params, obs, input_state)
        else:
            report = reference_gradient(circuit, params, obs, input_state)
    except NonInvertibleGateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _print_report(report)
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    reps_values = [int(t) for t in args.reps.split(",") if t.strip()]
    methods = [t.strip() for t in args.methods.split(",") if t.strip()]
    records, fits = run_benchmark(
        family=args.family,
        num_qubits=args.qubits,
        reps_values=reps_values,
        methods=methods,
        repetitions=args.repetitions,
        seed=args.seed,
    )
    try:
        write_csv(args.output, records, fits)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    for f in fits:
        print(f"fit {f.method}: slope={f.slope:.4f} r_squared={f.r_squared:.6f}")
    return 0


def _cmd_selftest(args: argparse.Namespace) -> int:
    if args.perturb_derivative:
        with perturbed_derivative_scale(1.01):
            results = run_selftest()
    else:
        results = run_selftest()
    failed = 0
    for r in results:
        status = "ok" if r.passed else "FAIL"
        suffix = f" ({r.detail})" if r.detail else ""
        print(f"{status:4s} {r.name}{suffix}")
        failed += not r.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svgrad",
        description="State-vector gradients of parameterized circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    grad = sub.add_parser("grad", help="print energy and gradient for a circuit file")
    grad.add_argument("circuit", help="circuit text file")
    grad.add_argument(
        "observable",
        help=f"observable text file or builtin name ({', '.join(BUILTIN_OBSERVABLES)})",
    )
    grad.add_argument("params", help="comma-separated parameter values, or a file of values")
    grad.add_argument(
        "--method", choices=("reverse", "reference"), default="reverse",
        help="gradient schedule (default: reverse)",
    )
    grad.set_defaults(func=_cmd_grad)

    bench = sub.add_parser("bench", help="time gradient evaluation over an ansatz family")
    bench.add_argument("--family", choices=("A", "B", "C", "D"), required=True)
    bench.add_argument("--qubits", type=int, required=True)
    bench.add_argument("--reps", required=True, help="comma-separated repetition depths")
    bench.add_argument(
        "--methods", default="reverse,reference", help="comma-separated methods to time"
    )
    bench.add_argument("--repetitions", type=int, default=24, help="timed runs per point")
    bench.add_argument("--output", "-o", required=True, help="CSV output path")
    bench.add_argument("--seed", type=int, default=0, help="theta generator seed")
    bench.set_defaults(func=_cmd_bench)

    selftest = sub.add_parser("selftest", help="run the built-in verification suite")
    selftest.add_argument(
        "--perturb-derivative",
        action="store_true",
        help="negative control: skew the derivative convention so checks must fail",
    )
    selftest.set_defaults(func=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
