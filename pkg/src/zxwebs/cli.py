"""Command-line front end: layout, webs, verify and sample subcommands.

All outputs are deterministic functions of the parsed configuration
(including the seed), so identical invocations produce byte-identical
documents. Exit codes: 0 success, 1 verification failure or infeasible
request, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import oracle, verify, webs
from .diagram import Diagram, export
from .pauli import PauliOperator
from .surface import (
    CircuitSpec,
    Layout,
    build_diagram,
    build_layout,
    correlator_boundary_condition,
    injection_pattern,
    logical_operators,
    memory_pattern,
)

USAGE_ERROR = 2
VERIFY_ERROR = 1

SCHEMES = ("memory-z", "memory-x", "inject-y")


@dataclass
class RunConfig:
    distance: int = 5
    rounds: int = 1
    scheme: str = "inject-y"
    seed: int = 0
    shots: int = 1000
    error_rate: float = 0.0
    z_error_rate: float = 0.0
    errors: tuple[str, ...] = field(default_factory=tuple)  # e.g. ("X:14", "Z:3")
    postselect: str = "none"  # none | figure-set | all-deterministic
    postselect_rounds: str = "first"  # first | all
    correlator: str = "auto"
    fmt: str = "json"
    out: str | None = None

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        for rate in (self.error_rate, self.z_error_rate):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"error rate {rate} outside [0, 1]")


def _pattern(layout: Layout, scheme: str):
    if scheme == "inject-y":
        return injection_pattern(layout)
    return memory_pattern(layout, "Z" if scheme == "memory-z" else "X")


def _logical(layout: Layout, scheme: str) -> PauliOperator:
    z_l, x_l, y_l = logical_operators(layout)
    return {"memory-z": z_l, "memory-x": x_l, "inject-y": y_l}[scheme]


def _pauli_doc(op: PauliOperator) -> dict:
    return {"sign": op.sign, "paulis": [[q, letter] for q, letter in op.paulis]}


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _postselect_set(diag: Diagram, config: RunConfig) -> list[str] | None:
    if config.postselect == "none":
        return None
    checks = oracle.deterministic_checks(diag)
    if config.postselect == "figure-set" and config.postselect_rounds == "first":
        checks = {c for c in checks if c.startswith("r1.")}
    return sorted(checks)


# -- layout -------------------------------------------------------------------


def cmd_layout(config: RunConfig) -> int:
    layout = build_layout(config.distance)
    pattern = _pattern(layout, config.scheme)
    diag = build_diagram(CircuitSpec(layout, pattern, rounds=1))
    det = sorted(oracle.deterministic_checks(diag))
    z_l, x_l, y_l = logical_operators(layout)
    doc = {
        "version": 1,
        "distance": layout.d,
        "scheme": config.scheme,
        "data_qubits": [{"index": q, "col": c, "row": r}
                        for q, (c, r) in enumerate(layout.data_qubits)],
        "x_plaquettes": [{"id": p.id, "support": list(p.support), "pos": list(p.pos)}
                         for p in layout.x_plaquettes],
        "z_plaquettes": [{"id": p.id, "support": list(p.support), "pos": list(p.pos)}
                         for p in layout.z_plaquettes],
        "logical_operators": {"Z": _pauli_doc(z_l), "X": _pauli_doc(x_l),
                              "Y": _pauli_doc(y_l)},
        "init_pattern": {str(q): pattern[q].value for q in sorted(pattern)},
        "deterministic_checks": det,
        "postselect": det,
    }
    _emit(json.dumps(doc, indent=2) + "\n", config.out)
    return 0


# -- webs ---------------------------------------------------------------------


def cmd_webs(config: RunConfig) -> int:
    layout = build_layout(config.distance)
    diag = build_diagram(CircuitSpec(layout, _pattern(layout, config.scheme),
                                     rounds=config.rounds))
    which = config.correlator
    if which == "auto":
        which = {"memory-z": "Z", "memory-x": "X", "inject-y": "Y"}[config.scheme]
    correlator_web = None
    if which != "none":
        z_l, x_l, y_l = logical_operators(layout)
        op = {"Z": z_l, "X": x_l, "Y": y_l}[which]
        result = webs.solve(diag, correlator_boundary_condition(diag, op))
        if isinstance(result, webs.Infeasible):
            sys.stderr.write(f"{which} correlator is infeasible\n{result}\n")
            return VERIFY_ERROR
        correlator_web = result
    if config.fmt in ("dot", "tikz"):
        marks = {}
        if correlator_web is not None:
            marks = {e: hl.value for e, hl in correlator_web.highlight_map().items()}
        _emit(export(diag, marks, fmt=config.fmt), config.out)
        return 0
    space = webs.web_space(diag)
    detector_webs = webs.detectors(diag)
    doc = {
        "version": 1,
        "config": {"distance": config.distance, "rounds": config.rounds,
                   "scheme": config.scheme, "correlator": which},
        "web_space": {"edges": len(diag.edges), "rank": space.rank,
                      "dimension": space.dim},
        "detectors": [{"stub_set": sorted(w.stub_set()), "web": w.to_highlights()}
                      for w in detector_webs],
    }
    if correlator_web is not None:
        doc["correlator"] = {
            "operator": which,
            "boundary": {leg: hl.value
                         for leg, hl in sorted(correlator_web.boundary_restriction().items())},
            "stub_set": sorted(correlator_web.stub_set()),
            "web": correlator_web.to_highlights(),
        }
    _emit(json.dumps(doc, indent=2) + "\n", config.out)
    return 0


# -- verify -------------------------------------------------------------------


def cmd_verify(config: RunConfig, exhaustive: bool, samples: int,
               footnote5: bool) -> int:
    results = verify.run_suite(
        config.distance, config.scheme, config.rounds,
        seed=config.seed, shots=config.shots,
        exhaustive_errors=exhaustive, samples=samples, footnote5=footnote5)
    failures = 0
    lines = []
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        failures += 0 if res.ok else 1
        lines.append(f"{status} {res.name}: {res.detail}")
    lines.append(f"{len(results) - failures}/{len(results)} checks passed")
    _emit("\n".join(lines) + "\n", config.out)
    return 0 if failures == 0 else VERIFY_ERROR


# -- sample -------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    p_hat = successes / trials
    denom = 1 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _parse_error_flags(diag: Diagram, layout: Layout,
                       flags: tuple[str, ...]) -> list[tuple[tuple[str, str], str]]:
    items = []
    for flag in flags:
        try:
            letter, qubit_text = flag.split(":")
            qubit = int(qubit_text)
        except ValueError as exc:
            raise ValueError(f"bad --error {flag!r}; expected LETTER:QUBIT") from exc
        if letter not in ("X", "Z", "Y"):
            raise ValueError(f"bad --error letter {letter!r}")
        if not 0 <= qubit < layout.n:
            raise ValueError(f"--error qubit {qubit} outside the lattice")
        items.append(((f"q{qubit}.l0", f"q{qubit}.l1"), letter))
    return items


def cmd_sample(config: RunConfig) -> int:
    layout = build_layout(config.distance)
    diag = build_diagram(CircuitSpec(layout, _pattern(layout, config.scheme),
                                     rounds=config.rounds))
    logical = _logical(layout, config.scheme)
    postselect = _postselect_set(diag, config)
    fixed_errors = _parse_error_flags(diag, layout, config.errors)
    rows = []
    record_lines = []
    n_accepted = 0
    n_flip_raw = 0
    n_flip_accepted = 0
    for shot in range(config.shots):
        items = list(fixed_errors)
        for q in range(layout.n):
            if config.error_rate and oracle.counter_unit(
                    config.seed, shot, f"errx:{q}") < config.error_rate:
                items.append(((f"q{q}.l0", f"q{q}.l1"), "X"))
            if config.z_error_rate and oracle.counter_unit(
                    config.seed, shot, f"errz:{q}") < config.z_error_rate:
                items.append(((f"q{q}.l0", f"q{q}.l1"), "Z"))
        err = webs.PauliErrorSet.of(diag, items)
        rec = oracle.run(diag, err, seed=config.seed, shot=shot,
                         postselect=postselect, measure_logical=logical)
        accepted = rec.accepted if rec.accepted is not None else True
        n_accepted += accepted
        n_flip_raw += rec.logical_y
        if accepted:
            n_flip_accepted += rec.logical_y
        rows.append((shot, int(accepted), rec.logical_y, len(items)))
        if config.fmt == "jsonl":
            record_lines.append(json.dumps({
                "shot": shot,
                "n_errors": len(items),
                "outcomes": {k: rec.outcomes[k] for k in sorted(rec.outcomes)},
                "forced": {k: rec.forced[k] for k in sorted(rec.forced)},
                "accepted": rec.accepted,
                "logical_y": rec.logical_y,
            }, separators=(",", ":")))
    raw_lo, raw_hi = wilson_interval(n_flip_raw, config.shots)
    cond_lo, cond_hi = wilson_interval(n_flip_accepted, n_accepted)
    summary = {
        "shots": config.shots,
        "acceptance_rate": round(n_accepted / config.shots, 6),
        "logical_error_rate_raw": round(n_flip_raw / config.shots, 6),
        "logical_error_rate_raw_ci95": [round(raw_lo, 6), round(raw_hi, 6)],
        "accepted_shots": n_accepted,
        "logical_error_rate_accepted": (
            round(n_flip_accepted / n_accepted, 6) if n_accepted else None),
        "logical_error_rate_accepted_ci95": (
            [round(cond_lo, 6), round(cond_hi, 6)] if n_accepted else None),
    }
    if config.fmt == "csv":
        lines = ["shot,accepted,logical_y,n_errors"]
        lines.extend(f"{s},{a},{ly},{ne}" for s, a, ly, ne in rows)
        _emit("\n".join(lines) + "\n", config.out)
        sys.stderr.write(json.dumps(summary, sort_keys=True) + "\n")
    elif config.fmt == "jsonl":
        _emit("\n".join(record_lines) + "\n", config.out)
        sys.stderr.write(json.dumps(summary, sort_keys=True) + "\n")
    else:
        doc = {"version": 1, "summary": summary,
               "shots": [{"shot": s, "accepted": bool(a), "logical_y": ly,
                          "n_errors": ne} for s, a, ly, ne in rows]}
        _emit(json.dumps(doc, indent=2) + "\n", config.out)
    return 0


# -- argument parsing ---------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-d", "--distance", type=int, default=5,
                        help="code distance (odd, >= 3)")
    parser.add_argument("--rounds", type=int, default=1,
                        help="full rounds of parity measurement")
    parser.add_argument("--scheme", choices=SCHEMES, default="inject-y")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zxwebs",
        description="Pauli webs and stabilizer-oracle experiments for "
                    "surface-code memory and Y-state injection")
    sub = parser.add_subparsers(dest="command", required=True)

    p_layout = sub.add_parser("layout", help="emit the lattice layout document")
    _add_common(p_layout)

    p_webs = sub.add_parser("webs", help="emit web space, correlator and detectors")
    _add_common(p_webs)
    p_webs.add_argument("--correlator", choices=("Y", "Z", "X", "none", "auto"),
                        default="auto")
    p_webs.add_argument("--format", dest="fmt", choices=("json", "dot", "tikz"),
                        default="json")

    p_verify = sub.add_parser("verify", help="run the web/oracle cross-check suite")
    _add_common(p_verify)
    p_verify.add_argument("--shots", type=int, default=200)
    p_verify.add_argument("--exhaustive-errors", action="store_true")
    p_verify.add_argument("--samples", type=int, default=0,
                          help="random error insertions for syndrome checks")
    p_verify.add_argument("--footnote5", action="store_true",
                          help="include the random-parity tableau reproduction")

    p_sample = sub.add_parser("sample", help="Monte Carlo with init-time errors")
    _add_common(p_sample)
    p_sample.add_argument("--shots", type=int, default=1000)
    p_sample.add_argument("-p", "--error-rate", type=float, default=0.0,
                          help="i.i.d. init X error rate per qubit")
    p_sample.add_argument("--z-error-rate", type=float, default=0.0)
    p_sample.add_argument("--error", action="append", default=[],
                          metavar="LETTER:QUBIT",
                          help="deterministic init error, repeatable (e.g. X:14)")
    p_sample.add_argument("--postselect",
                          choices=("none", "figure-set", "all-deterministic"),
                          default="none")
    p_sample.add_argument("--postselect-rounds", choices=("first", "all"),
                          default="first")
    p_sample.add_argument("--format", dest="fmt", choices=("csv", "json", "jsonl"),
                          default="csv")
    return parser


def _config_from(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(
        distance=args.distance,
        rounds=args.rounds,
        scheme=args.scheme,
        seed=args.seed,
        out=args.out,
    )
    for name in ("shots", "error_rate", "z_error_rate", "postselect",
                 "postselect_rounds", "fmt", "correlator"):
        if hasattr(args, name):
            setattr(config, name, getattr(args, name))
    if hasattr(args, "error"):
        config.errors = tuple(args.error)
    config.validate()
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from(args)
        if args.command == "layout":
            return cmd_layout(config)
        if args.command == "webs":
            return cmd_webs(config)
        if args.command == "verify":
            return cmd_verify(config, args.exhaustive_errors, args.samples,
                              args.footnote5)
        if args.command == "sample":
            return cmd_sample(config)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_ERROR
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
