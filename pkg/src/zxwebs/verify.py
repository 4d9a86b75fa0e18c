"""Web/oracle cross-check suite backing the ``verify`` CLI command.

Each item confronts a web-level statement (solver output) with the
stabilizer tableau, or re-checks a structural property from two
independent directions. Items report pass/fail plus a short detail line;
they never raise on a mere disagreement.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import oracle, webs
from .diagram import Diagram, validate
from .pauli import PauliOperator
from .surface import (
    CircuitSpec,
    InitState,
    Layout,
    build_diagram,
    build_layout,
    correlator_boundary_condition,
    injection_pattern,
    logical_operators,
    memory_pattern,
)
from .webs import Highlight, PauliErrorSet, Web


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _pattern_for(layout: Layout, scheme: str):
    if scheme == "inject-y":
        return injection_pattern(layout)
    if scheme == "memory-z":
        return memory_pattern(layout, "Z")
    if scheme == "memory-x":
        return memory_pattern(layout, "X")
    raise ValueError(f"unknown scheme {scheme!r}")


def _logical_for(layout: Layout, scheme: str) -> PauliOperator:
    z_l, x_l, y_l = logical_operators(layout)
    return {"inject-y": y_l, "memory-z": z_l, "memory-x": x_l}[scheme]


def stub_product(record: oracle.ShotRecord, stub_set) -> int:
    return sum(record.outcomes[c] for c in stub_set) % 2


def check_builder_valid(diag: Diagram) -> CheckResult:
    violations = validate(diag)
    return CheckResult("builder-valid", not violations,
                       f"{len(violations)} violations")


def check_web_space(diag: Diagram) -> CheckResult:
    space = webs.web_space(diag)
    n_vars = 2 * len(diag.edges)
    ok = space.rank + space.dim == n_vars
    bad = sum(1 for w in space.basis if webs.validate_web(diag, w))
    ok = ok and bad == 0
    # degree-1 termination rules, asserted literally on every basis web
    terminations_ok = True
    for w in space.basis:
        for node in diag.spiders():
            if diag.degree(node.id) != 1:
                continue
            leg = diag.incident_edges(node.id)[0]
            x, z = w.x_bit(leg), w.z_bit(leg)
            if node.phase.is_half:
                terminations_ok &= (x == z)
            elif node.color.value == "Z":
                terminations_ok &= (z == 0)
            else:
                terminations_ok &= (x == 0)
    ok = ok and terminations_ok
    return CheckResult(
        "web-space", ok,
        f"rank {space.rank} + dim {space.dim} vs {n_vars} vars; "
        f"{bad} invalid basis webs; terminations {'ok' if terminations_ok else 'BROKEN'}")


def check_linearity(diag: Diagram, combos: int = 200, seed: int = 0) -> CheckResult:
    space = webs.web_space(diag)
    rng = random.Random(seed)
    bad = 0
    for _ in range(combos):
        acc = Web.zero(diag)
        for w in space.basis:
            if rng.random() < 0.5:
                acc = acc ^ w
        if webs.validate_web(diag, acc):
            bad += 1
    return CheckResult("web-linearity", bad == 0,
                       f"{combos} random XOR combinations, {bad} invalid")


def check_detectors(diag: Diagram, seed: int, shots: int) -> CheckResult:
    dets = webs.detectors(diag)
    det_checks = oracle.deterministic_checks(diag)
    single = {next(iter(w.stub_set())) for w in dets if len(w.stub_set()) == 1}
    ok = single == det_checks
    flips = 0
    for s in range(shots):
        rec = oracle.run(diag, seed=seed, shot=s)
        flips += sum(stub_product(rec, w.stub_set()) for w in dets)
    ok = ok and flips == 0
    return CheckResult(
        "detectors-deterministic", ok,
        f"{len(dets)} detector webs; single-stub set "
        f"{'matches' if single == det_checks else 'DIFFERS from'} oracle "
        f"deterministic checks; {flips} nontrivial products over {shots} shots")


def check_correlator(diag: Diagram, layout: Layout, scheme: str,
                     seed: int, shots: int) -> CheckResult:
    op = _logical_for(layout, scheme)
    result = webs.solve(diag, correlator_boundary_condition(diag, op))
    if isinstance(result, webs.Infeasible):
        return CheckResult("correlator", False, str(result))
    if webs.validate_web(diag, result):
        return CheckResult("correlator", False, "solved web fails validate_web")
    if scheme == "inject-y":
        corner = layout.qubit_index(0, layout.d - 1)
        leg = diag.edge_key(f"q{corner}.l0", f"q{corner}.l1")
        if result.highlight(leg) is not Highlight.Y:
            return CheckResult("correlator", False,
                               "injected spider's leg is not Y-highlighted")
    stub_set = result.stub_set()
    bad = 0
    for s in range(shots):
        rec = oracle.run(diag, seed=seed, shot=s, measure_logical=op)
        if (stub_product(rec, stub_set) + rec.logical_y) % 2 != 0:
            bad += 1
    return CheckResult(
        "correlator", bad == 0,
        f"{scheme} logical correlator, stub set {sorted(stub_set)}; "
        f"{bad}/{shots} shots broke the outcome product")


def check_forbidden_termination(diag: Diagram, layout: Layout) -> CheckResult:
    """Only meaningful for inject-y: a Z_L-only web must be infeasible."""
    z_l, _, _ = logical_operators(layout)
    result = webs.solve(diag, correlator_boundary_condition(diag, z_l))
    corner = layout.qubit_index(0, layout.d - 1)
    if not isinstance(result, webs.Infeasible):
        return CheckResult("forbidden-termination", False,
                           "Z-only correlator unexpectedly solvable")
    ok = f"q{corner}.l0" in result.spiders
    return CheckResult("forbidden-termination", ok,
                       f"witness spiders include injected corner: {ok}")


def _world_line_errors(diag: Diagram) -> list[tuple[tuple[str, str], str]]:
    structure = oracle.diagram_structure(diag)
    out = []
    for q in range(structure.n):
        for edge in structure.world_edges(q):
            for letter in ("X", "Z"):
                out.append((edge, letter))
    return out


def check_syndrome_equivalence(diag: Diagram, seed: int,
                               exhaustive: bool, samples: int) -> CheckResult:
    dets = webs.detectors(diag)
    candidates = _world_line_errors(diag)
    rng = random.Random(seed)
    if exhaustive:
        error_sets = [[c] for c in candidates]
    else:
        error_sets = []
        for _ in range(samples):
            k = rng.choice((1, 2))
            error_sets.append([rng.choice(candidates) for _ in range(k)])
    mismatches = 0
    for items in error_sets:
        err = PauliErrorSet.of(diag, items)
        predicted = webs.syndrome(dets, err)
        rec = oracle.run(diag, err, seed=seed)
        actual = np.array([stub_product(rec, w.stub_set()) for w in dets],
                          dtype=np.uint8)
        if not np.array_equal(predicted, actual):
            mismatches += 1
    label = "exhaustive" if exhaustive else f"{samples} sampled"
    return CheckResult("syndrome-equivalence", mismatches == 0,
                       f"{label} insertions ({len(error_sets)} cases), "
                       f"{mismatches} mismatches")


def check_footnote5(seed: int = 0, shots: int = 1000) -> CheckResult:
    """Measuring ZZZZ on <Xa,Xb,Xc,Zd>: random outcome, known post group."""
    pattern = {0: InitState.PLUS, 1: InitState.PLUS, 2: InitState.PLUS,
               3: InitState.ZERO}
    zzzz = PauliOperator.from_dict(4, {q: "Z" for q in range(4)})
    counts = [0, 0]
    group_ok = True
    for s in range(shots):
        t = oracle.prepare(pattern)
        res = t.measure(zzzz, random_bit=oracle.counter_bit(seed, s, "m"))
        if res.deterministic:
            return CheckResult("footnote5", False, "measurement came out deterministic")
        counts[res.outcome] += 1
        expected = oracle.canonical_group(4, [
            zzzz if res.outcome == 0 else zzzz.negated(),
            PauliOperator.from_dict(4, {0: "X", 1: "X"}),
            PauliOperator.from_dict(4, {0: "X", 2: "X"}),
            PauliOperator.from_dict(4, {3: "Z"}),
        ])
        if oracle.canonical_stabilizer_group(t) != expected:
            group_ok = False
    # chi-square with 1 dof against a fair coin
    expected_count = shots / 2
    chi2 = sum((c - expected_count) ** 2 / expected_count for c in counts)
    p_value = math.erfc(math.sqrt(chi2 / 2))
    ok = group_ok and min(counts) > 0 and p_value > 0.001
    return CheckResult("footnote5", ok,
                       f"outcome counts {counts}, chi2 p={p_value:.4f}, "
                       f"post-measurement group {'ok' if group_ok else 'WRONG'}")


def run_suite(distance: int, scheme: str, rounds: int, *, seed: int = 0,
              shots: int = 200, exhaustive_errors: bool = False,
              samples: int = 0, footnote5: bool = False) -> list[CheckResult]:
    layout = build_layout(distance)
    diag = build_diagram(CircuitSpec(layout, _pattern_for(layout, scheme), rounds))
    results = [
        check_builder_valid(diag),
        check_web_space(diag),
        check_linearity(diag, seed=seed),
        check_detectors(diag, seed, shots),
        check_correlator(diag, layout, scheme, seed, shots),
    ]
    if scheme == "inject-y":
        results.append(check_forbidden_termination(diag, layout))
    if exhaustive_errors or samples:
        results.append(check_syndrome_equivalence(
            diag, seed, exhaustive=exhaustive_errors, samples=samples))
    if footnote5:
        results.append(check_footnote5(seed))
    return results
