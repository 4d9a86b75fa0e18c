"""Independent stabilizer-tableau oracle for the surface-code diagrams.

The tableau follows the Aaronson-Gottesman CHP layout: 2n generator rows
(n destabilizers then n stabilizers) with X/Z bit matrices and a sign bit
per row, using the Hermitian convention P(x,z) = i^{xz} X^x Z^z. On top of
the standard machinery this tableau tracks, per row, which random
measurement outcomes its sign depends on (a bitmask of "random events"),
so forced-outcome analysis can tell apart "deterministically +1" from
"determined by earlier coin flips".

Diagrams built by :mod:`zxwebs.surface` are lowered structurally (layer 0
becomes a product-state preparation, each measurement layer a list of
whole-plaquette Pauli measurements); nothing is trusted from metadata.

Randomness contract: every random bit is drawn from a counter-based
generator keyed by (seed, shot index, instruction token), so shots are
reproducible and independent of execution order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import gf2
from .diagram import Color, Diagram, Kind, Node
from .pauli import PauliOperator
from .surface import InitPattern, InitState
from .webs import PauliErrorSet


# -- counter-based randomness -------------------------------------------------


def counter_bit(seed: int, shot: int, token: str) -> int:
    """One reproducible random bit keyed by (seed, shot, token)."""
    digest = hashlib.blake2b(f"{seed}:{shot}:{token}".encode(), digest_size=8).digest()
    return digest[0] & 1


def counter_unit(seed: int, shot: int, token: str) -> float:
    """One reproducible uniform float in [0, 1)."""
    digest = hashlib.blake2b(f"{seed}:{shot}:{token}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2**64


# -- tableau ------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureResult:
    outcome: int
    deterministic: bool
    aux: int  # bitmask of random events the outcome depends on (0 = none)


def _word_product(xa: np.ndarray, za: np.ndarray, xb: np.ndarray, zb: np.ndarray) -> int:
    """i-exponent of P(xa,za) * P(xb,zb), summed over qubits mod 4."""
    a = xa.astype(np.int16)
    b = za.astype(np.int16)
    c = xb.astype(np.int16)
    e = zb.astype(np.int16)
    total = int(np.sum(a * b + c * e + 2 * b * c - (a ^ c) * (b ^ e)))
    return total % 4


class Tableau:
    """Stabilizer/destabilizer tableau with native multi-qubit Pauli measurement."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.xs = np.zeros((2 * n, n), dtype=np.uint8)
        self.zs = np.zeros((2 * n, n), dtype=np.uint8)
        self.signs = np.zeros(2 * n, dtype=np.uint8)
        self.aux = [0] * (2 * n)
        self.random_events = 0
        for q in range(n):
            self.xs[q, q] = 1          # destabilizer X_q
            self.zs[n + q, q] = 1      # stabilizer Z_q

    # -- helpers --

    def _op_vectors(self, op: PauliOperator) -> tuple[np.ndarray, np.ndarray, int]:
        if op.n != self.n:
            raise ValueError(f"operator acts on {op.n} qubits, tableau has {self.n}")
        x = np.zeros(self.n, dtype=np.uint8)
        z = np.zeros(self.n, dtype=np.uint8)
        for q in op.x_bits():
            x[q] = 1
        for q in op.z_bits():
            z[q] = 1
        return x, z, 0 if op.sign == 1 else 1

    def _anticommute_mask(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        overlap = self.xs.astype(np.int16) @ z.astype(np.int16) \
            + self.zs.astype(np.int16) @ x.astype(np.int16)
        return (overlap % 2).astype(np.uint8)

    def _rowmult(self, h: int, i: int) -> None:
        """row_h := row_i * row_h, with exact sign tracking."""
        exponent = _word_product(self.xs[i], self.zs[i], self.xs[h], self.zs[h])
        total = (2 * int(self.signs[i]) + 2 * int(self.signs[h]) + exponent) % 4
        if total % 2:
            raise AssertionError("row product is anti-Hermitian; tableau corrupted")
        self.signs[h] = total // 2
        self.xs[h] ^= self.xs[i]
        self.zs[h] ^= self.zs[i]
        self.aux[h] ^= self.aux[i]

    # -- operations --

    def apply_pauli(self, op: PauliOperator) -> None:
        """Conjugate the state by a Pauli: flips signs of anticommuting rows."""
        x, z, _ = self._op_vectors(op)
        self.signs ^= self._anticommute_mask(x, z)

    def measure(self, op: PauliOperator, random_bit: int | None = None) -> MeasureResult:
        """Measure a (multi-qubit) Pauli, updating the state.

        If no stabilizer anticommutes the outcome is forced and returned
        with deterministic=True. Otherwise the outcome is ``random_bit``
        (which the caller must supply, enabling both seeded sampling and
        forced-outcome post-selection) and the tableau is projected.
        """
        x, z, sign_bit = self._op_vectors(op)
        anti = self._anticommute_mask(x, z)
        stab_hits = np.nonzero(anti[self.n:])[0]
        if stab_hits.size:
            p = self.n + int(stab_hits[0])
            if random_bit is None:
                raise ValueError("measurement outcome is random: a random bit is required")
            for h in np.nonzero(anti)[0]:
                h = int(h)
                if h == p or h == p - self.n:
                    continue  # the partner destabilizer is overwritten below
                self._rowmult(h, p)
            self.xs[p - self.n] = self.xs[p].copy()
            self.zs[p - self.n] = self.zs[p].copy()
            self.signs[p - self.n] = self.signs[p]
            self.aux[p - self.n] = self.aux[p]
            event = 1 << self.random_events
            self.random_events += 1
            outcome = random_bit & 1
            self.xs[p] = x
            self.zs[p] = z
            self.signs[p] = (outcome + sign_bit) % 2
            self.aux[p] = event
            return MeasureResult(outcome=outcome, deterministic=False, aux=event)
        # deterministic: express op as a product of stabilizers via destabilizers
        sx = np.zeros(self.n, dtype=np.uint8)
        sz = np.zeros(self.n, dtype=np.uint8)
        phase = 0
        aux_mask = 0
        for j in range(self.n):
            if anti[j]:
                s = self.n + j
                phase = (phase + 2 * int(self.signs[s])
                         + _word_product(sx, sz, self.xs[s], self.zs[s])) % 4
                sx ^= self.xs[s]
                sz ^= self.zs[s]
                aux_mask ^= self.aux[s]
        if not (np.array_equal(sx, x) and np.array_equal(sz, z)) or phase % 2:
            raise AssertionError("deterministic measurement did not reproduce the operator")
        outcome = (phase // 2 + sign_bit) % 2
        return MeasureResult(outcome=outcome, deterministic=True, aux=aux_mask)

    def row_operator(self, row: int) -> PauliOperator:
        mapping: dict[int, str] = {}
        for q in range(self.n):
            bits = (int(self.xs[row, q]), int(self.zs[row, q]))
            letter = {(1, 0): "X", (0, 1): "Z", (1, 1): "Y"}.get(bits)
            if letter:
                mapping[q] = letter
        return PauliOperator.from_dict(self.n, mapping, -1 if self.signs[row] else 1)

    def stabilizers(self) -> list[PauliOperator]:
        return [self.row_operator(self.n + i) for i in range(self.n)]

    def destabilizers(self) -> list[PauliOperator]:
        return [self.row_operator(i) for i in range(self.n)]

    def check_valid(self) -> None:
        """Commutation and rank sanity checks (debug aid)."""
        for i in range(self.n, 2 * self.n):
            anti = self._anticommute_mask(self.xs[i], self.zs[i])
            if anti[self.n:].any():
                raise AssertionError("stabilizer rows do not pairwise commute")
            expected = np.zeros(self.n, dtype=np.uint8)
            expected[i - self.n] = 1
            if not np.array_equal(anti[: self.n], expected):
                raise AssertionError("destabilizer pairing broken")
        full = np.concatenate([self.xs, self.zs], axis=1)
        if gf2.rank(full) != 2 * self.n:
            raise AssertionError("tableau lost full rank")


def prepare(pattern: InitPattern) -> Tableau:
    """Product-state tableau for an init pattern (qubit -> Zero/Plus/YState)."""
    if not pattern:
        raise ValueError("init pattern is empty")
    n = len(pattern)
    if set(pattern) != set(range(n)):
        raise ValueError("init pattern must use contiguous qubit indices 0..n-1")
    t = Tableau(n)
    for q in range(n):
        state = pattern[q]
        if state is InitState.ZERO:
            continue  # default rows already Z_q / X_q
        if state is InitState.PLUS:
            # stabilizer X_q, destabilizer Z_q
            t.xs[n + q, q], t.zs[n + q, q] = 1, 0
            t.xs[q, q], t.zs[q, q] = 0, 1
        elif state is InitState.Y:
            # stabilizer Y_q, destabilizer Z_q
            t.xs[n + q, q], t.zs[n + q, q] = 1, 1
            t.xs[q, q], t.zs[q, q] = 0, 1
        else:
            raise ValueError(f"unknown init state {state!r}")
    return t


def canonical_group(n: int, generators: Iterable[PauliOperator]) -> tuple[PauliOperator, ...]:
    """Canonical generating set of a stabilizer group (RREF with signs).

    Two generator lists describe the same group iff their canonical forms
    are equal. Raises if the generators are inconsistent (-I in the group).
    """
    rows: list[tuple[np.ndarray, np.ndarray, int]] = []
    for op in generators:
        if op.n != n:
            raise ValueError("generator qubit count mismatch")
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        for q in op.x_bits():
            x[q] = 1
        for q in op.z_bits():
            z[q] = 1
        rows.append((x, z, 0 if op.sign == 1 else 1))

    def mul(a, b):
        exponent = (2 * a[2] + 2 * b[2] + _word_product(a[0], a[1], b[0], b[1])) % 4
        if exponent % 2:
            raise ValueError("generators do not commute")
        return (a[0] ^ b[0], a[1] ^ b[1], exponent // 2)

    r = 0
    for col in range(2 * n):
        def bit(row):
            return row[0][col] if col < n else row[1][col - n]
        pivot = next((k for k in range(r, len(rows)) if bit(rows[k])), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for k in range(len(rows)):
            if k != r and bit(rows[k]):
                rows[k] = mul(rows[r], rows[k])
        r += 1
    out = []
    for x, z, sign in rows:
        if not x.any() and not z.any():
            if sign:
                raise ValueError("-identity generated; inconsistent generator set")
            continue
        mapping = {}
        for q in range(n):
            letter = {(1, 0): "X", (0, 1): "Z", (1, 1): "Y"}.get((int(x[q]), int(z[q])))
            if letter:
                mapping[q] = letter
        out.append(PauliOperator.from_dict(n, mapping, -1 if sign else 1))
    return tuple(out)


def canonical_stabilizer_group(t: Tableau) -> tuple[PauliOperator, ...]:
    return canonical_group(t.n, t.stabilizers())


# -- diagram lowering ---------------------------------------------------------


class LoweringError(ValueError):
    """The diagram does not have the recognizable builder layer structure."""


@dataclass(frozen=True)
class CheckInfo:
    check_id: str
    layer: int
    round: int
    ptype: str
    support: tuple[int, ...]
    pos: tuple[int, int]


@dataclass(frozen=True)
class DiagramStructure:
    """Structural reading of a builder diagram (qubits, layers, checks)."""

    distance: int
    rounds: int
    init: "dict[int, InitState]"
    checks: tuple[CheckInfo, ...]          # in measurement order
    world_nodes: "dict[int, tuple[str, ...]]"
    edge_slots: "dict[tuple[str, str], tuple[int, int]]"  # edge -> (qubit, after_layer)

    @property
    def n(self) -> int:
        return self.distance * self.distance

    def world_edges(self, qubit: int) -> list[tuple[str, str]]:
        chain = self.world_nodes[qubit]
        return [(a, b) for a, b in zip(chain, chain[1:])]


_INIT_OF_SPIDER = {
    (Color.Z, 0): InitState.PLUS,
    (Color.X, 0): InitState.ZERO,
    (Color.Z, 1): InitState.Y,
}


def diagram_structure(d: Diagram) -> DiagramStructure:
    """Parse a builder diagram into qubits, world lines and plaquette checks."""
    by_layer: dict[int, list[Node]] = {}
    for node in d.nodes:
        by_layer.setdefault(node.pos[2], []).append(node)
    if 0 not in by_layer:
        raise LoweringError("no layer-0 initialization slice")
    init_nodes = [n for n in by_layer[0] if n.kind is Kind.SPIDER]
    if len(init_nodes) != len(by_layer[0]):
        raise LoweringError("layer 0 must contain only init spiders")
    n_qubits = len(init_nodes)
    distance = math.isqrt(n_qubits)
    if distance * distance != n_qubits or distance < 3:
        raise LoweringError(f"layer 0 has {n_qubits} spiders; expected an odd square >= 9")
    grid = {(2 * c, 2 * r) for c in range(distance) for r in range(distance)}
    if {(n.pos[0], n.pos[1]) for n in init_nodes} != grid:
        raise LoweringError("init spiders do not fill the doubled data-qubit grid")

    def qubit_at(node: Node) -> int:
        return distance * (node.pos[0] // 2) + node.pos[1] // 2

    init: dict[int, InitState] = {}
    for node in init_nodes:
        key = (node.color, node.phase.value)
        if key not in _INIT_OF_SPIDER:
            raise LoweringError(f"init spider {node.id} has unsupported color/phase {key}")
        init[qubit_at(node)] = _INIT_OF_SPIDER[key]

    top_layer = max(by_layer)
    meas_layers = sorted(layer for layer in by_layer if 0 < layer < top_layer)
    if meas_layers != list(range(1, top_layer)) or (top_layer - 1) % 2 != 0:
        raise LoweringError("measurement layers must be 1..2*rounds with outputs above")
    rounds = (top_layer - 1) // 2

    checks: list[CheckInfo] = []
    world_members: dict[int, list[Node]] = {}
    for node in init_nodes:
        world_members[qubit_at(node)] = [node]
    for layer in meas_layers:
        is_x_layer = layer % 2 == 1
        data_color = Color.X if is_x_layer else Color.Z
        ancilla_color = data_color.opposite
        round_no = (layer + 1) // 2
        layer_checks = []
        for node in by_layer[layer]:
            if node.kind is Kind.MEASURE_OUT:
                continue
            if node.kind is not Kind.SPIDER:
                raise LoweringError(f"unexpected {node.kind.value} node {node.id} in layer {layer}")
            if (node.pos[0], node.pos[1]) in grid:
                if node.color is not data_color or node.phase.value != 0:
                    raise LoweringError(f"data spider {node.id} has wrong color/phase for its layer")
                world_members[qubit_at(node)].append(node)
                continue
            if node.color is not ancilla_color or node.phase.value != 0:
                raise LoweringError(f"ancilla {node.id} has wrong color/phase for its layer")
            stub = [m for m in map(d.node, d.neighbors(node.id))
                    if m.kind is Kind.MEASURE_OUT]
            if len(stub) != 1:
                raise LoweringError(f"ancilla {node.id} needs exactly one outcome stub")
            support = []
            for other in map(d.node, d.neighbors(node.id)):
                if other.kind is Kind.MEASURE_OUT:
                    continue
                if other.pos[2] != layer or (other.pos[0], other.pos[1]) not in grid:
                    raise LoweringError(f"ancilla {node.id} connects outside its layer")
                support.append(qubit_at(other))
            layer_checks.append(CheckInfo(
                check_id=stub[0].check_id, layer=layer, round=round_no,
                ptype="X" if is_x_layer else "Z",
                support=tuple(sorted(support)),
                pos=(node.pos[0], node.pos[1]),
            ))
        layer_checks.sort(key=lambda c: c.pos)
        checks.extend(layer_checks)

    world_nodes: dict[int, tuple[str, ...]] = {}
    edge_slots: dict[tuple[str, str], tuple[int, int]] = {}
    outs = [n for n in by_layer[top_layer]]
    if len(outs) != n_qubits or any(n.kind is not Kind.BOUNDARY_OUT for n in outs):
        raise LoweringError("top layer must hold exactly one output leg per data qubit")
    out_of: dict[int, Node] = {qubit_at(n): n for n in outs}
    for q in range(n_qubits):
        chain = sorted(world_members[q], key=lambda m: m.pos[2])
        members = [m.id for m in chain] + [out_of[q].id]
        for a, b in zip(members, members[1:]):
            if not d.has_edge(a, b):
                raise LoweringError(f"world line of qubit {q} broken between {a} and {b}")
            low = min(d.node(a).pos[2], d.node(b).pos[2])
            edge_slots[d.edge_key(a, b)] = (q, low)
        world_nodes[q] = tuple(members)
    return DiagramStructure(distance=distance, rounds=rounds, init=init,
                            checks=tuple(checks), world_nodes=world_nodes,
                            edge_slots=edge_slots)


# -- instruction stream -------------------------------------------------------


@dataclass(frozen=True)
class Prepare:
    pattern: tuple[tuple[int, InitState], ...]


@dataclass(frozen=True)
class ApplyPauli:
    qubit: int
    letter: str


@dataclass(frozen=True)
class MeasureCheck:
    check_id: str
    op: PauliOperator


Instruction = Prepare | ApplyPauli | MeasureCheck


def lower(d: Diagram, errors: PauliErrorSet | None = None) -> list[Instruction]:
    """Instruction stream: prepare, then whole-plaquette measurements in order.

    Error insertions are placed right after the measurements of the layer
    below their edge (layer 0 inserts immediately after preparation).
    Errors on non-world-line edges are not representable and are rejected.
    """
    structure = diagram_structure(d)
    n = structure.n
    slots: dict[int, list[ApplyPauli]] = {}
    if errors is not None:
        for edge, letter in errors.insertions:
            key = d.edge_key(*edge)
            if key not in structure.edge_slots:
                raise LoweringError(
                    f"error on {d.edge_name(key)} is not on a data world line")
            q, after_layer = structure.edge_slots[key]
            slots.setdefault(after_layer, []).append(ApplyPauli(qubit=q, letter=letter))
    for pending in slots.values():
        pending.sort(key=lambda a: (a.qubit, a.letter))
    instrs: list[Instruction] = [
        Prepare(pattern=tuple(sorted(structure.init.items())))
    ]
    instrs.extend(slots.get(0, []))
    for layer in range(1, 2 * structure.rounds + 1):
        for check in structure.checks:
            if check.layer != layer:
                continue
            op = PauliOperator.from_dict(n, {q: check.ptype for q in check.support})
            instrs.append(MeasureCheck(check_id=check.check_id, op=op))
        instrs.extend(slots.get(layer, []))
    return instrs


# -- shots --------------------------------------------------------------------


@dataclass(frozen=True)
class ShotRecord:
    """Outcome record of one oracle execution."""

    outcomes: dict[str, int]
    forced: dict[str, bool]
    accepted: bool | None = None
    logical_y: int | None = None

    def to_json(self) -> str:
        doc = {
            "outcomes": {k: self.outcomes[k] for k in sorted(self.outcomes)},
            "forced": {k: self.forced[k] for k in sorted(self.forced)},
            "accepted": self.accepted,
            "logical_y": self.logical_y,
        }
        return json.dumps(doc, separators=(",", ":"))


def run(d: Diagram, errors: PauliErrorSet | None = None, *, seed: int = 0,
        shot: int = 0, postselect: Iterable[str] | None = None,
        measure_logical: PauliOperator | None = None,
        forced_outcomes: Mapping[str, int] | None = None) -> ShotRecord:
    """Execute one shot of the lowered diagram.

    ``postselect`` names check_ids that must all return +1 (bit 0) for the
    shot to be accepted. ``forced_outcomes`` pins the named random
    measurements to given bits (conditioning, for determinism analysis);
    everything else draws from the counter-based generator.
    """
    instrs = lower(d, errors)
    forced_outcomes = dict(forced_outcomes or {})
    outcomes: dict[str, int] = {}
    forced: dict[str, bool] = {}
    tableau: Tableau | None = None
    for index, instr in enumerate(instrs):
        if isinstance(instr, Prepare):
            tableau = prepare(dict(instr.pattern))
        elif isinstance(instr, ApplyPauli):
            tableau.apply_pauli(PauliOperator.single(tableau.n, instr.qubit, instr.letter))
        else:
            bit = forced_outcomes.get(instr.check_id)
            if bit is None:
                bit = counter_bit(seed, shot, f"m{index}")
            result = tableau.measure(instr.op, random_bit=bit)
            outcomes[instr.check_id] = result.outcome
            forced[instr.check_id] = result.deterministic
    accepted: bool | None = None
    if postselect is not None:
        wanted = list(postselect)
        unknown = sorted(set(wanted) - set(outcomes))
        if unknown:
            raise ValueError(f"unknown check ids in postselect set: {unknown}")
        accepted = all(outcomes[c] == 0 for c in wanted)
    logical_y: int | None = None
    if measure_logical is not None:
        result = tableau.measure(measure_logical,
                                 random_bit=counter_bit(seed, shot, "logical"))
        logical_y = result.outcome
    return ShotRecord(outcomes=outcomes, forced=forced,
                      accepted=accepted, logical_y=logical_y)


def deterministic_checks(d: Diagram) -> frozenset[str]:
    """check_ids whose error-free outcome is forced to +1 regardless of coins.

    Runs the lowered circuit once with symbolic outcome tracking: a check
    qualifies iff its outcome is deterministic and independent of every
    random-event bit (so repeats that merely echo an earlier coin flip do
    not qualify).
    """
    tableau: Tableau | None = None
    out: set[str] = set()
    for instr in lower(d):
        if isinstance(instr, Prepare):
            tableau = prepare(dict(instr.pattern))
        elif isinstance(instr, MeasureCheck):
            result = tableau.measure(instr.op, random_bit=0)
            if result.deterministic and result.aux == 0:
                if result.outcome != 0:
                    raise AssertionError(
                        f"error-free deterministic check {instr.check_id} returned -1")
                out.add(instr.check_id)
    return frozenset(out)
