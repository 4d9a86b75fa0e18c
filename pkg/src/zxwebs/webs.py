"""Pauli webs as GF(2) linear algebra over a diagram's edge highlights.

Every edge e carries two bits (x_e, z_e); a highlight of X means x_e = 1,
Z means z_e = 1 and Y means both. A web is an assignment satisfying, at
every spider (own color = the spider's color, opposite = the other):

* all or none of the legs carry the opposite color, and
* the number of legs carrying the own color is even for a k*pi phase, and
  equals the shared opposite-color value mod 2 for a ±pi/2 phase (odd own
  count together with all legs opposite, or the trivial even/none option).

Degree-1 non-spider legs (open boundaries and measurement stubs) are
unconstrained by the spider rules. Measurement stubs are read in a fixed
basis, so outcome-carrying webs may only highlight a stub edge with the
measured-parity color (the ancilla's opposite color); solve() and
detectors() impose that restriction by default.

Variables are ordered x_e, z_e per edge, edges in canonical diagram order.
Webs are unsigned supports: all sign statements are delegated to the
stabilizer oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import gf2
from .diagram import Color, Diagram, DiagramError, Kind, Node, validate

_BOUNDARY_KINDS = (Kind.BOUNDARY_IN, Kind.BOUNDARY_OUT)


class Highlight(Enum):
    NONE = "I"
    X = "X"
    Z = "Z"
    Y = "Y"

    @property
    def bits(self) -> tuple[int, int]:
        return {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}[self.value]

    @classmethod
    def from_bits(cls, x: int, z: int) -> "Highlight":
        return {(0, 0): cls.NONE, (1, 0): cls.X, (0, 1): cls.Z, (1, 1): cls.Y}[(x & 1, z & 1)]


def x_var(d: Diagram, edge: tuple[str, str]) -> int:
    return 2 * d.edge_index(*edge)


def z_var(d: Diagram, edge: tuple[str, str]) -> int:
    return 2 * d.edge_index(*edge) + 1


def _own_offset(color: Color) -> int:
    # variable layout is (x_e, z_e): a Z spider's own bit is the z bit
    return 1 if color is Color.Z else 0


def stub_edges(d: Diagram) -> list[tuple[str, str]]:
    """Edges attached to measurement stubs, in canonical edge order."""
    out = [e for e in d.edges
           if d.node(e[0]).kind is Kind.MEASURE_OUT or d.node(e[1]).kind is Kind.MEASURE_OUT]
    return out


def boundary_leg_edges(d: Diagram) -> list[tuple[str, str]]:
    return [e for e in d.edges
            if d.node(e[0]).kind in _BOUNDARY_KINDS or d.node(e[1]).kind in _BOUNDARY_KINDS]


def _stub_parts(d: Diagram, edge: tuple[str, str]) -> tuple[Node, Node]:
    a, b = d.node(edge[0]), d.node(edge[1])
    if a.kind is Kind.MEASURE_OUT:
        return a, b
    return b, a


class Web:
    """One highlight assignment over a diagram's edges."""

    def __init__(self, diagram: Diagram, bits: np.ndarray):
        bits = np.asarray(bits, dtype=np.uint8) & 1
        if bits.shape != (2 * len(diagram.edges),):
            raise ValueError("bit vector length must be 2 * number of edges")
        self.diagram = diagram
        self.bits = bits

    @classmethod
    def zero(cls, diagram: Diagram) -> "Web":
        return cls(diagram, np.zeros(2 * len(diagram.edges), dtype=np.uint8))

    @classmethod
    def from_edge_map(cls, diagram: Diagram,
                      highlights: Mapping[tuple[str, str], Highlight]) -> "Web":
        web = cls.zero(diagram)
        for edge, hl in highlights.items():
            if not diagram.has_edge(*edge):
                raise DiagramError(f"web references edge {edge!r} absent from diagram")
            x, z = hl.bits
            web.bits[x_var(diagram, edge)] = x
            web.bits[z_var(diagram, edge)] = z
        return web

    @classmethod
    def from_highlight_names(cls, diagram: Diagram,
                             named: Mapping[str, str]) -> "Web":
        return cls.from_edge_map(diagram, {
            diagram.edge_from_name(name): Highlight(letter)
            for name, letter in named.items()
        })

    def x_bit(self, edge: tuple[str, str]) -> int:
        return int(self.bits[x_var(self.diagram, edge)])

    def z_bit(self, edge: tuple[str, str]) -> int:
        return int(self.bits[z_var(self.diagram, edge)])

    def highlight(self, edge: tuple[str, str]) -> Highlight:
        return Highlight.from_bits(self.x_bit(edge), self.z_bit(edge))

    def highlight_map(self) -> dict[tuple[str, str], Highlight]:
        """Nonzero highlights keyed by canonical edge pair."""
        out: dict[tuple[str, str], Highlight] = {}
        for i, edge in enumerate(self.diagram.edges):
            hl = Highlight.from_bits(self.bits[2 * i], self.bits[2 * i + 1])
            if hl is not Highlight.NONE:
                out[edge] = hl
        return out

    def to_highlights(self) -> dict[str, str]:
        """Document form: edge name -> highlight letter (nonzero only)."""
        return {self.diagram.edge_name(e): hl.value
                for e, hl in self.highlight_map().items()}

    def boundary_restriction(self) -> dict[str, Highlight]:
        """Nonzero highlights on open boundary legs, keyed by leg node id."""
        out: dict[str, Highlight] = {}
        for edge in boundary_leg_edges(self.diagram):
            hl = self.highlight(edge)
            if hl is Highlight.NONE:
                continue
            a, b = self.diagram.node(edge[0]), self.diagram.node(edge[1])
            leg = a if a.kind in _BOUNDARY_KINDS else b
            out[leg.id] = hl
        return out

    def stub_set(self) -> frozenset[str]:
        """check_ids of measurement stubs this web highlights."""
        out = set()
        for edge in stub_edges(self.diagram):
            if self.highlight(edge) is not Highlight.NONE:
                stub, _ = _stub_parts(self.diagram, edge)
                out.add(stub.check_id)
        return frozenset(out)

    @property
    def is_zero(self) -> bool:
        return not self.bits.any()

    def __xor__(self, other: "Web") -> "Web":
        if other.diagram is not self.diagram and other.diagram != self.diagram:
            raise ValueError("webs belong to different diagrams")
        return Web(self.diagram, self.bits ^ other.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Web):
            return NotImplemented
        return self.diagram == other.diagram and bool(np.array_equal(self.bits, other.bits))

    def __repr__(self) -> str:
        marks = ", ".join(f"{self.diagram.edge_name(e)}:{hl.value}"
                          for e, hl in self.highlight_map().items())
        return f"Web({marks})"


@dataclass(frozen=True)
class SpiderConstraints:
    """The per-spider highlighting rules as a homogeneous GF(2) system."""

    diagram: Diagram
    matrix: np.ndarray               # (rows, 2|E|) uint8
    row_spiders: tuple[str, ...]     # spider id per row


def spider_constraints(d: Diagram) -> SpiderConstraints:
    """Build the rule system: all-or-none rows, then one parity row per spider.

    Rows and variables come out in canonical order, so the system (and
    everything derived from it) is reproducible across runs.
    """
    violations = validate(d)
    if violations:
        raise DiagramError("diagram is invalid: " + "; ".join(map(str, violations)))
    n_vars = 2 * len(d.edges)
    rows: list[np.ndarray] = []
    labels: list[str] = []
    for s in d.spiders():
        legs = d.incident_edges(s.id)
        own = _own_offset(s.color)
        opp = 1 - own
        for e1, e2 in zip(legs, legs[1:]):
            row = np.zeros(n_vars, dtype=np.uint8)
            row[2 * d.edge_index(*e1) + opp] ^= 1
            row[2 * d.edge_index(*e2) + opp] ^= 1
            rows.append(row)
            labels.append(s.id)
        row = np.zeros(n_vars, dtype=np.uint8)
        for e in legs:
            row[2 * d.edge_index(*e) + own] ^= 1
        if s.phase.is_half:
            row[2 * d.edge_index(*legs[0]) + opp] ^= 1
        rows.append(row)
        labels.append(s.id)
    matrix = np.array(rows, dtype=np.uint8) if rows else np.zeros((0, n_vars), dtype=np.uint8)
    return SpiderConstraints(diagram=d, matrix=matrix, row_spiders=tuple(labels))


def validate_web(d: Diagram, w: Web) -> list[str]:
    """Re-check every spider rule directly; returns violated spider ids.

    Deliberately independent of the constraint-matrix path so it can serve
    as the solver's self-test.
    """
    bad: list[str] = []
    for s in d.spiders():
        legs = d.incident_edges(s.id)
        if s.color is Color.Z:
            own_bits = [w.z_bit(e) for e in legs]
            opp_bits = [w.x_bit(e) for e in legs]
        else:
            own_bits = [w.x_bit(e) for e in legs]
            opp_bits = [w.z_bit(e) for e in legs]
        all_or_none = len(set(opp_bits)) <= 1
        expected = opp_bits[0] if (s.phase.is_half and all_or_none) else 0
        if not all_or_none or sum(own_bits) % 2 != expected:
            bad.append(s.id)
    return bad


@dataclass(frozen=True)
class WebSpace:
    """A GF(2) basis of all webs over one diagram."""

    diagram: Diagram
    basis: tuple[Web, ...]
    rank: int  # rank of the spider-rule system

    @property
    def dim(self) -> int:
        return len(self.basis)


def web_space(d: Diagram) -> WebSpace:
    system = spider_constraints(d)
    rank = gf2.rank(system.matrix)
    basis = gf2.nullspace(system.matrix)
    return WebSpace(diagram=d, basis=tuple(Web(d, v) for v in basis), rank=rank)


@dataclass(frozen=True)
class Infeasible:
    """Witness for an unsolvable boundary condition.

    ``spiders`` lists the spiders whose rules participate in an
    inconsistent constraint subset; ``legs`` the pinned degree-1 legs
    involved.
    """

    spiders: tuple[str, ...]
    legs: tuple[str, ...]

    def __str__(self) -> str:
        return (f"infeasible: spiders {list(self.spiders)} with pinned legs "
                f"{list(self.legs)} form an inconsistent constraint set")


BoundaryCondition = Mapping[str, Highlight]


def _leg_edge(d: Diagram, leg_id: str) -> tuple[str, str]:
    node = d.node(leg_id)
    if node.kind is Kind.SPIDER or d.degree(leg_id) != 1:
        raise ValueError(f"{leg_id!r} is not a degree-1 non-spider leg")
    return d.edge_key(leg_id, d.neighbors(leg_id)[0])


def _stub_priority(d: Diagram) -> list[int]:
    """Variable order that prefers zeroing stub bits, then everything else."""
    stub_vars: list[int] = []
    for e in stub_edges(d):
        stub_vars.extend((x_var(d, e), z_var(d, e)))
    stub_set = set(stub_vars)
    rest = [v for v in range(2 * len(d.edges)) if v not in stub_set]
    return stub_vars + rest


def _stub_basis_rows(d: Diagram, n_vars: int) -> tuple[list[np.ndarray], list[str]]:
    """Rows pinning each stub edge's basis-mismatched bit to zero.

    A stub hanging off a Z-colored ancilla belongs to an X-parity
    measurement; only the X highlight reads that outcome, so the z bit is
    pinned (and dually for X-colored ancillas).
    """
    rows: list[np.ndarray] = []
    labels: list[str] = []
    for e in stub_edges(d):
        stub, ancilla = _stub_parts(d, e)
        if ancilla.kind is not Kind.SPIDER:
            continue
        row = np.zeros(n_vars, dtype=np.uint8)
        row[2 * d.edge_index(*e) + _own_offset(ancilla.color)] = 1
        rows.append(row)
        labels.append(stub.id)
    return rows, labels


def solve(d: Diagram, bc: BoundaryCondition,
          restrict_stub_basis: bool = True) -> Web | Infeasible:
    """Any web matching ``bc`` on the pinned legs, canonicalized, or a witness.

    The returned web is the lexicographically minimal member of its coset,
    with stub-edge bits given top priority, so stub sets come out as small
    as the boundary condition allows. With ``restrict_stub_basis`` (the
    default) stub edges may only carry their measurement-basis color.
    """
    system = spider_constraints(d)
    n_vars = system.matrix.shape[1]
    labels: list[tuple[str, str]] = [("spider", sid) for sid in system.row_spiders]
    extra_rows: list[np.ndarray] = []
    extra_rhs: list[int] = []
    for leg_id in sorted(bc):
        edge = _leg_edge(d, leg_id)
        xb, zb = bc[leg_id].bits
        for offset, value in ((0, xb), (1, zb)):
            row = np.zeros(n_vars, dtype=np.uint8)
            row[2 * d.edge_index(*edge) + offset] = 1
            extra_rows.append(row)
            extra_rhs.append(value)
            labels.append(("leg", leg_id))
    if restrict_stub_basis:
        stub_rows, stub_labels = _stub_basis_rows(d, n_vars)
        extra_rows.extend(stub_rows)
        extra_rhs.extend([0] * len(stub_rows))
        labels.extend(("leg", sid) for sid in stub_labels)
    if extra_rows:
        matrix = np.vstack([system.matrix, np.array(extra_rows, dtype=np.uint8)])
    else:
        matrix = system.matrix
    rhs_vec = np.concatenate([np.zeros(system.matrix.shape[0], dtype=np.uint8),
                              np.array(extra_rhs, dtype=np.uint8)])
    solution, witness = gf2.solve_affine(matrix, rhs_vec)
    if solution is None:
        spiders = sorted({labels[i][1] for i in witness if labels[i][0] == "spider"})
        legs = sorted({labels[i][1] for i in witness if labels[i][0] == "leg"})
        return Infeasible(spiders=tuple(spiders), legs=tuple(legs))
    kernel = gf2.nullspace(matrix)
    canonical = gf2.lexmin_in_coset(solution, kernel, _stub_priority(d))
    return Web(d, canonical)


def detectors(d: Diagram) -> list[Web]:
    """A reduced basis of outcome-only webs (empty boundary, nonempty stubs).

    The space of webs with all boundary legs unhighlighted and stub edges
    restricted to their measurement basis is row-reduced with stub bits as
    leading coordinates, giving one canonical detector per pivot stub.
    """
    system = spider_constraints(d)
    n_vars = system.matrix.shape[1]
    rows = [system.matrix]
    for e in boundary_leg_edges(d):
        for offset in (0, 1):
            row = np.zeros(n_vars, dtype=np.uint8)
            row[2 * d.edge_index(*e) + offset] = 1
            rows.append(row[None, :])
    stub_rows, _ = _stub_basis_rows(d, n_vars)
    if stub_rows:
        rows.append(np.array(stub_rows, dtype=np.uint8))
    matrix = np.vstack(rows)
    basis = gf2.nullspace(matrix)
    if basis.size == 0:
        return []
    packed = gf2.BitMatrix.from_dense(basis)
    gf2.rref(packed, col_order=_stub_priority(d))
    reduced = packed.to_dense()
    webs = []
    for vec in reduced:
        if not vec.any():
            continue
        web = Web(d, vec)
        if web.stub_set():
            webs.append(web)
    return webs


@dataclass(frozen=True)
class PauliErrorSet:
    """Pauli insertions: phase-pi spiders spliced into existing edges.

    Each entry is (edge, letter) with letter in {"X", "Z", "Y"}; a Y entry
    means both an X- and a Z-type insertion on that edge. Stub edges are
    not error locations.
    """

    insertions: tuple[tuple[tuple[str, str], str], ...]

    @classmethod
    def of(cls, d: Diagram, items: Iterable[tuple[tuple[str, str], str]]) -> "PauliErrorSet":
        normalized = []
        stub_set = set(stub_edges(d))
        for edge, letter in items:
            if letter not in ("X", "Z", "Y"):
                raise ValueError(f"invalid error letter {letter!r}")
            if not d.has_edge(*edge):
                raise ValueError(f"error references missing edge {edge!r}")
            key = d.edge_key(*edge)
            if key in stub_set:
                raise ValueError(f"errors cannot sit on stub edge {d.edge_name(key)}")
            normalized.append((key, letter))
        return cls(tuple(normalized))

    @classmethod
    def empty(cls) -> "PauliErrorSet":
        return cls(())

    def __len__(self) -> int:
        return len(self.insertions)


def syndrome(ws: Sequence[Web], err: PauliErrorSet) -> np.ndarray:
    """Web-by-web flip parity of an error set (anticommutation overlap).

    An X insertion flips webs whose edge carries z, a Z insertion those
    carrying x, and a Y insertion those carrying exactly one of the two.
    """
    bits = np.zeros(len(ws), dtype=np.uint8)
    for i, w in enumerate(ws):
        d = w.diagram
        stub_set = set(stub_edges(d))
        total = 0
        for edge, letter in err.insertions:
            if not d.has_edge(*edge):
                raise ValueError(f"error edge {edge!r} missing from web's diagram")
            if d.edge_key(*edge) in stub_set:
                raise ValueError("errors cannot sit on stub edges")
            x, z = w.x_bit(edge), w.z_bit(edge)
            if letter == "X":
                total ^= z
            elif letter == "Z":
                total ^= x
            else:  # Y
                total ^= x ^ z
        bits[i] = total
    return bits
