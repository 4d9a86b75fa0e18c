"""Dense bit-packed GF(2) linear algebra (rows packed into uint64 words)."""

from __future__ import annotations

import numpy as np

_WORD = 64
_ONE = np.uint64(1)


class BitMatrix:
    """A dense GF(2) matrix whose rows are packed into 64-bit words.

    Row operations act on whole words; single-bit access is provided for
    pivot bookkeeping.
    """

    def __init__(self, n_rows: int, n_cols: int):
        self.n_rows = n_rows
        self.n_cols = n_cols
        self._words = max(1, (n_cols + _WORD - 1) // _WORD)
        self.data = np.zeros((n_rows, self._words), dtype=np.uint64)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "BitMatrix":
        dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8) & 1)
        m = cls(dense.shape[0], dense.shape[1])
        for c in range(dense.shape[1]):
            w, b = divmod(c, _WORD)
            m.data[:, w] |= dense[:, c].astype(np.uint64) << np.uint64(b)
        return m

    def copy(self) -> "BitMatrix":
        out = BitMatrix(self.n_rows, self.n_cols)
        out.data = self.data.copy()
        return out

    def get(self, r: int, c: int) -> int:
        w, b = divmod(c, _WORD)
        return int((self.data[r, w] >> np.uint64(b)) & _ONE)

    def set(self, r: int, c: int, value: int) -> None:
        w, b = divmod(c, _WORD)
        if value & 1:
            self.data[r, w] |= _ONE << np.uint64(b)
        else:
            self.data[r, w] &= ~(_ONE << np.uint64(b))

    def column_bits(self, c: int) -> np.ndarray:
        """All bits of column c as a uint8 vector of length n_rows."""
        w, b = divmod(c, _WORD)
        return ((self.data[:, w] >> np.uint64(b)) & _ONE).astype(np.uint8)

    def swap_rows(self, i: int, j: int) -> None:
        if i != j:
            self.data[[i, j]] = self.data[[j, i]]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for c in range(self.n_cols):
            w, b = divmod(c, _WORD)
            out[:, c] = (self.data[:, w] >> np.uint64(b)) & _ONE
        return out


def rref(matrix: BitMatrix, col_order: list[int] | None = None) -> list[int]:
    """Reduce ``matrix`` in place to RREF, visiting columns in ``col_order``.

    Returns the pivot columns in elimination order; pivot k lives in row k.
    """
    if col_order is None:
        col_order = list(range(matrix.n_cols))
    pivot_cols: list[int] = []
    r = 0
    for c in col_order:
        if r >= matrix.n_rows:
            break
        col = matrix.column_bits(c)
        hits = np.nonzero(col[r:])[0]
        if hits.size == 0:
            continue
        matrix.swap_rows(r, r + int(hits[0]))
        col = matrix.column_bits(c)
        col[r] = 0
        ones = np.nonzero(col)[0]
        if ones.size:
            matrix.data[ones] ^= matrix.data[r]
        pivot_cols.append(c)
        r += 1
    return pivot_cols


def rank(dense: np.ndarray) -> int:
    return len(rref(BitMatrix.from_dense(dense)))


def nullspace(dense: np.ndarray) -> np.ndarray:
    """Basis of the right null space of ``dense`` over GF(2), one vector per row.

    Deterministic: free columns are taken in ascending index order and each
    basis vector is the standard back-substituted vector for one free column.
    """
    dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8) & 1)
    n_cols = dense.shape[1]
    m = BitMatrix.from_dense(dense)
    pivot_cols = rref(m)
    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(n_cols) if c not in pivot_set]
    basis = np.zeros((len(free_cols), n_cols), dtype=np.uint8)
    red = m.to_dense()
    for k, fc in enumerate(free_cols):
        basis[k, fc] = 1
        for row_idx, pc in enumerate(pivot_cols):
            if red[row_idx, fc]:
                basis[k, pc] = 1
    return basis


def solve_affine(
    dense: np.ndarray, rhs: np.ndarray
) -> tuple[np.ndarray | None, list[int]]:
    """Solve A x = b over GF(2).

    Returns (solution, []) with the particular solution obtained by zeroing
    free variables, or (None, witness) where witness lists indices of the
    input rows whose XOR yields an inconsistent 0 = 1 equation.
    """
    dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8) & 1)
    rhs = np.asarray(rhs, dtype=np.uint8) & 1
    n_rows, n_cols = dense.shape
    # augmented block [A | b | I]: the identity tail records row history
    aug = BitMatrix(n_rows, n_cols + 1 + n_rows)
    packed = BitMatrix.from_dense(dense)
    aug.data[:, : packed.data.shape[1]] = packed.data
    for r in range(n_rows):
        if rhs[r]:
            aug.set(r, n_cols, 1)
        aug.set(r, n_cols + 1 + r, 1)
    pivot_cols = rref(aug, col_order=list(range(n_cols)))
    for r in range(len(pivot_cols), n_rows):
        if aug.get(r, n_cols):
            witness = [i for i in range(n_rows) if aug.get(r, n_cols + 1 + i)]
            return None, witness
    x = np.zeros(n_cols, dtype=np.uint8)
    for row_idx, pc in enumerate(pivot_cols):
        x[pc] = aug.get(row_idx, n_cols)
    return x, []


def lexmin_in_coset(
    x0: np.ndarray, basis: np.ndarray, col_priority: list[int]
) -> np.ndarray:
    """The lexicographically minimal vector of x0 + span(basis).

    Minimality is with respect to ``col_priority``: earlier columns are
    zeroed first whenever the coset allows it.
    """
    x = (np.asarray(x0, dtype=np.uint8) & 1).copy()
    basis = np.atleast_2d(np.asarray(basis, dtype=np.uint8) & 1)
    if basis.size == 0:
        return x
    m = BitMatrix.from_dense(basis)
    pivot_cols = rref(m, col_order=col_priority)
    rows = m.to_dense()
    for row_idx, pc in enumerate(pivot_cols):
        if x[pc]:
            x ^= rows[row_idx]
    return x
