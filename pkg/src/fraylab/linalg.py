"""Exact sparse linear algebra over Q.

Vectors are dicts {column index: Fraction}; matrices are lists of row
vectors.  Everything here is plain Gaussian elimination with fraction
arithmetic; the callers keep dimensions small by working one graded piece
at a time.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


Vec = dict  # {col: Fraction}


def vec_add(v: Vec, w: Vec, c: Fraction) -> Vec:
    """v + c*w."""
    out = dict(v)
    for k, x in w.items():
        s = out.get(k, Fraction(0)) + c * x
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


class RowBasis:
    """A row-reduced family of vectors supporting reduction and membership."""

    def __init__(self):
        self.rows: dict[int, Vec] = {}  # pivot col -> row (pivot coeff 1)

    def reduce(self, v: Vec) -> Vec:
        # rows are kept fully inter-reduced, so each elimination removes a
        # pivot column for good and the loop terminates
        out = dict(v)
        while True:
            hit = next((col for col in out if col in self.rows), None)
            if hit is None:
                return out
            out = vec_add(out, self.rows[hit], -out[hit])

    def add(self, v: Vec) -> bool:
        """Reduce and insert; returns True if the vector was independent."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        c = r[p]
        self.rows[p] = {k: x / c for k, x in r.items()}
        # keep fully reduced: clear this pivot from existing rows
        for q, row in list(self.rows.items()):
            if q != p and row.get(p):
                self.rows[q] = vec_add(row, self.rows[p], -row[p])
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v)

    def pivots(self) -> set[int]:
        return set(self.rows)

    def interreduce(self) -> None:
        """Bring the echelon family to reduced row-echelon form."""
        for p in sorted(self.rows, reverse=True):
            row = self.rows[p]
            while True:
                hit = next((c for c in row if c != p and c in self.rows), None)
                if hit is None:
                    break
                row = vec_add(row, self.rows[hit], -row[hit])
            self.rows[p] = row


def rank_of(rows: Iterable[Vec]) -> int:
    rb = RowBasis()
    for r in rows:
        rb.add(r)
    return rb.rank


def kernel_dim(rows: list[Vec], ncols: int) -> int:
    """Dimension of {x : Mx = 0} where rows are the rows of M acting on
    column vectors indexed 0..ncols-1."""
    # rank-nullity on the transpose: columns of M span the image
    cols: dict[int, Vec] = {}
    for i, row in enumerate(rows):
        for j, c in row.items():
            cols.setdefault(j, {})[i] = c
    rk = rank_of(cols.values())
    return ncols - rk


def kernel_basis(rows: Iterable[Vec], ncols: int) -> list[Vec]:
    """Explicit basis of {x : Mx = 0} from the RREF of M."""
    rb = RowBasis()
    for r in rows:
        rb.add(r)
    rb.interreduce()
    pivots = rb.pivots()
    out: list[Vec] = []
    for f in range(ncols):
        if f in pivots:
            continue
        v: Vec = {f: Fraction(1)}
        for p, row in rb.rows.items():
            c = row.get(f)
            if c:
                v[p] = -c
        out.append(v)
    return out


class ClassTracker:
    """Subquotient bookkeeping: a row space of 'image' vectors plus chosen
    class representatives; express() writes any vector of the subspace
    spanned by (image + reps) in class coordinates."""

    def __init__(self):
        # pivot col -> (row, class coords of the row)
        self.rows: dict[int, tuple[Vec, dict[int, Fraction]]] = {}
        self.n_classes = 0

    def _reduce(self, v: Vec):
        out = dict(v)
        coords: dict[int, Fraction] = {}
        while True:
            hit = next((col for col in out if col in self.rows), None)
            if hit is None:
                return out, coords
            c = out[hit]
            row, rc = self.rows[hit]
            out = vec_add(out, row, -c)
            for idx, x in rc.items():
                s = coords.get(idx, Fraction(0)) + c * x
                if s:
                    coords[idx] = s
                else:
                    coords.pop(idx, None)

    def add_image(self, v: Vec) -> bool:
        r, _ = self._reduce(v)
        if not r:
            return False
        p = min(r)
        c = r[p]
        self.rows[p] = ({k: x / c for k, x in r.items()}, {})
        return True

    def add_rep(self, v: Vec) -> int | None:
        """Insert v as a new class representative if independent; returns
        its class index or None."""
        r, _ = self._reduce(v)
        if not r:
            return None
        idx = self.n_classes
        self.n_classes += 1
        p = min(r)
        c = r[p]
        self.rows[p] = ({k: x / c for k, x in r.items()}, {idx: Fraction(1) / c})
        return idx

    def express(self, v: Vec) -> dict[int, Fraction]:
        """Class coordinates of v; raises if v is not in the tracked span."""
        r, coords = self._reduce(v)
        if r:
            raise ValueError("vector lies outside the tracked subspace")
        return coords
