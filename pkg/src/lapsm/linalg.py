"""Exact sparse linear algebra over the rationals.

Rows are ``dict[column, value]``.  Elimination is fraction free: every row
is scaled to primitive integers and pivots are the leading (smallest) column
of each row, so results do not depend on anything but the input order.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

from . import kernel


def integer_row(row: Mapping[int, object]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row with positive lead."""
    items = {k: v for k, v in row.items() if v}
    if not items:
        return {}
    den = 1
    for v in items.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    out = {k: int(v * den) for k, v in items.items()}
    return kernel.normalize_row(out)


class Echelon:
    """Incrementally built reduced row echelon form."""

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}

    def reduce(self, row: Mapping[int, object]) -> dict[int, int]:
        r = integer_row(row)
        pivots = self.pivots
        while r:
            lead = min(r)
            p = pivots.get(lead)
            if p is None:
                # clear other pivot columns occurring later in the row
                hit = [c for c in r if c != lead and c in pivots]
                if not hit:
                    return r
                for c in sorted(hit):
                    if c in r:
                        r = kernel.row_combine(r, pivots[c], c)
                return r
            r = kernel.row_combine(r, p, lead)
        return r

    def add(self, row: Mapping[int, object]) -> bool:
        """Insert a row; returns ``True`` when it raised the rank."""
        r = self.reduce(row)
        if not r:
            return False
        lead = min(r)
        for c, p in list(self.pivots.items()):
            if lead in p:
                self.pivots[c] = kernel.row_combine(p, r, lead)
        self.pivots[lead] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def nullspace(self, ncols: int) -> list[dict[int, Fraction]]:
        """Basis of ``{x : row . x = 0 for every inserted row}``.

        One vector per free column in increasing column order; the free
        column carries 1.
        """
        basis = []
        pivots = sorted(self.pivots.items())
        for f in range(ncols):
            if f in self.pivots:
                continue
            vec = {f: Fraction(1)}
            for c, row in pivots:
                v = row.get(f)
                if v:
                    vec[c] = Fraction(-v, row[c])
            basis.append(vec)
        return basis


def nullspace(rows: Iterable[Mapping[int, object]], ncols: int) -> list[dict[int, Fraction]]:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.nullspace(ncols)


def rank(matrix: Sequence[Sequence[object]]) -> int:
    ech = Echelon()
    for row in matrix:
        ech.add({j: v for j, v in enumerate(row) if v})
    return ech.rank


def solve(rows: Sequence[Mapping[int, object]], rhs: Sequence[object], ncols: int):
    """One solution of ``A x = b`` (free variables set to 0) or ``None``."""
    ech = Echelon()
    aug = ncols
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[aug] = -Fraction(b)
        ech.add(row)
    if aug in ech.pivots:
        return None
    x = {}
    for c, row in ech.pivots.items():
        v = row.get(aug, 0)
        if v:
            x[c] = Fraction(-v, row[c])
    return x


def span_basis(vectors: Iterable[Mapping[int, object]]) -> list[dict[int, int]]:
    """Echelon basis (primitive integer rows) of the span of ``vectors``."""
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return [ech.pivots[c] for c in sorted(ech.pivots)]
