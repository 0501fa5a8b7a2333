"""Exact linear algebra over the rationals on sparse rows.

Rows are ``dict[int, Fraction]`` mapping column index to a nonzero entry.
Elimination is fraction-free: each row is scaled to primitive integers and
combined as ``p*r - a*q``, so no tolerance ever enters a rank decision.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping

Row = Mapping[int, Fraction]


def _primitive(row: Mapping[int, int | Fraction]) -> dict[int, int]:
    """Scale a rational row to coprime integers with a positive leading entry."""
    if not row:
        return {}
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    ints = {c: int(Fraction(v) * den) for c, v in row.items() if v != 0}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    lead = min(ints)
    if ints[lead] < 0:
        g = -g
    return {c: v // g for c, v in ints.items()}


def _combine(r: dict[int, int], q: dict[int, int], col: int) -> dict[int, int]:
    """Return ``q[col]*r - r[col]*q`` with the entry at ``col`` cancelled."""
    a, p = r[col], q[col]
    out = {c: p * v for c, v in r.items()}
    for c, v in q.items():
        nv = out.get(c, 0) - a * v
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    return _primitive(out)


class Echelon:
    """Incrementally built row echelon form over the integers."""

    def __init__(self) -> None:
        self.pivots: dict[int, dict[int, int]] = {}

    def reduce(self, row: Mapping[int, int | Fraction]) -> dict[int, int]:
        r = _primitive(row)
        while r:
            lead = min(r)
            q = self.pivots.get(lead)
            if q is None:
                return r
            r = _combine(r, q, lead)
        return r

    def add(self, row: Mapping[int, int | Fraction]) -> bool:
        """Insert a row; return True if it raised the rank."""
        r = self.reduce(row)
        if not r:
            return False
        self.pivots[min(r)] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduced(self) -> dict[int, dict[int, int]]:
        """Fully reduced echelon form: each pivot column is zero outside its row."""
        piv = {c: dict(r) for c, r in self.pivots.items()}
        cols = sorted(piv)
        for c in reversed(cols):
            pr = piv[c]
            for c2 in cols:
                if c2 >= c:
                    break
                r = piv[c2]
                if c in r:
                    piv[c2] = _combine(r, pr, c)
        return piv


def nullspace(rows: Iterable[Row], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` in reduced form (one vector per free column).

    Each basis vector has a 1 at its free column and 0 at every other free
    column, so the basis is canonical for a fixed column order.
    """
    ech = Echelon()
    for row in rows:
        ech.add(row)
    piv = ech.reduced()
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for c, r in piv.items():
            if f in r:
                v[c] = Fraction(-r[f], r[c])
        basis.append(v)
    return basis


def rank(vectors: Iterable[Row]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def solve(columns: list[Row], rhs: Row) -> list[Fraction] | None:
    """Find ``lam`` with ``sum(lam[j] * columns[j]) == rhs``, or None if inconsistent.

    ``columns`` and ``rhs`` are sparse vectors over a common (arbitrary
    integer) index set. Free unknowns are set to zero.
    """
    n = len(columns)
    keys = sorted({k for col in columns for k in col} | set(rhs))
    rows: dict[int, dict[int, Fraction]] = {k: {} for k in keys}
    for j, col in enumerate(columns):
        for k, v in col.items():
            if v:
                rows[k][j] = Fraction(v)
    for k, v in rhs.items():
        if v:
            rows[k][n] = Fraction(v)
    ech = Echelon()
    for k in keys:
        ech.add(rows[k])
    piv = ech.reduced()
    if n in piv:
        return None
    lam = [Fraction(0)] * n
    for c, r in piv.items():
        lam[c] = Fraction(r.get(n, 0), r[c])
    return lam


def sparse(vec: list[Fraction]) -> dict[int, Fraction]:
    return {i: v for i, v in enumerate(vec) if v}
