"""Universal enveloping algebra in PBW normal form.

Elements are exact rational combinations of ordered monomials
``e_1^a1 ... e_n^an`` in the algebra's fixed basis order. Products are
normalized by repeatedly applying ``e_j e_i = e_i e_j + [e_j, e_i]``
for ``j > i``; every rewrite either lowers the filtration degree or the
number of inversions, so normalization terminates.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Mapping, Sequence

from .algebra import LieAlgebra
from .poisson import (
    DegreeLimitError,
    CentralizerReport,
    Polynomial,
    casimirs as poly_casimirs,
    express_in_generators,
    format_terms,
    formal_algebra,
    monomials_up_to,
    sub_riemannian_hamiltonian,
    weighted_exponents,
)
from . import _exact

__all__ = [
    "DescentResult",
    "UEAElement",
    "commutant_basis",
    "commutator",
    "degree_descent",
    "multiply",
    "principal_symbol",
    "quantized_hamiltonian",
    "substitute_uea",
    "symmetrize",
    "uea_casimirs",
]

DEFAULT_UEA_DEGREE_LIMIT = 4

Exps = tuple[int, ...]
Terms = dict[Exps, Fraction]


class _PBW:
    """Memoized normal-ordering kernels for one algebra."""

    def __init__(self, alg: LieAlgebra):
        self.alg = alg
        self.n = alg.dim
        self.times_gen = lru_cache(maxsize=None)(self._times_gen)
        self.times_mono = lru_cache(maxsize=None)(self._times_mono)

    def _times_gen(self, a: Exps, j: int) -> Mapping[Exps, Fraction]:
        # last factor present in a
        k = max((i for i, x in enumerate(a) if x), default=-1)
        if k <= j:
            b = list(a)
            b[j] += 1
            return {tuple(b): Fraction(1)}
        b = list(a)
        b[k] -= 1
        b = tuple(b)
        # b e_k e_j = (b e_j) e_k + b [e_k, e_j]
        out: Terms = {}
        for t, c in self.times_gen(b, j).items():
            for t2, c2 in self.times_gen(t, k).items():
                out[t2] = out.get(t2, 0) + c * c2
        for l, cl in self.alg.bracket_basis(k, j).items():
            for t2, c2 in self.times_gen(b, l).items():
                out[t2] = out.get(t2, 0) + cl * c2
        return {t: c for t, c in out.items() if c}

    def _times_mono(self, a: Exps, b: Exps) -> Mapping[Exps, Fraction]:
        cur: Terms = {a: Fraction(1)}
        for i, m in enumerate(b):
            for _ in range(m):
                nxt: Terms = {}
                for t, c in cur.items():
                    for t2, c2 in self.times_gen(t, i).items():
                        nxt[t2] = nxt.get(t2, 0) + c * c2
                cur = {t: c for t, c in nxt.items() if c}
        return cur

    def word(self, indices: Sequence[int]) -> Terms:
        cur: Terms = {(0,) * self.n: Fraction(1)}
        for i in indices:
            nxt: Terms = {}
            for t, c in cur.items():
                for t2, c2 in self.times_gen(t, i).items():
                    nxt[t2] = nxt.get(t2, 0) + c * c2
            cur = {t: c for t, c in nxt.items() if c}
        return cur


_KERNELS: "weakref.WeakKeyDictionary[LieAlgebra, _PBW]" = weakref.WeakKeyDictionary()


def _kernel(alg: LieAlgebra) -> _PBW:
    k = _KERNELS.get(alg)
    if k is None:
        k = _KERNELS[alg] = _PBW(alg)
    return k


class UEAElement:
    """Element of ``U(g)`` as ``{PBW exponents: coefficient}``."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: LieAlgebra, terms: Mapping[Exps, Fraction | int] | None = None):
        self.algebra = algebra
        self.terms: Terms = {}
        for e, c in (terms or {}).items():
            if len(e) != algebra.dim:
                raise ValueError(f"multidegree {e} has wrong length for dim {algebra.dim}")
            if c:
                self.terms[tuple(e)] = Fraction(c)

    @classmethod
    def constant(cls, algebra: LieAlgebra, c) -> "UEAElement":
        return cls(algebra, {(0,) * algebra.dim: c})

    @classmethod
    def generator(cls, algebra: LieAlgebra, which: int | str) -> "UEAElement":
        i = which if isinstance(which, int) else algebra.index(which)
        e = [0] * algebra.dim
        e[i] = 1
        return cls(algebra, {tuple(e): 1})

    @classmethod
    def parse(cls, algebra: LieAlgebra, text: str) -> "UEAElement":
        """Parse text like ``X^2*Y + 1/2*U``; factors multiply in written order."""
        # parse_terms collapses commuting factors, so split on terms ourselves
        total = cls(algebra)
        for sign, chunk in _split_terms(text):
            factors = [f.strip() for f in chunk.split("*")]
            coeff = Fraction(sign)
            word: list[int] = []
            for f in factors:
                if not f:
                    raise ValueError(f"empty factor in {text!r}")
                if f[0].isdigit():
                    coeff *= Fraction(f)
                    continue
                name, _, power = f.partition("^")
                idx = _factor_index(algebra, name.strip())
                word += [idx] * (int(power) if power else 1)
            total = total + cls(algebra, _kernel(algebra).word(word)) * coeff
        return total

    def _coerce(self, other):
        if isinstance(other, UEAElement):
            if other.algebra is not self.algebra:
                raise ValueError("elements of different enveloping algebras")
            return other
        if isinstance(other, (int, Fraction)):
            return UEAElement.constant(self.algebra, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return UEAElement(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return UEAElement(self.algebra, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return UEAElement(self.algebra, {e: c * other for e, c in self.terms.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        result = UEAElement.constant(self.algebra, 1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UEAElement.constant(self.algebra, other)
        if not isinstance(other, UEAElement):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Filtration degree; -1 for zero."""
        return max((sum(e) for e in self.terms), default=-1)

    def __str__(self) -> str:
        return format_terms(self.terms, self.algebra.basis_names)

    def __repr__(self) -> str:
        return f"UEAElement({self})"


def _split_terms(text: str):
    s = text.strip()
    if not s:
        raise ValueError("empty element")
    out = []
    sign, buf = 1, ""
    for ch in s:
        if ch in "+-" and buf.strip() and not buf.rstrip().endswith(("*", "^")):
            out.append((sign, buf.strip()))
            sign, buf = (1 if ch == "+" else -1), ""
        elif ch in "+-" and not buf.strip():
            sign = sign * (1 if ch == "+" else -1)
        else:
            buf += ch
    if not buf.strip():
        raise ValueError(f"dangling operator in {text!r}")
    out.append((sign, buf.strip()))
    return out


def _factor_index(alg: LieAlgebra, name: str) -> int:
    if name in alg.basis_names:
        return alg.basis_names.index(name)
    low = [n.lower() for n in alg.basis_names]
    if name in low and low.count(name) == 1:
        return low.index(name)
    raise ValueError(f"unknown generator {name!r}")


def multiply(A: UEAElement, B: UEAElement) -> UEAElement:
    """Product ``A B`` rewritten to PBW normal form."""
    if A.algebra is not B.algebra:
        raise ValueError("elements of different enveloping algebras")
    ker = _kernel(A.algebra)
    out: Terms = {}
    for a, ca in A.terms.items():
        for b, cb in B.terms.items():
            for t, c in ker.times_mono(a, b).items():
                out[t] = out.get(t, 0) + ca * cb * c
    return UEAElement(A.algebra, out)


def commutator(A: UEAElement, B: UEAElement) -> UEAElement:
    return multiply(A, B) - multiply(B, A)


def symmetrize(F: Polynomial) -> UEAElement:
    """Symmetrization map: each monomial goes to the average of its factor orderings."""
    alg = F.algebra
    ker = _kernel(alg)
    out: Terms = {}
    for e, c in F.terms.items():
        letters = [i for i, a in enumerate(e) for _ in range(a)]
        orders = set(permutations(letters))
        w = c / len(orders)
        for order in orders:
            for t, ct in ker.word(order).items():
                out[t] = out.get(t, 0) + w * ct
    return UEAElement(alg, out)


def principal_symbol(A: UEAElement) -> tuple[int, Polynomial]:
    """Filtration degree ``k`` and the top-degree part read as a polynomial."""
    if A.is_zero():
        raise ValueError("the zero element has no principal symbol")
    k = A.degree
    return k, Polynomial(A.algebra, {e: c for e, c in A.terms.items() if sum(e) == k})


def quantized_hamiltonian(alg: LieAlgebra) -> UEAElement:
    """Symmetrized sub-Riemannian Hamiltonian, e.g. ``1/2 (X^2 + Y^2 + Z^2)``."""
    return symmetrize(sub_riemannian_hamiltonian(alg))


def uea_casimirs(alg: LieAlgebra) -> list[UEAElement]:
    """Symmetrized lifts of the algebra's recorded Casimirs (``W``, ``UV - YW`` for n4)."""
    return [symmetrize(c) for c in poly_casimirs(alg)]


def _is_central(C: UEAElement) -> bool:
    alg = C.algebra
    return all(commutator(C, UEAElement.generator(alg, i)).is_zero() for i in range(alg.dim))


def commutant_basis(
    Ht: UEAElement,
    d: int,
    generators: Sequence[UEAElement] | None = None,
    *,
    limit: int = DEFAULT_UEA_DEGREE_LIMIT,
) -> CentralizerReport:
    """Exact basis of ``{F : deg F <= d, [F, Ht] = 0}``, compared with generator products.

    ``generators`` defaults to ``Ht`` followed by the lifted Casimirs; the
    products ``Ht^a C1^b C2^c`` of filtration degree ``<= d`` are normalized
    and tested for span equality with the computed commutant.
    """
    if d < 0:
        raise ValueError("degree bound must be non-negative")
    if d > limit:
        raise DegreeLimitError(f"degree bound {d} exceeds the limit {limit}")
    alg = Ht.algebra
    if generators is None:
        generators = [Ht, *uea_casimirs(alg)]
    monos = monomials_up_to(alg.dim, d)
    rows: dict[Exps, dict[int, Fraction]] = {}
    for col, m in enumerate(monos):
        br = commutator(UEAElement(alg, {m: 1}), Ht)
        for e, c in br.terms.items():
            rows.setdefault(e, {})[col] = c
    null = _exact.nullspace(rows.values(), len(monos))
    basis = [UEAElement(alg, {m: c for m, c in zip(monos, v) if c}) for v in null]

    col_of = {m: i for i, m in enumerate(monos)}

    def vec(p: UEAElement) -> dict[int, Fraction]:
        return {col_of[e]: c for e, c in p.terms.items()}

    weights = [g.degree for g in generators]
    prods = [_lift(generators, e) for e in weighted_exponents(weights, d)]
    ech = _exact.Echelon()
    for b in basis:
        ech.add(vec(b))
    pred_rank = _exact.rank(vec(p) for p in prods)
    all_commute = all(commutator(p, Ht).is_zero() for p in prods)
    for p in prods:
        ech.add(vec(p))
    holds = all_commute and ech.rank == len(basis) == pred_rank
    return CentralizerReport(
        degree_bound=d,
        nullspace_dimension=len(basis),
        nullspace_basis=basis,
        predicted_dimension=pred_rank,
        product_count=len(prods),
        holds_at_degree=holds,
        generators=[str(g) for g in generators],
        mode="uea",
    )


def _lift(generators: Sequence[UEAElement], exps: Exps) -> UEAElement:
    """``g1^a1 g2^a2 ...`` in that product order."""
    alg = generators[0].algebra
    out = UEAElement.constant(alg, 1)
    for g, a in zip(generators, exps):
        for _ in range(a):
            out = multiply(out, g)
    return out


@dataclass
class DescentResult:
    """Outcome of :func:`degree_descent`.

    ``P`` is a polynomial in formal generators ``g1 = Ht, g2, ...`` (the
    Casimirs), or None when some stage's symbol was not expressible.
    """

    P: Polynomial | None
    stages: list[dict] = field(default_factory=list)
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.P is not None


def degree_descent(
    Ft: UEAElement, Ht: UEAElement, casimirs: Sequence[UEAElement]
) -> DescentResult:
    """Write a commutant element as a polynomial in ``Ht`` and central elements.

    Each stage expresses the principal symbol of the remainder in the symbols
    of the generators, subtracts the lifted product and continues with a
    remainder of strictly lower filtration degree.
    """
    if not commutator(Ft, Ht).is_zero():
        raise ValueError("F does not commute with H")
    for c in casimirs:
        if not _is_central(c):
            raise ValueError(f"{c} is not central")
    gens = [Ht, *casimirs]
    symbols = [principal_symbol(g)[1] for g in gens]
    formal = formal_algebra(len(gens))
    P = Polynomial(formal)
    R = Ft
    result = DescentResult(P=None)
    while not R.is_zero():
        k, sym = principal_symbol(R)
        Q = express_in_generators(sym, symbols, k, homogeneous=True)
        if Q is None:
            result.failure = f"stage at degree {k}: symbol {sym} is not a polynomial in the generator symbols"
            return result
        lift = UEAElement(Ht.algebra)
        for e, c in Q.terms.items():
            lift = lift + _lift(gens, e) * c
        R_next = R - lift
        result.stages.append({"degree": k, "symbol": str(sym), "P_part": str(Q)})
        if not R_next.is_zero() and R_next.degree >= k:
            result.failure = f"stage at degree {k}: remainder degree did not drop"
            return result
        P = P + Q
        R = R_next
    result.P = P
    return result


def substitute_uea(P: Polynomial, generators: Sequence[UEAElement]) -> UEAElement:
    """``P(g1, g2, ...)`` with each monomial lifted in generator order."""
    alg = generators[0].algebra
    out = UEAElement(alg)
    for e, c in P.terms.items():
        out = out + _lift(generators, e) * c
    return out
