"""Polynomials on the dual of a Lie algebra with the Lie-Poisson (KKS) bracket.

Sign convention: ``{F, G}(p) = <p, [dF(p), dG(p)]>``, so on coordinate
functions ``{e_i, e_j} = sum_k c_ij^k e_k``. For the 4x4 triangular algebra
this gives ``{y, x} = u``, ``{z, u} = w``, ``{v, x} = w``, ``{z, y} = v``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from typing import Iterable, Mapping, Sequence

from . import _exact
from .algebra import LieAlgebra

__all__ = [
    "CentralizerReport",
    "DegreeLimitError",
    "Polynomial",
    "casimirs",
    "centralizer_basis",
    "express_in_generators",
    "formal_algebra",
    "hamiltonian_vector_field",
    "is_casimir",
    "monomials_up_to",
    "poisson_bracket",
    "sub_riemannian_hamiltonian",
    "substitute",
    "weighted_exponents",
]

DEFAULT_DEGREE_LIMIT = 6

Exps = tuple[int, ...]


class DegreeLimitError(ValueError):
    """Requested degree bound exceeds the configured limit."""


def dual_names(alg: LieAlgebra) -> tuple[str, ...]:
    """Coordinate names on the dual: lowercased basis names when unambiguous."""
    low = tuple(n.lower() for n in alg.basis_names)
    return low if len(set(low)) == alg.dim else alg.basis_names


def _grlex_key(e: Exps):
    return (sum(e), tuple(-a for a in e))


class Polynomial:
    """Exact polynomial on the dual space, stored as ``{exponents: coefficient}``."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: LieAlgebra, terms: Mapping[Exps, Fraction | int] | None = None):
        self.algebra = algebra
        clean: dict[Exps, Fraction] = {}
        for e, c in (terms or {}).items():
            if len(e) != algebra.dim:
                raise ValueError(f"multidegree {e} has wrong length for dim {algebra.dim}")
            if c:
                clean[tuple(e)] = Fraction(c)
        self.terms = clean

    @classmethod
    def constant(cls, algebra: LieAlgebra, c) -> "Polynomial":
        return cls(algebra, {(0,) * algebra.dim: c})

    @classmethod
    def variable(cls, algebra: LieAlgebra, which: int | str) -> "Polynomial":
        i = which if isinstance(which, int) else _var_index(algebra, which)
        e = [0] * algebra.dim
        e[i] = 1
        return cls(algebra, {tuple(e): 1})

    @classmethod
    def parse(cls, algebra: LieAlgebra, text: str) -> "Polynomial":
        return cls(algebra, parse_terms(text, algebra))

    def gens(self) -> list["Polynomial"]:
        return [Polynomial.variable(self.algebra, i) for i in range(self.algebra.dim)]

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.algebra is not self.algebra:
                raise ValueError("polynomials over different algebras")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.algebra, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.algebra, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(self.algebra, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(self.algebra, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Fraction(scalar))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.algebra, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.algebra, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def homogeneous_part(self, k: int) -> "Polynomial":
        return Polynomial(self.algebra, {e: c for e, c in self.terms.items() if sum(e) == k})

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def diff(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return Polynomial(self.algebra, out)

    def __call__(self, point: Sequence):
        """Evaluate at a point (exact for Fractions, float for floats)."""
        total = 0
        for e, c in self.terms.items():
            t = c if not isinstance(point[0], float) else float(c)
            for x, a in zip(point, e):
                if a:
                    t = t * x**a
            total = total + t
        return total

    def __str__(self) -> str:
        return format_terms(self.terms, dual_names(self.algebra))

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _var_index(alg: LieAlgebra, name: str) -> int:
    names = dual_names(alg)
    if name in names:
        return names.index(name)
    if name in alg.basis_names:
        return alg.basis_names.index(name)
    raise KeyError(f"unknown variable {name!r}; expected one of {names}")


def format_terms(terms: Mapping[Exps, Fraction], names: Sequence[str]) -> str:
    """Render terms highest-first in graded lex order, e.g. ``3/2*x^2*w - u*v``."""
    if not terms:
        return "0"
    out = []
    for e in sorted(terms, key=lambda e: (sum(e), e), reverse=True):
        c = terms[e]
        factors = [n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a]
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        sign = "-" if c < 0 else "+"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|([+-]))")


def parse_terms(text: str, alg: LieAlgebra, names: Sequence[str] | None = None) -> dict[Exps, Fraction]:
    """Parse ``3/2*x^2*w - u*v`` style text into a term dictionary.

    Variables may be written with either the dual (lowercase) names or the
    algebra's basis names unless ``names`` is given explicitly.
    """
    def index_of(name: str) -> int:
        if names is not None:
            if name not in names:
                raise ValueError(f"unknown variable {name!r}")
            return list(names).index(name)
        try:
            return _var_index(alg, name)
        except KeyError as exc:
            raise ValueError(str(exc)) from None

    pos = 0
    tokens = []
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at column {pos + 1}")
        kind = m.lastindex
        tokens.append((kind, m.group(kind), pos))
        pos = m.end()
    if not tokens:
        raise ValueError("empty polynomial")

    terms: dict[Exps, Fraction] = {}
    i = 0
    while i < len(tokens):
        sign = 1
        while i < len(tokens) and tokens[i][0] == 5:
            sign = -sign if tokens[i][1] == "-" else sign
            i += 1
        coeff = Fraction(sign)
        exps = [0] * alg.dim
        expect_factor = True
        while i < len(tokens) and tokens[i][0] != 5:
            kind, val, col = tokens[i]
            if expect_factor and kind == 1:
                coeff *= Fraction(val)
                i += 1
            elif expect_factor and kind == 2:
                idx = index_of(val)
                i += 1
                power = 1
                if i < len(tokens) and tokens[i][0] == 3:
                    if i + 1 >= len(tokens) or tokens[i + 1][0] != 1 or not tokens[i + 1][1].isdigit():
                        raise ValueError(f"expected integer exponent at column {col + 1}")
                    power = int(tokens[i + 1][1])
                    i += 2
                exps[idx] += power
            elif not expect_factor and kind == 4:
                i += 1
                expect_factor = True
                continue
            else:
                raise ValueError(f"unexpected {val!r} at column {col + 1}")
            expect_factor = False
        if expect_factor:
            raise ValueError(f"dangling operator in {text!r}")
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coeff
    return {e: c for e, c in terms.items() if c}


def _check_same(F: Polynomial, G: Polynomial) -> None:
    if F.algebra is not G.algebra:
        raise ValueError("polynomials over different algebras")


def poisson_bracket(F: Polynomial, G: Polynomial) -> Polynomial:
    """Lie-Poisson bracket ``{F, G}``."""
    _check_same(F, G)
    alg = F.algebra
    n = alg.dim
    dF = [F.diff(i) for i in range(n)]
    dG = [G.diff(j) for j in range(n)]
    total = Polynomial(alg)
    for i in range(n):
        if dF[i].is_zero():
            continue
        for j in range(n):
            if i == j or dG[j].is_zero():
                continue
            br = alg.bracket_basis(i, j)
            if not br:
                continue
            lin = Polynomial(alg, {_unit(n, k): c for k, c in br.items()})
            total = total + dF[i] * dG[j] * lin
    return total


@lru_cache(maxsize=None)
def _unit(n: int, k: int) -> Exps:
    e = [0] * n
    e[k] = 1
    return tuple(e)


def is_casimir(F: Polynomial) -> bool:
    """True iff ``F`` Poisson-commutes with every coordinate function."""
    return all(
        poisson_bracket(F, Polynomial.variable(F.algebra, i)).is_zero()
        for i in range(F.algebra.dim)
    )


def hamiltonian_vector_field(H: Polynomial) -> list[Polynomial]:
    """Right-hand sides ``de_i/dt = {e_i, H}``, one per coordinate."""
    alg = H.algebra
    return [poisson_bracket(Polynomial.variable(alg, i), H) for i in range(alg.dim)]


def sub_riemannian_hamiltonian(alg: LieAlgebra) -> Polynomial:
    """``H = 1/2 p^T G^{-1} p`` on the layer-1 coordinates, ``G`` the inner product."""
    idx = alg.generating_indices
    n = len(idx)
    # exact Gauss-Jordan inverse
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(alg.inner_product)]
    for p in range(n):
        piv = next(r for r in range(p, n) if a[r][p] != 0)
        a[p], a[piv] = a[piv], a[p]
        inv = 1 / a[p][p]
        a[p] = [x * inv for x in a[p]]
        for r in range(n):
            if r != p and a[r][p]:
                f = a[r][p]
                a[r] = [x - f * y for x, y in zip(a[r], a[p])]
    ginv = [row[n:] for row in a]
    terms: dict[Exps, Fraction] = {}
    for s in range(n):
        for t in range(n):
            if ginv[s][t]:
                e = [0] * alg.dim
                e[idx[s]] += 1
                e[idx[t]] += 1
                key = tuple(e)
                terms[key] = terms.get(key, 0) + ginv[s][t] / 2
    return Polynomial(alg, terms)


def casimirs(alg: LieAlgebra) -> list[Polynomial]:
    """Known Casimir generators recorded on the algebra (may be empty)."""
    return [Polynomial.parse(alg, s) for s in alg.casimirs]


def monomials_up_to(dim: int, d: int) -> list[Exps]:
    """All exponent vectors of total degree <= d, in ascending graded lex order."""
    out: list[Exps] = []

    def rec(prefix: list[int], left: int, slots: int):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for a in range(left + 1):
            prefix.append(a)
            rec(prefix, left - a, slots - 1)
            prefix.pop()

    rec([], d, dim)
    return sorted(out, key=_grlex_key)


def weighted_exponents(weights: Sequence[int], d: int, exact: bool = False) -> list[Exps]:
    """Exponent tuples with ``sum(a_i * w_i) <= d`` (``== d`` when exact)."""
    ranges = [range(d // w + 1) for w in weights]
    out = []
    for e in iproduct(*ranges):
        tot = sum(a * w for a, w in zip(e, weights))
        if tot <= d and (not exact or tot == d):
            out.append(e)
    return sorted(out, key=lambda e: (sum(a * w for a, w in zip(e, weights)), tuple(-a for a in e)))


@lru_cache(maxsize=None)
def formal_algebra(n: int) -> LieAlgebra:
    """Abelian algebra whose dual coordinates ``g1..gn`` name formal generators."""
    return LieAlgebra([f"g{i + 1}" for i in range(n)], {}, [1] * n, name=f"formal{n}")


def substitute(P: Polynomial, generators: Sequence[Polynomial]) -> Polynomial:
    """Evaluate a formal polynomial ``P(g1, ..., gn)`` at actual polynomials."""
    if P.algebra.dim != len(generators):
        raise ValueError("generator count does not match P")
    alg = generators[0].algebra
    total = Polynomial(alg)
    for e, c in P.terms.items():
        t = Polynomial.constant(alg, c)
        for g, a in zip(generators, e):
            if a:
                t = t * g**a
        total = total + t
    return total


def _products(generators: Sequence[Polynomial], exps: Iterable[Exps]) -> list[Polynomial]:
    alg = generators[0].algebra
    out = []
    for e in exps:
        t = Polynomial.constant(alg, 1)
        for g, a in zip(generators, e):
            if a:
                t = t * g**a
        out.append(t)
    return out


def express_in_generators(
    F: Polynomial,
    generators: Sequence[Polynomial],
    d: int | None = None,
    *,
    homogeneous: bool = False,
) -> Polynomial | None:
    """Write ``F`` as a polynomial ``P`` in ``generators``, or return None.

    The search is over products of generators of weighted degree ``<= d``
    (``== d`` with ``homogeneous=True``), the weight of a generator being
    its total degree. ``d`` defaults to ``F.degree``. The returned ``P``
    lives on :func:`formal_algebra` with coordinates ``g1, g2, ...``; free
    unknowns are set to zero when the products are dependent.
    """
    if not generators:
        raise ValueError("at least one generator required")
    for g in generators:
        _check_same(F, g)
    weights = [g.degree for g in generators]
    if any(w < 1 for w in weights):
        raise ValueError("generators must be nonconstant")
    formal = formal_algebra(len(generators))
    if F.is_zero():
        return Polynomial(formal)
    if d is None:
        d = F.degree
    exps = weighted_exponents(weights, d, exact=homogeneous)
    prods = _products(generators, exps)
    index: dict[Exps, int] = {}
    cols = []
    for p in prods:
        col = {}
        for e, c in p.terms.items():
            col[index.setdefault(e, len(index))] = c
        cols.append(col)
    rhs = {}
    for e, c in F.terms.items():
        rhs[index.setdefault(e, len(index))] = c
    lam = _exact.solve(cols, rhs)
    if lam is None:
        return None
    return Polynomial(formal, {e: c for e, c in zip(exps, lam) if c})


@dataclass
class CentralizerReport:
    """Result of a bounded-degree commutant solve.

    ``holds_at_degree`` means the computed commutant equals the span of the
    generator products at this bound; it is not a statement about all degrees.
    """

    degree_bound: int
    nullspace_dimension: int
    nullspace_basis: list = field(repr=False)
    predicted_dimension: int
    product_count: int
    holds_at_degree: bool
    generators: list[str] = field(default_factory=list)
    mode: str = "poisson"

    @property
    def lemma1_holds_at_degree(self) -> bool:
        return self.holds_at_degree

    def to_dict(self) -> dict:
        key = "lemma1_holds_at_degree" if self.mode == "poisson" else "theorem2_holds_at_degree"
        return {
            "mode": self.mode,
            "degree_bound": self.degree_bound,
            "nullspace_dimension": self.nullspace_dimension,
            "predicted_dimension": self.predicted_dimension,
            "product_count": self.product_count,
            key: self.holds_at_degree,
            "generators": self.generators,
            "nullspace_basis": [str(b) for b in self.nullspace_basis],
        }


def _check_degree(d: int, limit: int) -> None:
    if d < 0:
        raise ValueError("degree bound must be non-negative")
    if d > limit:
        raise DegreeLimitError(f"degree bound {d} exceeds the limit {limit}")


def centralizer_basis(
    H: Polynomial,
    d: int,
    generators: Sequence[Polynomial] | None = None,
    *,
    limit: int = DEFAULT_DEGREE_LIMIT,
) -> CentralizerReport:
    """Exact basis of ``{F : deg F <= d, {F, H} = 0}`` compared with generator products.

    ``generators`` defaults to ``H`` followed by the algebra's recorded
    Casimirs (``H, w, uv - yw`` for the 4x4 triangular algebra).
    """
    _check_degree(d, limit)
    alg = H.algebra
    if generators is None:
        generators = [H, *casimirs(alg)]
    monos = monomials_up_to(alg.dim, d)
    rows: dict[Exps, dict[int, Fraction]] = {}
    for col, m in enumerate(monos):
        br = poisson_bracket(Polynomial(alg, {m: 1}), H)
        for e, c in br.terms.items():
            rows.setdefault(e, {})[col] = c
    null = _exact.nullspace(rows.values(), len(monos))
    basis = [Polynomial(alg, {m: c for m, c in zip(monos, v) if c}) for v in null]

    weights = [g.degree for g in generators]
    exps = weighted_exponents(weights, d)
    prods = _products(generators, exps)
    col_of = {m: i for i, m in enumerate(monos)}

    def vec(p: Polynomial) -> dict[int, Fraction]:
        return {col_of[e]: c for e, c in p.terms.items()}

    ech = _exact.Echelon()
    for b in basis:
        ech.add(vec(b))
    pred_rank = _exact.rank(vec(p) for p in prods)
    all_commute = all(poisson_bracket(p, H).is_zero() for p in prods)
    for p in prods:
        ech.add(vec(p))
    # span equality: adding the products must not raise the commutant's rank
    holds = all_commute and ech.rank == len(basis) == pred_rank
    return CentralizerReport(
        degree_bound=d,
        nullspace_dimension=len(basis),
        nullspace_basis=basis,
        predicted_dimension=pred_rank,
        product_count=len(prods),
        holds_at_degree=holds,
        generators=[str(g) for g in generators],
    )
