"""Independent oracles and hypothesis strategies.

The oracles here never call the package's bracket or rewriting code:
structure constants come from 4x4 elementary-matrix commutators, Poisson
brackets from sympy differentiation, and enveloping-algebra products from
composition of left-invariant differential operators on the group.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy as sp
from hypothesis import strategies as st

from nilflow.poisson import Polynomial

# n4 basis as elementary matrices E_ab (1-based row, col)
N4_MATRICES = {"X": (2, 1), "Y": (3, 2), "Z": (4, 3), "U": (3, 1), "V": (4, 2), "W": (4, 1)}
N4_ORDER = "XYZUVW"


def elementary(a: int, b: int) -> sp.Matrix:
    M = sp.zeros(4, 4)
    M[a - 1, b - 1] = 1
    return M


def matrix_structure_constants() -> dict[tuple[int, int, int], Fraction]:
    """``c_ij^k`` of n4 from matrix commutators, all ordered pairs."""
    mats = [elementary(*N4_MATRICES[n]) for n in N4_ORDER]
    out = {}
    for i, A in enumerate(mats):
        for j, B in enumerate(mats):
            C = A * B - B * A
            for k, E in enumerate(mats):
                a, b = N4_MATRICES[N4_ORDER[k]]
                c = C[a - 1, b - 1]
                if c:
                    out[(i, j, k)] = Fraction(int(c))
    return out


def sympy_kks(alg, F: sp.Expr, G: sp.Expr, syms) -> sp.Expr:
    """``{F, G}(p) = sum c_ij^k p_k dF/dp_i dG/dp_j`` by sympy differentiation."""
    total = 0
    for i in range(alg.dim):
        for j in range(alg.dim):
            for k in range(alg.dim):
                c = alg.constant(i, j, k)
                if c:
                    total += sp.Rational(c.numerator, c.denominator) * syms[k] * sp.diff(F, syms[i]) * sp.diff(G, syms[j])
    return sp.expand(total)


def to_sympy(P: Polynomial, syms) -> sp.Expr:
    expr = 0
    for e, c in P.terms.items():
        t = sp.Rational(c.numerator, c.denominator)
        for s, a in zip(syms, e):
            t *= s**a
        expr += t
    return sp.expand(expr)


def from_sympy(alg, expr, syms) -> Polynomial:
    poly = sp.Poly(sp.expand(expr), *syms)
    return Polynomial(
        alg, {tuple(m): Fraction(int(c.p), int(c.q)) for m, c in zip(poly.monoms(), poly.coeffs())}
    )


# left-invariant vector fields on the group of lower unitriangular 4x4 matrices
G_SYMS = sp.symbols("g21 g32 g43 g31 g42 g41")
_G_ENTRY = {(2, 1): 0, (3, 2): 1, (4, 3): 2, (3, 1): 3, (4, 2): 4, (4, 1): 5}


def _g(a: int, b: int):
    if a == b:
        return sp.Integer(1)
    idx = _G_ENTRY.get((a, b))
    return G_SYMS[idx] if idx is not None else sp.Integer(0)


def left_invariant_field(name: str):
    """``(X f)(g) = d/dt f(g exp(t E_ij))``, i.e. ``sum_a g_ai d/dg_aj``."""
    i, j = N4_MATRICES[name]

    def apply(f):
        out = 0
        for a in range(1, 5):
            if (a, j) in _G_ENTRY:
                out += _g(a, i) * sp.diff(f, G_SYMS[_G_ENTRY[(a, j)]])
        return sp.expand(out)

    return apply


def uea_operator(A, f):
    """Apply the differential operator of a PBW element (rightmost factor first)."""
    fields = [left_invariant_field(n) for n in N4_ORDER]
    total = 0
    for e, c in A.terms.items():
        t = f
        for i in reversed(range(len(e))):
            for _ in range(e[i]):
                t = fields[i](t)
        total += sp.Rational(c.numerator, c.denominator) * t
    return sp.expand(total)


TEST_FUNCTION = sp.expand(
    G_SYMS[0] ** 3 * G_SYMS[1] ** 2 * G_SYMS[2] ** 2
    + G_SYMS[3] ** 2 * G_SYMS[4] ** 2 * G_SYMS[5]
    + G_SYMS[0] * G_SYMS[4] * G_SYMS[5] ** 2
    + G_SYMS[2] ** 3 * G_SYMS[3] * G_SYMS[1]
)


fractions = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def exponents(dim: int, max_degree: int):
    # a multiset of at most max_degree variable indices, read as an exponent vector
    return st.lists(st.integers(0, dim - 1), max_size=max_degree).map(
        lambda idx: tuple(idx.count(i) for i in range(dim))
    )


def term_dicts(dim: int, max_degree: int, max_terms: int = 4):
    return st.dictionaries(exponents(dim, max_degree), fractions, max_size=max_terms)


def generic_dual_point(rng: np.random.Generator) -> np.ndarray:
    """Random point of the dual with ``w`` and ``uv - yw`` safely away from 0."""
    while True:
        p = rng.uniform(-1.0, 1.0, 6)
        if abs(p[5]) > 0.3 and abs(p[3] * p[4] - p[1] * p[5]) > 0.05:
            return p
