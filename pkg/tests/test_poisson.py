from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings

from nilflow.algebra import bracket
from nilflow.poisson import (
    DegreeLimitError,
    Polynomial,
    casimirs,
    centralizer_basis,
    express_in_generators,
    formal_algebra,
    hamiltonian_vector_field,
    is_casimir,
    poisson_bracket,
    sub_riemannian_hamiltonian,
    substitute,
)

from oracles import from_sympy, sympy_kks, term_dicts, to_sympy


def P(alg, text):
    return Polynomial.parse(alg, text)


def predicted_count(d):
    # independent enumeration of H^a w^b (uv - yw)^c with 2a + b + 2c <= d
    return sum(1 for a in range(d + 1) for b in range(d + 1) for c in range(d + 1) if 2 * a + b + 2 * c <= d)


def test_coordinate_bracket_table(n4):
    expected = {("z", "u"): "w", ("v", "x"): "w", ("y", "x"): "u", ("z", "y"): "v"}
    names = "xyzuvw"
    for a, b in combinations(names, 2):
        got = poisson_bracket(P(n4, a), P(n4, b))
        if (a, b) in expected:
            assert got == P(n4, expected[(a, b)])
        elif (b, a) in expected:
            assert got == -P(n4, expected[(b, a)])
        else:
            assert got.is_zero(), (a, b)


def test_bracket_examples(n4):
    assert poisson_bracket(P(n4, "z"), P(n4, "u")) == P(n4, "w")
    assert poisson_bracket(P(n4, "y"), P(n4, "x")) == P(n4, "u")
    assert poisson_bracket(P(n4, "x"), P(n4, "u")).is_zero()


def test_casimirs(n4):
    assert is_casimir(P(n4, "w"))
    assert is_casimir(P(n4, "u*v - y*w"))
    assert not is_casimir(P(n4, "x"))
    assert casimirs(n4) == [P(n4, "w"), P(n4, "u*v - y*w")]
    assert all(is_casimir(c) for c in casimirs(n4))


def test_n4_vector_field(n4):
    H = sub_riemannian_hamiltonian(n4)
    assert H == P(n4, "1/2*x^2 + 1/2*y^2 + 1/2*z^2")
    rhs = hamiltonian_vector_field(H)
    expected = ["-u*y", "u*x - v*z", "v*y", "-w*z", "w*x", "0"]
    assert rhs == [P(n4, e) for e in expected]


def test_heisenberg_vector_field(heis):
    # [X,Y] = W gives {x,y} = w under the plus convention, hence x' = w*y
    H = sub_riemannian_hamiltonian(heis)
    syms = sp.symbols("x y w")
    oracle = [from_sympy(heis, sympy_kks(heis, s, to_sympy(H, syms), syms), syms) for s in syms]
    assert hamiltonian_vector_field(H) == oracle == [P(heis, "w*y"), P(heis, "-w*x"), P(heis, "0")]


def test_constant_hamiltonian_gives_zero_field(n4):
    assert all(f.is_zero() for f in hamiltonian_vector_field(Polynomial.constant(n4, 7)))


def test_constants_of_motion(n4):
    H = sub_riemannian_hamiltonian(n4)
    rhs = hamiltonian_vector_field(H)
    for F in (H, P(n4, "w"), P(n4, "u*v - y*w")):
        # dF/dt = sum_i dF/de_i * rhs_i
        total = Polynomial(n4)
        for i, f in enumerate(rhs):
            total = total + F.diff(i) * f
        assert total.is_zero()


def test_linear_brackets_agree_with_lie_bracket(n4):
    for i in range(6):
        for j in range(6):
            lie = bracket(n4.basis()[i], n4.basis()[j])
            lin = Polynomial(n4, {tuple(int(a == k) for a in range(6)): c for k, c in enumerate(lie.coords) if c})
            assert poisson_bracket(Polynomial.variable(n4, i), Polynomial.variable(n4, j)) == lin


@settings(max_examples=40, deadline=None)
@given(term_dicts(6, 3), term_dicts(6, 3))
def test_bracket_matches_sympy_oracle(f, g):
    from nilflow.algebra import builtin

    n4 = builtin("n4")
    syms = sp.symbols("x y z u v w")
    F, G = Polynomial(n4, f), Polynomial(n4, g)
    assert poisson_bracket(F, G) == from_sympy(n4, sympy_kks(n4, to_sympy(F, syms), to_sympy(G, syms), syms), syms)


@settings(max_examples=40, deadline=None)
@given(term_dicts(6, 3), term_dicts(6, 3), term_dicts(6, 3))
def test_jacobi_leibniz_antisymmetry(f, g, k):
    from nilflow.algebra import builtin

    n4 = builtin("n4")
    F, G, K = Polynomial(n4, f), Polynomial(n4, g), Polynomial(n4, k)
    pb = poisson_bracket
    assert pb(F, F).is_zero()
    assert pb(F, G) == -pb(G, F)
    assert (pb(F, pb(G, K)) + pb(G, pb(K, F)) + pb(K, pb(F, G))).is_zero()
    assert pb(F * G, K) == F * pb(G, K) + G * pb(F, K)


def test_mismatched_algebras(n4, heis):
    with pytest.raises(ValueError):
        poisson_bracket(P(n4, "x"), P(heis, "x"))


@pytest.mark.parametrize("d, dim", [(0, 1), (1, 2), (2, 5), (3, 8), (4, 14)])
def test_centralizer_dimensions(n4, d, dim):
    H = sub_riemannian_hamiltonian(n4)
    rep = centralizer_basis(H, d)
    assert predicted_count(d) == dim
    assert rep.nullspace_dimension == dim
    assert rep.predicted_dimension == dim
    assert rep.lemma1_holds_at_degree
    for B in rep.nullspace_basis:
        assert poisson_bracket(B, H).is_zero()


@pytest.mark.parametrize("d", [1, 2, 3])
def test_centralizer_dimension_matches_sympy_rank(n4, d):
    # commutant dimension = #monomials - rank of the matrix of m -> {m, H}, via sympy
    syms = sp.symbols("x y z u v w")
    H = to_sympy(sub_riemannian_hamiltonian(n4), syms)
    monos = sorted(sp.itermonomials(syms, d), key=sp.default_sort_key)
    images = [sp.Poly(sympy_kks(n4, m, H, syms), *syms) if sympy_kks(n4, m, H, syms) != 0 else None for m in monos]
    keys = sorted({mono for im in images if im is not None for mono in im.monoms()})
    M = sp.zeros(len(keys), len(monos))
    for j, im in enumerate(images):
        if im is not None:
            for mono, c in zip(im.monoms(), im.coeffs()):
                M[keys.index(mono), j] = c
    assert centralizer_basis(sub_riemannian_hamiltonian(n4), d).nullspace_dimension == len(monos) - M.rank()


def test_degree_two_span(n4):
    H = sub_riemannian_hamiltonian(n4)
    rep = centralizer_basis(H, 2)
    expected = [P(n4, t) for t in ("1", "w", "w^2", "1/2*x^2 + 1/2*y^2 + 1/2*z^2", "u*v - y*w")]
    # each side lies in the span of the other
    for B in rep.nullspace_basis:
        assert express_in_generators(B, [H, P(n4, "w"), P(n4, "u*v - y*w")], 2) is not None
    as_gens = centralizer_basis(H, 2, [e for e in expected if e.degree > 0])
    assert as_gens.holds_at_degree and as_gens.predicted_dimension == 5
    assert rep.to_dict()["lemma1_holds_at_degree"] is True


def test_heisenberg_degree_two_contains_expected(heis):
    # report only: the commutant contains 1, w, w^2 and H
    H = sub_riemannian_hamiltonian(heis)
    rep = centralizer_basis(H, 2, [H, P(heis, "w")])
    assert rep.predicted_dimension == 4
    assert rep.nullspace_dimension >= 4
    names = {str(b) for b in rep.nullspace_basis}
    assert {"1", "w", "w^2"} <= names


def test_degree_limit(n4):
    with pytest.raises(DegreeLimitError):
        centralizer_basis(sub_riemannian_hamiltonian(n4), 7)
    with pytest.raises(ValueError):
        centralizer_basis(sub_riemannian_hamiltonian(n4), -1)


def test_express_examples(n4):
    H = sub_riemannian_hamiltonian(n4)
    w, C = P(n4, "w"), P(n4, "u*v - y*w")
    F = H**2 + w * C
    Pf = express_in_generators(F, [H, w, C])
    assert Pf == Polynomial.parse(formal_algebra(3), "g1^2 + g2*g3")
    assert substitute(Pf, [H, w, C]) == F
    assert express_in_generators(P(n4, "x"), [H, w, C]) is None
    assert express_in_generators(Polynomial(n4), [H, w, C]).is_zero()


def test_parse_print_round_trip(n4):
    F = P(n4, "3/2*x^2*w - u*v")
    assert P(n4, str(F)) == F
    assert str(P(n4, "z^2 + x^2 + y^2")) == "x^2 + y^2 + z^2"
    with pytest.raises(ValueError):
        P(n4, "3*q")


def test_float_evaluation(n4):
    F = P(n4, "u*v - y*w")
    assert F([0.0, 2.0, 0.0, 3.0, 4.0, 0.5]) == pytest.approx(11.0)
    assert F([Fraction(0), Fraction(1, 2), 0, 1, 1, 1]) == Fraction(1, 2)
