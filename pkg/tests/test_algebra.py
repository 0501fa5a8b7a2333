import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilflow.algebra import (
    AlgebraFormatError,
    LieAlgebra,
    bracket,
    builtin,
    load_algebra,
    parse_algebra,
    validate_algebra,
)

from oracles import matrix_structure_constants


def test_n4_constants_match_matrix_commutators(n4):
    oracle = matrix_structure_constants()
    for i in range(6):
        for j in range(6):
            for k in range(6):
                assert n4.constant(i, j, k) == oracle.get((i, j, k), 0), (i, j, k)


def test_builtins_validate(n4, heis):
    assert validate_algebra(n4) == []
    assert validate_algebra(heis) == []


def test_n4_shape(n4):
    assert n4.basis_names == tuple("XYZUVW")
    assert n4.layers == (1, 1, 1, 2, 2, 3)
    assert n4.layers[n4.index("W")] == 3
    assert n4.inner_product == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_bracket_examples(n4, heis):
    X, Y, Z, U, V, W = n4.basis()
    assert bracket(X, Y) == -U
    assert bracket(Z, U) == W
    hX, hY, hW = heis.basis()
    assert bracket(hX, hY) == hW


def test_abelian_algebra_is_valid():
    alg = LieAlgebra("ABC", {}, (1, 1, 1))
    assert validate_algebra(alg) == []


def test_one_sided_sign_flip_reports_antisymmetry():
    n4 = builtin("n4")
    X, Y, U = 0, 1, 3
    br = {(X, Y, U): -1, (Y, X, U): -1}  # [Y,X] should be +U
    for (i, j, k), c in n4.structure_constants.items():
        if (i, j, k) != (X, Y, U):
            br[(i, j, k)] = c
    bad = LieAlgebra("XYZUVW", br, n4.layers)
    report = validate_algebra(bad)
    assert ("antisymmetry", (X, Y, U)) in [(v.axiom, v.indices) for v in report]


def test_jacobi_violation_is_reported():
    # [A,B]=A, [A,C]=B is not a Lie algebra
    alg = LieAlgebra("ABC", {(0, 1, 0): 1, (0, 2, 1): 1}, (1, 1, 1))
    axioms = {v.axiom for v in validate_algebra(alg)}
    assert "jacobi" in axioms
    assert "grading" in axioms


def test_grading_and_generation_violations():
    alg = LieAlgebra("ABC", {(0, 1, 2): 1}, (1, 1, 3))
    report = validate_algebra(alg)
    assert [v.indices for v in report if v.axiom == "grading"] == [(0, 1, 2)]
    free = LieAlgebra("ABC", {}, (1, 1, 2))
    assert [v.axiom for v in validate_algebra(free)] == ["generation"]


def test_inner_product_checks():
    alg = LieAlgebra("ABC", {(0, 1, 2): 1}, (1, 1, 2), [[1, 2], [2, 1]])
    assert any(v.axiom == "inner_product" for v in validate_algebra(alg))
    alg = LieAlgebra("ABC", {(0, 1, 2): 1}, (1, 1, 2), [[1, 0], [1, 1]])
    assert any(v.detail == "not symmetric" for v in validate_algebra(alg))


def test_mixed_algebra_elements_rejected(n4, heis):
    with pytest.raises(ValueError):
        bracket(n4.element("X"), heis.element("X"))


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("so3")


coords = st.lists(st.fractions(-5, 5, max_denominator=3), min_size=6, max_size=6)


@settings(max_examples=60, deadline=None)
@given(coords, coords, coords, st.fractions(-3, 3, max_denominator=3))
def test_bracket_bilinear_antisymmetric(a, b, c, s):
    n4 = builtin("n4")
    A, B, C = n4.element(a), n4.element(b), n4.element(c)
    assert bracket(A, A).is_zero()
    assert bracket(A, B) == -bracket(B, A)
    assert bracket(A + s * C, B) == bracket(A, B) + s * bracket(C, B)


@settings(max_examples=60, deadline=None)
@given(coords, coords)
def test_layer1_brackets_land_in_layer2(a, b):
    n4 = builtin("n4")
    A = n4.element(a[:3] + [0, 0, 0])
    B = n4.element(b[:3] + [0, 0, 0])
    r = bracket(A, B)
    assert all(c == 0 for c, l in zip(r.coords, n4.layers) if l != 2)


def test_document_round_trip(n4, tmp_path):
    doc = n4.to_document()
    again = parse_algebra(json.loads(json.dumps(doc)))
    assert again.structure_constants == n4.structure_constants
    assert again.layers == n4.layers
    path = tmp_path / "n4.json"
    path.write_text(json.dumps(doc))
    assert load_algebra(path).structure_constants == n4.structure_constants
    assert load_algebra("n4").name == "n4_lower_triangular"


def test_bracket_entry_uses_rational_value():
    doc = {"dim": 3, "names": ["A", "B", "C"], "layers": [1, 1, 2], "brackets": [[1, 2, "3:-3/2"]]}
    alg = parse_algebra(doc)
    assert alg.constant(0, 1, 2) == Fraction(-3, 2)
    assert alg.constant(1, 0, 2) == Fraction(3, 2)


@pytest.mark.parametrize(
    "doc, location",
    [
        ({"names": ["A"], "layers": [1], "brackets": []}, "dim"),
        ({"dim": 2, "names": ["A"], "layers": [1, 1], "brackets": []}, "names"),
        ({"dim": 2, "names": ["A", "B"], "layers": [1, 1], "brackets": [[1, 2, "5:1"]]}, "brackets[0]"),
        ({"dim": 2, "names": ["A", "B"], "layers": [1, 1], "brackets": [[1, 2, "x"]]}, "brackets[0]"),
        ({"dim": 2, "names": ["A", "B"], "layers": [1, 1], "brackets": [[1, 2, "2:1"], [1, 2, "2:1"]]}, "brackets[1]"),
    ],
)
def test_format_errors_name_location(doc, location):
    with pytest.raises(AlgebraFormatError) as exc:
        parse_algebra(doc)
    assert exc.value.location == location


def test_corrupted_file_reports_line_and_column(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "dim": 3,\n  "names": [\n')
    with pytest.raises(AlgebraFormatError) as exc:
        load_algebra(path)
    assert exc.value.location.startswith(f"{path}:")
