import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from nilflow.algebra import builtin
from nilflow.dynamics import (
    IntegratorConfig,
    NonGenericPointError,
    OrbitChart,
    chart_to_dual,
    from_yang_mills,
    full_system,
    full_vector_field,
    integrate,
    reduce_to_orbit,
    reduced_hamiltonian,
    reduced_vector_field,
    scale_check,
    to_yang_mills,
    yang_mills_system,
    ym_form,
    ym_scale,
    ym_unscale,
)
from nilflow.dynamics.chart import bracket_preservation_check, ym_hamiltonian
from nilflow.poisson import hamiltonian_vector_field, sub_riemannian_hamiltonian

from oracles import generic_dual_point


def test_reduce_example():
    chart, q = reduce_to_orbit([1, 0, 1, 1, 1, 1])
    assert (chart.w0, chart.C) == (1.0, 1.0)
    np.testing.assert_array_equal(q, [1, 1, 1, 1])


@pytest.mark.parametrize("p, reason", [([1, 2, 3, 4, 5, 0], "w = 0"), ([0, 1, 0, 1, 1, 1], "uv - yw = 0")])
def test_non_generic_rejected(p, reason):
    with pytest.raises(NonGenericPointError) as exc:
        reduce_to_orbit(p)
    assert exc.value.reason == reason


def test_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(50):
        p = generic_dual_point(rng)
        chart, q = reduce_to_orbit(p)
        np.testing.assert_allclose(chart_to_dual(chart, q), p, atol=1e-14)
        np.testing.assert_allclose(reduce_to_orbit(chart_to_dual(chart, q))[1], q, atol=1e-14)


def test_reduced_hamiltonian_examples():
    w0, C = 2.0, 3.0
    assert reduced_hamiltonian([0, 0, 1.5, C / w0**2 / 1.5], w0, C) == pytest.approx(0, abs=1e-15)
    assert reduced_hamiltonian([1, 1, 0, 0], 1.0, 1.0) == 1.5


def test_reduced_hamiltonian_equals_full_energy():
    rng = np.random.default_rng(2)
    for _ in range(200):
        p = generic_dual_point(rng)
        chart, q = reduce_to_orbit(p)
        assert reduced_hamiltonian(q, chart.w0, chart.C) == pytest.approx(0.5 * (p[0] ** 2 + p[1] ** 2 + p[2] ** 2), rel=1e-12)


def test_full_vector_field_examples():
    np.testing.assert_array_equal(full_vector_field([0.3, -1, 2, 0, 0, 0]), np.zeros(6))
    np.testing.assert_array_equal(full_vector_field([0, 1, 0, 1, 0, 0]), [-1, 0, 0, 0, 0, 0])


def test_full_field_matches_symbolic_at_random_points():
    rhs = hamiltonian_vector_field(sub_riemannian_hamiltonian(builtin("n4")))
    rng = np.random.default_rng(3)
    for p in rng.uniform(-2, 2, size=(1000, 6)):
        exact = np.array([f(list(p)) for f in rhs], dtype=float)
        got = full_vector_field(p)
        assert np.all(np.abs(got - exact) <= 1e-12 * np.maximum(1, np.abs(exact)))


def test_reduced_field_critical_point_by_symbolic_oracle():
    x, z, ut, vt, w0, C = sp.symbols("x z ut vt w0 C")
    H = sp.Rational(1, 2) * (x**2 + z**2 + (C / w0 - w0 * ut * vt) ** 2)
    # pairs (z, ut) and (vt, x): q' = dH/dp, p' = -dH/dq
    field = [-sp.diff(H, vt), sp.diff(H, ut), -sp.diff(H, z), sp.diff(H, x)]
    at = {x: 0, z: 0, ut: 0, vt: 0, w0: 1.5, C: 0.7}
    exact = [float(f.subs(at)) for f in field]
    np.testing.assert_array_equal(reduced_vector_field([0, 0, 0, 0], 1.5, 0.7), exact)
    rng = np.random.default_rng(4)
    for q in rng.uniform(-1, 1, size=(50, 4)):
        vals = {x: q[0], z: q[1], ut: q[2], vt: q[3], w0: -0.8, C: 1.3}
        np.testing.assert_allclose(reduced_vector_field(q, -0.8, 1.3), [float(f.subs(vals)) for f in field], rtol=1e-12, atol=1e-14)


def test_reduced_field_matches_finite_difference_gradient():
    rng = np.random.default_rng(5)
    w0, C = 1.3, -0.4
    J = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float)
    # columns: (x, z, ut, vt); x' = -dH/dvt, z' = dH/dut, ut' = -dH/dz, vt' = dH/dx
    for q in rng.uniform(-1, 1, size=(100, 4)):
        grad = np.empty(4)
        for i in range(4):
            e = np.zeros(4)
            e[i] = 1e-6
            grad[i] = (reduced_hamiltonian(q + e, w0, C) - reduced_hamiltonian(q - e, w0, C)) / 2e-6
        f = reduced_vector_field(q, w0, C)
        np.testing.assert_allclose(f, J @ grad, rtol=1e-6, atol=1e-8)
        assert abs(grad @ f) < 1e-8


def test_ym_scale_identity_and_round_trip():
    rng = np.random.default_rng(6)
    q = rng.uniform(-2, 2, size=(100, 4))
    np.testing.assert_array_equal(ym_scale(q, 1.0), q)
    for w0 in (0.3, 5.0, -2.7):
        np.testing.assert_allclose(ym_unscale(ym_scale(q, w0), w0), q, atol=1e-12)
    with pytest.raises(ValueError):
        ym_scale(q, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 20) | st.floats(-20, -0.1), st.floats(0.05, 5) | st.floats(-5, -0.05))
def test_rescaled_energy_identity(w0, C):
    q = np.random.default_rng(7).uniform(-2, 2, size=(200, 4))
    before = reduced_hamiltonian(q, w0, C)
    after = ym_hamiltonian(ym_scale(q, w0), w0, C)
    np.testing.assert_allclose(after, before, rtol=1e-10)


def test_rescaled_coefficients_by_hand_expansion():
    # 1/2(s^2 xh^2 + s^2 zh^2 + (C/s^3 - s uh vh)^2) = s^2 [1/2(xh^2+zh^2+uh^2 vh^2) - C/s^4 uh vh + C^2/(2 s^8)]
    w0, C = 8.0, 0.8
    form = ym_form(w0, C)
    assert form.prefactor == pytest.approx(4.0)
    assert form.coupling == pytest.approx(0.8 / 16)
    assert form.constant == pytest.approx(0.64 / 512)
    assert form.coefficients[(0, 0, 2, 2)] == pytest.approx(0.5)
    assert form.coefficients[(2, 0, 0, 0)] == form.coefficients[(0, 2, 0, 0)] == pytest.approx(0.5)
    assert set(form.coefficients) == {(2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 2), (0, 0, 1, 1), (0, 0, 0, 0)}
    assert form.has_quartic_uv


def test_negative_w0_uses_real_cube_root():
    form = ym_form(-8.0, 1.0)
    assert form.prefactor == pytest.approx(4.0)
    assert form.coupling == pytest.approx(1.0 / 16)


def test_bracket_preservation_is_exact():
    assert bracket_preservation_check() == {"quadratic_monomials": True, "coordinate_brackets": True}


def test_scale_check_report():
    rep = scale_check()
    assert rep["max_relative_energy_error"] < 1e-10
    assert rep["has_quartic_uv_term"]


def test_chart_flow_is_time_rescaled_yang_mills_flow():
    w0, C = 8.0, 0.8
    chart = OrbitChart(w0, C)
    rng = np.random.default_rng(8)
    p0 = chart_to_dual(chart, rng.uniform(-0.5, 0.5, 4))
    Y0, k, tscale = to_yang_mills(reduce_to_orbit(p0)[1], chart)
    T = 2.0
    full = integrate(full_system(), p0, IntegratorConfig(dt=1e-4, T=T))
    ym = integrate(yang_mills_system(k), Y0, IntegratorConfig(dt=1e-4 * tscale, T=T * tscale))
    chart_pts = np.column_stack([full.states[:, 0], full.states[:, 2], full.states[:, 3:5] / w0])
    mapped = to_yang_mills(chart_pts, chart)[0]
    assert np.max(np.abs(mapped - ym.states)) < 1e-6
    np.testing.assert_allclose(from_yang_mills(Y0, chart), reduce_to_orbit(p0)[1], atol=1e-14)
