"""Generic coadjoint orbits of n4: Darboux chart and the cube-root rescaling.

On the orbit ``w = w0``, ``uv - yw = C`` (both nonzero) the functions
``x, z, ut = u/w, vt = v/w`` are Darboux coordinates with ``{z, ut} = 1``,
``{vt, x} = 1``. The rescaling ``x = s xh, z = s zh, ut = uh/s, vt = vh/s``
with ``s`` the real cube root of ``w0`` preserves these brackets and turns
the Hamiltonian into ``s^2 * (1/2 (xh^2 + zh^2 + uh^2 vh^2) - k uh vh + K)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import sympy as sp

from .systems import full_system, reduced_energy, reduced_system

__all__ = [
    "DualPoint",
    "NonGenericPointError",
    "OrbitChart",
    "YangMillsForm",
    "bracket_preservation_check",
    "chart_to_dual",
    "full_vector_field",
    "reduce_to_orbit",
    "reduced_hamiltonian",
    "reduced_vector_field",
    "scale_check",
    "to_yang_mills",
    "from_yang_mills",
    "ym_form",
    "ym_scale",
    "ym_unscale",
]


class DualPoint(NamedTuple):
    x: float
    y: float
    z: float
    u: float
    v: float
    w: float


class NonGenericPointError(ValueError):
    """The point does not lie on a generic (4-dimensional) orbit."""

    def __init__(self, reason: str):
        super().__init__(f"non-generic point: {reason}")
        self.reason = reason


@dataclass(frozen=True)
class OrbitChart:
    w0: float
    C: float

    def __post_init__(self):
        if self.w0 == 0:
            raise NonGenericPointError("w = 0")
        if self.C == 0:
            raise NonGenericPointError("uv - yw = 0")

    @property
    def scale(self) -> float:
        """Real cube root of ``w0``."""
        return float(np.cbrt(self.w0))


def reduce_to_orbit(p) -> tuple[OrbitChart, np.ndarray]:
    """Orbit labels ``(w0, C)`` and chart point ``(x, z, u/w, v/w)`` of a dual point."""
    x, y, z, u, v, w = (float(c) for c in p)
    if w == 0:
        raise NonGenericPointError("w = 0")
    C = u * v - y * w
    if C == 0:
        raise NonGenericPointError("uv - yw = 0")
    return OrbitChart(w, C), np.array([x, z, u / w, v / w])


def chart_to_dual(chart: OrbitChart, q) -> np.ndarray:
    """Inverse of :func:`reduce_to_orbit`; ``y`` is recovered as ``(uv - C)/w0``."""
    q = np.asarray(q, dtype=float)
    x, z, ut, vt = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    u = chart.w0 * ut
    v = chart.w0 * vt
    y = (u * v - chart.C) / chart.w0
    return np.stack([x, y, z, u, v, np.full_like(x, chart.w0)], axis=-1)


def reduced_hamiltonian(q, w0: float, C: float):
    """``1/2 (x^2 + z^2 + (C/w0 - w0 ut vt)^2)``, equal to ``1/2 (x^2 + y^2 + z^2)``."""
    return reduced_energy(q, w0, C)


def full_vector_field(p) -> np.ndarray:
    """``(-uy, ux - vz, vy, -wz, wx, 0)`` from the compiled exact Lie-Poisson field."""
    return full_system().field(p)


def reduced_vector_field(q, w0: float, C: float) -> np.ndarray:
    return reduced_system(w0, C).field(q)


def ym_scale(q, w0: float) -> np.ndarray:
    """Chart point ``(x, z, ut, vt)`` to rescaled ``(xh, zh, uh, vh)``."""
    if w0 == 0:
        raise ValueError("w0 must be nonzero")
    s = np.cbrt(w0)
    q = np.asarray(q, dtype=float)
    return q * np.array([1 / s, 1 / s, s, s])


def ym_unscale(h, w0: float) -> np.ndarray:
    if w0 == 0:
        raise ValueError("w0 must be nonzero")
    s = np.cbrt(w0)
    h = np.asarray(h, dtype=float)
    return h * np.array([s, s, 1 / s, 1 / s])


_s, _C = sp.symbols("s C", real=True, nonzero=True)
_xh, _zh, _uh, _vh = sp.symbols("xh zh uh vh", real=True)
_x, _z, _ut, _vt = sp.symbols("x z ut vt", real=True)


@lru_cache(maxsize=None)
def _symbolic_form():
    w0 = _s**3
    chart_H = sp.Rational(1, 2) * (_x**2 + _z**2 + (_C / w0 - w0 * _ut * _vt) ** 2)
    hat_H = sp.expand(chart_H.subs({_x: _s * _xh, _z: _s * _zh, _ut: _uh / _s, _vt: _vh / _s}))
    inner = sp.expand(hat_H / _s**2)
    poly = sp.Poly(inner, _xh, _zh, _uh, _vh)
    coeffs = {m: sp.simplify(c) for m, c in zip(poly.monoms(), poly.coeffs())}
    return chart_H, hat_H, coeffs


@dataclass(frozen=True)
class YangMillsForm:
    """Rescaled Hamiltonian ``prefactor * (sum coefficients[m] * xh^a zh^b uh^c vh^d)``.

    ``coupling`` is ``k`` in ``1/2 (P^2 + Q1^2 Q2^2) - k Q1 Q2``; ``constant`` is
    the additive ``K`` that depends only on the orbit.
    """

    prefactor: float
    coefficients: dict[tuple[int, int, int, int], float]
    coupling: float
    constant: float
    symbolic: str

    @property
    def has_quartic_uv(self) -> bool:
        return self.coefficients.get((0, 0, 2, 2), 0.0) != 0.0


@lru_cache(maxsize=256)
def ym_form(w0: float, C: float) -> YangMillsForm:
    """Coefficients of the rescaled Hamiltonian, derived by symbolic expansion."""
    OrbitChart(w0, C)
    _, _, coeffs = _symbolic_form()
    s = float(np.cbrt(w0))
    num = {m: float(c.subs({_s: s, _C: C})) for m, c in coeffs.items()}
    return YangMillsForm(
        prefactor=s * s,
        coefficients=num,
        coupling=-num.get((0, 0, 1, 1), 0.0),
        constant=num.get((0, 0, 0, 0), 0.0),
        symbolic=str(sp.Add(*[c * _xh**m[0] * _zh**m[1] * _uh**m[2] * _vh**m[3] for m, c in coeffs.items()])),
    )


def ym_hamiltonian(h, w0: float, C: float):
    """Evaluate the rescaled Hamiltonian at hat points ``(xh, zh, uh, vh)``."""
    form = ym_form(w0, C)
    h = np.asarray(h, dtype=float)
    total = np.zeros(h.shape[:-1])
    for m, c in form.coefficients.items():
        total = total + c * np.prod(h ** np.array(m), axis=-1)
    return form.prefactor * total


def to_yang_mills(q, chart: OrbitChart) -> tuple[np.ndarray, float, float]:
    """Chart point to Yang-Mills normal-form state ``(Q1, Q2, P1, P2)``.

    ``Q = (uh, vh)``, ``P = (-zh, xh)`` is canonical. Returns the state, the
    coupling ``k`` and the time factor ``s^2``: the chart flow at time ``t``
    equals the normal-form flow at time ``s^2 t``.
    """
    xh, zh, uh, vh = np.moveaxis(ym_scale(q, chart.w0), -1, 0)
    form = ym_form(chart.w0, chart.C)
    return np.stack([uh, vh, -zh, xh], axis=-1), form.coupling, form.prefactor


def from_yang_mills(Y, chart: OrbitChart) -> np.ndarray:
    Q1, Q2, P1, P2 = np.moveaxis(np.asarray(Y, dtype=float), -1, 0)
    return ym_unscale(np.stack([P2, -P1, Q1, Q2], axis=-1), chart.w0)


def _chart_bracket(F, G):
    # canonical pairs (z, ut) and (vt, x)
    total = 0
    for q, p in ((_z, _ut), (_vt, _x)):
        total += sp.diff(F, q) * sp.diff(G, p) - sp.diff(F, p) * sp.diff(G, q)
    return total


def _hat_bracket(F, G):
    total = 0
    for q, p in ((_zh, _uh), (_vh, _xh)):
        total += sp.diff(F, q) * sp.diff(G, p) - sp.diff(F, p) * sp.diff(G, q)
    return total


def bracket_preservation_check() -> dict[str, bool]:
    """Symbolic check that the rescaling is canonical.

    For every pair of monomials of degree 1 and 2 in the hat variables, the
    bracket computed in hat variables and pulled back equals the bracket of
    the pulled-back functions in the chart. ``s`` stays a free symbol.
    """
    return dict(_bracket_preservation())


@lru_cache(maxsize=None)
def _bracket_preservation() -> tuple[tuple[str, bool], ...]:
    back = {_xh: _x / _s, _zh: _z / _s, _uh: _s * _ut, _vh: _s * _vt}
    hats = [_xh, _zh, _uh, _vh]
    monos = list(hats) + [a * b for i, a in enumerate(hats) for b in hats[i:]]
    ok = True
    for i, f in enumerate(monos):
        for g in monos[i + 1:]:
            lhs = _hat_bracket(f, g).subs(back)
            rhs = _chart_bracket(f.subs(back), g.subs(back))
            if sp.expand(lhs - rhs) != 0:
                ok = False
    canonical = (
        sp.simplify(_chart_bracket(_z / _s, _s * _ut)) == 1
        and sp.simplify(_chart_bracket(_s * _vt, _x / _s)) == 1
        and sp.simplify(_chart_bracket(_z / _s, _x / _s)) == 0
        and sp.simplify(_chart_bracket(_s * _ut, _s * _vt)) == 0
        and sp.simplify(_chart_bracket(_z / _s, _s * _vt)) == 0
        and sp.simplify(_chart_bracket(_x / _s, _s * _ut)) == 0
    )
    return (("quadratic_monomials", ok), ("coordinate_brackets", bool(canonical)))


def scale_check(n_points: int = 1000, seed: int = 0, w0: float = 1.7, C: float = -0.6) -> dict:
    """Audit of the rescaling: energy identity at random points plus bracket checks."""
    rng = np.random.default_rng(seed)
    q = rng.uniform(-2.0, 2.0, size=(n_points, 4))
    before = reduced_hamiltonian(q, w0, C)
    after = ym_hamiltonian(ym_scale(q, w0), w0, C)
    rel = np.abs(before - after) / np.maximum(np.abs(before), 1e-300)
    round_trip = np.max(np.abs(ym_unscale(ym_scale(q, w0), w0) - q))
    form = ym_form(w0, C)
    return {
        "w0": w0,
        "C": C,
        "n_points": n_points,
        "max_relative_energy_error": float(rel.max()),
        "max_round_trip_error": float(round_trip),
        "brackets": bracket_preservation_check(),
        "prefactor": form.prefactor,
        "coupling": form.coupling,
        "constant": form.constant,
        "has_quartic_uv_term": form.has_quartic_uv,
        "rescaled_form": form.symbolic,
    }
