"""Polynomial vector fields for the momentum-space flows.

Every system is a polynomial field stored as sparse term arrays, so one set
of compiled kernels serves all of them. Its Jacobian is derived by exact
term differentiation. The full Lie-Poisson field is taken directly from the
exact symbolic ``{e_i, H}``.

Canonical pairing on the Darboux chart of a generic n4 orbit: the brackets
``{z, ut} = 1`` and ``{vt, x} = 1`` are read as ``(q1, p1) = (z, ut)`` and
``(q2, p2) = (vt, x)``, with ``dq/dt = dH/dp`` and ``dp/dt = -dH/dq``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numba
import numpy as np

from ..algebra import LieAlgebra, builtin
from ..poisson import (
    Polynomial,
    casimirs,
    dual_names,
    hamiltonian_vector_field,
    sub_riemannian_hamiltonian,
)

__all__ = [
    "PolyField",
    "System",
    "compile_polynomial",
    "full_system",
    "heisenberg_reduced_system",
    "reduced_system",
    "sample_energy_shell",
    "yang_mills_system",
]

Term = tuple[int, float, tuple[int, ...]]


@dataclass(frozen=True)
class PolyField:
    """Sparse polynomial field ``out[idx[t]] += coef[t] * prod(y ** exp[t])``."""

    dim: int
    idx: np.ndarray
    coef: np.ndarray
    exp: np.ndarray
    jrow: np.ndarray
    jcol: np.ndarray
    jcoef: np.ndarray
    jexp: np.ndarray

    @classmethod
    def from_terms(cls, dim: int, terms: Iterable[Term]) -> "PolyField":
        terms = [(i, float(c), tuple(e)) for i, c, e in terms if c != 0]
        jac = []
        for i, c, e in terms:
            for j, a in enumerate(e):
                if a:
                    d = list(e)
                    d[j] -= 1
                    jac.append((i, j, c * a, tuple(d)))

        def exps(rows):
            return np.array(rows, dtype=np.int64).reshape(len(rows), dim)

        return cls(
            dim=dim,
            idx=np.array([t[0] for t in terms], dtype=np.int64),
            coef=np.array([t[1] for t in terms], dtype=float),
            exp=exps([t[2] for t in terms]),
            jrow=np.array([t[0] for t in jac], dtype=np.int64),
            jcol=np.array([t[1] for t in jac], dtype=np.int64),
            jcoef=np.array([t[2] for t in jac], dtype=float),
            jexp=exps([t[3] for t in jac]),
        )

    @classmethod
    def from_polynomials(cls, polys: Sequence[Polynomial]) -> "PolyField":
        dim = len(polys)
        return cls.from_terms(
            dim, [(i, float(c), e) for i, P in enumerate(polys) for e, c in sorted(P.terms.items())]
        )

    def pack(self):
        return (self.idx, self.coef, self.exp, self.jrow, self.jcol, self.jcoef, self.jexp)


@numba.njit(cache=True)
def _monomial(c, e, y):
    v = c
    for j in range(y.size):
        for _ in range(e[j]):
            v *= y[j]
    return v


@numba.njit(cache=True)
def eval_field(F, y, out):
    idx, coef, exp = F[0], F[1], F[2]
    out[:] = 0.0
    for t in range(coef.size):
        out[idx[t]] += _monomial(coef[t], exp[t], y)


@numba.njit(cache=True)
def eval_jacobian(F, y, J):
    jrow, jcol, jcoef, jexp = F[3], F[4], F[5], F[6]
    J[:, :] = 0.0
    for t in range(jcoef.size):
        J[jrow[t], jcol[t]] += _monomial(jcoef[t], jexp[t], y)


@dataclass(frozen=True)
class System:
    name: str
    state_names: tuple[str, ...]
    poly: PolyField
    energy: Callable[[np.ndarray], np.ndarray]
    audits: dict[str, Callable[[np.ndarray], np.ndarray]] = field(default_factory=dict)
    params: dict[str, float | str] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.state_names)

    def field(self, y) -> np.ndarray:
        out = np.empty(self.dim)
        eval_field(self.poly.pack(), np.asarray(y, dtype=float), out)
        return out

    def jacobian(self, y) -> np.ndarray:
        J = np.empty((self.dim, self.dim))
        eval_jacobian(self.poly.pack(), np.asarray(y, dtype=float), J)
        return J


def compile_polynomial(P: Polynomial) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized float evaluator ``f(Y)`` over the last axis of ``Y``."""
    terms = [(float(c), e) for e, c in sorted(P.terms.items())]

    def f(Y):
        Y = np.asarray(Y, dtype=float)
        total = np.zeros(Y.shape[:-1])
        for c, e in terms:
            t = np.full(Y.shape[:-1], c)
            for j, a in enumerate(e):
                if a:
                    t = t * Y[..., j] ** a
            total = total + t
        return total

    return f


def full_system(alg: LieAlgebra | None = None, H: Polynomial | None = None) -> System:
    """Lie-Poisson flow ``de_i/dt = {e_i, H}`` on the dual of ``alg`` (default n4)."""
    alg = alg or builtin("n4")
    if H is None:
        H = sub_riemannian_hamiltonian(alg)
    audits = {"H": compile_polynomial(H)}
    for k, C in enumerate(casimirs(alg)):
        audits[f"C{k + 1}"] = compile_polynomial(C)
    return System(
        name="full",
        state_names=dual_names(alg),
        poly=PolyField.from_polynomials(hamiltonian_vector_field(H)),
        energy=audits["H"],
        audits=audits,
        params={"algebra": alg.name},
    )


def reduced_energy(S: np.ndarray, w0: float, C: float) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    x, z, ut, vt = S[..., 0], S[..., 1], S[..., 2], S[..., 3]
    return 0.5 * (x**2 + z**2 + (C / w0 - w0 * ut * vt) ** 2)


def reduced_system(w0: float, C: float) -> System:
    """Flow of ``1/2 (x^2 + z^2 + (C/w0 - w0 ut vt)^2)``; state ``(x, z, ut, vt)``.

    Hamilton's equations under the pairing above:
    ``x' = w0 ut Y``, ``z' = -w0 vt Y``, ``ut' = -z``, ``vt' = x`` with
    ``Y = C/w0 - w0 ut vt``.
    """
    if w0 == 0 or C == 0:
        raise ValueError("reduced system needs w0 != 0 and C != 0")
    terms = [
        (0, C, (0, 0, 1, 0)),
        (0, -w0 * w0, (0, 0, 2, 1)),
        (1, -C, (0, 0, 0, 1)),
        (1, w0 * w0, (0, 0, 1, 2)),
        (2, -1.0, (0, 1, 0, 0)),
        (3, 1.0, (1, 0, 0, 0)),
    ]
    energy = lambda S: reduced_energy(S, w0, C)  # noqa: E731
    return System(
        name="reduced",
        state_names=("x", "z", "ut", "vt"),
        poly=PolyField.from_terms(4, terms),
        energy=energy,
        audits={"H": energy},
        params={"w0": w0, "C": C},
    )


def yang_mills_energy(S: np.ndarray, coupling: float = 0.0) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    q1, q2, p1, p2 = S[..., 0], S[..., 1], S[..., 2], S[..., 3]
    return 0.5 * (p1**2 + p2**2) + 0.5 * q1**2 * q2**2 - coupling * q1 * q2


def yang_mills_system(coupling: float = 0.0) -> System:
    """``H = 1/2 (p1^2 + p2^2) + 1/2 q1^2 q2^2 - coupling * q1 q2``; state ``(q1, q2, p1, p2)``."""
    terms = [
        (0, 1.0, (0, 0, 1, 0)),
        (1, 1.0, (0, 0, 0, 1)),
        (2, -1.0, (1, 2, 0, 0)),
        (2, coupling, (0, 1, 0, 0)),
        (3, -1.0, (2, 1, 0, 0)),
        (3, coupling, (1, 0, 0, 0)),
    ]
    energy = lambda S: yang_mills_energy(S, coupling)  # noqa: E731
    return System(
        name="yang_mills",
        state_names=("q1", "q2", "p1", "p2"),
        poly=PolyField.from_terms(4, terms),
        energy=energy,
        audits={"H": energy},
        params={"coupling": coupling},
    )


def heisenberg_reduced_system(w0: float) -> System:
    """Heisenberg flow on the orbit ``w = w0`` in the chart ``(x, yt = y/w0)``.

    ``{x, yt} = 1`` and ``H = 1/2 (x^2 + w0^2 yt^2)``: a harmonic oscillator
    of angular frequency ``|w0|``.
    """
    if w0 == 0:
        raise ValueError("w0 must be nonzero")
    terms = [(0, w0 * w0, (0, 1)), (1, -1.0, (1, 0))]

    def energy(S):
        S = np.asarray(S, dtype=float)
        return 0.5 * (S[..., 0] ** 2 + w0**2 * S[..., 1] ** 2)

    return System(
        name="heisenberg_reduced",
        state_names=("x", "yt"),
        poly=PolyField.from_terms(2, terms),
        energy=energy,
        audits={"H": energy},
        params={"w0": w0},
    )


def sample_energy_shell(system: System, E: float, rng: np.random.Generator) -> np.ndarray:
    """Seeded initial state with energy ``E``.

    Yang-Mills: ``q`` uniform in a box scaled to the shell, rejected until
    the potential is below ``E``, then ``|p| = sqrt(2 (E - V))`` at a uniform
    angle. Heisenberg: uniform phase on the energy ellipse. Full system: a
    Gaussian direction with the first layer rescaled to energy ``E``.
    """
    if not E > 0:
        raise ValueError("energy must be positive")
    if system.name == "yang_mills":
        k = float(system.params["coupling"])
        box = 1.5 * (2 * E) ** 0.25
        for _ in range(10000):
            q = rng.uniform(-box, box, 2)
            V = 0.5 * q[0] ** 2 * q[1] ** 2 - k * q[0] * q[1]
            if V < E:
                break
        else:
            raise ValueError("could not sample a position below the requested energy")
        pm = np.sqrt(2 * (E - V))
        a = rng.uniform(0, 2 * np.pi)
        return np.array([q[0], q[1], pm * np.cos(a), pm * np.sin(a)])
    if system.name == "heisenberg_reduced":
        w0 = float(system.params["w0"])
        a = rng.uniform(0, 2 * np.pi)
        r = np.sqrt(2 * E)
        return np.array([r * np.cos(a), r * np.sin(a) / abs(w0)])
    if system.name == "full":
        p = rng.standard_normal(system.dim)
        m = min(3, system.dim)
        p[:m] *= np.sqrt(2 * E) / np.linalg.norm(p[:m])
        return p
    raise ValueError(f"energy sampling is not supported for system {system.name!r}; give an initial state")
