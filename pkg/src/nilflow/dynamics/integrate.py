"""Fixed-step integration: implicit midpoint (symplectic) and classical RK4."""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .systems import System, eval_field, eval_jacobian

__all__ = [
    "DynamicsError",
    "IntegratorConfig",
    "NewtonConvergenceError",
    "Trajectory",
    "integrate",
    "step",
]

METHODS = {"implicit_midpoint": 0, "rk4": 1}


class DynamicsError(RuntimeError):
    """Numerical failure inside the dynamics layer."""


class NewtonConvergenceError(DynamicsError):
    def __init__(self, step: int):
        super().__init__(f"implicit midpoint Newton solve did not converge at step {step}")
        self.step = step


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "implicit_midpoint"
    dt: float = 1e-3
    T: float = 1.0
    newton_tol: float = 1e-12
    newton_max_iters: int = 50
    stride: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {sorted(METHODS)}")
        if not self.dt > 0 or not self.T > 0:
            raise ValueError("dt and T must be positive")
        if not self.newton_tol > 0 or self.newton_max_iters < 1:
            raise ValueError("Newton tolerance and iteration cap must be positive")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    @property
    def nsteps(self) -> int:
        return max(1, int(round(self.T / self.dt)))


@dataclass
class Trajectory:
    """Samples on a uniform grid plus per-sample conserved-quantity audits."""

    times: np.ndarray
    states: np.ndarray
    state_names: tuple[str, ...]
    audits: dict[str, np.ndarray] = field(default_factory=dict)
    system: str = ""

    def drift(self) -> dict[str, float]:
        """Max absolute deviation of each audit column from its initial value."""
        return {k: float(np.max(np.abs(v - v[0]))) for k, v in self.audits.items()}

    def columns(self) -> list[str]:
        return ["t", *self.state_names, *self.audits]

    def rows(self):
        for i, t in enumerate(self.times):
            yield [t, *self.states[i], *(v[i] for v in self.audits.values())]


@numba.njit(cache=True)
def _solve(A, b):
    """Gaussian elimination with partial pivoting for small dense systems."""
    n = b.size
    A = A.copy()
    x = b.copy()
    for c in range(n):
        piv = c
        best = abs(A[c, c])
        for r in range(c + 1, n):
            if abs(A[r, c]) > best:
                best = abs(A[r, c])
                piv = r
        if piv != c:
            for k in range(n):
                t = A[c, k]
                A[c, k] = A[piv, k]
                A[piv, k] = t
            t = x[c]
            x[c] = x[piv]
            x[piv] = t
        for r in range(c + 1, n):
            f = A[r, c] / A[c, c]
            if f != 0.0:
                for k in range(c, n):
                    A[r, k] -= f * A[c, k]
                x[r] -= f * x[c]
    for c in range(n - 1, -1, -1):
        s = x[c]
        for k in range(c + 1, n):
            s -= A[c, k] * x[k]
        x[c] = s / A[c, c]
    return x


@numba.njit(cache=True)
def _midpoint(F, y, h, tol, maxit, out):
    """One implicit midpoint step into ``out``; returns Newton iterations or -1."""
    n = y.size
    f = np.empty(n)
    m = np.empty(n)
    J = np.empty((n, n))
    eval_field(F, y, f)
    z = y + h * f
    iters = -1
    for it in range(maxit):
        for i in range(n):
            m[i] = 0.5 * (y[i] + z[i])
        eval_field(F, m, f)
        G = z - y - h * f
        eval_jacobian(F, m, J)
        M = -0.5 * h * J
        for i in range(n):
            M[i, i] += 1.0
        delta = _solve(M, G)
        z -= delta
        if np.max(np.abs(delta)) <= tol * (1.0 + np.max(np.abs(z))):
            iters = it + 1
            break
    # explicit final update keeps components with identically zero rate exact
    for i in range(n):
        m[i] = 0.5 * (y[i] + z[i])
    eval_field(F, m, f)
    for i in range(n):
        out[i] = y[i] + h * f[i]
    return iters


@numba.njit(cache=True)
def _rk4(F, y, h, out):
    n = y.size
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    eval_field(F, y, k1)
    eval_field(F, y + 0.5 * h * k1, k2)
    eval_field(F, y + 0.5 * h * k2, k3)
    eval_field(F, y + h * k3, k4)
    for i in range(n):
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return 1


@numba.njit(cache=True)
def _step(F, method, y, h, tol, maxit, out):
    if method == 0:
        return _midpoint(F, y, h, tol, maxit, out)
    return _rk4(F, y, h, out)


@numba.njit(cache=True)
def _run(F, method, y0, h, nsteps, stride, tol, maxit):
    n = y0.size
    nsave = nsteps // stride + 1
    states = np.empty((nsave, n))
    states[0] = y0
    y = y0.copy()
    z = np.empty(n)
    k = 1
    for s in range(nsteps):
        if _step(F, method, y, h, tol, maxit, z) < 0:
            return states[:k], s
        y[:] = z
        if (s + 1) % stride == 0:
            states[k] = y
            k += 1
    return states[:k], -1


def step(system: System, y, cfg: IntegratorConfig, h: float | None = None) -> np.ndarray:
    """Advance one step of size ``h`` (default ``cfg.dt``)."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    it = _step(
        system.poly.pack(), METHODS[cfg.method], y,
        cfg.dt if h is None else h, cfg.newton_tol, cfg.newton_max_iters, out,
    )
    if it < 0:
        raise NewtonConvergenceError(0)
    return out


def integrate(system: System, y0, cfg: IntegratorConfig) -> Trajectory:
    """Integrate ``system`` from ``y0`` over ``[0, cfg.T]`` with fixed step ``cfg.dt``.

    Raises :class:`NewtonConvergenceError` naming the failing step, or
    :class:`DynamicsError` if the state leaves the floating point range.
    """
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (system.dim,):
        raise ValueError(f"initial state must have {system.dim} entries")
    states, fail = _run(
        system.poly.pack(), METHODS[cfg.method], y0, cfg.dt,
        cfg.nsteps, cfg.stride, cfg.newton_tol, cfg.newton_max_iters,
    )
    if fail >= 0:
        raise NewtonConvergenceError(int(fail))
    if not np.all(np.isfinite(states)):
        bad = int(np.argmax(~np.all(np.isfinite(states), axis=1)))
        raise DynamicsError(f"state became non-finite near t = {bad * cfg.stride * cfg.dt}")
    times = np.arange(states.shape[0]) * (cfg.stride * cfg.dt)
    audits = {name: np.asarray(f(states), dtype=float) for name, f in system.audits.items()}
    return Trajectory(times, states, system.state_names, audits, system.name)
