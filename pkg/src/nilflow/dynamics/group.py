"""Horizontal lift to the group of 4x4 lower unitriangular matrices, and shooting.

The group path solves ``g' = g (x E21 + y E32 + z E43)``, ``g(0) = I``. Each
step multiplies by the exact exponential of the midpoint-averaged control;
the exponential of a strictly lower triangular 4x4 matrix is a cubic
polynomial, so the step map is exact for piecewise-constant controls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import least_squares

from .integrate import IntegratorConfig, Trajectory, integrate
from .systems import full_system

__all__ = [
    "ENTRY_NAMES",
    "GroupElement",
    "GroupPath",
    "ShootResult",
    "endpoint",
    "exp_horizontal",
    "reconstruct_group",
    "shoot_endpoint",
]

# (row, col), 1-based, of the stored sub-diagonal entries
ENTRIES = ((2, 1), (3, 2), (4, 3), (3, 1), (4, 2), (4, 1))
ENTRY_NAMES = tuple(f"g{r}{c}" for r, c in ENTRIES)


@numba.njit(cache=True)
def _compose(g, h, out):
    # product of I + A and I + B in the entry order of ENTRIES
    out[0] = g[0] + h[0]
    out[1] = g[1] + h[1]
    out[2] = g[2] + h[2]
    out[3] = g[3] + h[3] + g[1] * h[0]
    out[4] = g[4] + h[4] + g[2] * h[1]
    out[5] = g[5] + h[5] + g[4] * h[0] + g[2] * h[3]


@numba.njit(cache=True)
def _exp(a, b, c, out):
    out[0] = a
    out[1] = b
    out[2] = c
    out[3] = 0.5 * a * b
    out[4] = 0.5 * b * c
    out[5] = a * b * c / 6.0


@numba.njit(cache=True)
def _lift(controls, dts):
    n = controls.shape[0]
    path = np.zeros((n, 6))
    e = np.empty(6)
    for k in range(n - 1):
        h = dts[k]
        a = 0.5 * h * (controls[k, 0] + controls[k + 1, 0])
        b = 0.5 * h * (controls[k, 1] + controls[k + 1, 1])
        c = 0.5 * h * (controls[k, 2] + controls[k + 1, 2])
        _exp(a, b, c, e)
        _compose(path[k], e, path[k + 1])
    return path


@dataclass(frozen=True)
class GroupElement:
    """Lower unitriangular 4x4 matrix, stored as its six sub-diagonal entries."""

    entries: tuple[float, float, float, float, float, float] = (0.0,) * 6

    def __post_init__(self):
        if len(self.entries) != 6:
            raise ValueError("a group element has exactly 6 free entries")
        object.__setattr__(self, "entries", tuple(float(v) for v in self.entries))

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls()

    @classmethod
    def from_matrix(cls, M) -> "GroupElement":
        M = np.asarray(M, dtype=float)
        if M.shape != (4, 4):
            raise ValueError("expected a 4x4 matrix")
        if not (np.all(np.diag(M) == 1.0) and np.all(np.triu(M, 1) == 0.0)):
            raise ValueError("matrix is not lower unitriangular")
        return cls(tuple(M[r - 1, c - 1] for r, c in ENTRIES))

    def matrix(self) -> np.ndarray:
        M = np.eye(4)
        for (r, c), v in zip(ENTRIES, self.entries):
            M[r - 1, c - 1] = v
        return M

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        out = np.empty(6)
        _compose(np.array(self.entries), np.array(other.entries), out)
        return GroupElement(tuple(out))

    def as_array(self) -> np.ndarray:
        return np.array(self.entries)


def exp_horizontal(a: float, b: float, c: float) -> GroupElement:
    """``exp(a E21 + b E32 + c E43)``, exact."""
    out = np.empty(6)
    _exp(float(a), float(b), float(c), out)
    return GroupElement(tuple(out))


@dataclass
class GroupPath:
    """Group trajectory on the time grid of the momentum trajectory."""

    times: np.ndarray
    entries: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, i) -> GroupElement:
        return GroupElement(tuple(self.entries[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def final(self) -> GroupElement:
        return self[-1]


def reconstruct_group(traj: Trajectory | np.ndarray, times=None) -> GroupPath:
    """Lift a full-system momentum trajectory to the group.

    The controls are the first-layer momenta ``(x, y, z)``, i.e. the first
    three state columns. ``traj`` may be a :class:`Trajectory` or a state
    array together with ``times``.
    """
    if isinstance(traj, Trajectory):
        times, states = traj.times, traj.states
    else:
        states = np.asarray(traj, dtype=float)
        if times is None:
            raise ValueError("times are required when passing a raw state array")
    times = np.asarray(times, dtype=float)
    controls = np.ascontiguousarray(states[:, :3])
    return GroupPath(times, _lift(controls, np.diff(times)))


def endpoint(p0, T: float, dt: float, method: str = "implicit_midpoint") -> np.ndarray:
    """Group endpoint entries after time ``T`` from initial momentum ``p0``."""
    cfg = IntegratorConfig(method=method, dt=dt, T=T)
    traj = integrate(full_system(), p0, cfg)
    return reconstruct_group(traj).entries[-1]


@dataclass
class ShootResult:
    p0: np.ndarray
    residual: float
    iterations: int
    converged: bool
    endpoint: np.ndarray
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "p0": [float(v) for v in self.p0],
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "endpoint": [float(v) for v in self.endpoint],
            "message": self.message,
        }


def shoot_endpoint(
    target: GroupElement,
    T: float,
    p0_guess,
    *,
    dt: float = 1e-3,
    tol: float = 1e-8,
    max_iters: int = 200,
) -> ShootResult:
    """Damped least squares (Levenberg-Marquardt) for ``p0`` with ``endpoint(p0) = target``.

    Returns the best iterate found; ``converged`` is False when the residual
    norm stays above ``tol`` within ``max_iters`` residual evaluations.
    """
    goal = target.as_array()
    guess = np.asarray(p0_guess, dtype=float)
    if guess.shape != (6,):
        raise ValueError("initial momentum must have 6 entries")

    def residual(p):
        return endpoint(p, T, dt) - goal

    r0 = residual(guess)
    if np.linalg.norm(r0) < tol:
        return ShootResult(guess, float(np.linalg.norm(r0)), 0, True, r0 + goal, "initial guess")
    sol = least_squares(
        residual, guess, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iters
    )
    best = sol.x
    res = float(np.linalg.norm(sol.fun))
    if res > np.linalg.norm(r0):
        best, res = guess, float(np.linalg.norm(r0))
    return ShootResult(best, res, int(sol.nfev), res < tol, residual(best) + goal, sol.message)
