"""Chaos diagnostics: largest Lyapunov exponent and Poincare sections."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .integrate import METHODS, DynamicsError, IntegratorConfig, NewtonConvergenceError, _step
from .systems import System, eval_field

__all__ = [
    "EscapeError",
    "LyapunovResult",
    "PoincareSection",
    "lyapunov_max",
    "poincare_section",
]


class EscapeError(DynamicsError):
    def __init__(self, time: float):
        super().__init__(f"trajectory left the floating point range near t = {time}")
        self.time = time


@numba.njit(cache=True)
def _benettin(F, method, y0, d, h, steps_per, nrenorm, d0, tol, maxit):
    """Two-trajectory renormalization. Returns (log stretches, status, index).

    status: 0 ok, 1 Newton failure, 2 non-finite state.
    """
    n = y0.size
    logs = np.zeros(nrenorm)
    a = y0.copy()
    b = y0 + d0 * d
    na = np.empty(n)
    nb = np.empty(n)
    for r in range(nrenorm):
        for s in range(steps_per):
            if _step(F, method, a, h, tol, maxit, na) < 0:
                return logs[:r], 1, r * steps_per + s
            if _step(F, method, b, h, tol, maxit, nb) < 0:
                return logs[:r], 1, r * steps_per + s
            a[:] = na
            b[:] = nb
        dist = 0.0
        for i in range(n):
            dist += (b[i] - a[i]) ** 2
        dist = np.sqrt(dist)
        if not np.isfinite(dist) or not np.all(np.isfinite(a)):
            return logs[:r], 2, (r + 1) * steps_per
        if dist == 0.0:
            # perturbation collapsed onto the reference; restart along the seed direction
            logs[r] = 0.0
            for i in range(n):
                b[i] = a[i] + d0 * d[i]
            continue
        logs[r] = np.log(dist / d0)
        for i in range(n):
            b[i] = a[i] + (b[i] - a[i]) * (d0 / dist)
    return logs, 0, -1


@dataclass
class LyapunovResult:
    """``estimate`` is the mean log stretch per unit time over the horizon.

    ``series[k]`` is the running estimate after ``times[k]``.
    """

    estimate: float
    times: np.ndarray
    series: np.ndarray
    log_stretches: np.ndarray
    renorm_interval: float
    horizon: float

    def to_dict(self) -> dict:
        return {
            "lambda_max": self.estimate,
            "renorm_interval": self.renorm_interval,
            "horizon": self.horizon,
            "n_renormalizations": int(self.times.size),
        }


def lyapunov_max(
    system: System,
    y0,
    cfg: IntegratorConfig,
    renorm_interval: float = 1.0,
    horizon: float = 1e3,
    *,
    separation: float = 1e-8,
    seed: int = 0,
    direction=None,
) -> LyapunovResult:
    """Largest Lyapunov exponent by the Benettin renormalization scheme.

    The initial perturbation direction is random (from ``seed``) unless
    given. Raises :class:`EscapeError` with the escape time if the state
    overflows.
    """
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (system.dim,):
        raise ValueError(f"initial state must have {system.dim} entries")
    if not 0 < renorm_interval <= horizon:
        raise ValueError("need 0 < renorm_interval <= horizon")
    steps_per = max(1, int(round(renorm_interval / cfg.dt)))
    nrenorm = max(1, int(round(horizon / renorm_interval)))
    if direction is None:
        direction = np.random.default_rng(seed).standard_normal(system.dim)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    logs, status, at = _benettin(
        system.poly.pack(), METHODS[cfg.method], y0, d, cfg.dt, steps_per, nrenorm,
        separation, cfg.newton_tol, cfg.newton_max_iters,
    )
    if status == 1:
        raise NewtonConvergenceError(int(at))
    if status == 2:
        raise EscapeError(at * cfg.dt)
    tau = steps_per * cfg.dt
    times = tau * np.arange(1, logs.size + 1)
    series = np.cumsum(logs) / times
    return LyapunovResult(float(series[-1]), times, series, logs, tau, float(times[-1]))


@numba.njit(cache=True)
def _hermite(y0, y1, f0, f1, h, s, out):
    s2 = s * s
    s3 = s2 * s
    a = 2 * s3 - 3 * s2 + 1
    b = s3 - 2 * s2 + s
    c = -2 * s3 + 3 * s2
    d = s3 - s2
    for i in range(y0.size):
        out[i] = a * y0[i] + b * h * f0[i] + c * y1[i] + d * h * f1[i]


@numba.njit(cache=True)
def _section(F, method, y0, h, nsteps, idx, value, direction, tol, maxit, rtol):
    n = y0.size
    cap = 64
    times = np.empty(cap)
    pts = np.empty((cap, n))
    k = 0
    y = y0.copy()
    z = np.empty(n)
    f0 = np.empty(n)
    f1 = np.empty(n)
    p = np.empty(n)
    eval_field(F, y, f0)
    for s in range(nsteps):
        if _step(F, method, y, h, tol, maxit, z) < 0:
            return times[:k], pts[:k], 1, s
        if not np.all(np.isfinite(z)):
            return times[:k], pts[:k], 2, s
        eval_field(F, z, f1)
        g0 = y[idx] - value
        g1 = z[idx] - value
        hit = False
        if direction >= 0 and g0 < 0.0 and g1 >= 0.0:
            hit = True
        if direction <= 0 and g0 > 0.0 and g1 <= 0.0:
            hit = True
        if hit:
            lo = 0.0
            hi = 1.0
            glo = g0
            sm = 1.0
            for _ in range(200):
                sm = 0.5 * (lo + hi)
                _hermite(y, z, f0, f1, h, sm, p)
                gm = p[idx] - value
                if abs(gm) < rtol:
                    break
                if (gm < 0.0) == (glo < 0.0):
                    lo = sm
                    glo = gm
                else:
                    hi = sm
            _hermite(y, z, f0, f1, h, sm, p)
            if k == cap:
                cap *= 2
                nt = np.empty(cap)
                nt[:k] = times[:k]
                npts = np.empty((cap, n))
                npts[:k] = pts[:k]
                times = nt
                pts = npts
            times[k] = (s + sm) * h
            pts[k] = p
            k += 1
        y[:] = z
        f0[:] = f1
    return times[:k], pts[:k], 0, -1


@dataclass
class PoincareSection:
    """Crossings of ``state[index] = value``; ``points`` holds full interpolated states."""

    times: np.ndarray
    points: np.ndarray
    index: int
    value: float
    direction: int
    state_names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.times)

    def columns(self) -> list[str]:
        return ["t", *(nm for i, nm in enumerate(self.state_names) if i != self.index)]

    def rows(self):
        keep = [i for i in range(len(self.state_names)) if i != self.index]
        for t, p in zip(self.times, self.points):
            yield [t, *p[keep]]


def poincare_section(
    system: System,
    y0,
    cfg: IntegratorConfig,
    index: int,
    value: float = 0.0,
    direction: int = 1,
    *,
    residual_tol: float = 1e-10,
) -> PoincareSection:
    """Locate crossings of the hyperplane ``state[index] = value`` over ``[0, cfg.T]``.

    Each crossing is refined by bisection on the cubic Hermite interpolant of
    the step until the section residual is below ``residual_tol``.
    ``direction`` is +1 (increasing), -1 (decreasing) or 0 (both).
    """
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (system.dim,):
        raise ValueError(f"initial state must have {system.dim} entries")
    if not 0 <= index < system.dim:
        raise ValueError(f"section index must be in [0, {system.dim})")
    if direction not in (-1, 0, 1):
        raise ValueError("direction must be -1, 0 or 1")
    times, pts, status, at = _section(
        system.poly.pack(), METHODS[cfg.method], y0, cfg.dt, cfg.nsteps, index,
        float(value), direction, cfg.newton_tol, cfg.newton_max_iters, residual_tol,
    )
    if status == 1:
        raise NewtonConvergenceError(int(at))
    if status == 2:
        raise EscapeError(at * cfg.dt)
    return PoincareSection(times, pts, index, float(value), direction, system.state_names)
