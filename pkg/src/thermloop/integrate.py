"""Adaptive embedded Runge-Kutta integration of the plant model.

Dormand-Prince 5(4) pair with standard mixed absolute/relative error
control.  Controls are held constant over a window, exogenous inputs are
linear in time.  Steps land exactly on the fixed output grid (default
60 s) so closed-loop sampling is deterministic; the step size proposal is
carried across the clipped boundary steps and can be threaded through
consecutive windows via ``h_init``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["IntegratorConfig", "IntegrationResult", "integrate"]

# Dormand-Prince coefficients
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_ERR = _B5 - _B4


@dataclass
class IntegratorConfig:
    method: str = "rk45"
    rtol: float = 1e-6
    atol: float = 1e-8
    max_step: float = 30.0
    dt_out: float = 60.0
    h_init: float | None = None
    h_min: float = 1e-10

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("rtol and atol must be positive")


@dataclass
class IntegrationResult:
    t: np.ndarray               # output grid times, t0 .. t_end
    x: np.ndarray               # (len(t), n) samples on the grid
    t_end: float                # last time reached (== t1 on success)
    x_end: np.ndarray
    h_last: float               # accepted-step proposal to seed the next window
    n_steps: int
    n_rejected: int
    success: bool
    message: str = ""


def integrate(rhs, x0, u_held, c_series, t0: float, t1: float, cfg: IntegratorConfig) -> IntegrationResult:
    """Integrate dx/dt = rhs(x, u_held, c(t)) from t0 to t1.

    c_series may be None, a constant array, or a callable t -> array.
    """
    if not t1 > t0:
        raise ValueError("t1 must be greater than t0")
    x = np.array(x0, dtype=float)
    if not np.isfinite(x).all():
        raise ValueError("non-finite initial state")

    if c_series is None or isinstance(c_series, np.ndarray):
        def c_at(_t, _c=c_series):
            return _c
    else:
        c_at = c_series

    def f(t, y):
        return np.asarray(rhs(y, u_held, c_at(t)), dtype=float)

    out_t = [t0]
    out_x = [x.copy()]
    t = t0
    k = [np.zeros_like(x) for _ in range(7)]
    k[0] = f(t, x)

    h_prop = cfg.h_init if cfg.h_init is not None else _initial_step(f, t, x, k[0], cfg)
    h_prop = min(h_prop, cfg.max_step, t1 - t0)
    n_steps = n_rejected = 0
    next_out = t0 + cfg.dt_out

    while t < t1 - 1e-9:
        boundary = min(t1, next_out)
        h = min(h_prop, cfg.max_step, boundary - t)
        if h < cfg.h_min:
            return IntegrationResult(
                np.array(out_t), np.array(out_x), t, x, h_prop, n_steps, n_rejected,
                success=False, message=f"step size underflow at t={t:.6g}",
            )
        # stages (FSAL: k[6] of an accepted step is k[0] of the next)
        for i in range(1, 7):
            xi = x + h * sum(a * k[j] for j, a in enumerate(_A[i]))
            k[i] = f(t + _C[i] * h, xi)
        x_new = x + h * sum(b * k[j] for j, b in enumerate(_B5) if b != 0.0)
        err_vec = h * sum(e * k[j] for j, e in enumerate(_ERR) if e != 0.0)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(x), np.abs(x_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if not np.isfinite(err):
            err = 10.0

        if err <= 1.0:
            t = t + h
            x = x_new
            k[0] = k[6]
            n_steps += 1
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
            h_prop = min(cfg.max_step, h * factor)
            if t >= boundary - 1e-9:
                if abs(t - next_out) <= 1e-6 or t >= t1 - 1e-9:
                    out_t.append(t)
                    out_x.append(x.copy())
                if t >= next_out - 1e-9:
                    next_out += cfg.dt_out
        else:
            n_rejected += 1
            h_prop = h * max(0.1, 0.9 * err ** (-0.2))

    return IntegrationResult(
        np.array(out_t), np.array(out_x), t, x, h_prop, n_steps, n_rejected,
        success=True,
    )


def _initial_step(f, t0, x0, f0, cfg: IntegratorConfig) -> float:
    """Hairer-style starting step guess."""
    scale = cfg.atol + cfg.rtol * np.abs(x0)
    d0 = float(np.sqrt(np.mean((x0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    x1 = x0 + h0 * f0
    f1 = f(t0 + h0, x1)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, cfg.max_step)
