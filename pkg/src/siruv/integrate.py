"""Explicit Runge-Kutta integration of autonomous or time-dependent systems.

The integrator is agnostic of the model: ``rhs(t, y)`` takes and returns arrays of
any fixed shape.  Two methods are available, classical fixed-step RK4 and the
Runge-Kutta-Fehlberg 4(5) pair with step-size control.  Output is sampled on a
regular grid by linear interpolation between accepted steps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteState, StepLimitExceeded, ToleranceUnreachable, ValidationError

DT_MIN = 1e-10


class Method(enum.Enum):
    RK4 = "rk4"
    RKF45 = "rkf45"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(
                f"unknown method {value!r}; expected one of {[m.value for m in cls]}"
            ) from None


@dataclass(frozen=True)
class SolverConfig:
    """Integration settings; times in days.

    ``dt`` is the fixed RK4 step or the initial RKF45 step.  ``max_steps`` defaults
    to whichever is larger of one million and the RK4 step count.
    """

    method: Method = Method.RK4
    dt: float = 0.01
    t_end: float = 2000.0
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_steps: int | None = None
    sample_every: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        for name in ("dt", "t_end", "rel_tol", "abs_tol", "sample_every"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"solver {name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.max_steps is not None:
            object.__setattr__(self, "max_steps", int(self.max_steps))
            if self.max_steps < self.t_end / self.dt:
                raise ValidationError(
                    f"max_steps={self.max_steps} cannot cover t_end/dt={self.t_end / self.dt:g}"
                )

    @property
    def step_limit(self) -> int:
        if self.max_steps is not None:
            return self.max_steps
        return max(1_000_000, fixed_step_count(self.t_end, self.dt))


@dataclass
class Trajectory:
    """Sampled solution.  ``states[k]`` is the state at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray
    model: object = None
    provenance: str = ""
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if len(self.times) != len(self.states):
            raise ValidationError("times and states differ in length")
        if len(self.times) and (self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0)):
            raise ValidationError("trajectory times must start at 0 and increase strictly")

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def fixed_step_count(t_end: float, dt: float) -> int:
    # guard against t_end/dt landing one ulp above an integer
    return max(1, math.ceil(t_end / dt * (1 - 1e-12)))


def sample_times(t_end: float, every: float) -> np.ndarray:
    """Multiples of ``every`` up to ``t_end``, plus ``t_end`` itself if it falls between."""
    m = math.floor(t_end / every * (1 + 1e-12))
    times = np.arange(m + 1) * every
    times = times[times <= t_end * (1 + 1e-12)]
    if t_end - times[-1] > 1e-9 * max(1.0, t_end):
        times = np.append(times, t_end)
    return times


class _Sampler:
    def __init__(self, times, y0, snap):
        self.times = times
        self.out = np.empty((len(times),) + np.shape(y0))
        self.out[0] = y0
        self.k = 1
        self.snap = snap

    def push(self, ta, ya, tb, yb):
        times, k = self.times, self.k
        while k < len(times) and times[k] <= tb + self.snap:
            s = times[k]
            if abs(tb - s) <= self.snap:
                self.out[k] = yb
            else:
                self.out[k] = ya + (yb - ya) * ((s - ta) / (tb - ta))
            k += 1
        self.k = k

    @property
    def done(self):
        return self.k >= len(self.times)


def _rk4(rhs, y0, cfg, sampler):
    dt, t_end = cfg.dt, cfg.t_end
    steps = fixed_step_count(t_end, dt)
    if steps > cfg.step_limit:
        raise StepLimitExceeded(0.0, cfg.step_limit)
    y = np.array(y0, dtype=float)
    # Kahan compensation: over 1e5+ steps plain accumulation of increments loses
    # enough bits to mask fourth-order convergence
    comp = np.zeros_like(y)
    t = 0.0
    for k in range(steps):
        t_next = min((k + 1) * dt, t_end) if k + 1 < steps else t_end
        h = t_next - t
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1)
        k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2)
        k4 = rhs(t_next, y + h * k3)
        incr = (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4) - comp
        y_next = y + incr
        comp = (y_next - y) - incr
        # NaN and inf both poison the sum
        if not math.isfinite(y_next.sum()):
            raise NonFiniteState(t_next)
        sampler.push(t, y, t_next, y_next)
        t, y = t_next, y_next
    return {"steps": steps, "rejected": 0}


# Fehlberg 4(5) tableau; the 4th-order solution is propagated
_C = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
_E = tuple(b5 - b4 for b4, b5 in zip(_B4, _B5))


def _rkf45(rhs, y0, cfg, sampler):
    t_end = cfg.t_end
    y = np.array(y0, dtype=float)
    t = 0.0
    h = min(cfg.dt, t_end)
    attempts = rejected = 0
    f0 = rhs(t, y)
    times = sampler.times
    while t < t_end:
        if attempts >= cfg.step_limit:
            raise StepLimitExceeded(t, cfg.step_limit)
        attempts += 1
        # steps end on sample times so that no sample is interpolated across a long step
        target = times[sampler.k] if not sampler.done else t_end
        clamped = h >= target - t
        step = target - t if clamped else h
        ks = [f0]
        for s in range(1, 6):
            incr = sum(a * kk for a, kk in zip(_A[s], ks) if a)
            ks.append(rhs(t + _C[s] * step, y + step * incr))
        y_next = y + step * sum(b * kk for b, kk in zip(_B4, ks) if b)
        err_vec = step * sum(e * kk for e, kk in zip(_E, ks) if e)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_next))
        err = float(np.max(np.abs(err_vec) / scale))
        if not math.isfinite(err):
            factor = 0.2
        elif err == 0.0:
            factor = 5.0
        else:
            factor = min(5.0, max(0.2, 0.9 * err ** -0.2))
        if math.isfinite(err) and err <= 1.0:
            t_next = target if clamped else t + step
            if not math.isfinite(y_next.sum()):
                raise NonFiniteState(t_next)
            sampler.push(t, y, t_next, y_next)
            t, y = t_next, y_next
            f0 = rhs(t, y)
            h = max(h, step * factor) if clamped else step * factor
        else:
            rejected += 1
            h = step * factor
        if h < DT_MIN and t < t_end:
            raise ToleranceUnreachable(t, h)
    return {"steps": attempts - rejected, "rejected": rejected}


def integrate(rhs, state0, cfg: SolverConfig | None = None, *, model=None, provenance="") -> Trajectory:
    """Integrate ``dy/dt = rhs(t, y)`` from ``y(0) = state0`` to ``cfg.t_end``.

    Samples are taken at every multiple of ``cfg.sample_every`` (and at ``t_end``).

    Raises
    ------
    StepLimitExceeded, NonFiniteState, ToleranceUnreachable
    """
    cfg = cfg or SolverConfig()
    y0 = np.array(state0, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise NonFiniteState(0.0)
    times = sample_times(cfg.t_end, cfg.sample_every)
    snap = min(1e-9 * max(1.0, cfg.t_end), 1e-3 * cfg.dt)
    sampler = _Sampler(times, y0, snap)
    if cfg.method is Method.RK4:
        stats = _rk4(rhs, y0, cfg, sampler)
    else:
        stats = _rkf45(rhs, y0, cfg, sampler)
    assert sampler.done, "sampler did not reach t_end"
    return Trajectory(times, sampler.out, model=model, provenance=provenance, stats=stats)


@dataclass(frozen=True)
class ConservationReport:
    host_residual: float
    vector_residual: float
    tol: float
    breach_times: tuple = ()

    @property
    def breached(self) -> bool:
        return bool(self.breach_times)

    @property
    def max_residual(self) -> float:
        return max(self.host_residual, self.vector_residual)

    def to_dict(self) -> dict:
        return {
            "host_residual": self.host_residual,
            "vector_residual": self.vector_residual,
            "tol": self.tol,
            "breached": self.breached,
            "first_breach_time": self.breach_times[0] if self.breach_times else None,
        }


def check_conservation(traj: Trajectory, tol: float = 1e-7) -> ConservationReport:
    """Largest departures of S+I+R and U+V from 1 over all samples and patches."""
    states = np.asarray(traj.states)
    host = np.abs(states[..., 0] + states[..., 1] + states[..., 2] - 1.0)
    vector = np.abs(states[..., 3] + states[..., 4] - 1.0)
    per_time = np.maximum(host, vector).reshape(len(states), -1).max(axis=1)
    breaches = tuple(float(t) for t in np.asarray(traj.times)[per_time > tol])
    return ConservationReport(float(host.max()), float(vector.max()), tol, breaches)
