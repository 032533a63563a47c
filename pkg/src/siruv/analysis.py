"""Coupled/decoupled experiments and equilibrium probing."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .core import FRACTION_SLACK, PatchArrays, ResidenceMatrix, as_state_array
from .errors import NotConverged, ValidationError
from .integrate import Method, SolverConfig, Trajectory, integrate
from .models import ModelKind, make_rhs

log = logging.getLogger(__name__)

EFFECTIVE_TOLERANCE = 1e-6
# Calibrated on the seeded Table 1 run: an independent DOP853 solve (rtol 1e-12) puts
# the legacy deviation at 0.1344 over 2000 days.  Not a published number.
LEGACY_FAILURE_THRESHOLD = 1e-3
MIN_RATIO = 100.0
RANGE_SLACK = 1e-6


class FractionRangeWarning(RuntimeWarning):
    """A compartment fraction left [0, 1] by more than the diagnostic slack."""


def _check_initial(y):
    host = np.abs(y[..., 0] + y[..., 1] + y[..., 2] - 1.0)
    vector = np.abs(y[..., 3] + y[..., 4] - 1.0)
    if host.max() > FRACTION_SLACK or vector.max() > FRACTION_SLACK:
        raise ValidationError("initial state is not on the S+I+R=1, U+V=1 simplices")
    if np.any(y < 0) or np.any(y > 1 + FRACTION_SLACK):
        raise ValidationError("initial fractions must lie in [0, 1]")


def range_violation(traj: Trajectory) -> float:
    """How far any sampled fraction strays outside [0, 1]."""
    s = traj.states
    return float(max(0.0, -s.min(), s.max() - 1.0))


def simulate(kind, params, P, state0, cfg: SolverConfig | None = None, provenance="") -> Trajectory:
    """Integrate one of the models from a state on the simplices.

    With ``kind="single"`` each patch runs as an isolated single-patch system and
    ``P`` is ignored.  Fractions are never clamped; excursions beyond 1e-6 trigger a
    :class:`FractionRangeWarning`.
    """
    kind = ModelKind.parse(kind)
    pr = PatchArrays.from_params(params)
    y0 = as_state_array(state0, pr.n)
    _check_initial(y0)
    rhs = make_rhs(kind, pr, None if P is None else np.asarray(P, dtype=float))
    traj = integrate(rhs, y0, cfg or SolverConfig(), model=kind, provenance=provenance)
    excess = range_violation(traj)
    if excess > RANGE_SLACK:
        warnings.warn(
            f"{kind.value} trajectory left [0, 1] by {excess:.3g}", FractionRangeWarning, stacklevel=2
        )
    return traj


def sup_deviation(a: Trajectory, b: Trajectory) -> np.ndarray:
    """Per-patch max over samples and compartments of ``|a - b|``."""
    if a.states.shape != b.states.shape or not np.array_equal(a.times, b.times):
        raise ValidationError("trajectories are not sampled alike")
    diff = np.abs(a.states - b.states)
    return diff.max(axis=(0, -1))


@dataclass
class DecouplingResult:
    model: ModelKind
    deviations: np.ndarray
    multi: Trajectory
    reference: Trajectory

    @property
    def max_deviation(self) -> float:
        return float(self.deviations.max())


def decoupled_runs(model, params, state0, cfg: SolverConfig | None = None) -> DecouplingResult:
    """Run ``model`` with no commuting and the single-patch reference side by side.

    Both integrations use the same solver settings, so discretisation error largely
    cancels in the difference.
    """
    model = ModelKind.parse(model)
    if model is ModelKind.SINGLE:
        raise ValidationError("decoupling is defined for the multi-patch models only")
    pr = PatchArrays.from_params(params)
    cfg = cfg or SolverConfig()
    multi = simulate(model, pr, ResidenceMatrix.identity(pr.n), state0, cfg, "decoupled")
    reference = simulate(ModelKind.SINGLE, pr, None, state0, cfg, "single-patch reference")
    return DecouplingResult(model, sup_deviation(multi, reference), multi, reference)


def decoupling_error(model, params, state0, cfg: SolverConfig | None = None) -> np.ndarray:
    """Per-patch sup-norm gap between the decoupled model and the single-patch reference."""
    return decoupled_runs(model, params, state0, cfg).deviations


def comparison_report(effective: DecouplingResult, legacy: DecouplingResult, provenance="") -> dict:
    """Machine-readable summary of a decoupled comparison of both models."""
    eff_max = effective.max_deviation
    leg_max = legacy.max_deviation

    def entry(res):
        return {
            "deviations": [float(d) for d in res.deviations],
            "max_deviation": res.max_deviation,
            "decoupling": "pass" if res.max_deviation <= EFFECTIVE_TOLERANCE else "fail",
        }

    return {
        "schema_version": 1,
        "scenario": provenance,
        "metric": "per-patch sup norm over sampled times and compartments",
        "pass_tolerance": EFFECTIVE_TOLERANCE,
        "legacy_failure_threshold": LEGACY_FAILURE_THRESHOLD,
        "legacy_failure_threshold_source": "calibrated from a fine-step run of the seeded Table 1 scenario",
        "min_ratio": MIN_RATIO,
        "models": {"effective": entry(effective), "legacy": entry(legacy)},
        "legacy_failure_witnessed": bool(
            leg_max > LEGACY_FAILURE_THRESHOLD and leg_max >= MIN_RATIO * eff_max
        ),
    }


def compare_decoupled(params, state0, cfg: SolverConfig | None = None, provenance=""):
    """Decoupled runs of both models; returns ``(report, effective, legacy)``."""
    effective = decoupled_runs(ModelKind.EFFECTIVE, params, state0, cfg)
    legacy = decoupled_runs(ModelKind.LEGACY, params, state0, cfg)
    return comparison_report(effective, legacy, provenance), effective, legacy


EQUILIBRIUM_SOLVER = SolverConfig(
    method=Method.RKF45, dt=0.1, t_end=2e6, rel_tol=1e-10, abs_tol=1e-30, sample_every=500.0
)


@dataclass
class Equilibrium:
    state: np.ndarray
    residual: float
    t: float


def find_equilibrium(model, params, P, seed_state, cfg: SolverConfig | None = None, tol=1e-10) -> Equilibrium:
    """Integrate from ``seed_state`` until the max-norm of the derivative drops below ``tol``.

    The derivative is checked every ``cfg.sample_every`` days.  Approach to the endemic
    state is slow when host turnover is slow, hence the long default horizon.

    Raises
    ------
    NotConverged
        If ``cfg.t_end`` is reached first.
    """
    model = ModelKind.parse(model)
    cfg = cfg or EQUILIBRIUM_SOLVER
    pr = PatchArrays.from_params(params)
    y = as_state_array(seed_state, pr.n).copy()
    _check_initial(y)
    rhs = make_rhs(model, pr, None if P is None else np.asarray(P, dtype=float))
    window = min(cfg.sample_every, cfg.t_end)
    t = 0.0
    residual = float(np.max(np.abs(rhs(t, y))))
    while residual >= tol:
        if t >= cfg.t_end:
            raise NotConverged(cfg.t_end, residual)
        span = min(window, cfg.t_end - t)
        chunk = SolverConfig(
            method=cfg.method,
            dt=min(cfg.dt, span),
            t_end=span,
            rel_tol=cfg.rel_tol,
            abs_tol=cfg.abs_tol,
            sample_every=span,
        )
        y = integrate(lambda s, x: rhs(t + s, x), y, chunk).final
        t += span
        residual = float(np.max(np.abs(rhs(t, y))))
    log.debug("equilibrium after %g days, residual %g", t, residual)
    return Equilibrium(y, residual, t)
