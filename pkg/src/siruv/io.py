"""Scenario configuration (JSON) and trajectory CSV files.

Config schema, every key optional::

    {
      "schema_version": 1,
      "name": "paper-3patch",
      "model": "effective" | "legacy" | "single",
      "n": 3,
      "patches": [{"mu", "gamma", "nu", "theta", "alpha", "beta", "N", "M"}, ...],
      "P": [[...], ...],                        # row-major n x n
      "initial": [{"S", "I", "R", "U", "V"}, ...],
      "solver": {"method", "dt", "t_end", "rel_tol", "abs_tol", "sample_every", "max_steps"},
      "outputs": {"trajectory", "report"}
    }

Missing patch fields take the Table 1 values.  A missing matrix is the three-patch
coupling matrix when ``n == 3`` and the identity otherwise.  A missing initial state
seeds 1% infected hosts in the first patch, everything else susceptible and all
vectors uninfected.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .core import (
    COMPARTMENTS,
    EQ1_MATRIX,
    TABLE1,
    PatchParams,
    PatchState,
    ResidenceMatrix,
    SystemState,
    validate_residence_matrix,
)
from .errors import ParseError, ValidationError
from .integrate import SolverConfig, Trajectory
from .models import ModelKind

SCHEMA_VERSION = 1

_PATCH_KEYS = {
    "mu": "mu",
    "gamma": "gamma",
    "nu": "nu",
    "theta": "theta",
    "alpha": "alpha",
    "beta": "beta",
    "N": "host_pop",
    "M": "vector_pop",
}
_SOLVER_KEYS = ("method", "dt", "t_end", "rel_tol", "abs_tol", "sample_every", "max_steps")
_TOP_KEYS = {"schema_version", "name", "model", "n", "patches", "P", "initial", "solver", "outputs"}


@dataclass(frozen=True)
class OutputPaths:
    trajectory: str = "trajectory.csv"
    report: str = "report.json"


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "paper-3patch"
    model: ModelKind = ModelKind.EFFECTIVE
    params: tuple = (TABLE1,) * 3
    P: ResidenceMatrix = EQ1_MATRIX
    initial: SystemState = field(default_factory=lambda: SystemState.seeded(3))
    solver: SolverConfig = field(default_factory=SolverConfig)
    outputs: OutputPaths = field(default_factory=OutputPaths)

    def __post_init__(self):
        object.__setattr__(self, "model", ModelKind.parse(self.model))
        object.__setattr__(self, "params", tuple(self.params))
        n = self.n
        if not self.params:
            raise ValidationError("at least one patch is required")
        if self.P.n != n or self.initial.n != n:
            raise ValidationError(
                f"inconsistent patch counts: {n} parameter sets, {self.P.n}x{self.P.n} matrix, "
                f"{self.initial.n} initial states"
            )
        if not self.initial.on_simplex():
            raise ValidationError("initial fractions must satisfy S+I+R=1 and U+V=1 in every patch")

    @property
    def n(self) -> int:
        return len(self.params)


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ValidationError(f"{where} must be a JSON object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ValidationError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _patch_from_json(obj, i):
    _check_keys(obj, _PATCH_KEYS, f"patches[{i}]")
    base = asdict(TABLE1)
    base.update({_PATCH_KEYS[k]: v for k, v in obj.items()})
    try:
        return PatchParams(**{k: float(v) for k, v in base.items()})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise ValidationError(f"patches[{i}]: {exc}") from exc
        raise ValidationError(f"patches[{i}]: values must be numbers") from exc


def _state_from_json(obj, i):
    if isinstance(obj, list):
        values = obj
    else:
        _check_keys(obj, COMPARTMENTS, f"initial[{i}]")
        missing = [c for c in COMPARTMENTS if c not in obj]
        if missing:
            raise ValidationError(f"initial[{i}] is missing {missing}")
        values = [obj[c] for c in COMPARTMENTS]
    if len(values) != 5:
        raise ValidationError(f"initial[{i}] needs 5 compartments")
    try:
        return PatchState(*(float(v) for v in values))
    except ValidationError as exc:
        raise ValidationError(f"initial[{i}]: {exc}") from exc


def config_from_dict(doc: dict) -> ScenarioConfig:
    """Build a validated :class:`ScenarioConfig` from a decoded JSON object."""
    _check_keys(doc, _TOP_KEYS, "config")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {version!r}")

    sizes = {}
    if "n" in doc:
        sizes["n"] = doc["n"]
    for key in ("patches", "P", "initial"):
        if key in doc:
            if not isinstance(doc[key], list):
                raise ValidationError(f"{key} must be a list")
            sizes[key] = len(doc[key])
    if len(set(sizes.values())) > 1:
        raise ValidationError(f"inconsistent patch counts: {sizes}")
    n = next(iter(sizes.values()), 3)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")

    params = [_patch_from_json(p, i) for i, p in enumerate(doc.get("patches", [{}] * n))]
    if "P" in doc:
        try:
            P = validate_residence_matrix(doc["P"])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"P must be a numeric n x n matrix: {exc}") from exc
    else:
        P = EQ1_MATRIX if n == 3 else ResidenceMatrix.identity(n)
    if "initial" in doc:
        initial = SystemState(tuple(_state_from_json(s, i) for i, s in enumerate(doc["initial"])))
    else:
        initial = SystemState.seeded(n)

    solver_doc = doc.get("solver", {})
    _check_keys(solver_doc, _SOLVER_KEYS, "solver")
    try:
        solver = SolverConfig(**solver_doc)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"solver: {exc}") from exc

    outputs_doc = doc.get("outputs", {})
    _check_keys(outputs_doc, [f.name for f in fields(OutputPaths)], "outputs")
    return ScenarioConfig(
        name=str(doc.get("name", "custom" if doc else "paper-3patch")),
        model=doc.get("model", ModelKind.EFFECTIVE),
        params=tuple(params),
        P=P,
        initial=initial,
        solver=solver,
        outputs=OutputPaths(**outputs_doc),
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse a JSON scenario document.  An empty document gives the paper-3patch preset."""
    if not text.strip():
        return PRESETS["paper-3patch"]
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    return config_from_dict(doc)


def load_config(path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


def config_to_dict(cfg: ScenarioConfig) -> dict:
    solver = {k: getattr(cfg.solver, k) for k in _SOLVER_KEYS}
    solver["method"] = cfg.solver.method.value
    if solver["max_steps"] is None:
        del solver["max_steps"]
    return {
        "schema_version": SCHEMA_VERSION,
        "name": cfg.name,
        "model": cfg.model.value,
        "n": cfg.n,
        "patches": [{k: getattr(p, attr) for k, attr in _PATCH_KEYS.items()} for p in cfg.params],
        "P": cfg.P.tolist(),
        "initial": [dict(zip(COMPARTMENTS, s.as_tuple())) for s in cfg.initial.patches],
        "solver": solver,
        "outputs": asdict(cfg.outputs),
    }


def write_config(cfg: ScenarioConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"


def _presets():
    coupled = ScenarioConfig()
    return {
        "paper-3patch": coupled,
        "paper-3patch-decoupled": replace(
            coupled, name="paper-3patch-decoupled", P=ResidenceMatrix.identity(3)
        ),
        "single-patch": ScenarioConfig(
            name="single-patch",
            model=ModelKind.SINGLE,
            params=(TABLE1,),
            P=ResidenceMatrix.identity(1),
            initial=SystemState.seeded(1),
        ),
    }


PRESETS = _presets()


def get_preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None


CSV_HEADER = ("t", "patch") + COMPARTMENTS


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory(traj: Trajectory, path) -> None:
    """Write ``t,patch,S,I,R,U,V`` rows, one per sample time and patch."""
    states = np.asarray(traj.states)
    if len(traj) == 0:
        raise ValidationError("cannot write an empty trajectory")
    states = states.reshape(len(traj), -1, 5)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for t, frame in zip(traj.times, states):
            ts = _fmt(t)
            for p, row in enumerate(frame):
                fh.write(f"{ts},{p}," + ",".join(_fmt(x) for x in row) + "\n")


def read_trajectory(path, model=None, provenance="") -> Trajectory:
    """Inverse of :func:`write_trajectory`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_HEADER:
            raise ParseError(f"unexpected CSV header {header!r}", 1, 1)
        rows = [(float(r[0]), int(r[1]), [float(x) for x in r[2:]]) for r in reader]
    if not rows:
        raise ParseError("trajectory file has no rows", 2, 1)
    n = max(r[1] for r in rows) + 1
    if len(rows) % n:
        raise ParseError("row count is not a multiple of the patch count")
    times = np.array([r[0] for r in rows[::n]])
    states = np.array([r[2] for r in rows]).reshape(len(times), n, 5)
    return Trajectory(times, states, model=model, provenance=provenance or str(path))
