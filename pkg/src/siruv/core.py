"""Domain types shared by both multi-patch models.

Compartments are stored as fractions only: host fractions S, I, R are relative to the
patch's host population N, vector fractions U, V relative to its vector population M.
A system state is an ``(n, 5)`` array in patch-major order with columns S, I, R, U, V.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EntryOutOfRange,
    NonSquare,
    RowSumViolation,
    ValidationError,
    ZeroEffectivePopulation,
)

COMPARTMENTS = ("S", "I", "R", "U", "V")
FRACTION_SLACK = 1e-9
ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class PatchParams:
    """Epidemiological rates (per day) and population sizes of one patch.

    ``alpha`` and ``beta`` serve both models: in the legacy model they play the role
    of the vector-to-host and host-to-host transmission coefficients.
    """

    mu: float = 10 / (1000 * 365)
    gamma: float = 1 / 30
    nu: float = 1 / 14
    theta: float = 0.4
    alpha: float = 0.008
    beta: float = 0.01
    host_pop: float = 20000.0
    vector_pop: float = 100000.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value):
                raise ValidationError(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        for name in ("mu", "gamma", "nu", "theta", "alpha", "beta"):
            if getattr(self, name) < 0:
                raise ValidationError(f"rate {name} must be >= 0, got {getattr(self, name)!r}")
        if self.host_pop <= 0 or self.vector_pop <= 0:
            raise ValidationError("host_pop and vector_pop must be > 0")


# Table 1 values; the table lists no recovery rate, see PatchParams.gamma.
TABLE1 = PatchParams()


class PatchArrays(NamedTuple):
    """Column view of a parameter list: each field has shape ``(..., n)``.

    Leading axes broadcast, so a batch of independent systems can be evaluated in one
    kernel call.
    """

    mu: np.ndarray
    gamma: np.ndarray
    nu: np.ndarray
    theta: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    host_pop: np.ndarray
    vector_pop: np.ndarray

    @classmethod
    def from_params(cls, params: Sequence[PatchParams]) -> "PatchArrays":
        if isinstance(params, PatchArrays):
            return params
        if isinstance(params, PatchParams):
            params = [params]
        return cls(*(np.array([getattr(p, f) for p in params], dtype=float) for f in cls._fields))

    @property
    def n(self) -> int:
        return np.shape(self.mu)[-1]


class ResidenceMatrix:
    """Validated row-stochastic matrix of time fractions.

    ``entries[i, j]`` is the fraction of unit time a resident of patch ``i`` spends in
    patch ``j``.  Build instances with :func:`validate_residence_matrix`.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: np.ndarray):
        arr = np.array(entries, dtype=float)
        arr.setflags(write=False)
        self._entries = arr

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return self._entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._entries if dtype is None else self._entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, ResidenceMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self):
        return f"ResidenceMatrix({self._entries.tolist()!r})"

    def tolist(self):
        return self._entries.tolist()

    @classmethod
    def identity(cls, n: int) -> "ResidenceMatrix":
        return cls(np.eye(n))


def validate_residence_matrix(raw, tol: float = ROW_SUM_TOL) -> ResidenceMatrix:
    """Check that ``raw`` is a square matrix with entries in [0, 1] and unit row sums.

    Raises
    ------
    NonSquare, EntryOutOfRange, RowSumViolation
    """
    if isinstance(raw, ResidenceMatrix):
        raw = raw.entries
    arr = np.array(raw, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise NonSquare(arr.shape)
    bad = np.argwhere(~((arr >= 0.0) & (arr <= 1.0)))
    if len(bad):
        i, j = (int(k) for k in bad[0])
        raise EntryOutOfRange(i, j, float(arr[i, j]))
    for i, row in enumerate(arr):
        total = float(np.sum(row))
        if abs(total - 1.0) > tol:
            raise RowSumViolation(i, total)
    return ResidenceMatrix(arr)


def effective_populations(P, host_pops) -> np.ndarray:
    """Number of people physically present in each patch, ``sum_k P[k, j] * N[k]``."""
    P = np.asarray(P, dtype=float)
    N = np.asarray(host_pops, dtype=float)
    return np.einsum("...kj,...k->...j", P, N)


def effective_population(P, host_pops, j: int) -> float:
    """Effective population of patch ``j``; raises if nobody is ever present there."""
    P = np.asarray(P, dtype=float)
    N = np.asarray(host_pops, dtype=float)
    n = P.shape[0]
    if N.shape != (n,):
        raise DimensionMismatch(f"expected {n} host populations, got shape {N.shape}")
    if not 0 <= j < n:
        raise IndexError(f"patch index {j} out of range for n={n}")
    if np.any(N <= 0):
        raise ValidationError("host populations must be positive")
    value = float(P[:, j] @ N)
    if value <= 0:
        raise ZeroEffectivePopulation(j)
    return value


@dataclass(frozen=True)
class PatchState:
    """Compartment fractions of one patch."""

    s: float
    i: float
    r: float
    u: float
    v: float

    def __post_init__(self):
        for name in ("s", "i", "r", "u", "v"):
            value = float(getattr(self, name))
            if not (0.0 <= value <= 1.0 + FRACTION_SLACK):
                raise ValidationError(f"fraction {name}={value!r} outside [0, 1]")
            object.__setattr__(self, name, value)

    def on_simplex(self, tol: float = FRACTION_SLACK) -> bool:
        return abs(self.s + self.i + self.r - 1.0) <= tol and abs(self.u + self.v - 1.0) <= tol

    def as_tuple(self) -> tuple:
        return (self.s, self.i, self.r, self.u, self.v)

    @classmethod
    def disease_free(cls) -> "PatchState":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0)


@dataclass(frozen=True)
class SystemState:
    """Ordered per-patch states; ``np.asarray`` gives the canonical ``(n, 5)`` array."""

    patches: tuple

    def __post_init__(self):
        object.__setattr__(self, "patches", tuple(self.patches))
        if not self.patches:
            raise ValidationError("a system state needs at least one patch")

    @property
    def n(self) -> int:
        return len(self.patches)

    def __array__(self, dtype=None, copy=None):
        return np.array([p.as_tuple() for p in self.patches], dtype=dtype or float)

    def flat(self) -> np.ndarray:
        return np.asarray(self).ravel()

    def on_simplex(self, tol: float = FRACTION_SLACK) -> bool:
        return all(p.on_simplex(tol) for p in self.patches)

    @classmethod
    def from_array(cls, arr) -> "SystemState":
        arr = np.asarray(arr, dtype=float).reshape(-1, 5)
        return cls(tuple(PatchState(*row) for row in arr))

    @classmethod
    def disease_free(cls, n: int) -> "SystemState":
        return cls((PatchState.disease_free(),) * n)

    @classmethod
    def seeded(cls, n: int, infected: float = 0.01, patch: int = 0) -> "SystemState":
        """Everyone susceptible except an infected fraction in one patch; vectors clean."""
        patches = [PatchState.disease_free()] * n
        patches[patch] = PatchState(1.0 - infected, infected, 0.0, 1.0, 0.0)
        return cls(tuple(patches))


def as_state_array(state, n: int | None = None) -> np.ndarray:
    """Coerce a SystemState, flat vector or ``(..., n, 5)`` array to ``(..., n, 5)``."""
    arr = np.asarray(state, dtype=float)
    if arr.ndim == 1:
        if arr.size % 5:
            raise DimensionMismatch(f"flat state length {arr.size} is not a multiple of 5")
        arr = arr.reshape(-1, 5)
    if arr.shape[-1] != 5:
        raise DimensionMismatch(f"state must have 5 compartments per patch, got {arr.shape}")
    if n is not None and arr.shape[-2] != n:
        raise DimensionMismatch(f"state has {arr.shape[-2]} patches, expected {n}")
    return arr


EQ1_MATRIX = validate_residence_matrix(
    [[0.2, 0.7, 0.1], [0.5, 0.1, 0.4], [0.3, 0.6, 0.1]]
)
