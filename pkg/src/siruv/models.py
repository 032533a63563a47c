"""Right-hand sides of the SIRUV systems.

Three systems share the state layout ``(..., n, 5)`` (columns S, I, R, U, V):

* the legacy multi-patch model, whose transmission terms use each patch's own
  population;
* the effective-population model, whose transmission terms in patch ``j`` are divided
  by the number of people actually present there, ``E_j = sum_k P[k, j] N_k``;
* the single-patch reference, defined as the ``n = 1`` reduction of the effective
  model.

All functions are pure and autonomous; ``t`` is accepted only so that the integrator
can treat every system the same way.  Leading batch axes broadcast through the
parameters, the matrix and the state, which lets a whole ensemble of independent
systems share one integration.
"""

from __future__ import annotations

import enum

import numpy as np
from numba import njit

from .core import PatchArrays, PatchParams, as_state_array
from .errors import DimensionMismatch, ValidationError, ZeroEffectivePopulation

# row order of the packed parameter block, shape (batch, 8, n)
_MU, _GAMMA, _NU, _THETA, _ALPHA, _BETA, _N, _M = range(8)


class ModelKind(enum.Enum):
    LEGACY = "legacy"
    EFFECTIVE = "effective"
    SINGLE = "single"

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(
                f"unknown model {value!r}; expected one of {[m.value for m in cls]}"
            ) from None


@njit(cache=True)
def _assemble(y, pars, b, i, force, vector_force, out):
    S, I, R, U, V = y[b, i, 0], y[b, i, 1], y[b, i, 2], y[b, i, 3], y[b, i, 4]
    mu = pars[b, _MU, i]
    gamma = pars[b, _GAMMA, i]
    nu = pars[b, _NU, i]
    new_host = force * S
    new_vector = vector_force * U
    out[b, i, 0] = mu * (1.0 - S) - new_host
    out[b, i, 1] = new_host - (gamma + mu) * I
    out[b, i, 2] = gamma * I - mu * R
    out[b, i, 3] = nu * (1.0 - U) - new_vector
    out[b, i, 4] = new_vector - nu * V


@njit(cache=True)
def _legacy_kernel(y, pars, P, out):
    nb, n = y.shape[0], y.shape[1]
    for b in range(nb):
        for i in range(n):
            vec = 0.0
            host = 0.0
            visitors = 0.0
            for j in range(n):
                vec += pars[b, _ALPHA, j] * P[b, i, j] * y[b, j, 4]
                host += (P[b, i, j] + P[b, j, i]) * y[b, j, 1]
                visitors += y[b, j, 1] * P[b, j, i]
            host = pars[b, _BETA, i] * (host - P[b, i, i] * y[b, i, 1])
            _assemble(y, pars, b, i, vec + host, pars[b, _THETA, i] * visitors, out)
    return out


@njit(cache=True)
def _effective_kernel(y, pars, P, eff, out):
    nb, n = y.shape[0], y.shape[1]
    present = np.empty(n)
    pressure = np.empty(n)
    for b in range(nb):
        # infected humans physically present in patch j, and the per-capita
        # infection pressure there
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += P[b, k, j] * pars[b, _N, k] * y[b, k, 1]
            present[j] = acc
            pressure[j] = (
                pars[b, _ALPHA, j] * pars[b, _M, j] * y[b, j, 4] + pars[b, _BETA, j] * acc
            ) / eff[b, j]
        for i in range(n):
            force = 0.0
            for j in range(n):
                force += P[b, i, j] * pressure[j]
            vector_force = pars[b, _THETA, i] / pars[b, _M, i] * present[i]
            _assemble(y, pars, b, i, force, vector_force, out)
    return out


@njit(cache=True)
def _single_kernel(y, pars, out):
    nb, n = y.shape[0], y.shape[1]
    # same association as the effective kernel, so that with P = I the two agree
    # bit for bit: alpha (M/N) V + beta I == (alpha M V + beta N I) / N
    for b in range(nb):
        for i in range(n):
            present = pars[b, _N, i] * y[b, i, 1]
            force = (
                pars[b, _ALPHA, i] * pars[b, _M, i] * y[b, i, 4] + pars[b, _BETA, i] * present
            ) / pars[b, _N, i]
            vector_force = pars[b, _THETA, i] / pars[b, _M, i] * present
            _assemble(y, pars, b, i, force, vector_force, out)
    return out


class _Packed:
    """Parameters and matrix broadcast to a flat batch, ready for the kernels."""

    def __init__(self, params, P, batch_shape, n):
        pr = PatchArrays.from_params(params)
        if pr.n != n:
            raise DimensionMismatch(f"{pr.n} parameter sets for {n} patches")
        self.batch_shape = batch_shape
        nb = int(np.prod(batch_shape, dtype=int))
        self.pars = np.ascontiguousarray(
            np.broadcast_to(np.stack(pr, axis=-2), batch_shape + (8, n)).reshape(nb, 8, n)
        )
        if P is None:
            self.P = None
        else:
            P = np.asarray(P, dtype=float)
            if P.shape[-2:] != (n, n):
                raise DimensionMismatch(f"matrix shape {P.shape} does not match {n} patches")
            self.P = np.ascontiguousarray(
                np.broadcast_to(P, batch_shape + (n, n)).reshape(nb, n, n)
            )
        self.nb = nb

    def effective_populations(self):
        eff = np.einsum("bkj,bk->bj", self.P, self.pars[:, _N, :])
        bad = np.argwhere(eff <= 0)
        if len(bad):
            raise ZeroEffectivePopulation(int(bad[0][1]))
        return eff


def _batch_shape(y, params, P):
    pr = PatchArrays.from_params(params)
    shapes = [y.shape[:-2], np.shape(pr.mu)[:-1]]
    if P is not None:
        shapes.append(np.shape(P)[:-2])
    return np.broadcast_shapes(*shapes)


def _evaluate(kind, state, params, P):
    pr = PatchArrays.from_params(params)
    y = as_state_array(state, pr.n)
    batch = _batch_shape(y, pr, P)
    packed = _Packed(pr, P, batch, pr.n)
    yb = np.ascontiguousarray(np.broadcast_to(y, batch + y.shape[-2:]).reshape(packed.nb, pr.n, 5))
    out = np.empty_like(yb)
    if kind is ModelKind.LEGACY:
        _legacy_kernel(yb, packed.pars, packed.P, out)
    elif kind is ModelKind.EFFECTIVE:
        _effective_kernel(yb, packed.pars, packed.P, packed.effective_populations(), out)
    else:
        _single_kernel(yb, packed.pars, out)
    return out.reshape(batch + (pr.n, 5))


def rhs_legacy(state, params, P, t: float = 0.0) -> np.ndarray:
    """Derivative of the legacy model, shaped ``(..., n, 5)``."""
    return _evaluate(ModelKind.LEGACY, state, params, P)


def rhs_effective(state, params, P, t: float = 0.0) -> np.ndarray:
    """Derivative of the effective-population model, shaped ``(..., n, 5)``.

    Raises
    ------
    ZeroEffectivePopulation
        If a column of ``P`` is zero, i.e. some patch never hosts anyone.
    """
    return _evaluate(ModelKind.EFFECTIVE, state, params, P)


def rhs_single_patch(state, params, t: float = 0.0) -> np.ndarray:
    """Derivative of the single-patch reference.

    ``state`` is a 5-vector with ``params`` a single :class:`PatchParams`, or an
    ``(..., n, 5)`` array with ``n`` parameter sets, in which case every patch is
    evaluated as its own isolated system.
    """
    y = np.asarray(state, dtype=float)
    if isinstance(params, PatchParams):
        if y.shape[-1] != 5:
            raise DimensionMismatch(f"state must end in 5 compartments, got {y.shape}")
        return _evaluate(ModelKind.SINGLE, y[..., None, :], [params], None)[..., 0, :]
    return _evaluate(ModelKind.SINGLE, y, params, None)


def make_rhs(kind, params, P=None):
    """Bind parameters once and return ``f(t, y)`` for the integrator.

    ``f`` accepts states shaped like ``(..., n, 5)`` whose batch axes match those of
    ``params`` and ``P`` after broadcasting.  For :attr:`ModelKind.SINGLE` each patch
    evolves as an independent single-patch system and ``P`` is ignored.
    """
    kind = ModelKind.parse(kind)
    pr = PatchArrays.from_params(params)
    n = pr.n
    if kind is ModelKind.SINGLE:
        P = None
    elif P is None:
        raise ValidationError("multi-patch models need a residence matrix")
    cache = {}
    base = np.broadcast_shapes(np.shape(pr.mu)[:-1], () if P is None else np.shape(P)[:-2])

    def bind(shape):
        # kernel call specialised to one input shape
        batch = np.broadcast_shapes(shape[:-2], base)
        packed = _Packed(pr, P, batch, n)
        pars, mat, nb = packed.pars, packed.P, packed.nb
        out_shape = batch + (n, 5)
        if kind is ModelKind.LEGACY:
            kernel = lambda yb, out: _legacy_kernel(yb, pars, mat, out)
        elif kind is ModelKind.EFFECTIVE:
            eff = packed.effective_populations()
            kernel = lambda yb, out: _effective_kernel(yb, pars, mat, eff, out)
        else:
            kernel = lambda yb, out: _single_kernel(yb, pars, out)
        if shape[:-2] == batch:

            def call(y):
                yb = np.ascontiguousarray(y, dtype=float).reshape(nb, n, 5)
                return kernel(yb, np.empty_like(yb)).reshape(out_shape)

        else:

            def call(y):
                yb = np.ascontiguousarray(np.broadcast_to(y, out_shape), dtype=float).reshape(nb, n, 5)
                return kernel(yb, np.empty_like(yb)).reshape(out_shape)

        return call

    # validates the parameter batch eagerly
    cache[base + (n, 5)] = bind(base + (n, 5))

    def rhs(t, y):
        try:
            return cache[y.shape](y)
        except KeyError:
            if y.shape[-2:] != (n, 5):
                raise DimensionMismatch(f"state shape {y.shape} does not match {n} patches") from None
            cache[y.shape] = bind(y.shape)
            return cache[y.shape](y)

    return rhs
