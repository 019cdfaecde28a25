"""Residual-sparse spatial fuzzy C-means and the classic FCM baseline.

Conventions used throughout:

* ``X`` is a :class:`~lrfcm.frames.FeatureSet` with data of shape ``(L, K)``.
* ``U`` is a ``(c, K)`` partition matrix with unit column sums.
* ``V`` is a ``(c, L)`` array, one prototype per row.
* ``R`` is an ``(L, K)`` residual array aligned with ``X.data``.

Neighborhood sums run over the in-image part of each local window, so the
relation ``n in N_j  <=>  j in N_n`` holds at the borders as well.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DivergenceError
from .frames import FeatureSet

log = logging.getLogger(__name__)

ZERO_DISTANCE = 1e-12
RESIDUAL_RULES = ("exact", "unscaled")


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Square ``(2r+1) x (2r+1)`` window, weights ``1 / (1 + distance)``."""

    radius: int = 1

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("window radius must be non-negative")

    @cached_property
    def offsets(self) -> tuple[tuple[int, int, float], ...]:
        r = self.radius
        return tuple(
            (dy, dx, 1.0 / (1.0 + math.hypot(dy, dx)))
            for dy in range(-r, r + 1)
            for dx in range(-r, r + 1)
        )

    def weight(self, dy: int, dx: int) -> float:
        return 1.0 / (1.0 + math.hypot(dy, dx))

    def window_sum(self, f: np.ndarray) -> np.ndarray:
        """``out[..., j] = sum_{n in N_j} f[..., n] / (1 + d_nj)`` over ``(..., h, w)``."""
        r = self.radius
        if r == 0:
            return np.array(f, dtype=np.float64, copy=True)
        h, w = f.shape[-2:]
        pad = [(0, 0)] * (f.ndim - 2) + [(r, r), (r, r)]
        padded = np.pad(np.asarray(f, dtype=np.float64), pad)
        out = np.zeros(f.shape)
        for dy, dx, wt in self.offsets:
            out += wt * padded[..., r + dy : r + dy + h, r + dx : r + dx + w]
        return out

    def weight_totals(self, height: int, width: int) -> np.ndarray:
        """``sum_{n in N_j} 1 / (1 + d_nj)`` per pixel, flattened."""
        return self.window_sum(np.ones((height, width))).ravel()


def _spatial(nb: NeighborhoodSpec, arr: np.ndarray, X: FeatureSet) -> np.ndarray:
    """Apply ``nb.window_sum`` to rows of a ``(n, K)`` array."""
    grid = arr.reshape(arr.shape[0], X.height, X.width)
    return nb.window_sum(grid).reshape(arr.shape[0], -1)


@dataclass
class SolverConfig:
    clusters: int
    m: float = 2.0
    epsilon: float = 1e-6
    max_iter: int = 300
    beta: np.ndarray | None = None
    beta_scale: float = 70.0
    seed: int = 0
    threshold_convention: str = "magnitude"
    residual_rule: str = "exact"
    update_residuals: bool = True

    def __post_init__(self):
        if self.m <= 1:
            raise ValueError("fuzzifier m must exceed 1")
        if self.clusters < 1:
            raise ValueError("need at least one cluster")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.beta is not None:
            self.beta = np.asarray(self.beta, dtype=np.float64)
            if np.any(self.beta < 0):
                raise ValueError("beta weights must be non-negative")
        if self.threshold_convention not in ("magnitude", "literal"):
            raise ValueError(f"unknown threshold convention {self.threshold_convention!r}")
        if self.residual_rule not in RESIDUAL_RULES:
            raise ValueError(f"unknown residual rule {self.residual_rule!r}")


@dataclass
class SolverResult:
    U: np.ndarray
    V: np.ndarray
    R: np.ndarray
    iterations: int
    objective_trace: list[float] = field(default_factory=list)
    delta_trace: list[float] = field(default_factory=list)
    nonzero_trace: list[int] = field(default_factory=list)
    reseeded: list[tuple[int, int]] = field(default_factory=list)
    converged: bool = False

    def trace_rows(self):
        """Rows of (iteration, objective, ||dU||_F, nonzero residuals)."""
        return [
            (t + 1, obj, du, nz)
            for t, (obj, du, nz) in enumerate(zip(self.objective_trace, self.delta_trace, self.nonzero_trace))
        ]


# ---------------------------------------------------------------- building blocks


def estimate_beta(X: FeatureSet, scale: float = 70.0) -> np.ndarray:
    """Per-channel weights ``scale * std(channel)`` (population std)."""
    return scale * X.data.std(axis=1)


def init_prototypes(X: FeatureSet, c: int, seed=0) -> np.ndarray:
    """Pick ``c`` pixel columns of ``X`` as starting prototypes.

    Pixels are visited in a seeded random order and a column is skipped
    when an identical vector was already taken: identical prototypes stay
    identical under the FCM updates. Duplicates are used only when ``X``
    has fewer than ``c`` distinct columns.
    """
    if c > X.pixels:
        raise ValueError(f"cannot draw {c} prototypes from {X.pixels} pixels")
    rng = np.random.default_rng(seed)
    order = rng.permutation(X.pixels)
    chosen, seen, skipped = [], set(), []
    for j in order:
        key = X.data[:, j].tobytes()
        if key in seen:
            skipped.append(j)
            if len(skipped) + len(chosen) >= X.pixels:
                break
            continue
        seen.add(key)
        chosen.append(j)
        if len(chosen) == c:
            break
    chosen.extend(skipped[: c - len(chosen)])
    return X.data[:, chosen].T.copy()


def _sq_distances(Y: np.ndarray, V: np.ndarray) -> np.ndarray:
    # (c, K); explicit differences keep the zero-distance test exact
    return np.stack([np.sum((Y - v[:, None]) ** 2, axis=0) for v in V])


def memberships_from_distances(D: np.ndarray, m: float) -> np.ndarray:
    """FCM membership rule with crisp handling of zero distances."""
    c, K = D.shape
    U = np.empty_like(D)
    zero = D < ZERO_DISTANCE
    singular = zero.any(axis=0)
    if np.any(~singular):
        Dn = D[:, ~singular]
        # scale by column minimum before the power for stability
        t = (Dn / Dn.min(axis=0)) ** (-1.0 / (m - 1.0))
        U[:, ~singular] = t / t.sum(axis=0)
    if np.any(singular):
        z = zero[:, singular].astype(np.float64)
        U[:, singular] = z / z.sum(axis=0)
    return U


def spatial_distances(X: FeatureSet, R: np.ndarray, V: np.ndarray, nb: NeighborhoodSpec) -> np.ndarray:
    """``D_ij = sum_{n in N_j} ||x_n - r_n - v_i||^2 / (1 + d_nj)``."""
    return _spatial(nb, _sq_distances(X.data - R, V), X)


def update_partition(X: FeatureSet, R: np.ndarray, V: np.ndarray, nb: NeighborhoodSpec, m: float) -> np.ndarray:
    return memberships_from_distances(spatial_distances(X, R, V, nb), m)


def _prototype_step(X, R, U, nb, m):
    Y = X.data - R
    um = U**m
    num = um @ _spatial(nb, Y, X).T
    den = um @ nb.weight_totals(X.height, X.width)
    empty = np.flatnonzero(den <= 0.0)
    V = np.empty((U.shape[0], X.channels))
    full = den > 0.0
    V[full] = num[full] / den[full, None]
    if empty.size:
        # farthest-point reseeding of empty clusters
        if np.any(full):
            d = _sq_distances(Y, V[full]).min(axis=0)
        else:
            d = np.sum((Y - Y.mean(axis=1, keepdims=True)) ** 2, axis=0)
        for i in empty:
            j = int(np.argmax(d))
            V[i] = Y[:, j]
            d = np.minimum(d, np.sum((Y - Y[:, j : j + 1]) ** 2, axis=0))
    return V, [int(i) for i in empty]


def update_prototypes(X: FeatureSet, R: np.ndarray, U: np.ndarray, nb: NeighborhoodSpec, m: float) -> np.ndarray:
    """Weighted mean of ``x_n - r_n`` with weights ``u_ij^m / (1 + d_nj)``."""
    return _prototype_step(X, R, U, nb, m)[0]


def hard_threshold(xi, sigma, convention: str = "magnitude"):
    """Keep ``xi`` when it reaches ``sqrt(sigma)``, zero it otherwise.

    ``magnitude`` compares ``|xi|``; ``literal`` compares ``xi`` itself,
    which zeroes every negative value.
    """
    xi = np.asarray(xi, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if np.any(sigma < 0):
        raise ValueError("sigma must be non-negative")
    test = np.abs(xi) if convention == "magnitude" else xi
    out = np.where(test >= np.sqrt(sigma), xi, 0.0)
    return out if out.ndim else float(out)


def update_residuals(
    X: FeatureSet,
    U: np.ndarray,
    V: np.ndarray,
    nb: NeighborhoodSpec,
    m: float,
    beta,
    convention: str = "magnitude",
    rule: str = "unscaled",
) -> np.ndarray:
    """Closed-form residual step ``r_jl = H_t(B_jl) / A_j``.

    With ``A_j = sum_i sum_n u_in^m / (1 + d_nj)``,
    ``B_jl = sum_i sum_n u_in^m (x_jl - v_il) / (1 + d_nj)`` and
    ``sigma_jl = beta_l sum_n 1 / (1 + d_nj)``:

    * ``rule="unscaled"`` thresholds at ``t = sigma_jl`` without the
      ``A_j`` factor (the closed form in its common statement);
    * ``rule="exact"`` thresholds at ``t = sigma_jl * A_j``, which is the
      true minimizer of ``A r^2 - 2 B r + sigma |r|_0`` and therefore never
      increases the objective.
    """
    if rule not in RESIDUAL_RULES:
        raise ValueError(f"unknown residual rule {rule!r}")
    beta = np.broadcast_to(np.asarray(beta, dtype=np.float64), (X.channels,))
    a = _spatial(nb, U**m, X)  # a_ij = sum_n u_in^m / (1 + d_nj)
    A = a.sum(axis=0)
    if np.any(A <= 0):
        raise ArithmeticError("residual denominator vanished; memberships are degenerate")
    B = X.data * A - V.T @ a
    sigma = beta[:, None] * nb.weight_totals(X.height, X.width)[None, :]
    if rule == "exact":
        sigma = sigma * A
    return hard_threshold(B, sigma, convention) / A


def objective(X: FeatureSet, U, V, R, nb: NeighborhoodSpec, m: float, beta) -> float:
    """Spatially weighted FCM cost plus the weighted residual l0 count."""
    beta = np.broadcast_to(np.asarray(beta, dtype=np.float64), (X.channels,))
    fit = float(np.sum(U**m * spatial_distances(X, R, V, nb)))
    totals = nb.weight_totals(X.height, X.width)
    penalty = float(np.sum(beta[:, None] * (R != 0) * totals[None, :]))
    return fit + penalty


def objective_rearranged(X: FeatureSet, U, V, R, nb: NeighborhoodSpec, m: float, beta) -> float:
    """Same cost with the window sum moved onto the memberships."""
    beta = np.broadcast_to(np.asarray(beta, dtype=np.float64), (X.channels,))
    a = _spatial(nb, U**m, X)
    fit = float(np.sum(a * _sq_distances(X.data - R, V)))
    totals = nb.weight_totals(X.height, X.width)
    penalty = float(np.sum(beta[:, None] * (R != 0) * totals[None, :]))
    return fit + penalty


def fcm_objective(X: FeatureSet, U, V, m: float) -> float:
    return float(np.sum(U**m * _sq_distances(X.data, V)))


# ---------------------------------------------------------------- solvers


def _check_finite(value, iteration):
    if not math.isfinite(value):
        raise DivergenceError(iteration, value)


def run_lrfcm(X: FeatureSet, nb: NeighborhoodSpec, cfg: SolverConfig, V0: np.ndarray | None = None) -> SolverResult:
    """Alternate U, V and R updates until ``||U_new - U_old||_F < epsilon``.

    With ``cfg.update_residuals`` off, R stays zero and the loop is
    spatially weighted FCM.
    """
    beta = cfg.beta if cfg.beta is not None else estimate_beta(X, cfg.beta_scale)
    beta = np.broadcast_to(np.asarray(beta, dtype=np.float64), (X.channels,))
    V = init_prototypes(X, cfg.clusters, cfg.seed) if V0 is None else np.array(V0, dtype=np.float64)
    R = np.zeros_like(X.data)
    U_prev = None
    result = SolverResult(U=None, V=V, R=R, iterations=0)
    for t in range(1, cfg.max_iter + 1):
        U = update_partition(X, R, V, nb, cfg.m)
        V, empty = _prototype_step(X, R, U, nb, cfg.m)
        result.reseeded.extend((t, i) for i in empty)
        if cfg.update_residuals:
            R = update_residuals(X, U, V, nb, cfg.m, beta, cfg.threshold_convention, cfg.residual_rule)
        obj = objective(X, U, V, R, nb, cfg.m, beta)
        _check_finite(obj, t)
        du = math.inf if U_prev is None else float(np.linalg.norm(U - U_prev))
        result.objective_trace.append(obj)
        result.delta_trace.append(du)
        result.nonzero_trace.append(int(np.count_nonzero(R)))
        result.iterations = t
        U_prev = U
        if du < cfg.epsilon:
            result.converged = True
            break
    result.U, result.V, result.R = U_prev, V, R
    log.debug("lrfcm stopped after %d iterations (converged=%s)", result.iterations, result.converged)
    return result


def run_baseline_fcm(X: FeatureSet, cfg: SolverConfig, V0: np.ndarray | None = None) -> SolverResult:
    """Classic FCM: no residuals and no neighborhood."""
    V = init_prototypes(X, cfg.clusters, cfg.seed) if V0 is None else np.array(V0, dtype=np.float64)
    U_prev = None
    R = np.zeros_like(X.data)
    result = SolverResult(U=None, V=V, R=R, iterations=0)
    for t in range(1, cfg.max_iter + 1):
        U = memberships_from_distances(_sq_distances(X.data, V), cfg.m)
        um = U**cfg.m
        den = um.sum(axis=1)
        if np.any(den <= 0):
            V, empty = _prototype_step(X, R, U, NeighborhoodSpec(0), cfg.m)
            result.reseeded.extend((t, i) for i in empty)
        else:
            V = (um @ X.data.T) / den[:, None]
        obj = fcm_objective(X, U, V, cfg.m)
        _check_finite(obj, t)
        du = math.inf if U_prev is None else float(np.linalg.norm(U - U_prev))
        result.objective_trace.append(obj)
        result.delta_trace.append(du)
        result.nonzero_trace.append(0)
        result.iterations = t
        U_prev = U
        if du < cfg.epsilon:
            result.converged = True
            break
    result.U, result.V = U_prev, V
    return result


def sort_clusters(result: SolverResult, key_channel: int = 0) -> SolverResult:
    """Reorder clusters by ascending prototype value in ``key_channel``.

    Labels then follow intensity order, which keeps morphological label
    smoothing meaningful.
    """
    order = np.argsort(result.V[:, key_channel], kind="stable")
    result.V = result.V[order]
    result.U = result.U[order]
    return result
