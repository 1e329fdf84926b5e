"""Modified Shepard's transformation.

F(x) = sum_j L_j(x) Wbar_j(x), where the nodal function L_j is a local
radial-kernel interpolant fitted on the N_L source landmarks closest to
x_j, and the weights Wbar_j are localized inverse squared distances,
normalized into a partition of unity.  A landmark only influences nearby
evaluations: its weight is nonzero only where x falls both among the N_W
landmarks nearest to x and inside the hypercube of side rho_j centred at
x_j.  Should the hypercubes fail to cover x, the N_W-nearest rule alone is
used, so the weight sum never vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import RadialKernel, polynomial_tail_degree
from .landmarks import LandmarkSet
from .transform import (GlobalRadialTransform, SolveError, Transformation,
                        solve_transform, tail_dimension)


class NodalSolveError(SolveError):
    """A nodal interpolant could not be solved (neighborhood degenerate)."""


@dataclass(frozen=True)
class ShepardConfig:
    """Locality parameters: neighborhood sizes, hypercube rule, snap radius.

    ``rho = None`` sizes each hypercube automatically as twice the distance
    from its landmark to that landmark's N_W-th nearest neighbor, so the
    cube roughly covers the evaluation neighborhood; pass a number to fix
    one side length for all landmarks.
    """

    nodal_kernel: RadialKernel
    n_l: int
    n_w: int
    rho: float | None = None
    epsilon_snap: float = 1e-12

    def __post_init__(self):
        if self.n_l < 1 or self.n_w < 1:
            raise ValueError("neighborhood sizes n_l and n_w must be >= 1")
        if self.rho is not None and not self.rho > 0:
            raise ValueError("fixed hypercube side rho must be positive")
        if not self.epsilon_snap > 0:
            raise ValueError("epsilon_snap must be positive")


def _validate(cfg: ShepardConfig, landmarks: LandmarkSet):
    if cfg.n_l > landmarks.n or cfg.n_w > landmarks.n:
        raise ValueError(
            f"neighborhood sizes (n_l={cfg.n_l}, n_w={cfg.n_w}) cannot exceed "
            f"the number of landmarks N={landmarks.n}"
        )
    u = tail_dimension(landmarks.dimension, polynomial_tail_degree(cfg.nodal_kernel))
    if u and cfg.n_l <= u:
        raise ValueError(
            f"nodal kernel needs n_l > {u} for its polynomial tail, got {cfg.n_l}"
        )


def nearest_landmarks(landmarks: LandmarkSet, x, k: int) -> np.ndarray:
    """Indices of the k source landmarks nearest to x; ties break by index."""
    if not 1 <= k <= landmarks.n:
        raise ValueError(f"k must be in 1..{landmarks.n}, got {k}")
    d2 = ((landmarks.sources - np.asarray(x, dtype=float)) ** 2).sum(1)
    return np.argsort(d2, kind="stable")[:k]


def node_radii(landmarks: LandmarkSet, cfg: ShepardConfig) -> np.ndarray:
    """Hypercube side rho_j for every landmark (auto rule or fixed)."""
    if cfg.rho is not None:
        return np.full(landmarks.n, float(cfg.rho))
    src = landmarks.sources
    d2 = ((src[:, None, :] - src[None, :, :]) ** 2).sum(-1)
    d2.sort(axis=1)
    return 2.0 * np.sqrt(d2[:, cfg.n_w - 1])


@dataclass(frozen=True)
class NodalFunction:
    """Local interpolant L_j and the neighborhood it was fitted on."""

    center: int
    neighbors: np.ndarray
    interpolant: GlobalRadialTransform


def build_nodal_interpolants(landmarks: LandmarkSet, cfg: ShepardConfig) -> list[NodalFunction]:
    """Fit one local interpolant per landmark on its N_L nearest sources."""
    _validate(cfg, landmarks)
    nodal = []
    for j in range(landmarks.n):
        idx = nearest_landmarks(landmarks, landmarks.sources[j], cfg.n_l)
        try:
            local = solve_transform(cfg.nodal_kernel, landmarks.subset(idx))
        except SolveError as exc:
            raise NodalSolveError(f"nodal interpolant {j}: {exc}") from exc
        nodal.append(NodalFunction(j, idx, local))
    return nodal


def _weights_matrix(landmarks: LandmarkSet, cfg: ShepardConfig, rho, pts) -> np.ndarray:
    """Normalized weights Wbar for a batch of points, shape (P, N)."""
    src = landmarks.sources
    d2 = ((pts[:, None, :] - src[None, :, :]) ** 2).sum(-1)
    order = np.argsort(d2, axis=1, kind="stable")
    among_nearest = np.zeros_like(d2, dtype=bool)
    np.put_along_axis(among_nearest, order[:, :cfg.n_w], True, axis=1)
    in_cube = np.abs(pts[:, None, :] - src[None, :, :]).max(-1) <= rho[None, :] / 2.0
    tau = among_nearest & in_cube
    uncovered = ~tau.any(axis=1)
    tau[uncovered] = among_nearest[uncovered]
    with np.errstate(divide="ignore", invalid="ignore"):
        weights = np.where(tau, 1.0 / d2, 0.0)
        wbar = weights / weights.sum(axis=1)[:, None]
    snapped = d2.min(axis=1) < cfg.epsilon_snap ** 2
    if snapped.any():
        hit = np.argmax(d2[snapped] < cfg.epsilon_snap ** 2, axis=1)
        wbar[snapped] = 0.0
        wbar[np.flatnonzero(snapped), hit] = 1.0
    return wbar


def shepard_weights(landmarks: LandmarkSet, cfg: ShepardConfig, x) -> np.ndarray:
    """Partition-of-unity weight vector Wbar(x) of length N."""
    _validate(cfg, landmarks)
    rho = node_radii(landmarks, cfg)
    return _weights_matrix(landmarks, cfg, rho, np.atleast_2d(np.asarray(x, float)))[0]


def _evaluate(cfg, landmarks, rho, nodal, pts):
    wbar = _weights_matrix(landmarks, cfg, rho, pts)
    out = np.zeros((pts.shape[0], landmarks.dimension))
    for nf in nodal:
        col = wbar[:, nf.center]
        active = col > 0
        if active.any():
            out[active] += col[active, None] * nf.interpolant(pts[active])
    return out


def evaluate_shepard(landmarks: LandmarkSet, cfg: ShepardConfig, nodal, x):
    """Evaluate F(x) = sum_j Wbar_j(x) L_j(x), summing only active terms."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    rho = node_radii(landmarks, cfg)
    out = _evaluate(cfg, landmarks, rho, nodal, np.atleast_2d(pts))
    return out[0] if single else out


class ShepardTransform(Transformation):
    """Built modified-Shepard transformation (immutable, reentrant)."""

    kind = "shepard"

    def __init__(self, landmarks, config, nodal, rho):
        self.landmarks = landmarks
        self.config = config
        self.nodal = nodal
        self.rho = rho
        centers = np.array([nf.interpolant(landmarks.sources[nf.center])
                            for nf in nodal])
        self.residual = float(np.abs(centers - landmarks.targets).max())
        self.condition = max(nf.interpolant.condition for nf in nodal)
        self.ill_conditioned = any(nf.interpolant.ill_conditioned for nf in nodal)

    def __call__(self, points):
        pts, single = self._wrap(points)
        out = _evaluate(self.config, self.landmarks, self.rho, self.nodal, pts)
        return out[0] if single else out


def build_shepard_transform(landmarks: LandmarkSet, cfg: ShepardConfig) -> ShepardTransform:
    """Fit all nodal interpolants and freeze the Shepard transformation."""
    nodal = build_nodal_interpolants(landmarks, cfg)
    return ShepardTransform(landmarks, cfg, nodal, node_radii(landmarks, cfg))
