"""Global interpolation transforms: radial kernels and tensor products.

Each coordinate of the map F: R^m -> R^m is an independent scalar
interpolant of the target coordinates over the source landmarks.  For a
conditionally positive definite kernel the expansion carries a polynomial
tail and the moment side conditions Q^T a = 0, giving the symmetric saddle
system

    [ M  Q ] [a]   [t]
    [ Q^T 0 ] [b] = [0],

with M_ij = Phi(||x_i - x_j||) and Q_jk = pi_k(x_j).  The system is
factored once and back-substituted for all m coordinates.

Solves run on a precision ladder.  float64 LU with monitored iterative
refinement handles everything well-conditioned.  Flat shape parameters,
however, drive these matrices to condition numbers far beyond 1/eps
(observed above 1e18 for flat Gaussians) where the exact coefficient
vectors grow to ~1e17, so the residual floor eps * ||A|| * ||c|| of any
fixed-precision pipeline is unreachable in float64 and marginal even in
80-bit arithmetic; such systems escalate to an mpmath rung.  A transform
keeps the precision it was solved at and evaluates its kernels at that same
precision, since rounding its coefficients or kernel values any lower would
re-inject the full error.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import _precision
from .kernels import (RadialKernel, Wendland1D, eval_radial, eval_univariate,
                      polynomial_tail_degree)
from .landmarks import LandmarkSet
from .lobachevsky import LobachevskySpline, eval_spline

RESIDUAL_LIMIT = 1e-6        # relative to max(1, |t|_inf); the solve failed beyond this
ESCALATE_THRESHOLD = 1e-11   # float64 residual above this retries in 80-bit precision
MP_THRESHOLD = 1e-7          # 80-bit residual above this retries in mpmath
ILL_CONDITIONED = 1e16       # warning-flag threshold (double-precision cliff)


class SolveError(RuntimeError):
    """The interpolation system could not be solved to tolerance."""


# ---------------------------------------------------------------------------
# assembly

def _pairwise_distances(x, centers):
    """Euclidean distance matrix, in the dtype of the operands."""
    diff = x[:, None, :] - centers[None, :, :]
    return np.sqrt((diff * diff).sum(-1))


def monomial_exponents(dimension: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent multi-indices up to the given total degree.

    Ordered by total degree, then lexicographically by coordinate index:
    1, x1, ..., xm, x1^2, x1 x2, ...
    """
    out = []
    for total in range(degree + 1):
        for combo in combinations_with_replacement(range(dimension), total):
            exps = [0] * dimension
            for var in combo:
                exps[var] += 1
            out.append(tuple(exps))
    return out


def monomial_matrix(points, degree: int):
    """Matrix of the monomial basis evaluated at the points, (P, U)."""
    points = np.atleast_2d(points)
    cols = []
    for exps in monomial_exponents(points.shape[1], degree):
        col = np.ones(points.shape[0], dtype=points.dtype)
        for d, e in enumerate(exps):
            if e:
                col = col * points[:, d] ** e
        cols.append(col)
    return np.stack(cols, axis=1)


def tail_dimension(dimension: int, degree) -> int:
    """Number of monomials of total degree <= degree (0 when no tail)."""
    if degree is None:
        return 0
    return math.comb(dimension + degree, dimension)


def _univariate_factor(kernel, delta):
    if isinstance(kernel, Wendland1D):
        return eval_univariate(kernel, delta)
    if isinstance(kernel, LobachevskySpline):
        return eval_spline(kernel, delta)
    raise ValueError(f"kernel {kernel!r} is not a univariate tensor factor")


def _tensor_matrix(kernel, x, centers):
    """Product kernel matrix Prod_d psi(x_d - c_d), dtype-preserving."""
    out = _univariate_factor(kernel, x[:, None, 0] - centers[None, :, 0])
    for d in range(1, x.shape[1]):
        out = out * _univariate_factor(kernel, x[:, None, d] - centers[None, :, d])
    return out


@dataclass(frozen=True)
class SaddleSystem:
    """Assembled interpolation system (float64 view)."""

    kernel_matrix: np.ndarray   # (N, N) symmetric
    poly_matrix: np.ndarray     # (N, U); U = 0 when the kernel needs no tail
    targets: np.ndarray         # (N, m); one right-hand side per coordinate

    @property
    def n(self) -> int:
        return self.kernel_matrix.shape[0]

    @property
    def tail_size(self) -> int:
        return self.poly_matrix.shape[1]

    def full_matrix(self) -> np.ndarray:
        """The (N+U) x (N+U) symmetric saddle matrix [[M, Q], [Q^T, 0]]."""
        n, u = self.n, self.tail_size
        if u == 0:
            return self.kernel_matrix
        full = np.zeros((n + u, n + u))
        full[:n, :n] = self.kernel_matrix
        full[:n, n:] = self.poly_matrix
        full[n:, :n] = self.poly_matrix.T
        return full

    def full_rhs(self) -> np.ndarray:
        if self.tail_size == 0:
            return self.targets
        pad = np.zeros((self.tail_size, self.targets.shape[1]))
        return np.vstack([self.targets, pad])


@dataclass(frozen=True)
class _Problem:
    """One interpolation system: kernel, geometry, optional polynomial tail."""

    kernel: object
    tensor: bool
    sources: np.ndarray
    tail_degree: Optional[int]

    @property
    def n(self) -> int:
        return len(self.sources)

    @property
    def exponents(self):
        if self.tail_degree is None:
            return []
        return monomial_exponents(self.sources.shape[1], self.tail_degree)

    @property
    def tail_size(self) -> int:
        return len(self.exponents)

    def kernel_block(self, dtype):
        src = self.sources.astype(dtype)
        if self.tensor:
            return _tensor_matrix(self.kernel, src, src)
        return eval_radial(self.kernel, _pairwise_distances(src, src))

    def build(self, dtype):
        m_mat = self.kernel_block(dtype)
        u = self.tail_size
        if u == 0:
            return m_mat
        n = self.n
        q_mat = monomial_matrix(self.sources.astype(dtype), self.tail_degree)
        full = np.zeros((n + u, n + u), dtype=dtype)
        full[:n, :n] = m_mat
        full[:n, n:] = q_mat
        full[n:, :n] = q_mat.T
        return full


def assemble_system(kernel: RadialKernel, landmarks: LandmarkSet) -> SaddleSystem:
    """Assemble M, Q and the per-coordinate targets for a radial kernel."""
    degree = polynomial_tail_degree(kernel)
    u = tail_dimension(landmarks.dimension, degree)
    if u and u >= landmarks.n:
        raise ValueError(
            f"polynomial tail needs more landmarks: U = {u} must be < N = {landmarks.n}"
        )
    problem = _Problem(kernel, False, landmarks.sources, degree)
    if u:
        q_mat = monomial_matrix(landmarks.sources, degree)
    else:
        q_mat = np.zeros((landmarks.n, 0))
    return SaddleSystem(problem.kernel_block(np.dtype(float)), q_mat,
                        np.array(landmarks.targets))


# ---------------------------------------------------------------------------
# the solver ladder

def _refined_solve(matrix, solve_once, rhs, n_interp, max_steps):
    """Solve with monitored iterative refinement; keep the best iterate."""
    z = solve_once(rhs)
    best_z, best_res = z, np.inf
    for step in range(max_steps + 1):
        r = rhs - matrix @ z
        finite = np.isfinite(r).all()
        res = float(np.abs(r[:n_interp]).max()) if finite else np.inf
        if res < best_res:
            best_z, best_res = z, res
        if not finite or step == max_steps:
            break
        z = z + solve_once(np.asarray(r))
    return best_z, best_res


def _condition_from_lu(matrix, lu_piv):
    if lu_piv is None:
        return np.inf
    inv = lu_solve(lu_piv, np.eye(matrix.shape[0]))
    if not np.isfinite(inv).all():
        return np.inf
    return float(np.abs(matrix).sum(0).max() * np.abs(inv).sum(0).max())


def _solve_dense(problem: _Problem, rhs, context: str):
    """Solve a system on the float64 -> 80-bit -> mpmath precision ladder.

    Returns (solution, interpolation residual, condition estimate,
    precision tag).  Raises SolveError when even the top rung leaves the
    interpolation conditions violated (numerically singular system).
    """
    n_interp = problem.n
    a = problem.build(np.dtype(float))
    scale = max(1.0, float(np.abs(rhs[:n_interp]).max()))
    lu_piv = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            lu_piv = lu_factor(a, check_finite=False)
            if np.abs(np.diag(lu_piv[0])).min() == 0.0:
                lu_piv = None
        except ValueError:
            lu_piv = None
    cond = _condition_from_lu(a, lu_piv)
    z = None
    res = np.inf
    if lu_piv is not None:
        z, res = _refined_solve(a, lambda b: lu_solve(lu_piv, b), rhs, n_interp, 2)
        if res <= ESCALATE_THRESHOLD * scale:
            return z, res, cond, "double"
    a_ext = problem.build(np.longdouble)
    lu_ext, order = _precision.lu_extended(a_ext)
    z_ext, res_ext = _refined_solve(
        a_ext, lambda b: _precision.lu_solve_extended(lu_ext, order, b),
        rhs, n_interp, 3)
    if res_ext <= min(MP_THRESHOLD * scale, res):
        return z_ext, res_ext, cond, "longdouble"
    coef_mp, res_mp = _precision.mp_solve(
        problem.kernel, problem.tensor, problem.sources, problem.tail_degree,
        problem.exponents, rhs)
    candidates = [(res_mp, coef_mp, "mp"), (res_ext, z_ext, "longdouble"), (res, z, "double")]
    best_res, best_z, precision = min(candidates, key=lambda item: item[0])
    if best_z is None or best_res > RESIDUAL_LIMIT * scale:
        raise SolveError(
            f"{context}: system is numerically singular or rank deficient "
            f"(best residual {best_res:.2e}, condition estimate {cond:.2e}); "
            "check for degenerate source configurations such as collinear "
            "landmarks with a polynomial tail"
        )
    return best_z, best_res, cond, precision


def condition_estimate(system: SaddleSystem) -> float:
    """1-norm condition estimate of the full saddle matrix (exact inverse)."""
    a = system.full_matrix()
    if a.shape[0] == 1:
        return 1.0 if a[0, 0] != 0 else np.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            lu_piv = lu_factor(a, check_finite=False)
            if np.abs(np.diag(lu_piv[0])).min() == 0.0:
                return np.inf
        except ValueError:
            return np.inf
    return _condition_from_lu(a, lu_piv)


# ---------------------------------------------------------------------------
# transformations

class Transformation:
    """Evaluable map R^m -> R^m; immutable after construction.

    Attributes shared by all kinds: ``kind``, ``landmarks``, ``residual``
    (max landmark interpolation error recorded at construction),
    ``condition`` (estimate for the solved system), ``ill_conditioned``.
    """

    kind = "abstract"

    def __call__(self, points):
        raise NotImplementedError

    def _wrap(self, points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        return np.atleast_2d(pts), single


class _SolvedTransform(Transformation):
    """Shared machinery for transforms backed by one dense solve."""

    def __init__(self, problem, landmarks, coef, poly_coef,
                 residual, condition, precision):
        self._problem = problem
        self.landmarks = landmarks
        for arr in (coef, poly_coef):
            if arr.dtype.kind == "f":
                arr.setflags(write=False)
        self.coef = coef
        self.poly_coef = poly_coef
        self.tail_degree = problem.tail_degree
        self.residual = residual
        self.condition = condition
        self.ill_conditioned = condition > ILL_CONDITIONED
        self.precision = precision

    def __call__(self, points):
        pts, single = self._wrap(points)
        problem = self._problem
        if self.precision == "mp":
            coef = np.vstack([self.coef, self.poly_coef])
            out = _precision.mp_evaluate(
                problem.kernel, problem.tensor, coef, problem.tail_degree,
                problem.exponents, pts, problem.sources)
        else:
            dtype = np.longdouble if self.precision == "longdouble" else np.dtype(float)
            x = pts.astype(dtype)
            src = problem.sources.astype(dtype)
            if problem.tensor:
                k = _tensor_matrix(problem.kernel, x, src)
            else:
                k = eval_radial(problem.kernel, _pairwise_distances(x, src))
            out = k @ self.coef
            if problem.tail_degree is not None:
                out = out + monomial_matrix(x, problem.tail_degree) @ self.poly_coef
            out = np.asarray(out, dtype=float)
        return out[0] if single else out

    @property
    def kernel(self):
        return self._problem.kernel


class GlobalRadialTransform(_SolvedTransform):
    """F_k(x) = sum_j a_jk Phi(||x - x_j||) + sum_u b_uk pi_u(x)."""

    kind = "global-radial"


class TensorProductTransform(_SolvedTransform):
    """F_k(x) = sum_j c_jk psi(x_1 - x_j1) ... psi(x_m - x_jm)."""

    kind = "tensor-product"


def evaluate(transform: Transformation, x):
    """Evaluate F(x); accepts a single point (m,) or a batch (P, m)."""
    return transform(x)


def solve_transform(kernel: RadialKernel, landmarks: LandmarkSet) -> GlobalRadialTransform:
    """Solve the landmark interpolation system for a radial kernel."""
    degree = polynomial_tail_degree(kernel)
    n, dim = landmarks.n, landmarks.dimension
    u = tail_dimension(dim, degree)
    if u and u >= n:
        raise ValueError(
            f"polynomial tail needs more landmarks: U = {u} must be < N = {n}"
        )
    problem = _Problem(kernel, False, landmarks.sources, degree)
    rhs = np.vstack([landmarks.targets, np.zeros((u, dim))])
    z, res, cond, precision = _solve_dense(problem, rhs, type(kernel).__name__)
    return GlobalRadialTransform(problem, landmarks, z[:n], z[n:],
                                 res, cond, precision)


def build_tensor_transform(kernel, landmarks: LandmarkSet) -> TensorProductTransform:
    """Solve a tensor-product transform from a univariate kernel.

    Accepts a Wendland1D kernel or a LobachevskySpline (even order only,
    as required for strictly positive definite transforms).
    """
    if isinstance(kernel, LobachevskySpline):
        if kernel.n % 2 != 0:
            raise ValueError("tensor-product transforms need an even spline order n")
    elif not isinstance(kernel, Wendland1D):
        raise ValueError(f"kernel {kernel!r} is not a univariate tensor factor")
    problem = _Problem(kernel, True, landmarks.sources, None)
    z, res, cond, precision = _solve_dense(
        problem, np.array(landmarks.targets), f"{type(kernel).__name__} tensor")
    return TensorProductTransform(problem, landmarks, z, np.zeros((0, landmarks.dimension)),
                                  res, cond, precision)
