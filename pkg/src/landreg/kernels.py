"""Radial and univariate kernel families used to build transformations.

Radial kernels are functions of the Euclidean distance r alone.  The
Gaussian, the inverse multiquadric and the compactly supported Wendland
family are strictly positive definite; the thin plate spline and the
multiquadric are conditionally positive definite and need a low-degree
polynomial tail (see :func:`polynomial_tail_degree`).

All evaluators are pure, preserve the input dtype (so extended-precision
solves can reuse them) and return *exact* zeros outside a compact support.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


class KernelError(ValueError):
    """Invalid kernel configuration (unsupported family parameters)."""


@dataclass(frozen=True)
class Gaussian:
    """exp(-alpha^2 r^2), strictly positive definite, globally supported."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise KernelError("Gaussian shape parameter alpha must be positive")


@dataclass(frozen=True)
class ThinPlateSpline:
    """r^2 log r with the removable singularity closed by Phi(0) = 0."""


@dataclass(frozen=True)
class GeneralizedMultiquadric:
    """(r^2 + gamma^2)^(mu/2) for nonzero integer mu.

    mu < 0 gives the strictly positive definite inverse multiquadrics.
    Odd mu > 0 gives the classical multiquadrics, conditionally positive
    definite with minimal polynomial-tail degree mu - 1.  Even positive mu
    is rejected: the degree rule covers only the classical odd family.
    """

    gamma: float
    mu: int

    def __post_init__(self):
        if not self.gamma > 0:
            raise KernelError("multiquadric parameter gamma must be positive")
        if not isinstance(self.mu, (int, np.integer)) or self.mu == 0:
            raise KernelError("multiquadric exponent mu must be a nonzero integer")
        if self.mu > 0 and self.mu % 2 == 0:
            raise KernelError(
                "even positive mu is not supported (reduces to a polynomial family)"
            )


@dataclass(frozen=True)
class WendlandRadial:
    """Compactly supported Wendland kernel, zero for c*r >= 1.

    h in {0, 1, 2, 3} selects smoothness C^(2h); m is the space dimension
    (m <= 3).  The m = 2 polynomials remain strictly positive definite on
    R^3, so m = 3 shares them.
    """

    m: int
    h: int
    c: float

    def __post_init__(self):
        if self.m not in (1, 2, 3):
            raise KernelError("Wendland dimension m must be 1, 2 or 3")
        if self.h not in (0, 1, 2, 3):
            raise KernelError("Wendland smoothness index h must be in 0..3")
        if not self.c > 0:
            raise KernelError("Wendland scale c must be positive")


@dataclass(frozen=True)
class Wendland1D:
    """Univariate Wendland kernel phi(|x|), building block of tensor products."""

    h: int
    c: float

    def __post_init__(self):
        if self.h not in (0, 1, 2, 3):
            raise KernelError("Wendland smoothness index h must be in 0..3")
        if not self.c > 0:
            raise KernelError("Wendland scale c must be positive")


RadialKernel = Union[Gaussian, ThinPlateSpline, GeneralizedMultiquadric, WendlandRadial]


def _wendland_poly(group: int, h: int, u):
    """Polynomial part on [0, 1); group 1 covers m=1, group 2 covers m=2,3."""
    if group == 1:
        if h == 0:
            return 1.0 - u
        if h == 1:
            return (1.0 - u) ** 3 * (3.0 * u + 1.0)
        if h == 2:
            return (1.0 - u) ** 5 * (8.0 * u * u + 5.0 * u + 1.0)
        return (1.0 - u) ** 7 * (21.0 * u ** 3 + 19.0 * u * u + 7.0 * u + 1.0)
    if h == 0:
        return (1.0 - u) ** 2
    if h == 1:
        return (1.0 - u) ** 4 * (4.0 * u + 1.0)
    if h == 2:
        return (1.0 - u) ** 6 * (35.0 * u * u + 18.0 * u + 3.0)
    return (1.0 - u) ** 8 * (32.0 * u ** 3 + 25.0 * u * u + 8.0 * u + 1.0)


def _wendland_value(group: int, h: int, c: float, r):
    u = c * r
    zero = np.zeros((), dtype=u.dtype) if isinstance(u, np.ndarray) else 0.0
    return np.where(u < 1.0, _wendland_poly(group, h, u), zero)


def eval_radial(kernel: RadialKernel, r):
    """Evaluate a radial kernel at distance(s) r >= 0, elementwise."""
    scalar = np.isscalar(r) or np.ndim(r) == 0
    r = np.asarray(r)
    if r.dtype.kind != "f":
        r = r.astype(float)
    if np.any(r < 0):
        raise ValueError("radial kernels are defined for r >= 0 only")
    if isinstance(kernel, Gaussian):
        out = np.exp(-(kernel.alpha * kernel.alpha) * r * r)
    elif isinstance(kernel, ThinPlateSpline):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = r * r * np.log(r)
        out = np.where(r > 0, out, np.zeros((), dtype=r.dtype))
    elif isinstance(kernel, GeneralizedMultiquadric):
        out = (r * r + kernel.gamma * kernel.gamma) ** (kernel.mu / 2.0)
    elif isinstance(kernel, WendlandRadial):
        group = 1 if kernel.m == 1 else 2
        out = _wendland_value(group, kernel.h, kernel.c, r)
    else:
        raise KernelError(f"unknown radial kernel {kernel!r}")
    return out.item() if scalar else out


def eval_univariate(kernel: Wendland1D, x):
    """Evaluate phi(|x|) for a univariate Wendland kernel; even in x."""
    if not isinstance(kernel, Wendland1D):
        raise KernelError(f"unknown univariate kernel {kernel!r}")
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.asarray(x)
    if x.dtype.kind != "f":
        x = x.astype(float)
    out = _wendland_value(1, kernel.h, kernel.c, np.abs(x))
    return out.item() if scalar else out


def polynomial_tail_degree(kernel: RadialKernel):
    """Degree of the polynomial tail required for solvability, or None.

    Strictly positive definite kernels need no tail.  The thin plate spline
    needs degree 1; the multiquadric with odd mu > 0 needs degree mu - 1.
    """
    if isinstance(kernel, (Gaussian, WendlandRadial, Wendland1D)):
        return None
    if isinstance(kernel, ThinPlateSpline):
        return 1
    if isinstance(kernel, GeneralizedMultiquadric):
        return None if kernel.mu < 0 else kernel.mu - 1
    raise KernelError(f"unknown kernel {kernel!r}")


def support_radius(kernel) -> float:
    """Radius beyond which the kernel is exactly zero (inf if global)."""
    if isinstance(kernel, (WendlandRadial, Wendland1D)):
        return 1.0 / kernel.c
    if isinstance(kernel, (Gaussian, ThinPlateSpline, GeneralizedMultiquadric)):
        return np.inf
    raise KernelError(f"unknown kernel {kernel!r}")
