"""Paired source/target landmark sets.

A landmark pair maps a point in the source image onto its known position in
the target image and acts as an interpolation constraint.  Quasi-landmarks
are pairs whose source and target coincide; they pin the transformation in
place and prevent an overall drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MIN_SEPARATION = 1e-12


@dataclass(frozen=True)
class LandmarkSet:
    """Immutable set of N landmark pairs in R^m (m = 1, 2 or 3)."""

    sources: np.ndarray
    targets: np.ndarray
    quasi: np.ndarray = field(default=None)

    def __post_init__(self):
        sources = np.atleast_2d(np.asarray(self.sources, dtype=float))
        targets = np.atleast_2d(np.asarray(self.targets, dtype=float))
        if sources.ndim != 2 or targets.shape != sources.shape:
            raise ValueError("sources and targets must both have shape (N, m)")
        n, m = sources.shape
        if n < 1:
            raise ValueError("at least one landmark pair is required")
        if not 1 <= m <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {m}")
        if not (np.isfinite(sources).all() and np.isfinite(targets).all()):
            raise ValueError("landmark coordinates must be finite")
        quasi = self.quasi
        if quasi is None:
            quasi = np.zeros(n, dtype=bool)
        else:
            quasi = np.asarray(quasi, dtype=bool)
            if quasi.shape != (n,):
                raise ValueError("quasi flags must have shape (N,)")
        diff = sources[:, None, :] - sources[None, :, :]
        dist = np.sqrt((diff * diff).sum(-1))
        dist[np.diag_indices(n)] = np.inf
        if dist.min() <= MIN_SEPARATION:
            i, j = divmod(int(dist.argmin()), n)
            raise ValueError(
                f"degenerate input: source landmarks {i} and {j} coincide "
                f"(separation {dist.min():.3e})"
            )
        if quasi.any() and not np.array_equal(sources[quasi], targets[quasi]):
            raise ValueError("quasi-landmarks must satisfy source == target")
        for arr in (sources, targets, quasi):
            arr.setflags(write=False)
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "quasi", quasi)

    @property
    def n(self) -> int:
        return self.sources.shape[0]

    @property
    def dimension(self) -> int:
        return self.sources.shape[1]

    def __len__(self) -> int:
        return self.n

    def subset(self, indices) -> "LandmarkSet":
        """Landmark set restricted to (and renumbered by) the given indices."""
        idx = np.asarray(indices, dtype=int)
        return LandmarkSet(self.sources[idx], self.targets[idx], self.quasi[idx])
