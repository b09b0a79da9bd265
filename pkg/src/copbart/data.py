from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .copulas import pseudo_observations


@dataclass(frozen=True)
class Dataset:
    """Pseudo-observation pairs with their covariates (``X`` is n x p)."""

    u1: np.ndarray
    u2: np.ndarray
    X: np.ndarray

    def __post_init__(self):
        u1 = np.ascontiguousarray(self.u1, dtype=float)
        u2 = np.ascontiguousarray(self.u2, dtype=float)
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        X = np.ascontiguousarray(X)
        if u1.ndim != 1 or u1.shape != u2.shape or X.shape[0] != u1.shape[0]:
            raise ValueError(f"inconsistent shapes: u1 {u1.shape}, u2 {u2.shape}, X {X.shape}")
        if u1.shape[0] < 2:
            raise ValueError("need at least 2 observations")
        if not (np.all((u1 > 0) & (u1 < 1)) and np.all((u2 > 0) & (u2 < 1))):
            raise ValueError("pseudo-observations must lie strictly inside (0, 1)")
        if not np.all(np.isfinite(X)):
            raise ValueError("covariates must be finite")
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)
        object.__setattr__(self, "X", X)

    @classmethod
    def from_raw(cls, y1, y2, X) -> "Dataset":
        ps = pseudo_observations(y1, y2)
        return cls(ps.u1, ps.u2, X)

    @property
    def n(self) -> int:
        return self.u1.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]
