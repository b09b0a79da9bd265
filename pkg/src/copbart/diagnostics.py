"""Posterior summaries, simulation-study metrics and permutation GOF tests."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .copulas import CopulaModel, pseudo_observations
from .sampler import ChainTrace

QUANTILES = (0.025, 0.975)


@dataclass
class PosteriorSummary:
    """Per-observation posterior mean and 95% band, shaped (replicates, chains, n)."""

    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    scale: str = "tau"

    def __post_init__(self):
        arrs = [np.asarray(a, dtype=float) for a in (self.mean, self.lower, self.upper)]
        arrs = [a.reshape((1,) * (3 - a.ndim) + a.shape) if a.ndim < 3 else a for a in arrs]
        if not (arrs[0].shape == arrs[1].shape == arrs[2].shape) or arrs[0].ndim != 3:
            raise ValueError("mean, lower and upper must share one (replicates, chains, n) shape")
        if np.any(arrs[1] > arrs[2]):
            raise ValueError("lower quantile above upper quantile")
        self.mean, self.lower, self.upper = arrs

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.mean.shape

    @classmethod
    def from_draws(cls, draws, scale: str = "tau") -> "PosteriorSummary":
        """``draws`` is (replicates, chains, iterations, n) or any nesting of that."""
        draws = np.asarray(draws, dtype=float)
        while draws.ndim < 4:
            draws = draws[None]
        lo, hi = np.quantile(draws, QUANTILES, axis=2)
        return cls(draws.mean(axis=2), lo, hi, scale)

    @classmethod
    def from_traces(cls, traces, model: CopulaModel, scale: str = "tau") -> "PosteriorSummary":
        """Summarise post-burn-in draws of nested lists ``traces[replicate][chain]``."""
        if isinstance(traces, ChainTrace):
            traces = [[traces]]
        elif traces and isinstance(traces[0], ChainTrace):
            traces = [traces]
        means, los, his = [], [], []
        for rep in traces:
            m, lo, hi = zip(*(chain_summary(tr, model, scale) for tr in rep))
            means.append(m)
            los.append(lo)
            his.append(hi)
        return cls(np.array(means), np.array(los), np.array(his), scale)


def to_scale(theta, model: CopulaModel, scale: str):
    if scale == "theta":
        return np.asarray(theta, dtype=float)
    if scale == "tau":
        return model.tau(theta)
    raise ValueError(f"scale must be 'tau' or 'theta', got {scale!r}")


def chain_summary(trace: ChainTrace, model: CopulaModel, scale: str = "tau"):
    draws = to_scale(trace.theta[trace.kept()], model, scale)
    lo, hi = np.quantile(draws, QUANTILES, axis=0)
    return draws.mean(axis=0), lo, hi


def _truth(summary: PosteriorSummary, truth) -> np.ndarray:
    truth = np.asarray(truth, dtype=float)
    n_r, _, n = summary.shape
    if truth.ndim == 1:
        truth = np.broadcast_to(truth, (n_r, n))
    if truth.shape != (n_r, n):
        raise ValueError(f"truth has shape {truth.shape}, expected ({n_r}, {n}) or ({n},)")
    return truth[:, None, :]


def rmse(summary: PosteriorSummary, truth, rooted: bool = False) -> float:
    """Replicate average of the mean squared error of posterior means.

    This is the un-rooted average as printed in the simulation protocol;
    ``rooted=True`` takes the square root within each replicate first.
    """
    sq = (_truth(summary, truth) - summary.mean) ** 2
    per_rep = sq.mean(axis=(1, 2))
    if rooted:
        per_rep = np.sqrt(per_rep)
    return float(per_rep.mean())


def rmse_rooted(summary: PosteriorSummary, truth) -> float:
    return rmse(summary, truth, rooted=True)


def ci_length(summary: PosteriorSummary) -> float:
    return float(np.mean(summary.upper - summary.lower))


def ci_cov(summary: PosteriorSummary, truth) -> float:
    t = _truth(summary, truth)
    return float(np.mean((summary.lower <= t) & (t <= summary.upper)))


# -- permutation two-sample tests -----------------------------------------------------


def _check_samples(A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ValueError(f"samples must be 2-d with equal dimension, got {A.shape} and {B.shape}")
    if A.shape[0] < 2 or B.shape[0] < 2:
        raise ValueError("each sample needs at least 2 points")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise ValueError("samples must be finite")
    return A, B


def _label_batches(n_a: int, n: int, n_perm: int, rng: np.random.Generator, batch: int = 250):
    """Yield (n, b) 0/1 matrices whose columns are random relabellings."""
    base = np.zeros(n)
    base[:n_a] = 1.0
    done = 0
    while done < n_perm:
        b = min(batch, n_perm - done)
        yield rng.permuted(np.tile(base[:, None], (1, b)), axis=0)
        done += b


def _perm_pvalue(observed: float, perms: np.ndarray) -> float:
    # ties within rounding count as "at least as extreme"
    tol = 1e-12 * max(1.0, abs(observed))
    return (1.0 + np.count_nonzero(perms >= observed - tol)) / (perms.shape[0] + 1.0)


def _cramer_from_labels(D: np.ndarray, lab: np.ndarray, n_a: int, n_b: int) -> np.ndarray:
    DA = D @ lab
    s_aa = np.einsum("ij,ij->j", lab, DA)
    s_all = D.sum()
    s_ab = DA.sum(axis=0) - s_aa  # rows in B, columns in A
    s_bb = s_all - s_aa - 2.0 * s_ab
    return n_a * n_b / (n_a + n_b) * (s_ab / (n_a * n_b) - s_aa / (2.0 * n_a**2) - s_bb / (2.0 * n_b**2))


def cramer_statistic(A, B) -> float:
    """Two-sample energy (Cramer) statistic with the Euclidean distance kernel."""
    A, B = _check_samples(A, B)
    Z = np.vstack([A, B])
    D = np.sqrt(((Z[:, None, :] - Z[None, :, :]) ** 2).sum(axis=-1))
    lab = np.zeros((Z.shape[0], 1))
    lab[: A.shape[0]] = 1.0
    return float(_cramer_from_labels(D, lab, A.shape[0], B.shape[0])[0])


def cramer_test(A, B, n_perm: int = 1000, rng=None) -> float:
    """Permutation p-value ``(1 + #{T_perm >= T_obs}) / (n_perm + 1)``."""
    A, B = _check_samples(A, B)
    if n_perm < 1:
        raise ValueError("n_perm must be at least 1")
    rng = np.random.default_rng(rng)
    Z = np.vstack([A, B])
    n_a, n_b = A.shape[0], B.shape[0]
    D = np.sqrt(((Z[:, None, :] - Z[None, :, :]) ** 2).sum(axis=-1))
    obs = cramer_statistic(A, B)
    perms = np.concatenate([_cramer_from_labels(D, lab, n_a, n_b) for lab in _label_batches(n_a, Z.shape[0], n_perm, rng)])
    return _perm_pvalue(obs, perms)


def _quadrant_masks(Z: np.ndarray) -> list[np.ndarray]:
    """Four (origin, point) indicator matrices, strict inequalities."""
    gx = Z[None, :, 0] > Z[:, None, 0]
    lx = Z[None, :, 0] < Z[:, None, 0]
    gy = Z[None, :, 1] > Z[:, None, 1]
    ly = Z[None, :, 1] < Z[:, None, 1]
    return [(gx & gy).astype(float), (lx & gy).astype(float), (lx & ly).astype(float), (gx & ly).astype(float)]


def _ff_from_labels(Q: list[np.ndarray], lab: np.ndarray, n_a: int, n_b: int) -> np.ndarray:
    diff = np.zeros_like(lab)
    for q in Q:
        ca = q @ lab
        cb = q.sum(axis=1, keepdims=True) - ca
        diff = np.maximum(diff, np.abs(ca / n_a - cb / n_b))
    d_a = np.where(lab > 0, diff, -np.inf).max(axis=0)
    d_b = np.where(lab > 0, -np.inf, diff).max(axis=0)
    return 0.5 * (d_a + d_b)


def ff_statistic(A, B) -> float:
    """Fasano-Franceschini statistic: mean of the two origin-set maxima."""
    A, B = _check_samples(A, B)
    if A.shape[1] != 2:
        raise ValueError("the Fasano-Franceschini test is two-dimensional")
    Z = np.vstack([A, B])
    lab = np.zeros((Z.shape[0], 1))
    lab[: A.shape[0]] = 1.0
    return float(_ff_from_labels(_quadrant_masks(Z), lab, A.shape[0], B.shape[0])[0])


def ff_test(A, B, n_perm: int = 1000, rng=None) -> float:
    A, B = _check_samples(A, B)
    if A.shape[1] != 2:
        raise ValueError("the Fasano-Franceschini test is two-dimensional")
    if n_perm < 1:
        raise ValueError("n_perm must be at least 1")
    rng = np.random.default_rng(rng)
    Z = np.vstack([A, B])
    n_a, n_b = A.shape[0], B.shape[0]
    Q = _quadrant_masks(Z)
    obs = ff_statistic(A, B)
    perms = np.concatenate([_ff_from_labels(Q, lab, n_a, n_b) for lab in _label_batches(n_a, Z.shape[0], n_perm, rng)])
    return _perm_pvalue(obs, perms)


# -- goodness of fit --------------------------------------------------------------------

GOF_TESTS = {"cramer": cramer_test, "ff": ff_test}


@dataclass
class GofRow:
    test: str
    mean: float
    median: float
    sd: float
    pvalues: np.ndarray


def gof_harness(theta_hat, u1, u2, model: CopulaModel, replicates: int = 100, n_perm: int = 1000,
                rng=None, tests=("cramer", "ff")) -> list[GofRow]:
    """Compare the observed pseudo-sample with samples simulated at ``theta_hat``.

    Each replicate draws one pair per observation at its fitted parameter,
    rank-transforms it and runs every test against the observed pairs.
    ``sd`` is NaN for a single replicate.
    """
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    theta_hat = np.asarray(theta_hat, dtype=float)
    obs = np.column_stack([u1, u2])
    if theta_hat.shape != (obs.shape[0],):
        raise ValueError("need one fitted parameter per observation")
    ss = np.random.SeedSequence(rng) if not isinstance(rng, np.random.SeedSequence) else rng
    pvals = {t: np.empty(replicates) for t in tests}
    for r, child in enumerate(ss.spawn(replicates)):
        g = np.random.default_rng(child)
        s1, s2 = model.sample(theta_hat, g)
        ps = pseudo_observations(s1, s2)
        sim = np.column_stack([ps.u1, ps.u2])
        for t in tests:
            pvals[t][r] = GOF_TESTS[t](obs, sim, n_perm, g)
    rows = []
    for t in tests:
        p = pvals[t]
        sd = float(np.std(p, ddof=1)) if replicates > 1 else math.nan
        rows.append(GofRow(t, float(np.mean(p)), float(np.median(p)), sd, p))
    return rows


def write_gof_csv(rows: list[GofRow], path) -> None:
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["test", "mean", "median", "sd"])
        for r in rows:
            w.writerow([r.test, repr(r.mean), repr(r.median), repr(r.sd)])
