"""Backfitting reversible-jump sampler for the sum-of-trees copula model.

One sweep visits every tree ``k`` in turn and

1. forms the partial fit ``R_k`` of the other trees,
2. proposes a GROW / PRUNE / CHANGE / SWAP move and accepts it with
   probability ``min(1, AR)``,
3. refreshes each leaf value with a Gaussian random-walk Metropolis step,
4. draws the tree's leaf-prior variance from its inverse-gamma conditional.

The random-walk and GROW/PRUNE proposal variances are either fixed or, after
``eta0`` iterations, derived per leaf from the running covariance of the
tree's value-at-observation vectors (see :class:`AdaptiveState`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg.blas import dger as _dger

from .copulas import CopulaModel, Family, PreparedPairs
from .data import Dataset
from .tree import DecisionTree, GrowMove, LossPrior, PruneMove, RuleMove, delta, propose_change, propose_grow, propose_prune, propose_swap, rules_log_prob

GROW, PRUNE, CHANGE, SWAP = 0, 1, 2, 3
MOVE_NAMES = ("grow", "prune", "change", "swap")
# move outcome codes stored in traces
REJECTED, ACCEPTED, UNAVAILABLE = 0, 1, 2

_LOG_2PI = math.log(2.0 * math.pi)
_ADAPT_SCALE = 2.4**2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class HyperParams:
    """Inverse-gamma hyperprior, tree prior and move-type probabilities."""

    a: float = 1.0
    b: float = 2.0
    prior: LossPrior = field(default_factory=LossPrior)
    move_probs: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ConfigError(f"inverse-gamma parameters must be positive, got a={self.a}, b={self.b}")
        probs = tuple(float(p) for p in self.move_probs)
        if len(probs) != 4 or min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-9:
            raise ConfigError(f"move probabilities must be 4 nonnegative numbers summing to 1, got {self.move_probs}")
        object.__setattr__(self, "move_probs", probs)


@dataclass(frozen=True)
class SamplerConfig:
    n_trees: int = 1
    iterations: int = 3000
    burn_in: int | None = None  # default: half the iterations
    eta0: int = 500
    proposal_var: float | None = None  # default: 0.2, or 1.0 for Frank
    adaptive: bool = True
    eps: float = 1e-6
    init_var: float = 0.1
    hyper: HyperParams = field(default_factory=HyperParams)

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError("need at least one tree")
        if self.iterations < 1:
            raise ConfigError("iterations must be positive")
        if self.burn_in is not None and not (0 <= self.burn_in < self.iterations):
            raise ConfigError(f"burn-in must lie in [0, iterations), got {self.burn_in}")
        if self.eta0 < 2:
            raise ConfigError("eta0 must be at least 2")
        if self.proposal_var is not None and not self.proposal_var > 0:
            raise ConfigError("proposal variance must be positive")
        if not (self.eps > 0 and self.init_var > 0):
            raise ConfigError("eps and init_var must be positive")

    @property
    def n_burn(self) -> int:
        return self.iterations // 2 if self.burn_in is None else self.burn_in

    def base_variance(self, model: CopulaModel) -> float:
        if self.proposal_var is not None:
            return self.proposal_var
        return 1.0 if model.family is Family.FRANK else 0.2


# -- state ----------------------------------------------------------------------


@dataclass
class EnsembleState:
    """m trees, their leaf-prior variances and cached per-tree fitted values."""

    trees: list[DecisionTree]
    sigma2: np.ndarray
    leaf_of: list[np.ndarray]
    values: np.ndarray  # m x n, values[t, i] = g(x_i, T_t, M_t)
    fitted: np.ndarray  # n, sum over trees

    @classmethod
    def from_trees(cls, trees, sigma2, X) -> "EnsembleState":
        leaf_of = [t.assign(X) for t in trees]
        values = np.stack([t.values(X, lo) for t, lo in zip(trees, leaf_of)])
        return cls(list(trees), np.asarray(sigma2, dtype=float).copy(), leaf_of, values, values.sum(axis=0))

    @classmethod
    def initial(cls, data: Dataset, config: SamplerConfig, rng: np.random.Generator) -> "EnsembleState":
        mus = rng.normal(0.0, math.sqrt(config.init_var), config.n_trees)
        trees = [DecisionTree.stump(mu, data.p) for mu in mus]
        h = config.hyper
        return cls.from_trees(trees, np.full(config.n_trees, h.b / (h.a + 1.0)), data.X)

    @property
    def m(self) -> int:
        return len(self.trees)

    def set_tree(self, k: int, tree: DecisionTree, leaf_of: np.ndarray) -> None:
        self.trees[k] = tree
        self.leaf_of[k] = leaf_of
        self.values[k] = tree.values(None, leaf_of)
        self.fitted = self.values.sum(axis=0)

    def copy(self) -> "EnsembleState":
        return EnsembleState([t.copy() for t in self.trees], self.sigma2.copy(), [a.copy() for a in self.leaf_of],
                             self.values.copy(), self.fitted.copy())


class AdaptiveState:
    """Running mean and covariance of one tree's value-at-observation vectors.

    The covariance is accumulated with the rank-one (Welford) recursion and
    the ``eps * I`` jitter is added when it is read, not accumulated.
    """

    def __init__(self, n: int, eta0: int = 500, eps: float = 1e-6, base_var: float = 0.2):
        self.n = n
        self.eta0 = eta0
        self.eps = eps
        self.base_var = base_var
        self.count = 0
        self.mean = np.zeros(n)
        self.m2 = np.zeros((n, n), order="F")

    @property
    def active(self) -> bool:
        return self.count > self.eta0

    def update(self, v: np.ndarray) -> None:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {v.shape}")
        self.count += 1
        d = v - self.mean
        self.mean += d / self.count
        if self.count > 1:
            # scale before the rank-one update so the result stays exactly symmetric
            s = math.sqrt((self.count - 1) / self.count) * d
            self.m2 = _dger(1.0, s, s, a=self.m2, overwrite_a=True)

    def covariance(self) -> np.ndarray:
        if self.count < 2:
            raise ValueError("covariance needs at least two vectors")
        return self.m2 / (self.count - 1) + self.eps * np.eye(self.n)

    def leaf_variance(self, rows: np.ndarray) -> float:
        """2.4^2 / |I|^3 times the sum of the covariance over the cell block."""
        q = len(rows)
        if q == 0:
            raise ValueError("empty cell")
        block = self.m2[np.ix_(rows, rows)].sum() / (self.count - 1) + self.eps * q
        return _ADAPT_SCALE * block / q**3

    def leaf_variances(self, leaf_of: np.ndarray, ids) -> np.ndarray:
        """Vectorised :meth:`leaf_variance` for several cells of one partition."""
        ids = np.asarray(ids)
        B = (leaf_of[:, None] == ids[None, :]).astype(float)
        q = B.sum(axis=0)
        if np.any(q == 0):
            raise ValueError("empty cell")
        block = np.einsum("ij,ij->j", B, self.m2 @ B) / (self.count - 1) + self.eps * q
        return _ADAPT_SCALE * block / q**3


def leaf_proposal_variance(adapt: AdaptiveState, rows) -> float:
    return adapt.leaf_variance(np.asarray(rows))


def adapt_update(adapt: AdaptiveState, v) -> AdaptiveState:
    adapt.update(v)
    return adapt


# -- building blocks ----------------------------------------------------------------


def _lognorm(x, mean, var):
    return -0.5 * (_LOG_2PI + math.log(var)) - (x - mean) ** 2 / (2.0 * var)


def residual_fit(state: EnsembleState, k: int) -> np.ndarray:
    """Sum over the other trees' values at each observation."""
    if not 0 <= k < state.m:
        raise IndexError(f"tree index {k} out of range for {state.m} trees")
    if state.m == 1:
        return np.zeros(state.values.shape[1])
    return np.delete(state.values, k, axis=0).sum(axis=0)


def log_likelihood(data: Dataset | PreparedPairs, model: CopulaModel, eta_values) -> float:
    """Sum of copula log-densities at the linked sum-of-trees values."""
    prep = data if isinstance(data, PreparedPairs) else model.prepare(data.u1, data.u2)
    eta = np.asarray(eta_values, dtype=float)
    if not np.all(np.isfinite(eta)):
        return -math.inf
    return prep.loglik(model.link(eta))


@dataclass
class GrowBundle:
    move: GrowMove
    mu_parent: float
    mu_left: float
    mu_right: float
    var_parent: float
    var_left: float
    var_right: float


@dataclass
class PruneBundle:
    move: PruneMove
    mu_left: float
    mu_right: float
    mu_new: float
    var_parent: float
    var_left: float
    var_right: float


def _cell_loglik(prep: PreparedPairs, model: CopulaModel, R: np.ndarray, rows: np.ndarray, mu: float) -> float:
    return float(np.sum(prep.logpdf(model.link(R[rows] + mu), rows)))


def _move_prob_ratio(hyper: HyperParams, forward: int, reverse: int) -> float:
    pf, pr = hyper.move_probs[forward], hyper.move_probs[reverse]
    return math.log(pr) - math.log(pf)


def log_accept_ratio_grow(prep, model, R, tree: DecisionTree, b: GrowBundle, sigma2: float, hyper: HyperParams) -> float:
    """log AR for a GROW proposal; only the split cell enters the likelihood."""
    mv = b.move
    rows_l = np.flatnonzero(mv.leaf_of == mv.left)
    rows_r = np.flatnonzero(mv.leaf_of == mv.right)
    rows_j = np.concatenate([rows_l, rows_r])
    prior = hyper.prior
    log_prior = (prior(mv.tree) - prior(tree)
                 + _lognorm(b.mu_left, 0.0, sigma2) + _lognorm(b.mu_right, 0.0, sigma2) - _lognorm(b.mu_parent, 0.0, sigma2))
    log_lik = (_cell_loglik(prep, model, R, rows_l, b.mu_left) + _cell_loglik(prep, model, R, rows_r, b.mu_right)
               - _cell_loglik(prep, model, R, rows_j, b.mu_parent))
    mu_bar = (len(rows_l) * b.mu_left + len(rows_r) * b.mu_right) / len(rows_j)
    # rule probabilities appear in both the prior and the proposal and cancel
    log_q = (-math.log(mv.n_prunable_new) + _lognorm(b.mu_parent, mu_bar, b.var_parent)
             + math.log(mv.n_terminal)
             - _lognorm(b.mu_left, b.mu_parent, b.var_left) - _lognorm(b.mu_right, b.mu_parent, b.var_right))
    out = log_prior + log_lik + log_q + _move_prob_ratio(hyper, GROW, PRUNE)
    return out if not math.isnan(out) else -math.inf


def log_accept_ratio_prune(prep, model, R, tree: DecisionTree, leaf_of: np.ndarray, b: PruneBundle,
                           sigma2: float, hyper: HyperParams) -> float:
    """log AR for a PRUNE proposal; the exact negative of the reverse GROW.

    ``leaf_of`` is the assignment under the current (unpruned) tree.
    """
    mv = b.move
    rows_l = np.flatnonzero(leaf_of == mv.left)
    rows_r = np.flatnonzero(leaf_of == mv.right)
    rows_j = np.concatenate([rows_l, rows_r])
    prior = hyper.prior
    log_prior = (prior(mv.tree) - prior(tree)
                 + _lognorm(b.mu_new, 0.0, sigma2) - _lognorm(b.mu_left, 0.0, sigma2) - _lognorm(b.mu_right, 0.0, sigma2))
    log_lik = (_cell_loglik(prep, model, R, rows_j, b.mu_new)
               - _cell_loglik(prep, model, R, rows_l, b.mu_left) - _cell_loglik(prep, model, R, rows_r, b.mu_right))
    mu_bar = (len(rows_l) * b.mu_left + len(rows_r) * b.mu_right) / len(rows_j)
    log_q = (math.log(mv.n_prunable) - _lognorm(b.mu_new, mu_bar, b.var_parent)
             - math.log(mv.n_terminal_new)
             + _lognorm(b.mu_left, b.mu_new, b.var_left) + _lognorm(b.mu_right, b.mu_new, b.var_right))
    out = log_prior + log_lik + log_q + _move_prob_ratio(hyper, PRUNE, GROW)
    return out if not math.isnan(out) else -math.inf


def accept_ratio_grow(*args, **kwargs) -> float:
    return math.exp(min(log_accept_ratio_grow(*args, **kwargs), 700.0))


def accept_ratio_prune(*args, **kwargs) -> float:
    return math.exp(min(log_accept_ratio_prune(*args, **kwargs), 700.0))


def log_accept_ratio_move(prep, model, R, tree: DecisionTree, leaf_of: np.ndarray, mv: RuleMove,
                          hyper: HyperParams, X: np.ndarray) -> float:
    """log AR for CHANGE / SWAP: prior ratio plus full likelihood ratio, M unchanged.

    The tree prior includes the rule probabilities of every internal node.
    """
    old = tree.values(None, leaf_of)
    new = mv.tree.values(None, mv.leaf_of)
    # the redrawn rule's own probability cancels against the proposal;
    # rules below it are re-scored in their new cells
    skip = mv.nodes if mv.kind == "change" else ()
    log_prior = (hyper.prior(mv.tree) - hyper.prior(tree)
                 + rules_log_prob(mv.tree, X, mv.leaf_of, skip) - rules_log_prob(tree, X, leaf_of, skip))
    if log_prior == -math.inf:
        return -math.inf
    log_lik = np.sum(prep.logpdf(model.link(R + new))) - np.sum(prep.logpdf(model.link(R + old)))
    out = float(log_prior + log_lik)
    return out if not math.isnan(out) else -math.inf


def accept_ratio_move(*args, **kwargs) -> float:
    return math.exp(min(log_accept_ratio_move(*args, **kwargs), 700.0))


def _accept(log_ratio: float, rng: np.random.Generator) -> bool:
    # always consume one uniform so streams do not depend on the ratio
    u = rng.random()
    return log_ratio >= 0.0 or (log_ratio > -math.inf and math.log(u) < log_ratio)


# -- per-tree updates ------------------------------------------------------------------


class _Variances:
    """Step variances for cells of the current tree: adaptive or fixed."""

    def __init__(self, adapt: AdaptiveState | None, base: float):
        self.adapt = adapt if adapt is not None and adapt.active else None
        self.base = base

    def rows(self, rows) -> float:
        return self.base if self.adapt is None else self.adapt.leaf_variance(rows)

    def leaves(self, leaf_of, ids) -> np.ndarray:
        if self.adapt is None:
            return np.full(len(ids), self.base)
        return self.adapt.leaf_variances(leaf_of, ids)


def leaf_mh_refresh(state: EnsembleState, k: int, prep: PreparedPairs, model: CopulaModel,
                    adapt: AdaptiveState | None, rng: np.random.Generator, base_var: float = 0.2,
                    R: np.ndarray | None = None, step_var=None) -> np.ndarray:
    """One Gaussian random-walk MH step per leaf of tree ``k``; returns accept flags.

    ``step_var`` overrides the variances (scalar or one per leaf), e.g. 0.
    """
    tree = state.trees[k]
    leaf_of = state.leaf_of[k]
    if R is None:
        R = residual_fit(state, k)
    ids = tree.leaves
    mus = np.array([tree.nodes[j].mu for j in ids])
    if step_var is None:
        var = _Variances(adapt, base_var).leaves(leaf_of, ids)
    else:
        var = np.broadcast_to(np.asarray(step_var, dtype=float), mus.shape)
    prop = mus + np.sqrt(var) * rng.standard_normal(len(ids))
    pos = np.searchsorted(ids, leaf_of)
    ll_old = prep.logpdf(model.link(R + mus[pos]))
    ll_new = prep.logpdf(model.link(R + prop[pos]))
    with np.errstate(invalid="ignore"):
        d = np.bincount(pos, weights=ll_new, minlength=len(ids)) - np.bincount(pos, weights=ll_old, minlength=len(ids))
    s2 = state.sigma2[k]
    d += (mus**2 - prop**2) / (2.0 * s2)
    u = rng.random(len(ids))
    d = np.where(np.isnan(d), -np.inf, d)
    ok = (d >= 0) | (np.log(u) < d)
    for j, flag, mu in zip(ids, ok, prop):
        if flag:
            tree.nodes[j].mu = float(mu)
    state.values[k] = tree.values(None, leaf_of)
    state.fitted = state.values.sum(axis=0)
    return ok


def sigma2_gibbs(state: EnsembleState, k: int, hyper: HyperParams, rng: np.random.Generator) -> float:
    """Draw sigma_k^2 from InvGamma(a + n_L / 2, b + sum(mu^2) / 2)."""
    mus = np.array(list(state.trees[k].leaf_values().values()))
    shape = hyper.a + 0.5 * mus.shape[0]
    scale = hyper.b + 0.5 * float(np.sum(mus**2))
    s2 = scale / rng.gamma(shape)
    state.sigma2[k] = s2
    return s2


def _grow_step(state, k, R, data, prep, model, hyper, var: _Variances, rng) -> int:
    tree, leaf_of = state.trees[k], state.leaf_of[k]
    mv = propose_grow(tree, data.X, rng, leaf_of)
    if mv is None:
        return UNAVAILABLE
    rows_l = np.flatnonzero(mv.leaf_of == mv.left)
    rows_r = np.flatnonzero(mv.leaf_of == mv.right)
    mu = tree.nodes[mv.leaf].mu
    vl, vr = var.rows(rows_l), var.rows(rows_r)
    vj = var.rows(np.concatenate([rows_l, rows_r]))
    mul = mu + math.sqrt(vl) * rng.standard_normal()
    mur = mu + math.sqrt(vr) * rng.standard_normal()
    b = GrowBundle(mv, mu, mul, mur, vj, vl, vr)
    lr = log_accept_ratio_grow(prep, model, R, tree, b, state.sigma2[k], hyper)
    if not _accept(lr, rng):
        return REJECTED
    mv.tree.nodes[mv.left].mu = mul
    mv.tree.nodes[mv.right].mu = mur
    state.set_tree(k, mv.tree, mv.leaf_of)
    return ACCEPTED


def _prune_step(state, k, R, data, prep, model, hyper, var: _Variances, rng) -> int:
    tree, leaf_of = state.trees[k], state.leaf_of[k]
    mv = propose_prune(tree, rng, leaf_of)
    if mv is None:
        return UNAVAILABLE
    rows_l = np.flatnonzero(leaf_of == mv.left)
    rows_r = np.flatnonzero(leaf_of == mv.right)
    mul, mur = tree.nodes[mv.left].mu, tree.nodes[mv.right].mu
    vl, vr = var.rows(rows_l), var.rows(rows_r)
    vj = var.rows(np.concatenate([rows_l, rows_r]))
    mu_bar = (len(rows_l) * mul + len(rows_r) * mur) / (len(rows_l) + len(rows_r))
    mu_new = mu_bar + math.sqrt(vj) * rng.standard_normal()
    b = PruneBundle(mv, mul, mur, mu_new, vj, vl, vr)
    lr = log_accept_ratio_prune(prep, model, R, tree, leaf_of, b, state.sigma2[k], hyper)
    if not _accept(lr, rng):
        return REJECTED
    mv.tree.nodes[mv.node].mu = mu_new
    state.set_tree(k, mv.tree, mv.leaf_of)
    return ACCEPTED


def _rule_step(state, k, R, data, prep, model, hyper, kind, rng) -> int:
    tree, leaf_of = state.trees[k], state.leaf_of[k]
    mv = propose_change(tree, data.X, rng, leaf_of) if kind == CHANGE else propose_swap(tree, data.X, rng)
    if mv is None or not mv.valid:
        return UNAVAILABLE
    lr = log_accept_ratio_move(prep, model, R, tree, leaf_of, mv, hyper, data.X)
    if not _accept(lr, rng):
        return REJECTED
    state.set_tree(k, mv.tree, mv.leaf_of)
    return ACCEPTED


@dataclass
class MoveRecord:
    tree: int
    kind: int
    outcome: int
    leaf_accepts: int
    leaf_count: int


def sweep(state: EnsembleState, adapt: list[AdaptiveState] | None, data: Dataset, model: CopulaModel,
          hyper: HyperParams, rng: np.random.Generator, prep: PreparedPairs | None = None,
          base_var: float = 0.2) -> list[MoveRecord]:
    """One backfitting pass over all trees; mutates ``state`` and ``adapt``.

    ``adapt=None`` runs the non-adaptive sampler with fixed ``base_var``.
    """
    if prep is None:
        prep = model.prepare(data.u1, data.u2)
    log = []
    cum = np.cumsum(hyper.move_probs)
    for k in range(state.m):
        R = residual_fit(state, k)
        ad = adapt[k] if adapt is not None else None
        var = _Variances(ad, base_var)
        kind = min(int(np.searchsorted(cum, rng.random() * cum[-1], side="right")), 3)
        if kind == GROW:
            outcome = _grow_step(state, k, R, data, prep, model, hyper, var, rng)
        elif kind == PRUNE:
            outcome = _prune_step(state, k, R, data, prep, model, hyper, var, rng)
        else:
            outcome = _rule_step(state, k, R, data, prep, model, hyper, kind, rng)
        flags = leaf_mh_refresh(state, k, prep, model, ad, rng, base_var, R=R)
        sigma2_gibbs(state, k, hyper, rng)
        if ad is not None:
            ad.update(state.values[k])
        log.append(MoveRecord(k, kind, outcome, int(flags.sum()), int(flags.shape[0])))
    return log


# -- chains ---------------------------------------------------------------------------


@dataclass
class ChainTrace:
    """Per-iteration output of one chain.

    ``theta`` holds the copula parameter at every observation (iterations x n);
    ``moves`` / ``outcomes`` hold the move kind and its outcome per tree.
    """

    family: str
    theta: np.ndarray
    loglik: np.ndarray
    n_leaves: np.ndarray
    depth: np.ndarray
    moves: np.ndarray
    outcomes: np.ndarray
    leaf_accepts: np.ndarray
    n_burn: int
    seed: int | None = None
    final_trees: list[str] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return self.theta.shape[0]

    def kept(self) -> slice:
        return slice(self.n_burn, None)

    def acceptance_rate(self, post_burn: bool = False) -> float:
        """Fraction of tree-move proposals accepted; unavailable moves count as rejections."""
        out = self.outcomes[self.kept()] if post_burn else self.outcomes
        return float(np.mean(out == ACCEPTED))

    def move_counts(self) -> dict[str, dict[str, int]]:
        res = {}
        for code, name in enumerate(MOVE_NAMES):
            sel = self.moves == code
            res[name] = {
                "proposed": int(sel.sum()),
                "accepted": int((sel & (self.outcomes == ACCEPTED)).sum()),
                "unavailable": int((sel & (self.outcomes == UNAVAILABLE)).sum()),
            }
        return res


def run_chain(config: SamplerConfig, data: Dataset, model: CopulaModel, seed=None,
              callback=None) -> ChainTrace:
    """Run one chain; bit-identical output for identical ``seed``."""
    rng = np.random.default_rng(seed)
    prep = model.prepare(data.u1, data.u2)
    state = EnsembleState.initial(data, config, rng)
    base = config.base_variance(model)
    adapt = None
    if config.adaptive:
        adapt = [AdaptiveState(data.n, config.eta0, config.eps, base) for _ in range(config.n_trees)]
    it, n, m = config.iterations, data.n, config.n_trees
    theta = np.empty((it, n))
    loglik = np.empty(it)
    n_leaves = np.empty((it, m), dtype=np.int32)
    depth = np.empty((it, m), dtype=np.int32)
    moves = np.empty((it, m), dtype=np.int8)
    outcomes = np.empty((it, m), dtype=np.int8)
    leaf_acc = np.empty((it, m), dtype=np.int32)
    for t in range(it):
        log = sweep(state, adapt, data, model, config.hyper, rng, prep, base)
        th = model.link(state.fitted)
        theta[t] = th
        loglik[t] = float(np.sum(prep.logpdf(th)))
        for rec in log:
            moves[t, rec.tree] = rec.kind
            outcomes[t, rec.tree] = rec.outcome
            leaf_acc[t, rec.tree] = rec.leaf_accepts
        for k, tree in enumerate(state.trees):
            n_leaves[t, k] = tree.n_leaves
            depth[t, k] = tree.depth
        if callback is not None:
            callback(t, state)
    return ChainTrace(model.family.value, theta, loglik, n_leaves, depth, moves, outcomes, leaf_acc,
                      config.n_burn, seed if isinstance(seed, (int, np.integer)) else None,
                      [tree.to_text() for tree in state.trees])
