"""Binary regression trees, the loss-based topology prior and structural moves.

Nodes are addressed with heap ids: the root is 1 and node ``j`` has children
``2j`` (left) and ``2j + 1`` (right).  An internal node stores a split rule
"x[feature] <= cutoff goes left"; a terminal node stores a value ``mu``.

Cutoffs are always drawn from the observed covariate values inside the node's
cell, excluding the largest, so both children of a fresh split are nonempty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

__all__ = [
    "DecisionTree",
    "LossPrior",
    "Node",
    "NodeSets",
    "GrowMove",
    "PruneMove",
    "RuleMove",
    "delta",
    "log_prior",
    "node_sets",
    "propose_change",
    "propose_grow",
    "propose_prune",
    "propose_swap",
    "rules_log_prob",
    "split_options",
    "value_at",
]


@dataclass
class Node:
    feature: int | None = None
    cutoff: float = math.nan
    mu: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass(frozen=True)
class NodeSets:
    terminal: tuple[int, ...]
    internal: tuple[int, ...]
    prunable: tuple[int, ...]
    parent_child: tuple[tuple[int, int], ...]


class DecisionTree:
    """A binary tree of split rules with a value on every leaf."""

    def __init__(self, nodes: dict[int, Node] | None = None, p: int | None = None):
        self.nodes: dict[int, Node] = nodes if nodes is not None else {1: Node()}
        self.p = p

    @classmethod
    def stump(cls, mu: float = 0.0, p: int | None = None) -> "DecisionTree":
        return cls({1: Node(mu=float(mu))}, p)

    def copy(self) -> "DecisionTree":
        return DecisionTree({k: Node(v.feature, v.cutoff, v.mu) for k, v in self.nodes.items()}, self.p)

    def __eq__(self, other):
        if not isinstance(other, DecisionTree):
            return NotImplemented
        if self.nodes.keys() != other.nodes.keys():
            return False
        for k, a in self.nodes.items():
            b = other.nodes[k]
            if a.feature != b.feature or a.mu != b.mu:
                return False
            if not a.is_leaf and a.cutoff != b.cutoff:
                return False
        return True

    def __repr__(self):
        return f"DecisionTree(n_leaves={self.n_leaves}, depth={self.depth})"

    # -- structure queries --------------------------------------------------

    def is_leaf(self, j: int) -> bool:
        return self.nodes[j].is_leaf

    @property
    def leaves(self) -> list[int]:
        return sorted(k for k, v in self.nodes.items() if v.is_leaf)

    @property
    def internal(self) -> list[int]:
        return sorted(k for k, v in self.nodes.items() if not v.is_leaf)

    @property
    def n_leaves(self) -> int:
        return sum(1 for v in self.nodes.values() if v.is_leaf)

    @property
    def depth(self) -> int:
        return max(k.bit_length() for k in self.nodes) - 1

    def prunable(self) -> list[int]:
        return [j for j in self.internal if self.nodes[2 * j].is_leaf and self.nodes[2 * j + 1].is_leaf]

    def parent_child_pairs(self) -> list[tuple[int, int]]:
        return [(j, c) for j in self.internal for c in (2 * j, 2 * j + 1) if not self.nodes[c].is_leaf]

    def subtree(self, j: int) -> Iterator[int]:
        stack = [j]
        while stack:
            k = stack.pop()
            yield k
            if not self.nodes[k].is_leaf:
                stack.extend((2 * k + 1, 2 * k))

    def leaf_values(self) -> dict[int, float]:
        return {k: self.nodes[k].mu for k in self.leaves}

    # -- evaluation ---------------------------------------------------------

    def assign(self, X: np.ndarray) -> np.ndarray:
        """Leaf id of every row of ``X``."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or (self.p is not None and X.shape[1] != self.p):
            raise ValueError(f"expected a 2-d covariate matrix with {self.p} columns, got shape {X.shape}")
        out = np.ones(X.shape[0], dtype=np.int64)
        for j in sorted(self.nodes):
            node = self.nodes[j]
            if node.is_leaf:
                continue
            rows = np.flatnonzero(out == j)
            go_left = X[rows, node.feature] <= node.cutoff
            out[rows] = np.where(go_left, 2 * j, 2 * j + 1)
        return out

    def values(self, X: np.ndarray, leaf_of: np.ndarray | None = None) -> np.ndarray:
        """Value at observation for every row of ``X``."""
        if leaf_of is None:
            leaf_of = self.assign(X)
        lut = self.leaf_values()
        ids = np.fromiter(lut.keys(), dtype=np.int64)
        mus = np.fromiter(lut.values(), dtype=float)
        return mus[np.searchsorted(ids, leaf_of)]

    def value_at(self, x) -> float:
        x = np.asarray(x, dtype=float).ravel()
        if self.p is not None and x.shape[0] != self.p:
            raise ValueError(f"covariate vector has {x.shape[0]} components, tree expects {self.p}")
        j = 1
        while not self.nodes[j].is_leaf:
            node = self.nodes[j]
            if node.feature >= x.shape[0]:
                raise ValueError("covariate vector too short for this tree")
            j = 2 * j if x[node.feature] <= node.cutoff else 2 * j + 1
        return self.nodes[j].mu

    # -- text form ----------------------------------------------------------

    def to_text(self) -> str:
        """Preorder listing, one node per line, indented two spaces per level.

        ``[id] x<feature> <= <cutoff>`` for splits and ``[id] leaf <mu>``
        for terminal nodes; numbers use ``repr`` so they round-trip exactly.
        """
        lines = []
        for j in self.subtree(1):
            node = self.nodes[j]
            pad = "  " * (j.bit_length() - 1)
            if node.is_leaf:
                lines.append(f"{pad}[{j}] leaf {node.mu!r}")
            else:
                lines.append(f"{pad}[{j}] x{node.feature} <= {node.cutoff!r}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, p: int | None = None) -> "DecisionTree":
        nodes = {}
        for line in text.strip().splitlines():
            head, _, rest = line.strip().partition("] ")
            j = int(head.lstrip("["))
            if rest.startswith("leaf "):
                nodes[j] = Node(mu=float(rest[5:]))
            else:
                feat, _, cut = rest.partition(" <= ")
                nodes[j] = Node(feature=int(feat[1:]), cutoff=float(cut))
        tree = cls(nodes, p)
        tree.validate()
        return tree

    def validate(self) -> None:
        if 1 not in self.nodes:
            raise ValueError("tree has no root")
        for j, node in self.nodes.items():
            if j > 1 and j // 2 not in self.nodes:
                raise ValueError(f"node {j} has no parent")
            kids = (2 * j in self.nodes, 2 * j + 1 in self.nodes)
            if node.is_leaf and any(kids):
                raise ValueError(f"terminal node {j} has children")
            if not node.is_leaf and not all(kids):
                raise ValueError(f"internal node {j} lacks a child")


def value_at(tree: DecisionTree, x) -> float:
    return tree.value_at(x)


def node_sets(tree: DecisionTree) -> NodeSets:
    return NodeSets(
        terminal=tuple(tree.leaves),
        internal=tuple(tree.internal),
        prunable=tuple(tree.prunable()),
        parent_child=tuple(tree.parent_child_pairs()),
    )


def delta(tree: DecisionTree) -> int:
    """Leaves under the root's right child minus leaves under its left child."""
    if tree.nodes[1].is_leaf:
        return 0
    right = sum(1 for k in tree.subtree(3) if tree.nodes[k].is_leaf)
    left = sum(1 for k in tree.subtree(2) if tree.nodes[k].is_leaf)
    return right - left


# -- loss-based topology prior ------------------------------------------------


@dataclass(frozen=True)
class LossPrior:
    """Log tree prior ``sign * omega * n_L - zeta * Delta`` (up to a constant).

    ``sign="penalizing"`` (default) uses ``-omega`` so that extra leaves are
    discouraged; ``sign="as-printed"`` uses ``+omega``.
    """

    omega: float = 1.62
    zeta: float = 0.62
    sign: str = "penalizing"

    def __post_init__(self):
        if not self.omega >= 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.sign not in ("as-printed", "penalizing"):
            raise ValueError(f"sign must be 'as-printed' or 'penalizing', got {self.sign!r}")

    def log_prior_counts(self, n_leaves: int, delta_value: int) -> float:
        s = 1.0 if self.sign == "as-printed" else -1.0
        return s * self.omega * n_leaves - self.zeta * delta_value

    def __call__(self, tree: DecisionTree) -> float:
        return self.log_prior_counts(tree.n_leaves, delta(tree))


def log_prior(tree: DecisionTree, params: LossPrior) -> float:
    return params(tree)


# -- split rules ----------------------------------------------------------------


def split_options(X: np.ndarray, rows: np.ndarray) -> dict[int, np.ndarray]:
    """Candidate cutoffs per feature for the cell holding ``rows``.

    Only features with at least one cutoff that leaves both sides nonempty
    are returned.
    """
    opts = {}
    for f in range(X.shape[1]):
        vals = np.unique(X[rows, f])
        if vals.shape[0] > 1:
            opts[f] = vals[:-1]
    return opts


def _draw_rule(X, rows, rng) -> tuple[int, float, float] | None:
    opts = split_options(X, rows)
    if not opts:
        return None
    feats = sorted(opts)
    f = feats[rng.integers(len(feats))]
    cuts = opts[f]
    c = float(cuts[rng.integers(cuts.shape[0])])
    return f, c, -math.log(len(feats)) - math.log(cuts.shape[0])


def rule_log_prob(X, rows, feature: int, cutoff: float) -> float:
    """log pi_RULE of a given rule in a cell, or -inf if it is not a candidate."""
    opts = split_options(X, rows)
    if feature not in opts or cutoff not in opts[feature]:
        return -math.inf
    return -math.log(len(opts)) - math.log(opts[feature].shape[0])


def cell_rows(tree: DecisionTree, leaf_of: np.ndarray, j: int) -> np.ndarray:
    """Rows falling in the cell of node ``j`` (leaf or internal)."""
    shift = np.frexp(leaf_of.astype(float))[1] - j.bit_length()  # exponent == bit length
    return np.flatnonzero((shift >= 0) & ((leaf_of >> np.maximum(shift, 0)) == j))


def rules_log_prob(tree: DecisionTree, X: np.ndarray, leaf_of: np.ndarray | None = None,
                   skip: tuple[int, ...] = ()) -> float:
    """Sum of log pi_RULE over internal nodes, each evaluated in its own cell.

    A rule that is not a candidate for its cell (possible after CHANGE or
    SWAP rewires the cells below it) gives -inf.
    """
    if leaf_of is None:
        leaf_of = tree.assign(X)
    total = 0.0
    for j in tree.internal:
        if j in skip:
            continue
        node = tree.nodes[j]
        total += rule_log_prob(X, cell_rows(tree, leaf_of, j), node.feature, node.cutoff)
        if total == -math.inf:
            break
    return total


# -- structural proposals -----------------------------------------------------


@dataclass
class GrowMove:
    tree: DecisionTree
    leaf: int
    left: int
    right: int
    log_rule_prob: float
    n_terminal: int  # |TN| of the current tree
    n_prunable_new: int  # |PN| of the proposed tree
    leaf_of: np.ndarray


@dataclass
class PruneMove:
    tree: DecisionTree
    node: int
    left: int
    right: int
    log_rule_prob: float  # pi_RULE of the removed rule, for the reverse grow
    n_prunable: int  # |PN| of the current tree
    n_terminal_new: int  # |TN| of the proposed tree
    leaf_of: np.ndarray


@dataclass
class RuleMove:
    """A CHANGE or SWAP proposal; ``valid`` is False when a leaf would be empty."""

    kind: str
    tree: DecisionTree
    nodes: tuple[int, ...]
    leaf_of: np.ndarray
    valid: bool = True
    extra: dict = field(default_factory=dict)


def propose_grow(tree: DecisionTree, X: np.ndarray, rng: np.random.Generator,
                 leaf_of: np.ndarray | None = None) -> GrowMove | None:
    """Split a uniformly chosen leaf; ``None`` if that leaf cannot be split."""
    if leaf_of is None:
        leaf_of = tree.assign(X)
    leaves = tree.leaves
    j = leaves[rng.integers(len(leaves))]
    rows = np.flatnonzero(leaf_of == j)
    rule = _draw_rule(X, rows, rng)
    if rule is None:
        return None
    f, c, logp = rule
    new = tree.copy()
    mu = new.nodes[j].mu
    new.nodes[j] = Node(feature=f, cutoff=c)
    new.nodes[2 * j] = Node(mu=mu)
    new.nodes[2 * j + 1] = Node(mu=mu)
    new_leaf_of = leaf_of.copy()
    new_leaf_of[rows] = np.where(X[rows, f] <= c, 2 * j, 2 * j + 1)
    return GrowMove(new, j, 2 * j, 2 * j + 1, logp, len(leaves), len(new.prunable()), new_leaf_of)


def propose_prune(tree: DecisionTree, rng: np.random.Generator, leaf_of: np.ndarray | None = None,
                  X: np.ndarray | None = None) -> PruneMove | None:
    """Collapse a uniformly chosen prunable node; ``None`` on a single-leaf tree.

    ``X`` (or a cached ``leaf_of``) is needed to report the reverse rule
    probability and the new leaf assignment.
    """
    if leaf_of is None:
        leaf_of = tree.assign(X) if X is not None else np.zeros(0, dtype=np.int64)
    pn = tree.prunable()
    if not pn:
        return None
    j = pn[rng.integers(len(pn))]
    node = tree.nodes[j]
    new = tree.copy()
    del new.nodes[2 * j], new.nodes[2 * j + 1]
    new.nodes[j] = Node(mu=tree.nodes[2 * j].mu)
    new_leaf_of = leaf_of.copy()
    new_leaf_of[(leaf_of == 2 * j) | (leaf_of == 2 * j + 1)] = j
    logp = math.nan
    if X is not None:
        logp = rule_log_prob(X, np.flatnonzero(new_leaf_of == j), node.feature, node.cutoff)
    return PruneMove(new, j, 2 * j, 2 * j + 1, logp, len(pn), new.n_leaves, new_leaf_of)


def _leaves_nonempty(tree: DecisionTree, leaf_of: np.ndarray) -> bool:
    return np.unique(leaf_of).shape[0] == tree.n_leaves


def propose_change(tree: DecisionTree, X: np.ndarray, rng: np.random.Generator,
                   leaf_of: np.ndarray | None = None) -> RuleMove | None:
    """Redraw the rule of a uniformly chosen internal node; ``None`` on a stump."""
    if leaf_of is None:
        leaf_of = tree.assign(X)
    internal = tree.internal
    if not internal:
        return None
    j = internal[rng.integers(len(internal))]
    # the node's own cell does not depend on its rule
    rows = np.flatnonzero(np.isin(leaf_of, list(tree.subtree(j))))
    rule = _draw_rule(X, rows, rng)
    new = tree.copy()
    if rule is None:  # cannot happen for a nonempty split cell, kept for safety
        return RuleMove("change", new, (j,), leaf_of.copy(), valid=False)
    f, c, _ = rule
    new.nodes[j] = Node(feature=f, cutoff=c)
    new_leaf_of = new.assign(X)
    return RuleMove("change", new, (j,), new_leaf_of, _leaves_nonempty(new, new_leaf_of))


def propose_swap(tree: DecisionTree, X: np.ndarray, rng: np.random.Generator) -> RuleMove | None:
    """Exchange the rules of a uniformly chosen internal parent-child pair."""
    pcn = tree.parent_child_pairs()
    if not pcn:
        return None
    a, b = pcn[rng.integers(len(pcn))]
    new = tree.copy()
    na, nb = new.nodes[a], new.nodes[b]
    na.feature, nb.feature = nb.feature, na.feature
    na.cutoff, nb.cutoff = nb.cutoff, na.cutoff
    new_leaf_of = new.assign(X)
    return RuleMove("swap", new, (a, b), new_leaf_of, _leaves_nonempty(new, new_leaf_of))
