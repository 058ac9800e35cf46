"""Single-tree logic models for binary responses, fitted by simulated annealing.

A model is a rooted binary tree: internal nodes carry ``and``/``or``, leaves
carry a (column, negated) literal.  Codes >= 1 count as "present", so
ternary inputs threshold cleanly.  The fit minimizes the training
misclassification count with class labels assigned by majority inside the
tree-true and tree-false groups, and returns the best tree encountered
rather than the final state of the chain.

The neighborhood consists of six moves: replacing a leaf's literal,
flipping an operator, growing a leaf into (leaf op new-leaf), pruning an
operator node to one child, splitting a leaf into (new op new), and
deleting a leaf.  Every state can be reached from every other within the
leaf-count cap, and each move has an inverse move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, require_two_classes

AND = "and"
OR = "or"

DNF_TERM_CAP = 4096

MOVE_NAMES = (
    "alternate_leaf",
    "alternate_operator",
    "grow_branch",
    "prune_branch",
    "split_leaf",
    "delete_leaf",
)


class DnfSizeError(RuntimeError):
    """Expanding a tree would exceed the DNF term cap."""


@dataclass(frozen=True)
class Leaf:
    var: int
    negated: bool = False


@dataclass(frozen=True)
class Op:
    kind: str  # AND or OR
    left: "Node"
    right: "Node"


Node = Leaf | Op


@dataclass
class AnnealParams:
    nleaves_max: int = 30
    iterations: int = 50_000
    t_start: float | None = None  # None: 1 + initial score / 10
    cooling: float = 0.999
    seed: int = 0
    stop_when_perfect: bool = True  # a 0-error tree cannot be improved

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 < self.cooling < 1.0:
            raise ValueError(f"cooling must lie in (0, 1), got {self.cooling}")
        if self.nleaves_max < 1:
            raise ValueError(f"nleaves_max must be >= 1, got {self.nleaves_max}")


@dataclass
class FittedLogicModel:
    tree: Node
    score: int  # training misclassifications of the stored tree
    predicted_class_when_true: int
    predicted_class_when_false: int
    dnf: tuple[tuple[tuple[int, bool], ...], ...]
    iterations_run: int

    def predict(self, x: np.ndarray) -> np.ndarray:
        xbt = np.ascontiguousarray(np.asarray(x).T >= 1)
        vals = eval_tree(self.tree, xbt)
        return np.where(
            vals, self.predicted_class_when_true, self.predicted_class_when_false
        ).astype(np.int8)


@dataclass
class ImportanceReport:
    """Inclusion frequencies over an ensemble of bootstrap fits.

    Terms are tallied in each model's class-1 orientation (see
    :func:`positive_dnf`), so a fit that settled on the complement tree
    still counts toward the interactions it represents.
    """

    variable_frequency: np.ndarray  # fraction of models whose tree uses the column
    term_frequency: dict  # canonical DNF term -> fraction of models containing it
    b_boot: int


# ---------------------------------------------------------------------------
# tree structure helpers

def tree_leaves(node: Node, path=()) -> list:
    """(path, leaf) pairs in left-to-right order; paths are 0/1 tuples."""
    if isinstance(node, Leaf):
        return [(path, node)]
    return tree_leaves(node.left, path + (0,)) + tree_leaves(node.right, path + (1,))


def tree_operators(node: Node, path=()) -> list:
    if isinstance(node, Leaf):
        return []
    return (
        [(path, node)]
        + tree_operators(node.left, path + (0,))
        + tree_operators(node.right, path + (1,))
    )


def leaf_count(node: Node) -> int:
    if isinstance(node, Leaf):
        return 1
    return leaf_count(node.left) + leaf_count(node.right)


def tree_variables(node: Node) -> set[int]:
    return {leaf.var for _, leaf in tree_leaves(node)}


def replace_at(root: Node, path: tuple, new: Node) -> Node:
    """Copy of ``root`` with the node at ``path`` replaced by ``new``."""
    if not path:
        return new
    if path[0] == 0:
        return Op(root.kind, replace_at(root.left, path[1:], new), root.right)
    return Op(root.kind, root.left, replace_at(root.right, path[1:], new))


def eval_tree(node: Node, xbt: np.ndarray) -> np.ndarray:
    """Boolean value of the tree per observation; ``xbt`` is (p, n) presence."""
    if isinstance(node, Leaf):
        col = xbt[node.var]
        return ~col if node.negated else col
    a = eval_tree(node.left, xbt)
    b = eval_tree(node.right, xbt)
    return (a & b) if node.kind == AND else (a | b)


def eval_tree_row(node: Node, row) -> int:
    """Tree value on one observation row of length p."""
    row = np.asarray(row)
    return int(eval_tree(node, (row >= 1)[:, None])[0])


def tree_to_string(node: Node) -> str:
    if isinstance(node, Leaf):
        return ("!" if node.negated else "") + f"X{node.var + 1}"
    sym = " & " if node.kind == AND else " | "
    return "(" + tree_to_string(node.left) + sym + tree_to_string(node.right) + ")"


def negate_tree(node: Node) -> Node:
    """The complement tree (same size) via De Morgan's laws."""
    if isinstance(node, Leaf):
        return Leaf(node.var, not node.negated)
    return Op(OR if node.kind == AND else AND, negate_tree(node.left), negate_tree(node.right))


# ---------------------------------------------------------------------------
# moves

def _random_leaf(p: int, rng) -> Leaf:
    return Leaf(int(rng.integers(p)), bool(rng.integers(2)))


def _alternate_literal(leaf: Leaf, p: int, rng) -> Leaf:
    # uniform over the 2p - 1 literals other than the current one
    cur = 2 * leaf.var + int(leaf.negated)
    pick = int(rng.integers(2 * p - 1))
    if pick >= cur:
        pick += 1
    return Leaf(pick // 2, bool(pick % 2))


def applicable_moves(tree: Node, nleaves_max: int) -> list[str]:
    nl = leaf_count(tree)
    has_op = nl > 1
    moves = ["alternate_leaf"]
    if has_op:
        moves += ["alternate_operator", "prune_branch", "delete_leaf"]
    if nl < nleaves_max:
        moves += ["grow_branch", "split_leaf"]
    return sorted(moves, key=MOVE_NAMES.index)


def propose_move(tree: Node, p: int, nleaves_max: int, rng) -> Node:
    """Neighbor of ``tree`` under one uniformly drawn applicable move."""
    moves = applicable_moves(tree, nleaves_max)
    move = moves[int(rng.integers(len(moves)))]
    if move == "alternate_leaf":
        path, leaf = _pick(tree_leaves(tree), rng)
        return replace_at(tree, path, _alternate_literal(leaf, p, rng))
    if move == "alternate_operator":
        path, op = _pick(tree_operators(tree), rng)
        flipped = Op(OR if op.kind == AND else AND, op.left, op.right)
        return replace_at(tree, path, flipped)
    if move == "grow_branch":
        path, leaf = _pick(tree_leaves(tree), rng)
        kind = AND if rng.integers(2) == 0 else OR
        return replace_at(tree, path, Op(kind, leaf, _random_leaf(p, rng)))
    if move == "prune_branch":
        path, op = _pick(tree_operators(tree), rng)
        child = op.left if rng.integers(2) == 0 else op.right
        return replace_at(tree, path, child)
    if move == "split_leaf":
        path, _ = _pick(tree_leaves(tree), rng)
        kind = AND if rng.integers(2) == 0 else OR
        return replace_at(tree, path, Op(kind, _random_leaf(p, rng), _random_leaf(p, rng)))
    # delete_leaf: the parent collapses to the sibling
    paths = tree_leaves(tree)
    path, _ = _pick(paths, rng)
    parent_path, side = path[:-1], path[-1]
    parent = tree
    for step in parent_path:
        parent = parent.left if step == 0 else parent.right
    sibling = parent.right if side == 0 else parent.left
    return replace_at(tree, parent_path, sibling)


def _pick(items: list, rng):
    return items[int(rng.integers(len(items)))]


# ---------------------------------------------------------------------------
# scoring and annealing

def _group_counts(vals: np.ndarray, ybool: np.ndarray, n: int, n1: int):
    nt = int(np.count_nonzero(vals))
    nt1 = int(np.count_nonzero(vals & ybool))
    return nt, nt1, n - nt, n1 - nt1


def misclassification(vals: np.ndarray, ybool: np.ndarray, n: int, n1: int) -> int:
    """Errors under majority labels inside the tree-true / tree-false groups."""
    nt, nt1, nf, nf1 = _group_counts(vals, ybool, n, n1)
    return min(nt1, nt - nt1) + min(nf1, nf - nf1)


def _majority_labels(vals, ybool, n, n1):
    # ties: a tree-true group leans 1, a tree-false group leans 0
    nt, nt1, nf, nf1 = _group_counts(vals, ybool, n, n1)
    when_true = 1 if nt1 >= nt - nt1 else 0
    when_false = 1 if nf1 > nf - nf1 else 0
    return when_true, when_false


def tree_score(tree: Node, dataset: Dataset) -> int:
    """Training misclassification count of a tree on a dataset."""
    xbt = np.ascontiguousarray(dataset.x.T >= 1)
    ybool = dataset.y.astype(bool)
    return misclassification(
        eval_tree(tree, xbt), ybool, dataset.n, int(ybool.sum())
    )


def anneal_fit(
    dataset: Dataset, params: AnnealParams, trace: list | None = None
) -> FittedLogicModel:
    """Simulated-annealing fit starting from a random single leaf.

    Moves that do not worsen the score are always accepted; worsening moves
    are accepted with probability exp(-delta / T) under geometric cooling.
    The incumbent is the best tree encountered, with equal scores broken
    toward fewer leaves, so letting the chain keep walking a zero-error
    plateau (``stop_when_perfect=False``) prunes redundant leaves from the
    reported model.  Pass a list as ``trace`` to record the best score
    after every iteration.  Deterministic for a given seed.
    """
    require_two_classes(dataset, "logic-model fitting")
    rng = np.random.default_rng(params.seed)
    return _anneal(dataset, params, rng, trace)


def _anneal(dataset, params, rng, trace=None) -> FittedLogicModel:
    xbt = np.ascontiguousarray(dataset.x.T >= 1)
    ybool = dataset.y.astype(bool)
    n, n1 = dataset.n, int(ybool.sum())

    tree: Node = Leaf(int(rng.integers(dataset.p)), False)
    cur = misclassification(eval_tree(tree, xbt), ybool, n, n1)
    best_tree, best, best_leaves = tree, cur, 1
    t0 = params.t_start if params.t_start is not None else 1.0 + cur / 10.0

    iterations_run = 0
    if not (params.stop_when_perfect and best == 0):
        for it in range(params.iterations):
            iterations_run = it + 1
            temp = t0 * params.cooling ** it
            cand = propose_move(tree, dataset.p, params.nleaves_max, rng)
            s = misclassification(eval_tree(cand, xbt), ybool, n, n1)
            delta = s - cur
            if delta <= 0:
                tree, cur = cand, s
            elif temp > 0.0 and rng.random() < math.exp(-delta / temp):
                tree, cur = cand, s
            if cur <= best:
                nl = leaf_count(tree)
                if cur < best or nl < best_leaves:
                    best_tree, best, best_leaves = tree, cur, nl
            if trace is not None:
                trace.append(best)
            if params.stop_when_perfect and best == 0:
                break

    vals = eval_tree(best_tree, xbt)
    when_true, when_false = _majority_labels(vals, ybool, n, n1)
    return FittedLogicModel(
        tree=best_tree,
        score=best,
        predicted_class_when_true=when_true,
        predicted_class_when_false=when_false,
        dnf=to_dnf(best_tree),
        iterations_run=iterations_run,
    )


# ---------------------------------------------------------------------------
# disjunctive normal form

def _simplify(terms: set) -> set:
    """Drop duplicate terms and terms absorbed by a subset term."""
    out = set()
    for t in sorted(terms, key=len):
        if not any(other <= t for other in out):
            out.add(t)
    return out


def _dnf_sets(node: Node, cap: int) -> set:
    if isinstance(node, Leaf):
        return {frozenset({(node.var, node.negated)})}
    a = _dnf_sets(node.left, cap)
    b = _dnf_sets(node.right, cap)
    if node.kind == OR:
        terms = _simplify(a | b)
    else:
        if len(a) * len(b) > cap:
            raise DnfSizeError(
                f"normal form would exceed the {cap}-term cap "
                f"({len(a)} x {len(b)} products)"
            )
        terms = _simplify({ta | tb for ta in a for tb in b})
    if len(terms) > cap:
        raise DnfSizeError(f"normal form exceeds the {cap}-term cap")
    return terms


def to_dnf(tree: Node, cap: int = DNF_TERM_CAP) -> tuple:
    """Canonical disjunctive normal form of a tree.

    Terms are tuples of (column, negated) literals sorted within the term;
    the terms themselves sort by size then content.  Conjunctions
    distribute over disjunctions, so the term count can blow up
    exponentially; the cap turns that into an explicit error.
    """
    terms = _dnf_sets(tree, cap)
    canon = [tuple(sorted(t)) for t in terms]
    return tuple(sorted(canon, key=lambda t: (len(t), t)))


def eval_terms(dnf, row) -> int:
    """DNF value on one observation row (entries >= 1 count as present)."""
    row = np.asarray(row)
    for term in dnf:
        if all((row[v] >= 1) != neg for v, neg in term):
            return 1
    return 0


def term_to_string(term) -> str:
    return "&".join(("!" if neg else "") + f"X{v + 1}" for v, neg in term)


def dnf_to_string(dnf) -> str:
    """Terms joined by '|', literals by '&', '!' for negation: "X1&X2|!X5&X9"."""
    return "|".join(term_to_string(t) for t in dnf)


def positive_term(columns) -> tuple:
    """Canonical all-positive term over the given columns."""
    return tuple(sorted((int(v), False) for v in columns))


def positive_dnf(model: FittedLogicModel, cap: int = DNF_TERM_CAP) -> tuple:
    """The model's rule for class 1, as a DNF.

    A chain that settles on the complement tree (majority labels swapped)
    is the same classifier, so recovery bookkeeping normalizes to the
    orientation whose truth predicts class 1.
    """
    if model.predicted_class_when_true == 1 or model.predicted_class_when_false == 1:
        tree = (
            model.tree
            if model.predicted_class_when_true == 1
            else negate_tree(model.tree)
        )
        return to_dnf(tree, cap)
    return model.dnf  # constant-0 predictor: nothing indicates class 1


# ---------------------------------------------------------------------------
# bootstrap ensemble

def ensemble_fit(dataset: Dataset, params: AnnealParams, b_boot: int) -> ImportanceReport:
    """Fit ``b_boot`` models on bootstrap resamples and tally inclusion rates.

    Bootstrap b draws its rows and runs its chain from the derived seed
    ``params.seed ^ b``, so reports are reproducible and independent of
    any parallel schedule.
    """
    if b_boot < 1:
        raise ValueError(f"need at least one bootstrap fit, got {b_boot}")
    require_two_classes(dataset, "logic-model fitting")
    var_counts = np.zeros(dataset.p)
    term_counts: dict = {}
    for b in range(b_boot):
        rng = np.random.default_rng(params.seed ^ b)
        idx = rng.integers(0, dataset.n, dataset.n)
        boot = Dataset(dataset.x[idx], dataset.y[idx])
        require_two_classes(boot, "bootstrap logic-model fitting")
        model = _anneal(boot, params, rng)
        for v in tree_variables(model.tree):
            var_counts[v] += 1
        try:
            terms = positive_dnf(model)
        except DnfSizeError:
            terms = model.dnf  # complement form exploded; fall back to the raw tree
        for term in terms:
            term_counts[term] = term_counts.get(term, 0) + 1
    return ImportanceReport(
        variable_frequency=var_counts / b_boot,
        term_frequency={t: c / b_boot for t, c in sorted(term_counts.items())},
        b_boot=b_boot,
    )
