import itertools

import numpy as np
import pytest

from levsel import (
    AnnealParams,
    Dataset,
    DnfSizeError,
    Leaf,
    Op,
    anneal_fit,
    dnf_to_string,
    ensemble_fit,
    eval_tree,
    propose_move,
    to_dnf,
    tree_score,
)
from levsel.logic import (
    AND,
    OR,
    applicable_moves,
    eval_terms,
    eval_tree_row,
    leaf_count,
    positive_term,
    tree_leaves,
    tree_variables,
)


def random_tree(rng, n_vars=4, max_leaves=8):
    nodes = [
        Leaf(int(rng.integers(n_vars)), bool(rng.integers(2)))
        for _ in range(int(rng.integers(1, max_leaves + 1)))
    ]
    while len(nodes) > 1:
        a = nodes.pop(int(rng.integers(len(nodes))))
        b = nodes.pop(int(rng.integers(len(nodes))))
        kind = AND if rng.integers(2) == 0 else OR
        nodes.append(Op(kind, a, b))
    return nodes[0]


def all_assignments(n_vars):
    return np.array(list(itertools.product([0, 1], repeat=n_vars)), dtype=np.int8)


class TestEvalTree:
    def test_single_leaf_and_negation(self):
        row = [1, 0]
        assert eval_tree_row(Leaf(0), row) == 1
        assert eval_tree_row(Leaf(0, negated=True), row) == 0
        assert eval_tree_row(Leaf(1), row) == 0

    def test_and_truth_table(self):
        tree = Op(AND, Leaf(0), Leaf(1))
        rows = all_assignments(2)
        got = eval_tree(tree, np.ascontiguousarray(rows.T >= 1))
        np.testing.assert_array_equal(got, [False, False, False, True])

    def test_or_truth_table(self):
        tree = Op(OR, Leaf(0), Leaf(1))
        rows = all_assignments(2)
        got = eval_tree(tree, np.ascontiguousarray(rows.T >= 1))
        np.testing.assert_array_equal(got, [False, True, True, True])

    def test_matches_dnf_on_all_assignments(self):
        rng = np.random.default_rng(0)
        rows = all_assignments(4)
        for _ in range(200):
            tree = random_tree(rng)
            dnf = to_dnf(tree)
            tree_vals = eval_tree(tree, np.ascontiguousarray(rows.T >= 1))
            for i in range(16):
                assert int(tree_vals[i]) == eval_terms(dnf, rows[i])


class TestProposeMove:
    def test_single_leaf_applicability(self):
        moves = applicable_moves(Leaf(0), nleaves_max=30)
        assert "prune_branch" not in moves
        assert "delete_leaf" not in moves
        assert "alternate_operator" not in moves
        assert {"alternate_leaf", "grow_branch", "split_leaf"} <= set(moves)

    def test_at_leaf_cap_growth_is_blocked(self):
        tree = Op(AND, Leaf(0), Leaf(1))
        moves = applicable_moves(tree, nleaves_max=2)
        assert "grow_branch" not in moves
        assert "split_leaf" not in moves
        assert {"alternate_leaf", "alternate_operator", "prune_branch", "delete_leaf"} == set(moves)

    def test_proposals_preserve_invariants(self):
        rng = np.random.default_rng(1)
        tree = Op(OR, Op(AND, Leaf(0), Leaf(3, True)), Op(AND, Leaf(1), Op(OR, Leaf(2), Leaf(4))))
        assert leaf_count(tree) == 5
        p, cap = 7, 6
        for _ in range(10_000):
            cand = propose_move(tree, p, cap, rng)
            assert 1 <= leaf_count(cand) <= cap
            for _, leaf in tree_leaves(cand):
                assert 0 <= leaf.var < p
                assert isinstance(leaf.negated, bool)

    def test_walk_stays_within_cap(self):
        rng = np.random.default_rng(2)
        tree = Leaf(0)
        for _ in range(3000):
            tree = propose_move(tree, 5, 4, rng)
            assert 1 <= leaf_count(tree) <= 4

    def _reachable(self, src, dst, p, rng, tries=5000):
        for _ in range(tries):
            if propose_move(src, p, 30, rng) == dst:
                return True
        return False

    def test_each_move_has_an_inverse_on_examples(self):
        rng = np.random.default_rng(3)
        p = 3
        # alternate-leaf is its own inverse
        a, b = Leaf(0), Leaf(2, True)
        assert self._reachable(a, b, p, rng)
        assert self._reachable(b, a, p, rng)
        # operator flip is its own inverse
        a = Op(AND, Leaf(0), Leaf(1))
        b = Op(OR, Leaf(0), Leaf(1))
        assert self._reachable(a, b, p, rng)
        assert self._reachable(b, a, p, rng)
        # grow is undone by prune (and by delete)
        a, b = Leaf(0), Op(AND, Leaf(0), Leaf(1))
        assert self._reachable(a, b, p, rng)
        assert self._reachable(b, a, p, rng)
        # split is undone by prune: the right child restores the original leaf
        a, b = Leaf(0), Op(OR, Leaf(1, True), Leaf(0))
        assert self._reachable(a, b, p, rng)
        assert self._reachable(b, a, p, rng)


class TestToDnf:
    def test_distribution_law(self):
        tree = Op(AND, Op(OR, Leaf(0), Leaf(1)), Leaf(2))
        assert to_dnf(tree) == (
            ((0, False), (2, False)),
            ((1, False), (2, False)),
        )

    def test_single_leaf(self):
        assert to_dnf(Leaf(4, True)) == (((4, True),),)

    def test_duplicate_terms_are_merged(self):
        tree = Op(OR, Op(AND, Leaf(0), Leaf(1)), Op(AND, Leaf(1), Leaf(0)))
        assert to_dnf(tree) == (((0, False), (1, False)),)

    def test_absorption(self):
        # a | (a & b) collapses to a
        tree = Op(OR, Leaf(0), Op(AND, Leaf(0), Leaf(1)))
        assert to_dnf(tree) == (((0, False),),)

    def test_term_cap_overflow_names_the_cap(self):
        # an AND of 13 distinct OR pairs wants 2^13 = 8192 terms
        pairs = [Op(OR, Leaf(2 * j), Leaf(2 * j + 1)) for j in range(13)]
        tree = pairs[0]
        for node in pairs[1:]:
            tree = Op(AND, tree, node)
        with pytest.raises(DnfSizeError, match="4096"):
            to_dnf(tree)

    def test_string_form(self):
        tree = Op(OR, Op(AND, Leaf(0), Leaf(1)), Op(AND, Leaf(4, True), Leaf(8)))
        assert dnf_to_string(to_dnf(tree)) == "X1&X2|!X5&X9"


def planted_dataset(rng, p, n, dnf, probs):
    x = (rng.random((n, p)) < probs).astype(np.int8)
    y = np.zeros(n, dtype=np.int8)
    for term in dnf:
        y |= x[:, list(term)].all(axis=1)
    return Dataset(x, y)


class TestAnnealFit:
    def test_recovers_planted_single_leaf(self):
        rng = np.random.default_rng(4)
        probs = np.full(20, 0.5)
        ds = planted_dataset(rng, 20, 100, ((7,),), probs)
        for seed in (0, 1, 2):
            model = anneal_fit(ds, AnnealParams(iterations=20_000, seed=seed))
            # perfect trees may carry redundant leaves (ties are not
            # size-broken) and may use the negated leaf with swapped labels
            assert model.score == 0
            assert 7 in tree_variables(model.tree)
            np.testing.assert_array_equal(model.predict(ds.x), ds.y)

    def test_recovers_planted_and_pair(self):
        rng = np.random.default_rng(5)
        probs = np.full(50, 0.5)
        probs[:2] = 2.0 ** -0.5  # balanced prevalence for the pair
        ds = planted_dataset(rng, 50, 200, ((0, 1),), probs)
        model = anneal_fit(ds, AnnealParams(iterations=100_000, seed=0))
        assert model.score == 0
        np.testing.assert_array_equal(model.predict(ds.x), ds.y)

    def test_score_matches_recount(self):
        rng = np.random.default_rng(6)
        probs = np.full(15, 0.5)
        ds = planted_dataset(rng, 15, 80, ((0, 1), (4,)), probs)
        model = anneal_fit(ds, AnnealParams(iterations=3000, seed=7, stop_when_perfect=False))
        assert model.score == tree_score(model.tree, ds)

    def test_seeded_determinism(self):
        rng = np.random.default_rng(7)
        probs = np.full(12, 0.5)
        ds = planted_dataset(rng, 12, 60, ((2, 3),), probs)
        params = AnnealParams(iterations=2000, seed=99)
        a = anneal_fit(ds, params)
        b = anneal_fit(ds, params)
        assert a.tree == b.tree
        assert a.score == b.score
        assert a.iterations_run == b.iterations_run

    def test_trace_is_non_increasing(self):
        rng = np.random.default_rng(8)
        probs = np.full(10, 0.5)
        ds = planted_dataset(rng, 10, 50, ((0, 1),), probs)
        trace: list = []
        anneal_fit(ds, AnnealParams(iterations=2000, seed=1, stop_when_perfect=False), trace=trace)
        assert trace == sorted(trace, reverse=True)

    def test_early_stop_records_iterations(self):
        rng = np.random.default_rng(9)
        probs = np.full(8, 0.5)
        ds = planted_dataset(rng, 8, 40, ((3,),), probs)
        model = anneal_fit(ds, AnnealParams(iterations=50_000, seed=2))
        assert model.score == 0
        assert model.iterations_run < 50_000

    def test_constant_response_rejected(self):
        ds = Dataset(np.array([[1, 0], [0, 1]]), np.array([1, 1]))
        with pytest.raises(ValueError, match="both classes"):
            anneal_fit(ds, AnnealParams(iterations=10))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            AnnealParams(iterations=0)
        with pytest.raises(ValueError):
            AnnealParams(cooling=1.0)
        with pytest.raises(ValueError):
            AnnealParams(nleaves_max=0)


class TestEnsembleFit:
    def test_single_bootstrap_gives_binary_frequencies(self):
        rng = np.random.default_rng(10)
        probs = np.full(10, 0.5)
        ds = planted_dataset(rng, 10, 60, ((4,),), probs)
        imp = ensemble_fit(ds, AnnealParams(iterations=5000, seed=3), b_boot=1)
        assert set(np.unique(imp.variable_frequency)) <= {0.0, 1.0}
        assert all(f in (0.0, 1.0) for f in imp.term_frequency.values())

    def test_planted_leaf_dominates(self):
        rng = np.random.default_rng(11)
        probs = np.full(15, 0.5)
        ds = planted_dataset(rng, 15, 80, ((6,),), probs)
        imp = ensemble_fit(ds, AnnealParams(iterations=10_000, seed=4), b_boot=10)
        assert imp.variable_frequency[6] >= 0.9
        # every singleton term over the planted column counts, either polarity
        singleton = sum(
            f for t, f in imp.term_frequency.items() if len(t) == 1 and t[0][0] == 6
        )
        assert singleton >= 0.9

    def test_absent_variables_have_zero_frequency(self):
        rng = np.random.default_rng(12)
        probs = np.full(10, 0.5)
        ds = planted_dataset(rng, 10, 60, ((0,),), probs)
        imp = ensemble_fit(ds, AnnealParams(iterations=5000, seed=5), b_boot=5)
        used = set()
        for term in imp.term_frequency:
            used |= {v for v, _ in term}
        for j in range(10):
            if imp.variable_frequency[j] == 0.0:
                assert j not in used or imp.variable_frequency[j] > 0

    def test_deterministic(self):
        rng = np.random.default_rng(13)
        probs = np.full(8, 0.5)
        ds = planted_dataset(rng, 8, 40, ((1,),), probs)
        params = AnnealParams(iterations=2000, seed=6)
        a = ensemble_fit(ds, params, b_boot=4)
        b = ensemble_fit(ds, params, b_boot=4)
        np.testing.assert_array_equal(a.variable_frequency, b.variable_frequency)
        assert a.term_frequency == b.term_frequency

    def test_rejects_zero_bootstraps(self):
        rng = np.random.default_rng(14)
        probs = np.full(8, 0.5)
        ds = planted_dataset(rng, 8, 40, ((1,),), probs)
        with pytest.raises(ValueError):
            ensemble_fit(ds, AnnealParams(iterations=10), b_boot=0)
