import itertools

import pytest

from macll.chart import BangInputError, ChartDecider, closure_of, closure_set, decide_macll_phi, saturate
from macll.core import EMPTY, ONE, Interner, Leaf, Node, Sequent, Tensor, Var, parse_formula, parse_sequent, tau_sequent, var
from oracles import forward_closure

a, b = Var("a"), Var("b")
p0 = var(0)


def restricted(closure):
    fs = list(closure)
    for c in fs:
        yield Sequent(EMPTY, c)
        for x in fs:
            yield Sequent(Leaf(x), c)
            for y in fs:
                yield Sequent(Node(Leaf(x), Leaf(y)), c)


class TestClosure:
    def test_tensor_goal(self):
        assert set(closure_set(parse_sequent("(a, b) |- a * b"))) == {a, b, Tensor(a, b), ONE}

    def test_axiom_formulas_included(self):
        ax = Sequent(Leaf(p0), ONE)
        assert set(closure_set(Sequent(Leaf(p0), ONE), [ax])) == {p0, ONE}

    def test_translated_contraction_goal(self):
        i = Interner()
        t = tau_sequent(parse_sequent("!a |- !a * !a"), i)
        assert set(closure_set(t)) == {p0, Tensor(p0, p0), ONE}

    def test_bang_rejected(self):
        with pytest.raises(BangInputError):
            closure_set(parse_sequent("!a |- a"))


class TestSaturate:
    def test_tensor_order_matters(self):
        ch = saturate(closure_set(parse_sequent("(a, b) |- a * b")))
        assert ch.contains(parse_sequent("(a, b) |- a * b"))
        assert ch.contains(parse_sequent("a * b |- a * b"))
        assert not ch.contains(parse_sequent("(b, a) |- a * b"))

    def test_unit_items(self):
        ch = saturate(closure_of([a]))
        assert ch.contains(parse_sequent("(a, 1) |- a"))
        assert ch.contains(parse_sequent("(1, a) |- a"))
        assert ch.contains(Sequent(EMPTY, ONE))

    def test_contraction_axiom(self):
        ax = Sequent(Leaf(p0), Tensor(p0, p0))
        ch = saturate(closure_of([p0, Tensor(p0, p0)], [ax]), [ax])
        assert ch.contains(ax)
        assert not ch.contains(Sequent(Leaf(Tensor(p0, p0)), p0))

    def test_items_roundtrip(self):
        ch = saturate(closure_set(parse_sequent("(a, a \\ b) |- b / a")))
        assert all(ch.contains(s) for s in ch.items())
        assert len(ch.items()) == len(ch) <= ch.bound

    @pytest.mark.parametrize("goal, axioms", [
        ("(a, a \\ b) |- b", []),
        ("(b / a, a) |- b * 1", []),
        ("a * (a \\ b) |- (b / b) \\ b", []),
        ("(p0, p1) |- p1 * p1", ["p0 |- p0 * p0", "p0 |- p1"]),
        ("p0 |- (p1 / p0) \\ 1", ["p0 |- 1", "p0 |- p2"]),
        ("p2 |- p1 \\ (p1 * p3)", ["p2 |- p3", "p0 |- p0 * p0"]),
    ])
    def test_agrees_with_forward_engine(self, goal, axioms):
        axs = [parse_sequent(x) for x in axioms]
        closure = closure_set(parse_sequent(goal), axs)
        ch = saturate(closure, axs)
        brute = forward_closure(closure, axs, max_leaves=4)
        for s in restricted(closure):
            assert ch.contains(s) == (s in brute), s


class TestDecide:
    def test_examples(self):
        assert decide_macll_phi(parse_sequent("(a, b) |- a * b"))
        assert not decide_macll_phi(parse_sequent("(a, b) |- b * a"))
        ax = Sequent(Leaf(p0), Tensor(p0, p0))
        assert decide_macll_phi(ax, [ax])
        assert not decide_macll_phi(ax, [])

    def test_labels_certificate(self):
        g = parse_sequent("((a, a \\ b), b \\ a) |- a")
        d = decide_macll_phi(g)
        assert d and a in d.labels[g.antecedent]
        assert b in d.labels[g.antecedent.left]

    def test_nonassociative(self):
        assert decide_macll_phi(parse_sequent("((a, b), c) |- (a * b) * c"))
        assert not decide_macll_phi(parse_sequent("((a, b), c) |- a * (b * c)"))

    def test_decider_batches_and_caches(self):
        dec = ChartDecider()
        goals = [parse_sequent("(a, b) |- a * b"), parse_sequent("(b, a) |- a * b")]
        assert dec(goals, frozenset()) == [True, False]
        dec(goals, frozenset())
        assert dec.saturations == 1

    def test_bound_on_all_small_closures(self):
        fs = [parse_formula(x) for x in ("a", "b", "a \\ b", "b / a", "a * b", "(a * b) \\ a", "1")]
        for k in (1, 2, 3):
            for combo in itertools.combinations(fs, k):
                ch = saturate(closure_of(combo))
                assert len(ch) <= ch.bound
