"""Cut elimination as a proof transformation.

The transformer always reduces a topmost cut, one whose two premises are
already cut-free, and recurses.  A cut of ``Delta |- A`` into ``Gamma[A] |- C``
is reduced by the first case that applies:

1. either premise is an identity axiom;
2. A is passive in the last rule of the left premise: the cut moves up
   into the premise that carries A;
3. the occurrence of A is passive in the last rule of the right premise:
   the cut moves up into the premise (or premises) holding it;
4. A is principal on both sides and is not banged: the cut is replaced by
   cuts on the immediate subformulas (for 1 it disappears);
5. A = !X and the left premise ends in a promotion: every occurrence of !X
   that descends from the cut formula is followed up the right proof and
   replaced by Delta, patching the places where those occurrences are
   introduced (identity, weakening, dereliction, promotion).

Every reduction step only ever calls itself on cuts with a smaller
``CutMeasure``: a smaller cut formula, or the same formula with fewer rule
applications in the two premises.

Positions of the rebuilt inferences are not computed by hand.  After the
premises of a rewritten node are known, the matching instance of the same
rule is looked up among the backward candidates of the new conclusion.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .calculus import (
    BANG_RIGHT, Position, Proof, Rule, SystemConfig, _Bad, _expected, active_rules,
    has_cut, iter_candidates,
)
from .core import (
    EMPTY, Bang, LImpl, Leaf, Node, One, RImpl, Sequent, Structure, Tensor, Var,
    context_at, leaf_paths, replace_at, subtree_at,
)

__all__ = ["CutMeasure", "CutEliminationError", "eliminate_cut", "has_cut", "make_cut"]

_LEFT_RULES = frozenset({
    Rule.TensorL, Rule.UnitL, Rule.RImplL, Rule.LImplL, Rule.BangL, Rule.W, Rule.C, Rule.CK,
})
_MARK = Var("_cut_hole")
_BANG_MARK = Bang(_MARK)


class CutEliminationError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class CutMeasure:
    kappa: int
    delta: int


def measure(left: Proof, right: Proof) -> CutMeasure:
    return CutMeasure(left.conclusion.succedent.size, left.size + right.size)


def make_cut(left: Proof, right: Proof, path) -> Proof:
    """The cut of ``left`` into the leaf at ``path`` of ``right``."""
    path = tuple(path)
    ctx = context_at(right.conclusion.antecedent, path)
    concl = Sequent(ctx.plug(left.conclusion.antecedent), right.conclusion.succedent)
    return Proof(concl, Rule.Cut, (left, right), Position(path))


def _find(s: Structure, f) -> list:
    return [p for p, g in leaf_paths(s) if g is f]


def _substitute(s: Structure, f, new: Structure) -> Structure:
    """Replace every leaf ``f`` of ``s`` by ``new``."""
    if isinstance(s, Node):
        left = _substitute(s.left, f, new)
        return Node(left, _substitute(s.right, f, new))
    if isinstance(s, Leaf) and s.formula is f:
        return new
    return s


def _mark(s: Structure, paths, marker) -> Structure:
    for p in paths:
        s = replace_at(s, p, Leaf(marker))
    return s


def _schema(concl: Sequent, rule: Rule, position: Position) -> Optional[tuple]:
    try:
        return _expected(Proof(concl, rule, (), position))
    except _Bad:
        return None


class _Eliminator:
    def __init__(self, config: SystemConfig, check_measure: bool = True):
        self.config = config
        self.rules = active_rules(config)
        self.check_measure = check_measure
        self.steps = 0
        self._stack: list = []

    # ------------------------------------------------------------- helpers

    def rebuild(self, concl: Sequent, rules, premises) -> Proof:
        """An instance of one of ``rules`` with the given premises."""
        want = tuple(p.conclusion for p in premises)
        if len(premises) == 1 and want[0] is concl:
            return premises[0]
        for rule, pos, prems in iter_candidates(concl, self.config, frozenset(rules) & self.rules):
            if prems == want:
                return Proof(concl, rule, tuple(premises), pos)
        raise CutEliminationError(
            f"no {'/'.join(r.value for r in rules)} step from "
            f"{', '.join(map(str, want))} to {concl}")

    def weaken(self, proof: Proof, shape: Structure, marker, delta: Structure) -> Proof:
        """From ``shape[marker := ()]`` derive ``shape[marker := delta]`` by
        weakening the leaves of delta one at a time."""
        parts = [delta]
        while parts[-1] is not EMPTY:
            parts.append(replace_at(parts[-1], next(leaf_paths(parts[-1]))[0], EMPTY))
        out = proof
        succ = proof.conclusion.succedent
        for d in reversed(parts[:-1]):
            concl = Sequent(_substitute(shape, marker, d), succ)
            out = self.rebuild(concl, {Rule.W}, (out,))
        return out

    # ---------------------------------------------------------- main entry

    def eliminate(self, p: Proof) -> Proof:
        if not has_cut(p):
            return p
        prems = tuple(self.eliminate(q) for q in p.premises)
        if p.rule is Rule.Cut:
            return self.reduce(prems[0], prems[1], p.position.path)
        return Proof(p.conclusion, p.rule, prems, p.position)

    def reduce(self, left: Proof, right: Proof, path) -> Proof:
        path = tuple(path)
        m = measure(left, right)
        if self.check_measure and self._stack:
            assert m < self._stack[-1], (m, self._stack[-1])
        self._stack.append(m)
        try:
            self.steps += 1
            out = self._reduce(left, right, path)
        finally:
            self._stack.pop()
        target = make_cut(left, right, path).conclusion
        if out.conclusion is not target:
            raise CutEliminationError(f"reduction changed the conclusion: {out.conclusion} vs {target}")
        return out

    def _reduce(self, left: Proof, right: Proof, path) -> Proof:
        a = left.conclusion.succedent
        delta = left.conclusion.antecedent
        gamma = right.conclusion.antecedent

        # 1. identity axioms
        if left.rule is Rule.Init:
            return right
        if right.rule is Rule.Init:
            return left

        # 2. A passive on the left
        if left.rule in _LEFT_RULES:
            major = len(left.premises) - 1
            new = list(left.premises)
            new[major] = self.reduce(left.premises[major], right, path)
            concl = make_cut(left, right, path).conclusion
            return self.rebuild(concl, {left.rule}, new)

        # 3. the occurrence is passive on the right
        marked = Sequent(replace_at(gamma, path, Leaf(_MARK)), right.conclusion.succedent)
        want = _schema(marked, right.rule, right.position)
        if want is not None:
            new = []
            for q, w in zip(right.premises, want):
                holes = _find(w.antecedent, _MARK)
                if holes:
                    (h,) = holes
                    new.append(self.reduce(left, q, h))
                else:
                    new.append(q)
            concl = Sequent(_substitute(marked.antecedent, _MARK, delta), marked.succedent)
            return self.rebuild(concl, {right.rule}, new)

        # 4. principal logical cuts
        if not isinstance(a, Bang):
            return self.principal(left, right, path)

        # 5. exponential cut
        if left.rule not in BANG_RIGHT:
            raise CutEliminationError(f"unexpected left rule {left.rule} for {a}")
        return self.exponential(left, right, path)

    # ------------------------------------------------------ principal cases

    def principal(self, left: Proof, right: Proof, path) -> Proof:
        a = left.conclusion.succedent
        gamma = right.conclusion.antecedent
        succ = right.conclusion.succedent
        ctx = context_at(gamma, path)

        if isinstance(a, Tensor):
            assert left.rule is Rule.TensorR and right.rule is Rule.TensorL
            l1, l2 = left.premises
            (r,) = right.premises
            inner = self.reduce(l2, r, path + (1,))
            shape = ctx.plug(Node(Leaf(_MARK), l2.conclusion.antecedent))
            (h,) = _find(shape, _MARK)
            return self.reduce(l1, inner, h)

        if isinstance(a, One):
            assert right.rule is Rule.UnitL
            return right.premises[0]

        if isinstance(a, (RImpl, LImpl)):
            assert left.rule in (Rule.RImplR, Rule.LImplR)
            assert right.rule in (Rule.RImplL, Rule.LImplL)
            (l,) = left.premises
            minor, major = right.premises
            q = right.position.path
            # the body of the implication is cut into the major premise first
            inner = self.reduce(l, major, q)
            delta = left.conclusion.antecedent
            if isinstance(a, RImpl):
                hole_shape = Node(Leaf(_MARK), delta)
            else:
                hole_shape = Node(delta, Leaf(_MARK))
            shape = context_at(major.conclusion.antecedent, q).plug(hole_shape)
            (h,) = _find(shape, _MARK)
            return self.reduce(minor, inner, h)

        raise CutEliminationError(f"no principal reduction for {left.rule} / {right.rule} on {a}")

    # ---------------------------------------------------- exponential case

    def exponential(self, left: Proof, right: Proof, path) -> Proof:
        self._left = getattr(self, "_left", None)
        saved = self._left
        self._left = left
        try:
            return self.track(right, (path,))
        finally:
            self._left = saved

    def _dereliction_proof(self, left: Proof) -> Proof:
        """``Delta |- X`` from a promotion ``Delta |- !X``."""
        (prem,) = left.premises
        target = left.conclusion.antecedent
        out = prem
        # undo the stripping leaf by leaf, left to right
        cur = prem.conclusion.antecedent
        tl = [f for _, f in leaf_paths(target)]
        paths = [p for p, _ in leaf_paths(cur)]
        for p, f in zip(paths, tl):
            if subtree_at(cur, p).formula is f:
                continue
            cur = replace_at(cur, p, Leaf(f))
            out = self.rebuild(Sequent(cur, prem.conclusion.succedent), {Rule.BangL}, (out,))
        assert cur is target
        return out

    def track(self, proof: Proof, tracked) -> Proof:
        """Replace the tracked occurrences of ``!X`` in the antecedent of
        ``proof`` by Delta (the left premise's antecedent)."""
        left = self._left
        delta = left.conclusion.antecedent
        concl = proof.conclusion
        if not tracked:
            return proof
        if proof.rule is Rule.Init:
            return left

        marked = Sequent(_mark(concl.antecedent, tracked, _BANG_MARK), concl.succedent)
        new_concl = Sequent(_substitute(marked.antecedent, _BANG_MARK, delta), concl.succedent)
        want = _schema(marked, proof.rule, proof.position)
        if want is None:
            raise CutEliminationError(f"cannot follow the cut formula through {proof.rule}")

        new_prems = []
        for q, w in zip(proof.premises, want):
            # occurrences still banged are followed further up
            sub = self.track(q, _find(w.antecedent, _BANG_MARK))
            shape = _substitute(w.antecedent, _BANG_MARK, delta)
            # occurrences that lost their bang here meet the cut's premise
            while True:
                holes = _find(shape, _MARK)
                if not holes:
                    break
                h = holes[0]
                if proof.rule is Rule.BangL:
                    d = self._dereliction_proof(left)
                else:
                    (d,) = left.premises
                shape = context_at(shape, h).plug(d.conclusion.antecedent)
                sub = self.reduce(d, sub, h)
            new_prems.append(sub)

        if proof.rule is Rule.W and proof.position.path in tracked:
            (sub,) = new_prems
            wmark = Bang(Var("_weakened"))
            shape = replace_at(concl.antecedent, proof.position.path, Leaf(wmark))
            others = [t for t in tracked if t != proof.position.path]
            shape = _substitute(_mark(shape, others, _BANG_MARK), _BANG_MARK, delta)
            return self.weaken(sub, shape, wmark, delta)

        rules = {proof.rule}
        if proof.rule in (Rule.C, Rule.CK):
            rules = {Rule.C, Rule.CK}
        elif proof.rule in BANG_RIGHT:
            rules = set(BANG_RIGHT)
        elif proof.rule is Rule.BangL:
            rules = {Rule.BangL}
        return self.rebuild(new_concl, rules, new_prems)


def eliminate_cut(p: Proof, config: SystemConfig, check_measure: bool = True) -> Proof:
    """A cut-free proof of the same conclusion."""
    return _Eliminator(config, check_measure).eliminate(p)
