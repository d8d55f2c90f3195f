"""Polynomial decision for MacLL with finitely many single-antecedent axioms.

Everything happens over a finite subformula-closed *closure set*.  A chart
holds the derivable restricted sequents ``() |- C``, ``A |- C`` and
``(A, B) |- C`` with all formulas in the closure; it is computed by
worklist saturation under the restricted rules below.  An arbitrary goal
is then decided by a bottom-up pass over its antecedent tree, labelling
every subtree with the formulas it derives.

Restricted rules (X ranges over the empty antecedent and single formulas):

* identity ``A |- A``; every axiom; ``() |- 1``
* unit: ``() |- C`` gives ``1 |- C``; ``A |- C`` gives ``(A, 1) |- C`` and
  ``(1, A) |- C``
* tensor: ``(A, B) |- C`` gives ``A*B |- C``; ``X |- C`` and ``Y |- D`` give
  ``(X, Y) |- C*D``
* implications, right: ``(A, D) |- B`` gives ``D |- A\\B`` and ``A |- B``
  gives ``() |- A\\B``; mirrored for ``/``
* implications, left: ``X |- A`` and ``B |- C`` give ``(X, A\\B) |- C`` and
  ``(B/A, X) |- C``
* cut: an item with succedent A replaces a leaf A of another item whenever
  the result is again restricted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (
    EMPTY, ONE, Bang, Formula, Leaf, LImpl, Node, RImpl, Sequent, Structure,
    Tensor, leaves, sbf_all, sort_key,
)

__all__ = [
    "ClosureSet", "Chart", "Decision", "closure_set", "closure_of", "saturate",
    "decide_macll_phi", "ChartDecider",
]


class BangInputError(ValueError):
    pass


@dataclass(frozen=True)
class ClosureSet:
    formulas: tuple

    def __post_init__(self):
        object.__setattr__(self, "_ids", {f: i for i, f in enumerate(self.formulas)})

    def id(self, f: Formula) -> int:
        return self._ids[f]

    def __contains__(self, f):
        return f in self._ids

    def __len__(self):
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)


def _axiom_formulas(axioms) -> list:
    out = []
    for ax in axioms:
        out.extend(leaves(ax.antecedent))
        out.append(ax.succedent)
    return out


def closure_of(formulas: Iterable[Formula], axioms=()) -> ClosureSet:
    fs = list(formulas) + _axiom_formulas(axioms) + [ONE]
    for f in fs:
        if not f.pure:
            raise BangInputError(f"closure sets are bang-free, got {f}")
    return ClosureSet(tuple(sorted(sbf_all(fs), key=sort_key)))


def closure_set(goal: Sequent, axioms=()) -> ClosureSet:
    return closure_of(leaves(goal.antecedent) + [goal.succedent], axioms)


class Chart:
    """Saturated restricted sequents over one closure set (read-only)."""

    def __init__(self, closure: ClosureSet, axioms, empty, single, pair, rounds):
        self.closure = closure
        self.axioms = frozenset(axioms)
        self.empty = empty        # set of c         : () |- c
        self.single = single      # set of (a, c)    : a |- c
        self.pair = pair          # set of (a, b, c) : (a, b) |- c
        self.rounds = rounds
        self._by_ante: dict = {}
        for a, c in single:
            self._by_ante.setdefault(a, set()).add(c)
        self._by_pair: dict = {}
        for a, b, c in pair:
            self._by_pair.setdefault((a, b), set()).add(c)

    def __len__(self):
        return len(self.empty) + len(self.single) + len(self.pair)

    @property
    def bound(self) -> int:
        m = len(self.closure)
        return m + m * m + m ** 3

    def labels_single(self, a: int) -> set:
        return self._by_ante.get(a, set())

    def labels_pair(self, a: int, b: int) -> set:
        return self._by_pair.get((a, b), set())

    def items(self) -> list:
        """The chart as sequents, in a stable order."""
        fs = self.closure.formulas
        out = [Sequent(EMPTY, fs[c]) for c in sorted(self.empty)]
        out += [Sequent(fs[a], fs[c]) for a, c in sorted(self.single)]
        out += [Sequent(Node(Leaf(fs[a]), Leaf(fs[b])), fs[c]) for a, b, c in sorted(self.pair)]
        return out

    def contains(self, s: Sequent) -> bool:
        """Membership of a restricted sequent."""
        ids = self.closure._ids
        g = s.antecedent
        c = ids.get(s.succedent)
        if c is None:
            return False
        if g.nleaves == 0:
            return c in self.empty
        if isinstance(g, Leaf):
            a = ids.get(g.formula)
            return a is not None and (a, c) in self.single
        if g.nleaves == 2:
            a, b = ids.get(g.left.formula), ids.get(g.right.formula)
            return a is not None and b is not None and (a, b, c) in self.pair
        raise ValueError("not a restricted sequent")

    def label(self, g: Structure) -> Optional[frozenset]:
        """Closure ids D with ``g |- D`` derivable, or None if a leaf of g is
        outside the closure."""
        ids = self.closure._ids
        memo = {}

        def go(t):
            got = memo.get(t)
            if got is not None:
                return got
            if t.nleaves == 0:
                r = frozenset(self.empty)
            elif isinstance(t, Leaf):
                a = ids.get(t.formula)
                if a is None:
                    raise KeyError(t.formula)
                r = frozenset(self._by_ante.get(a, ()))
            else:
                left, right = go(t.left), go(t.right)
                acc = set()
                for a in left:
                    for b in right:
                        cs = self._by_pair.get((a, b))
                        if cs:
                            acc |= cs
                r = frozenset(acc)
            memo[t] = r
            return r

        try:
            return go(g)
        except KeyError:
            return None

    def proves(self, s: Sequent) -> bool:
        c = self.closure._ids.get(s.succedent)
        if c is None:
            return False
        lab = self.label(s.antecedent)
        return lab is not None and c in lab


def saturate(closure: ClosureSet, axioms=()) -> Chart:
    fs = closure.formulas
    ids = closure._ids
    m = len(fs)
    one = ids[ONE]

    tensor_by_left = [[] for _ in range(m)]
    tensor_by_right = [[] for _ in range(m)]
    rimpl_by_arg = [[] for _ in range(m)]    # a -> [(b, a\b)]
    rimpl_by_res = [[] for _ in range(m)]    # b -> [(a, a\b)]
    limpl_by_arg = [[] for _ in range(m)]    # a -> [(b, b/a)]
    limpl_by_res = [[] for _ in range(m)]    # b -> [(a, b/a)]
    rimpl_id = {}
    limpl_id = {}
    tensor_id = {}
    for i, f in enumerate(fs):
        if isinstance(f, Tensor):
            a, b = ids[f.left], ids[f.right]
            tensor_by_left[a].append((b, i))
            tensor_by_right[b].append((a, i))
            tensor_id[(a, b)] = i
        elif isinstance(f, RImpl):
            a, b = ids[f.arg], ids[f.result]
            rimpl_by_arg[a].append((b, i))
            rimpl_by_res[b].append((a, i))
            rimpl_id[(a, b)] = i
        elif isinstance(f, LImpl):
            a, b = ids[f.arg], ids[f.result]
            limpl_by_arg[a].append((b, i))
            limpl_by_res[b].append((a, i))
            limpl_id[(a, b)] = i
        elif isinstance(f, Bang):
            raise BangInputError(f"closure sets are bang-free, got {f}")

    E: set = set()
    U: set = set()
    P: set = set()
    small_by_succ = [[] for _ in range(m)]   # c -> [X]; X = -1 for ()
    pair_by_succ = [[] for _ in range(m)]    # c -> [(a, b)]
    u_by_ante = [[] for _ in range(m)]       # a -> [c]
    p_by_left = [[] for _ in range(m)]       # a -> [(b, c)]
    p_by_right = [[] for _ in range(m)]      # b -> [(a, c)]
    work = []

    def add_e(c):
        if c not in E:
            E.add(c)
            small_by_succ[c].append(-1)
            work.append((0, c))

    def add_u(a, c):
        k = (a, c)
        if k not in U:
            U.add(k)
            small_by_succ[c].append(a)
            u_by_ante[a].append(c)
            work.append((1, a, c))

    def add_p(a, b, c):
        k = (a, b, c)
        if k not in P:
            P.add(k)
            pair_by_succ[c].append((a, b))
            p_by_left[a].append((b, c))
            p_by_right[b].append((a, c))
            work.append((2, a, b, c))

    def add_join(x, y, c):
        if x < 0:
            if y < 0:
                add_e(c)
            else:
                add_u(y, c)
        elif y < 0:
            add_u(x, c)
        else:
            add_p(x, y, c)

    for i in range(m):
        add_u(i, i)
    for ax in axioms:
        g = ax.antecedent
        c = ids[ax.succedent]
        if g.nleaves == 0:
            add_e(c)
        elif isinstance(g, Leaf):
            add_u(ids[g.formula], c)
        elif g.nleaves == 2:
            add_p(ids[g.left.formula], ids[g.right.formula], c)
        else:
            raise ValueError(f"axiom {ax} is not restricted")
    add_e(one)

    rounds = 0
    while work:
        rounds += 1
        item = work.pop()
        kind = item[0]
        if kind == 0:
            c = item[1]
            # X = () as an item "() |- c"
            add_u(one, c)
            for d, t in tensor_by_left[c]:
                for y in list(small_by_succ[d]):
                    add_join(-1, y, t)
            for a2, t in tensor_by_right[c]:
                for x in list(small_by_succ[a2]):
                    add_join(x, -1, t)
            for b, imp in rimpl_by_arg[c]:
                for cc in list(u_by_ante[b]):
                    add_u(imp, cc)
            for b, imp in limpl_by_arg[c]:
                for cc in list(u_by_ante[b]):
                    add_u(imp, cc)
            for cc in list(u_by_ante[c]):
                add_e(cc)
            for b, cc in list(p_by_left[c]):
                add_u(b, cc)
            for a2, cc in list(p_by_right[c]):
                add_u(a2, cc)
        elif kind == 1:
            _, a, c = item
            add_p(a, one, c)
            add_p(one, a, c)
            for d, t in tensor_by_left[c]:
                for y in list(small_by_succ[d]):
                    add_join(a, y, t)
            for a2, t in tensor_by_right[c]:
                for x in list(small_by_succ[a2]):
                    add_join(x, a, t)
            i = rimpl_id.get((a, c))
            if i is not None:
                add_e(i)
            i = limpl_id.get((a, c))
            if i is not None:
                add_e(i)
            # a |- c as the minor premise X |- A of a left rule
            for b, imp in rimpl_by_arg[c]:
                for cc in list(u_by_ante[b]):
                    add_p(a, imp, cc)
            for b, imp in limpl_by_arg[c]:
                for cc in list(u_by_ante[b]):
                    add_p(imp, a, cc)
            # a |- c as the major premise B |- C of a left rule
            for a2, imp in rimpl_by_res[a]:
                for x in list(small_by_succ[a2]):
                    add_join(x, imp, c)
            for a2, imp in limpl_by_res[a]:
                for x in list(small_by_succ[a2]):
                    add_join(imp, x, c)
            # cut a |- c into hosts containing c
            for cc in list(u_by_ante[c]):
                add_u(a, cc)
            for b, cc in list(p_by_left[c]):
                add_p(a, b, cc)
            for a2, cc in list(p_by_right[c]):
                add_p(a2, a, cc)
            # cut anything with succedent a into the host a |- c
            for x in list(small_by_succ[a]):
                add_join(x, -1, c) if x >= 0 else add_e(c)
            for x, y in list(pair_by_succ[a]):
                add_p(x, y, c)
        else:
            _, a, b, c = item
            t = tensor_id.get((a, b))
            if t is not None:
                add_u(t, c)
            i = rimpl_id.get((a, c))
            if i is not None:
                add_u(b, i)
            i = limpl_id.get((b, c))
            if i is not None:
                add_u(a, i)
            for cc in list(u_by_ante[c]):
                add_p(a, b, cc)
            for x in list(small_by_succ[a]):
                add_join(x, b, c)
            for x in list(small_by_succ[b]):
                add_join(a, x, c)

    chart = Chart(closure, axioms, E, U, P, rounds)
    assert len(chart) <= chart.bound
    return chart


@dataclass
class Decision:
    provable: bool
    labels: dict = field(default_factory=dict)   # subtree -> derivable formulas
    chart: Optional[Chart] = None

    def __bool__(self):
        return self.provable


def _check_pure(goal: Sequent):
    if not goal.pure:
        raise BangInputError(f"goal must be bang-free: {goal}")


def decide_macll_phi(goal: Sequent, axioms=(), chart: Optional[Chart] = None) -> Decision:
    """Decide MacLL plus ``axioms`` for a bang-free goal."""
    _check_pure(goal)
    if chart is None:
        chart = saturate(closure_set(goal, axioms), axioms)
    fs = chart.closure.formulas
    labels = {}

    def go(t):
        if t in labels:
            return labels[t]
        lab = chart.label(t)
        labels[t] = frozenset(fs[i] for i in lab) if lab is not None else frozenset()
        if isinstance(t, Node):
            go(t.left)
            go(t.right)
        return labels[t]

    root = go(goal.antecedent)
    return Decision(goal.succedent in root, labels, chart)


class ChartDecider:
    """Batch MacLL+axioms decider with a cache of saturated charts.

    Charts are keyed by (closure, axioms); all goals of one batch share one
    chart over the union of their closures.
    """

    def __init__(self, cache_size: int = 4096):
        self.cache: dict = {}
        self.cache_size = cache_size
        self.saturations = 0

    def chart(self, formulas, axioms) -> Chart:
        axioms = frozenset(axioms)
        closure = closure_of(formulas, axioms)
        key = (closure.formulas, axioms)
        ch = self.cache.get(key)
        if ch is None:
            ch = saturate(closure, axioms)
            self.saturations += 1
            if len(self.cache) >= self.cache_size:
                self.cache.clear()
            self.cache[key] = ch
        return ch

    def __call__(self, goals, axioms):
        goals = list(goals)
        fs = []
        for g in goals:
            fs.extend(leaves(g.antecedent))
            fs.append(g.succedent)
        ch = self.chart(fs, axioms)
        return [ch.proves(g) for g in goals]
