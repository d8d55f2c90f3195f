"""Cut-free backward proof search.

Without contraction every premise is strictly smaller than its conclusion,
so exhaustive search terminates and its verdicts are exact.  With
contraction the search is bounded: each branch may use at most
``max_contractions`` contraction steps, antecedents may not grow beyond
``max_antecedent_leaves`` leaves, and branches stop at ``max_depth``.  A
failed search reports ``UNKNOWN`` whenever one of these bounds cut off a
candidate, and ``UNPROVABLE`` only when the space was exhausted without it.

Two things keep the contraction case tractable.  Results are tabled per
sequent (proofs always, failures only when no bound was involved or
together with the bounds they were found under).  And every goal passes a
resource test first: a cut-free proof only ever creates or destroys atom
and bang occurrences through contraction, weakening, dereliction and the
bang-introducing right rules, so the goal's imbalance of positive over
negative occurrences must lie in the cone those rules can produce.  Goals
outside that cone (checked by a small linear program) are refuted without
search.
"""
from __future__ import annotations

import enum
import sys
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .calculus import Position, Proof, Rule, SystemConfig, active_rules, iter_candidates
from .core import Bang, Formula, LImpl, One, RImpl, Sequent, Tensor, Var, leaves

__all__ = [
    "Status", "SearchLimits", "SearchResult", "Searcher", "prove_bounded",
    "decide_by_search", "default_limits", "naive_search", "resource_feasible",
]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class Status(enum.Enum):
    PROVABLE = "provable"
    UNPROVABLE = "unprovable"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SearchLimits:
    max_depth: int = 40
    max_antecedent_leaves: int = 12
    max_contractions: int = 3

    def __post_init__(self):
        if self.max_depth < 1 or self.max_antecedent_leaves < 1 or self.max_contractions < 0:
            raise ValueError("search limits must be positive")


@dataclass
class SearchResult:
    status: Status
    proof: Optional[Proof] = None
    expanded: int = 0

    @property
    def provable(self) -> bool:
        return self.status is Status.PROVABLE

    def __bool__(self):
        return self.provable


def default_limits(s: Sequent) -> SearchLimits:
    return SearchLimits(max_depth=40, max_antecedent_leaves=max(4 * s.antecedent.nleaves, 4))


# ------------------------------------------------------------ resource test

_vec_cache: dict = {}


def _formula_info(f: Formula):
    """(count vector of f read positively, banged subformula occurrences with
    their polarity relative to f)."""
    got = _vec_cache.get(f)
    if got is not None:
        return got
    vec: Counter = Counter()
    bangs = []

    def walk(g, pol):
        if isinstance(g, Var):
            vec[g.name] += pol
        elif isinstance(g, One):
            pass
        elif isinstance(g, Bang):
            vec["!"] += pol
            bangs.append((g, pol))
            walk(g.body, pol)
        elif isinstance(g, Tensor):
            walk(g.left, pol)
            walk(g.right, pol)
        elif isinstance(g, RImpl):
            walk(g.arg, -pol)
            walk(g.result, pol)
        elif isinstance(g, LImpl):
            walk(g.result, pol)
            walk(g.arg, -pol)

    walk(f, 1)
    got = ({k: v for k, v in vec.items() if v}, tuple(bangs))
    _vec_cache[f] = got
    return got


def resource_feasible(s: Sequent, config: SystemConfig) -> bool:
    """Necessary condition for cut-free provability (see module docstring)."""
    imb: Counter = Counter()
    negbangs = []
    for f in leaves(s.antecedent):
        v, bangs = _formula_info(f)
        for k, x in v.items():
            imb[k] -= x
        negbangs.extend(b for b, pol in bangs if pol > 0)
    v, bangs = _formula_info(s.succedent)
    for k, x in v.items():
        imb[k] += x
    negbangs.extend(b for b, pol in bangs if pol < 0)

    gens = []
    if negbangs:
        for b in set(negbangs):
            gv = _formula_info(b)[0]
            if "c" in config.structural:
                gens.append(gv)
            if "w" in config.structural:
                gens.append({k: -x for k, x in gv.items()})
    if "t" in config.modal or "k" in config.modal:
        gens.append({"!": -1})
    if "4" in config.modal or "k" in config.modal:
        gens.append({"!": 1})
    target = {k: x for k, x in imb.items() if x}
    if not target:
        return True
    up = {k for g in gens for k, x in g.items() if x > 0}
    down = {k for g in gens for k, x in g.items() if x < 0}
    for k, x in target.items():
        if (x > 0 and k not in up) or (x < 0 and k not in down):
            return False
    return _in_cone(tuple(sorted(target.items())),
                    frozenset(tuple(sorted(g.items())) for g in gens))


@lru_cache(maxsize=65536)
def _in_cone(target: tuple, gens: frozenset) -> bool:
    """Is ``target`` a nonnegative combination of ``gens``?"""
    target = dict(target)
    gens = [dict(g) for g in gens]
    keys = sorted(set(target).union(*gens))
    a_eq = np.array([[g.get(k, 0) for g in gens] for k in keys], dtype=float)
    b_eq = np.array([target.get(k, 0) for k in keys], dtype=float)
    res = linprog(np.zeros(len(gens)), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.status == 0


# ------------------------------------------------------------------ search

_CONTRACTIONS = (Rule.C, Rule.CK)


class Searcher:
    """Tabled backward search for one configuration and one set of limits.

    A searcher may be reused for many goals; its tables only grow, and every
    entry is valid independently of the goal that created it.
    """

    def __init__(self, config: SystemConfig, limits: Optional[SearchLimits] = None,
                 prune: bool = True):
        self.config = config
        self.rules = active_rules(config)
        self.bounded = Rule.C in self.rules or Rule.CK in self.rules
        self.limits = limits or SearchLimits()
        self.prune = prune
        self.proven: dict = {}
        self.refuted: set = set()
        self.failed: dict = {}
        self._feasible: dict = {}
        self.expanded = 0

    def feasible(self, s: Sequent) -> bool:
        r = self._feasible.get(s)
        if r is None:
            r = resource_feasible(s, self.config)
            self._feasible[s] = r
        return r

    def prove(self, s: Sequent) -> SearchResult:
        start = self.expanded
        if not self.bounded:
            p, _ = self._solve(s, 0, 0)
            status = Status.PROVABLE if p else Status.UNPROVABLE
            return SearchResult(status, p, self.expanded - start)
        hit = False
        for budget in range(self.limits.max_contractions + 1):
            p, hit = self._solve(s, budget, 0)
            if p is not None:
                return SearchResult(Status.PROVABLE, p, self.expanded - start)
            if not hit:
                return SearchResult(Status.UNPROVABLE, None, self.expanded - start)
        return SearchResult(Status.UNKNOWN, None, self.expanded - start)

    def _dominated(self, s, budget, remaining):
        for b, d in self.failed.get(s, ()):
            if b >= budget and d >= remaining:
                return True
        return False

    def _solve(self, s: Sequent, budget: int, depth: int):
        p = self.proven.get(s)
        if p is not None:
            return p, False
        if s in self.refuted:
            return None, False
        remaining = self.limits.max_depth - depth
        if self.bounded and self._dominated(s, budget, remaining):
            return None, True
        if self.prune and not self.feasible(s):
            self.refuted.add(s)
            return None, False
        if self.bounded and remaining <= 0:
            return None, True
        self.expanded += 1
        hit = False
        width = self.limits.max_antecedent_leaves
        for rule, pos, prems in iter_candidates(s, self.config, self.rules):
            nb = budget
            if self.bounded:
                if rule in _CONTRACTIONS:
                    if budget == 0:
                        hit = True
                        continue
                    nb = budget - 1
                if any(q.antecedent.nleaves > width for q in prems):
                    hit = True
                    continue
            subs = []
            for q in prems:
                sp, h = self._solve(q, nb, depth + 1)
                hit = hit or h
                if sp is None:
                    break
                subs.append(sp)
            else:
                proof = Proof(s, rule, tuple(subs), pos)
                self.proven[s] = proof
                return proof, False
        if hit:
            self.failed.setdefault(s, []).append((budget, remaining))
        else:
            self.refuted.add(s)
        return None, hit


def prove_bounded(s: Sequent, config: SystemConfig, limits: Optional[SearchLimits] = None) -> SearchResult:
    return Searcher(config, limits).prove(s)


def decide_by_search(s: Sequent, config: SystemConfig) -> SearchResult:
    return Searcher(config, default_limits(s)).prove(s)


def naive_search(s: Sequent, config: SystemConfig, max_depth: int = 12,
                 max_leaves: int = 6) -> Optional[Proof]:
    """Untabled depth-first search with a branch-local loop check.

    Reference implementation for validating :class:`Searcher` on small
    goals; exponential, and complete only up to the given bounds.
    """
    rules = active_rules(config)

    def go(q, depth, branch):
        if depth > max_depth or q in branch:
            return None
        branch = branch | {q}
        for rule, pos, prems in iter_candidates(q, config, rules):
            if any(x.antecedent.nleaves > max_leaves for x in prems):
                continue
            subs = []
            for x in prems:
                sp = go(x, depth + 1, branch)
                if sp is None:
                    break
                subs.append(sp)
            else:
                return Proof(q, rule, tuple(subs), pos)
        return None

    return go(s, 0, frozenset())
