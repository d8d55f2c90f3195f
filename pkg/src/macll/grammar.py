"""Categorial grammars over light systems and their context-free equivalents.

A lexicon assigns formulas to words.  A nonempty string is accepted when
some choice of lexical formulas, under some bracketing, derives the
sentence type.  For light systems a single chart over the translated
lexicon decides every string with a CYK-style pass; the same chart read as
productions is an equivalent context-free grammar.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .calculus import SystemConfig
from .chart import Chart, ChartDecider
from .core import (
    Formula, Interner, Leaf, Node, ParseError, Sequent, format_formula, parse_formula,
    sbf_all, sort_key, tau,
)
from .phi import phi_fixpoint
from .search import SearchLimits, Searcher, Status

__all__ = [
    "Lexicon", "LexiconError", "load_lexicon", "GrammarEngine", "recognize",
    "CFG", "extract_cfg", "cfg_membership", "bracketings",
]


class LexiconError(ValueError):
    pass


@dataclass
class Lexicon:
    assignment: dict            # word -> tuple of formulas
    sentence_type: Formula

    def __post_init__(self):
        for w, fs in self.assignment.items():
            if not fs:
                raise LexiconError(f"word {w!r} has no formulas")

    @property
    def alphabet(self) -> tuple:
        return tuple(sorted(self.assignment))

    def formulas(self) -> list:
        return [f for fs in self.assignment.values() for f in fs] + [self.sentence_type]


def load_lexicon(text: str) -> Lexicon:
    """Parse ``sentence: F`` / ``word : F ; G`` lines; ``#`` starts a comment."""
    sentence = None
    assignment: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise LexiconError(f"line {lineno}: expected 'word : formula'")
        head, body = (x.strip() for x in line.split(":", 1))
        try:
            fs = [parse_formula(x) for x in body.split(";")]
        except ParseError as e:
            raise LexiconError(f"line {lineno}: {e}") from e
        if head == "sentence":
            if len(fs) != 1:
                raise LexiconError(f"line {lineno}: one sentence type expected")
            sentence = fs[0]
            continue
        if not head or any(c.isspace() for c in head):
            raise LexiconError(f"line {lineno}: bad word {head!r}")
        if head in assignment:
            warnings.warn(f"line {lineno}: duplicate entry for {head!r} merged", stacklevel=2)
        old = assignment.setdefault(head, [])
        old.extend(f for f in fs if f not in old)
    if sentence is None:
        raise LexiconError("missing 'sentence:' header")
    return Lexicon({w: tuple(fs) for w, fs in assignment.items()}, sentence)


class GrammarEngine:
    """One chart for a whole lexicon in a light system."""

    def __init__(self, lex: Lexicon, config: SystemConfig):
        if not config.light:
            raise ValueError(f"{config} is not a light system")
        self.lex = lex
        self.config = config
        self.interner = Interner()
        L = sbf_all(lex.formulas())
        self.axioms = phi_fixpoint(L, config, self.interner)
        self.tlex = {w: tuple(dict.fromkeys(tau(f, self.interner) for f in fs))
                     for w, fs in lex.assignment.items()}
        self.goal = tau(lex.sentence_type, self.interner)
        formulas = [f for fs in self.tlex.values() for f in fs] + [self.goal]
        self.chart: Chart = ChartDecider().chart(formulas, self.axioms.axioms)
        ids = self.chart.closure._ids
        self._lexical = {
            w: frozenset(c for f in fs for c in self.chart.labels_single(ids[f]))
            for w, fs in self.tlex.items()
        }

    def recognize(self, words: Sequence[str]) -> bool:
        n = len(words)
        if n == 0:
            return False
        for w in words:
            if w not in self._lexical:
                raise KeyError(f"unknown word {w!r}")
        span = {}
        for i, w in enumerate(words):
            span[i, i + 1] = self._lexical[w]
        for width in range(2, n + 1):
            for i in range(n - width + 1):
                j = i + width
                acc = set()
                for k in range(i + 1, j):
                    for a in span[i, k]:
                        for b in span[k, j]:
                            cs = self.chart.labels_pair(a, b)
                            if cs:
                                acc |= cs
                span[i, j] = frozenset(acc)
        return self.chart.closure._ids[self.goal] in span[0, n]

    def cfg(self) -> "CFG":
        fs = self.chart.closure.formulas
        name = lambda i: f"[{format_formula(fs[i])}]"
        prods = set()
        for a, b, c in self.chart.pair:
            prods.add((name(c), (name(a), name(b))))
        for a, c in self.chart.single:
            if a != c:
                prods.add((name(c), (name(a),)))
        for w, tfs in self.tlex.items():
            for f in tfs:
                prods.add((f"[{format_formula(f)}]", (f"'{w}'",)))
        nts = frozenset(name(i) for i in range(len(fs)))
        return CFG(nts, frozenset(self.lex.alphabet), frozenset(prods), f"[{format_formula(self.goal)}]")


def bracketings(items: Sequence):
    """Every binary tree over ``items`` in order."""
    n = len(items)
    if n == 1:
        yield Leaf(items[0])
        return
    for k in range(1, n):
        for left in bracketings(items[:k]):
            for right in bracketings(items[k:]):
                yield Node(left, right)


def _recognize_by_search(words, lex: Lexicon, config: SystemConfig,
                         limits: Optional[SearchLimits]) -> bool:
    searcher = Searcher(config, limits or SearchLimits(max_depth=30, max_antecedent_leaves=2 * len(words) + 2))
    unknown = False
    for choice in itertools.product(*(lex.assignment[w] for w in words)):
        for g in bracketings(list(choice)):
            r = searcher.prove(Sequent(g, lex.sentence_type))
            if r.provable:
                return True
            unknown = unknown or r.status is Status.UNKNOWN
    if unknown:
        warnings.warn("bounded search was inconclusive; reporting rejection", stacklevel=3)
    return False


def recognize(words: Sequence[str], lex: Lexicon, config: SystemConfig,
              engine: Optional[GrammarEngine] = None,
              limits: Optional[SearchLimits] = None) -> bool:
    words = list(words)
    if not words:
        return False
    for w in words:
        if w not in lex.assignment:
            raise KeyError(f"unknown word {w!r}")
    if not config.light:
        return _recognize_by_search(words, lex, config, limits)
    return (engine or GrammarEngine(lex, config)).recognize(words)


@dataclass(frozen=True)
class CFG:
    nonterminals: frozenset
    terminals: frozenset
    productions: frozenset      # (head, body); terminals in a body are quoted
    start: str

    def __post_init__(self):
        syms = set(self.nonterminals)
        if self.start not in syms:
            raise ValueError("start symbol is not a nonterminal")
        for head, body in self.productions:
            if head not in syms:
                raise ValueError(f"undeclared nonterminal {head}")
            for x in body:
                if x.startswith("'"):
                    if x[1:-1] not in self.terminals:
                        raise ValueError(f"undeclared terminal {x}")
                elif x not in syms:
                    raise ValueError(f"undeclared nonterminal {x}")

    def dump(self) -> str:
        lines = [f"start: {self.start}"]
        for head, body in sorted(self.productions, key=lambda p: (p[0], p[1])):
            lines.append(f"{head} -> {' '.join(body)}")
        return "\n".join(lines)


def extract_cfg(lex: Lexicon, config: SystemConfig, engine: Optional[GrammarEngine] = None) -> CFG:
    return (engine or GrammarEngine(lex, config)).cfg()


def cfg_membership(g: CFG, words: Sequence[str]) -> bool:
    """CYK over binary, unary and terminal productions."""
    n = len(words)
    if n == 0:
        return False
    unary: dict = {}
    binary: dict = {}
    lexical: dict = {}
    for head, body in g.productions:
        if len(body) == 2:
            binary.setdefault(body, set()).add(head)
        elif body[0].startswith("'"):
            lexical.setdefault(body[0][1:-1], set()).add(head)
        else:
            unary.setdefault(body[0], set()).add(head)

    def close(s: set) -> frozenset:
        todo = list(s)
        out = set(s)
        while todo:
            x = todo.pop()
            for h in unary.get(x, ()):
                if h not in out:
                    out.add(h)
                    todo.append(h)
        return frozenset(out)

    table = {}
    for i, w in enumerate(words):
        table[i, i + 1] = close(set(lexical.get(w, ())))
    for width in range(2, n + 1):
        for i in range(n - width + 1):
            j = i + width
            acc = set()
            for k in range(i + 1, j):
                for a in table[i, k]:
                    for b in table[k, j]:
                        acc |= binary.get((a, b), set())
            table[i, j] = close(acc)
    return g.start in table[0, n]
