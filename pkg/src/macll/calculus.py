"""Rule schemas, system configurations, proof objects and the proof checker."""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .core import (
    EMPTY, ONE, Bang, Context, Formula, Leaf, LImpl, Node, One, RImpl, Sequent,
    Structure, Tensor, context_at, leaf_paths, leaves, parse_sequent,
    replace_at, structure_from_leaves, subtree_at, subtrees,
)

__all__ = [
    "Rule", "SystemConfig", "Position", "Proof", "CheckResult", "active_rules",
    "premise_candidates", "check_proof", "has_cut", "proof_to_json",
    "proof_from_json", "proof_to_text", "proof_to_latex", "LIGHT_CONFIGS",
]


class Rule(str, enum.Enum):
    Init = "init"
    TensorL = "*L"
    TensorR = "*R"
    RImplL = "\\L"
    RImplR = "\\R"
    LImplL = "/L"
    LImplR = "/R"
    UnitL = "1L"
    UnitR = "1R"
    BangL = "!L"
    BangR = "!R"
    BangRK = "!RK"
    BangR4 = "!R4"
    BangRK4 = "!RK4"
    C = "C"
    CK = "CK"
    W = "W"
    Cut = "cut"

    def __str__(self):
        return self.value


MACLL_RULES = frozenset({
    Rule.Init, Rule.TensorL, Rule.TensorR, Rule.RImplL, Rule.RImplR,
    Rule.LImplL, Rule.LImplR, Rule.UnitL, Rule.UnitR,
})
STRUCTURAL = frozenset({Rule.C, Rule.CK, Rule.W})
BANG_RIGHT = frozenset({Rule.BangR, Rule.BangR4, Rule.BangRK, Rule.BangRK4})


def _labels(value, allowed, what):
    if value is None:
        return frozenset()
    if isinstance(value, str):
        value = [v.strip() for v in value.replace(" ", ",").split(",") if v.strip()]
    out = frozenset(str(v).lower() for v in value)
    bad = out - allowed
    if bad:
        raise ValueError(f"unknown {what} label(s): {', '.join(sorted(bad))}")
    return out


@dataclass(frozen=True)
class SystemConfig:
    """Structural labels S (subset of {c, w}) and modal labels M (subset of
    {k, t, 4}).  Strings like ``"c,w"`` are accepted for either field."""

    structural: frozenset = frozenset()
    modal: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "structural", _labels(self.structural, {"c", "w"}, "structural"))
        object.__setattr__(self, "modal", _labels(self.modal, {"k", "t", "4"}, "modal"))

    @property
    def light(self) -> bool:
        return "k" not in self.modal

    @property
    def contraction(self) -> bool:
        return "c" in self.structural

    def rules(self) -> frozenset:
        return active_rules(self)

    def __str__(self):
        s = ",".join(sorted(self.structural)) or "-"
        m = ",".join(sorted(self.modal)) or "-"
        return f"S={{{s}}} M={{{m}}}"


def active_rules(config: SystemConfig) -> frozenset:
    m = set(config.modal) - {"t"}
    rules = set(MACLL_RULES)
    if m in (set(), {"4"}):
        rules.add(Rule.BangR)
    if m == {"k"}:
        rules.add(Rule.BangRK)
    if m == {"4"}:
        rules.add(Rule.BangR4)
    if m == {"k", "4"}:
        rules.add(Rule.BangRK4)
    if "t" in config.modal:
        rules.add(Rule.BangL)
    if "c" in config.structural:
        rules.add(Rule.CK if "k" in config.modal else Rule.C)
    if "w" in config.structural:
        rules.add(Rule.W)
    return frozenset(rules)


LIGHT_CONFIGS = tuple(
    SystemConfig(s, m)
    for s in ((), ("c",), ("w",), ("c", "w"))
    for m in ((), ("t",), ("4",), ("t", "4"))
)


@dataclass(frozen=True)
class Position:
    """Where a rule acts.  ``path`` addresses a subtree of the conclusion's
    antecedent (0 = left, 1 = right); for a cut it addresses the cut
    formula's leaf in the right premise.  ``data`` carries the split choice
    of *R (0: left part empty, 1: split at the root node, 2: right part
    empty) or the bang-retention flags of !RK4, one per leaf."""

    path: Optional[tuple] = None
    data: object = None


@dataclass(frozen=True, eq=False)
class Proof:
    conclusion: Sequent
    rule: Rule
    premises: tuple = ()
    position: Position = field(default_factory=Position)

    def __post_init__(self):
        if not isinstance(self.premises, tuple):
            object.__setattr__(self, "premises", tuple(self.premises))

    @property
    def size(self) -> int:
        """Number of rule applications."""
        return 1 + sum(p.size for p in self.premises)

    @property
    def depth(self) -> int:
        return 1 + max((p.depth for p in self.premises), default=0)

    def nodes(self) -> Iterator["Proof"]:
        stack = [self]
        while stack:
            p = stack.pop()
            yield p
            stack.extend(reversed(p.premises))

    def __str__(self):
        return proof_to_text(self)


def has_cut(p: Proof) -> bool:
    return any(n.rule is Rule.Cut for n in p.nodes())


# ------------------------------------------------------------ rule schemas

def _all_banged(s: Structure) -> bool:
    return all(isinstance(f, Bang) for f in leaves(s))


def _strip(s: Structure, retain=None) -> Structure:
    fs = leaves(s)
    if retain is None:
        retain = (False,) * len(fs)
    return structure_from_leaves(s, [f if r else f.body for f, r in zip(fs, retain)])


def _split(ante: Structure, split):
    if split == 0:
        return EMPTY, ante
    if split == 2:
        return ante, EMPTY
    if split == 1 and isinstance(ante, Node):
        return ante.left, ante.right
    return None


def premise_candidates(s: Sequent, config: SystemConfig) -> list:
    """All instances of active rules with conclusion ``s``, as
    ``(rule, position, premises)``; structural rules come last."""
    return list(iter_candidates(s, config))


def iter_candidates(s: Sequent, config: SystemConfig, rules=None):
    if rules is None:
        rules = active_rules(config)
    g, c = s.antecedent, s.succedent

    if isinstance(g, Leaf) and g.formula is c:
        yield Rule.Init, Position(), ()
    if g is EMPTY and c is ONE:
        yield Rule.UnitR, Position(), ()

    if isinstance(c, RImpl):
        yield Rule.RImplR, Position(), (Sequent(Node(Leaf(c.arg), g), c.result),)
    elif isinstance(c, LImpl):
        yield Rule.LImplR, Position(), (Sequent(Node(g, Leaf(c.arg)), c.result),)

    lps = list(leaf_paths(g))
    for path, f in lps:
        if isinstance(f, Tensor):
            yield (Rule.TensorL, Position(path),
                   (Sequent(replace_at(g, path, Node(Leaf(f.left), Leaf(f.right))), c),))
        elif isinstance(f, One):
            yield Rule.UnitL, Position(path), (Sequent(replace_at(g, path, EMPTY), c),)

    for path, f in lps:
        if isinstance(f, RImpl):
            yield (Rule.RImplL, Position(path),
                   (Sequent(EMPTY, f.arg), Sequent(replace_at(g, path, Leaf(f.result)), c)))
            if path and path[-1] == 1:
                q = path[:-1]
                delta = subtree_at(g, q).left
                yield (Rule.RImplL, Position(q),
                       (Sequent(delta, f.arg), Sequent(replace_at(g, q, Leaf(f.result)), c)))
        elif isinstance(f, LImpl):
            yield (Rule.LImplL, Position(path),
                   (Sequent(EMPTY, f.arg), Sequent(replace_at(g, path, Leaf(f.result)), c)))
            if path and path[-1] == 0:
                q = path[:-1]
                delta = subtree_at(g, q).right
                yield (Rule.LImplL, Position(q),
                       (Sequent(delta, f.arg), Sequent(replace_at(g, q, Leaf(f.result)), c)))

    if isinstance(c, Tensor):
        if isinstance(g, Node):
            yield Rule.TensorR, Position(data=1), (Sequent(g.left, c.left), Sequent(g.right, c.right))
        yield Rule.TensorR, Position(data=0), (Sequent(EMPTY, c.left), Sequent(g, c.right))
        if g is not EMPTY:
            yield Rule.TensorR, Position(data=2), (Sequent(g, c.left), Sequent(EMPTY, c.right))

    if isinstance(c, Bang):
        single = isinstance(g, Leaf) and isinstance(g.formula, Bang)
        if single and Rule.BangR in rules:
            yield Rule.BangR, Position(), (Sequent(g.formula.body, c.body),)
        if single and Rule.BangR4 in rules:
            yield Rule.BangR4, Position(), (Sequent(g, c.body),)
        if (Rule.BangRK in rules or Rule.BangRK4 in rules) and _all_banged(g):
            if Rule.BangRK in rules:
                yield Rule.BangRK, Position(), (Sequent(_strip(g), c.body),)
            else:
                for retain in itertools.product((False, True), repeat=g.nleaves):
                    yield (Rule.BangRK4, Position(data=retain),
                           (Sequent(_strip(g, retain), c.body),))

    if Rule.BangL in rules:
        for path, f in lps:
            if isinstance(f, Bang):
                yield Rule.BangL, Position(path), (Sequent(replace_at(g, path, Leaf(f.body)), c),)
    if Rule.W in rules:
        for path, f in lps:
            if isinstance(f, Bang):
                yield Rule.W, Position(path), (Sequent(replace_at(g, path, EMPTY), c),)
    if Rule.C in rules:
        for path, f in lps:
            if isinstance(f, Bang):
                yield Rule.C, Position(path), (Sequent(replace_at(g, path, Node(Leaf(f), Leaf(f))), c),)
    if Rule.CK in rules:
        for path, t in subtrees(g):
            if _all_banged(t):
                yield Rule.CK, Position(path), (Sequent(replace_at(g, path, Node(t, t)), c),)


# ------------------------------------------------------------------ checker

@dataclass
class CheckResult:
    ok: bool
    node: Optional[Proof] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


class _Bad(Exception):
    pass


def _need(cond, reason):
    if not cond:
        raise _Bad(reason)


def _expected(p: Proof) -> tuple:
    """Premise sequents the schema of ``p.rule`` demands at ``p.position``."""
    s = p.conclusion
    g, c = s.antecedent, s.succedent
    pos = p.position
    r = p.rule

    def leaf(kind):
        _need(pos.path is not None, "missing position")
        try:
            t = subtree_at(g, pos.path)
        except IndexError:
            raise _Bad("position outside the antecedent")
        _need(isinstance(t, Leaf) and isinstance(t.formula, kind), f"no {kind.__name__} leaf at position")
        return t.formula

    if r is Rule.Init:
        _need(isinstance(g, Leaf) and g.formula is c, "init needs A |- A")
        return ()
    if r is Rule.UnitR:
        _need(g is EMPTY and c is ONE, "1R needs () |- 1")
        return ()
    if r is Rule.TensorL:
        f = leaf(Tensor)
        return (Sequent(replace_at(g, pos.path, Node(Leaf(f.left), Leaf(f.right))), c),)
    if r is Rule.UnitL:
        leaf(One)
        return (Sequent(replace_at(g, pos.path, EMPTY), c),)
    if r in (Rule.BangL, Rule.W, Rule.C):
        f = leaf(Bang)
        new = {Rule.BangL: Leaf(f.body), Rule.W: EMPTY, Rule.C: Node(Leaf(f), Leaf(f))}[r]
        return (Sequent(replace_at(g, pos.path, new), c),)
    if r is Rule.CK:
        _need(pos.path is not None, "missing position")
        try:
            t = subtree_at(g, pos.path)
        except IndexError:
            raise _Bad("position outside the antecedent")
        _need(t is not EMPTY and _all_banged(t), "CK needs a banged substructure")
        return (Sequent(replace_at(g, pos.path, Node(t, t)), c),)
    if r in (Rule.RImplL, Rule.LImplL):
        _need(pos.path is not None, "missing position")
        try:
            t = subtree_at(g, pos.path)
        except IndexError:
            raise _Bad("position outside the antecedent")
        kind = RImpl if r is Rule.RImplL else LImpl
        if isinstance(t, Leaf):
            f, delta = t.formula, EMPTY
        else:
            _need(isinstance(t, Node), "no implication at position")
            inner = t.right if r is Rule.RImplL else t.left
            f = inner.formula if isinstance(inner, Leaf) else None
            delta = t.left if r is Rule.RImplL else t.right
        _need(isinstance(f, kind), "no implication at position")
        return (Sequent(delta, f.arg), Sequent(replace_at(g, pos.path, Leaf(f.result)), c))
    if r is Rule.RImplR:
        _need(isinstance(c, RImpl), "\\R needs A \\ B")
        return (Sequent(Node(Leaf(c.arg), g), c.result),)
    if r is Rule.LImplR:
        _need(isinstance(c, LImpl), "/R needs B / A")
        return (Sequent(Node(g, Leaf(c.arg)), c.result),)
    if r is Rule.TensorR:
        _need(isinstance(c, Tensor), "*R needs A * B")
        parts = _split(g, pos.data)
        _need(parts is not None, "bad split")
        return (Sequent(parts[0], c.left), Sequent(parts[1], c.right))
    if r in BANG_RIGHT:
        _need(isinstance(c, Bang), "bang right rule needs !C")
        _need(_all_banged(g), "antecedent must be banged")
        if r in (Rule.BangR, Rule.BangR4):
            _need(isinstance(g, Leaf), "antecedent must be one formula")
            return (Sequent(Leaf(g.formula.body) if r is Rule.BangR else g, c.body),)
        if r is Rule.BangRK:
            return (Sequent(_strip(g), c.body),)
        retain = pos.data
        _need(isinstance(retain, tuple) and len(retain) == g.nleaves, "bad retention flags")
        return (Sequent(_strip(g, retain), c.body),)
    raise _Bad(f"unknown rule {r}")


def _check_cut(p: Proof):
    _need(len(p.premises) == 2, "cut needs two premises")
    left, right = p.premises[0].conclusion, p.premises[1].conclusion
    _need(p.position.path is not None, "missing position")
    try:
        hole = subtree_at(right.antecedent, p.position.path)
    except IndexError:
        raise _Bad("position outside the right premise")
    _need(isinstance(hole, Leaf) and hole.formula is left.succedent, "cut formula mismatch")
    ctx = context_at(right.antecedent, p.position.path)
    _need(right.succedent is p.conclusion.succedent, "succedent mismatch")
    _need(ctx.plug(left.antecedent) is p.conclusion.antecedent, "conclusion is not the cut result")


def check_proof(p: Proof, config: SystemConfig, allow_cut: bool = False) -> CheckResult:
    """Verify every node against the active rule schemas of ``config``."""
    rules = active_rules(config)
    seen = set()
    for node in p.nodes():
        if id(node) in seen:
            continue
        seen.add(id(node))
        try:
            if node.rule is Rule.Cut:
                _need(allow_cut, "cut is not a rule of the system")
                _check_cut(node)
                continue
            _need(node.rule in rules, f"rule {node.rule} is not active in {config}")
            want = _expected(node)
            got = tuple(q.conclusion for q in node.premises)
            _need(len(want) == len(got), "wrong number of premises")
            _need(all(a is b for a, b in zip(want, got)), "premises do not match the schema")
        except _Bad as e:
            return CheckResult(False, node, str(e))
    return CheckResult(True)


# ------------------------------------------------------------ serialization

def proof_to_json(p: Proof) -> dict:
    pos = {}
    if p.position.path is not None:
        pos["path"] = list(p.position.path)
    if p.position.data is not None:
        d = p.position.data
        pos["data"] = list(d) if isinstance(d, tuple) else d
    return {
        "conclusion": str(p.conclusion),
        "rule": p.rule.name,
        "position": pos or None,
        "premises": [proof_to_json(q) for q in p.premises],
    }


def proof_from_json(obj) -> Proof:
    if isinstance(obj, str):
        obj = json.loads(obj)
    pos = obj.get("position") or {}
    path = tuple(pos["path"]) if "path" in pos else None
    data = pos.get("data")
    if isinstance(data, list):
        data = tuple(bool(x) for x in data)
    return Proof(
        parse_sequent(obj["conclusion"]),
        Rule[obj["rule"]],
        tuple(proof_from_json(q) for q in obj.get("premises", [])),
        Position(path, data),
    )


def proof_to_text(p: Proof, indent: str = "") -> str:
    lines = [f"{indent}{p.conclusion}    [{p.rule}]"]
    for q in p.premises:
        lines.append(proof_to_text(q, indent + "  "))
    return "\n".join(lines)


_LATEX_OPS = {"*": r"\otimes", "\\": r"\backslash", "/": "/"}


def _latex_formula(f: Formula) -> str:
    from .core import Var
    if isinstance(f, Var):
        return f"p_{{{f.index}}}" if f.index is not None else rf"\mathit{{{f.name}}}"
    if isinstance(f, One):
        return r"\mathbf{1}"

    def atomic(g):
        s = _latex_formula(g)
        return f"({s})" if isinstance(g, (Tensor, RImpl, LImpl)) else s

    if isinstance(f, Bang):
        return "{!}" + atomic(f.body)
    if isinstance(f, Tensor):
        return rf"{atomic(f.left)} \otimes {atomic(f.right)}"
    if isinstance(f, RImpl):
        return rf"{atomic(f.arg)} \to {atomic(f.result)}"
    return rf"{atomic(f.result)} \leftarrow {atomic(f.arg)}"


def _latex_structure(s: Structure) -> str:
    if s is EMPTY:
        return ""
    if isinstance(s, Leaf):
        return _latex_formula(s.formula)
    return f"({_latex_structure(s.left)}, {_latex_structure(s.right)})"


def latex_sequent(s: Sequent) -> str:
    return f"{_latex_structure(s.antecedent)} \\vdash {_latex_formula(s.succedent)}"


_LATEX_RULES = {
    Rule.Init: r"\mathrm{init}", Rule.TensorL: r"\otimes L", Rule.TensorR: r"\otimes R",
    Rule.RImplL: r"\to L", Rule.RImplR: r"\to R", Rule.LImplL: r"\leftarrow L",
    Rule.LImplR: r"\leftarrow R", Rule.UnitL: r"\mathbf{1}L", Rule.UnitR: r"\mathbf{1}R",
    Rule.BangL: "!L", Rule.BangR: "!R", Rule.BangRK: "!RK", Rule.BangR4: "!R4",
    Rule.BangRK4: "!RK4", Rule.C: "C", Rule.CK: "CK", Rule.W: "W", Rule.Cut: r"\mathrm{cut}",
}


def proof_to_latex(p: Proof, standalone: bool = False) -> str:
    """bussproofs source, one inference per node."""
    out = []

    def emit(q: Proof):
        for sub in q.premises:
            emit(sub)
        out.append(rf"\RightLabel{{$({_LATEX_RULES[q.rule]})$}}")
        cmd = {0: r"\AxiomC{}" "\n" r"\UnaryInfC", 1: r"\UnaryInfC", 2: r"\BinaryInfC"}[len(q.premises)]
        out.append(f"{cmd}{{${latex_sequent(q.conclusion)}$}}")

    emit(p)
    body = "\\begin{prooftree}\n" + "\n".join(out) + "\n\\end{prooftree}"
    if standalone:
        return ("\\documentclass{article}\n\\usepackage{bussproofs}\n\\begin{document}\n"
                + body + "\n\\end{document}\n")
    return body
