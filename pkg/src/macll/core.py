"""Object syntax: formulas, structures, contexts and sequents.

Formulas and structures are hash-consed: constructing the same term twice
returns the same object, so equality and hashing are identity based and
cheap.  This matters for proof search and chart construction, which key
large tables by sequents.
"""
from __future__ import annotations

import re
import threading
from typing import Iterable, Iterator

__all__ = [
    "Formula", "Var", "One", "Bang", "Tensor", "RImpl", "LImpl", "ONE", "var",
    "Structure", "Empty", "Leaf", "Node", "EMPTY", "Context", "Sequent",
    "Interner", "ParseError", "parse_formula", "parse_structure", "parse_sequent",
    "sbf", "sbf_all", "yield_of", "tau", "tau_structure", "tau_sequent",
    "intern_code", "leaves", "leaf_paths", "subtree_at", "replace_at",
    "context_at", "subtrees", "structure_from_leaves", "is_pure",
    "format_formula", "format_structure", "format_sequent", "sort_key", "untau",
]

_INDEXED = re.compile(r"p(\d+)\Z")


class Formula:
    __slots__ = ("size", "pure", "__weakref__")
    _table: dict = {}
    _lock = threading.Lock()

    def __new__(cls, *args):
        key = (cls, *args)
        obj = Formula._table.get(key)
        if obj is None:
            with Formula._lock:
                obj = Formula._table.get(key)
                if obj is None:
                    obj = object.__new__(cls)
                    obj._setup(*args)
                    Formula._table[key] = obj
        return obj

    def __reduce__(self):
        return (type(self), self._args())

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __str__(self):
        return format_formula(self)

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self._args()))})"

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)


class Var(Formula):
    __slots__ = ("name", "index")

    def __new__(cls, name):
        if isinstance(name, int):
            name = f"p{name}"
        m = _INDEXED.match(name)
        if m:
            name = f"p{int(m.group(1))}"
        return super().__new__(cls, name)

    def _setup(self, name):
        m = _INDEXED.match(name)
        self.name = name
        self.index = int(m.group(1)) if m else None
        self.size = 1
        self.pure = True

    def _args(self):
        return (self.name,)


class One(Formula):
    __slots__ = ()

    def __new__(cls):
        return super().__new__(cls)

    def _setup(self):
        self.size = 1
        self.pure = True

    def _args(self):
        return ()


class Bang(Formula):
    __slots__ = ("body",)

    def __new__(cls, body):
        return super().__new__(cls, body)

    def _setup(self, body):
        self.body = body
        self.size = body.size + 1
        self.pure = False

    def _args(self):
        return (self.body,)


class _Binary(Formula):
    __slots__ = ()

    def __new__(cls, a, b):
        return super().__new__(cls, a, b)


class Tensor(_Binary):
    __slots__ = ("left", "right")

    def _setup(self, left, right):
        self.left, self.right = left, right
        self.size = left.size + right.size + 1
        self.pure = left.pure and right.pure

    def _args(self):
        return (self.left, self.right)


class RImpl(_Binary):
    """``arg \\ result``: the argument is consumed on the left."""

    __slots__ = ("arg", "result")

    def _setup(self, arg, result):
        self.arg, self.result = arg, result
        self.size = arg.size + result.size + 1
        self.pure = arg.pure and result.pure

    def _args(self):
        return (self.arg, self.result)


class LImpl(_Binary):
    """``result / arg``: the argument is consumed on the right."""

    __slots__ = ("result", "arg")

    def _setup(self, result, arg):
        self.result, self.arg = result, arg
        self.size = arg.size + result.size + 1
        self.pure = arg.pure and result.pure

    def _args(self):
        return (self.result, self.arg)


ONE = One()


def var(i: int) -> Var:
    return Var(f"p{i}")


def is_pure(f: Formula) -> bool:
    """True iff no bang occurs in ``f``."""
    return f.pure


# ---------------------------------------------------------------- structures

class Structure:
    __slots__ = ("nleaves", "size", "__weakref__")
    _table: dict = {}
    _lock = threading.Lock()

    def __reduce__(self):
        return (type(self), self._args())

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __str__(self):
        return format_structure(self)

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self._args()))})"

    @classmethod
    def _cons(cls, *args):
        key = (cls, *args)
        obj = Structure._table.get(key)
        if obj is None:
            with Structure._lock:
                obj = Structure._table.get(key)
                if obj is None:
                    obj = object.__new__(cls)
                    obj._setup(*args)
                    Structure._table[key] = obj
        return obj


class Empty(Structure):
    __slots__ = ()

    def __new__(cls):
        return cls._cons()

    def _setup(self):
        self.nleaves = 0
        self.size = 0

    def _args(self):
        return ()


class Leaf(Structure):
    __slots__ = ("formula",)

    def __new__(cls, formula):
        return cls._cons(formula)

    def _setup(self, formula):
        self.formula = formula
        self.nleaves = 1
        self.size = formula.size

    def _args(self):
        return (self.formula,)


class Node(Structure):
    """Binary node.  Constructing a node with an empty child returns the
    other child, so ``(G, ()) == G`` holds by construction."""

    __slots__ = ("left", "right")

    def __new__(cls, left, right):
        if isinstance(left, Formula):
            left = Leaf(left)
        if isinstance(right, Formula):
            right = Leaf(right)
        if left is EMPTY:
            return right
        if right is EMPTY:
            return left
        return cls._cons(left, right)

    def _setup(self, left, right):
        self.left, self.right = left, right
        self.nleaves = left.nleaves + right.nleaves
        self.size = left.size + right.size

    def _args(self):
        return (self.left, self.right)


EMPTY = Empty()


def as_structure(x) -> Structure:
    return Leaf(x) if isinstance(x, Formula) else x


def leaves(s: Structure) -> list[Formula]:
    out = []
    stack = [s]
    while stack:
        t = stack.pop()
        if isinstance(t, Node):
            stack.append(t.right)
            stack.append(t.left)
        elif isinstance(t, Leaf):
            out.append(t.formula)
    return out


def leaf_paths(s: Structure, prefix=()) -> Iterator[tuple[tuple, Formula]]:
    """Yield ``(path, formula)`` for every leaf, left to right."""
    if isinstance(s, Leaf):
        yield prefix, s.formula
    elif isinstance(s, Node):
        yield from leaf_paths(s.left, prefix + (0,))
        yield from leaf_paths(s.right, prefix + (1,))


def subtrees(s: Structure, prefix=()) -> Iterator[tuple[tuple, Structure]]:
    """Yield ``(path, subtree)`` for every nonempty subtree, root first."""
    if s is EMPTY:
        return
    yield prefix, s
    if isinstance(s, Node):
        yield from subtrees(s.left, prefix + (0,))
        yield from subtrees(s.right, prefix + (1,))


def subtree_at(s: Structure, path) -> Structure:
    for d in path:
        if not isinstance(s, Node):
            raise IndexError(f"path {path} leaves the structure")
        s = s.right if d else s.left
    return s


def replace_at(s: Structure, path, new) -> Structure:
    """Replace the subtree at ``path``; empty replacements collapse parents."""
    new = as_structure(new)
    if not path:
        return new
    if not isinstance(s, Node):
        raise IndexError(f"path {path} leaves the structure")
    if path[0]:
        return Node(s.left, replace_at(s.right, path[1:], new))
    return Node(replace_at(s.left, path[1:], new), s.right)


def structure_from_leaves(shape: Structure, items: Iterable) -> Structure:
    """Rebuild ``shape`` with its leaves replaced, in order, by ``items``."""
    it = iter(items)

    def go(t):
        if isinstance(t, Node):
            left = go(t.left)
            return Node(left, go(t.right))
        if isinstance(t, Leaf):
            return as_structure(next(it))
        return t

    return go(shape)


class Context:
    """A structure with one hole, stored as the path from the root to the
    hole together with the sibling hanging off each step."""

    __slots__ = ("steps",)

    def __init__(self, steps=()):
        # steps: tuple of (side, sibling); side 0 means the hole goes left
        self.steps = tuple(steps)

    @property
    def path(self) -> tuple:
        return tuple(side for side, _ in self.steps)

    def plug(self, x) -> Structure:
        x = as_structure(x)
        for side, sib in reversed(self.steps):
            x = Node(sib, x) if side else Node(x, sib)
        return x

    def compose(self, inner: "Context") -> "Context":
        return Context(self.steps + inner.steps)

    def __eq__(self, other):
        return isinstance(other, Context) and self.steps == other.steps

    def __hash__(self):
        return hash(self.steps)

    def __repr__(self):
        return f"Context({self.plug(Var('_'))})"


def context_at(s: Structure, path) -> Context:
    steps = []
    for d in path:
        if not isinstance(s, Node):
            raise IndexError(f"path {path} leaves the structure")
        if d:
            steps.append((1, s.left))
            s = s.right
        else:
            steps.append((0, s.right))
            s = s.left
    return Context(steps)


class Sequent:
    __slots__ = ("antecedent", "succedent", "__weakref__")
    _table: dict = {}
    _lock = threading.Lock()

    def __new__(cls, antecedent, succedent):
        antecedent = as_structure(antecedent)
        key = (antecedent, succedent)
        obj = Sequent._table.get(key)
        if obj is None:
            with Sequent._lock:
                obj = Sequent._table.get(key)
                if obj is None:
                    obj = object.__new__(cls)
                    obj.antecedent = antecedent
                    obj.succedent = succedent
                    Sequent._table[key] = obj
        return obj

    def __reduce__(self):
        return (Sequent, (self.antecedent, self.succedent))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    @property
    def size(self) -> int:
        return self.antecedent.size + self.succedent.size

    @property
    def symbols(self) -> int:
        """Formula nodes plus structural commas."""
        n = self.antecedent.nleaves
        return self.size + max(n - 1, 0)

    @property
    def pure(self) -> bool:
        return self.succedent.pure and all(f.pure for f in leaves(self.antecedent))

    def __str__(self):
        return format_sequent(self)

    def __repr__(self):
        return f"Sequent({str(self)!r})"

    def __lt__(self, other):
        return str(self) < str(other)


# ------------------------------------------------------------------ printing

def _atomic(f: Formula) -> str:
    s = format_formula(f)
    return f"({s})" if isinstance(f, _Binary) else s


def format_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, One):
        return "1"
    if isinstance(f, Bang):
        return "!" + _atomic(f.body)
    if isinstance(f, Tensor):
        return f"{_atomic(f.left)} * {_atomic(f.right)}"
    if isinstance(f, RImpl):
        return f"{_atomic(f.arg)} \\ {_atomic(f.result)}"
    if isinstance(f, LImpl):
        return f"{_atomic(f.result)} / {_atomic(f.arg)}"
    raise TypeError(f)


def format_structure(s: Structure) -> str:
    if s is EMPTY:
        return "()"
    if isinstance(s, Leaf):
        return format_formula(s.formula)
    return f"({_struct_item(s.left)}, {_struct_item(s.right)})"


def _struct_item(s: Structure) -> str:
    # a binary formula directly inside a pair needs no parentheses
    return format_structure(s)


def format_sequent(q: Sequent) -> str:
    return f"{format_structure(q.antecedent)} |- {format_formula(q.succedent)}"


def sort_key(f: Formula):
    return (f.size, format_formula(f))


# ------------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, message, text="", pos=None):
        self.text = text
        self.pos = pos
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{message}{where}")


_TOKEN = re.compile(r"\s*(?:(\|-)|([A-Za-z][A-Za-z0-9_]*)|(1)|([!*\\/(),]))")


def _tokenize(text: str):
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        toks.append((m.group(m.lastindex), start))
        pos = m.end()
    toks.append(("<end>", len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.text, pos)
        self.i += 1
        return tok

    def error(self, msg):
        raise ParseError(msg, self.text, self.pos())

    # item := primary [op primary]; primary may be a structure pair
    def item(self, allow_structure):
        left = self.primary(allow_structure)
        if self.peek() in ("*", "\\", "/"):
            op_pos = self.pos()
            op = self.take()
            right = self.primary(allow_structure)
            if isinstance(left, Structure) or isinstance(right, Structure):
                raise ParseError("structure used as an operand", self.text, op_pos)
            left = _binop(op, left, right)
            if self.peek() in ("*", "\\", "/"):
                self.error("unparenthesized chain of binary connectives")
        return left

    def primary(self, allow_structure):
        tok = self.peek()
        if tok == "!":
            self.take()
            body = self.primary(False)
            return Bang(body)
        if tok == "1":
            self.take()
            return ONE
        if tok == "(":
            start = self.pos()
            self.take()
            if self.peek() == ")":
                if not allow_structure:
                    self.error("empty structure where a formula is expected")
                self.take()
                return EMPTY
            inner = self.item(allow_structure)
            if self.peek() == ",":
                if not allow_structure:
                    self.error("structure where a formula is expected")
                self.take()
                right = self.item(True)
                self.take(")")
                return Node(as_structure(inner), as_structure(right))
            self.take(")")
            if isinstance(inner, Structure) and not allow_structure:
                raise ParseError("structure where a formula is expected", self.text, start)
            return inner
        if tok in ("<end>", ")", ",", "*", "\\", "/", "|-"):
            self.error(f"unexpected {tok!r}")
        self.take()
        return Var(tok)


def _binop(op, a, b):
    if op == "*":
        return Tensor(a, b)
    if op == "\\":
        return RImpl(a, b)
    return LImpl(a, b)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.item(False)
    if p.peek() != "<end>":
        p.error(f"unexpected {p.peek()!r}")
    return f


def parse_structure(text: str) -> Structure:
    p = _Parser(text)
    s = p.item(True)
    if p.peek() != "<end>":
        p.error(f"unexpected {p.peek()!r}")
    return as_structure(s)


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    if p.peek() == "|-":
        ante = EMPTY
    else:
        ante = as_structure(p.item(True))
    p.take("|-")
    succ = p.item(False)
    if p.peek() != "<end>":
        p.error(f"unexpected {p.peek()!r}")
    return Sequent(ante, succ)


# ------------------------------------------------------- subformulas, yield

def sbf(f: Formula) -> frozenset:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        stack.extend(g._args() if not isinstance(g, (Var, One)) else ())
    return frozenset(out)


def sbf_all(fs: Iterable[Formula]) -> frozenset:
    out = set()
    for f in fs:
        out |= sbf(f)
    return frozenset(out)


def yield_of(g: Structure) -> frozenset:
    return frozenset(leaves(g))


# -------------------------------------------------------- encoding and tau

class Interner:
    """Injective formula encoding: codes are handed out in first-seen order.

    Safe to share between threads; ``code`` is serialized by a lock.
    """

    def __init__(self):
        self._codes: dict[Formula, int] = {}
        self._formulas: list[Formula] = []
        self._lock = threading.Lock()

    def code(self, f: Formula) -> int:
        c = self._codes.get(f)
        if c is None:
            with self._lock:
                c = self._codes.get(f)
                if c is None:
                    c = len(self._formulas)
                    self._formulas.append(f)
                    self._codes[f] = c
        return c

    def decode(self, c: int) -> Formula:
        return self._formulas[c]

    def __len__(self):
        return len(self._formulas)

    def __contains__(self, f):
        return f in self._codes


def intern_code(f: Formula, interner: Interner) -> int:
    return interner.code(f)


def tau(f: Formula, interner: Interner) -> Formula:
    """Bang-free image of ``f``: indexed atoms go to odd indices, banged
    formulas to even-indexed atoms named by their code.  Named atoms are
    outside the indexed family and are kept as they are."""
    if isinstance(f, Var):
        return var(2 * f.index + 1) if f.index is not None else f
    if isinstance(f, One):
        return f
    if isinstance(f, Bang):
        return var(2 * interner.code(f.body))
    if isinstance(f, Tensor):
        return Tensor(tau(f.left, interner), tau(f.right, interner))
    if isinstance(f, RImpl):
        return RImpl(tau(f.arg, interner), tau(f.result, interner))
    if isinstance(f, LImpl):
        return LImpl(tau(f.result, interner), tau(f.arg, interner))
    raise TypeError(f)


def tau_structure(s: Structure, interner: Interner) -> Structure:
    if isinstance(s, Node):
        return Node(tau_structure(s.left, interner), tau_structure(s.right, interner))
    if isinstance(s, Leaf):
        return Leaf(tau(s.formula, interner))
    return s


def tau_sequent(q: Sequent, interner: Interner) -> Sequent:
    return Sequent(tau_structure(q.antecedent, interner), tau(q.succedent, interner))


def untau(f: Formula, interner: Interner) -> Formula:
    """Inverse of :func:`tau` on its image."""
    if isinstance(f, Var):
        if f.index is None:
            return f
        if f.index % 2:
            return var((f.index - 1) // 2)
        return Bang(interner.decode(f.index // 2))
    if isinstance(f, One):
        return f
    if isinstance(f, Tensor):
        return Tensor(untau(f.left, interner), untau(f.right, interner))
    if isinstance(f, RImpl):
        return RImpl(untau(f.arg, interner), untau(f.result, interner))
    if isinstance(f, LImpl):
        return LImpl(untau(f.result, interner), untau(f.arg, interner))
    raise ValueError(f"{f} is not in the image of tau")
