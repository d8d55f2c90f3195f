"""Exhaustive enumeration of small formulas and sequents."""
from __future__ import annotations

from functools import lru_cache
from itertools import product

from .core import EMPTY, ONE, Bang, LImpl, Leaf, Node, RImpl, Sequent, Tensor, Var

__all__ = ["formulas_of_size", "formulas_up_to", "shapes", "sequents_up_to"]


@lru_cache(maxsize=None)
def formulas_of_size(n: int, atoms: tuple = ("a", "b"), unit: bool = False) -> tuple:
    if n < 1:
        return ()
    if n == 1:
        base = [Var(x) for x in atoms]
        return tuple(base + [ONE]) if unit else tuple(base)
    out = [Bang(f) for f in formulas_of_size(n - 1, atoms, unit)]
    for k in range(1, n - 1):
        for l, r in product(formulas_of_size(k, atoms, unit), formulas_of_size(n - 1 - k, atoms, unit)):
            out.append(Tensor(l, r))
            out.append(RImpl(l, r))
            out.append(LImpl(l, r))
    return tuple(out)


def formulas_up_to(n: int, atoms=("a", "b"), unit=False) -> list:
    return [f for k in range(1, n + 1) for f in formulas_of_size(k, tuple(atoms), unit)]


def shapes(max_leaves: int) -> list:
    """Binary tree shapes with 0..max_leaves leaves; leaves are ``None``."""
    by = {1: [Leaf(ONE)]}
    for n in range(2, max_leaves + 1):
        by[n] = [Node(l, r) for k in range(1, n) for l in by[k] for r in by[n - k]]
    return [EMPTY] + [s for n in range(1, max_leaves + 1) for s in by[n]]


def _fill(shape, it):
    if isinstance(shape, Node):
        left = _fill(shape.left, it)
        return Node(left, _fill(shape.right, it))
    if isinstance(shape, Leaf):
        return Leaf(next(it))
    return shape


def sequents_up_to(max_symbols: int = 7, max_leaves: int = 3, atoms=("a", "b"),
                   unit: bool = False) -> list:
    """All sequents whose formula nodes plus commas number at most
    ``max_symbols``, with at most ``max_leaves`` antecedent formulas."""
    atoms = tuple(atoms)
    out = []
    for shape in shapes(max_leaves):
        k = shape.nleaves
        commas = max(k - 1, 0)
        budget = max_symbols - commas
        # distribute budget over k leaves + succedent, each at least 1
        for sizes in _compositions(budget, k + 1):
            pools = [formulas_of_size(n, atoms, unit) for n in sizes]
            for fs in product(*pools):
                out.append(Sequent(_fill(shape, iter(fs[:-1])), fs[-1]))
    return out


def _compositions(total: int, parts: int):
    """Tuples of ``parts`` positive ints with sum at most ``total``."""
    if parts == 0:
        yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
