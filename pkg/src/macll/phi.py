"""Axiom sets that replace the exponential in light systems.

For a finite formula set X, every banged member !A is represented by the
atom ``p_{2n}`` where n is the interner code of A.  The base set records what
the structural and dereliction rules allow for each such atom; the fixpoint
then adds atom-to-atom axioms ``p_A |- p_B`` whenever promotion would derive
``!A |- !B`` from what is already known.  Provability of a light-system
sequent reduces to MacLL consequence from the resulting finite set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .calculus import SystemConfig
from .chart import ChartDecider, Decision, decide_macll_phi, saturate, closure_of
from .core import (
    ONE, Bang, Formula, Interner, Leaf, Sequent, Tensor, format_sequent, leaves,
    sbf_all, sort_key, tau, tau_sequent, var,
)

__all__ = [
    "AxiomSet", "KConfigError", "phi0", "phi_fixpoint", "phi_for_sequent",
    "preimage", "PipelineResult", "decide_light", "Pipeline",
]


class KConfigError(ValueError):
    """The axiom-set reduction only exists for systems without k."""


def _require_light(config: SystemConfig):
    if not config.light:
        raise KConfigError(f"no axiom-set reduction for {config} (k in M)")


@dataclass(frozen=True)
class AxiomSet:
    axioms: frozenset
    iterations: int = 0
    bound: int = 0          # N*N for the X the set was built from

    def __iter__(self):
        return iter(sorted(self.axioms, key=_axiom_key))

    def __len__(self):
        return len(self.axioms)

    def __contains__(self, s):
        return s in self.axioms

    def dump(self, interner: Optional[Interner] = None) -> str:
        lines = []
        for ax in self:
            line = format_sequent(ax)
            if interner is not None:
                line += f"    # {format_sequent(preimage(ax, interner))}"
            lines.append(line)
        return "\n".join(lines)


def _axiom_key(s: Sequent):
    return (format_sequent(s),)


def _p(a: Formula, interner: Interner) -> Formula:
    return var(2 * interner.code(a))


def preimage(ax: Sequent, interner: Interner) -> Sequent:
    """The banged sequent an axiom stands for (``!A |- A``, ``!A |- !A*!A``,
    ``!A |- 1`` or ``!A |- !B``)."""
    from .core import untau
    return Sequent(untau(ax.antecedent.formula, interner), untau(ax.succedent, interner))


def _banged(X: Iterable[Formula]) -> list:
    return sorted((f for f in X if isinstance(f, Bang)), key=sort_key)


def phi0(X: Iterable[Formula], config: SystemConfig, interner: Interner) -> AxiomSet:
    _require_light(config)
    out = set()
    for b in _banged(X):
        p = _p(b.body, interner)
        if "t" in config.modal:
            out.add(Sequent(p, tau(b.body, interner)))
        if "c" in config.structural:
            out.add(Sequent(p, Tensor(p, p)))
        if "w" in config.structural:
            out.add(Sequent(p, ONE))
    return AxiomSet(frozenset(out))


Decider = Callable[[list, frozenset], list]


def phi_fixpoint(X: Iterable[Formula], config: SystemConfig, interner: Interner,
                 macll_decider: Optional[Decider] = None) -> AxiomSet:
    """Least fixpoint of the promotion step over X.

    ``macll_decider(goals, axioms)`` must return one boolean per goal; the
    default saturates a single chart per round for all candidate checks.
    """
    _require_light(config)
    X = frozenset(X)
    decider = macll_decider or ChartDecider()
    base = phi0(X, config, interner)
    axioms = set(base.axioms)
    bangs = _banged(X)
    n = len(X)
    four = "4" in config.modal
    pairs = []
    for a in bangs:
        pa = _p(a.body, interner)
        ta = tau(a.body, interner)
        for b in bangs:
            pb = _p(b.body, interner)
            pairs.append((Sequent(pa, pb), ta, pa, tau(b.body, interner)))
    iterations = 0
    while True:
        todo = [x for x in pairs if x[0] not in axioms]
        if not todo:
            break
        goals = []
        for _, ta, pa, tb in todo:
            goals.append(Sequent(ta, tb))
            if four:
                goals.append(Sequent(pa, tb))
        verdicts = decider(goals, frozenset(axioms))
        added = []
        for i, x in enumerate(todo):
            ok = (verdicts[2 * i] or verdicts[2 * i + 1]) if four else verdicts[i]
            if ok:
                added.append(x[0])
        if not added:
            break
        iterations += 1
        axioms.update(added)
    assert iterations <= n * n, (iterations, n)
    return AxiomSet(frozenset(axioms), iterations, n * n)


def formula_set(s: Sequent) -> frozenset:
    return sbf_all(leaves(s.antecedent) + [s.succedent])


def phi_for_sequent(s: Sequent, config: SystemConfig, interner: Interner,
                    macll_decider: Optional[Decider] = None) -> AxiomSet:
    return phi_fixpoint(formula_set(s), config, interner, macll_decider)


@dataclass
class PipelineResult:
    provable: bool
    translated: Sequent
    axioms: AxiomSet
    decision: Decision

    def __bool__(self):
        return self.provable


def decide_light(s: Sequent, config: SystemConfig, interner: Optional[Interner] = None,
                 decider: Optional[ChartDecider] = None) -> PipelineResult:
    """Decide ``s`` in a light system via the axiom-set reduction."""
    _require_light(config)
    interner = interner or Interner()
    decider = decider or ChartDecider()
    ax = phi_for_sequent(s, config, interner, decider)
    t = tau_sequent(s, interner)
    chart = decider.chart(leaves(t.antecedent) + [t.succedent], ax.axioms)
    return PipelineResult(chart.proves(t), t, ax, decide_macll_phi(t, ax.axioms, chart))


class Pipeline:
    """Reusable light-system decider: one interner, shared chart cache and a
    cache of axiom sets keyed by (formula set, config)."""

    def __init__(self):
        self.interner = Interner()
        self.decider = ChartDecider()
        self._phi: dict = {}

    def axioms(self, X: frozenset, config: SystemConfig) -> AxiomSet:
        key = (X, config)
        got = self._phi.get(key)
        if got is None:
            got = phi_fixpoint(X, config, self.interner, self.decider)
            self._phi[key] = got
        return got

    def decide(self, s: Sequent, config: SystemConfig) -> bool:
        _require_light(config)
        ax = self.axioms(formula_set(s), config)
        t = tau_sequent(s, self.interner)
        return self.decider.chart(leaves(t.antecedent) + [t.succedent], ax.axioms).proves(t)
