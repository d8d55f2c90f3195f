"""End-to-end acceptance criteria 1-7.

Each test prints one ``criterion N: PASS|FAIL`` line; the lines are repeated
in the pytest terminal summary.  Set ``MACLL_CHART_SAMPLE=all`` to run the
chart/brute-force comparison on every closure class instead of a sample.
"""
import itertools
import os
import random
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import pytest

from conftest import report
from macll.calculus import LIGHT_CONFIGS, SystemConfig, check_proof
from macll.chart import ChartDecider, closure_of, saturate
from macll.cli import decide
from macll.core import (
    EMPTY, Bang, Leaf, Node, RImpl, Sequent, format_sequent, leaf_paths, parse_sequent, var,
)
from macll.corpus import sequents_up_to
from macll.cutelim import eliminate_cut, has_cut, make_cut
from macll.grammar import GrammarEngine, cfg_membership, load_lexicon
from macll.phi import Pipeline, decide_light, formula_set
from macll.search import SearchLimits, Searcher, Status
from oracles import composable_pairs, forward_closure, renaming_key

pytestmark = pytest.mark.acceptance

FIX = Path(__file__).parent / "fixtures"


class RecordingDecider(ChartDecider):
    """Chart cache that remembers every (closure, axioms) class it saturated."""

    def __init__(self):
        super().__init__()
        self.classes: dict = {}
        self.max_fill = 0.0

    def chart(self, formulas, axioms):
        before = self.saturations
        ch = super().chart(formulas, axioms)
        if self.saturations != before:
            self.max_fill = max(self.max_fill, len(ch) / ch.bound)
            key = renaming_key(ch.closure.formulas, ch.axioms)
            self.classes.setdefault(key, (ch.closure.formulas, ch.axioms))
        return ch


@dataclass
class Sweep:
    pipeline: Pipeline
    seconds: float = 0.0
    rows: list = field(default_factory=list)
    pools: dict = field(default_factory=dict)      # config -> [Proof]
    failures: list = field(default_factory=list)


@pytest.fixture(scope="module")
def sweep():
    pipe = Pipeline()
    pipe.decider = RecordingDecider()
    corpus = sequents_up_to(7, 3)
    out = Sweep(pipe)
    start = time.perf_counter()
    for cfg in LIGHT_CONFIGS:
        searcher = Searcher(cfg, SearchLimits(max_depth=40, max_antecedent_leaves=12))
        pool, unknown = [], 0
        for s in corpus:
            mine = pipe.decide(s, cfg)
            r = searcher.prove(s)
            if r.status is Status.UNKNOWN:
                unknown += 1
                if mine:
                    out.failures.append((cfg, s, "pipeline provable, search unknown"))
            elif r.provable != mine:
                out.failures.append((cfg, s, f"pipeline {mine}, search {r.status}"))
            if r.provable:
                pool.append(r.proof)
        out.pools[cfg] = pool
        out.rows.append((cfg, len(pool), unknown))
    out.seconds = time.perf_counter() - start
    return out


def test_1_oracle_equivalence(sweep):
    n = len(sequents_up_to(7, 3))
    unknown = sum(u for _, _, u in sweep.rows)
    ok = not sweep.failures and sweep.seconds < 600
    report(1, ok, f"{n} sequents x 16 systems, {len(sweep.failures)} disagreements, "
                  f"{unknown} search-unknown (all pipeline-unprovable), {sweep.seconds:.0f} s")
    for cfg, s, why in sweep.failures[:20]:
        print(f"  {cfg}: {format_sequent(s)}: {why}")
    assert not sweep.failures
    assert sweep.seconds < 600


def test_2_fixtures():
    checks = []
    for cfg in LIGHT_CONFIGS:
        want = {"!a |- a": "t" in cfg.modal,
                "!a |- !a * !a": "c" in cfg.structural,
                "!a |- 1": "w" in cfg.structural}
        for text, expected in want.items():
            s = parse_sequent(text)
            checks.append((f"{text} in {cfg}", decide_light(s, cfg).provable == expected))
            r = Searcher(cfg).prove(s)
            checks.append((f"{text} in {cfg} (search)", r.provable == expected))
    ck = SystemConfig("c", "k,t")
    r = Searcher(ck).prove(parse_sequent("!a * !b |- (a * b) * (a * b)"))
    checks.append(("CK example", r.provable and check_proof(r.proof, ck).ok and not has_cut(r.proof)))
    big = parse_sequent("!a * !b |- (!a * !b) * (!a * !b)")
    checks.append(("contraction example in ({c},{k})", decide(big, SystemConfig("c", "k")).status is Status.PROVABLE))
    checks.append(("contraction example in ({c},{})", not decide_light(big, SystemConfig("c", "")).provable))
    checks.append(("contraction example in ({c},{}) (search)",
                   Searcher(SystemConfig("c", "")).prove(big).status is Status.UNPROVABLE))
    bad = [name for name, ok in checks if not ok]
    report(2, not bad, f"{len(checks) - len(bad)}/{len(checks)} fixture checks" + (f"; failed: {bad}" if bad else ""))
    assert not bad


def _k_pool(cfg):
    s = Searcher(cfg, SearchLimits(24, 8, 2))
    return [r.proof for r in map(s.prove, sequents_up_to(5, 3)) if r.provable]


def test_3_cut_admissibility(sweep):
    pairs = 0
    missing = []
    for cfg, pool in sweep.pools.items():
        searcher = Searcher(cfg, SearchLimits(max_depth=40, max_antecedent_leaves=12))
        seen = set()
        for _, _, _, concl in composable_pairs([p.conclusion for p in pool], 10):
            pairs += 1
            if concl in seen:
                continue
            seen.add(concl)
            if not searcher.prove(concl).provable:
                missing.append((cfg, concl))

    configs = list(LIGHT_CONFIGS) + [SystemConfig("c", "k,t"), SystemConfig("c,w", "k"),
                                     SystemConfig("w", "k,4"), SystemConfig("", "k,t,4")]
    pools = {cfg: sweep.pools.get(cfg) or _k_pool(cfg) for cfg in configs}
    by_succ = {cfg: defaultdict(list) for cfg in configs}
    for cfg, pool in pools.items():
        for p in pool:
            by_succ[cfg][p.conclusion.succedent].append(p)
    rng = random.Random(2024)
    bad_cuts = []
    done = 0
    while done < 200:
        cfg = configs[done % len(configs)]
        right = rng.choice(pools[cfg])
        slots = [(path, f) for path, f in leaf_paths(right.conclusion.antecedent) if by_succ[cfg][f]]
        if not slots:
            continue
        path, f = rng.choice(slots)
        cut = make_cut(rng.choice(by_succ[cfg][f]), right, path)
        assert check_proof(cut, cfg, allow_cut=True)
        try:
            out = eliminate_cut(cut, cfg)
            if has_cut(out) or out.conclusion is not cut.conclusion or not check_proof(out, cfg):
                bad_cuts.append((cfg, cut.conclusion, "bad output"))
        except Exception as e:          # noqa: BLE001 - reported below
            bad_cuts.append((cfg, cut.conclusion, repr(e)))
        done += 1
    ok = not missing and not bad_cuts
    report(3, ok, f"{pairs} composable pairs, {len(missing)} cut conclusions without a cut-free proof; "
                  f"{done} random cut proofs, {len(bad_cuts)} failures")
    for item in (missing + bad_cuts)[:20]:
        print("  ", item)
    assert ok


def _family(k):
    """((( !p0, !(p0\\p1) ), !(p1\\p2) ), ...) |- pk"""
    g = Leaf(Bang(var(0)))
    for i in range(k):
        g = Node(g, Leaf(Bang(RImpl(var(i), var(i + 1)))))
    return Sequent(g, var(k))


def test_4_stabilization_bounds(sweep):
    runs = list(sweep.pipeline._phi.values())
    over_phi = [a for a in runs if a.iterations > a.bound]
    extra = Pipeline()
    for k in (2, 5, 10, 20):
        for cfg in LIGHT_CONFIGS:
            extra.decide(_family(k), cfg)
    runs2 = list(extra._phi.values())
    over_phi += [a for a in runs2 if a.iterations > a.bound]
    most = max(a.iterations for a in runs + runs2)
    charts = sweep.pipeline.decider.saturations + extra.decider.saturations
    ok = not over_phi and sweep.pipeline.decider.max_fill <= 1.0
    report(4, ok, f"{len(runs) + len(runs2)} fixpoint runs (max {most} rounds), none above N^2; "
                  f"{charts} saturations, largest chart at {sweep.pipeline.decider.max_fill:.1%} "
                  f"of m+m^2+m^3")
    assert ok


def _restricted(formulas):
    for c in formulas:
        yield Sequent(EMPTY, c)
        for x in formulas:
            yield Sequent(Leaf(x), c)
            for y in formulas:
                yield Sequent(Node(Leaf(x), Leaf(y)), c)


def test_5_chart_vs_brute_force(sweep):
    classes = sorted(sweep.pipeline.decider.classes.values(),
                     key=lambda fa: (sorted(map(format_sequent, fa[1])),
                                     sorted(str(f) for f in fa[0])))
    want = os.environ.get("MACLL_CHART_SAMPLE", "150")
    if want == "all":
        sample = classes
    else:
        sample = random.Random(5).sample(classes, min(int(want), len(classes)))
    wrong = []
    restricted = derived_checked = 0
    start = time.perf_counter()
    for formulas, axioms in sample:
        closure = closure_of(formulas, axioms)
        ch = saturate(closure, axioms)
        brute = forward_closure(closure, axioms, max_leaves=4)
        fs = list(closure)
        for s in _restricted(fs):
            restricted += 1
            if ch.contains(s) != (s in brute):
                wrong.append((s, "restricted"))
        for s in brute:
            derived_checked += 1
            if not ch.proves(s):
                wrong.append((s, "derived but not labelled"))
    secs = time.perf_counter() - start
    ok = not wrong
    report(5, ok, f"{len(sample)} of {len(classes)} closure classes (up to atom renaming; "
                  f"{'all' if want == 'all' else 'seeded sample'}): {restricted} restricted verdicts, "
                  f"{derived_checked} brute-force-derived sequents labelled, "
                  f"{len(wrong)} disagreements, {secs:.0f} s")
    for s, why in wrong[:20]:
        print(f"  {format_sequent(s)}: {why}")
    assert ok


LEXICONS = [("john.lex", SystemConfig()), ("aplus.lex", SystemConfig()), ("share.lex", SystemConfig("c", "t"))]


def test_6_context_freeness():
    start = time.perf_counter()
    total = 0
    bad = []
    for name, cfg in LEXICONS:
        lex = load_lexicon((FIX / name).read_text())
        eng = GrammarEngine(lex, cfg)
        g = eng.cfg()
        for n in range(1, 7):
            for w in itertools.product(lex.alphabet, repeat=n):
                total += 1
                if eng.recognize(w) != cfg_membership(g, w):
                    bad.append((name, w))
    secs = time.perf_counter() - start
    ok = not bad and secs < 120
    report(6, ok, f"3 lexicons, {total} strings of length 1-6, {len(bad)} disagreements, {secs:.1f} s")
    assert ok


def _time_decide(s, cfg, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        decide_light(s, cfg)
        best = min(best, time.perf_counter() - t)
    return best


def test_7_polynomial_growth():
    cfg = SystemConfig("c,w", "t,4")
    by_n = {}
    for k in range(1, 40):
        s = _family(k)
        by_n.setdefault(len(formula_set(s)), s)
    assert all(decide_light(s, cfg).provable for s in by_n.values())

    def nearest(n):
        return min(by_n, key=lambda m: abs(m - n))

    ratios = []
    for n in (10, 15, 20, 25, 30):
        lo, hi = nearest(n), nearest(2 * n)
        ratios.append((lo, hi, _time_decide(by_n[hi], cfg) / _time_decide(by_n[lo], cfg)))
    worst = max(r for _, _, r in ratios)
    ok = worst < 40
    detail = ", ".join(f"N {lo}->{hi}: x{r:.1f}" for lo, hi, r in ratios)
    report(7, ok, f"doubling N multiplies decide time by at most {worst:.1f} ({detail})")
    assert ok
