import itertools
from pathlib import Path

import pytest

from macll.calculus import LIGHT_CONFIGS, SystemConfig
from macll.core import Leaf, Node, Sequent, Var, parse_formula
from macll.grammar import (
    CFG, GrammarEngine, Lexicon, LexiconError, bracketings, cfg_membership, extract_cfg,
    load_lexicon, recognize,
)
from macll.search import Searcher

FIX = Path(__file__).parent / "fixtures"
PURE = SystemConfig()


def lex(name):
    return load_lexicon((FIX / name).read_text())


def strings(alphabet, n):
    for k in range(1, n + 1):
        yield from itertools.product(alphabet, repeat=k)


class TestLoad:
    def test_basic(self):
        L = load_lexicon("sentence: s\njohn : np\nsleeps : np \\ s")
        assert L.alphabet == ("john", "sleeps") and L.sentence_type is Var("s")

    def test_missing_header(self):
        with pytest.raises(LexiconError, match="sentence"):
            load_lexicon("john : np")

    def test_alternatives(self):
        L = load_lexicon("sentence: s\na : s ; s / s")
        assert L.assignment["a"] == (Var("s"), parse_formula("s / s"))

    def test_duplicates_merge(self):
        with pytest.warns(UserWarning, match="duplicate"):
            L = load_lexicon("sentence: s\na : s\na : s / s ; s")
        assert len(L.assignment["a"]) == 2

    def test_syntax_error_has_line(self):
        with pytest.raises(LexiconError, match="line 2"):
            load_lexicon("sentence: s\na : s * * s")

    def test_comments(self):
        L = lex("share.lex")
        assert L.assignment["x"] == (parse_formula("!np"),)


class TestRecognize:
    def test_john_sleeps(self):
        L = lex("john.lex")
        assert recognize(["john", "sleeps"], L, PURE)
        assert not recognize(["sleeps", "john"], L, PURE)

    def test_aplus(self):
        L = lex("aplus.lex")
        assert recognize(["a", "a", "a"], L, PURE)

    def test_empty_string_rejected(self):
        assert not recognize([], lex("aplus.lex"), PURE)

    def test_unknown_word(self):
        with pytest.raises(KeyError):
            recognize(["bob"], lex("john.lex"), PURE)

    def test_contraction_shares_resource(self):
        L = lex("share.lex")
        assert recognize(["x", "v"], L, SystemConfig("c", "t"))
        assert not recognize(["x", "v"], L, SystemConfig("", "t"))
        assert recognize(["y", "y", "v"], L, PURE)

    def test_k_system_uses_search(self):
        L = lex("share.lex")
        assert recognize(["x", "v"], L, SystemConfig("c", "k,t"))
        assert not recognize(["v", "x"], L, SystemConfig("c", "k,t"))

    @pytest.mark.parametrize("name, cfg", [("john.lex", PURE), ("share.lex", SystemConfig("c", "t")),
                                           ("share.lex", SystemConfig("w", "t,4"))])
    def test_agrees_with_search_over_bracketings(self, name, cfg):
        L = lex(name)
        eng = GrammarEngine(L, cfg)
        s = Searcher(cfg)
        for w in strings(L.alphabet, 3):
            expected = any(
                s.prove(Sequent(g, L.sentence_type)).provable
                for choice in itertools.product(*(L.assignment[x] for x in w))
                for g in bracketings(list(choice)))
            assert eng.recognize(w) == expected, w

    def test_conservative_for_bang_free(self):
        L = lex("aplus.lex")
        base = [recognize(w, L, PURE) for w in strings(L.alphabet, 4)]
        for cfg in LIGHT_CONFIGS:
            eng = GrammarEngine(L, cfg)
            assert [eng.recognize(w) for w in strings(L.alphabet, 4)] == base

    def test_monotone_in_assignment(self):
        L = lex("share.lex")
        bigger = Lexicon({**L.assignment, "v": L.assignment["v"] + (parse_formula("np \\ s"),)},
                         L.sentence_type)
        cfg = SystemConfig("c", "t")
        small, big = GrammarEngine(L, cfg), GrammarEngine(bigger, cfg)
        for w in strings(L.alphabet, 4):
            assert not small.recognize(w) or big.recognize(w)


def test_bracketings_catalan():
    assert [sum(1 for _ in bracketings([Var(f"x{i}") for i in range(n)])) for n in range(1, 6)] == [1, 1, 2, 5, 14]


class TestCFG:
    def test_john_grammar(self):
        g = extract_cfg(lex("john.lex"), PURE)
        assert ("[s]", ("[np]", "[np \\ s]")) in g.productions
        assert ("[np]", ("'john'",)) in g.productions
        lang = {w for w in strings(("john", "sleeps"), 4) if cfg_membership(g, w)}
        assert lang == {("john", "sleeps")}

    def test_aplus_grammar(self):
        g = extract_cfg(lex("aplus.lex"), PURE)
        for w in strings(("a",), 6):
            assert cfg_membership(g, w)

    def test_empty_language(self):
        L = load_lexicon("sentence: s\nb : np\nc : np / np")
        g = extract_cfg(L, PURE)
        eng = GrammarEngine(L, PURE)
        for w in strings(L.alphabet, 4):
            assert not cfg_membership(g, w) and not eng.recognize(w)

    def test_membership_basics(self):
        g = CFG(frozenset({"[s]"}), frozenset({"a"}), frozenset({("[s]", ("'a'",))}), "[s]")
        assert cfg_membership(g, ["a"])
        assert not cfg_membership(g, ["b"])
        assert not cfg_membership(g, [])

    def test_unit_closure(self):
        g = CFG(frozenset({"[s]", "[t]"}), frozenset({"a"}),
                frozenset({("[t]", ("'a'",)), ("[s]", ("[t]",)), ("[s]", ("[s]", "[s]"))}), "[s]")
        assert cfg_membership(g, ["a", "a", "a"])

    def test_rejects_undeclared(self):
        with pytest.raises(ValueError):
            CFG(frozenset({"[s]"}), frozenset(), frozenset({("[s]", ("'a'",))}), "[s]")

    def test_dump(self):
        text = extract_cfg(lex("john.lex"), PURE).dump().splitlines()
        assert text[0] == "start: [s]"
        assert "[s] -> [np] [np \\ s]" in text and "[np] -> 'john'" in text

    @pytest.mark.parametrize("name, cfg", [("john.lex", PURE), ("aplus.lex", PURE),
                                           ("share.lex", SystemConfig("c", "t"))])
    def test_same_language_up_to_five(self, name, cfg):
        L = lex(name)
        eng = GrammarEngine(L, cfg)
        g = eng.cfg()
        for w in strings(L.alphabet, 5):
            assert eng.recognize(w) == cfg_membership(g, w), w
