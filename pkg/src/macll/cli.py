"""Command-line interface (``macll``)."""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Optional

from .calculus import (
    LIGHT_CONFIGS, SystemConfig, check_proof, proof_from_json, proof_to_json,
    proof_to_latex, proof_to_text,
)
from .core import Interner, ParseError, format_sequent, parse_sequent, tau_sequent
from .search import SearchLimits, Searcher, Status, default_limits

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 64, 65


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Verdict:
    status: Status
    certificate: object = None
    millis: float = 0.0

    @property
    def code(self) -> int:
        return {Status.PROVABLE: EXIT_OK, Status.UNPROVABLE: EXIT_NO}.get(self.status, EXIT_UNKNOWN)


def _config(args) -> SystemConfig:
    try:
        return SystemConfig(args.structural or "", args.modal or "")
    except ValueError as e:
        raise InputError(str(e))


def _sequent(text: str):
    try:
        return parse_sequent(text)
    except ParseError as e:
        raise InputError(str(e))


def _limits(args, s) -> SearchLimits:
    base = default_limits(s)
    return SearchLimits(
        max_depth=args.depth or base.max_depth,
        max_antecedent_leaves=args.width or base.max_antecedent_leaves,
        max_contractions=args.contractions if args.contractions is not None else base.max_contractions,
    )


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t) * 1000


def decide(s, config: SystemConfig, via: str = "auto", limits: Optional[SearchLimits] = None) -> Verdict:
    if via == "auto" and config.light:
        from .phi import decide_light
        res, ms = _timed(lambda: decide_light(s, config))
        return Verdict(Status.PROVABLE if res.provable else Status.UNPROVABLE, res, ms)
    res, ms = _timed(lambda: Searcher(config, limits or default_limits(s)).prove(s))
    return Verdict(res.status, res.proof, ms)


def _read_proof(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return proof_from_json(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise InputError(f"cannot read proof from {path}: {e}")


def _emit_proof(p, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(proof_to_json(p), indent=2)
    if fmt == "latex":
        return proof_to_latex(p, standalone=True)
    return proof_to_text(p)


def _add_system(p):
    p.add_argument("--structural", "-S", default="", help="structural labels, e.g. c,w")
    p.add_argument("--modal", "-M", default="", help="modal labels, e.g. k,t,4")


def _add_limits(p):
    p.add_argument("--depth", type=int, help="maximum search depth")
    p.add_argument("--width", type=int, help="maximum antecedent leaves during search")
    p.add_argument("--contractions", type=int, help="contraction budget per branch")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="macll", description="Decide, prove and transform sequents of exponential MacLL systems.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("decide", help="decide a sequent")
    _add_system(p)
    _add_limits(p)
    p.add_argument("--via", choices=("auto", "search"), default="auto")
    p.add_argument("sequent")

    p = sub.add_parser("prove", help="search for a cut-free proof and print it")
    _add_system(p)
    _add_limits(p)
    p.add_argument("--format", choices=("text", "latex", "json"), default="text")
    p.add_argument("sequent")

    p = sub.add_parser("check", help="check a JSON proof file")
    _add_system(p)
    p.add_argument("--allow-cut", action="store_true")
    p.add_argument("file")

    p = sub.add_parser("cutelim", help="eliminate cuts from a JSON proof file")
    _add_system(p)
    p.add_argument("--format", choices=("text", "latex", "json"), default="json")
    p.add_argument("--output", "-o")
    p.add_argument("file")

    p = sub.add_parser("phi", help="print the axiom set of a sequent")
    _add_system(p)
    p.add_argument("sequent")

    p = sub.add_parser("chart", help="print the saturated chart of a sequent")
    _add_system(p)
    p.add_argument("sequent")

    g = sub.add_parser("grammar", help="categorial grammar tools")
    gsub = g.add_subparsers(dest="gcmd", required=True, parser_class=_Parser)
    p = gsub.add_parser("recognize", help="decide whether a string is accepted")
    _add_system(p)
    p.add_argument("--lexicon", required=True)
    p.add_argument("words", nargs="+")
    p = gsub.add_parser("cfg", help="print the equivalent context-free grammar")
    _add_system(p)
    p.add_argument("--lexicon", required=True)

    p = sub.add_parser("selftest", help="compare the light-system decider with search")
    p.add_argument("--size", type=int, default=5, help="maximum symbol count of test sequents")
    p.add_argument("--leaves", type=int, default=3)
    return ap


def _cmd_decide(args) -> int:
    s = _sequent(args.sequent)
    config = _config(args)
    if args.via == "auto" and not config.light:
        print(f"warning: {config} is not a light system; only bounded search is available",
              file=sys.stderr)
    v = decide(s, config, args.via, _limits(args, s))
    print(v.status)
    print(f"time: {v.millis:.1f} ms", file=sys.stderr)
    return v.code


def _cmd_prove(args) -> int:
    s = _sequent(args.sequent)
    config = _config(args)
    res, ms = _timed(lambda: Searcher(config, _limits(args, s)).prove(s))
    print(f"time: {ms:.1f} ms", file=sys.stderr)
    if res.proof is None:
        print(res.status)
        return Verdict(res.status).code
    print(_emit_proof(res.proof, args.format))
    return EXIT_OK


def _cmd_check(args) -> int:
    p = _read_proof(args.file)
    r = check_proof(p, _config(args), allow_cut=args.allow_cut)
    if r:
        print(f"ok: {format_sequent(p.conclusion)}")
        return EXIT_OK
    print(f"invalid at {format_sequent(r.node.conclusion)}: {r.reason}")
    return EXIT_NO


def _cmd_cutelim(args) -> int:
    from .cutelim import eliminate_cut
    config = _config(args)
    p = _read_proof(args.file)
    r = check_proof(p, config, allow_cut=True)
    if not r:
        raise InputError(f"input proof is invalid at {format_sequent(r.node.conclusion)}: {r.reason}")
    q, ms = _timed(lambda: eliminate_cut(p, config))
    print(f"time: {ms:.1f} ms", file=sys.stderr)
    text = _emit_proof(q, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _light(args) -> SystemConfig:
    config = _config(args)
    if not config.light:
        raise InputError(f"{config} is not a light system")
    return config


def _cmd_phi(args) -> int:
    from .phi import phi_for_sequent
    s = _sequent(args.sequent)
    interner = Interner()
    ax = phi_for_sequent(s, _light(args), interner)
    print(f"# goal: {format_sequent(tau_sequent(s, interner))}")
    if len(ax):
        print(ax.dump(interner))
    return EXIT_OK


def _cmd_chart(args) -> int:
    from .phi import decide_light
    s = _sequent(args.sequent)
    res = decide_light(s, _light(args))
    for item in res.decision.chart.items():
        print(format_sequent(item).replace("() |-", "0 |-", 1))
    return EXIT_OK if res.provable else EXIT_NO


def _load_lexicon(path):
    from .grammar import LexiconError, load_lexicon
    try:
        with open(path, encoding="utf-8") as fh:
            return load_lexicon(fh.read())
    except (OSError, LexiconError) as e:
        raise InputError(str(e))


def _cmd_grammar(args) -> int:
    from .grammar import extract_cfg, recognize
    lex = _load_lexicon(args.lexicon)
    config = _config(args)
    if args.gcmd == "cfg":
        if not config.light:
            raise InputError(f"{config} is not a light system")
        print(extract_cfg(lex, config).dump())
        return EXIT_OK
    try:
        ok = recognize(args.words, lex, config)
    except KeyError as e:
        raise InputError(str(e.args[0]))
    print("accepted" if ok else "rejected")
    return EXIT_OK if ok else EXIT_NO


def _cmd_selftest(args) -> int:
    from .corpus import sequents_up_to
    from .phi import Pipeline
    corpus = sequents_up_to(args.size, args.leaves)
    pipe = Pipeline()
    bad = 0
    for config in LIGHT_CONFIGS:
        searcher = Searcher(config, SearchLimits(40, 12))
        for s in corpus:
            r = searcher.prove(s)
            mine = pipe.decide(s, config)
            # an inconclusive search only contradicts a positive verdict
            if mine != r.provable and (mine or r.status is not Status.UNKNOWN):
                bad += 1
                print(f"disagree {config}: {format_sequent(s)}")
    print(f"{len(corpus)} sequents x {len(LIGHT_CONFIGS)} systems, {bad} disagreements")
    return EXIT_OK if bad == 0 else EXIT_NO


_COMMANDS = {
    "decide": _cmd_decide, "prove": _cmd_prove, "check": _cmd_check, "cutelim": _cmd_cutelim,
    "phi": _cmd_phi, "chart": _cmd_chart, "grammar": _cmd_grammar, "selftest": _cmd_selftest,
}


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.cmd](args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
