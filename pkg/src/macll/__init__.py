"""Decision procedures, proof search and cut elimination for exponential
nonassociative Lambek systems, plus categorial grammar tools."""

from .core import (
    EMPTY, ONE, Bang, Interner, Leaf, LImpl, Node, ParseError, RImpl, Sequent, Tensor, Var,
    format_formula, format_sequent, parse_formula, parse_sequent, parse_structure, tau,
)
from .calculus import LIGHT_CONFIGS, Proof, Rule, SystemConfig, active_rules, check_proof
from .search import SearchLimits, Searcher, Status, decide_by_search, prove_bounded
from .chart import closure_set, decide_macll_phi, saturate
from .phi import Pipeline, decide_light, phi0, phi_fixpoint, phi_for_sequent
from .cutelim import eliminate_cut, has_cut, make_cut
from .grammar import cfg_membership, extract_cfg, load_lexicon, recognize

__version__ = "0.1.0"
