"""Natural-language puzzles to propositional logic, answered by a SAT back end."""

from .logic import (
    And,
    Atom,
    Const,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Symbol,
    Vocabulary,
    Xor,
    at_least,
    at_most,
    evaluate,
    exactly_one,
    free_symbols,
)
from .parser import ParseError, parse, to_text
from .reasoner import (
    Backbone,
    EncodingRelation,
    KnowledgeBase,
    QueryStatus,
    backbone,
    classify,
    consistent,
    entails,
    equivalent,
    relation,
)
from .sat import enumerate_models, solve, to_cnf, to_dimacs

__version__ = "0.1.0"

__all__ = [
    "And",
    "Atom",
    "Backbone",
    "Const",
    "EncodingRelation",
    "Formula",
    "Iff",
    "Implies",
    "KnowledgeBase",
    "Not",
    "Or",
    "ParseError",
    "QueryStatus",
    "Symbol",
    "Vocabulary",
    "Xor",
    "at_least",
    "at_most",
    "backbone",
    "classify",
    "consistent",
    "entails",
    "enumerate_models",
    "equivalent",
    "evaluate",
    "exactly_one",
    "free_symbols",
    "parse",
    "relation",
    "solve",
    "to_cnf",
    "to_dimacs",
    "to_text",
]
