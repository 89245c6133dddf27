"""Pragmatic programming-by-example over a small regex language.

The package enumerates a finite family of anchored binary-string regexes,
relates them to example strings through a meaning matrix, and runs a chain
of listener/speaker models to guess which regex a person means from the
examples they chose.  A session service and CLI expose the loop
interactively; a simulation harness plays the same game with synthetic
speakers.
"""

from .domain import (
    Domain,
    MeaningMatrix,
    Sign,
    Utterance,
    build_matrix,
    consistent_set,
    full_domain,
    load_matrix,
    make_domain,
    save_matrix,
    sign_extend,
    utterance_universe,
)
from .errors import PragmexError
from .inference import (
    ListenerKind,
    Posterior,
    TiePolicy,
    best_guess,
    literal_listener,
    posterior,
    pragmatic_listener,
    speaker_sequence_prob,
    speaker_step,
)
from .regexlang import RegexAst, enumerate_grammar, explain, matches, parse, render

__version__ = "0.1.0"

__all__ = [
    "Domain",
    "ListenerKind",
    "MeaningMatrix",
    "Posterior",
    "PragmexError",
    "RegexAst",
    "Sign",
    "TiePolicy",
    "Utterance",
    "best_guess",
    "build_matrix",
    "consistent_set",
    "enumerate_grammar",
    "explain",
    "full_domain",
    "literal_listener",
    "load_matrix",
    "make_domain",
    "matches",
    "parse",
    "posterior",
    "pragmatic_listener",
    "render",
    "save_matrix",
    "sign_extend",
    "speaker_sequence_prob",
    "speaker_step",
    "utterance_universe",
]
