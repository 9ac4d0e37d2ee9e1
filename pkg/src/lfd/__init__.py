"""Toolkit for the logic of functional dependence: model checking over teams
of assignments, satisfiability via syntactic types, Hilbert and sequent proof
checking with interpolation, representation of abstract dependence relations,
a first-order translation, and relational semantics with filtration."""

from .formulas import (And, Announce, Bot, Box, Compare, CondDep, DepAtom,
                       Formula, Indep, Learn, Not, Pred, Top, closure,
                       desugar, eliminate_terms, free_vars, reduce_learn,
                       rename)
from .models import DependenceModel, load_model
from .parser import format_formula, parse, parse_sequent

__all__ = [
    "And", "Announce", "Bot", "Box", "Compare", "CondDep", "DepAtom",
    "DependenceModel", "Formula", "Indep", "Learn", "Not", "Pred", "Top",
    "closure", "desugar", "eliminate_terms", "format_formula", "free_vars",
    "load_model", "parse", "parse_sequent", "reduce_learn", "rename",
]

__version__ = "0.1.0"
