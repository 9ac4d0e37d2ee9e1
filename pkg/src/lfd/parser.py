"""Concrete syntax: tokenizer, recursive-descent parser and pretty-printer.

Grammar (ASCII), loosest to tightest: ``<->`` < ``->`` < ``|`` < ``&`` <
negation/modalities.  ``->`` and ``<->`` associate to the right, ``|`` and
``&`` to the left.  Atoms: ``Name(t1,...,tn)``, ``D{X}y`` (optionally
``D{X}y|(phi)`` for conditional dependence, or ``D{X}{Y}`` for a set target),
``C y``, ``I{X}{Y}`` / ``I{X}{Y}|{Z}``, ``GEQ{X}{Y}{Z}``, ``true``, ``false``.
Prefixes: ``!``, ``box{X}``, ``dia{X}``, ``A``, ``E``, ``all{X}``, ``ex{X}``,
``[learn x,y]``, ``[ann phi]``.  Function terms ``f(t1,...,tk)`` may appear in
predicate and dependence positions.
"""

from __future__ import annotations

import re
from typing import Optional, Tuple

from .formulas import (AllQ, And, Announce, Bot, Box, Compare, CondDep,
                       ConstAtom, DepAtom, DepAtomT, Dia, ExQ, Exis, Formula,
                       Iff, Imp, Indep, Learn, MultiDep, Not, Or, Pred, PredT,
                       Term, TermApp, TermVar, Top, Univ, term_key)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 0):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<seq>=>)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(){},;|&!\[\]])
""", re.VERBOSE)


def tokenize(text: str):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        value = m.group(0)
        if m.lastgroup != "ws":
            tokens.append((value, line, col))
        for ch in value:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    tokens.append((None, line, col))  # end marker
    return tokens


class _Parser:
    def __init__(self, text: str, predicates: Optional[dict] = None,
                 functions: Optional[dict] = None):
        self.tokens = tokenize(text)
        self.pos = 0
        # name -> arity; seeded from declarations, extended by first use
        self.predicates = dict(predicates) if predicates else {}
        self.functions = dict(functions) if functions else {}
        self._declared_preds = set(predicates or ())
        self._declared_funcs = set(functions or ())

    # -- token helpers

    def peek(self, ahead: int = 0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)][0]

    def where(self) -> Tuple[int, int]:
        _, line, col = self.tokens[min(self.pos, len(self.tokens) - 1)]
        return line, col

    def take(self, expected: Optional[str] = None) -> str:
        tok, line, col = self.tokens[self.pos]
        if tok is None:
            raise ParseError(f"unexpected end of input"
                             + (f", expected {expected!r}" if expected else ""),
                             line, col)
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r} but found {tok!r}", line, col)
        self.pos += 1
        return tok

    def error(self, msg: str):
        line, col = self.where()
        raise ParseError(msg, line, col)

    # -- arity bookkeeping

    def _check_arity(self, table: dict, declared: set, kind: str,
                     name: str, arity: int) -> None:
        if name in table:
            if table[name] != arity:
                self.error(f"{kind} {name!r} used with arity {arity}, "
                           f"expected {table[name]}")
        elif name in declared:
            self.error(f"{kind} {name!r} is not declared")
        else:
            table[name] = arity

    # -- grammar

    def parse_formula(self) -> Formula:
        return self.parse_iff()

    def parse_iff(self) -> Formula:
        left = self.parse_imp()
        if self.peek() == "<->":
            self.take()
            return Iff(left, self.parse_iff())
        return left

    def parse_imp(self) -> Formula:
        left = self.parse_or()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.parse_imp())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.parse_unary())
        if tok == "box" and self.peek(1) == "{":
            self.take()
            return Box(self.parse_varset(), self.parse_unary())
        if tok == "dia" and self.peek(1) == "{":
            self.take()
            return Dia(self.parse_varset(), self.parse_unary())
        if tok == "all" and self.peek(1) == "{":
            self.take()
            return AllQ(self.parse_varset(), self.parse_unary())
        if tok == "ex" and self.peek(1) == "{":
            self.take()
            return ExQ(self.parse_varset(), self.parse_unary())
        if tok == "A":
            self.take()
            return Univ(self.parse_unary())
        if tok == "E":
            self.take()
            return Exis(self.parse_unary())
        if tok == "[":
            self.take()
            head = self.peek()
            if head == "learn":
                self.take()
                names = []
                if self.peek() != "]":
                    names.append(self.take_ident())
                    while self.peek() == ",":
                        self.take()
                        names.append(self.take_ident())
                self.take("]")
                return Learn(frozenset(names), self.parse_unary())
            if head == "ann":
                self.take()
                ann = self.parse_formula()
                self.take("]")
                return Announce(ann, self.parse_unary())
            self.error(f"expected 'learn' or 'ann' after '[', found {head!r}")
        return self.parse_atom()

    def take_ident(self) -> str:
        tok, line, col = self.tokens[self.pos]
        if tok is None or not re.match(r"[A-Za-z_][A-Za-z0-9_]*\Z", tok):
            raise ParseError(f"expected identifier, found {tok!r}", line, col)
        self.pos += 1
        return tok

    def parse_varset(self) -> frozenset:
        self.take("{")
        names = []
        if self.peek() != "}":
            names.append(self.take_ident())
            while self.peek() == ",":
                self.take()
                names.append(self.take_ident())
        self.take("}")
        return frozenset(names)

    def parse_term(self) -> Term:
        name = self.take_ident()
        if self.peek() == "(":
            self.take("(")
            args = []
            if self.peek() != ")":
                args.append(self.parse_term())
                while self.peek() == ",":
                    self.take()
                    args.append(self.parse_term())
            self.take(")")
            self._check_arity(self.functions, self._declared_funcs,
                              "function", name, len(args))
            return TermApp(name, tuple(args))
        return TermVar(name)

    def parse_termset(self) -> frozenset:
        self.take("{")
        terms = []
        if self.peek() != "}":
            terms.append(self.parse_term())
            while self.peek() == ",":
                self.take()
                terms.append(self.parse_term())
        self.take("}")
        return frozenset(terms)

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if tok == "true":
            self.take()
            return Top()
        if tok == "false":
            self.take()
            return Bot()
        if tok == "(":
            self.take()
            f = self.parse_formula()
            self.take(")")
            return f
        if tok == "C" and self.peek(1) != "(":
            self.take()
            return ConstAtom(self.take_ident())
        if tok == "D" and self.peek(1) == "{":
            return self.parse_dep_atom()
        if tok == "I" and self.peek(1) == "{":
            self.take()
            xs = self.parse_varset()
            ys = self.parse_varset()
            cond = None
            if self.peek() == "|" and self.peek(1) == "{":
                self.take()
                cond = self.parse_varset()
            return Indep(xs, ys, cond)
        if tok == "GEQ" and self.peek(1) == "{":
            self.take()
            return Compare(self.parse_varset(), self.parse_varset(),
                           self.parse_varset())
        if tok is not None and re.match(r"[A-Za-z_][A-Za-z0-9_]*\Z", tok):
            return self.parse_pred()
        shown = "end of input" if tok is None else repr(tok)
        self.error(f"expected a formula, found {shown}")

    def parse_dep_atom(self) -> Formula:
        self.take("D")
        sources = self.parse_termset()
        if self.peek() == "{":
            ys = self.parse_varset()
            if any(isinstance(t, TermApp) for t in sources):
                self.error("a set-valued dependence target requires plain variables")
            return MultiDep(frozenset(t.name for t in sources), ys)
        target = self.parse_term()
        if isinstance(target, TermVar) and not any(
                isinstance(t, TermApp) for t in sources):
            xs = frozenset(t.name for t in sources)
            # 'D{X}y|(phi)' is conditional dependence; plain '|' stays a disjunction
            if self.peek() == "|" and self.peek(1) == "(":
                self.take()
                self.take("(")
                cond = self.parse_formula()
                self.take(")")
                return CondDep(xs, target.name, cond)
            return DepAtom(xs, target.name)
        return DepAtomT(sources, target)

    def parse_pred(self) -> Formula:
        name = self.take_ident()
        if name in ("A", "E"):
            self.error(f"{name!r} is a reserved modality, not a predicate name")
        self.take("(")
        terms = []
        if self.peek() != ")":
            terms.append(self.parse_term())
            while self.peek() == ",":
                self.take()
                terms.append(self.parse_term())
        self.take(")")
        self._check_arity(self.predicates, self._declared_preds,
                          "predicate", name, len(terms))
        if all(isinstance(t, TermVar) for t in terms):
            return Pred(name, tuple(t.name for t in terms))
        return PredT(name, tuple(terms))


def parse(text: str, predicates: Optional[dict] = None,
          functions: Optional[dict] = None) -> Formula:
    """Parse a single formula."""
    p = _Parser(text, predicates, functions)
    f = p.parse_formula()
    if p.peek() is not None:
        p.error(f"unexpected trailing input {p.peek()!r}")
    return f


def parse_sequent(text: str, predicates: Optional[dict] = None,
                  functions: Optional[dict] = None):
    """Parse ``"g1; g2 => d1; d2"`` into two formula tuples."""
    p = _Parser(text, predicates, functions)

    def side(stop: str):
        out = []
        if p.peek() not in (stop, None):
            out.append(p.parse_formula())
            while p.peek() == ";":
                p.take()
                out.append(p.parse_formula())
        return tuple(out)

    left = side("=>")
    p.take("=>")
    right = side(None)
    if p.peek() is not None:
        p.error(f"unexpected trailing input {p.peek()!r}")
    return left, right


# ---------------------------------------------------------------------------
# Printing

_IFF, _IMP, _OR, _AND, _UNARY, _ATOM = range(6)


def _fmt_vars(xs) -> str:
    return "{" + ",".join(sorted(xs)) + "}"


def format_term(t: Term) -> str:
    if isinstance(t, TermVar):
        return t.name
    return f"{t.func}({','.join(format_term(a) for a in t.args)})"


def _ends_with_bare_dep(f: Formula) -> bool:
    # Would the printed form end in a bare 'D{X}y'?  Then a following '| ('
    # would re-parse as conditional dependence and needs disambiguation.
    if isinstance(f, DepAtom):
        return True
    if isinstance(f, DepAtomT):
        return isinstance(f.target, TermVar)
    if isinstance(f, (And, Or, Imp, Iff)):
        return _ends_with_bare_dep(f.right)
    if isinstance(f, (Not, Box, Dia, Univ, Exis, AllQ, ExQ, Learn)):
        return _ends_with_bare_dep(f.body)
    if isinstance(f, Announce):
        return _ends_with_bare_dep(f.body)
    return False


def format_formula(f: Formula) -> str:
    """Canonical textual form; reparsing yields an equal AST."""
    return _pp(f, _IFF)


def _pp(f: Formula, level: int) -> str:
    if isinstance(f, Iff):
        s = f"{_pp(f.left, _IMP)} <-> {_pp(f.right, _IFF)}"
        return f"({s})" if level > _IFF else s
    if isinstance(f, Imp):
        s = f"{_pp(f.left, _OR)} -> {_pp(f.right, _IMP)}"
        return f"({s})" if level > _IMP else s
    if isinstance(f, Or):
        left = _pp(f.left, _OR)
        right = _pp(f.right, _AND)
        if _ends_with_bare_dep(f.left) and right.startswith("("):
            left = f"({left})"
        s = f"{left} | {right}"
        return f"({s})" if level > _OR else s
    if isinstance(f, And):
        s = f"{_pp(f.left, _AND)} & {_pp(f.right, _UNARY)}"
        return f"({s})" if level > _AND else s
    if isinstance(f, Not):
        return f"!{_pp(f.body, _UNARY)}"
    if isinstance(f, Box):
        return f"box{_fmt_vars(f.xs)} {_pp(f.body, _UNARY)}"
    if isinstance(f, Dia):
        return f"dia{_fmt_vars(f.xs)} {_pp(f.body, _UNARY)}"
    if isinstance(f, Univ):
        return f"A {_pp(f.body, _UNARY)}"
    if isinstance(f, Exis):
        return f"E {_pp(f.body, _UNARY)}"
    if isinstance(f, AllQ):
        return f"all{_fmt_vars(f.xs)} {_pp(f.body, _UNARY)}"
    if isinstance(f, ExQ):
        return f"ex{_fmt_vars(f.xs)} {_pp(f.body, _UNARY)}"
    if isinstance(f, Learn):
        return f"[learn {','.join(sorted(f.xs))}] {_pp(f.body, _UNARY)}"
    if isinstance(f, Announce):
        return f"[ann {format_formula(f.ann)}] {_pp(f.body, _UNARY)}"
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Pred):
        return f"{f.name}({','.join(f.args)})"
    if isinstance(f, PredT):
        return f"{f.name}({','.join(format_term(t) for t in f.terms)})"
    if isinstance(f, DepAtom):
        return f"D{_fmt_vars(f.xs)}{f.y}"
    if isinstance(f, DepAtomT):
        srcs = ",".join(format_term(t) for t in sorted(f.sources, key=term_key))
        return f"D{{{srcs}}}{format_term(f.target)}"
    if isinstance(f, MultiDep):
        return f"D{_fmt_vars(f.xs)}{_fmt_vars(f.ys)}"
    if isinstance(f, ConstAtom):
        return f"C {f.y}"
    if isinstance(f, CondDep):
        return f"D{_fmt_vars(f.xs)}{f.y}|({format_formula(f.cond)})"
    if isinstance(f, Indep):
        s = f"I{_fmt_vars(f.xs)}{_fmt_vars(f.ys)}"
        if f.cond is not None:
            s += f"|{_fmt_vars(f.cond)}"
        return s
    if isinstance(f, Compare):
        return f"GEQ{_fmt_vars(f.xs)}{_fmt_vars(f.ys)}{_fmt_vars(f.zs)}"
    raise ValueError(f"cannot print {f!r}")


def format_sequent(left, right) -> str:
    return "; ".join(format_formula(f) for f in left) + " => " + \
        "; ".join(format_formula(f) for f in right)
