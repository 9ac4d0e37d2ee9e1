"""Translation into first-order logic over an extended vocabulary.

The target language has the original predicates, equality, a fresh team
predicate of arity |V| (true of the admissible value tuples), negation,
conjunction and universal quantifiers over listed variables.  A finite
Tarskian evaluator serves as the oracle, and formulas can be emitted as (and
read back from) TPTP FOF units.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from . import formulas as F
from .models import DependenceModel

TEAM_PREDICATE = "team_A"
PRIME = "_p"


class FolError(ValueError):
    pass


@dataclass(frozen=True)
class FolFormula:
    pass


@dataclass(frozen=True)
class FPred(FolFormula):
    name: str
    args: tuple  # tuple[str, ...]


@dataclass(frozen=True)
class FEq(FolFormula):
    left: str
    right: str


@dataclass(frozen=True)
class FNot(FolFormula):
    body: FolFormula


@dataclass(frozen=True)
class FAnd(FolFormula):
    left: FolFormula
    right: FolFormula


@dataclass(frozen=True)
class FForall(FolFormula):
    variables: tuple  # tuple[str, ...], duplicate-free
    body: FolFormula

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise FolError("duplicate bound variables")


def fol_free_vars(f: FolFormula) -> FrozenSet[str]:
    if isinstance(f, FPred):
        return frozenset(f.args)
    if isinstance(f, FEq):
        return frozenset((f.left, f.right))
    if isinstance(f, FNot):
        return fol_free_vars(f.body)
    if isinstance(f, FAnd):
        return fol_free_vars(f.left) | fol_free_vars(f.right)
    if isinstance(f, FForall):
        return fol_free_vars(f.body) - frozenset(f.variables)
    raise FolError(f"unknown node {f!r}")


def _imp(a: FolFormula, b: FolFormula) -> FolFormula:
    return FNot(FAnd(a, FNot(b)))


def to_fol(phi: F.Formula, variables: Iterable[str]) -> FolFormula:
    """Translate a base formula relative to the ambient variable list.

    Modalities become universal quantifiers over the complement variables
    guarded by the team predicate; dependence atoms quantify a second, primed
    copy of the team and force equal targets.  The free variables of the
    output are exactly the free variables of the input.
    """
    v = tuple(variables)
    if len(set(v)) != len(v):
        raise FolError("ambient variable list has duplicates")
    f = F.desugar(phi)
    if not F.is_base(f):
        raise FolError(f"only base formulas translate: {phi!r}")
    missing = F.all_vars(f) - set(v)
    if missing:
        raise FolError(f"formula variables {sorted(missing)} outside the "
                       "ambient variable list")
    return _tr(f, v)


def _tr(f: F.Formula, v: tuple) -> FolFormula:
    if isinstance(f, F.Pred):
        return FPred(f.name, f.args)
    if isinstance(f, F.Top):
        x = v[0] if v else "x"
        return FEq(x, x)
    if isinstance(f, F.Bot):
        x = v[0] if v else "x"
        return FNot(FEq(x, x))
    if isinstance(f, F.Not):
        return FNot(_tr(f.body, v))
    if isinstance(f, F.And):
        return FAnd(_tr(f.left, v), _tr(f.right, v))
    if isinstance(f, F.Box):
        z = tuple(x for x in v if x not in f.xs)
        guard = FPred(TEAM_PREDICATE, v)
        body = _imp(guard, _tr(f.body, v))
        return FForall(z, body) if z else body
    if isinstance(f, F.DepAtom):
        z = tuple(x for x in v if x not in f.xs)
        primed = {x: x + PRIME for x in z}
        v2 = tuple(primed.get(x, x) for x in v)
        y2 = primed.get(f.y, f.y)
        guard = FAnd(FPred(TEAM_PREDICATE, v), FPred(TEAM_PREDICATE, v2))
        body = _imp(guard, FEq(f.y, y2))
        quantified = z + tuple(primed[x] for x in z)
        return FForall(quantified, body) if quantified else body
    raise FolError(f"cannot translate {f!r}")


# ---------------------------------------------------------------------------
# Finite structures and evaluation


@dataclass(frozen=True, eq=False)
class FolStructure:
    domain: Tuple[str, ...]
    predicates: Mapping[str, FrozenSet[tuple]]


def structure_of(m: DependenceModel) -> FolStructure:
    """The associated structure: same domain and predicates, plus the team
    predicate holding of exactly the admissible value tuples."""
    preds = {name: frozenset(ext) for name, ext in m.interpretation.items()}
    preds[TEAM_PREDICATE] = frozenset(m.row_tuple(i) for i in range(len(m.team)))
    return FolStructure(tuple(sorted(m.objects)), preds)


def eval_fol(structure: FolStructure, assignment: Mapping[str, str],
             psi: FolFormula) -> bool:
    """Standard Tarskian truth in a finite structure."""
    missing = fol_free_vars(psi) - set(assignment)
    if missing:
        raise FolError(f"unbound free variables {sorted(missing)}")
    return _ev(structure, dict(assignment), psi)


def _ev(st: FolStructure, env: Dict[str, str], f: FolFormula) -> bool:
    if isinstance(f, FPred):
        ext = st.predicates.get(f.name, frozenset())
        return tuple(env[x] for x in f.args) in ext
    if isinstance(f, FEq):
        return env[f.left] == env[f.right]
    if isinstance(f, FNot):
        return not _ev(st, env, f.body)
    if isinstance(f, FAnd):
        return _ev(st, env, f.left) and _ev(st, env, f.right)
    if isinstance(f, FForall):
        for combo in itertools.product(st.domain, repeat=len(f.variables)):
            inner = dict(env)
            inner.update(zip(f.variables, combo))
            if not _ev(st, inner, f.body):
                return False
        return True
    raise FolError(f"unknown node {f!r}")


# ---------------------------------------------------------------------------
# TPTP FOF output (and its inverse, for round-trips)


def _tptp_var(name: str) -> str:
    if name.endswith(PRIME):
        base = name[: -len(PRIME)]
        return base[:1].upper() + base[1:] + "p"
    return name[:1].upper() + name[1:]


def _tptp_pred(name: str) -> str:
    # TPTP atoms must start lower-case; anything else is single-quoted
    return name if name[:1].islower() else f"'{name}'"


def _var_map(psi: FolFormula) -> Dict[str, str]:
    names: List[str] = []

    def collect(f: FolFormula) -> None:
        if isinstance(f, FPred):
            names.extend(f.args)
        elif isinstance(f, FEq):
            names.extend((f.left, f.right))
        elif isinstance(f, FNot):
            collect(f.body)
        elif isinstance(f, FAnd):
            collect(f.left)
            collect(f.right)
        elif isinstance(f, FForall):
            names.extend(f.variables)
            collect(f.body)

    collect(psi)
    out: Dict[str, str] = {}
    used: Dict[str, str] = {}
    for n in names:
        if n in out:
            continue
        t = _tptp_var(n)
        if t in used and used[t] != n:
            raise FolError(f"TPTP variable collision between {used[t]!r} and {n!r}")
        used[t] = n
        out[n] = t
    return out


def emit_tptp(psi: FolFormula, name: str, role: str = "axiom",
              negate: bool = False) -> str:
    """One ``fof(name, role, ...).`` unit; `negate` wraps the body for
    refutation-style use."""
    if negate:
        psi = FNot(psi)
    vm = _var_map(psi)
    return f"fof({name}, {role}, {_fmt(psi, vm)})."


def _fmt(f: FolFormula, vm: Dict[str, str]) -> str:
    if isinstance(f, FPred):
        if not f.args:
            return _tptp_pred(f.name)
        return f"{_tptp_pred(f.name)}({','.join(vm[x] for x in f.args)})"
    if isinstance(f, FEq):
        return f"({vm[f.left]} = {vm[f.right]})"
    if isinstance(f, FNot):
        return f"~{_fmt(f.body, vm)}"
    if isinstance(f, FAnd):
        return f"({_fmt(f.left, vm)} & {_fmt(f.right, vm)})"
    if isinstance(f, FForall):
        return f"(![{','.join(vm[x] for x in f.variables)}]: {_fmt(f.body, vm)})"
    raise FolError(f"unknown node {f!r}")


def _untptp_var(name: str) -> str:
    # Round-trips are exact for lower-case source variables that do not
    # themselves end in 'p' (the primed-copy marker).
    if name.endswith("p") and len(name) > 1:
        return name[0].lower() + name[1:-1] + PRIME
    return name[0].lower() + name[1:]


_TPTP_TOKEN = re.compile(r"\s*('[^']*'|[A-Za-z_][A-Za-z0-9_]*|[(),:=\[\]!&~.])")


class _TptpParser:
    def __init__(self, text: str):
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TPTP_TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise FolError(f"bad TPTP input near {text[pos:pos+10]!r}")
                break
            self.tokens.append(m.group(1))
            pos = m.end()
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise FolError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def formula(self) -> FolFormula:
        return self.conj()

    def conj(self) -> FolFormula:
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = FAnd(left, self.unary())
        return left

    def unary(self) -> FolFormula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return FNot(self.unary())
        if tok == "!":
            self.take()
            self.take("[")
            vs = [self.take()]
            while self.peek() == ",":
                self.take()
                vs.append(self.take())
            self.take("]")
            self.take(":")
            return FForall(tuple(_untptp_var(v) for v in vs), self.unary())
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        return self.atom()

    def atom(self) -> FolFormula:
        name = self.take()
        if name.startswith("'"):
            name = name.strip("'")
        elif name[0].isupper():
            # equality atom '(X = Y)' arrives without its opening paren here
            self.take("=")
            other = self.take()
            return FEq(_untptp_var(name), _untptp_var(other))
        if self.peek() == "(":
            self.take()
            args = [self.take()]
            while self.peek() == ",":
                self.take()
                args.append(self.take())
            self.take(")")
            return FPred(name, tuple(_untptp_var(a) for a in args))
        return FPred(name, ())


def parse_tptp(text: str) -> Tuple[str, str, FolFormula]:
    """Parse one ``fof(name, role, formula).`` unit."""
    p = _TptpParser(text)
    p.take("fof")
    p.take("(")
    name = p.take()
    p.take(",")
    role = p.take()
    p.take(",")
    f = p.formula()
    p.take(")")
    p.take(".")
    return name, role, f
