"""Finite dependence models: a first-order structure plus a team of assignments.

Objects are opaque string tokens ("0" and "00" are distinct).  Models are
immutable after construction; all queries are pure.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from .formulas import check_ident

Assignment = Dict[str, str]


class ModelError(ValueError):
    """Raised for malformed model data or misuse of a model query."""


@dataclass(frozen=True, eq=False)
class DependenceModel:
    variables: Tuple[str, ...]
    objects: FrozenSet[str]
    arities: Mapping[str, int]
    interpretation: Mapping[str, FrozenSet[tuple]]
    team: Tuple[Assignment, ...]

    def __post_init__(self):
        for v in self.variables:
            check_ident(v)
        if len(set(self.variables)) != len(self.variables):
            raise ModelError("duplicate variable names")
        if not self.team:
            raise ModelError("the team must be non-empty")
        seen = {}
        for i, s in enumerate(self.team):
            if set(s) != set(self.variables):
                raise ModelError(f"assignment {i} is not total on the variables")
            row = self.row_tuple(i)
            if row in seen:
                raise ModelError(
                    f"duplicate assignment rows {seen[row]} and {i}")
            seen[row] = i
            for v in row:
                if v not in self.objects:
                    raise ModelError(f"assignment {i} uses undeclared object {v!r}")
        for name, tuples in self.interpretation.items():
            ar = self.arities.get(name)
            if ar is None:
                raise ModelError(f"predicate {name!r} has no declared arity")
            for tup in tuples:
                if len(tup) != ar:
                    raise ModelError(
                        f"tuple {tup!r} does not match arity {ar} of {name!r}")
                for o in tup:
                    if o not in self.objects:
                        raise ModelError(
                            f"tuple {tup!r} of {name!r} uses undeclared object")

    # -- basic access

    def row_tuple(self, i: int) -> tuple:
        s = self.team[i]
        return tuple(s[x] for x in self.variables)

    def index_of(self, s: Assignment) -> int:
        for i, t in enumerate(self.team):
            if all(t[x] == s[x] for x in self.variables):
                return i
        raise ModelError("assignment is not in the team")

    def values(self, x: str) -> FrozenSet[str]:
        return frozenset(s[x] for s in self.team)

    def check_vars(self, xs: Iterable[str]) -> None:
        for x in xs:
            if x not in self.variables:
                raise ModelError(f"variable {x!r} is not in the model")

    def replace_team(self, team: Sequence[Assignment]) -> "DependenceModel":
        return DependenceModel(self.variables, self.objects, self.arities,
                               self.interpretation, tuple(dict(s) for s in team))


def agree(s: Assignment, t: Assignment, xs: Iterable[str]) -> bool:
    return all(s[x] == t[x] for x in xs)


def local_dep(m: DependenceModel, s: Assignment, xs: FrozenSet[str], y: str) -> bool:
    """Does y locally depend on xs at s?"""
    m.check_vars(xs)
    m.check_vars([y])
    m.index_of(s)
    return all(agree(s, t, [y]) for t in m.team if agree(s, t, xs))


def global_dep(m: DependenceModel, xs: FrozenSet[str], y: str) -> bool:
    """Does y depend on xs at every team member?"""
    m.check_vars(xs)
    m.check_vars([y])
    groups: Dict[tuple, set] = {}
    for s in m.team:
        groups.setdefault(tuple(s[x] for x in sorted(xs)), set()).add(s[y])
    return all(len(vals) == 1 for vals in groups.values())


def dep_closure(m: DependenceModel, s: Assignment, xs: FrozenSet[str]) -> FrozenSet[str]:
    """All variables that locally depend on xs at s."""
    return frozenset(y for y in m.variables if local_dep(m, s, xs, y))


@dataclass(frozen=True, eq=False)
class PartialSkolem:
    source: Tuple[str, ...]
    target: str
    table: Mapping[tuple, str]

    def defined_on(self, key: tuple) -> bool:
        return key in self.table


def skolem(m: DependenceModel, xs: FrozenSet[str], y: str) -> PartialSkolem:
    """The induced partial function from xs-value tuples to y-values."""
    m.check_vars(xs)
    m.check_vars([y])
    src = tuple(sorted(xs))
    groups: Dict[tuple, set] = {}
    for s in m.team:
        groups.setdefault(tuple(s[x] for x in src), set()).add(s[y])
    table = {k: next(iter(v)) for k, v in groups.items() if len(v) == 1}
    return PartialSkolem(src, y, table)


def info_set(m: DependenceModel, s: Assignment, xs: FrozenSet[str],
             ys: FrozenSet[str]) -> FrozenSet[tuple]:
    """Value tuples (ordered by sorted ys) that ys can take given s's xs-values."""
    m.check_vars(xs)
    m.check_vars(ys)
    m.index_of(s)
    order = tuple(sorted(ys))
    return frozenset(tuple(t[y] for y in order) for t in m.team if agree(s, t, xs))


def distinguish(m: DependenceModel) -> DependenceModel:
    """Tag every value with its variable so distinct variables never collide."""

    def tag(x: str, o: str) -> str:
        return f"{x}:{o}"

    team = tuple({x: tag(x, s[x]) for x in m.variables} for s in m.team)
    objects = frozenset(v for s in team for v in s.values())
    interp = {}
    realized = sorted(objects)
    for name, tuples in m.interpretation.items():
        ar = m.arities[name]
        lifted = set()
        for combo in itertools.product(realized, repeat=ar):
            plain = tuple(o.split(":", 1)[1] for o in combo)
            if plain in tuples:
                lifted.add(combo)
        interp[name] = frozenset(lifted)
    return DependenceModel(m.variables, objects, dict(m.arities), interp, team)


def permute_variables(m: DependenceModel, sigma: Mapping[str, str]) -> DependenceModel:
    """The model with variable roles permuted: new x holds old sigma^-1(x)."""
    inv = {sigma.get(v, v): v for v in m.variables}
    if sorted(inv) != sorted(m.variables):
        raise ModelError("sigma is not a permutation of the model variables")
    team = tuple({x: s[inv[x]] for x in m.variables} for s in m.team)
    return DependenceModel(m.variables, m.objects, dict(m.arities),
                           dict(m.interpretation), team)


def check_frame_church_rosser(m: DependenceModel, xs: FrozenSet[str],
                              ys: FrozenSet[str]):
    """Check the confluence property for =_xs then =_ys steps.

    Returns (True, None) or (False, (i, j, k)) with the first failing triple
    in canonical row order.
    """
    m.check_vars(xs)
    m.check_vars(ys)
    n = len(m.team)
    for i in range(n):
        for j in range(n):
            if not agree(m.team[i], m.team[j], xs):
                continue
            for k in range(n):
                if not agree(m.team[j], m.team[k], ys):
                    continue
                if not any(agree(m.team[i], v, ys) and agree(v, m.team[k], xs)
                           for v in m.team):
                    return False, (i, j, k)
    return True, None


def check_frame_cartesian(m: DependenceModel):
    """Does the team realize every combination of per-variable values?"""
    ranges = [sorted(m.values(x)) for x in m.variables]
    have = {m.row_tuple(i) for i in range(len(m.team))}
    for combo in itertools.product(*ranges):
        if combo not in have:
            return False, combo
    return True, None


def check_frame(m: DependenceModel, prop: str,
                xs: Optional[FrozenSet[str]] = None,
                ys: Optional[FrozenSet[str]] = None):
    if prop == "church-rosser":
        if xs is None or ys is None:
            raise ModelError("church-rosser needs two variable sets")
        return check_frame_church_rosser(m, xs, ys)
    if prop == "cartesian":
        return check_frame_cartesian(m)
    raise ModelError(f"unknown frame property {prop!r}")


# ---------------------------------------------------------------------------
# Construction and file formats


def model_from_rows(variables: Sequence[str], rows: Sequence[Sequence[str]],
                    arities: Optional[Mapping[str, int]] = None,
                    interpretation: Optional[Mapping[str, Iterable[tuple]]] = None
                    ) -> DependenceModel:
    variables = tuple(variables)
    team = []
    seen = {}
    for i, row in enumerate(rows):
        if len(row) != len(variables):
            raise ModelError(f"row {i} has {len(row)} values, expected {len(variables)}")
        key = tuple(row)
        if key in seen:
            raise ModelError(f"duplicate assignment rows {seen[key]} and {i}")
        seen[key] = i
        team.append(dict(zip(variables, row)))
    if not team:
        raise ModelError("empty data section")
    objects = {v for row in rows for v in row}
    interp = {}
    arities = dict(arities or {})
    for name, tuples in (interpretation or {}).items():
        tuples = frozenset(tuple(t) for t in tuples)
        for t in tuples:
            objects.update(t)
        interp[name] = tuples
        arities.setdefault(name, len(next(iter(tuples))) if tuples else 0)
    for name, ar in arities.items():
        interp.setdefault(name, frozenset())
    return DependenceModel(variables, frozenset(objects), arities, interp,
                           tuple(team))


def parse_csv_model(text: str) -> DependenceModel:
    reader = csv.reader(io.StringIO(text))
    rows = [[cell.strip() for cell in row] for row in reader if row]
    if not rows:
        raise ModelError("empty CSV")
    header, data = rows[0], rows[1:]
    return model_from_rows(header, data)


def parse_native_model(text: str) -> DependenceModel:
    """Line-oriented model text: variables / assignment / predicate / tuple."""
    variables: Optional[Tuple[str, ...]] = None
    rows = []
    arities: Dict[str, int] = {}
    tuples: Dict[str, set] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        if kind == "variables":
            if variables is not None:
                raise ModelError(f"line {lineno}: duplicate variables line")
            variables = tuple(args)
        elif kind == "assignment":
            if variables is None:
                raise ModelError(f"line {lineno}: assignment before variables")
            if len(args) != len(variables):
                raise ModelError(
                    f"line {lineno}: row width {len(args)} != {len(variables)}")
            rows.append(args)
        elif kind == "predicate":
            if len(args) != 2 or not args[1].isdigit():
                raise ModelError(f"line {lineno}: expected 'predicate NAME ARITY'")
            name, ar = args[0], int(args[1])
            if arities.get(name, ar) != ar:
                raise ModelError(f"line {lineno}: conflicting arity for {name!r}")
            arities[name] = ar
            tuples.setdefault(name, set())
        elif kind == "tuple":
            if not args:
                raise ModelError(f"line {lineno}: expected 'tuple NAME v1 ...'")
            name = args[0]
            if name not in arities:
                raise ModelError(f"line {lineno}: tuple for undeclared predicate {name!r}")
            if len(args) - 1 != arities[name]:
                raise ModelError(
                    f"line {lineno}: tuple width {len(args) - 1} != arity {arities[name]}")
            tuples.setdefault(name, set()).add(tuple(args[1:]))
        else:
            raise ModelError(f"line {lineno}: unknown directive {kind!r}")
    if variables is None:
        raise ModelError("missing variables line")
    return model_from_rows(variables, rows, arities, tuples)


def load_model(path: str) -> DependenceModel:
    """Load a model file; '.csv' selects the CSV reader, anything else the
    native line format."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.lower().endswith(".csv"):
        return parse_csv_model(text)
    return parse_native_model(text)


def dumps_native(m: DependenceModel) -> str:
    out = ["variables " + " ".join(m.variables)]
    for i in range(len(m.team)):
        out.append("assignment " + " ".join(m.row_tuple(i)))
    for name in sorted(m.arities):
        out.append(f"predicate {name} {m.arities[name]}")
        for tup in sorted(m.interpretation.get(name, frozenset())):
            out.append("tuple " + name + " " + " ".join(tup))
    return "\n".join(out) + "\n"
