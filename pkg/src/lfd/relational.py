"""Relational (Kripke-style) semantics: abstract worlds with per-variable-set
equivalence relations.

Standard models carry one equivalence per single variable (set relations are
intersections) and read dependence atoms off the relations; general models
store relations per listed variable set and a per-world dependence-atom
valuation.  The bridges ``rel_of``/``dep_of`` connect them with dependence
models, ``unravel`` turns a general model into a standard one up to a depth
bound, and ``filtrate`` quotients a model by a closure set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Tuple

from . import formulas as F
from .models import DependenceModel, model_from_rows
from .parser import parse

DepPair = Tuple[FrozenSet[str], str]
PredAtom = Tuple[str, tuple]


class RelationalError(ValueError):
    pass


def _closure_to_partition(worlds, pairs) -> Dict[str, int]:
    """Union-find over the given pairs; returns world -> class id."""
    parent = {w: w for w in worlds}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    reps = {}
    out = {}
    for w in worlds:
        r = find(w)
        out[w] = reps.setdefault(r, len(reps))
    return out


@dataclass(frozen=True, eq=False)
class RelationalModel:
    worlds: Tuple[str, ...]
    variables: Tuple[str, ...]
    kind: str  # "standard" | "general"
    # standard: one partition per single variable; general: per listed varset
    relations: Mapping[FrozenSet[str], Mapping[str, int]]
    dep_atoms: Mapping[str, FrozenSet[DepPair]]
    pred_atoms: Mapping[str, FrozenSet[PredAtom]]

    def __post_init__(self):
        if self.kind not in ("standard", "general"):
            raise RelationalError(f"unknown model kind {self.kind!r}")
        if not self.worlds:
            raise RelationalError("at least one world is required")

    def relation(self, xs: FrozenSet[str]) -> Mapping[str, int]:
        """world -> equivalence-class id under =_xs."""
        if self.kind == "standard":
            keys = {}
            for w in self.worlds:
                keys[w] = tuple(self.relations[frozenset((x,))][w]
                                for x in sorted(xs))
            ids: Dict[tuple, int] = {}
            return {w: ids.setdefault(k, len(ids)) for w, k in keys.items()}
        if xs in self.relations:
            return self.relations[xs]
        if not xs:
            return {w: 0 for w in self.worlds}
        raise RelationalError(f"no stored relation for {sorted(xs)}")

    def related(self, w: str, v: str, xs: FrozenSet[str]) -> bool:
        rel = self.relation(xs)
        return rel[w] == rel[v]

    def block(self, w: str, xs: FrozenSet[str]) -> Tuple[str, ...]:
        rel = self.relation(xs)
        return tuple(v for v in self.worlds if rel[v] == rel[w])

    def dep_holds(self, w: str, xs: FrozenSet[str], y: str) -> bool:
        if self.kind == "general":
            return (xs, y) in self.dep_atoms.get(w, frozenset())
        rel = self.relation(xs)
        rely = self.relation(frozenset((y,)))
        return all(rely[v] == rely[w]
                   for v in self.worlds if rel[v] == rel[w])


def eval_rel(r: RelationalModel, w: str, phi: F.Formula) -> bool:
    """Relational truth of a base formula at a world."""
    f = F.desugar(phi)
    if not F.is_base(f):
        raise RelationalError(f"relational semantics covers base formulas only: {phi!r}")
    return _eval(r, w, f)


def _eval(r: RelationalModel, w: str, f: F.Formula) -> bool:
    if isinstance(f, F.Top):
        return True
    if isinstance(f, F.Bot):
        return False
    if isinstance(f, F.Pred):
        return (f.name, f.args) in r.pred_atoms.get(w, frozenset())
    if isinstance(f, F.Not):
        return not _eval(r, w, f.body)
    if isinstance(f, F.And):
        return _eval(r, w, f.left) and _eval(r, w, f.right)
    if isinstance(f, F.Box):
        return all(_eval(r, v, f.body) for v in r.block(w, f.xs))
    if isinstance(f, F.DepAtom):
        return r.dep_holds(w, f.xs, f.y)
    raise RelationalError(f"cannot evaluate {f!r}")


def validate(r: RelationalModel) -> List[str]:
    """Check the defining conditions for the model's kind; empty = valid."""
    problems: List[str] = []
    stored = dict(r.relations)
    if r.kind == "standard":
        for x in r.variables:
            if frozenset((x,)) not in stored:
                problems.append(f"missing relation for variable {x}")
        # atom agreement mirrors the valuation condition on standard models
        for xs in _atom_varsets(r) | {frozenset((x,)) for x in r.variables}:
            try:
                rel = r.relation(xs)
            except RelationalError:
                continue
            for w, v in itertools.product(r.worlds, repeat=2):
                if rel[w] != rel[v]:
                    continue
                for name, args in r.pred_atoms.get(w, frozenset()):
                    if set(args) <= xs and (name, args) not in r.pred_atoms.get(v, frozenset()):
                        problems.append(
                            f"atom condition: {name}{args} at {w} but not at "
                            f"{xs}-equivalent {v}")
        return sorted(set(problems))
    # general kind: numbered conditions
    if frozenset() not in stored:
        problems.append("missing relation for the empty set")
    empty = stored.get(frozenset())
    if empty is not None and len(set(empty.values())) > 1:
        problems.append("(5) relation for the empty set is not global")
    for w in r.worlds:
        deps = r.dep_atoms.get(w, frozenset())
        sources = {xs for xs, _ in deps} | set(stored)
        for xs in sources:
            for x in xs:
                if (xs, x) not in deps:
                    problems.append(f"(2) projection fails at {w}: "
                                    f"D{sorted(xs)}{x} missing")
        for (xs, y) in deps:
            closure_y = {z for (us, z) in deps if us == frozenset((y,))}
            for z in closure_y:
                if (xs, z) not in deps:
                    problems.append(f"(2) transitivity fails at {w}: "
                                    f"D{sorted(xs)}{y}, D[{y}]{z} but not D{sorted(xs)}{z}")
        # full set-form transitivity
        srcs = {xs for xs, _ in deps}
        for xs in srcs:
            ys_all = frozenset(y for (us, y) in deps if us == xs)
            for ys in srcs:
                if ys <= ys_all:
                    for (us, z) in deps:
                        if us == ys and (xs, z) not in deps:
                            problems.append(
                                f"(2) transitivity fails at {w}: "
                                f"D{sorted(xs)}{sorted(ys)}, D{sorted(ys)}{z}")
    for xs, rel in stored.items():
        blocks: Dict[int, List[str]] = {}
        for w in r.worlds:
            blocks.setdefault(rel[w], []).append(w)
        for members in blocks.values():
            for w, v in itertools.product(members, repeat=2):
                if w == v:
                    continue
                for (us, y) in r.dep_atoms.get(w, frozenset()):
                    if us != xs:
                        continue
                    if (us, y) not in r.dep_atoms.get(v, frozenset()):
                        problems.append(
                            f"(3) transfer fails: D{sorted(xs)}{y} at {w} "
                            f"but not at {xs}-equivalent {v}")
                    rely = stored.get(frozenset((y,)))
                    if rely is not None and rely[w] != rely[v]:
                        problems.append(
                            f"(3) transfer fails: {w} ={sorted(xs)} {v}, "
                            f"D{sorted(xs)}{y} at {w}, but not ={y}")
                for name, args in r.pred_atoms.get(w, frozenset()):
                    if set(args) <= xs and (name, args) not in r.pred_atoms.get(v, frozenset()):
                        problems.append(
                            f"(4) atom condition: {name}{args} at {w} but not "
                            f"at {sorted(xs)}-equivalent {v}")
    return sorted(set(problems))


def _atom_varsets(r: RelationalModel) -> set:
    out = set()
    for atoms in r.pred_atoms.values():
        for _, args in atoms:
            out.add(frozenset(args))
    return out


# ---------------------------------------------------------------------------
# Bridges with dependence models


def rel_of(m: DependenceModel) -> RelationalModel:
    """The standard relational model on the team, with value-agreement relations."""
    worlds = tuple(f"w{i}" for i in range(len(m.team)))
    relations = {}
    for x in m.variables:
        ids: Dict[str, int] = {}
        rel = {}
        for i, w in enumerate(worlds):
            rel[w] = ids.setdefault(m.team[i][x], len(ids))
        relations[frozenset((x,))] = rel
    pred_atoms = {}
    for i, w in enumerate(worlds):
        s = m.team[i]
        atoms = set()
        for name, ar in m.arities.items():
            ext = m.interpretation.get(name, frozenset())
            for args in itertools.product(m.variables, repeat=ar):
                if tuple(s[x] for x in args) in ext:
                    atoms.add((name, args))
        pred_atoms[w] = frozenset(atoms)
    return RelationalModel(worlds, m.variables, "standard", relations, {},
                           pred_atoms)


def dep_of(r: RelationalModel) -> DependenceModel:
    """The dependence model on (variable, equivalence-class) objects."""
    if r.kind != "standard":
        raise RelationalError("dep_of requires a standard relational model")
    rows = []
    for w in r.worlds:
        rows.append([f"{x}:{r.relations[frozenset((x,))][w]}"
                     for x in r.variables])
    # identical rows collapse: relationally indistinguishable worlds
    uniq, seen, of_world = [], {}, {}
    for w, row in zip(r.worlds, rows):
        key = tuple(row)
        if key not in seen:
            seen[key] = len(uniq)
            uniq.append(row)
        of_world[w] = seen[key]
    arities: Dict[str, int] = {}
    tuples: Dict[str, set] = {}
    for w, row in zip(r.worlds, rows):
        idx = {x: row[i] for i, x in enumerate(r.variables)}
        for name, args in r.pred_atoms.get(w, frozenset()):
            arities.setdefault(name, len(args))
            tuples.setdefault(name, set()).add(tuple(idx[x] for x in args))
    return model_from_rows(r.variables, uniq, arities, tuples)


def world_to_row(r: RelationalModel) -> Dict[str, int]:
    """Map each world to its row index in dep_of(r)."""
    seen: Dict[tuple, int] = {}
    out = {}
    for w in r.worlds:
        key = tuple(r.relations[frozenset((x,))][w] for x in r.variables)
        if key not in seen:
            seen[key] = len(seen)
        out[w] = seen[key]
    return out


def _histories(r: RelationalModel, w0: str, depth: int) -> List[tuple]:
    """Paths of at most `depth` transitions; entries are (world, via-set)."""
    step_sets = sorted(r.relations, key=lambda s: (len(s), tuple(sorted(s))))
    histories = [((w0, None),)]
    frontier = [((w0, None),)]
    for _ in range(depth):
        new = []
        for h in frontier:
            lastw = h[-1][0]
            for xs in step_sets:
                rel = r.relation(xs)
                for v in r.worlds:
                    if rel[v] == rel[lastw]:
                        new.append(h + ((v, xs),))
        histories.extend(new)
        frontier = new
    return histories


def unravel(r: RelationalModel, w0: str, depth: int) -> RelationalModel:
    """History-tree unraveling of a general model, truncated at the given
    number of transitions; yields a standard model whose last-world map is a
    relation-preserving surjective homomorphism onto the reachable part."""
    if depth < 0:
        raise RelationalError("depth must be >= 0")
    histories = _histories(r, w0, depth)
    names = {h: f"h{i}" for i, h in enumerate(histories)}
    worlds = tuple(names[h] for h in histories)

    def last(h):
        return h[-1][0]

    relations = {}
    for x in r.variables:
        pairs = []
        for h in histories:
            if len(h) == 1:
                continue
            prev, (w, xs) = h[:-1], h[-1]
            if (xs, x) in r.dep_atoms.get(last(prev), frozenset()):
                pairs.append((names[prev], names[h]))
        relations[frozenset((x,))] = _closure_to_partition(worlds, pairs)
    pred_atoms = {names[h]: r.pred_atoms.get(last(h), frozenset())
                  for h in histories}
    return RelationalModel(worlds, r.variables, "standard", relations, {},
                           pred_atoms)


def last_world_map(r: RelationalModel, w0: str, depth: int) -> Dict[str, str]:
    """The history -> last-world map matching :func:`unravel`'s world order."""
    return {f"h{i}": h[-1][0]
            for i, h in enumerate(_histories(r, w0, depth))}


def filtrate(r: RelationalModel, phi: F.Formula) -> RelationalModel:
    """Quotient by agreement on the closure set of phi (dependent filtration).

    Worlds are truth-profile classes; two classes are =_X-related when their
    representatives agree on every closure formula whose free variables all
    depend on X at the representative.  The result is a general model of at
    most 2^|closure| worlds satisfying the same closure formulas.
    """
    phi_set = sorted(F.closure([phi]), key=F.sort_key)
    vf = sorted({v for f in phi_set for v in F.all_vars(f)})
    profile_of: Dict[str, tuple] = {}
    for w in r.worlds:
        profile_of[w] = tuple(eval_rel(r, w, f) for f in phi_set)
    classes: Dict[tuple, str] = {}
    rep: Dict[str, str] = {}
    for w in r.worlds:
        p = profile_of[w]
        if p not in classes:
            classes[p] = f"c{len(classes)}"
            rep[classes[p]] = w
    worlds = tuple(sorted(classes.values(), key=lambda c: int(c[1:])))

    def truth(w: str, f: F.Formula) -> bool:
        return profile_of[w][phi_set.index(f)]

    dep_atoms = {}
    pred_atoms = {}
    for c in worlds:
        w = rep[c]
        deps = set()
        preds = set()
        for f in phi_set:
            if isinstance(f, F.DepAtom) and profile_of[w][phi_set.index(f)]:
                deps.add((f.xs, f.y))
            if isinstance(f, F.Pred) and profile_of[w][phi_set.index(f)]:
                preds.add((f.name, f.args))
        dep_atoms[c] = frozenset(deps)
        pred_atoms[c] = frozenset(preds)
    free_of = {f: F.free_vars(f) for f in phi_set}
    relations = {}
    subsets = [frozenset(combo) for n in range(len(vf) + 1)
               for combo in itertools.combinations(vf, n)]
    for xs in subsets:
        keys = {}
        for c in worlds:
            w = rep[c]
            frame = {y for (us, y) in dep_atoms[c] if us == xs}
            keys[c] = tuple((i, profile_of[w][i]) for i, f in enumerate(phi_set)
                            if free_of[f] <= frame)
        ids: Dict[tuple, int] = {}
        relations[xs] = {c: ids.setdefault(keys[c], len(ids)) for c in worlds}
    return RelationalModel(worlds, tuple(vf), "general", relations, dep_atoms,
                           pred_atoms)


# ---------------------------------------------------------------------------
# Text format


def dumps_relational(r: RelationalModel) -> str:
    out = [f"kind {r.kind}"]
    out.append("variables " + " ".join(r.variables))
    out.append("world " + " ".join(r.worlds))
    for xs in sorted(r.relations, key=lambda s: (len(s), tuple(sorted(s)))):
        rel = r.relations[xs]
        blocks: Dict[int, List[str]] = {}
        for w in r.worlds:
            blocks.setdefault(rel[w], []).append(w)
        pairs = []
        for cid in sorted(blocks):
            ws = blocks[cid]
            pairs.extend(f"{a}~{b}" for a, b in zip(ws, ws[1:]))
        out.append(f"rel {{{','.join(sorted(xs))}}}: " + " ".join(pairs))
    for w in r.worlds:
        deps = sorted(r.dep_atoms.get(w, frozenset()),
                      key=lambda p: (tuple(sorted(p[0])), p[1]))
        if deps:
            out.append(f"dep {w}: " + " ".join(
                f"{{{','.join(sorted(xs))}}}->{y}" for xs, y in deps))
    for w in r.worlds:
        atoms = sorted(r.pred_atoms.get(w, frozenset()))
        if atoms:
            out.append(f"atom {w}: " + " ".join(
                f"{name}({','.join(args)})" for name, args in atoms))
    return "\n".join(out) + "\n"


def parse_relational(text: str) -> RelationalModel:
    kind = "general"
    variables: Tuple[str, ...] = ()
    worlds: Tuple[str, ...] = ()
    rel_pairs: Dict[FrozenSet[str], List[Tuple[str, str]]] = {}
    dep_atoms: Dict[str, set] = {}
    pred_atoms: Dict[str, set] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "kind":
            kind = rest
        elif head == "variables":
            variables = tuple(rest.split())
        elif head == "world":
            worlds = tuple(rest.split())
        elif head == "rel":
            braces, _, body = rest.partition(":")
            xs = frozenset(v for v in braces.strip().strip("{}").split(",") if v)
            pairs = rel_pairs.setdefault(xs, [])
            for chunk in body.split():
                a, _, b = chunk.partition("~")
                pairs.append((a, b))
        elif head == "dep":
            w, _, body = rest.partition(":")
            w = w.strip()
            for chunk in body.split():
                braces, _, y = chunk.partition("->")
                xs = frozenset(v for v in braces.strip().strip("{}").split(",") if v)
                dep_atoms.setdefault(w, set()).add((xs, y))
        elif head == "atom":
            w, _, body = rest.partition(":")
            w = w.strip()
            for chunk in body.split():
                f = parse(chunk)
                if not isinstance(f, F.Pred):
                    raise RelationalError(
                        f"line {lineno}: expected a predicate atom, got {chunk!r}")
                pred_atoms.setdefault(w, set()).add((f.name, f.args))
        else:
            raise RelationalError(f"line {lineno}: unknown directive {head!r}")
    if not worlds:
        raise RelationalError("missing world line")
    relations = {xs: _closure_to_partition(worlds, pairs)
                 for xs, pairs in rel_pairs.items()}
    return RelationalModel(
        worlds, variables, kind, relations,
        {w: frozenset(s) for w, s in dep_atoms.items()},
        {w: frozenset(s) for w, s in pred_atoms.items()})
