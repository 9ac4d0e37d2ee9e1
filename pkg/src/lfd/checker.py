"""Model checking of the full extended language on dependence models.

An :class:`Evaluator` computes, per formula, the bitmask of team rows where it
holds, reusing a per-variable-set partition of the team so the modal clauses
cost one pass per agreement class instead of a quadratic scan.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, Tuple

from . import formulas as F
from .models import DependenceModel, ModelError


class EmptyTeamError(ModelError):
    """An announcement would leave no admissible assignments."""


class Evaluator:
    def __init__(self, model: DependenceModel):
        self.model = model
        self._parts: Dict[frozenset, Dict[int, Tuple[int, ...]]] = {}
        self._vecs: Dict[F.Formula, int] = {}
        self._full = (1 << len(model.team)) - 1
        self._subs: Dict[object, "Evaluator"] = {}

    # -- partitions

    def classes(self, xs: frozenset) -> Dict[int, Tuple[int, ...]]:
        """Map each row index to the tuple of row indices it agrees with on xs."""
        part = self._parts.get(xs)
        if part is None:
            order = tuple(sorted(xs))
            groups: Dict[tuple, list] = {}
            for i in range(len(self.model.team)):
                s = self.model.team[i]
                groups.setdefault(tuple(s[x] for x in order), []).append(i)
            part = {}
            for members in groups.values():
                block = tuple(members)
                for i in members:
                    part[i] = block
            self._parts[xs] = part
        return part

    def _info(self, i: int, xs: frozenset, ys: frozenset) -> FrozenSet[tuple]:
        order = tuple(sorted(ys))
        team = self.model.team
        return frozenset(tuple(team[j][y] for y in order)
                         for j in self.classes(xs)[i])

    # -- truth vectors

    def vector(self, f: F.Formula) -> int:
        v = self._vecs.get(f)
        if v is None:
            v = self._compute(f)
            self._vecs[f] = v
        return v

    def _compute(self, f: F.Formula) -> int:
        m = self.model
        n = len(m.team)
        if isinstance(f, F.Top):
            return self._full
        if isinstance(f, F.Bot):
            return 0
        if isinstance(f, F.Pred):
            if f.name in m.arities and m.arities[f.name] != len(f.args):
                raise ModelError(
                    f"predicate {f.name!r} has arity {m.arities[f.name]}, "
                    f"got {len(f.args)} arguments")
            ext = m.interpretation.get(f.name, frozenset())
            v = 0
            for i in range(n):
                s = m.team[i]
                if tuple(s[x] for x in f.args) in ext:
                    v |= 1 << i
            return v
        if isinstance(f, F.Not):
            return self._full & ~self.vector(f.body)
        if isinstance(f, F.And):
            return self.vector(f.left) & self.vector(f.right)
        if isinstance(f, F.Box):
            vb = self.vector(f.body)
            v = 0
            for block in set(self.classes(f.xs).values()):
                mask = 0
                for i in block:
                    mask |= 1 << i
                if mask & vb == mask:
                    v |= mask
            return v
        if isinstance(f, F.DepAtom):
            part = self.classes(f.xs)
            v = 0
            for block in set(part.values()):
                vals = {m.team[i][f.y] for i in block}
                if len(vals) == 1:
                    for i in block:
                        v |= 1 << i
            return v
        if isinstance(f, F.Indep):
            cond = f.cond or frozenset()
            v = 0
            for i in range(n):
                if self._info(i, f.xs | cond, f.ys) == self._info(i, cond, f.ys):
                    v |= 1 << i
            return v
        if isinstance(f, F.Compare):
            v = 0
            for i in range(n):
                if self._info(i, f.xs, f.ys) <= self._info(i, f.zs, f.ys):
                    v |= 1 << i
            return v
        if isinstance(f, F.CondDep):
            vc = self.vector(f.cond)
            v = 0
            for block in set(self.classes(f.xs).values()):
                vals = {m.team[j][f.y] for j in block if vc >> j & 1}
                for i in block:
                    if not vals or vals == {m.team[i][f.y]}:
                        v |= 1 << i
            return v
        if isinstance(f, F.Learn):
            v = 0
            for block in set(self.classes(f.xs).values()):
                sub = self._sub_for_rows(block)
                vb = sub.vector(f.body)
                for pos, i in enumerate(block):
                    if vb >> pos & 1:
                        v |= 1 << i
            return v
        if isinstance(f, F.Announce):
            va = self.vector(f.ann)
            v = self._full & ~va
            if va:
                rows = tuple(i for i in range(n) if va >> i & 1)
                sub = self._sub_for_rows(rows)
                vb = sub.vector(f.body)
                for pos, i in enumerate(rows):
                    if vb >> pos & 1:
                        v |= 1 << i
            return v
        raise ModelError(f"cannot evaluate {f!r}")

    def _sub_for_rows(self, rows: Tuple[int, ...]) -> "Evaluator":
        sub = self._subs.get(rows)
        if sub is None:
            sub = Evaluator(self.model.replace_team(
                [self.model.team[i] for i in rows]))
            self._subs[rows] = sub
        return sub

    def eval(self, i: int, f: F.Formula) -> bool:
        if not 0 <= i < len(self.model.team):
            raise ModelError(f"row index {i} out of range")
        return bool(self.vector(f) >> i & 1)


def _prepare(m: DependenceModel, phi: F.Formula) -> F.Formula:
    core = F.desugar(phi)
    m.check_vars(F.all_vars(core))
    return core


def eval_formula(m: DependenceModel, at, phi: F.Formula) -> bool:
    """Truth of phi at a team member (row index or assignment dict)."""
    core = _prepare(m, phi)
    i = at if isinstance(at, int) else m.index_of(at)
    return Evaluator(m).eval(i, core)


def truth_set(m: DependenceModel, phi: F.Formula) -> FrozenSet[int]:
    core = _prepare(m, phi)
    v = Evaluator(m).vector(core)
    return frozenset(i for i in range(len(m.team)) if v >> i & 1)


def update_learn(m: DependenceModel, s, xs: frozenset) -> DependenceModel:
    """Restrict the team to the rows agreeing with s on xs."""
    m.check_vars(xs)
    i = s if isinstance(s, int) else m.index_of(s)
    base = m.team[i]
    rows = [t for t in m.team if all(t[x] == base[x] for x in xs)]
    return m.replace_team(rows)


def update_announce(m: DependenceModel, phi: F.Formula) -> DependenceModel:
    """Restrict the team to the rows satisfying phi."""
    keep = truth_set(m, phi)
    if not keep:
        raise EmptyTeamError("announcement leaves an empty team")
    return m.replace_team([m.team[i] for i in sorted(keep)])
