"""Line-based Hilbert proofs and their checker.

A line is justified as a propositional tautology, as an instance of one of
the named axiom schemas (distribution, introduction, elimination, projection,
transitivity, transfer), or by modus ponens / necessitation from earlier
lines.  The tautology oracle builds a truth table over the line's maximal
non-boolean subformulas (at most twenty of them).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from . import formulas as F
from .parser import format_formula, parse

AXIOM_NAMES = ("dist", "intro", "elim", "proj", "trans", "transfer")

MAX_TAUT_ATOMS = 20


class HilbertError(ValueError):
    pass


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class Axiom:
    name: str


@dataclass(frozen=True)
class MP:
    """Line `imp` is an implication whose antecedent is line `ante`."""

    imp: int
    ante: int


@dataclass(frozen=True)
class Nec:
    source: int
    xs: frozenset


Justification = Union[Taut, Axiom, MP, Nec]


@dataclass(frozen=True)
class Line:
    formula: F.Formula
    justification: Justification


@dataclass(frozen=True)
class HilbertProof:
    lines: Tuple[Line, ...]


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    line: Optional[int] = None  # 1-based
    reason: Optional[str] = None


# ---------------------------------------------------------------------------
# Tautology oracle


def _boolean_atoms(f: F.Formula, acc: List[F.Formula]) -> None:
    if isinstance(f, (F.Not, F.And)):
        for c in F.children(f):
            _boolean_atoms(c, acc)
    elif isinstance(f, (F.Top, F.Bot)):
        pass
    else:
        if f not in acc:
            acc.append(f)


def is_tautology(f: F.Formula) -> bool:
    g = F.desugar(f)
    atoms: List[F.Formula] = []
    _boolean_atoms(g, atoms)
    if len(atoms) > MAX_TAUT_ATOMS:
        raise HilbertError(
            f"tautology check over {len(atoms)} atoms exceeds the cap of "
            f"{MAX_TAUT_ATOMS}")
    index = {a: i for i, a in enumerate(atoms)}

    def ev(h: F.Formula, row: tuple) -> bool:
        if isinstance(h, F.Not):
            return not ev(h.body, row)
        if isinstance(h, F.And):
            return ev(h.left, row) and ev(h.right, row)
        if isinstance(h, F.Top):
            return True
        if isinstance(h, F.Bot):
            return False
        return row[index[h]]

    return all(ev(g, row) for row in itertools.product((False, True),
                                                       repeat=len(atoms)))


# ---------------------------------------------------------------------------
# Axiom schema matching (on desugared formulas)


def _match_imp(f: F.Formula) -> Optional[Tuple[F.Formula, F.Formula]]:
    # 'a -> b' desugars to '!(a & !b)'
    if isinstance(f, F.Not) and isinstance(f.body, F.And) \
            and isinstance(f.body.right, F.Not):
        return f.body.left, f.body.right.body
    return None


def _flat_conj(f: F.Formula) -> List[F.Formula]:
    if isinstance(f, F.And):
        return _flat_conj(f.left) + _flat_conj(f.right)
    return [f]


def _atom_group(fs: Sequence[F.Formula]):
    """Common source and head set of a flat list of dependence atoms."""
    if not fs or not all(isinstance(f, F.DepAtom) for f in fs):
        return None
    src = fs[0].xs
    if any(f.xs != src for f in fs):
        return None
    return src, frozenset(f.y for f in fs)


def matches_axiom(name: str, f: F.Formula) -> bool:
    g = F.desugar(f)
    if name == "proj":
        return isinstance(g, F.DepAtom) and g.y in g.xs
    pair = _match_imp(g)
    if name == "elim":
        if pair is None:
            return False
        a, b = pair
        return isinstance(a, F.Box) and a.body == b
    if name == "intro":
        if pair is None:
            return False
        a, b = pair
        return isinstance(b, F.Box) and b.body == a and F.free_vars(a) <= b.xs
    if name == "dist":
        if pair is None:
            return False
        a, b = pair
        inner = _match_imp(b)
        if not isinstance(a, F.Box) or inner is None:
            return False
        pq = _match_imp(a.body)
        if pq is None:
            return False
        p, q = pq
        l, r = inner
        return l == F.Box(a.xs, p) and r == F.Box(a.xs, q)
    if name == "trans":
        if pair is None or not isinstance(pair[0], F.And):
            return False
        a, b = pair
        left = _atom_group(_flat_conj(a.left))
        right = _atom_group(_flat_conj(a.right))
        goal = _atom_group(_flat_conj(b))
        if left is None or right is None or goal is None:
            return False
        (xs, ys), (ys2, zs), (xs2, zs2) = left, right, goal
        return ys2 == ys and xs2 == xs and zs2 == zs
    if name == "transfer":
        if pair is None or not isinstance(pair[0], F.And):
            return False
        a, b = pair
        if not isinstance(b, F.Box):
            return False
        parts = _flat_conj(a)
        boxes = [p for p in parts if isinstance(p, F.Box)]
        atoms = [p for p in parts if isinstance(p, F.DepAtom)]
        if len(boxes) != 1 or len(atoms) + 1 != len(parts):
            return False
        grp = _atom_group(atoms)
        if grp is None:
            return False
        xs, ys = grp
        inner = boxes[0]
        return inner.xs == ys and b == F.Box(xs, inner.body)
    raise HilbertError(f"unknown axiom name {name!r}")


# ---------------------------------------------------------------------------
# Checking


def check_hilbert(proof: HilbertProof) -> CheckResult:
    done: List[F.Formula] = []
    for n, line in enumerate(proof.lines, start=1):
        f = F.desugar(line.formula)
        if not F.is_base(f):
            return CheckResult(False, n, "not a base formula")
        j = line.justification
        try:
            if isinstance(j, Taut):
                if not is_tautology(f):
                    return CheckResult(False, n, "not a propositional tautology")
            elif isinstance(j, Axiom):
                if j.name not in AXIOM_NAMES:
                    return CheckResult(False, n, f"unknown axiom {j.name!r}")
                if not matches_axiom(j.name, f):
                    return CheckResult(
                        False, n, f"does not match the {j.name} schema")
            elif isinstance(j, MP):
                if not (1 <= j.imp < n and 1 <= j.ante < n):
                    return CheckResult(False, n, "modus ponens references a "
                                                 "line that is not earlier")
                imp = _match_imp(F.desugar(proof.lines[j.imp - 1].formula))
                ante = F.desugar(proof.lines[j.ante - 1].formula)
                if imp is None:
                    return CheckResult(False, n,
                                       f"line {j.imp} is not an implication")
                if imp[0] != ante:
                    return CheckResult(False, n,
                                       f"line {j.ante} is not the antecedent "
                                       f"of line {j.imp}")
                if imp[1] != f:
                    return CheckResult(False, n,
                                       "conclusion does not match the "
                                       "implication's consequent")
            elif isinstance(j, Nec):
                if not 1 <= j.source < n:
                    return CheckResult(False, n, "necessitation references a "
                                                 "line that is not earlier")
                src = F.desugar(proof.lines[j.source - 1].formula)
                if f != F.Box(j.xs, src):
                    return CheckResult(False, n,
                                       "conclusion is not the boxed source line")
            else:
                return CheckResult(False, n, "unknown justification")
        except HilbertError as e:
            return CheckResult(False, n, str(e))
        done.append(f)
    return CheckResult(True)


# ---------------------------------------------------------------------------
# File format: 'n. <formula> [taut | axiom NAME | mp i j | nec i {X}]'


def parse_proof(text: str) -> HilbertProof:
    lines: List[Line] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        m = re.match(r"(\d+)\.\s*(.*)$", stripped)
        if not m:
            raise HilbertError(f"line {lineno}: expected 'n. formula [just]'")
        num = int(m.group(1))
        if num != len(lines) + 1:
            raise HilbertError(f"line {lineno}: expected line number {len(lines) + 1}")
        body = m.group(2)
        if "[" not in body or not body.rstrip().endswith("]"):
            raise HilbertError(f"line {lineno}: missing [justification]")
        fpart, jpart = body.rsplit("[", 1)
        jtext = jpart.rstrip().rstrip("]").strip()
        formula = parse(fpart.strip())
        parts = jtext.split()
        if not parts:
            raise HilbertError(f"line {lineno}: empty justification")
        kind = parts[0]
        if kind == "taut" and len(parts) == 1:
            just: Justification = Taut()
        elif kind == "axiom" and len(parts) == 2:
            just = Axiom(parts[1])
        elif kind == "mp" and len(parts) == 3:
            just = MP(int(parts[1]), int(parts[2]))
        elif kind == "nec" and len(parts) == 3:
            xs = frozenset(v for v in parts[2].strip("{}").split(",") if v)
            just = Nec(int(parts[1]), xs)
        else:
            raise HilbertError(f"line {lineno}: bad justification {jtext!r}")
        lines.append(Line(formula, just))
    return HilbertProof(tuple(lines))


def dumps_proof(proof: HilbertProof) -> str:
    out = []
    for n, line in enumerate(proof.lines, start=1):
        j = line.justification
        if isinstance(j, Taut):
            jt = "taut"
        elif isinstance(j, Axiom):
            jt = f"axiom {j.name}"
        elif isinstance(j, MP):
            jt = f"mp {j.imp} {j.ante}"
        else:
            jt = f"nec {j.source} {{{','.join(sorted(j.xs))}}}"
        out.append(f"{n}. {format_formula(line.formula)} [{jt}]")
    return "\n".join(out) + "\n"
