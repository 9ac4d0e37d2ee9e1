"""The exhaustive two-variable formula corpus shared by the agreement tests.

Atoms: P(x), P(y), R(x,y), D{x}y, D{}y.  Operators: negation, conjunction
(deduplicated up to commutativity), implication, and the modalities over {},
{x} and {x,y}.  The corpus is every formula with at most two operator
applications and modal depth at most two, in a deterministic order.
"""

from __future__ import annotations

from typing import List

from lfd import formulas as F

ATOMS = (
    F.Pred("P", ("x",)),
    F.Pred("P", ("y",)),
    F.Pred("R", ("x", "y")),
    F.DepAtom(frozenset(("x",)), "y"),
    F.DepAtom(frozenset(), "y"),
)

BOX_SETS = (frozenset(), frozenset(("x",)), frozenset(("x", "y")))

MAX_OPS = 2


def _canon_and(a: F.Formula, b: F.Formula) -> F.Formula:
    if F.sort_key(b) < F.sort_key(a):
        a, b = b, a
    return F.And(a, b)


def corpus_formulas(max_ops: int = MAX_OPS) -> List[F.Formula]:
    by_size = {0: list(ATOMS)}
    seen = set(ATOMS)

    def add(layer: list, f: F.Formula) -> None:
        if f not in seen and F.modal_depth(F.desugar(f)) <= 2:
            seen.add(f)
            layer.append(f)

    for size in range(1, max_ops + 1):
        layer: list = []
        for f in by_size[size - 1]:
            add(layer, F.Not(f))
            for xs in BOX_SETS:
                add(layer, F.Box(xs, f))
        for left_size in range(size):
            right_size = size - 1 - left_size
            if right_size < 0:
                continue
            for a in by_size[left_size]:
                for b in by_size[right_size]:
                    add(layer, _canon_and(a, b))
                    add(layer, F.Imp(a, b))
        by_size[size] = layer
    out: List[F.Formula] = []
    for size in range(max_ops + 1):
        out.extend(sorted(by_size[size], key=F.sort_key))
    return out
