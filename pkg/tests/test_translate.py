"""First-order translation, the finite evaluator, and TPTP output."""

import random

import pytest

from helpers import random_base_formula, random_model, restaurant_model
from lfd import checker
from lfd import formulas as F
from lfd.fol import (FAnd, FEq, FForall, FNot, FPred, FolError, emit_tptp,
                     eval_fol, fol_free_vars, parse_tptp, structure_of,
                     to_fol)
from lfd.parser import parse


class TestToFol:
    def test_atom_unchanged(self):
        assert to_fol(parse("P(x,y)"), ("x", "y")) == FPred("P", ("x", "y"))

    def test_box_quantifies_complement(self):
        got = to_fol(parse("box{x}P(x)"), ("x", "y"))
        want = FForall(("y",), FNot(FAnd(FPred("team_A", ("x", "y")),
                                         FNot(FPred("P", ("x",))))))
        assert got == want

    def test_dep_atom_uses_primed_copies(self):
        got = to_fol(parse("D{x}y"), ("x", "y"))
        want = FForall(
            ("y", "y_p"),
            FNot(FAnd(FAnd(FPred("team_A", ("x", "y")),
                           FPred("team_A", ("x", "y_p"))),
                      FNot(FEq("y", "y_p")))))
        assert got == want

    def test_free_variables_preserved(self):
        rng = random.Random(81)
        vs = ("x", "y", "z")
        for _ in range(100):
            f = random_base_formula(rng, vs, rng.randint(0, 3))
            assert fol_free_vars(to_fol(f, vs)) == F.free_vars(f)

    def test_projection_translates_validly(self):
        # D{x}x has no complement copy of x, so the equation is trivial
        got = to_fol(parse("D{x}x"), ("x", "y"))
        rng = random.Random(82)
        for _ in range(20):
            m = random_model(rng, ("x", "y"))
            st = structure_of(m)
            for s in m.team:
                assert eval_fol(st, s, got)

    def test_rejects_foreign_variables(self):
        with pytest.raises(FolError):
            to_fol(parse("P(w)"), ("x", "y"))


class TestEvalFol:
    def test_reflexivity_of_equality(self):
        st = structure_of(restaurant_model())
        assert eval_fol(st, {}, FForall(("u",), FEq("u", "u")))

    def test_team_predicate_holds_of_rows_only(self):
        m = restaurant_model()
        st = structure_of(m)
        guard = FPred("team_A", m.variables)
        for s in m.team:
            assert eval_fol(st, s, guard)
        off = dict(m.team[0])
        off["Price"] = "Expensive"
        assert not eval_fol(st, off, guard)

    def test_unbound_variable_errors(self):
        st = structure_of(restaurant_model())
        with pytest.raises(FolError):
            eval_fol(st, {}, FEq("u", "v"))

    def test_translation_agrees_with_team_semantics(self):
        rng = random.Random(83)
        vs = ("x", "y", "z")
        for _ in range(200):
            m = random_model(rng, vs, max_objects=3, max_rows=4)
            st = structure_of(m)
            f = random_base_formula(rng, vs, rng.randint(0, 3))
            psi = to_fol(f, vs)
            i = rng.randrange(len(m.team))
            assert checker.eval_formula(m, i, f) == \
                eval_fol(st, m.team[i], psi), f


class TestTptp:
    def test_reflexivity_shape(self):
        unit = emit_tptp(FForall(("x",), FEq("x", "x")), "n")
        assert unit == "fof(n, axiom, (![X]: (X = X)))."

    def test_box_example_golden(self):
        psi = to_fol(parse("box{x}P(x)"), ("x", "y"))
        unit = emit_tptp(psi, "goal", role="conjecture")
        assert unit == ("fof(goal, conjecture, "
                        "(![Y]: ~(team_A(X,Y) & ~'P'(X)))).")

    def test_round_trip(self):
        rng = random.Random(84)
        vs = ("x", "y", "z")
        for _ in range(100):
            f = random_base_formula(rng, vs, rng.randint(0, 3))
            psi = to_fol(f, vs)
            name, role, back = parse_tptp(emit_tptp(psi, "unit_1"))
            assert (name, role) == ("unit_1", "axiom")
            assert back == psi

    def test_negate_wraps(self):
        psi = FEq("x", "x")
        unit = emit_tptp(psi, "n", negate=True)
        _, _, back = parse_tptp(unit)
        assert back == FNot(psi)
