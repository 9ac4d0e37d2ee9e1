"""Model checking: truth clauses, locality and renaming, soundness of the
axiom schemas, the worked validity/invalidity examples, independence laws and
the dynamic operators."""

import random

import pytest

from helpers import (axiom_instances, commutation_model,
                     distribution_footnote_model, nondef_models,
                     random_base_formula, random_model, random_varset,
                     restaurant_model)
from lfd import checker
from lfd import formulas as F
from lfd import models as M
from lfd.checker import (EmptyTeamError, eval_formula, truth_set,
                         update_announce, update_learn)
from lfd.parser import parse


def fs(*names):
    return frozenset(names)


def rowi(m, **kv):
    hits = [i for i in range(len(m.team))
            if all(m.team[i][k] == v for k, v in kv.items())]
    assert len(hits) == 1
    return hits[0]


class TestEval:
    def test_restaurant_dep_atom(self):
        m = restaurant_model()
        wz = rowi(m, Restaurant="Wilde Zwider")
        assert eval_formula(m, wz, parse("D{Food}Price"))

    def test_commutation_diamonds(self):
        m = commutation_model()
        assert eval_formula(m, 0, parse("dia{x}dia{y} R(x,y)"))
        assert not eval_formula(m, 0, parse("dia{y}dia{x} R(x,y)"))

    def test_conditional_dependence_separates_models(self):
        m, m2 = nondef_models()
        phi = parse("D{x}y|(P(x,y))")
        assert eval_formula(m, 0, phi)
        assert not eval_formula(m2, 0, phi)

    def test_elimination_instances_true_everywhere(self):
        rng = random.Random(31)
        for _ in range(20):
            m = random_model(rng, ("x", "y"))
            boxed = F.Box(random_varset(rng, ("x", "y")),
                          random_base_formula(rng, ("x", "y"), 2))
            f = F.Imp(boxed, boxed.body)
            for i in range(len(m.team)):
                assert eval_formula(m, i, f)

    def test_unknown_variable_errors(self):
        m = restaurant_model()
        with pytest.raises(M.ModelError):
            eval_formula(m, 0, parse("P(nope)"))

    def test_announcement_at_failing_world_is_true(self):
        m, _ = nondef_models()
        # the announced fact holds nowhere, so the conditional is vacuous
        f = parse("[ann Q(x)] P(x,y)")
        for i in range(len(m.team)):
            assert eval_formula(m, i, f)

    def test_nullary_predicates(self):
        m = M.model_from_rows(("x",), [["0"], ["1"]],
                              {"Up": 0, "Down": 0}, {"Up": {()}})
        assert eval_formula(m, 0, parse("Up()"))
        assert not eval_formula(m, 1, parse("Down()"))
        assert eval_formula(m, 0, parse("box{} Up()"))


class TestTruthSet:
    def test_restaurant_location_pins_restaurant(self):
        m = restaurant_model()
        got = truth_set(m, parse("D{Location}Restaurant"))
        assert got == {rowi(m, Restaurant="Mama Makan"),
                       rowi(m, Restaurant="Wilde Zwider")}

    def test_tautology_everywhere(self):
        m = restaurant_model()
        assert truth_set(m, parse("true")) == frozenset(range(6))

    def test_contradiction_nowhere(self):
        m = restaurant_model()
        assert truth_set(m, parse("P(Restaurant) & !P(Restaurant)")) == frozenset()


class TestLocality:
    def test_base_language(self):
        rng = random.Random(32)
        vs = ("x", "y", "z")
        for _ in range(100):
            m = random_model(rng, vs)
            f = random_base_formula(rng, vs, rng.randint(0, 3))
            free = F.free_vars(f)
            for i in range(len(m.team)):
                for j in range(len(m.team)):
                    if M.agree(m.team[i], m.team[j], free):
                        assert eval_formula(m, i, f) == eval_formula(m, j, f)

    def test_extensions(self):
        from helpers import random_surface_formula
        rng = random.Random(33)
        vs = ("x", "y")
        for _ in range(150):
            f = random_surface_formula(rng, vs, rng.randint(0, 3))
            m = random_model(rng, vs)
            free = F.free_vars(f)
            for i in range(len(m.team)):
                for j in range(len(m.team)):
                    if M.agree(m.team[i], m.team[j], free):
                        assert eval_formula(m, i, f) == eval_formula(m, j, f)


class TestRenaming:
    def test_truth_moves_with_the_permutation(self):
        rng = random.Random(34)
        vs = ("x", "y", "z")
        for _ in range(60):
            m = random_model(rng, vs)
            f = random_base_formula(rng, vs, rng.randint(0, 3))
            perm = list(vs)
            rng.shuffle(perm)
            sigma = dict(zip(vs, perm))
            m2 = M.permute_variables(m, sigma)
            f2 = F.rename(f, sigma)
            for i in range(len(m.team)):
                s = m.team[i]
                s2 = {sigma[v]: s[v] for v in vs}
                assert eval_formula(m, i, f) == eval_formula(m2, s2, f2)


class TestSoundness:
    def test_axiom_schemas_on_random_models(self):
        rng = random.Random(35)
        instances = axiom_instances(rng, ("x", "y", "z"), 5)
        for _ in range(60):
            m = random_model(rng, ("x", "y", "z"))
            for name, batch in instances.items():
                for f in batch:
                    for i in range(len(m.team)):
                        assert eval_formula(m, i, f), (name, f)


class TestWorkedExamples:
    def test_intro_needs_free_vars_covered(self):
        # P(x) -> box{x} P(x) holds everywhere; P(x) -> box{y} P(x) fails
        m = M.model_from_rows(("x", "y"), [["0", "0"], ["1", "0"]],
                              {"P": 1}, {"P": {("0",)}})
        assert eval_formula(m, 0, parse("P(x) -> box{x}P(x)"))
        assert not eval_formula(m, 0, parse("P(x) -> box{y}P(x)"))

    def test_intersection_modality_implies_iterated(self):
        rng = random.Random(36)
        vs = ("x", "y", "z")
        for _ in range(40):
            m = random_model(rng, vs)
            xs, ys = random_varset(rng, vs), random_varset(rng, vs)
            body = random_base_formula(rng, vs, 2)
            f = F.Imp(F.Box(xs & ys, body), F.Box(xs, F.Box(ys, body)))
            for i in range(len(m.team)):
                assert eval_formula(m, i, f)

    def test_iterated_does_not_imply_intersection(self):
        # x is settled on the x=0 block while a third value appears elsewhere
        m = M.model_from_rows(("x", "y"),
                              [["0", "0"], ["0", "1"], ["1", "2"]],
                              {"P": 1}, {"P": {("0",)}})
        f = parse("box{x}box{y}P(x) -> box{}P(x)")
        assert not eval_formula(m, 0, f)

    def test_distribution_fails_for_local_quantifier(self):
        m = distribution_footnote_model()
        i = rowi(m, x="1", y="1", z="1")
        assert eval_formula(m, i, parse("all{x}(P(x,y) -> P(x,z))"))
        assert eval_formula(m, i, parse("all{x}P(x,y)"))
        assert not eval_formula(m, i, parse("all{x}P(x,z)"))

    def test_disjoint_existential_merge_with_free_side_condition(self):
        rng = random.Random(37)
        vs = ("x", "y")
        for _ in range(40):
            m = random_model(rng, vs)
            a = random_base_formula(rng, ("x",), 2, {"P": 1})
            b = random_base_formula(rng, ("y",), 2, {"Q": 1})
            f = F.Imp(F.And(F.Dia(fs("x"), a), F.Dia(fs("y"), b)), F.And(a, b))
            for i in range(len(m.team)):
                assert eval_formula(m, i, f)


class TestIndependence:
    def test_dependence_definable_from_conditional_independence(self):
        rng = random.Random(38)
        vs = ("x", "y", "z")
        for _ in range(60):
            m = random_model(rng, vs)
            xs, ys = random_varset(rng, vs), random_varset(rng, vs)
            dep = F.conj([F.DepAtom(xs, y) for y in sorted(ys)]) if ys else F.Top()
            indep = F.Indep(ys, ys, xs)
            for i in range(len(m.team)):
                assert eval_formula(m, i, dep) == eval_formula(m, i, indep)

    def test_dependence_transfers_independence(self):
        rng = random.Random(39)
        for _ in range(80):
            m = random_model(rng, ("x", "y", "z"))
            f = parse("(D{x}z & I{x}{y}) -> I{z}{y}")
            for i in range(len(m.team)):
                assert eval_formula(m, i, f)

    def test_global_independence_commutes(self):
        rng = random.Random(40)
        for _ in range(60):
            m = random_model(rng, ("x", "y"))
            a = eval_formula(m, 0, parse("A I{x}{y}"))
            b = eval_formula(m, 0, parse("A I{y}{x}"))
            assert a == b

    def test_comparative_defines_conditional_independence(self):
        rng = random.Random(41)
        vs = ("x", "y", "z")
        for _ in range(60):
            m = random_model(rng, vs)
            xs, ys, zs = (random_varset(rng, vs) for _ in range(3))
            lhs = F.Indep(xs, ys, zs)
            rhs = F.Compare(zs, ys, xs | zs)
            for i in range(len(m.team)):
                assert eval_formula(m, i, lhs) == eval_formula(m, i, rhs)


class TestUpdates:
    def test_learn_food_keeps_italian_rows(self):
        m = restaurant_model()
        roma = rowi(m, Restaurant="Roma")
        sub = update_learn(m, roma, fs("Food"))
        names = {s["Restaurant"] for s in sub.team}
        assert names == {"Roma", "Hasta La Pasta"}

    def test_learn_nothing_keeps_team(self):
        m = restaurant_model()
        assert update_learn(m, 0, fs()).team == m.team

    def test_learn_everything_pins_row(self):
        m = restaurant_model()
        sub = update_learn(m, 2, frozenset(m.variables))
        assert sub.team == (m.team[2],)

    def test_announce_restricts_to_truth_set(self):
        m = restaurant_model()
        phi = parse("D{Food}Price")
        sub = update_announce(m, phi)
        assert len(sub.team) == len(truth_set(m, phi))

    def test_announce_empty_errors(self):
        m = restaurant_model()
        with pytest.raises(EmptyTeamError):
            update_announce(m, parse("false"))

    def test_announce_recursion_law(self):
        rng = random.Random(42)
        vs = ("x", "y")
        for _ in range(60):
            m = random_model(rng, vs)
            a = random_base_formula(rng, vs, 2)
            b = random_base_formula(rng, vs, 2)
            xs = random_varset(rng, vs)
            lhs = F.Announce(a, F.Box(xs, b))
            rhs = F.Imp(a, F.Box(xs, F.Imp(a, F.Announce(a, b))))
            for i in range(len(m.team)):
                assert eval_formula(m, i, lhs) == eval_formula(m, i, rhs)

    def test_learn_recursion_laws(self):
        rng = random.Random(43)
        vs = ("x", "y")
        for _ in range(60):
            m = random_model(rng, vs)
            xs, ys = random_varset(rng, vs), random_varset(rng, vs)
            a = random_base_formula(rng, vs, 1)
            b = random_base_formula(rng, vs, 1)
            name = rng.choice(("P", "R"))
            args = tuple(rng.choice(vs) for _ in
                         range(1 if name == "P" else 2))
            atom = F.Pred(name, args)
            z = rng.choice(vs)
            pairs = [
                (F.Learn(xs, atom), atom),
                (F.Learn(xs, F.Not(a)), F.Not(F.Learn(xs, a))),
                (F.Learn(xs, F.And(a, b)),
                 F.And(F.Learn(xs, a), F.Learn(xs, b))),
                (F.Learn(xs, F.Box(ys, a)),
                 F.Box(xs | ys, F.Learn(xs, a))),
                (F.Learn(xs, F.DepAtom(ys, z)), F.DepAtom(xs | ys, z)),
            ]
            for lhs, rhs in pairs:
                for i in range(len(m.team)):
                    assert eval_formula(m, i, lhs) == eval_formula(m, i, rhs)


class TestConditionalDependenceRecursion:
    def test_announce_dep_atom_law(self):
        rng = random.Random(44)
        vs = ("x", "y")
        for _ in range(60):
            m = random_model(rng, vs)
            a = random_base_formula(rng, vs, 2)
            xs = random_varset(rng, vs)
            z = rng.choice(vs)
            lhs = F.Announce(a, F.DepAtom(xs, z))
            rhs = F.Imp(a, F.CondDep(xs, z, a))
            for i in range(len(m.team)):
                assert eval_formula(m, i, lhs) == eval_formula(m, i, rhs)
