"""Realizability layer: the relational translation of formulas, extraction
of goals from checked proofs, and the numeric conformance harness."""

import pytest

from ellkit.errors import ShapeMismatch, UnboundVariable
from ellkit.kernel import check_proof
from ellkit.library import church, nat, nat_formula, numeral, theory
from ellkit.projections import project_minus
from ellkit.realizability import (
    RealizabilityGoal,
    check_realizer_wf,
    conformance_test,
    default_samples,
    goal_of_proof,
    nat_spec,
    realizes,
    ref_minus,
    ref_mult,
    ref_plus,
    ref_pred,
    ref_prod,
    ref_sum,
    widened_context,
)
from ellkit.stdlib import proof_plus
from ellkit.syntax import Bang, ForallTerm, Lolli, TVar, Var, show_formula

F = nat_formula(numeral(0))


class TestRealizesClauses:
    def test_predicate_clause_widens_and_quantifies_a_carrier(self):
        shown = show_formula(realizes(Var("t"), F))
        assert shown.startswith("alltype $X . All X : [")
        # The widened predicate ranges over the original sort and the carrier.
        assert ", $X]" in shown

    def test_implication_clause_binds_a_realizer_of_the_antecedent(self):
        clause = realizes(Var("t"), Lolli(F, F))
        assert isinstance(clause, ForallTerm)
        assert clause.ty == project_minus(F)

    def test_bang_clause_is_homomorphic(self):
        assert realizes(Var("t"), Bang(F)) == Bang(realizes(Var("t"), F))

    def test_carrier_names_cannot_collide_with_surface_names(self):
        # "$" is rejected by the surface lexer, so generated carriers can
        # never capture a user-written variable.
        shown = show_formula(realizes(Var("t"), F))
        assert "$X" in shown


class TestGoalExtraction:
    def test_goal_of_closed_proof(self, checked_corpus):
        cp = checked_corpus["plus"]
        goal = goal_of_proof(cp)
        assert goal.formula == cp.sequent.goal
        assert goal.term == cp.term
        assert goal.tyvars == ()
        assert goal.termvars == ()
        assert goal.preds == ()

    @pytest.mark.parametrize(
        "name",
        [
            "zero", "one", "succ", "identity", "const_zero", "const_one",
            "plus", "mult", "mult_core", "pred", "doubling", "coercion",
            "sum_of_identity", "sum_of_doubling", "product_of_successor",
        ],
    )
    def test_every_library_realizer_is_wellformed(self, name, checked_corpus):
        goal = goal_of_proof(checked_corpus[name])
        formula = check_realizer_wf(goal, theory)
        assert show_formula(formula)

    def test_open_goals_check_in_their_context(self):
        goal = RealizabilityGoal(
            church(2), nat_formula(Var("x")), (), (("x", nat),), ()
        )
        formula = check_realizer_wf(goal, theory)
        assert show_formula(formula).startswith("alltype $X . ")

    def test_ill_typed_realizer_is_rejected(self):
        goal = RealizabilityGoal(Var("nope"), F, (), (), ())
        with pytest.raises(UnboundVariable):
            check_realizer_wf(goal, theory)


class TestWidenedContext:
    def test_adds_one_carrier_per_predicate(self):
        carriers, widened = widened_context([("X", (nat,))])
        assert carriers == ("$X",)
        assert widened == (("X", (nat, TVar("$X"))),)

    def test_multiple_predicates_get_distinct_carriers(self):
        carriers, widened = widened_context([("X", (nat,)), ("Y", ())])
        assert carriers == ("$X", "$Y")
        assert widened[1] == ("Y", (TVar("$Y"),))


class TestConformance:
    def test_plus_agrees_with_reference(self, checked_corpus):
        spec = nat_spec()
        report = conformance_test(
            checked_corpus["plus"], [spec, spec, spec], ref_plus,
            samples=((0, 0), (2, 3), (4, 4)), name="plus",
        )
        assert report.all_pass
        assert report.passed == 3
        assert [r.got for r in report.results] == [0, 5, 8]

    def test_report_text_format(self, checked_corpus):
        spec = nat_spec()
        report = conformance_test(
            checked_corpus["plus"], [spec, spec, spec], ref_plus,
            samples=((2, 3),), name="plus",
        )
        lines = report.to_text().splitlines()
        assert lines[0].startswith("plus(2,3) = 5 expected 5 [ok] steps=")
        assert lines[-1] == "plus: 1/1 samples agree"

    def test_disagreement_is_recorded_not_raised(self, checked_corpus):
        spec = nat_spec()
        report = conformance_test(
            checked_corpus["plus"], [spec, spec, spec], lambda a, b: a,
            samples=((2, 3),), name="wrong",
        )
        (r,) = report.results
        assert not r.ok
        assert (r.got, r.expected) == (5, 2)
        assert report.failed == 1

    def test_fuel_exhaustion_is_recorded_per_sample(self, checked_corpus):
        spec = nat_spec()
        report = conformance_test(
            checked_corpus["plus"], [spec, spec, spec], ref_plus,
            samples=((4, 4),), fuel=5, name="starved",
        )
        (r,) = report.results
        assert r.error == "fuel exhausted after 5 steps"
        assert not report.all_pass

    def test_sample_arity_is_validated(self, checked_corpus):
        spec = nat_spec()
        with pytest.raises(ShapeMismatch, match="specs say 1"):
            conformance_test(
                checked_corpus["plus"], [spec, spec], ref_plus,
                samples=((0, 0),),
            )

    def test_result_spec_is_mandatory(self, checked_corpus):
        with pytest.raises(ShapeMismatch, match="result data type"):
            conformance_test(checked_corpus["plus"], [], ref_plus, samples=((),))


class TestSampleGrids:
    def test_grid_sizes(self):
        assert default_samples(0) == ((),)
        assert len(default_samples(1)) == 7
        assert len(default_samples(2)) == 49
        assert len(default_samples(3)) == 125

    def test_two_argument_grid_covers_zero_to_six(self):
        grid = default_samples(2)
        assert (0, 0) in grid and (6, 6) in grid
        assert all(0 <= a <= 6 and 0 <= b <= 6 for a, b in grid)


class TestReferenceArithmetic:
    def test_flat_operations(self):
        assert ref_plus(2, 3) == 5
        assert ref_mult(4, 6) == 24
        assert ref_pred(0) == 0 and ref_pred(5) == 4
        assert ref_minus(3, 5) == 0 and ref_minus(5, 3) == 2

    def test_iterators_run_below_the_bound(self):
        assert ref_sum(lambda i: i)(4) == 6
        assert ref_sum(lambda i: i)(0) == 0
        assert ref_prod(lambda i: i + 1)(3) == 6
        assert ref_prod(lambda i: 0)(0) == 1
