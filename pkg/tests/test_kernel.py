"""Sequent checker tests: rule shapes, bookkeeping, and rejection paths.

The positive cases pin down the exact sequent each rule produces (hypothesis
multiset, goal, extracted witness).  The negative cases assert the specific
exception subclass, since callers dispatch on those types.
"""

from collections import Counter

import pytest

from ellkit.kernel import (
    Abstraction,
    AllPredElim,
    AllPredIntro,
    AllTermElim,
    AllTermIntro,
    AllTypeElim,
    AllTypeIntro,
    Application,
    Axiom,
    Contraction,
    DuplicateName,
    Equality,
    EqualityTraceRejected,
    HoleMismatch,
    IllFormedPayload,
    LinearityViolation,
    NonBangContraction,
    Promotion,
    PromotionShape,
    RuleViolation,
    SideConditionFreeVariable,
    Weakening,
    check_proof,
    extract_typing,
    refresh_script,
    split_linear_context,
)
from ellkit.library import nat, nat_formula, numeral, theory
from ellkit.rewrite import AxiomStep
from ellkit.stdlib import op
from ellkit.syntax import (
    Atom,
    Bang,
    ForallTerm,
    Lolli,
    TVar,
    Var,
    formulas_equal,
    show_formula,
    show_type,
    terms_equal,
)
from ellkit.wellformed import UnboundVariable, WellformednessFailure

from generators import gen_proof

F = nat_formula(numeral(0))
G = nat_formula(numeral(1))


def hyp_counter(checked):
    return Counter(checked.sequent.hyps)


class TestRuleShapes:
    def test_axiom(self):
        cp = check_proof(Axiom("h", F), theory)
        assert cp.rule == "axiom"
        assert cp.sequent.hyps == (("h", F),)
        assert cp.sequent.goal == F
        assert cp.term == Var("h")
        assert cp.children == ()

    def test_weakening_adds_unused_hypothesis(self):
        cp = check_proof(Weakening(Axiom("h", F), "w", G), theory)
        assert hyp_counter(cp) == Counter({("h", F): 1, ("w", G): 1})
        assert cp.sequent.goal == F

    def test_abstraction_discharges(self):
        cp = check_proof(Abstraction(Axiom("h", F), "h"), theory)
        assert cp.sequent.hyps == ()
        assert cp.sequent.goal == Lolli(F, F)

    def test_application_merges_contexts(self):
        script = Application(Abstraction(Axiom("h", F), "h"), Axiom("k", F))
        cp = check_proof(script, theory)
        assert cp.sequent.hyps == (("k", F),)
        assert cp.sequent.goal == F
        # The witness is a beta redex that collapses to the argument's witness.
        assert terms_equal(cp.term, Var("k"))

    def test_promotion_wiring(self):
        gadget = Promotion((("k", Axiom("j", Bang(F))),), Axiom("k", F))
        cp = check_proof(gadget, theory)
        assert cp.rule == "promote"
        assert cp.promotion_labels == ("k",)
        assert cp.sequent.hyps == (("j", Bang(F)),)
        assert cp.sequent.goal == Bang(F)
        assert cp.term == Var("j")
        assert {c.sequent.hyps[0][0] for c in cp.children} == {"j", "k"}

    def test_shared_bang_then_contraction(self):
        # Two premises may consume the same !-hypothesis; the application
        # records it twice and contraction folds the copies back to one.
        fn = Weakening(Abstraction(Axiom("a", F), "a"), "h", Bang(F))
        arg = Weakening(Axiom("b", F), "h", Bang(F))
        merged = check_proof(Application(fn, arg), theory)
        assert hyp_counter(merged)[("h", Bang(F))] == 2
        folded = check_proof(Contraction(Application(fn, arg), "h"), theory)
        assert hyp_counter(folded) == Counter({("b", F): 1, ("h", Bang(F)): 1})
        assert folded.sequent.goal == F

    def test_term_quantifier_round_trip(self):
        open_body = Abstraction(Axiom("h", nat_formula(Var("x"))), "h")
        closed = AllTermIntro(open_body, "x", nat)
        cp = check_proof(closed, theory)
        assert show_formula(cp.sequent.goal).startswith("all x : ")
        inst = check_proof(AllTermElim(closed, numeral(3)), theory)
        want = Lolli(nat_formula(numeral(3)), nat_formula(numeral(3)))
        assert formulas_equal(inst.sequent.goal, want)

    def test_type_quantifier_round_trip(self):
        body = ForallTerm(TVar("t"), F, hint="z")
        gen = AllTypeIntro(Abstraction(Axiom("h", body), "h"), "t")
        cp = check_proof(gen, theory)
        assert show_formula(cp.sequent.goal).startswith("alltype t . ")
        inst = check_proof(AllTypeElim(gen, nat), theory)
        want = Lolli(ForallTerm(nat, F, hint="z"), ForallTerm(nat, F, hint="z"))
        assert formulas_equal(inst.sequent.goal, want)

    def test_pred_quantifier_round_trip(self):
        gen = AllPredIntro(
            Abstraction(Axiom("h", Atom("X", (numeral(0),))), "h"), "X", (nat,)
        )
        cp = check_proof(gen, theory)
        assert show_formula(cp.sequent.goal).startswith("All X : ")
        inst = check_proof(AllPredElim(gen, ("y",), nat_formula(Var("y"))), theory)
        assert formulas_equal(inst.sequent.goal, Lolli(F, F))

    def test_equality_forward(self):
        lhs = op("plus", numeral(1), Var("0"))
        hole = nat_formula(Var("q"))
        trace = (AxiomStep("plus_zero", (("x", numeral(1)),)),)
        script = Equality(
            Axiom("h", nat_formula(lhs)), "q", hole, lhs, numeral(1), nat,
            "forward", trace,
        )
        cp = check_proof(script, theory)
        assert formulas_equal(cp.sequent.goal, nat_formula(numeral(1)))
        assert cp.sequent.hyps[0][1] == nat_formula(lhs)

    def test_equality_backward(self):
        # Backward rewrites the goal from the instantiated right side to the
        # left one; the trace is still read left to right.
        lhs = op("plus", numeral(1), Var("0"))
        hole = nat_formula(Var("q"))
        trace = (AxiomStep("plus_zero", (("x", numeral(1)),)),)
        script = Equality(
            Axiom("h", nat_formula(numeral(1))), "q", hole, lhs, numeral(1), nat,
            "backward", trace,
        )
        cp = check_proof(script, theory)
        assert formulas_equal(cp.sequent.goal, nat_formula(lhs))


class TestRejections:
    def test_contraction_requires_bang(self):
        with pytest.raises(NonBangContraction):
            check_proof(Contraction(Axiom("h", F), "h"), theory)

    def test_contraction_requires_two_copies(self):
        with pytest.raises(RuleViolation, match="two occurrences"):
            check_proof(Contraction(Axiom("h", Bang(F)), "h"), theory)

    def test_weakening_rejects_present_label(self):
        script = Weakening(Weakening(Axiom("m", F), "l", Bang(G)), "l", Bang(G))
        with pytest.raises(LinearityViolation, match="already present"):
            check_proof(script, theory)

    def test_abstraction_missing_label(self):
        with pytest.raises(RuleViolation, match="not among the hypotheses"):
            check_proof(Abstraction(Axiom("h", F), "nope"), theory)

    def test_application_needs_implication(self):
        with pytest.raises(RuleViolation, match="needs an implication"):
            check_proof(Application(Axiom("h", F), Axiom("k", G)), theory)

    def test_application_argument_mismatch(self):
        script = Application(Abstraction(Axiom("h", F), "h"), Axiom("k", G))
        with pytest.raises(RuleViolation, match="argument proves"):
            check_proof(script, theory)

    def test_merge_rejects_shared_linear_label(self):
        fn = Weakening(Abstraction(Axiom("a", F), "a"), "h", F)
        with pytest.raises(LinearityViolation, match="consumed by more than one"):
            check_proof(Application(fn, Axiom("h", F)), theory)

    def test_merge_rejects_shared_label_with_distinct_bangs(self):
        fn = Weakening(Abstraction(Axiom("a", F), "a"), "h", Bang(F))
        arg = Weakening(Axiom("b", F), "h", Bang(G))
        with pytest.raises(LinearityViolation):
            check_proof(Application(fn, arg), theory)

    def test_promotion_inner_labels_must_match(self):
        gadget = Promotion((("k", Axiom("j", Bang(F))),), Axiom("m", F))
        with pytest.raises(PromotionShape, match="promotion declares"):
            check_proof(gadget, theory)

    def test_promotion_premise_must_conclude_bang(self):
        gadget = Promotion((("k", Axiom("j", F)),), Axiom("k", F))
        with pytest.raises(PromotionShape):
            check_proof(gadget, theory)

    def test_promotion_premise_bang_body_must_agree(self):
        gadget = Promotion((("k", Axiom("j", Bang(G))),), Axiom("k", F))
        with pytest.raises(PromotionShape):
            check_proof(gadget, theory)

    def test_generalization_blocked_by_free_hypothesis(self):
        script = AllTermIntro(Axiom("h", nat_formula(Var("x"))), "x", nat)
        with pytest.raises(SideConditionFreeVariable, match="free in hypothesis"):
            check_proof(script, theory)

    def test_generalization_rejects_shadowing(self):
        inner = AllTermIntro(
            Abstraction(Axiom("h", nat_formula(Var("x"))), "h"), "x", nat
        )
        with pytest.raises(DuplicateName, match="already in scope"):
            check_proof(AllTermIntro(inner, "x", nat), theory)

    def test_pred_instantiation_payload_checked(self):
        gen = AllPredIntro(
            Abstraction(Axiom("h", Atom("X", (numeral(0),))), "h"), "X", (nat,)
        )
        with pytest.raises(UnboundVariable):
            check_proof(AllPredElim(gen, ("y",), nat_formula(Var("zzz"))), theory)

    def test_axiom_formula_must_be_wellformed(self):
        with pytest.raises(UnboundVariable):
            check_proof(Axiom("h", nat_formula(Var("loose"))), theory)

    def test_reserved_label_rejected(self):
        with pytest.raises(WellformednessFailure, match="reserved character"):
            check_proof(Axiom("%1", F), theory)

    def test_equality_hole_mismatch(self):
        lhs = op("plus", numeral(1), Var("0"))
        hole = nat_formula(Var("q"))
        trace = (AxiomStep("plus_zero", (("x", numeral(1)),)),)
        script = Equality(
            Axiom("h", nat_formula(numeral(5))), "q", hole, lhs, numeral(1), nat,
            "forward", trace,
        )
        with pytest.raises(HoleMismatch):
            check_proof(script, theory)

    def test_equality_trace_must_prove_the_equation(self):
        lhs = op("plus", numeral(1), Var("0"))
        hole = nat_formula(Var("q"))
        script = Equality(
            Axiom("h", nat_formula(lhs)), "q", hole, lhs, numeral(1), nat,
            "forward", (AxiomStep("mult_zero", (("x", numeral(1)),)),),
        )
        with pytest.raises(EqualityTraceRejected):
            check_proof(script, theory)

    def test_equality_unknown_direction(self):
        lhs = op("plus", numeral(1), Var("0"))
        hole = nat_formula(Var("q"))
        trace = (AxiomStep("plus_zero", (("x", numeral(1)),)),)
        script = Equality(
            Axiom("h", nat_formula(lhs)), "q", hole, lhs, numeral(1), nat,
            "sideways", trace,
        )
        with pytest.raises(IllFormedPayload, match="sideways"):
            check_proof(script, theory)


class TestHelpers:
    def test_split_linear_context_partitions(self):
        parts = split_linear_context({"a": F, "b": G}, [("a",), ("b",)])
        assert parts == ({"a": F}, {"b": G})

    def test_split_linear_context_rejects_double_claim(self):
        with pytest.raises(LinearityViolation, match="claimed twice"):
            split_linear_context({"a": F}, [("a",), ("a",)])

    def test_split_linear_context_rejects_leftovers(self):
        with pytest.raises(LinearityViolation, match="unclaimed"):
            split_linear_context({"a": F, "b": G}, [("a",)])

    def test_refresh_script_renames_but_preserves_meaning(self):
        script = Abstraction(Axiom("h", F), "h")
        fresh = refresh_script(script, avoid=("h",))
        assert fresh.label != "h"
        cp = check_proof(fresh, theory)
        assert cp.sequent.goal == Lolli(F, F)

    def test_refresh_enables_reuse_under_a_binder(self):
        closed = AllTermIntro(
            Abstraction(Axiom("h", nat_formula(Var("x"))), "h"), "x", nat
        )
        with pytest.raises(DuplicateName):
            check_proof(AllTermIntro(closed, "x", nat), theory)
        ok = AllTermIntro(refresh_script(closed, avoid=("x",)), "x", nat)
        cp = check_proof(ok, theory)
        assert show_formula(cp.sequent.goal).startswith("all x : ")

    def test_extract_typing_of_identity_witness(self):
        script = Application(Abstraction(Axiom("h", F), "h"), Axiom("k", F))
        cp = check_proof(script, theory)
        ty = extract_typing(cp, theory)
        assert show_type(ty) == "forall X. (X -> X) -> X -> X"


class TestRandomScripts:
    def test_predicted_sequents(self, rng):
        """Generated scripts must check with exactly the predicted sequent."""
        for _ in range(300):
            predicted = gen_proof(rng)
            cp = check_proof(predicted.script, theory)
            assert hyp_counter(cp) == predicted.hyps
            assert formulas_equal(cp.sequent.goal, predicted.goal)

    def test_checking_is_deterministic(self, rng):
        for _ in range(40):
            predicted = gen_proof(rng)
            a = check_proof(predicted.script, theory)
            b = check_proof(predicted.script, theory)
            assert a.sequent == b.sequent
            assert a.term == b.term

    def test_refresh_preserves_random_scripts(self, rng):
        for _ in range(60):
            predicted = gen_proof(rng)
            before = check_proof(predicted.script, theory)
            after = check_proof(refresh_script(predicted.script), theory)
            assert formulas_equal(before.sequent.goal, after.sequent.goal)
            formulas = lambda cp: Counter(
                show_formula(f) for _, f in cp.sequent.hyps
            )
            assert formulas(before) == formulas(after)
