"""Exponential-discipline backend: translation out of checked proofs,
derivation replay, boxed terms, and the stratified normalizer."""

import pytest

from ellkit.eal import (
    BApp,
    BBox,
    BLam,
    BVar,
    EALDerivation,
    blam,
    box_depth,
    box_erase,
    box_size,
    check_eal,
    church_encode_box,
    match_instance,
    stratified_normalize,
    to_box_term,
    translate_to_eal,
)
from ellkit.errors import FuelExhausted, RuleViolation
from ellkit.projections import (
    EBang,
    EBound,
    EForall,
    ELol,
    EVar,
    PApp,
    PVar,
    church_decode,
    church_encode,
    erase,
    normal_order_normalize,
    papp,
    plam,
    project_circ,
    show_ealtype,
)

A = EVar("A")
CORPUS_NAMES = (
    "coercion", "const_one", "const_zero", "doubling", "identity", "mult",
    "mult_core", "one", "plus", "pred", "product_of_successor", "succ",
    "sum_of_doubling", "sum_of_identity", "zero",
)


def axiom(label, ty):
    return EALDerivation("axiom", ((label, ty, 1),), PVar(label), ty, (),
                         label, None, None, ())


class TestTranslation:
    @pytest.mark.parametrize("name", CORPUS_NAMES)
    def test_derivations_replay_and_conclude_at_the_projection(
        self, name, checked_corpus
    ):
        cp = checked_corpus[name]
        derivation = translate_to_eal(cp)
        check_eal(derivation)
        assert derivation.ty == project_circ(cp.sequent.goal)
        assert derivation.hyps == ()

    def test_coercion_boxes_its_output(self, checked_corpus):
        derivation = translate_to_eal(checked_corpus["coercion"])
        nat_circ = "forall X. !(X -o X) -o !(X -o X)"
        assert show_ealtype(derivation.ty) == f"({nat_circ}) -o !({nat_circ})"

    def test_derivation_term_is_the_erased_witness(self, checked_corpus):
        cp = checked_corpus["plus"]
        assert translate_to_eal(cp).term == erase(cp.term)


class TestDerivationChecker:
    def test_hand_built_identity(self):
        ax = axiom("h", A)
        identity = EALDerivation(
            "abs", (), plam("h", PVar("h")), ELol(A, A), (ax,),
            "h", None, None, (),
        )
        check_eal(identity)

    def test_axiom_context_must_be_its_own_hypothesis(self):
        bad = EALDerivation("axiom", (), PVar("h"), A, (), "h", None, None, ())
        with pytest.raises(RuleViolation, match="exactly its own hypothesis"):
            check_eal(bad)

    def test_contraction_needs_a_boxed_hypothesis(self):
        bad = EALDerivation(
            "contract", (), PVar("h"), A, (axiom("h", A),), "h", None, None, ()
        )
        with pytest.raises(RuleViolation, match="non-reusable"):
            check_eal(bad)

    def test_contraction_needs_two_occurrences(self):
        bad = EALDerivation(
            "contract", (), PVar("h"), EBang(A), (axiom("h", EBang(A)),),
            "h", None, None, (),
        )
        with pytest.raises(RuleViolation, match="two occurrences"):
            check_eal(bad)

    def test_merge_rejects_a_shared_linear_label(self):
        fn = axiom("h", ELol(A, A))
        arg = axiom("h", A)
        bad = EALDerivation(
            "app", (), PApp(PVar("h"), PVar("h")), A, (fn, arg),
            None, None, None, (),
        )
        with pytest.raises(RuleViolation):
            check_eal(bad)

    def test_quantifier_carrier_must_not_escape(self):
        child = axiom("h", EVar("X"))
        bad = EALDerivation(
            "forall-intro", child.hyps, PVar("h"),
            EForall(EBound(0), hint="X"), (child,), None, "X", None, (),
        )
        with pytest.raises(RuleViolation, match="free in hypothesis h"):
            check_eal(bad)

    def test_instantiation_needs_a_quantified_premise(self):
        child = axiom("h", A)
        bad = EALDerivation(
            "forall-elim", child.hyps, PVar("h"), A, (child,),
            None, None, A, (),
        )
        with pytest.raises(RuleViolation, match="quantified premise"):
            check_eal(bad)

    def test_promotion_premises_must_be_boxed(self):
        premise = axiom("j", A)
        inner = axiom("k", A)
        bad = EALDerivation(
            "promote", premise.hyps, PVar("j"), EBang(A),
            (premise, inner), None, None, None, ("k",),
        )
        with pytest.raises(RuleViolation, match="is not boxed"):
            check_eal(bad)

    def test_weakening_cannot_re_add(self):
        child = axiom("h", A)
        bad = EALDerivation(
            "weaken", child.hyps, PVar("h"), A, (child,), "h", None, None, ()
        )
        with pytest.raises(RuleViolation, match="re-adds hypothesis"):
            check_eal(bad)

    def test_failure_names_the_offending_node(self):
        ax = axiom("h", A)
        inner_bad = EALDerivation(
            "abs", (), plam("h", PVar("h")), ELol(A, A), (ax,),
            "nope", None, None, (),
        )
        outer = EALDerivation(
            "weaken", (("w", A, 1),), plam("h", PVar("h")), ELol(A, A),
            (inner_bad,), "w", None, None, (),
        )
        with pytest.raises(RuleViolation, match="node 0:"):
            check_eal(outer)


class TestMatchInstance:
    def test_infers_the_argument(self):
        quantified = EForall(ELol(EBound(0), EBound(0)), hint="X")
        assert match_instance(quantified, ELol(A, A)) == A

    def test_unconstrained_argument_gets_a_canonical_type(self):
        quantified = EForall(EVar("c"), hint="X")
        assert match_instance(quantified, EVar("c")) == EForall(EBound(0), hint="a")

    def test_conflicting_occurrences_are_rejected(self):
        quantified = EForall(ELol(EBound(0), EBound(0)), hint="X")
        with pytest.raises(RuleViolation):
            match_instance(quantified, ELol(EVar("A"), EVar("B")))


class TestBoxedTerms:
    def test_sizes_are_maintained_structurally(self):
        t = blam("x", BApp(BVar("f"), BVar("x")))
        assert box_size(t) == 4
        assert box_size(BBox(t)) == 5

    def test_boxed_numerals(self):
        two = church_encode_box(2)
        assert isinstance(two, BLam)
        assert box_depth(two) == 1
        assert box_erase(two) == church_encode(2)

    def test_to_box_term_erases_to_the_witness(self, checked_corpus):
        for name in ("plus", "identity", "sum_of_identity"):
            cp = checked_corpus[name]
            bt = to_box_term(cp)
            assert box_erase(bt) == erase(cp.term)

    def test_box_depth_tracks_promotions(self, checked_corpus):
        # The identity proof never promotes, so its program is box-free;
        # the plus witness carries one box from its induction step.
        assert box_depth(to_box_term(checked_corpus["identity"])) == 0
        assert box_depth(to_box_term(checked_corpus["plus"])) == 1


class TestStratifiedNormalization:
    def apply_to(self, checked, *args):
        t = to_box_term(checked)
        for n in args:
            t = BApp(t, church_encode_box(n))
        return t

    @pytest.mark.parametrize("a,b", [(0, 0), (1, 2), (3, 4), (6, 5)])
    def test_agrees_with_normal_order_on_plus(self, a, b, checked_corpus):
        boxed = self.apply_to(checked_corpus["plus"], a, b)
        stratified, profile = stratified_normalize(boxed)
        direct = normal_order_normalize(box_erase(boxed))
        assert stratified == direct
        assert church_decode(stratified) == a + b
        assert max(lv.depth for lv in profile.levels) <= box_depth(boxed)

    @pytest.mark.parametrize("n,want", [(0, 0), (3, 6), (5, 20)])
    def test_iterated_sums(self, n, want, checked_corpus):
        boxed = self.apply_to(checked_corpus["sum_of_doubling"], n)
        stratified, profile = stratified_normalize(boxed)
        assert church_decode(stratified) == want
        assert stratified == normal_order_normalize(box_erase(boxed))

    def test_levels_are_processed_inside_out(self, checked_corpus):
        boxed = self.apply_to(checked_corpus["pred"], 4)
        _, profile = stratified_normalize(boxed)
        depths = [lv.depth for lv in profile.levels]
        assert depths == sorted(depths)
        assert all(lv.max_size >= lv.start_size or lv.steps == 0
                   for lv in profile.levels)

    def test_budget_counts_contractions_exactly(self, checked_corpus):
        boxed = self.apply_to(checked_corpus["plus"], 3, 4)
        _, profile = stratified_normalize(boxed)
        total = sum(lv.steps for lv in profile.levels)
        assert total == 10
        # One unit short: the run must stop, reporting the work done so far.
        with pytest.raises(FuelExhausted) as info:
            stratified_normalize(boxed, budget=total - 1)
        partial = info.value.partial
        assert sum(lv.steps for lv in partial.levels) == total - 1

    def test_normal_forms_spend_nothing(self):
        t = church_encode_box(5)
        result, profile = stratified_normalize(t)
        assert result == church_encode(5)
        assert sum(lv.steps for lv in profile.levels) == 0
