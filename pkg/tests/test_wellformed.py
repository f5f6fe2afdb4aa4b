"""Signature, typing, and equation checks, plus the typed-term
reduction properties that lean on the checker."""
from __future__ import annotations

import pytest

from generators import gen_term, gen_type
from ellkit.errors import (
    ApplicationMismatch,
    DuplicateName,
    IllFormedEntryType,
    TypingError,
    UnboundTypeVariable,
    UnboundVariable,
    WellformednessFailure,
)
from ellkit.library import church, nat, numeral, theory
from ellkit.stdlib import op
from ellkit.syntax import (
    App,
    Bound,
    Lolli,
    TArrow,
    TVar,
    Var,
    contract_redex,
    lam,
    tapp,
)
from ellkit.wellformed import (
    Equation,
    Signature,
    Theory,
    check_equation,
    check_formula,
    check_instantiation,
    check_type,
    infer_type,
)

sig = theory.signature


class TestSignature:
    def test_arithmetic_constants_present(self):
        for name in ("0", "s", "plus", "mult", "pred", "minus", "sum", "prod"):
            assert name in sig

    def test_expected_types(self):
        assert sig["0"] == nat
        assert sig["s"] == TArrow(nat, nat)
        assert sig["plus"] == TArrow(nat, TArrow(nat, nat))
        assert sig["sum"] == TArrow(TArrow(nat, nat), TArrow(nat, nat))

    def test_duplicate_entry_rejected(self):
        with pytest.raises(DuplicateName):
            Signature((("c", nat), ("c", nat)))

    def test_open_entry_type_rejected(self):
        with pytest.raises(IllFormedEntryType):
            Signature((("c", TVar("a")),))

    def test_names_listing(self):
        assert set(Signature((("c", nat),)).names()) == {"c"}


class TestInferType:
    def test_numerals_and_church(self):
        assert infer_type(numeral(3), sig) == nat
        assert infer_type(church(3), sig) == nat

    def test_operator_spines(self):
        assert infer_type(op("plus", numeral(1), numeral(2)), sig) == nat
        assert infer_type(App(Var("sum"), Var("s")), sig) == TArrow(nat, nat)

    def test_type_application_instantiates(self):
        inst = tapp(church(2), nat)
        assert infer_type(inst, sig) == TArrow(TArrow(nat, nat), TArrow(nat, nat))

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariable):
            infer_type(Var("ghost"), sig)

    def test_argument_type_mismatch(self):
        with pytest.raises(ApplicationMismatch):
            infer_type(App(Var("s"), Var("s")), sig)

    def test_dangling_bound_index_rejected(self):
        with pytest.raises(TypingError):
            infer_type(Bound(0), sig)

    def test_context_lookup(self):
        assert infer_type(Var("v"), sig, ctx={"v": nat}) == nat

    def test_random_generated_terms_typecheck(self, rng):
        for _ in range(300):
            ty = gen_type(rng)
            assert infer_type(gen_term(rng, ty), sig) == ty


class TestCheckType:
    def test_closed_types_pass(self):
        check_type(nat)
        check_type(TArrow(nat, nat))

    def test_free_type_variable_needs_scope(self):
        with pytest.raises(UnboundTypeVariable):
            check_type(TVar("a"))
        check_type(TVar("a"), tyvars=frozenset({"a"}))


class TestEquations:
    def test_h0_is_exactly_fourteen(self):
        assert len(theory.equations) == 14

    def test_every_h0_equation_checks(self):
        for eq in theory.equations.values():
            check_equation(eq, sig)

    def test_ill_typed_equation_rejected(self):
        bad = Equation("broken", (("x", nat),), Var("x"), Var("s"), nat)
        with pytest.raises(WellformednessFailure):
            check_equation(bad, sig)

    def test_instantiation_produces_both_sides(self):
        eq = theory.equations["plus_zero"]
        lhs, rhs = check_instantiation(eq, {"x": numeral(2)}, sig)
        assert lhs == op("plus", numeral(2), Var("0"))
        assert rhs == numeral(2)

    def test_instantiation_rejects_wrong_sort(self):
        eq = theory.equations["sum_zero"]
        with pytest.raises(WellformednessFailure):
            check_instantiation(eq, {"f": numeral(1)}, sig)

    def test_instantiation_requires_every_variable(self):
        eq = theory.equations["plus_succ"]
        with pytest.raises(WellformednessFailure):
            check_instantiation(eq, {"x": numeral(1)}, sig)


class TestCheckFormula:
    def test_closed_formula(self):
        from ellkit.library import nat_formula

        check_formula(nat_formula(numeral(0)), sig)

    def test_formula_with_free_term_variable(self):
        from ellkit.library import nat_formula

        with pytest.raises(UnboundVariable):
            check_formula(nat_formula(Var("x")), sig)
        check_formula(nat_formula(Var("x")), sig, ctx={"x": nat})

    def test_lolli_checks_both_sides(self):
        from ellkit.library import nat_formula

        good = nat_formula(numeral(0))
        with pytest.raises(UnboundVariable):
            check_formula(Lolli(good, nat_formula(Var("y"))), sig)


def test_theory_rejects_duplicate_equation_names():
    eq = theory.equations["plus_zero"]
    with pytest.raises(DuplicateName):
        Theory(sig, (eq, eq))


def test_subject_reduction_along_full_chains(rng):
    """Contracting any redex preserves the inferred type, all the way to
    the normal form."""
    for _ in range(300):
        t = gen_term(rng, gen_type(rng))
        ty = infer_type(t, sig)
        for _ in range(60):
            nxt = contract_redex(t)
            if nxt is None:
                break
            t = nxt
            assert infer_type(t, sig) == ty
