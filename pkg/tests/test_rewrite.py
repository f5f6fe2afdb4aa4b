"""Equational rewriting: oriented H0 normalization, trace replay, and
the certificate step kinds."""
from __future__ import annotations

import pytest

from generators import gen_ground_nat, gen_instance
from ellkit.errors import (
    FuelExhausted,
    IllTypedInstance,
    PositionOutOfRange,
    TraceError,
)
from ellkit.library import nat, numeral, theory
from ellkit.stdlib import op
from ellkit.rewrite import (
    AxiomStep,
    BetaStep,
    CongStep,
    ExtStep,
    Refl,
    SymStep,
    TransStep,
    evaluate_ground,
    ground_value,
    match_pattern,
    normalize_with_h0,
    replace_at,
    subterm_at,
    verify_trace,
)
from ellkit.syntax import App, Var, lam, show_term
from ellkit.wellformed import check_instantiation


# ---------------------------------------------------------------------------
# Positions

def test_subterm_positions_walk_application_spines():
    t = op("s", op("plus", numeral(1), numeral(0)))
    assert show_term(subterm_at(t, ())) == "s (plus (s 0) 0)"
    assert show_term(subterm_at(t, (1,))) == "plus (s 0) 0"
    assert show_term(subterm_at(t, (1, 1))) == "0"


def test_replace_at_round_trips():
    t = op("plus", numeral(1), numeral(2))
    assert replace_at(t, (1,), numeral(5)) == op("plus", numeral(1), numeral(5))
    assert replace_at(t, (0, 1), numeral(5)) == op("plus", numeral(5), numeral(2))
    assert replace_at(t, (), numeral(0)) == numeral(0)


def test_position_out_of_range():
    with pytest.raises(PositionOutOfRange):
        subterm_at(numeral(0), (4,))


# ---------------------------------------------------------------------------
# Oriented normalization against plain integer arithmetic

@pytest.mark.parametrize("a", range(4))
@pytest.mark.parametrize("b", range(4))
def test_ground_ops_match_integer_arithmetic(a, b):
    assert ground_value(normalize_with_h0(op("plus", numeral(a), numeral(b)))) == a + b
    assert ground_value(normalize_with_h0(op("mult", numeral(a), numeral(b)))) == a * b
    assert ground_value(normalize_with_h0(op("minus", numeral(a), numeral(b)))) == max(a - b, 0)


def test_pred_truncates_at_zero():
    assert evaluate_ground(op("pred", numeral(0)), theory) == 0
    assert evaluate_ground(op("pred", numeral(5)), theory) == 4


def test_sum_and_prod_iterate_below_the_bound():
    # sum f n = f(0) + ... + f(n-1), prod f n likewise with unit 1
    succ = Var("s")
    assert evaluate_ground(op("sum", succ, numeral(4)), theory) == 1 + 2 + 3 + 4
    assert evaluate_ground(op("prod", succ, numeral(3)), theory) == 1 * 2 * 3
    assert evaluate_ground(op("sum", succ, numeral(0)), theory) == 0
    assert evaluate_ground(op("prod", succ, numeral(0)), theory) == 1


def test_normalization_collects_a_replayable_trace(rng):
    for _ in range(60):
        t = gen_ground_nat(rng, 2)
        tr: list = []
        nf = normalize_with_h0(t, theory, trace=tr)
        assert verify_trace(theory, t, tr) == nf


def test_normalize_runs_out_of_fuel():
    with pytest.raises(FuelExhausted):
        normalize_with_h0(op("mult", numeral(3), numeral(3)), theory, fuel=3)


# ---------------------------------------------------------------------------
# Step kinds, one by one

def test_refl_keeps_the_subject():
    t = op("s", numeral(1))
    assert verify_trace(theory, t, (Refl(),)) == t


def test_axiom_step_left_to_right():
    start = op("plus", numeral(2), Var("0"))
    got = verify_trace(theory, start, (AxiomStep("plus_zero", (("x", numeral(2)),)),))
    assert got == numeral(2)


def test_axiom_step_right_to_left():
    got = verify_trace(
        theory, numeral(2), (AxiomStep("plus_zero", (("x", numeral(2)),), orient="rl"),)
    )
    assert got == op("plus", numeral(2), Var("0"))


def test_axiom_step_below_the_root():
    t = op("s", op("plus", numeral(1), Var("0")))
    got = verify_trace(theory, t, (AxiomStep("plus_zero", (("x", numeral(1)),), pos=(1,)),))
    assert got == numeral(2)


def test_axiom_step_rejects_a_non_matching_subject():
    with pytest.raises(TraceError):
        verify_trace(theory, numeral(3), (AxiomStep("plus_zero", (("x", numeral(2)),)),))


def test_axiom_step_rejects_spurious_assignment():
    start = op("plus", numeral(2), Var("0"))
    with pytest.raises(IllTypedInstance):
        verify_trace(
            theory,
            start,
            (AxiomStep("plus_zero", (("x", numeral(2)), ("ghost", numeral(0)))),),
        )


def test_beta_contract_and_expand_are_inverse():
    red = App(lam("w", nat, op("s", Var("w"))), numeral(1))
    contracted = verify_trace(theory, red, (BetaStep(pos=()),))
    assert contracted == op("s", numeral(1))
    back = verify_trace(theory, contracted, (BetaStep(pos=(), direction="expand", term=red),))
    assert back == red


def test_beta_contract_needs_a_redex():
    with pytest.raises(TraceError):
        verify_trace(theory, numeral(1), (BetaStep(pos=()),))


def test_beta_expand_payload_must_contract_to_subject():
    red = App(lam("w", nat, op("s", Var("w"))), numeral(1))
    with pytest.raises(TraceError):
        verify_trace(theory, numeral(5), (BetaStep(pos=(), direction="expand", term=red),))


def test_sym_step_reverses_a_subtrace():
    X = op("plus", numeral(1), Var("0"))
    got = verify_trace(
        theory, numeral(1), (SymStep(X, (AxiomStep("plus_zero", (("x", numeral(1)),)),)),)
    )
    assert got == X


def test_trans_step_sequences():
    start = op("plus", numeral(1), Var("0"))
    got = verify_trace(
        theory,
        start,
        (TransStep(
            (AxiomStep("plus_zero", (("x", numeral(1)),)),),
            (AxiomStep("succ_def", (("n", Var("0")),)),),
        ),),
    )
    _, expected = check_instantiation(
        theory.equations["succ_def"], {"n": Var("0")}, theory.signature
    )
    assert got == expected


def test_cong_step_applies_below_a_position():
    t = op("s", op("plus", numeral(1), Var("0")))
    got = verify_trace(
        theory, t, (CongStep((1,), (AxiomStep("plus_zero", (("x", numeral(1)),)),)),)
    )
    assert got == numeral(2)


def test_ext_step_proves_functional_equations():
    f = lam("w", nat, op("plus", Var("w"), Var("0")))
    g = lam("w", nat, Var("w"))
    steps = (ExtStep("q", g, (
        BetaStep(pos=()),
        AxiomStep("plus_zero", (("x", Var("q")),)),
        BetaStep(pos=(), direction="expand", term=App(g, Var("q"))),
    )),)
    assert verify_trace(theory, f, steps) == g


def test_ext_step_variable_must_be_fresh():
    f = lam("w", nat, op("plus", Var("w"), Var("q")))
    g = lam("w", nat, Var("w"))
    with pytest.raises(TraceError):
        verify_trace(
            theory,
            f,
            (ExtStep("q", g, (Refl(),)),),
            ctx={"q": nat},
        )


# ---------------------------------------------------------------------------
# Pattern matching

def test_match_pattern_binds_variables():
    pat = theory.equations["plus_zero"].lhs
    subject = op("plus", numeral(2), Var("0"))
    assert match_pattern(pat, subject, frozenset({"x"})) == {"x": numeral(2)}


def test_match_pattern_is_nonlinear_aware():
    pat = op("plus", Var("v"), Var("v"))
    assert match_pattern(pat, op("plus", numeral(1), numeral(1)), frozenset({"v"})) == {
        "v": numeral(1)
    }
    assert match_pattern(pat, op("plus", numeral(1), numeral(2)), frozenset({"v"})) is None


def test_match_pattern_mismatch_returns_none():
    pat = theory.equations["plus_zero"].lhs
    assert match_pattern(pat, numeral(3), frozenset({"x"})) is None


# ---------------------------------------------------------------------------
# Randomized soundness against the ground evaluator

def test_random_equation_instances_are_sound(rng):
    for _ in range(250):
        name, assignment = gen_instance(rng, theory)
        lhs, rhs = check_instantiation(
            theory.equations[name], dict(assignment), theory.signature
        )
        assert verify_trace(theory, lhs, (AxiomStep(name, assignment),)) == rhs
        assert evaluate_ground(lhs, theory) == evaluate_ground(rhs, theory)
