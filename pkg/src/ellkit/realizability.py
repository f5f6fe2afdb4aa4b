"""The realizability reading and conformance testing.

``realizes(t, F)`` says, as a formula, that the program ``t`` computes
a witness of ``F``: atoms absorb the realizer as one extra argument,
an implication quantifies over realizers of its antecedent, and a
second-order quantifier widens into a type quantifier for the new
argument slot together with the widened predicate quantifier.  The
translation ties the layers together: ``F`` lives at the formula level,
``t`` at the program level against the projection of ``F``, and the
result is a formula again, one predicate argument wider.

``check_realizer_wf`` replays the well-formedness guarantee for a
candidate goal, and ``conformance_test`` closes the loop operationally:
erase a checked proof, run it on encoded samples, compare the decoded
outputs against a plain Python reference.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DecodeFailure, FuelExhausted, ShapeMismatch, WellformednessFailure
from .kernel import CheckedProof
from .library import nat, nat_formula
from .projections import (
    PApp,
    PureTerm,
    StepCounter,
    church_decode,
    church_encode,
    erase,
    normal_order_normalize,
    pred_tyvar,
    project_minus,
)
from .syntax import (
    DEFAULT_FUEL,
    App,
    Atom,
    Bang,
    ForallPred,
    ForallTerm,
    ForallType,
    Formula,
    Lolli,
    TApp,
    TVar,
    Term,
    Type,
    Var,
    all_pred,
    all_pred_open,
    all_term,
    all_term_open,
    all_ty,
    all_ty_open,
    fpv_formula,
    ftv_formula,
    ftv_term,
    fv_formula,
    fv_term,
)
from .wellformed import Theory, check_formula, infer_type

# ---------------------------------------------------------------------------
# The translation


def _fresh(base: str, taken: frozenset[str] | set[str]) -> str:
    name = base
    n = 0
    while name in taken:
        name = f"{base}{n}"
        n += 1
    return name


def realizes(t: Term, f: Formula) -> Formula:
    """The formula stating that ``t`` computes a witness of ``f``.

    ``t`` must be typeable at the projection of ``f`` for the result to
    be well formed; the translation itself is total on formulas.
    """
    match f:
        case Atom(head, args):
            return Atom(head, args + (t,))
        case Lolli(left, right):
            x = _fresh("r", fv_term(t) | fv_formula(left) | fv_formula(right))
            vx = Var(x)
            body = Lolli(realizes(vx, left), realizes(App(t, vx), right))
            return all_term(x, project_minus(left), body)
        case Bang(body):
            return Bang(realizes(t, body))
        case ForallTerm(_, _, hint):
            x = _fresh(hint or "x", fv_term(t) | fv_formula(f))
            return all_term(x, f.ty, realizes(t, all_term_open(f, x)))
        case ForallType(_, hint):
            a = _fresh(hint or "a", ftv_term(t) | ftv_formula(f))
            return all_ty(a, realizes(t, all_ty_open(f, a)))
        case ForallPred(arity, _, hint):
            taken_preds = fpv_formula(f)
            taken_tyvars = ftv_term(t) | ftv_formula(f)
            base = hint or "X"
            x = base
            n = 0
            while x in taken_preds or pred_tyvar(x) in taken_tyvars:
                x = f"{base}{n}"
                n += 1
            a = pred_tyvar(x)
            inner = realizes(TApp(t, TVar(a)), all_pred_open(f, x))
            return all_ty(a, all_pred(x, arity + (TVar(a),), inner))
    raise TypeError(f"not a formula: {f!r}")


def widened_context(
    preds: Sequence[tuple[str, tuple[Type, ...]]],
) -> tuple[tuple[str, ...], tuple[tuple[str, tuple[Type, ...]], ...]]:
    """Carrier type variables and widened declarations for ``preds``.

    Each declaration ``X : [sorts]`` contributes the type variable that
    names its carrier and re-declares ``X`` with one extra argument of
    that carrier type.  This is the ambient context in which realizer
    statements over ``preds`` live.
    """
    tyvars = tuple(pred_tyvar(x) for x, _ in preds)
    widened = tuple((x, ar + (TVar(pred_tyvar(x)),)) for x, ar in preds)
    return tyvars, widened


@dataclass(frozen=True)
class RealizabilityGoal:
    """A candidate realizer for a formula, in an ambient context.

    ``termvars`` may mix first-order variables at their sorts with
    program variables at projected types; both just type the term.
    """

    term: Term
    formula: Formula
    tyvars: tuple[str, ...] = ()
    termvars: tuple[tuple[str, Type], ...] = ()
    preds: tuple[tuple[str, tuple[Type, ...]], ...] = ()


def goal_of_proof(checked: CheckedProof) -> RealizabilityGoal:
    """Read a realizability goal off a checked proof node.

    Hypothesis labels enter the term context at the projections of
    their formulas, mirroring how the extracted term was typed.
    """
    seq = checked.sequent
    hyp_vars = []
    seen: set[str] = set()
    for label, formula in seq.hyps:
        if label not in seen:
            seen.add(label)
            hyp_vars.append((label, project_minus(formula)))
    return RealizabilityGoal(
        checked.term,
        checked.goal,
        seq.tyvars,
        seq.termvars + tuple(hyp_vars),
        seq.preds,
    )


def check_realizer_wf(goal: RealizabilityGoal, theory: Theory) -> Formula:
    """Check the realizer statement of ``goal`` is well formed.

    First replays the two preconditions: the formula must be well
    formed in the ambient context, and the term must have exactly the
    projected type once every predicate's carrier variable is in scope.
    Then builds the widened context and checks ``realizes`` there.
    Returns the realizer statement; failures propagate.
    """
    sig = theory.signature
    tyvars = frozenset(goal.tyvars)
    check_formula(goal.formula, sig, dict(goal.preds), dict(goal.termvars), tyvars)
    carriers, widened = widened_context(goal.preds)
    star_tyvars = tyvars | frozenset(carriers)
    want = project_minus(goal.formula)
    got = infer_type(goal.term, sig, dict(goal.termvars), star_tyvars)
    if got != want:
        raise WellformednessFailure(
            "realizer is not typed at the projection of its formula"
        )
    statement = realizes(goal.term, goal.formula)
    check_formula(statement, sig, dict(widened), dict(goal.termvars), star_tyvars)
    return statement


# ---------------------------------------------------------------------------
# Data types and conformance


@dataclass(frozen=True)
class DataTypeSpec:
    """A data-type formula with its codec.

    ``formula`` has one free first-order variable ``param`` of sort
    ``sort``; ``carrier`` is the projected program type.  ``encode``
    maps a Python value to a closed pure term of the carrier type and
    ``decode`` reads one back off a beta-normal form.
    """

    name: str
    param: str
    sort: Type
    formula: Formula
    encode: Callable[[int], PureTerm]
    decode: Callable[[PureTerm], int]

    @property
    def carrier(self) -> Type:
        return project_minus(self.formula)

    def instance(self, t: Term) -> Formula:
        from .syntax import subst_term_in_formula

        return subst_term_in_formula(self.formula, self.param, t)


def nat_spec() -> DataTypeSpec:
    """The numeral predicate with the Church codec."""
    return DataTypeSpec("N", "x", nat, nat_formula(Var("x")), church_encode, church_decode)


@dataclass(frozen=True)
class SampleResult:
    inputs: tuple[int, ...]
    expected: int
    got: int | None
    steps: int
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.got == self.expected


@dataclass(frozen=True)
class ConformanceReport:
    name: str
    results: tuple[SampleResult, ...]

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.ok)

    @property
    def failed(self) -> int:
        return len(self.results) - self.passed

    @property
    def all_pass(self) -> bool:
        return self.failed == 0

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            args = ",".join(str(i) for i in r.inputs)
            if r.error is not None:
                verdict = f"FAIL ({r.error})"
                shown = "-"
            else:
                verdict = "ok" if r.ok else "FAIL"
                shown = str(r.got)
            lines.append(
                f"{self.name}({args}) = {shown} expected {r.expected}"
                f" [{verdict}] steps={r.steps}"
            )
        lines.append(
            f"{self.name}: {self.passed}/{len(self.results)} samples agree"
        )
        return "\n".join(lines)


def default_samples(arity: int) -> tuple[tuple[int, ...], ...]:
    """Exhaustive grids: 0..6 up to two arguments, 0..4 beyond."""
    if arity == 0:
        return ((),)
    hi = 7 if arity <= 2 else 5
    return tuple(itertools.product(range(hi), repeat=arity))


def conformance_test(
    proof: CheckedProof | PureTerm,
    specs: Sequence[DataTypeSpec],
    f_ref: Callable[..., int],
    samples: Sequence[tuple[int, ...]] | None = None,
    fuel: int = DEFAULT_FUEL,
    name: str = "f",
) -> ConformanceReport:
    """Run the program of ``proof`` against a reference function.

    ``specs`` lists one data type per argument plus one for the result.
    Per sample the program is applied to the encoded inputs, normalized
    by leftmost-outermost reduction within ``fuel``, and decoded; fuel
    exhaustion and decode failures are recorded per sample rather than
    raised.
    """
    if len(specs) < 1:
        raise ShapeMismatch("need at least a result data type")
    arity = len(specs) - 1
    program = erase(proof.term) if isinstance(proof, CheckedProof) else proof
    if samples is None:
        samples = default_samples(arity)
    results = []
    for sample in samples:
        if len(sample) != arity:
            raise ShapeMismatch(
                f"sample {sample} has {len(sample)} inputs, specs say {arity}"
            )
        t: PureTerm = program
        for spec, value in zip(specs, sample):
            t = PApp(t, spec.encode(value))
        counter = StepCounter()
        got: int | None = None
        error: str | None = None
        try:
            normal = normal_order_normalize(t, fuel, counter)
            got = specs[-1].decode(normal)
        except FuelExhausted:
            error = f"fuel exhausted after {counter.steps} steps"
        except DecodeFailure as exc:
            error = f"decode failure: {exc}"
        results.append(
            SampleResult(tuple(sample), f_ref(*sample), got, counter.steps, error)
        )
    return ConformanceReport(name, tuple(results))


# ---------------------------------------------------------------------------
# Reference arithmetic


def ref_plus(a: int, b: int) -> int:
    return a + b


def ref_mult(a: int, b: int) -> int:
    return a * b


def ref_pred(a: int) -> int:
    return max(a - 1, 0)


def ref_minus(a: int, b: int) -> int:
    return max(a - b, 0)


def ref_sum(f: Callable[[int], int]) -> Callable[[int], int]:
    """Sum of ``f`` below the argument (empty sum for 0)."""

    def go(n: int) -> int:
        return sum(f(i) for i in range(n))

    return go


def ref_prod(f: Callable[[int], int]) -> Callable[[int], int]:
    """Product of ``f`` below the argument (empty product is 1)."""

    def go(n: int) -> int:
        out = 1
        for i in range(n):
            out *= f(i)
        return out

    return go


UNARY_LIBRARY: dict[str, Callable[[int], int]] = {
    "identity": lambda n: n,
    "successor": lambda n: n + 1,
    "const0": lambda n: 0,
    "const1": lambda n: 1,
    "doubling": lambda n: 2 * n,
}

REFERENCE_FUNCTIONS: dict[str, Callable[..., int]] = {
    "plus": ref_plus,
    "mult": ref_mult,
    "pred": ref_pred,
    "minus": ref_minus,
}
