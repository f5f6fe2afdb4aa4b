"""The proof checker.

A proof script is a tree of rule applications with every choice spelled
out: which hypothesis an abstraction discharges, which label each
premise of a promotion feeds, the full instantiation of every
quantifier elimination, the trace behind every equality step.  Checking
replays the tree bottom-up, synthesizing for each node its linear
context, its goal, and its extracted program, and validating every side
condition on the way.  Nothing is searched for.

Goals are compared up to alpha-equivalence plus beta-equivalence of the
first-order terms embedded in atoms.  The linear context is a multiset:
a label may occur several times, but only with one and the same banged
formula; that is how a promotion can feed the same reusable resource to
several premises, and what CONTRACTION later collapses.

Every checked proof carries its full annotated derivation, and the
checker re-types the extracted term at the projected goal in the
projected context before returning, so a successful run hands back a
program together with a machine-checked typing certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateName,
    EqualityTraceRejected,
    HoleMismatch,
    IllFormedPayload,
    LinearityViolation,
    NonBangContraction,
    PromotionShape,
    RuleViolation,
    SideConditionFreeVariable,
    TraceError,
)
from .projections import pred_tyvar, project_minus
from .rewrite import (
    AxiomStep,
    BetaStep,
    CongStep,
    ExtStep,
    SymStep,
    TraceStep,
    TransStep,
    verify_trace,
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
    Fuel,
    Lolli,
    TApp,
    TVar,
    Term,
    Type,
    Var,
    all_pred,
    all_pred_inst,
    all_term,
    all_term_inst,
    all_ty,
    all_ty_inst,
    formulas_equal,
    fpv_formula,
    ftv_formula,
    ftv_term,
    ftv_type,
    fv_formula,
    fv_term,
    lam,
    show_formula,
    show_term,
    show_type,
    subst_pred_in_formula,
    subst_term_in_formula,
    subst_term_in_formula_many,
    subst_term_in_term_many,
    subst_type_in_formula,
    subst_type_in_term,
    subst_type_in_type,
    tylam,
)
from .wellformed import Theory, check_formula, check_name, check_type, infer_type

# ---------------------------------------------------------------------------
# Script nodes


@dataclass(frozen=True)
class Axiom:
    label: str
    formula: Formula


@dataclass(frozen=True)
class Weakening:
    premise: "ProofScript"
    label: str
    formula: Formula


@dataclass(frozen=True)
class Application:
    fn: "ProofScript"
    arg: "ProofScript"


@dataclass(frozen=True)
class Abstraction:
    premise: "ProofScript"
    label: str


@dataclass(frozen=True)
class Promotion:
    """Premises are (inner label, subproof of a banged formula)."""

    premises: tuple[tuple[str, "ProofScript"], ...]
    inner: "ProofScript"


@dataclass(frozen=True)
class Contraction:
    premise: "ProofScript"
    label: str


@dataclass(frozen=True)
class AllTypeIntro:
    premise: "ProofScript"
    name: str


@dataclass(frozen=True)
class AllTermIntro:
    premise: "ProofScript"
    name: str
    ty: Type


@dataclass(frozen=True)
class AllPredIntro:
    premise: "ProofScript"
    name: str
    arity: tuple[Type, ...]


@dataclass(frozen=True)
class AllTypeElim:
    premise: "ProofScript"
    ty: Type


@dataclass(frozen=True)
class AllTermElim:
    premise: "ProofScript"
    term: Term


@dataclass(frozen=True)
class AllPredElim:
    """Instantiate with the predicate abstraction (params, body)."""

    premise: "ProofScript"
    params: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Equality:
    """Rewrite the goal through a hole formula.

    The premise's goal must match ``hole`` with ``lhs`` (direction
    ``forward``) or ``rhs`` (direction ``backward``) plugged in for
    ``hole_var``; the conclusion plugs in the other end.  ``trace``
    always rewrites ``lhs`` into ``rhs``.
    """

    premise: "ProofScript"
    hole_var: str
    hole: Formula
    lhs: Term
    rhs: Term
    ty: Type
    direction: str = "forward"
    trace: tuple[TraceStep, ...] = ()


ProofScript = (
    Axiom
    | Weakening
    | Application
    | Abstraction
    | Promotion
    | Contraction
    | AllTypeIntro
    | AllTermIntro
    | AllPredIntro
    | AllTypeElim
    | AllTermElim
    | AllPredElim
    | Equality
)


# ---------------------------------------------------------------------------
# Checked derivations


@dataclass(frozen=True)
class Sequent:
    tyvars: tuple[str, ...]
    termvars: tuple[tuple[str, Type], ...]
    preds: tuple[tuple[str, tuple[Type, ...]], ...]
    hyps: tuple[tuple[str, Formula], ...]
    goal: Formula


@dataclass(frozen=True)
class CheckedProof:
    rule: str
    sequent: Sequent
    term: Term
    children: tuple["CheckedProof", ...] = ()
    promotion_labels: tuple[str, ...] = ()
    """For a promotion: which inner hypothesis each premise child feeds,
    in child order.  Empty for every other rule."""

    @property
    def goal(self) -> Formula:
        return self.sequent.goal

    def hypothesis_labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.sequent.hyps)


class _Gamma:
    """The intuitionistic context, ordered, threaded down the tree."""

    __slots__ = ("tyvars", "termvars", "preds")

    def __init__(
        self,
        tyvars: tuple[str, ...] = (),
        termvars: tuple[tuple[str, Type], ...] = (),
        preds: tuple[tuple[str, tuple[Type, ...]], ...] = (),
    ) -> None:
        self.tyvars = tyvars
        self.termvars = termvars
        self.preds = preds

    def tyvar_set(self) -> frozenset[str]:
        return frozenset(self.tyvars)

    def term_ctx(self) -> dict[str, Type]:
        return dict(self.termvars)

    def pred_ctx(self) -> dict[str, tuple[Type, ...]]:
        return dict(self.preds)

    def with_tyvar(self, name: str) -> "_Gamma":
        return _Gamma(self.tyvars + (name,), self.termvars, self.preds)

    def with_termvar(self, name: str, ty: Type) -> "_Gamma":
        return _Gamma(self.tyvars, self.termvars + ((name, ty),), self.preds)

    def with_pred(self, name: str, arity: tuple[Type, ...]) -> "_Gamma":
        return _Gamma(self.tyvars, self.termvars, self.preds + ((name, arity),))


Delta = dict[str, tuple[Formula, int]]


def _delta_tuple(delta: Delta) -> tuple[tuple[str, Formula], ...]:
    out: list[tuple[str, Formula]] = []
    for label in sorted(delta):
        formula, mult = delta[label]
        out.extend((label, formula) for _ in range(mult))
    return tuple(out)


def _merge(deltas: Sequence[Delta], fuel: Fuel) -> Delta:
    out: Delta = {}
    for d in deltas:
        for label, (formula, mult) in d.items():
            if label not in out:
                out[label] = (formula, mult)
                continue
            f0, m0 = out[label]
            if not isinstance(f0, Bang) or not formulas_equal(f0, formula, fuel):
                raise LinearityViolation(
                    f"hypothesis {label} consumed by more than one premise"
                    " (only identical !-hypotheses may be shared)"
                )
            out[label] = (f0, m0 + mult)
    return out


def split_linear_context(
    delta: Mapping[str, Formula] | Iterable[tuple[str, Formula]],
    parts: Sequence[Iterable[str]],
) -> tuple[dict[str, Formula], ...]:
    """Partition a labeled context by explicit label sets.

    Every label must be claimed by exactly one part; claiming a label
    twice, or leaving one unclaimed, is a :class:`LinearityViolation`.
    This is the explicit-annotation counterpart of the context splits
    the binary rules perform.
    """
    pool = dict(delta) if isinstance(delta, Mapping) else dict(delta)
    out: list[dict[str, Formula]] = []
    claimed: set[str] = set()
    for part in parts:
        chunk: dict[str, Formula] = {}
        for label in part:
            if label in claimed:
                raise LinearityViolation(f"hypothesis {label} claimed twice")
            if label not in pool:
                raise LinearityViolation(f"hypothesis {label} not in the context")
            claimed.add(label)
            chunk[label] = pool[label]
        out.append(chunk)
    leftover = set(pool) - claimed
    if leftover:
        raise LinearityViolation(
            f"hypotheses {sorted(leftover)} unclaimed (weaken them away instead)"
        )
    return tuple(out)


def apply_equality(p1: Formula, hole: Formula, hole_var: str, t1: Term, t2: Term, fuel: int | Fuel = DEFAULT_FUEL) -> Formula:
    """Rewrite ``p1`` through ``hole``: check it matches with ``t1``
    plugged in, return the formula with ``t2`` plugged in."""
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    expected = subst_term_in_formula(hole, hole_var, t1)
    if not formulas_equal(p1, expected, cell):
        raise HoleMismatch(
            f"formula {show_formula(p1)} does not match hole pattern"
            f" {show_formula(expected)}"
        )
    return subst_term_in_formula(hole, hole_var, t2)


# ---------------------------------------------------------------------------
# The checker


def check_proof(
    script: ProofScript,
    theory: Theory,
    tyvars: Sequence[str] = (),
    termvars: Sequence[tuple[str, Type]] = (),
    preds: Sequence[tuple[str, tuple[Type, ...]]] = (),
    fuel: int | Fuel = DEFAULT_FUEL,
) -> CheckedProof:
    """Check a proof script and return its annotated derivation.

    The ambient context seeds Γ; most callers leave it empty and prove
    closed theorems.  On success the extracted term has been re-typed
    at the projected goal in the projected context (the typing
    certificate); failure raises the specific rule or wellformedness
    error.
    """
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    gamma = _Gamma()
    for name in tyvars:
        gamma = gamma.with_tyvar(name)
    for name, ty in termvars:
        check_type(ty, gamma.tyvar_set())
        gamma = gamma.with_termvar(name, ty)
    for name, arity in preds:
        for ty in arity:
            check_type(ty, gamma.tyvar_set())
        gamma = gamma.with_pred(name, tuple(arity))
    delta, checked = _check(script, theory, gamma, cell)
    _certify_typing(checked, theory)
    return checked


def extract_typing(checked: CheckedProof, theory: Theory) -> Type:
    """Type the extracted term in the projected (starred) context.

    Predicates become type variables, hypothesis labels get the minus
    projection of their formulas, and the result must be the projection
    of the goal.  This is the typing certificate attached to every
    checked proof.
    """
    seq = checked.sequent
    star_tyvars = frozenset(seq.tyvars) | {pred_tyvar(x) for x, _ in seq.preds}
    ctx = dict(seq.termvars)
    for label, formula in seq.hyps:
        ctx[label] = project_minus(formula)
    got = infer_type(checked.term, theory.signature, ctx, star_tyvars)
    want = project_minus(seq.goal)
    if got != want:
        raise RuleViolation(
            f"extracted term has type {show_type(got)}, projection of the"
            f" goal is {show_type(want)}"
        )
    return got


def _certify_typing(checked: CheckedProof, theory: Theory) -> None:
    extract_typing(checked, theory)


def _check(
    script: ProofScript, theory: Theory, gamma: _Gamma, fuel: Fuel
) -> tuple[Delta, CheckedProof]:
    sig = theory.signature

    def formula_ok(f: Formula) -> None:
        check_formula(f, sig, gamma.pred_ctx(), gamma.term_ctx(), gamma.tyvar_set())

    def label_ok(label: str) -> None:
        check_name(label)
        if label in sig or any(label == v for v, _ in gamma.termvars):
            raise DuplicateName(
                f"hypothesis label {label} shadows a term variable or constant"
            )

    def done(
        rule: str,
        delta: Delta,
        goal: Formula,
        term: Term,
        children: tuple[CheckedProof, ...],
        promotion_labels: tuple[str, ...] = (),
    ) -> tuple[Delta, CheckedProof]:
        seq = Sequent(gamma.tyvars, gamma.termvars, gamma.preds, _delta_tuple(delta), goal)
        return delta, CheckedProof(rule, seq, term, children, promotion_labels)

    match script:
        case Axiom(label, formula):
            label_ok(label)
            formula_ok(formula)
            return done("axiom", {label: (formula, 1)}, formula, Var(label), ())

        case Weakening(premise, label, formula):
            delta, sub = _check(premise, theory, gamma, fuel)
            label_ok(label)
            if label in delta:
                raise LinearityViolation(f"cannot weaken in {label}: already present")
            formula_ok(formula)
            delta = dict(delta)
            delta[label] = (formula, 1)
            return done("weaken", delta, sub.goal, sub.term, (sub,))

        case Application(fn, arg):
            d1, left = _check(fn, theory, gamma, fuel)
            d2, right = _check(arg, theory, gamma, fuel)
            goal = left.goal
            if not isinstance(goal, Lolli):
                raise RuleViolation(
                    f"application needs an implication, got {show_formula(goal)}"
                )
            if not formulas_equal(goal.left, right.goal, fuel):
                raise RuleViolation(
                    f"argument proves {show_formula(right.goal)}, implication"
                    f" expects {show_formula(goal.left)}"
                )
            delta = _merge((d1, d2), fuel)
            return done("app", delta, goal.right, App(left.term, right.term), (left, right))

        case Abstraction(premise, label):
            delta, sub = _check(premise, theory, gamma, fuel)
            if label not in delta:
                raise RuleViolation(
                    f"abstraction discharges {label}, which is not among the"
                    " hypotheses (weaken it in if unused)"
                )
            formula, mult = delta[label]
            if mult != 1:
                raise LinearityViolation(
                    f"abstraction needs a single occurrence of {label}, found {mult}"
                    " (contract first)"
                )
            delta = {k: v for k, v in delta.items() if k != label}
            goal = Lolli(formula, sub.goal)
            term = lam(label, project_minus(formula), sub.term)
            return done("abs", delta, goal, term, (sub,))

        case Promotion(premises, inner):
            if not isinstance(premises, tuple):
                raise IllFormedPayload("promotion premises must be a tuple of (label, proof)")
            labels = [label for label, _ in premises]
            if len(set(labels)) != len(labels):
                raise DuplicateName(f"promotion labels not distinct: {labels}")
            checked_premises: list[CheckedProof] = []
            premise_deltas: list[Delta] = []
            unbanged: dict[str, Formula] = {}
            for label, sub_script in premises:
                label_ok(label)
                d, sub = _check(sub_script, theory, gamma, fuel)
                if not isinstance(sub.goal, Bang):
                    raise PromotionShape(
                        f"premise for {label} proves {show_formula(sub.goal)},"
                        " which is not banged"
                    )
                unbanged[label] = sub.goal.body
                checked_premises.append(sub)
                premise_deltas.append(d)
            d_in, inner_checked = _check(inner, theory, gamma, fuel)
            if set(d_in) != set(unbanged):
                raise PromotionShape(
                    f"inner derivation uses hypotheses {sorted(d_in)},"
                    f" promotion declares {sorted(unbanged)}"
                )
            for label, (formula, mult) in d_in.items():
                if mult != 1:
                    raise PromotionShape(
                        f"inner hypothesis {label} occurs {mult} times; contract first"
                    )
                if not formulas_equal(formula, unbanged[label], fuel):
                    raise PromotionShape(
                        f"inner hypothesis {label} is {show_formula(formula)},"
                        f" premise provides {show_formula(unbanged[label])}"
                    )
            delta = _merge(premise_deltas, fuel)
            term = subst_term_in_term_many(
                inner_checked.term,
                {label: sub.term for (label, _), sub in zip(premises, checked_premises)},
            )
            children = tuple(checked_premises) + (inner_checked,)
            return done(
                "promote",
                delta,
                Bang(inner_checked.goal),
                term,
                children,
                tuple(label for label, _ in premises),
            )

        case Contraction(premise, label):
            delta, sub = _check(premise, theory, gamma, fuel)
            if label not in delta:
                raise RuleViolation(f"contraction on absent hypothesis {label}")
            formula, mult = delta[label]
            if not isinstance(formula, Bang):
                raise NonBangContraction(
                    f"contraction on {label} : {show_formula(formula)}"
                )
            if mult < 2:
                raise RuleViolation(
                    f"contraction needs two occurrences of {label}, found {mult}"
                )
            delta = dict(delta)
            delta[label] = (formula, mult - 1)
            return done("contract", delta, sub.goal, sub.term, (sub,))

        case AllTypeIntro(premise, name):
            check_name(name)
            if name in gamma.tyvar_set():
                raise DuplicateName(f"type variable {name} already in scope")
            delta, sub = _check(premise, theory, gamma.with_tyvar(name), fuel)
            for label, (formula, _) in delta.items():
                if name in ftv_formula(formula):
                    raise SideConditionFreeVariable(
                        f"type variable {name} occurs free in hypothesis {label}"
                    )
            return done("all-type-intro", delta, all_ty(name, sub.goal), sub.term, (sub,))

        case AllTermIntro(premise, name, ty):
            check_name(name)
            if name in sig or any(name == v for v, _ in gamma.termvars):
                raise DuplicateName(f"variable {name} already in scope")
            check_type(ty, gamma.tyvar_set())
            delta, sub = _check(premise, theory, gamma.with_termvar(name, ty), fuel)
            for label, (formula, _) in delta.items():
                if label == name or name in fv_formula(formula):
                    raise SideConditionFreeVariable(
                        f"variable {name} occurs free in hypothesis {label}"
                    )
            return done(
                "all-term-intro", delta, all_term(name, ty, sub.goal), sub.term, (sub,)
            )

        case AllPredIntro(premise, name, arity):
            check_name(name)
            if name in gamma.pred_ctx():
                raise DuplicateName(f"predicate {name} already in scope")
            for ty in arity:
                check_type(ty, gamma.tyvar_set())
            delta, sub = _check(premise, theory, gamma.with_pred(name, tuple(arity)), fuel)
            for label, (formula, _) in delta.items():
                if name in fpv_formula(formula):
                    raise SideConditionFreeVariable(
                        f"predicate {name} occurs free in hypothesis {label}"
                    )
            goal = all_pred(name, tuple(arity), sub.goal)
            term = tylam(pred_tyvar(name), sub.term)
            return done("all-pred-intro", delta, goal, term, (sub,))

        case AllTypeElim(premise, ty):
            delta, sub = _check(premise, theory, gamma, fuel)
            if not isinstance(sub.goal, ForallType):
                raise RuleViolation(
                    f"type instantiation needs a type quantifier,"
                    f" got {show_formula(sub.goal)}"
                )
            check_type(ty, gamma.tyvar_set())
            return done("all-type-elim", delta, all_ty_inst(sub.goal, ty), sub.term, (sub,))

        case AllTermElim(premise, term):
            delta, sub = _check(premise, theory, gamma, fuel)
            if not isinstance(sub.goal, ForallTerm):
                raise RuleViolation(
                    f"term instantiation needs a first-order quantifier,"
                    f" got {show_formula(sub.goal)}"
                )
            got = infer_type(term, sig, gamma.term_ctx(), gamma.tyvar_set())
            if got != sub.goal.ty:
                raise IllFormedPayload(
                    f"instantiating term has type {show_type(got)}, quantifier"
                    f" ranges over {show_type(sub.goal.ty)}"
                )
            return done(
                "all-term-elim", delta, all_term_inst(sub.goal, term), sub.term, (sub,)
            )

        case AllPredElim(premise, params, body):
            delta, sub = _check(premise, theory, gamma, fuel)
            if not isinstance(sub.goal, ForallPred):
                raise RuleViolation(
                    f"predicate instantiation needs a second-order quantifier,"
                    f" got {show_formula(sub.goal)}"
                )
            if len(params) != len(sub.goal.arity):
                raise IllFormedPayload(
                    f"abstraction takes {len(params)} parameters, quantifier"
                    f" expects {len(sub.goal.arity)}"
                )
            if len(set(params)) != len(params):
                raise DuplicateName(f"abstraction parameters not distinct: {params}")
            inner_ctx = gamma.term_ctx()
            for p, ty in zip(params, sub.goal.arity):
                check_name(p)
                if p in sig:
                    raise DuplicateName(f"parameter {p} shadows a constant")
                inner_ctx[p] = ty
            check_formula(body, sig, gamma.pred_ctx(), inner_ctx, gamma.tyvar_set())
            goal = all_pred_inst(sub.goal, tuple(params), body)
            term = TApp(sub.term, project_minus(body))
            return done("all-pred-elim", delta, goal, term, (sub,))

        case Equality(premise, hole_var, hole, lhs, rhs, ty, direction, trace):
            if direction not in ("forward", "backward"):
                raise IllFormedPayload(f"unknown rewrite direction {direction!r}")
            delta, sub = _check(premise, theory, gamma, fuel)
            check_name(hole_var)
            if hole_var in sig:
                raise DuplicateName(f"hole variable {hole_var} shadows a constant")
            check_type(ty, gamma.tyvar_set())
            for side, t in (("left", lhs), ("right", rhs)):
                got = infer_type(t, sig, gamma.term_ctx(), gamma.tyvar_set())
                if got != ty:
                    raise IllFormedPayload(
                        f"{side} term has type {show_type(got)}, payload says {show_type(ty)}"
                    )
            hole_ctx = gamma.term_ctx()
            hole_ctx[hole_var] = ty
            check_formula(hole, sig, gamma.pred_ctx(), hole_ctx, gamma.tyvar_set())
            try:
                end = verify_trace(
                    theory, lhs, trace, gamma.term_ctx(), gamma.tyvar_set(), fuel
                )
            except TraceError as exc:
                raise EqualityTraceRejected(str(exc)) from exc
            if end != rhs:
                raise EqualityTraceRejected(
                    f"trace rewrites {show_term(lhs)} to {show_term(end)},"
                    f" not to {show_term(rhs)}"
                )
            src, dst = (lhs, rhs) if direction == "forward" else (rhs, lhs)
            goal = apply_equality(sub.goal, hole, hole_var, src, dst, fuel)
            return done("rewrite", delta, goal, sub.term, (sub,))

    raise IllFormedPayload(f"not a proof script node: {script!r}")


# ---------------------------------------------------------------------------
# Renaming


_REFRESH_COUNTER = itertools.count(1)


def _script_names(
    script: ProofScript,
) -> tuple[set[str], set[str], dict[str, int], set[str], set[str]]:
    """Collect (labels, term binders, pred binders with arity, type binders,
    every name mentioned anywhere) of a script."""
    labels: set[str] = set()
    termvars: set[str] = set()
    preds: dict[str, int] = {}
    tyvars: set[str] = set()
    mentioned: set[str] = set()

    def from_term(t: Term) -> None:
        mentioned.update(fv_term(t))
        mentioned.update(ftv_term(t))

    def from_type(ty: Type) -> None:
        mentioned.update(ftv_type(ty))

    def from_formula(f: Formula) -> None:
        mentioned.update(fv_formula(f))
        mentioned.update(ftv_formula(f))
        mentioned.update(fpv_formula(f))

    def from_steps(steps: Sequence[TraceStep]) -> None:
        for st in steps:
            match st:
                case AxiomStep(_, assignment, _, _):
                    for _, val in assignment:
                        from_term(val)
                case BetaStep(_, _, term):
                    if term is not None:
                        from_term(term)
                case SymStep(start, sub):
                    from_term(start)
                    from_steps(sub)
                case TransStep(first, second):
                    from_steps(first)
                    from_steps(second)
                case CongStep(_, sub):
                    from_steps(sub)
                case ExtStep(var, target, sub):
                    termvars.add(var)
                    from_term(target)
                    from_steps(sub)
                case _:
                    pass

    def go(s: ProofScript) -> None:
        match s:
            case Axiom(label, formula):
                labels.add(label)
                from_formula(formula)
            case Weakening(premise, label, formula):
                labels.add(label)
                from_formula(formula)
                go(premise)
            case Application(fn, arg):
                go(fn)
                go(arg)
            case Abstraction(premise, label):
                labels.add(label)
                go(premise)
            case Promotion(premises, inner):
                for label, sub in premises:
                    labels.add(label)
                    go(sub)
                go(inner)
            case Contraction(premise, label):
                labels.add(label)
                go(premise)
            case AllTypeIntro(premise, name):
                tyvars.add(name)
                go(premise)
            case AllTermIntro(premise, name, ty):
                termvars.add(name)
                from_type(ty)
                go(premise)
            case AllPredIntro(premise, name, arity):
                preds[name] = len(arity)
                for ty in arity:
                    from_type(ty)
                go(premise)
            case AllTypeElim(premise, ty):
                from_type(ty)
                go(premise)
            case AllTermElim(premise, term):
                from_term(term)
                go(premise)
            case AllPredElim(premise, params, body):
                termvars.update(params)
                from_formula(body)
                go(premise)
            case Equality(premise, hole_var, hole, lhs, rhs, ty, _, trace):
                termvars.add(hole_var)
                from_formula(hole)
                from_term(lhs)
                from_term(rhs)
                from_type(ty)
                from_steps(trace)
                go(premise)

    go(script)
    mentioned |= labels | termvars | set(preds) | tyvars
    return labels, termvars, preds, tyvars, mentioned


def refresh_script(script: ProofScript, avoid: Iterable[str] = ()) -> ProofScript:
    """Rename everything a closed script binds to fresh names.

    Every hypothesis label, every variable or predicate or type variable
    introduced by a quantifier rule, and every local binder inside an
    equality payload is replaced consistently, so the result proves an
    alpha-equal conclusion but cannot clash with any name in an
    enclosing scope.  This is what makes one checked script embeddable
    inside another: the checker forbids shadowing outright.

    Open hypotheses would be renamed along with everything else, so only
    use this on closed scripts.
    """
    labels, termvars, preds, tyvars, mentioned = _script_names(script)
    taken = set(avoid) | mentioned

    def fresh() -> str:
        while True:
            name = f"v{next(_REFRESH_COUNTER)}"
            if name not in taken:
                taken.add(name)
                return name

    lmap = {old: fresh() for old in sorted(labels)}
    vmap = {old: fresh() for old in sorted(termvars)}
    pmap = {old: (fresh(), ar) for old, ar in sorted(preds.items())}
    tmap = {old: fresh() for old in sorted(tyvars)}
    term_sub = {old: Var(new) for old, new in vmap.items()}

    def rterm(t: Term) -> Term:
        t = subst_term_in_term_many(t, term_sub)
        for old, new in tmap.items():
            t = subst_type_in_term(t, old, TVar(new))
        return t

    def rtype(ty: Type) -> Type:
        for old, new in tmap.items():
            ty = subst_type_in_type(ty, old, TVar(new))
        return ty

    def rformula(f: Formula) -> Formula:
        f = subst_term_in_formula_many(f, term_sub)
        for old, (new, ar) in pmap.items():
            ps = tuple(f"r{i}" for i in range(ar))
            f = subst_pred_in_formula(f, old, ps, Atom(new, tuple(Var(p) for p in ps)))
        for old, new in tmap.items():
            f = subst_type_in_formula(f, old, TVar(new))
        return f

    def rsteps(steps: Sequence[TraceStep]) -> tuple[TraceStep, ...]:
        out: list[TraceStep] = []
        for st in steps:
            match st:
                case AxiomStep(name, assignment, pos, orient):
                    out.append(
                        AxiomStep(
                            name,
                            tuple((k, rterm(v)) for k, v in assignment),
                            pos,
                            orient,
                        )
                    )
                case BetaStep(pos, direction, term):
                    out.append(
                        BetaStep(pos, direction, None if term is None else rterm(term))
                    )
                case SymStep(start, sub):
                    out.append(SymStep(rterm(start), rsteps(sub)))
                case TransStep(first, second):
                    out.append(TransStep(rsteps(first), rsteps(second)))
                case CongStep(pos, sub):
                    out.append(CongStep(pos, rsteps(sub)))
                case ExtStep(var, target, sub):
                    out.append(ExtStep(vmap[var], rterm(target), rsteps(sub)))
                case _:
                    out.append(st)
        return tuple(out)

    def go(s: ProofScript) -> ProofScript:
        match s:
            case Axiom(label, formula):
                return Axiom(lmap[label], rformula(formula))
            case Weakening(premise, label, formula):
                return Weakening(go(premise), lmap[label], rformula(formula))
            case Application(fn, arg):
                return Application(go(fn), go(arg))
            case Abstraction(premise, label):
                return Abstraction(go(premise), lmap[label])
            case Promotion(premises, inner):
                return Promotion(
                    tuple((lmap[label], go(sub)) for label, sub in premises),
                    go(inner),
                )
            case Contraction(premise, label):
                return Contraction(go(premise), lmap[label])
            case AllTypeIntro(premise, name):
                return AllTypeIntro(go(premise), tmap[name])
            case AllTermIntro(premise, name, ty):
                return AllTermIntro(go(premise), vmap[name], rtype(ty))
            case AllPredIntro(premise, name, arity):
                return AllPredIntro(
                    go(premise), pmap[name][0], tuple(rtype(t) for t in arity)
                )
            case AllTypeElim(premise, ty):
                return AllTypeElim(go(premise), rtype(ty))
            case AllTermElim(premise, term):
                return AllTermElim(go(premise), rterm(term))
            case AllPredElim(premise, params, body):
                return AllPredElim(
                    go(premise), tuple(vmap[x] for x in params), rformula(body)
                )
            case Equality(premise, hole_var, hole, lhs, rhs, ty, direction, trace):
                return Equality(
                    go(premise),
                    vmap[hole_var],
                    rformula(hole),
                    rterm(lhs),
                    rterm(rhs),
                    rtype(ty),
                    direction,
                    rsteps(trace),
                )
        raise IllFormedPayload(f"not a proof script node: {s!r}")

    return go(script)
