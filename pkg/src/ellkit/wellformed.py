"""Declarations and the sanity judgments over them.

A :class:`Signature` declares first-order constants at closed simple
types.  A :class:`Theory` pairs a signature with named equations between
open terms.  The functions here implement type synthesis for terms and
the well-formedness check for formulas, both against an ambient
signature plus whatever variables a caller has brought into scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    ApplicationMismatch,
    ArityMismatch,
    AtomArgumentType,
    AtomArityMismatch,
    DuplicateName,
    IllFormedEntryType,
    TypeApplicationMismatch,
    TypingError,
    UnboundPredicate,
    UnboundTypeVariable,
    UnboundVariable,
    WellformednessFailure,
)
from .syntax import (
    App,
    Atom,
    Bang,
    Bound,
    ForallPred,
    ForallTerm,
    ForallType,
    Formula,
    Lam,
    Lolli,
    TApp,
    TArrow,
    TBound,
    TForall,
    TLam,
    TVar,
    Term,
    Type,
    Var,
    all_pred_open,
    all_term_open,
    all_ty_open,
    fv_term,
    gensym,
    lam_open,
    show_term,
    show_type,
    ty_all,
    ty_all_inst,
    tylam_open,
)

TermCtx = Mapping[str, Type]
PredCtx = Mapping[str, tuple[Type, ...]]


def check_name(name: str) -> None:
    """Reject names the surface syntax reserves for internal use."""
    if not name:
        raise WellformednessFailure("empty name")
    if "%" in name:
        raise WellformednessFailure(f"name {name!r} contains reserved character '%'")
    if name.startswith("$"):
        raise WellformednessFailure(f"name {name!r} uses the reserved '$' prefix")


def check_type(ty: Type, tyvars: frozenset[str] = frozenset(), depth: int = 0) -> None:
    match ty:
        case TVar(n):
            if n not in tyvars:
                raise UnboundTypeVariable(n)
        case TBound(i):
            if i >= depth:
                raise UnboundTypeVariable(f"loose type index {i}")
        case TArrow(a, b):
            check_type(a, tyvars, depth)
            check_type(b, tyvars, depth)
        case TForall(body, _):
            check_type(body, tyvars, depth + 1)
        case _:
            raise TypeError(f"not a type: {ty!r}")


class Signature:
    """First-order constants, each at a closed simple type."""

    def __init__(self, entries: Mapping[str, Type] | Iterable[tuple[str, Type]]) -> None:
        pairs = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
        consts: dict[str, Type] = {}
        for name, ty in pairs:
            check_name(name)
            if name in consts:
                raise DuplicateName(f"constant {name} declared twice")
            try:
                check_type(ty, frozenset())
            except UnboundTypeVariable as exc:
                raise IllFormedEntryType(f"constant {name}: {exc}") from exc
            consts[name] = ty
        self.consts = consts

    def __contains__(self, name: str) -> bool:
        return name in self.consts

    def __getitem__(self, name: str) -> Type:
        return self.consts[name]

    def names(self) -> tuple[str, ...]:
        return tuple(self.consts)


def infer_type(
    t: Term,
    sig: Signature,
    ctx: TermCtx | None = None,
    tyvars: frozenset[str] = frozenset(),
) -> Type:
    """Synthesize the simple type of a locally closed term."""

    def go(t: Term, ctx: dict[str, Type], tyvars: frozenset[str]) -> Type:
        match t:
            case Var(n):
                if n in ctx:
                    return ctx[n]
                if n in sig:
                    return sig[n]
                raise UnboundVariable(n)
            case Bound(i):
                raise TypingError(f"loose term index {i}")
            case Lam(ty, _, hint):
                check_type(ty, tyvars)
                x = gensym(hint or "x")
                body_ty = go(lam_open(t, x), {**ctx, x: ty}, tyvars)
                return TArrow(ty, body_ty)
            case App(f, a):
                fn_ty = go(f, ctx, tyvars)
                if not isinstance(fn_ty, TArrow):
                    raise ApplicationMismatch(
                        f"applied {show_term(f)} of non-arrow type {show_type(fn_ty)}"
                    )
                arg_ty = go(a, ctx, tyvars)
                if arg_ty != fn_ty.left:
                    raise ApplicationMismatch(
                        f"argument {show_term(a)} has type {show_type(arg_ty)},"
                        f" expected {show_type(fn_ty.left)}"
                    )
                return fn_ty.right
            case TLam(_, hint):
                a_name = gensym(hint or "a")
                body_ty = go(tylam_open(t, a_name), ctx, tyvars | {a_name})
                return ty_all(a_name, body_ty)
            case TApp(f, ty):
                fn_ty = go(f, ctx, tyvars)
                if not isinstance(fn_ty, TForall):
                    raise TypeApplicationMismatch(
                        f"type-applied {show_term(f)} of non-quantified type {show_type(fn_ty)}"
                    )
                check_type(ty, tyvars)
                return ty_all_inst(fn_ty, ty)
        raise TypeError(f"not a term: {t!r}")

    return go(t, dict(ctx or {}), tyvars)


def check_formula(
    f: Formula,
    sig: Signature,
    preds: PredCtx | None = None,
    ctx: TermCtx | None = None,
    tyvars: frozenset[str] = frozenset(),
) -> None:
    """Check that a closed-at-top formula is well formed.

    Every atom must name a predicate in scope, applied at its declared
    arity, with arguments that type-check at the declared argument types.
    """

    def go(f: Formula, preds: dict[str, tuple[Type, ...]], ctx: dict[str, Type], tyvars: frozenset[str]) -> None:
        match f:
            case Atom(head, args):
                if not isinstance(head, str):
                    raise UnboundPredicate(f"loose predicate index {head}")
                if head not in preds:
                    raise UnboundPredicate(head)
                arity = preds[head]
                if len(args) != len(arity):
                    raise AtomArityMismatch(
                        f"{head} expects {len(arity)} arguments, got {len(args)}"
                    )
                for arg, want in zip(args, arity):
                    got = infer_type(arg, sig, ctx, tyvars)
                    if got != want:
                        raise AtomArgumentType(
                            f"argument {show_term(arg)} of {head} has type"
                            f" {show_type(got)}, expected {show_type(want)}"
                        )
            case Lolli(a, b):
                go(a, preds, ctx, tyvars)
                go(b, preds, ctx, tyvars)
            case Bang(body):
                go(body, preds, ctx, tyvars)
            case ForallPred(arity, _, hint):
                for ty in arity:
                    check_type(ty, tyvars)
                x = gensym(hint or "X")
                go(all_pred_open(f, x), {**preds, x: tuple(arity)}, ctx, tyvars)
            case ForallTerm(ty, _, hint):
                check_type(ty, tyvars)
                x = gensym(hint or "x")
                go(all_term_open(f, x), preds, {**ctx, x: ty}, tyvars)
            case ForallType(_, hint):
                a = gensym(hint or "a")
                go(all_ty_open(f, a), preds, ctx, tyvars | {a})
            case _:
                raise TypeError(f"not a formula: {f!r}")

    go(f, dict(preds or {}), dict(ctx or {}), tyvars)


@dataclass(frozen=True)
class Equation:
    """A named equation ``lhs = rhs : ty`` with explicit parameters."""

    name: str
    vars: tuple[tuple[str, Type], ...]
    lhs: Term
    rhs: Term
    ty: Type


def check_equation(eq: Equation, sig: Signature) -> None:
    check_name(eq.name)
    seen: set[str] = set()
    for v, ty in eq.vars:
        check_name(v)
        if v in seen:
            raise DuplicateName(f"equation {eq.name}: parameter {v} repeated")
        if v in sig:
            raise DuplicateName(f"equation {eq.name}: parameter {v} shadows a constant")
        seen.add(v)
        check_type(ty, frozenset())
    check_type(eq.ty, frozenset())
    ctx = dict(eq.vars)
    for side, term in (("left", eq.lhs), ("right", eq.rhs)):
        got = infer_type(term, sig, ctx)
        if got != eq.ty:
            raise WellformednessFailure(
                f"equation {eq.name}: {side} side has type {show_type(got)},"
                f" expected {show_type(eq.ty)}"
            )
    extra = (fv_term(eq.lhs) | fv_term(eq.rhs)) - seen - set(sig.names())
    if extra:
        raise WellformednessFailure(
            f"equation {eq.name}: free variables {sorted(extra)} not among its parameters"
        )


class Theory:
    """A signature together with named equations over it."""

    def __init__(self, signature: Signature, equations: Iterable[Equation]) -> None:
        self.signature = signature
        eqs: dict[str, Equation] = {}
        for eq in equations:
            if eq.name in eqs:
                raise DuplicateName(f"equation {eq.name} declared twice")
            check_equation(eq, signature)
            eqs[eq.name] = eq
        self.equations = eqs

    def equation(self, name: str) -> Equation:
        try:
            return self.equations[name]
        except KeyError:
            raise WellformednessFailure(f"no equation named {name}") from None


def check_instantiation(
    eq: Equation,
    assignment: Mapping[str, Term],
    sig: Signature,
    ctx: TermCtx | None = None,
    tyvars: frozenset[str] = frozenset(),
) -> tuple[Term, Term]:
    """Check a substitution against an equation's parameters.

    Returns the instantiated (lhs, rhs) pair.  Every parameter must be
    assigned a term of the declared type; extra assignments are rejected.
    """
    from .syntax import subst_term_in_term_many

    params = dict(eq.vars)
    extra = set(assignment) - set(params)
    if extra:
        raise ArityMismatch(f"equation {eq.name}: spurious assignments for {sorted(extra)}")
    missing = set(params) - set(assignment)
    if missing:
        raise ArityMismatch(f"equation {eq.name}: missing assignments for {sorted(missing)}")
    for v, value in assignment.items():
        got = infer_type(value, sig, ctx, tyvars)
        if got != params[v]:
            raise TypingError(
                f"equation {eq.name}: {v} := {show_term(value)} has type"
                f" {show_type(got)}, expected {show_type(params[v])}"
            )
    return (
        subst_term_in_term_many(eq.lhs, dict(assignment)),
        subst_term_in_term_many(eq.rhs, dict(assignment)),
    )
