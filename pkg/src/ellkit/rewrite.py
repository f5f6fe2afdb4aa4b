"""Replayable equational rewriting.

A *trace* is a list of steps that transforms a start term into an end
term, every step justified against the ambient theory: an oriented
instance of a named equation at a position, a beta contraction or
expansion, congruence into a subterm, symmetry via an auxiliary trace,
or extensionality through a fresh variable.  Verification replays the
list and fails loudly; nothing is ever searched for.

Positions address the applicative skeleton only (0 = function, 1 =
argument) and never cross a binder.  Reasoning under a lambda goes
through :class:`ExtStep`, which carries its freshness side condition
explicitly.  The one exception a position cannot reach, the type
argument of a type application, is simply not a term.

:func:`normalize_with_h0` is the oriented normalizer: it runs the
recursion equations left to right together with beta until a fixpoint,
and can emit the trace that certifies its own run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from . import library
from .errors import (
    DecodeFailure,
    IllTypedInstance,
    NonFreshExtensionVariable,
    PositionOutOfRange,
    StepMismatch,
    TypingError,
    WellformednessFailure,
)
from .syntax import (
    DEFAULT_FUEL,
    App,
    Bound,
    Fuel,
    Lam,
    TApp,
    TArrow,
    TLam,
    Term,
    Var,
    contract_redex,
    fv_term,
    show_term,
    subst_term_in_term_many,
)
from .wellformed import Equation, TermCtx, Theory, check_instantiation, infer_type

Position = tuple[int, ...]


def subterm_at(t: Term, pos: Position) -> Term:
    for depth, i in enumerate(pos):
        where = f"{pos[: depth + 1]} in {show_term(t)}"
        match t:
            case App(f, a):
                if i == 0:
                    t = f
                elif i == 1:
                    t = a
                else:
                    raise PositionOutOfRange(f"application has positions 0 and 1, got {where}")
            case TApp(f, _):
                if i == 0:
                    t = f
                else:
                    raise PositionOutOfRange(f"type argument is not a term position: {where}")
            case Lam() | TLam():
                raise PositionOutOfRange(f"position crosses a binder: {where}")
            case _:
                raise PositionOutOfRange(f"no subterm at {where}")
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    i, rest = pos[0], pos[1:]
    match t:
        case App(f, a):
            if i == 0:
                return App(replace_at(f, rest, new), a)
            if i == 1:
                return App(f, replace_at(a, rest, new))
            raise PositionOutOfRange(f"application has positions 0 and 1, got {i}")
        case TApp(f, ty):
            if i == 0:
                return TApp(replace_at(f, rest, new), ty)
            raise PositionOutOfRange("type argument is not a term position")
        case Lam() | TLam():
            raise PositionOutOfRange("position crosses a binder")
    raise PositionOutOfRange(f"no subterm at {pos}")


# ---------------------------------------------------------------------------
# Trace steps


@dataclass(frozen=True)
class Refl:
    """The empty step; occasionally useful as an explicit placeholder."""


@dataclass(frozen=True)
class AxiomStep:
    """Apply a named equation, instantiated by ``assignment``, at ``pos``.

    ``orient`` is ``"lr"`` (replace an instance of the left side by the
    right) or ``"rl"``.
    """

    equation: str
    assignment: tuple[tuple[str, Term], ...]
    pos: Position = ()
    orient: str = "lr"


@dataclass(frozen=True)
class BetaStep:
    """Contract the redex at ``pos``, or expand to the given redex.

    For expansion, ``term`` carries the redex whose contractum must match
    the current subterm; there is no way to guess it from the result.
    """

    pos: Position = ()
    direction: str = "contract"
    term: Term | None = None


@dataclass(frozen=True)
class SymStep:
    """Replace the current term by ``start``, justified by a trace from
    ``start`` back to the current term."""

    start: Term
    steps: tuple["TraceStep", ...]


@dataclass(frozen=True)
class TransStep:
    """Run two sub-traces in sequence.  Pure bookkeeping convenience."""

    first: tuple["TraceStep", ...]
    second: tuple["TraceStep", ...]


@dataclass(frozen=True)
class CongStep:
    """Run a sub-trace on the subterm at ``pos``."""

    pos: Position
    steps: tuple["TraceStep", ...]


@dataclass(frozen=True)
class ExtStep:
    """Replace the current function by ``target``, justified pointwise.

    ``steps`` must rewrite ``current var`` into ``target var`` where
    ``var`` is fresh for everything in sight.
    """

    var: str
    target: Term
    steps: tuple["TraceStep", ...]


TraceStep = Union[Refl, AxiomStep, BetaStep, SymStep, TransStep, CongStep, ExtStep]


def verify_trace(
    theory: Theory,
    start: Term,
    steps: Sequence[TraceStep],
    ctx: TermCtx | None = None,
    tyvars: frozenset[str] = frozenset(),
    fuel: int | Fuel = DEFAULT_FUEL,
) -> Term:
    """Replay ``steps`` from ``start`` and return the term they reach.

    The start term must typecheck; every step preserves typing by
    construction, with the two payload-carrying steps checked against
    the current type explicitly.
    """
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    ctx = dict(ctx or {})
    infer_type(start, theory.signature, ctx, tyvars)
    return _replay(theory, start, steps, ctx, tyvars, cell)


def _replay(
    theory: Theory,
    current: Term,
    steps: Sequence[TraceStep],
    ctx: dict,
    tyvars: frozenset[str],
    fuel: Fuel,
) -> Term:
    sig = theory.signature
    for step in steps:
        fuel.spend()
        match step:
            case Refl():
                pass
            case AxiomStep(name, assignment, pos, orient):
                if orient not in ("lr", "rl"):
                    raise StepMismatch(f"unknown orientation {orient!r}")
                eq = theory.equation(name)
                try:
                    lhs, rhs = check_instantiation(eq, dict(assignment), sig, ctx, tyvars)
                except (TypingError, WellformednessFailure) as exc:
                    raise IllTypedInstance(f"{name}: {exc}") from exc
                src, dst = (lhs, rhs) if orient == "lr" else (rhs, lhs)
                sub = subterm_at(current, pos)
                if sub != src:
                    raise StepMismatch(
                        f"{name} ({orient}) expects {show_term(src)} at {pos},"
                        f" found {show_term(sub)}"
                    )
                current = replace_at(current, pos, dst)
            case BetaStep(pos, direction, term):
                sub = subterm_at(current, pos)
                if direction == "contract":
                    contractum = contract_redex(sub)
                    if contractum is None:
                        raise StepMismatch(f"no redex at {pos}: {show_term(sub)}")
                    current = replace_at(current, pos, contractum)
                elif direction == "expand":
                    if term is None:
                        raise StepMismatch("beta expansion needs its redex spelled out")
                    contractum = contract_redex(term)
                    if contractum is None:
                        raise StepMismatch(f"expansion payload is not a redex: {show_term(term)}")
                    if contractum != sub:
                        raise StepMismatch(
                            f"expansion payload contracts to {show_term(contractum)},"
                            f" expected {show_term(sub)}"
                        )
                    want = infer_type(sub, sig, ctx, tyvars)
                    got = infer_type(term, sig, ctx, tyvars)
                    if got != want:
                        raise IllTypedInstance(
                            f"expansion payload has type {got}, subterm has {want}"
                        )
                    current = replace_at(current, pos, term)
                else:
                    raise StepMismatch(f"unknown beta direction {direction!r}")
            case SymStep(start2, steps2):
                want = infer_type(current, sig, ctx, tyvars)
                got = infer_type(start2, sig, ctx, tyvars)
                if got != want:
                    raise IllTypedInstance(f"symmetry start has type {got}, expected {want}")
                end = _replay(theory, start2, steps2, ctx, tyvars, fuel)
                if end != current:
                    raise StepMismatch(
                        f"symmetry trace ends at {show_term(end)},"
                        f" expected {show_term(current)}"
                    )
                current = start2
            case TransStep(first, second):
                current = _replay(theory, current, first, ctx, tyvars, fuel)
                current = _replay(theory, current, second, ctx, tyvars, fuel)
            case CongStep(pos, steps2):
                sub = subterm_at(current, pos)
                new_sub = _replay(theory, sub, steps2, ctx, tyvars, fuel)
                current = replace_at(current, pos, new_sub)
            case ExtStep(var, target, steps2):
                taken = set(ctx) | set(sig.names()) | fv_term(current) | fv_term(target)
                if var in taken:
                    raise NonFreshExtensionVariable(var)
                fn_ty = infer_type(current, sig, ctx, tyvars)
                if not isinstance(fn_ty, TArrow):
                    raise StepMismatch(
                        f"extension applies to functions, current term has type {fn_ty}"
                    )
                got = infer_type(target, sig, ctx, tyvars)
                if got != fn_ty:
                    raise IllTypedInstance(f"extension target has type {got}, expected {fn_ty}")
                inner_ctx = {**ctx, var: fn_ty.left}
                end = _replay(
                    theory, App(current, Var(var)), steps2, inner_ctx, tyvars, fuel
                )
                if end != App(target, Var(var)):
                    raise StepMismatch(
                        f"extension trace ends at {show_term(end)},"
                        f" expected {show_term(App(target, Var(var)))}"
                    )
                current = target
            case _:
                raise StepMismatch(f"unknown trace step {step!r}")
    return current


# ---------------------------------------------------------------------------
# First-order matching and the oriented normalizer


def match_pattern(
    pattern: Term, subject: Term, pattern_vars: frozenset[str]
) -> dict[str, Term] | None:
    """First-order matching; pattern variables bind whole subterms."""
    binding: dict[str, Term] = {}

    def go(p: Term, s: Term) -> bool:
        match p:
            case Var(n) if n in pattern_vars:
                if n in binding:
                    return binding[n] == s
                binding[n] = s
                return True
            case Var(n):
                return isinstance(s, Var) and s.name == n
            case App(pf, pa):
                return isinstance(s, App) and go(pf, s.fn) and go(pa, s.arg)
            case TApp(pf, pty):
                return isinstance(s, TApp) and s.ty == pty and go(pf, s.fn)
            case Bound() | Lam() | TLam():
                return p == s
        return False

    return binding if go(pattern, subject) else None


def _scan(
    t: Term, pos: Position, eqs: Sequence[Equation]
) -> tuple[TraceStep, Term, Position] | None:
    """Leftmost-outermost search for a beta redex or an equation instance."""
    contractum = contract_redex(t)
    if contractum is not None:
        return BetaStep(pos), contractum, pos
    for eq in eqs:
        pvars = frozenset(v for v, _ in eq.vars)
        asg = match_pattern(eq.lhs, t, pvars)
        if asg is not None and set(asg) == set(pvars):
            step = AxiomStep(eq.name, tuple(sorted(asg.items())), pos, "lr")
            return step, subst_term_in_term_many(eq.rhs, asg), pos
    match t:
        case App(f, a):
            hit = _scan(f, pos + (0,), eqs)
            if hit is not None:
                return hit
            return _scan(a, pos + (1,), eqs)
        case TApp(f, _):
            return _scan(f, pos + (0,), eqs)
    return None


def normalize_with_h0(
    t: Term,
    theory: Theory | None = None,
    equations: Iterable[str] | None = None,
    ctx: TermCtx | None = None,
    fuel: int | Fuel = DEFAULT_FUEL,
    trace: list[TraceStep] | None = None,
) -> Term:
    """Run the recursion equations left to right, plus beta, to a fixpoint.

    By default this uses the arithmetic theory with its two numeral
    definitions excluded; orienting those would unfold every numeral
    into raw lambda terms.  Pass ``trace`` to collect a certificate
    replayable by :func:`verify_trace`.
    """
    theory = theory if theory is not None else library.theory
    names = tuple(equations) if equations is not None else library.recursion_equations
    eqs = tuple(theory.equation(n) for n in names)
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    infer_type(t, theory.signature, ctx)
    while True:
        hit = _scan(t, (), eqs)
        if hit is None:
            return t
        cell.spend()
        step, new_sub, pos = hit
        if trace is not None:
            trace.append(step)
        t = replace_at(t, pos, new_sub)


def ground_value(t: Term) -> int:
    """Decode a first-order numeral ``s (... (s 0))``."""
    n = 0
    while True:
        match t:
            case Var("0"):
                return n
            case App(Var("s"), rest):
                n += 1
                t = rest
            case _:
                raise DecodeFailure(f"not a numeral: {show_term(t)}")


def evaluate_ground(
    t: Term,
    theory: Theory | None = None,
    ctx: TermCtx | None = None,
    fuel: int | Fuel = DEFAULT_FUEL,
) -> int:
    """Normalize a ground arithmetic term and decode the numeral."""
    return ground_value(normalize_with_h0(t, theory, None, ctx, fuel))
