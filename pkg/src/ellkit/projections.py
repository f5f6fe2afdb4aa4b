"""Projections out of the formula language, and the untyped lambda core.

Three forgetful maps live here:

* ``project_minus`` sends a formula to the simple type of its proof
  terms.  Atoms collapse to a type variable tagged by their predicate,
  first-order and type quantifiers vanish, the bang vanishes.
* ``project_circ`` sends a formula to its exponential skeleton: the
  same map except that the bang survives and arrows stay linear.
* ``erase`` strips a typed term down to a pure lambda term, the thing
  that actually runs.

Predicate variables turn into type variables through the reserved ``$``
prefix, so a bound predicate becomes a bound type variable at the same
index and a free one keeps a recognizable name.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Union

from .errors import DecodeFailure
from .syntax import (
    DEFAULT_FUEL,
    App,
    Atom,
    Bang,
    Bound,
    ForallPred,
    ForallTerm,
    ForallType,
    Formula,
    Fuel,
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
    gensym,
)

PRED_TYVAR_PREFIX = "$"


def pred_tyvar(name: str) -> str:
    """The type variable standing for predicate ``name``."""
    return PRED_TYVAR_PREFIX + name


def project_minus(f: Formula) -> Type:
    """The simple type of a formula's proof terms."""
    match f:
        case Atom(head, _):
            return TVar(pred_tyvar(head)) if isinstance(head, str) else TBound(head)
        case Lolli(a, b):
            return TArrow(project_minus(a), project_minus(b))
        case Bang(body):
            return project_minus(body)
        case ForallPred(_, body, hint):
            return TForall(project_minus(body), hint)
        case ForallTerm(_, body, _):
            return project_minus(body)
        case ForallType(body, _):
            return project_minus(body)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Exponential types


@dataclass(frozen=True, slots=True)
class EVar:
    name: str


@dataclass(frozen=True, slots=True)
class EBound:
    index: int


@dataclass(frozen=True, slots=True)
class ELol:
    left: "EALType"
    right: "EALType"


@dataclass(frozen=True, slots=True)
class EBang:
    body: "EALType"


@dataclass(frozen=True, slots=True)
class EForall:
    body: "EALType"
    hint: str = field(default="a", compare=False)


EALType = Union[EVar, EBound, ELol, EBang, EForall]


def project_circ(f: Formula) -> EALType:
    """The exponential skeleton of a formula."""
    match f:
        case Atom(head, _):
            return EVar(pred_tyvar(head)) if isinstance(head, str) else EBound(head)
        case Lolli(a, b):
            return ELol(project_circ(a), project_circ(b))
        case Bang(body):
            return EBang(project_circ(body))
        case ForallPred(_, body, hint):
            return EForall(project_circ(body), hint)
        case ForallTerm(_, body, _):
            return project_circ(body)
        case ForallType(body, _):
            return project_circ(body)
    raise TypeError(f"not a formula: {f!r}")


def _e_open(t: EALType, k: int, repl: EALType) -> EALType:
    match t:
        case EBound(i):
            return repl if i == k else t
        case EVar():
            return t
        case ELol(a, b):
            return ELol(_e_open(a, k, repl), _e_open(b, k, repl))
        case EBang(body):
            return EBang(_e_open(body, k, repl))
        case EForall(body, hint):
            return EForall(_e_open(body, k + 1, repl), hint)
    raise TypeError(f"not an exponential type: {t!r}")


def _e_close(t: EALType, k: int, name: str) -> EALType:
    match t:
        case EVar(n):
            return EBound(k) if n == name else t
        case EBound():
            return t
        case ELol(a, b):
            return ELol(_e_close(a, k, name), _e_close(b, k, name))
        case EBang(body):
            return EBang(_e_close(body, k, name))
        case EForall(body, hint):
            return EForall(_e_close(body, k + 1, name), hint)
    raise TypeError(f"not an exponential type: {t!r}")


def e_all(name: str, body: EALType) -> EForall:
    return EForall(_e_close(body, 0, name), hint=name)


def e_all_inst(t: EForall, arg: EALType) -> EALType:
    return _e_open(t.body, 0, arg)


def e_all_open(t: EForall, name: str) -> EALType:
    return _e_open(t.body, 0, EVar(name))


def fv_ealtype(t: EALType) -> frozenset[str]:
    match t:
        case EVar(n):
            return frozenset((n,))
        case EBound():
            return frozenset()
        case ELol(a, b):
            return fv_ealtype(a) | fv_ealtype(b)
        case EBang(body) | EForall(body, _):
            return fv_ealtype(body)
    raise TypeError(f"not an exponential type: {t!r}")


def show_ealtype(t: EALType) -> str:
    match t:
        case EVar(n):
            return n
        case EBound(i):
            return f"#{i}"
        case ELol(a, b):
            left = show_ealtype(a)
            if isinstance(a, (ELol, EForall)):
                left = f"({left})"
            return f"{left} -o {show_ealtype(b)}"
        case EBang(body):
            inner = show_ealtype(body)
            if isinstance(body, (ELol, EForall)):
                inner = f"({inner})"
            return f"!{inner}"
        case EForall(body, hint):
            name = (hint or "a").split("%")[0] or "a"
            while name in fv_ealtype(body):
                name += "'"
            return f"forall {name}. {show_ealtype(_e_open(body, 0, EVar(name)))}"
    raise TypeError(f"not an exponential type: {t!r}")


def strip_bangs(t: EALType) -> tuple[int, EALType]:
    n = 0
    while isinstance(t, EBang):
        n += 1
        t = t.body
    return n, t


# ---------------------------------------------------------------------------
# Pure lambda terms


@dataclass(frozen=True, slots=True)
class PVar:
    name: str


@dataclass(frozen=True, slots=True)
class PBound:
    index: int


@dataclass(frozen=True, slots=True)
class PLam:
    body: "PureTerm"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class PApp:
    fn: "PureTerm"
    arg: "PureTerm"


PureTerm = Union[PVar, PBound, PLam, PApp]


def erase(t: Term) -> PureTerm:
    """Forget all type structure.  Term-sort indices carry over as is."""
    match t:
        case Var(n):
            return PVar(n)
        case Bound(i):
            return PBound(i)
        case Lam(_, body, hint):
            return PLam(erase(body), hint)
        case App(f, a):
            return PApp(erase(f), erase(a))
        case TLam(body, _):
            return erase(body)
        case TApp(f, _):
            return erase(f)
    raise TypeError(f"not a term: {t!r}")


def _p_open(t: PureTerm, k: int, repl: PureTerm) -> PureTerm:
    match t:
        case PBound(i):
            return repl if i == k else t
        case PVar():
            return t
        case PLam(body, hint):
            b2 = _p_open(body, k + 1, repl)
            return t if b2 is body else PLam(b2, hint)
        case PApp(f, a):
            f2, a2 = _p_open(f, k, repl), _p_open(a, k, repl)
            return t if f2 is f and a2 is a else PApp(f2, a2)
    raise TypeError(f"not a pure term: {t!r}")


def _p_close(t: PureTerm, k: int, name: str) -> PureTerm:
    match t:
        case PVar(n):
            return PBound(k) if n == name else t
        case PBound():
            return t
        case PLam(body, hint):
            b2 = _p_close(body, k + 1, name)
            return t if b2 is body else PLam(b2, hint)
        case PApp(f, a):
            f2, a2 = _p_close(f, k, name), _p_close(a, k, name)
            return t if f2 is f and a2 is a else PApp(f2, a2)
    raise TypeError(f"not a pure term: {t!r}")


def plam(name: str, body: PureTerm) -> PLam:
    return PLam(_p_close(body, 0, name), hint=name)


def plam_open(t: PLam, name: str) -> PureTerm:
    return _p_open(t.body, 0, PVar(name))


def papp(fn: PureTerm, *args: PureTerm) -> PureTerm:
    for a in args:
        fn = PApp(fn, a)
    return fn


def fv_pure(t: PureTerm) -> frozenset[str]:
    match t:
        case PVar(n):
            return frozenset((n,))
        case PBound():
            return frozenset()
        case PLam(body, _):
            return fv_pure(body)
        case PApp(f, a):
            return fv_pure(f) | fv_pure(a)
    raise TypeError(f"not a pure term: {t!r}")


def pure_size(t: PureTerm) -> int:
    match t:
        case PVar() | PBound():
            return 1
        case PLam(body, _):
            return 1 + pure_size(body)
        case PApp(f, a):
            return 1 + pure_size(f) + pure_size(a)
    raise TypeError(f"not a pure term: {t!r}")


def show_pure(t: PureTerm) -> str:
    match t:
        case PVar(n):
            return n
        case PBound(i):
            return f"#{i}"
        case PLam(body, hint):
            name = hint.split("%")[0] or "x"
            while name in fv_pure(body):
                name += "'"
            return f"\\{name}. {show_pure(_p_open(body, 0, PVar(name)))}"
        case PApp(f, a):
            head = show_pure(f)
            if isinstance(f, PLam):
                head = f"({head})"
            arg = show_pure(a)
            if not isinstance(a, (PVar, PBound)):
                arg = f"({arg})"
            return f"{head} {arg}"
    raise TypeError(f"not a pure term: {t!r}")


def _grow_stack() -> None:
    """Numerals nest applications linearly, so structural recursion over
    their spines needs more headroom than the interpreter default."""
    if sys.getrecursionlimit() < 20_000:
        sys.setrecursionlimit(20_000)


class StepCounter:
    """Counts beta contractions performed by the untyped normalizer."""

    __slots__ = ("steps",)

    def __init__(self) -> None:
        self.steps = 0


def _p_whnf(t: PureTerm, fuel: Fuel, counter: StepCounter | None) -> PureTerm:
    while True:
        match t:
            case PApp(f, a):
                f2 = _p_whnf(f, fuel, counter)
                if isinstance(f2, PLam):
                    fuel.spend()
                    if counter is not None:
                        counter.steps += 1
                    t = _p_open(f2.body, 0, a)
                else:
                    return t if f2 is f else PApp(f2, a)
            case _:
                return t


def _p_norm(t: PureTerm, fuel: Fuel, counter: StepCounter | None) -> PureTerm:
    t = _p_whnf(t, fuel, counter)
    match t:
        case PVar() | PBound():
            return t
        case PLam(_, hint):
            x = gensym(hint or "x")
            nb = _p_norm(_p_open(t.body, 0, PVar(x)), fuel, counter)
            return PLam(_p_close(nb, 0, x), hint)
        case PApp(f, a):
            return PApp(_p_norm(f, fuel, counter), _p_norm(a, fuel, counter))
    raise TypeError(f"not a pure term: {t!r}")


def normal_order_normalize(
    t: PureTerm,
    fuel: int | Fuel = DEFAULT_FUEL,
    counter: StepCounter | None = None,
) -> PureTerm:
    """Leftmost-outermost normal form of a locally closed pure term."""
    _grow_stack()
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    return _p_norm(t, cell, counter)


def church_encode(n: int) -> PureTerm:
    if n < 0:
        raise ValueError("no negative numerals")
    body: PureTerm = PVar("x")
    for _ in range(n):
        body = PApp(PVar("f"), body)
    return plam("f", plam("x", body))


def church_decode(t: PureTerm) -> int:
    """Read a numeral off a normal form, or raise :class:`DecodeFailure`."""
    _grow_stack()
    if not isinstance(t, PLam):
        raise DecodeFailure(f"not a lambda: {t!r}")
    f = gensym("f")
    body = plam_open(t, f)
    if not isinstance(body, PLam):
        raise DecodeFailure("expected a two-argument lambda")
    x = gensym("x")
    spine = plam_open(body, x)
    count = 0
    while True:
        match spine:
            case PVar(n) if n == x:
                return count
            case PApp(PVar(g), rest) if g == f:
                count += 1
                spine = rest
            case _:
                raise DecodeFailure("body is not an iterated application")
