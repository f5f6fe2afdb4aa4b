"""Core syntax: simple types, typed lambda terms, and linear formulas.

Representation
--------------

All three grammars use a locally nameless encoding with *sorted* de Bruijn
indices.  There are three binding sorts:

* type sort  -- bound by ``forall`` in types, by type abstraction in terms,
  and by the type quantifier in formulas;
* term sort  -- bound by lambda in terms and by the first-order quantifier
  in formulas;
* predicate sort -- bound by the second-order quantifier in formulas.

A bound index counts enclosing binders *of its own sort only*, so a term
index inside an atom argument sees both the formula's first-order
quantifiers and any lambdas inside the argument, and nothing else.  Free
variables are plain names.  Because every value we ever substitute is
locally closed, substitution needs no index shifting; the few operations
that must look under a binder open it with a fresh name and close it
again afterwards.

Binder name hints are stored with ``compare=False``, so dataclass equality
is exactly alpha-equivalence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Union

from .errors import ArityMismatch, FuelExhausted

DEFAULT_FUEL = 10_000_000

_GENSYM = itertools.count()


def gensym(base: str = "x") -> str:
    """Return a name that cannot collide with user syntax.

    The ``%`` separator is rejected by the surface lexer, so generated
    names never clash with anything read from a file.
    """
    return f"{base}%{next(_GENSYM)}"


class Fuel:
    """A mutable step budget shared across a computation."""

    __slots__ = ("left",)

    def __init__(self, amount: int = DEFAULT_FUEL) -> None:
        self.left = amount

    def spend(self, n: int = 1) -> None:
        self.left -= n
        if self.left < 0:
            raise FuelExhausted()


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True, slots=True)
class TVar:
    name: str


@dataclass(frozen=True, slots=True)
class TBound:
    index: int


@dataclass(frozen=True, slots=True)
class TArrow:
    left: "Type"
    right: "Type"


@dataclass(frozen=True, slots=True)
class TForall:
    body: "Type"
    hint: str = field(default="a", compare=False)


Type = Union[TVar, TBound, TArrow, TForall]


def _ty_open(ty: Type, k: int, repl: Type) -> Type:
    match ty:
        case TBound(i):
            return repl if i == k else ty
        case TVar():
            return ty
        case TArrow(a, b):
            a2, b2 = _ty_open(a, k, repl), _ty_open(b, k, repl)
            return ty if a2 is a and b2 is b else TArrow(a2, b2)
        case TForall(body, hint):
            b2 = _ty_open(body, k + 1, repl)
            return ty if b2 is body else TForall(b2, hint)
    raise TypeError(f"not a type: {ty!r}")


def _ty_close(ty: Type, k: int, name: str) -> Type:
    match ty:
        case TVar(n):
            return TBound(k) if n == name else ty
        case TBound():
            return ty
        case TArrow(a, b):
            a2, b2 = _ty_close(a, k, name), _ty_close(b, k, name)
            return ty if a2 is a and b2 is b else TArrow(a2, b2)
        case TForall(body, hint):
            b2 = _ty_close(body, k + 1, name)
            return ty if b2 is body else TForall(b2, hint)
    raise TypeError(f"not a type: {ty!r}")


def ty_all(name: str, body: Type) -> TForall:
    """Bind ``name`` in ``body``."""
    return TForall(_ty_close(body, 0, name), hint=name)


def ty_all_open(ty: TForall, name: str) -> Type:
    return _ty_open(ty.body, 0, TVar(name))


def ty_all_inst(ty: TForall, arg: Type) -> Type:
    """Instantiate the quantifier with a locally closed type."""
    return _ty_open(ty.body, 0, arg)


def ftv_type(ty: Type) -> frozenset[str]:
    match ty:
        case TVar(n):
            return frozenset((n,))
        case TBound():
            return frozenset()
        case TArrow(a, b):
            return ftv_type(a) | ftv_type(b)
        case TForall(body, _):
            return ftv_type(body)
    raise TypeError(f"not a type: {ty!r}")


def subst_type_in_type(ty: Type, name: str, value: Type) -> Type:
    match ty:
        case TVar(n):
            return value if n == name else ty
        case TBound():
            return ty
        case TArrow(a, b):
            return TArrow(subst_type_in_type(a, name, value), subst_type_in_type(b, name, value))
        case TForall(body, hint):
            return TForall(subst_type_in_type(body, name, value), hint)
    raise TypeError(f"not a type: {ty!r}")


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Bound:
    index: int


@dataclass(frozen=True, slots=True)
class Lam:
    ty: Type
    body: "Term"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class TLam:
    body: "Term"
    hint: str = field(default="a", compare=False)


@dataclass(frozen=True, slots=True)
class TApp:
    fn: "Term"
    ty: Type


Term = Union[Var, Bound, Lam, App, TLam, TApp]


def _tm_open_tm(t: Term, k: int, repl: Term) -> Term:
    match t:
        case Bound(i):
            return repl if i == k else t
        case Var():
            return t
        case Lam(ty, body, hint):
            b2 = _tm_open_tm(body, k + 1, repl)
            return t if b2 is body else Lam(ty, b2, hint)
        case App(f, a):
            f2, a2 = _tm_open_tm(f, k, repl), _tm_open_tm(a, k, repl)
            return t if f2 is f and a2 is a else App(f2, a2)
        case TLam(body, hint):
            b2 = _tm_open_tm(body, k, repl)
            return t if b2 is body else TLam(b2, hint)
        case TApp(f, ty):
            f2 = _tm_open_tm(f, k, repl)
            return t if f2 is f else TApp(f2, ty)
    raise TypeError(f"not a term: {t!r}")


def _tm_close_tm(t: Term, k: int, name: str) -> Term:
    match t:
        case Var(n):
            return Bound(k) if n == name else t
        case Bound():
            return t
        case Lam(ty, body, hint):
            b2 = _tm_close_tm(body, k + 1, name)
            return t if b2 is body else Lam(ty, b2, hint)
        case App(f, a):
            f2, a2 = _tm_close_tm(f, k, name), _tm_close_tm(a, k, name)
            return t if f2 is f and a2 is a else App(f2, a2)
        case TLam(body, hint):
            b2 = _tm_close_tm(body, k, name)
            return t if b2 is body else TLam(b2, hint)
        case TApp(f, ty):
            f2 = _tm_close_tm(f, k, name)
            return t if f2 is f else TApp(f2, ty)
    raise TypeError(f"not a term: {t!r}")


def _tm_open_ty(t: Term, k: int, repl: Type) -> Term:
    match t:
        case Var() | Bound():
            return t
        case Lam(ty, body, hint):
            ty2 = _ty_open(ty, k, repl)
            b2 = _tm_open_ty(body, k, repl)
            return t if ty2 is ty and b2 is body else Lam(ty2, b2, hint)
        case App(f, a):
            f2, a2 = _tm_open_ty(f, k, repl), _tm_open_ty(a, k, repl)
            return t if f2 is f and a2 is a else App(f2, a2)
        case TLam(body, hint):
            b2 = _tm_open_ty(body, k + 1, repl)
            return t if b2 is body else TLam(b2, hint)
        case TApp(f, ty):
            f2, ty2 = _tm_open_ty(f, k, repl), _ty_open(ty, k, repl)
            return t if f2 is f and ty2 is ty else TApp(f2, ty2)
    raise TypeError(f"not a term: {t!r}")


def _tm_close_ty(t: Term, k: int, name: str) -> Term:
    match t:
        case Var() | Bound():
            return t
        case Lam(ty, body, hint):
            ty2 = _ty_close(ty, k, name)
            b2 = _tm_close_ty(body, k, name)
            return t if ty2 is ty and b2 is body else Lam(ty2, b2, hint)
        case App(f, a):
            f2, a2 = _tm_close_ty(f, k, name), _tm_close_ty(a, k, name)
            return t if f2 is f and a2 is a else App(f2, a2)
        case TLam(body, hint):
            b2 = _tm_close_ty(body, k + 1, name)
            return t if b2 is body else TLam(b2, hint)
        case TApp(f, ty):
            f2, ty2 = _tm_close_ty(f, k, name), _ty_close(ty, k, name)
            return t if f2 is f and ty2 is ty else TApp(f2, ty2)
    raise TypeError(f"not a term: {t!r}")


def lam(name: str, ty: Type, body: Term) -> Lam:
    return Lam(ty, _tm_close_tm(body, 0, name), hint=name)


def lam_open(t: Lam, name: str) -> Term:
    return _tm_open_tm(t.body, 0, Var(name))


def tylam(name: str, body: Term) -> TLam:
    return TLam(_tm_close_ty(body, 0, name), hint=name)


def tylam_open(t: TLam, name: str) -> Term:
    return _tm_open_ty(t.body, 0, TVar(name))


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def tapp(fn: Term, ty: Type) -> Term:
    return TApp(fn, ty)


def fv_term(t: Term) -> frozenset[str]:
    match t:
        case Var(n):
            return frozenset((n,))
        case Bound():
            return frozenset()
        case Lam(_, body, _) | TLam(body, _):
            return fv_term(body)
        case App(f, a):
            return fv_term(f) | fv_term(a)
        case TApp(f, _):
            return fv_term(f)
    raise TypeError(f"not a term: {t!r}")


def ftv_term(t: Term) -> frozenset[str]:
    match t:
        case Var() | Bound():
            return frozenset()
        case Lam(ty, body, _):
            return ftv_type(ty) | ftv_term(body)
        case App(f, a):
            return ftv_term(f) | ftv_term(a)
        case TLam(body, _):
            return ftv_term(body)
        case TApp(f, ty):
            return ftv_term(f) | ftv_type(ty)
    raise TypeError(f"not a term: {t!r}")


def subst_term_in_term_many(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Simultaneously replace free variables by locally closed terms."""
    if not mapping:
        return t
    match t:
        case Var(n):
            return mapping.get(n, t)
        case Bound():
            return t
        case Lam(ty, body, hint):
            return Lam(ty, subst_term_in_term_many(body, mapping), hint)
        case App(f, a):
            return App(subst_term_in_term_many(f, mapping), subst_term_in_term_many(a, mapping))
        case TLam(body, hint):
            return TLam(subst_term_in_term_many(body, mapping), hint)
        case TApp(f, ty):
            return TApp(subst_term_in_term_many(f, mapping), ty)
    raise TypeError(f"not a term: {t!r}")


def subst_term_in_term(t: Term, name: str, value: Term) -> Term:
    return subst_term_in_term_many(t, {name: value})


def subst_type_in_term(t: Term, name: str, value: Type) -> Term:
    match t:
        case Var() | Bound():
            return t
        case Lam(ty, body, hint):
            return Lam(subst_type_in_type(ty, name, value), subst_type_in_term(body, name, value), hint)
        case App(f, a):
            return App(subst_type_in_term(f, name, value), subst_type_in_term(a, name, value))
        case TLam(body, hint):
            return TLam(subst_type_in_term(body, name, value), hint)
        case TApp(f, ty):
            return TApp(subst_type_in_term(f, name, value), subst_type_in_type(ty, name, value))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Beta reduction

def contract_redex(t: Term) -> Term | None:
    """Contract ``t`` if it is a beta redex at the root, else return None.

    Both argument positions must be locally closed for the contraction to
    be capture-safe; callers that work under binders open them first.
    """
    match t:
        case App(Lam(_, body, _), arg):
            return _tm_open_tm(body, 0, arg)
        case TApp(TLam(body, _), ty):
            return _tm_open_ty(body, 0, ty)
    return None


def _whnf(t: Term, fuel: Fuel) -> Term:
    while True:
        match t:
            case App(f, a):
                f2 = _whnf(f, fuel)
                if isinstance(f2, Lam):
                    fuel.spend()
                    t = _tm_open_tm(f2.body, 0, a)
                else:
                    return t if f2 is f else App(f2, a)
            case TApp(f, ty):
                f2 = _whnf(f, fuel)
                if isinstance(f2, TLam):
                    fuel.spend()
                    t = _tm_open_ty(f2.body, 0, ty)
                else:
                    return t if f2 is f else TApp(f2, ty)
            case _:
                return t


def _norm(t: Term, fuel: Fuel) -> Term:
    t = _whnf(t, fuel)
    match t:
        case Var() | Bound():
            return t
        case Lam(ty, _, hint):
            x = gensym(hint or "x")
            nb = _norm(_tm_open_tm(t.body, 0, Var(x)), fuel)
            return Lam(ty, _tm_close_tm(nb, 0, x), hint)
        case TLam(_, hint):
            a = gensym(hint or "a")
            nb = _norm(_tm_open_ty(t.body, 0, TVar(a)), fuel)
            return TLam(_tm_close_ty(nb, 0, a), hint)
        case App(f, a):
            return App(_norm(f, fuel), _norm(a, fuel))
        case TApp(f, ty):
            return TApp(_norm(f, fuel), ty)
    raise TypeError(f"not a term: {t!r}")


def beta_normalize(t: Term, fuel: int | Fuel = DEFAULT_FUEL) -> Term:
    """Normal-order beta normal form of a locally closed term."""
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    return _norm(t, cell)


def terms_equal(t1: Term, t2: Term, fuel: int | Fuel = DEFAULT_FUEL) -> bool:
    """Alpha-beta equality of locally closed terms."""
    if t1 == t2:
        return True
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    return _norm(t1, cell) == _norm(t2, cell)


# ---------------------------------------------------------------------------
# Formulas

PredHead = Union[str, int]  # free predicate name, or bound predicate index


@dataclass(frozen=True, slots=True)
class Atom:
    head: PredHead
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Lolli:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Bang:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class ForallPred:
    """Second-order quantifier over a predicate of the given argument types."""

    arity: tuple[Type, ...]
    body: "Formula"
    hint: str = field(default="X", compare=False)


@dataclass(frozen=True, slots=True)
class ForallTerm:
    ty: Type
    body: "Formula"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class ForallType:
    body: "Formula"
    hint: str = field(default="a", compare=False)


Formula = Union[Atom, Lolli, Bang, ForallPred, ForallTerm, ForallType]


def _f_open_tm(f: Formula, k: int, repl: Term) -> Formula:
    match f:
        case Atom(head, args):
            args2 = tuple(_tm_open_tm(a, k, repl) for a in args)
            return f if args2 == args else Atom(head, args2)
        case Lolli(a, b):
            return Lolli(_f_open_tm(a, k, repl), _f_open_tm(b, k, repl))
        case Bang(body):
            return Bang(_f_open_tm(body, k, repl))
        case ForallPred(ar, body, hint):
            return ForallPred(ar, _f_open_tm(body, k, repl), hint)
        case ForallTerm(ty, body, hint):
            return ForallTerm(ty, _f_open_tm(body, k + 1, repl), hint)
        case ForallType(body, hint):
            return ForallType(_f_open_tm(body, k, repl), hint)
    raise TypeError(f"not a formula: {f!r}")


def _f_close_tm(f: Formula, k: int, name: str) -> Formula:
    match f:
        case Atom(head, args):
            args2 = tuple(_tm_close_tm(a, k, name) for a in args)
            return f if args2 == args else Atom(head, args2)
        case Lolli(a, b):
            return Lolli(_f_close_tm(a, k, name), _f_close_tm(b, k, name))
        case Bang(body):
            return Bang(_f_close_tm(body, k, name))
        case ForallPred(ar, body, hint):
            return ForallPred(ar, _f_close_tm(body, k, name), hint)
        case ForallTerm(ty, body, hint):
            return ForallTerm(ty, _f_close_tm(body, k + 1, name), hint)
        case ForallType(body, hint):
            return ForallType(_f_close_tm(body, k, name), hint)
    raise TypeError(f"not a formula: {f!r}")


def _f_open_ty(f: Formula, k: int, repl: Type) -> Formula:
    match f:
        case Atom(head, args):
            args2 = tuple(_tm_open_ty(a, k, repl) for a in args)
            return f if args2 == args else Atom(head, args2)
        case Lolli(a, b):
            return Lolli(_f_open_ty(a, k, repl), _f_open_ty(b, k, repl))
        case Bang(body):
            return Bang(_f_open_ty(body, k, repl))
        case ForallPred(ar, body, hint):
            ar2 = tuple(_ty_open(t, k, repl) for t in ar)
            return ForallPred(ar2, _f_open_ty(body, k, repl), hint)
        case ForallTerm(ty, body, hint):
            return ForallTerm(_ty_open(ty, k, repl), _f_open_ty(body, k, repl), hint)
        case ForallType(body, hint):
            return ForallType(_f_open_ty(body, k + 1, repl), hint)
    raise TypeError(f"not a formula: {f!r}")


def _f_close_ty(f: Formula, k: int, name: str) -> Formula:
    match f:
        case Atom(head, args):
            args2 = tuple(_tm_close_ty(a, k, name) for a in args)
            return f if args2 == args else Atom(head, args2)
        case Lolli(a, b):
            return Lolli(_f_close_ty(a, k, name), _f_close_ty(b, k, name))
        case Bang(body):
            return Bang(_f_close_ty(body, k, name))
        case ForallPred(ar, body, hint):
            ar2 = tuple(_ty_close(t, k, name) for t in ar)
            return ForallPred(ar2, _f_close_ty(body, k, name), hint)
        case ForallTerm(ty, body, hint):
            return ForallTerm(_ty_close(ty, k, name), _f_close_ty(body, k, name), hint)
        case ForallType(body, hint):
            return ForallType(_f_close_ty(body, k + 1, name), hint)
    raise TypeError(f"not a formula: {f!r}")


def _f_open_pred(f: Formula, k: int, name: str) -> Formula:
    match f:
        case Atom(head, args):
            return Atom(name, args) if head == k and isinstance(head, int) else f
        case Lolli(a, b):
            return Lolli(_f_open_pred(a, k, name), _f_open_pred(b, k, name))
        case Bang(body):
            return Bang(_f_open_pred(body, k, name))
        case ForallPred(ar, body, hint):
            return ForallPred(ar, _f_open_pred(body, k + 1, name), hint)
        case ForallTerm(ty, body, hint):
            return ForallTerm(ty, _f_open_pred(body, k, name), hint)
        case ForallType(body, hint):
            return ForallType(_f_open_pred(body, k, name), hint)
    raise TypeError(f"not a formula: {f!r}")


def _f_close_pred(f: Formula, k: int, name: str) -> Formula:
    match f:
        case Atom(head, args):
            return Atom(k, args) if head == name else f
        case Lolli(a, b):
            return Lolli(_f_close_pred(a, k, name), _f_close_pred(b, k, name))
        case Bang(body):
            return Bang(_f_close_pred(body, k, name))
        case ForallPred(ar, body, hint):
            return ForallPred(ar, _f_close_pred(body, k + 1, name), hint)
        case ForallTerm(ty, body, hint):
            return ForallTerm(ty, _f_close_pred(body, k, name), hint)
        case ForallType(body, hint):
            return ForallType(_f_close_pred(body, k, name), hint)
    raise TypeError(f"not a formula: {f!r}")


def all_pred(name: str, arity: Iterable[Type], body: Formula) -> ForallPred:
    return ForallPred(tuple(arity), _f_close_pred(body, 0, name), hint=name)


def all_pred_open(f: ForallPred, name: str) -> Formula:
    return _f_open_pred(f.body, 0, name)


def all_term(name: str, ty: Type, body: Formula) -> ForallTerm:
    return ForallTerm(ty, _f_close_tm(body, 0, name), hint=name)


def all_term_open(f: ForallTerm, name: str) -> Formula:
    return _f_open_tm(f.body, 0, Var(name))


def all_term_inst(f: ForallTerm, value: Term) -> Formula:
    return _f_open_tm(f.body, 0, value)


def all_ty(name: str, body: Formula) -> ForallType:
    return ForallType(_f_close_ty(body, 0, name), hint=name)


def all_ty_open(f: ForallType, name: str) -> Formula:
    return _f_open_ty(f.body, 0, TVar(name))


def all_ty_inst(f: ForallType, value: Type) -> Formula:
    return _f_open_ty(f.body, 0, value)


def fv_formula(f: Formula) -> frozenset[str]:
    """Free term variables (atom arguments only can contain them)."""
    match f:
        case Atom(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= fv_term(a)
            return out
        case Lolli(a, b):
            return fv_formula(a) | fv_formula(b)
        case Bang(body) | ForallPred(_, body, _) | ForallTerm(_, body, _) | ForallType(body, _):
            return fv_formula(body)
    raise TypeError(f"not a formula: {f!r}")


def ftv_formula(f: Formula) -> frozenset[str]:
    match f:
        case Atom(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= ftv_term(a)
            return out
        case Lolli(a, b):
            return ftv_formula(a) | ftv_formula(b)
        case Bang(body):
            return ftv_formula(body)
        case ForallPred(ar, body, _):
            out = ftv_formula(body)
            for t in ar:
                out |= ftv_type(t)
            return out
        case ForallTerm(ty, body, _):
            return ftv_type(ty) | ftv_formula(body)
        case ForallType(body, _):
            return ftv_formula(body)
    raise TypeError(f"not a formula: {f!r}")


def fpv_formula(f: Formula) -> frozenset[str]:
    """Free predicate names."""
    match f:
        case Atom(head, _):
            return frozenset((head,)) if isinstance(head, str) else frozenset()
        case Lolli(a, b):
            return fpv_formula(a) | fpv_formula(b)
        case Bang(body) | ForallPred(_, body, _) | ForallTerm(_, body, _) | ForallType(body, _):
            return fpv_formula(body)
    raise TypeError(f"not a formula: {f!r}")


def subst_term_in_formula_many(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    if not mapping:
        return f
    match f:
        case Atom(head, args):
            return Atom(head, tuple(subst_term_in_term_many(a, mapping) for a in args))
        case Lolli(a, b):
            return Lolli(subst_term_in_formula_many(a, mapping), subst_term_in_formula_many(b, mapping))
        case Bang(body):
            return Bang(subst_term_in_formula_many(body, mapping))
        case ForallPred(ar, body, hint):
            return ForallPred(ar, subst_term_in_formula_many(body, mapping), hint)
        case ForallTerm(ty, body, hint):
            return ForallTerm(ty, subst_term_in_formula_many(body, mapping), hint)
        case ForallType(body, hint):
            return ForallType(subst_term_in_formula_many(body, mapping), hint)
    raise TypeError(f"not a formula: {f!r}")


def subst_term_in_formula(f: Formula, name: str, value: Term) -> Formula:
    return subst_term_in_formula_many(f, {name: value})


def subst_type_in_formula(f: Formula, name: str, value: Type) -> Formula:
    match f:
        case Atom(head, args):
            return Atom(head, tuple(subst_type_in_term(a, name, value) for a in args))
        case Lolli(a, b):
            return Lolli(subst_type_in_formula(a, name, value), subst_type_in_formula(b, name, value))
        case Bang(body):
            return Bang(subst_type_in_formula(body, name, value))
        case ForallPred(ar, body, hint):
            ar2 = tuple(subst_type_in_type(t, name, value) for t in ar)
            return ForallPred(ar2, subst_type_in_formula(body, name, value), hint)
        case ForallTerm(ty, body, hint):
            return ForallTerm(subst_type_in_type(ty, name, value), subst_type_in_formula(body, name, value), hint)
        case ForallType(body, hint):
            return ForallType(subst_type_in_formula(body, name, value), hint)
    raise TypeError(f"not a formula: {f!r}")


def _map_atoms(f: Formula, target: str, fn: Callable[[tuple[Term, ...]], Formula]) -> Formula:
    """Replace every atom headed by free predicate ``target``.

    Binders are opened with fresh names on the way down and closed again
    on the way up, so ``fn`` always receives locally closed arguments and
    may return any locally closed formula without capture.
    """
    match f:
        case Atom(head, args):
            return fn(args) if head == target else f
        case Lolli(a, b):
            return Lolli(_map_atoms(a, target, fn), _map_atoms(b, target, fn))
        case Bang(body):
            return Bang(_map_atoms(body, target, fn))
        case ForallPred(ar, _, hint):
            y = gensym(hint or "X")
            inner = _map_atoms(_f_open_pred(f.body, 0, y), target, fn)
            return ForallPred(ar, _f_close_pred(inner, 0, y), hint)
        case ForallTerm(ty, _, hint):
            x = gensym(hint or "x")
            inner = _map_atoms(_f_open_tm(f.body, 0, Var(x)), target, fn)
            return ForallTerm(ty, _f_close_tm(inner, 0, x), hint)
        case ForallType(_, hint):
            a = gensym(hint or "a")
            inner = _map_atoms(_f_open_ty(f.body, 0, TVar(a)), target, fn)
            return ForallType(_f_close_ty(inner, 0, a), hint)
    raise TypeError(f"not a formula: {f!r}")


def subst_pred_in_formula(f: Formula, name: str, params: tuple[str, ...], body: Formula) -> Formula:
    """Replace atoms ``name(t1, .., tn)`` by ``body`` with params bound to the arguments."""

    def plug(args: tuple[Term, ...]) -> Formula:
        if len(args) != len(params):
            raise ArityMismatch(
                f"predicate {name} applied to {len(args)} arguments, abstraction takes {len(params)}"
            )
        return subst_term_in_formula_many(body, dict(zip(params, args)))

    return _map_atoms(f, name, plug)


def all_pred_inst(f: ForallPred, params: tuple[str, ...], body: Formula) -> Formula:
    """Instantiate a second-order quantifier with the abstraction (params, body)."""
    if len(params) != len(f.arity):
        raise ArityMismatch(
            f"quantifier expects a {len(f.arity)}-ary predicate, abstraction takes {len(params)}"
        )
    fresh = gensym(f.hint or "X")
    opened = _f_open_pred(f.body, 0, fresh)
    return subst_pred_in_formula(opened, fresh, params, body)


def formula_beta_normalize(f: Formula, fuel: int | Fuel = DEFAULT_FUEL) -> Formula:
    """Normalize every atom argument; the formula skeleton is untouched."""
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)

    def walk(g: Formula) -> Formula:
        match g:
            case Atom(head, args):
                return Atom(head, tuple(_norm(a, cell) for a in args))
            case Lolli(a, b):
                return Lolli(walk(a), walk(b))
            case Bang(body):
                return Bang(walk(body))
            case ForallPred(ar, _, hint):
                y = gensym(hint or "X")
                inner = walk(_f_open_pred(g.body, 0, y))
                return ForallPred(ar, _f_close_pred(inner, 0, y), hint)
            case ForallTerm(ty, _, hint):
                x = gensym(hint or "x")
                inner = walk(_f_open_tm(g.body, 0, Var(x)))
                return ForallTerm(ty, _f_close_tm(inner, 0, x), hint)
            case ForallType(_, hint):
                a = gensym(hint or "a")
                inner = walk(_f_open_ty(g.body, 0, TVar(a)))
                return ForallType(_f_close_ty(inner, 0, a), hint)
        raise TypeError(f"not a formula: {g!r}")

    return walk(f)


def formulas_equal(f1: Formula, f2: Formula, fuel: int | Fuel = DEFAULT_FUEL) -> bool:
    """Alpha equality up to beta conversion of atom arguments."""
    if f1 == f2:
        return True
    cell = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    return formula_beta_normalize(f1, cell) == formula_beta_normalize(f2, cell)


# ---------------------------------------------------------------------------
# Printing
#
# The show_* functions produce the concrete syntax the script parser reads
# back; see script.py for the grammar.


def _pick(hint: str, avoid: frozenset[str], base: str) -> str:
    name = hint or base
    name = name.split("%")[0] or base
    while name in avoid:
        name += "'"
    return name


def show_type(ty: Type) -> str:
    match ty:
        case TVar(n):
            return n
        case TBound(i):
            return f"#{i}"
        case TArrow(a, b):
            left = show_type(a)
            if isinstance(a, (TArrow, TForall)):
                left = f"({left})"
            return f"{left} -> {show_type(b)}"
        case TForall(body, hint):
            n = _pick(hint, ftv_type(body), "a")
            return f"forall {n}. {show_type(_ty_open(body, 0, TVar(n)))}"
    raise TypeError(f"not a type: {ty!r}")


def _show_term_atom(t: Term) -> str:
    s = show_term(t)
    if isinstance(t, (Var, Bound)):
        return s
    return f"({s})"


def show_term(t: Term) -> str:
    match t:
        case Var(n):
            return n
        case Bound(i):
            return f"#{i}"
        case Lam(ty, body, hint):
            avoid = fv_term(body)
            n = _pick(hint, avoid, "x")
            return f"\\({n} : {show_type(ty)}) {show_term(_tm_open_tm(body, 0, Var(n)))}"
        case TLam(body, hint):
            n = _pick(hint, ftv_term(body), "a")
            return f"/\\({n}) {show_term(_tm_open_ty(body, 0, TVar(n)))}"
        case App(f, a):
            head = show_term(f)
            if isinstance(f, (Lam, TLam)):
                head = f"({head})"
            return f"{head} {_show_term_atom(a)}"
        case TApp(f, ty):
            head = show_term(f)
            if isinstance(f, (Lam, TLam)):
                head = f"({head})"
            return f"{head} [{show_type(ty)}]"
    raise TypeError(f"not a term: {t!r}")


def _show_formula_atom(f: Formula) -> str:
    s = show_formula(f)
    if isinstance(f, (Atom, Bang)):
        return s
    return f"({s})"


def show_formula(f: Formula) -> str:
    match f:
        case Atom(head, args):
            h = head if isinstance(head, str) else f"#{head}"
            if not args:
                return h
            return f"{h}({', '.join(show_term(a) for a in args)})"
        case Lolli(a, b):
            return f"{_show_formula_atom(a)} -o {show_formula(b)}"
        case Bang(body):
            return f"!{_show_formula_atom(body)}"
        case ForallPred(ar, body, hint):
            n = _pick(hint, fpv_formula(body), "X")
            tys = ", ".join(show_type(t) for t in ar)
            return f"All {n} : [{tys}] . {show_formula(_f_open_pred(body, 0, n))}"
        case ForallTerm(ty, body, hint):
            n = _pick(hint, fv_formula(body), "x")
            return f"all {n} : {show_type(ty)} . {show_formula(_f_open_tm(body, 0, Var(n)))}"
        case ForallType(body, hint):
            n = _pick(hint, ftv_formula(body), "a")
            return f"alltype {n} . {show_formula(_f_open_ty(body, 0, TVar(n)))}"
    raise TypeError(f"not a formula: {f!r}")
