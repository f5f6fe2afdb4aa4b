"""The arithmetic theory and the small zoo of derived formulas.

This module fixes the object of study: a first-order signature of
arithmetic operations over the Church numeral type, the equations that
define them by recursion, and the formula-level constructions everything
downstream leans on (the numeral predicate, Leibniz equality, tensor
pairs).
"""

from __future__ import annotations

from .syntax import (
    App,
    Atom,
    Bang,
    Formula,
    Lolli,
    TApp,
    TArrow,
    TVar,
    Term,
    Type,
    Var,
    all_pred,
    all_term,
    fpv_formula,
    gensym,
    lam,
    ty_all,
    tylam,
)
from .wellformed import Equation, Signature, Theory


def _arrow(*tys: Type) -> Type:
    out = tys[-1]
    for ty in reversed(tys[:-1]):
        out = TArrow(ty, out)
    return out


_a = TVar("a")

nat: Type = ty_all("a", _arrow(_arrow(_a, _a), _a, _a))
unit: Type = ty_all("a", _arrow(_a, _a))


def church(n: int) -> Term:
    """The typed Church numeral for ``n``."""
    if n < 0:
        raise ValueError("no negative numerals")
    body: Term = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return tylam("a", lam("f", _arrow(_a, _a), lam("x", _a, body)))


def numeral(n: int) -> Term:
    """The first-order numeral ``s (s (... 0))``."""
    if n < 0:
        raise ValueError("no negative numerals")
    out: Term = Var("0")
    for _ in range(n):
        out = App(Var("s"), out)
    return out


signature = Signature(
    {
        "0": nat,
        "s": _arrow(nat, nat),
        "pred": _arrow(nat, nat),
        "mult": _arrow(nat, nat, nat),
        "minus": _arrow(nat, nat, nat),
        "plus": _arrow(nat, nat, nat),
        "sum": _arrow(_arrow(nat, nat), nat, nat),
        "prod": _arrow(_arrow(nat, nat), nat, nat),
    }
)

_x, _y, _f = Var("x"), Var("y"), Var("f")
_nn = _arrow(nat, nat)


def _op(name: str, *args: Term) -> Term:
    out: Term = Var(name)
    for a in args:
        out = App(out, a)
    return out


def _sx(t: Term) -> Term:
    return App(Var("s"), t)


_succ_rhs = tylam(
    "a",
    lam(
        "f",
        _arrow(_a, _a),
        lam("x", _a, App(App(TApp(Var("n"), _a), Var("f")), App(Var("f"), Var("x")))),
    ),
)

equations: tuple[Equation, ...] = (
    Equation("zero_def", (), Var("0"), church(0), nat),
    Equation("succ_def", (("n", nat),), _sx(Var("n")), _succ_rhs, nat),
    Equation("plus_succ", (("x", nat), ("y", nat)), _op("plus", _x, _sx(_y)), _sx(_op("plus", _x, _y)), nat),
    Equation("plus_zero", (("x", nat),), _op("plus", _x, Var("0")), _x, nat),
    Equation("mult_succ", (("x", nat), ("y", nat)), _op("mult", _x, _sx(_y)), _op("plus", _x, _op("mult", _x, _y)), nat),
    Equation("mult_zero", (("x", nat),), _op("mult", _x, Var("0")), Var("0"), nat),
    Equation("pred_succ", (("x", nat),), _op("pred", _sx(_x)), _x, nat),
    Equation("pred_zero", (), _op("pred", Var("0")), Var("0"), nat),
    Equation("minus_succ", (("x", nat), ("y", nat)), _op("minus", _x, _sx(_y)), _op("pred", _op("minus", _x, _y)), nat),
    Equation("minus_zero", (("x", nat),), _op("minus", _x, Var("0")), _x, nat),
    Equation("sum_succ", (("x", nat), ("f", _nn)), _op("sum", _f, _sx(_x)), _op("plus", _op("sum", _f, _x), App(_f, _x)), nat),
    Equation("sum_zero", (("f", _nn),), _op("sum", _f, Var("0")), Var("0"), nat),
    Equation("prod_succ", (("x", nat), ("f", _nn)), _op("prod", _f, _sx(_x)), _op("mult", _op("prod", _f, _x), App(_f, _x)), nat),
    Equation("prod_zero", (("f", _nn),), _op("prod", _f, Var("0")), _sx(Var("0")), nat),
)

theory = Theory(signature, equations)

# The two defining equations turn numerals into raw lambda terms; the
# oriented normalizer only ever uses the recursive ones.
recursion_equations: tuple[str, ...] = tuple(eq.name for eq in equations[2:])


def _fresh_pred(base: str, *fs: Formula) -> str:
    taken: frozenset[str] = frozenset()
    for f in fs:
        taken |= fpv_formula(f)
    return base if base not in taken else gensym(base)


def nat_formula(x: Term) -> Formula:
    """The numeral predicate: iteration is available for ``x``."""
    step = all_term(
        "y",
        nat,
        Lolli(Atom("X", (Var("y"),)), Atom("X", (_sx(Var("y")),))),
    )
    base_to_x = Lolli(Atom("X", (Var("0"),)), Atom("X", (x,)))
    return all_pred("X", (nat,), Lolli(Bang(step), Bang(base_to_x)))


def equality_formula(t1: Term, t2: Term, ty: Type) -> Formula:
    """Leibniz equality at ``ty``: whatever holds of t1 holds of t2."""
    return all_pred("X", (ty,), Lolli(Atom("X", (t1,)), Atom("X", (t2,))))


def tensor(p: Formula, q: Formula) -> Formula:
    """The multiplicative pair, encoded with a fresh nullary predicate."""
    z = _fresh_pred("Z", p, q)
    return all_pred(z, (), Lolli(Lolli(p, Lolli(q, Atom(z))), Atom(z)))


def bangs(n: int, f: Formula) -> Formula:
    for _ in range(n):
        f = Bang(f)
    return f
