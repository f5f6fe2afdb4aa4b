"""Proof scripts for the arithmetic library.

Each public ``proof_*`` function builds a closed script for a totality
statement over the arithmetic signature; the scheme combinators
(``compose_scheme``, ``bounded_sum``, ``bounded_product``,
``normalize_totality``) assemble new totality proofs out of old ones.
Checking any of these against :data:`ellkit.library.theory` yields a
program together with its typing certificate.

The exponential decorations are part of each statement and are chosen
by the constructions, not by fiat:

==============  =========================================================
proof_zero      ``N 0``
proof_succ      ``forall y, N y -o N (s y)``
proof_identity  ``forall x, N x -o N x``
proof_coercion  ``forall x, N x -o !N x``
proof_plus      ``forall x y, N x -o N y -o N (plus x y)``
proof_mult2     ``forall a b, !N a -o N b -o !N (mult a b)``
proof_mult      ``forall x y, N x -o N y -o !N (mult x y)``
proof_pred      ``forall x, N x -o !!N (pred x)``
compose_scheme  output bang ``s + k + 1`` over normal-form inputs
bounded_sum     ``forall n, N n -o !^(k+2) N (sum F n)``
bounded_product ``forall n, N n -o !^(k+3) N (prod F n)``
==============  =========================================================

There is no ``N x -o N (pred x)``: the predecessor needs the pair trick
(iterate ``c |-> !(N c (x) N (pred c))``), and reading the result back
out of the iteration costs the two exponentials.  ``proof_minus``
returns the natural candidate script for truncated subtraction; it does
not check, and its docstring explains why no decoration works.
"""

from __future__ import annotations

from functools import cache

from .errors import ArityMismatch, ShapeMismatch
from .kernel import (
    Abstraction,
    AllPredElim,
    AllPredIntro,
    AllTermElim,
    AllTermIntro,
    Application,
    Axiom,
    CheckedProof,
    Contraction,
    Equality,
    Promotion,
    ProofScript,
    Weakening,
    check_proof,
    refresh_script,
)
from .library import bangs, nat, nat_formula, tensor, theory
from .rewrite import AxiomStep
from .syntax import (
    App,
    Atom,
    Bang,
    ForallPred,
    ForallTerm,
    Formula,
    Lolli,
    Term,
    Type,
    Var,
    all_term,
    all_term_inst,
    formulas_equal,
    fpv_formula,
    lam,
    show_formula,
    subst_term_in_term,
)
from .wellformed import Theory

# ---------------------------------------------------------------------------
# Script-building helpers


def op(name: str, *args: Term) -> Term:
    out: Term = Var(name)
    for a in args:
        out = App(out, a)
    return out


def _nf(t: Term) -> Formula:
    return nat_formula(t)


def _cast(
    premise: ProofScript,
    equation: str,
    assignment: dict[str, Term],
    *,
    under: int = 0,
    direction: str = "backward",
) -> Equality:
    """Rewrite the ``N``-shaped goal through one equation instance.

    The hole is ``!^under N _``; ``backward`` turns a proof of the
    right-hand instance into one of the left-hand instance.
    """
    eq = theory.equation(equation)
    sub = dict(assignment)
    lhs = subst_many(eq.lhs, sub)
    rhs = subst_many(eq.rhs, sub)
    return Equality(
        premise,
        "q0",
        bangs(under, _nf(Var("q0"))),
        lhs,
        rhs,
        nat,
        direction,
        (AxiomStep(equation, tuple(sorted(assignment.items()))),),
    )


def subst_many(t: Term, sub: dict[str, Term]) -> Term:
    for name, val in sub.items():
        t = subst_term_in_term(t, name, val)
    return t


def make_pair(
    left: ProofScript, right: ProofScript, left_f: Formula, right_f: Formula
) -> ProofScript:
    """Introduce the multiplicative pair of two proofs."""
    taken = fpv_formula(left_f) | fpv_formula(right_f)
    zname = "Z"
    n = 0
    while zname in taken:
        zname = f"Z{n}"
        n += 1
    hyp = Lolli(left_f, Lolli(right_f, Atom(zname)))
    body = Application(Application(Axiom("pp", hyp), left), right)
    return AllPredIntro(Abstraction(body, "pp"), zname, ())


def from_pair(pair: ProofScript, target: Formula, consumer: ProofScript) -> ProofScript:
    """Eliminate a pair into ``target`` through a two-argument consumer."""
    return Application(AllPredElim(pair, (), target), consumer)


def _promote_closed(script: ProofScript, n: int) -> ProofScript:
    for _ in range(n):
        script = Promotion((), script)
    return script


def _apply_pair_under(
    depth: int,
    f1: Formula,
    f2: Formula,
    arg1: ProofScript,
    arg2: ProofScript,
    core,
    tag: str = "ap",
) -> ProofScript:
    """Apply a binary rule under ``depth`` matching exponentials.

    ``core(s1, s2)`` must consume proofs of the fully unbanged formulas;
    each level peels one bang off both arguments through a promotion.
    """
    if depth == 0:
        return core(arg1, arg2)
    assert isinstance(f1, Bang) and isinstance(f2, Bang)
    l1, l2 = f"{tag}l{depth}", f"{tag}r{depth}"
    inner = _apply_pair_under(
        depth - 1, f1.body, f2.body, Axiom(l1, f1.body), Axiom(l2, f2.body), core, tag
    )
    return Promotion(((l1, arg1), (l2, arg2)), inner)


def _lift_nat(script: ProofScript, t: Term, have: int) -> ProofScript:
    """One coercion: a proof of ``!^have N t`` becomes one of ``!^(have+1) N t``."""
    if have == 0:
        return Application(AllTermElim(refresh_script(proof_coercion()), t), script)
    lbl = f"cl{have}"
    return Promotion(((lbl, script),), _lift_nat(Axiom(lbl, bangs(have - 1, _nf(t))), t, have - 1))


def _coerce_to(script: ProofScript, t: Term, have: int, want: int) -> ProofScript:
    if have > want:
        raise ShapeMismatch(f"cannot drop exponentials ({have} -> {want})")
    for m in range(have, want):
        script = _lift_nat(script, t, m)
    return script


# ---------------------------------------------------------------------------
# Base proofs

_STEP_X = all_term("y1", nat, Lolli(Atom("X", (Var("y1"),)), Atom("X", (op("s", Var("y1")),))))


@cache
def proof_zero() -> ProofScript:
    """``N 0``: with iteration available, the base case alone reaches 0."""
    box = Promotion((), Abstraction(Axiom("z", Atom("X", (Var("0"),))), "z"))
    return AllPredIntro(Abstraction(Weakening(box, "h", Bang(_STEP_X)), "h"), "X", (nat,))


@cache
def proof_succ() -> ProofScript:
    """``forall y, N y -o N (s y)``: run the iteration, then step once more."""
    y = Var("y")
    base_to_y = Lolli(Atom("X", (Var("0"),)), Atom("X", (y,)))
    b = Application(
        AllPredElim(Axiom("n", _nf(y)), ("c",), Atom("X", (Var("c"),))),
        Axiom("h", Bang(_STEP_X)),
    )
    inner = Abstraction(
        Application(
            AllTermElim(Axiom("ff", _STEP_X), y),
            Application(Axiom("bb", base_to_y), Axiom("z", Atom("X", (Var("0"),)))),
        ),
        "z",
    )
    box = Promotion((("ff", Axiom("h", Bang(_STEP_X))), ("bb", b)), inner)
    matrix = AllPredIntro(Abstraction(Contraction(box, "h"), "h"), "X", (nat,))
    return AllTermIntro(Abstraction(matrix, "n"), "y", nat)


@cache
def proof_identity() -> ProofScript:
    """``forall x, N x -o N x``."""
    return AllTermIntro(Abstraction(Axiom("n", _nf(Var("x"))), "n"), "x", nat)


@cache
def proof_one() -> ProofScript:
    """``N (s 0)``."""
    return Application(AllTermElim(proof_succ(), Var("0")), proof_zero())


@cache
def proof_const_zero() -> ProofScript:
    """``forall x, N x -o N 0`` (the input is simply never consulted)."""
    return AllTermIntro(Abstraction(Weakening(proof_zero(), "n", _nf(Var("x"))), "n"), "x", nat)


@cache
def proof_const_one() -> ProofScript:
    """``forall x, N x -o N (s 0)``."""
    return AllTermIntro(Abstraction(Weakening(proof_one(), "n", _nf(Var("x"))), "n"), "x", nat)


@cache
def proof_coercion() -> ProofScript:
    """``forall x, N x -o !N x``.

    Instantiate the iteration principle of ``N x`` at the predicate
    ``c |-> N c``: fed the (boxed) successor theorem it yields
    ``!(N 0 -o N x)``, and applying the boxed payload to the zero proof
    lands in ``!N x``.  On numerals the extracted program is the
    identity, rebuilt one successor at a time.
    """
    x = Var("x")
    n_elim = AllPredElim(Axiom("n", _nf(x)), ("c",), _nf(Var("c")))
    b = Application(n_elim, Promotion((), proof_succ()))
    base_to_x = Lolli(_nf(Var("0")), _nf(x))
    use = Promotion(
        (("kk", Axiom("u", Bang(base_to_x))),),
        Application(Axiom("kk", base_to_x), proof_zero()),
    )
    return AllTermIntro(Abstraction(Application(Abstraction(use, "u"), b), "n"), "x", nat)


@cache
def proof_plus() -> ProofScript:
    """``forall x y, N x -o N y -o N (plus x y)``.

    Induction on ``y`` at the predicate ``c |-> X (plus x c)``; the
    step is the shared successor hypothesis pushed through the
    recurrence for ``plus _ (s _)``, the base is rewritten through
    ``plus x 0 = x`` and composed with the iteration of ``x`` itself.
    """
    x, y = Var("x"), Var("y")
    pxc = op("plus", x, Var("c"))
    w_cast = Equality(
        Application(
            AllTermElim(Axiom("h1", _STEP_X), pxc),
            Axiom("w", Atom("X", (pxc,))),
        ),
        "q0",
        Atom("X", (Var("q0"),)),
        op("plus", x, op("s", Var("c"))),
        op("s", pxc),
        nat,
        "backward",
        (AxiomStep("plus_succ", (("x", x), ("y", Var("c")))),),
    )
    shifted = Promotion(
        (("h1", Axiom("h", Bang(_STEP_X))),),
        AllTermIntro(Abstraction(w_cast, "w"), "c", nat),
    )
    bn = Application(AllPredElim(Axiom("n", _nf(y)), ("c",), Atom("X", (pxc,))), shifted)
    bn = Equality(
        bn,
        "q0",
        Bang(Lolli(Atom("X", (Var("q0"),)), Atom("X", (op("plus", x, y),)))),
        op("plus", x, Var("0")),
        x,
        nat,
        "forward",
        (AxiomStep("plus_zero", (("x", x),)),),
    )
    bm = Application(
        AllPredElim(Axiom("m", _nf(x)), ("c",), Atom("X", (Var("c"),))),
        Axiom("h", Bang(_STEP_X)),
    )
    kk_f = Lolli(Atom("X", (x,)), Atom("X", (op("plus", x, y),)))
    zz_f = Lolli(Atom("X", (Var("0"),)), Atom("X", (x,)))
    compose = Promotion(
        (("kk", bn), ("zz", bm)),
        Abstraction(
            Application(
                Axiom("kk", kk_f),
                Application(Axiom("zz", zz_f), Axiom("z", Atom("X", (Var("0"),)))),
            ),
            "z",
        ),
    )
    matrix = AllPredIntro(Abstraction(Contraction(compose, "h"), "h"), "X", (nat,))
    body = Abstraction(Abstraction(matrix, "n"), "m")
    return AllTermIntro(AllTermIntro(body, "y", nat), "x", nat)


@cache
def proof_mult2() -> ProofScript:
    """``forall a b, !N a -o N b -o !N (mult a b)``.

    Induction on ``b`` at ``c |-> N (mult a c)``: every step adds ``a``
    through the addition theorem, so a reusable copy of ``N a`` must sit
    under a bang.  The residual bang on the output is the box that
    iteration is performed in.
    """
    a, b = Var("a"), Var("b")
    mac = op("mult", a, Var("c"))
    plus_inst = AllTermElim(AllTermElim(refresh_script(proof_plus()), a), mac)
    applied = Application(
        Application(plus_inst, Axiom("a1", _nf(a))), Axiom("ih", _nf(mac))
    )
    casted = _cast(applied, "mult_succ", {"x": a, "y": Var("c")})
    step_core = AllTermIntro(Abstraction(casted, "ih"), "c", nat)
    step = Promotion((("a1", Axiom("ma", Bang(_nf(a)))),), step_core)
    n_elim = AllPredElim(Axiom("n", _nf(b)), ("c",), _nf(mac))
    kk = Application(n_elim, step)
    kk = Equality(
        kk,
        "q0",
        Bang(Lolli(_nf(Var("q0")), _nf(op("mult", a, b)))),
        op("mult", a, Var("0")),
        Var("0"),
        nat,
        "forward",
        (AxiomStep("mult_zero", (("x", a),)),),
    )
    final = Promotion(
        (("kk", kk), ("zz", Promotion((), proof_zero()))),
        Application(
            Axiom("kk", Lolli(_nf(Var("0")), _nf(op("mult", a, b)))),
            Axiom("zz", _nf(Var("0"))),
        ),
    )
    body = Abstraction(Abstraction(final, "n"), "ma")
    return AllTermIntro(AllTermIntro(body, "b", nat), "a", nat)


@cache
def proof_mult() -> ProofScript:
    """``forall x y, N x -o N y -o !N (mult x y)``: the reusable-first-
    argument form with a coercion in front."""
    x, y = Var("x"), Var("y")
    m2 = AllTermElim(AllTermElim(refresh_script(proof_mult2()), x), y)
    coerced = Application(AllTermElim(refresh_script(proof_coercion()), x), Axiom("m", _nf(x)))
    body = Application(Application(m2, coerced), Axiom("n", _nf(y)))
    return AllTermIntro(AllTermIntro(Abstraction(Abstraction(body, "n"), "m"), "y", nat), "x", nat)


@cache
def proof_pred() -> ProofScript:
    """``forall x, N x -o !!N (pred x)``.

    The pair trick: iterate ``c |-> !(N c (x) N (pred c))``.  Each step
    rebuilds the pair from two reads of the boxed previous pair: the
    counter advances by a successor, and the old counter becomes the
    new predecessor slot (justified by ``pred (s y) = y``).  Unboxing
    the final pair and projecting out the slot costs the two bangs.
    """
    x, y = Var("x"), Var("y")

    def pair_f(t: Term) -> Formula:
        return tensor(_nf(t), _nf(op("pred", t)))

    def state_f(t: Term) -> Formula:
        return Bang(pair_f(t))

    counter = from_pair(
        Axiom("c1", pair_f(y)),
        _nf(op("s", y)),
        Abstraction(
            Abstraction(
                Weakening(
                    Application(AllTermElim(refresh_script(proof_succ()), y), Axiom("a1", _nf(y))),
                    "b1",
                    _nf(op("pred", y)),
                ),
                "b1",
            ),
            "a1",
        ),
    )
    slot = from_pair(
        Axiom("c2", pair_f(y)),
        _nf(op("pred", op("s", y))),
        Abstraction(
            Abstraction(
                Weakening(
                    _cast(Axiom("a2", _nf(y)), "pred_succ", {"x": y}),
                    "b2",
                    _nf(op("pred", y)),
                ),
                "b2",
            ),
            "a2",
        ),
    )
    new_pair = make_pair(counter, slot, _nf(op("s", y)), _nf(op("pred", op("s", y))))
    step_box = Promotion(
        (("c1", Axiom("u", state_f(y))), ("c2", Axiom("u", state_f(y)))), new_pair
    )
    step = AllTermIntro(Abstraction(Contraction(step_box, "u"), "u"), "y", nat)
    k1 = Promotion((), step)

    base_slot = _cast(proof_zero(), "pred_zero", {})
    base = Promotion(
        (), make_pair(proof_zero(), base_slot, _nf(Var("0")), _nf(op("pred", Var("0"))))
    )

    m_elim = AllPredElim(Axiom("m", _nf(x)), ("c",), state_f(Var("c")))
    kk = Application(m_elim, k1)
    rx = Application(Axiom("w2", Lolli(state_f(Var("0")), state_f(x))), base)
    take_slot = from_pair(
        Axiom("p", pair_f(x)),
        _nf(op("pred", x)),
        Abstraction(
            Abstraction(
                Weakening(Axiom("bb", _nf(op("pred", x))), "aa", _nf(x)), "bb"
            ),
            "aa",
        ),
    )
    inner = Promotion((("p", rx),), take_slot)
    outer = Promotion((("w2", kk),), inner)
    return AllTermIntro(Abstraction(outer, "m"), "x", nat)


@cache
def proof_minus() -> ProofScript:
    """The natural candidate for ``forall x y, N x -o N y -o !N (minus x y)``.

    This script does not check, and no decoration fixes it.  The
    recurrence ``minus x (s y) = pred (minus x y)`` forces the step of a
    ``y``-iteration to apply the predecessor theorem, whose conclusion
    carries two bangs that the iteration step is not allowed to produce
    (the step must return its predicate at the very depth it received
    it).  Carrying the value at depth ``j`` instead just moves the
    problem: one predecessor application turns a depth-``j`` slot into
    a depth-``j+2`` slot, so the depth of the state would have to grow
    with the number of steps taken, which no fixed formula can express.
    The checker rejects the application of the iteration principle to
    this step with the exact mismatch.
    """
    x, y = Var("x"), Var("y")
    mxc = op("minus", x, Var("c"))
    pred_inst = AllTermElim(refresh_script(proof_pred()), mxc)
    applied = Application(pred_inst, Axiom("ih", _nf(mxc)))
    casted = _cast(applied, "minus_succ", {"x": x, "y": Var("c")}, under=2)
    step_core = AllTermIntro(Abstraction(casted, "ih"), "c", nat)
    step = Promotion((), step_core)
    n_elim = AllPredElim(Axiom("n", _nf(y)), ("c",), _nf(mxc))
    kk = Application(n_elim, step)
    kk = Equality(
        kk,
        "q0",
        Bang(Lolli(_nf(Var("q0")), _nf(op("minus", x, y)))),
        op("minus", x, Var("0")),
        x,
        nat,
        "forward",
        (AxiomStep("minus_zero", (("x", x),)),),
    )
    coerced_m = Application(AllTermElim(refresh_script(proof_coercion()), x), Axiom("m", _nf(x)))
    final = Promotion(
        (("kk", kk), ("zz", coerced_m)),
        Application(
            Axiom("kk", Lolli(_nf(x), _nf(op("minus", x, y)))), Axiom("zz", _nf(x))
        ),
    )
    body = Abstraction(Abstraction(final, "n"), "m")
    return AllTermIntro(AllTermIntro(body, "y", nat), "x", nat)


# ---------------------------------------------------------------------------
# Shape analysis of totality statements


def match_nat_formula(f: Formula) -> Term | None:
    """Return ``t`` when ``f`` is (alpha-beta-equal to) ``N t``."""
    if not isinstance(f, ForallPred) or f.arity != (nat,):
        return None
    body = f.body
    if not isinstance(body, Lolli) or not isinstance(body.right, Bang):
        return None
    inner = body.right.body
    if not isinstance(inner, Lolli) or not isinstance(inner.right, Atom):
        return None
    if len(inner.right.args) != 1:
        return None
    t = inner.right.args[0]
    return t if formulas_equal(f, nat_formula(t)) else None


def _strip_bangs(f: Formula) -> tuple[int, Formula]:
    k = 0
    while isinstance(f, Bang):
        k += 1
        f = f.body
    return k, f


class TotalityShape:
    """Parsed ``forall x..., !^k1 N x1 -o ... -o !^k N (body)``."""

    __slots__ = ("variables", "premise_bangs", "out_bangs", "out_term")

    def __init__(
        self,
        variables: tuple[str, ...],
        premise_bangs: tuple[int, ...],
        out_bangs: int,
        out_term: Term,
    ) -> None:
        self.variables = variables
        self.premise_bangs = premise_bangs
        self.out_bangs = out_bangs
        self.out_term = out_term

    @property
    def arity(self) -> int:
        return len(self.variables)


def parse_totality(goal: Formula) -> TotalityShape:
    """Decompose a totality statement, or raise :class:`ShapeMismatch`."""
    names: list[str] = []
    while isinstance(goal, ForallTerm):
        if goal.ty != nat:
            raise ShapeMismatch("totality quantifiers must range over nat")
        base = goal.hint or "x"
        name = base
        n = 0
        while name in names or name in theory.signature:
            name = f"{base}{n}"
            n += 1
        names.append(name)
        goal = all_term_inst(goal, Var(name))
    bangs_per: list[int] = []
    seen = 0
    while isinstance(goal, Lolli):
        k, core = _strip_bangs(goal.left)
        t = match_nat_formula(core)
        if t is None or t != Var(names[seen] if seen < len(names) else ""):
            raise ShapeMismatch(
                f"premise {show_formula(goal.left)} is not the numeral"
                " predicate of the matching quantified variable"
            )
        bangs_per.append(k)
        seen += 1
        goal = goal.right
    if seen != len(names):
        raise ShapeMismatch("quantified variables and premises do not line up")
    k, core = _strip_bangs(goal)
    t = match_nat_formula(core)
    if t is None:
        raise ShapeMismatch(f"conclusion {show_formula(goal)} is not a numeral statement")
    return TotalityShape(tuple(names), tuple(bangs_per), k, t)


def _checked_shape(script: ProofScript, thy: Theory) -> tuple[CheckedProof, TotalityShape]:
    checked = check_proof(script, thy)
    return checked, parse_totality(checked.goal)


# ---------------------------------------------------------------------------
# Schemes


def normalize_totality(
    proof: ProofScript, shape: tuple[int, ...], thy: Theory = theory
) -> ProofScript:
    """Precompose coercions so every premise is an undecorated ``N``.

    ``shape`` states the expected premise decorations; it must match
    the proof's actual conclusion.  The output decoration is untouched.
    """
    _, info = _checked_shape(proof, thy)
    if tuple(shape) != info.premise_bangs:
        raise ShapeMismatch(
            f"declared premise shape {tuple(shape)} differs from the"
            f" concluded {info.premise_bangs}"
        )
    if all(k == 0 for k in info.premise_bangs):
        return proof
    xs = [f"z{j}" for j in range(1, info.arity + 1)]
    body: ProofScript = refresh_script(proof)
    for x in xs:
        body = AllTermElim(body, Var(x))
    for x, k in zip(xs, info.premise_bangs):
        arg = _coerce_to(Axiom(f"g_{x}", _nf(Var(x))), Var(x), 0, k)
        body = Application(body, arg)
    for x in reversed(xs):
        body = Abstraction(body, f"g_{x}")
    for x in reversed(xs):
        body = AllTermIntro(body, x, nat)
    return body


def compose_scheme(
    f: ProofScript, gs: tuple[ProofScript, ...] | list[ProofScript], thy: Theory = theory
) -> ProofScript:
    """Totality of ``f`` after the ``gs``, with output bang ``s + k + 1``.

    All inputs must conclude normal-form totality statements; ``f`` in
    as many variables as there are ``gs``, the ``gs`` all in the same
    number of variables ``q``.  Building blocks: every input is coerced
    once (hence the final ``+1`` box), inside which each ``g`` consumes
    one copy, and the ``f`` proof is promoted ``s`` times so that it can
    absorb the ``!^ki``-decorated intermediate results.
    """
    gs = tuple(gs)
    _, finfo = _checked_shape(f, thy)
    if any(k != 0 for k in finfo.premise_bangs):
        raise ShapeMismatch("the outer proof must be in normal form")
    if finfo.arity != len(gs):
        raise ArityMismatch(
            f"outer proof takes {finfo.arity} arguments, got {len(gs)} inner proofs"
        )
    ginfos = []
    for g in gs:
        _, gi = _checked_shape(g, thy)
        if any(k != 0 for k in gi.premise_bangs):
            raise ShapeMismatch("inner proofs must be in normal form")
        ginfos.append(gi)
    arities = {gi.arity for gi in ginfos}
    if len(arities) > 1:
        raise ArityMismatch(f"inner proofs disagree on arity: {sorted(arities)}")
    q = arities.pop() if arities else 0
    if q == 0:
        raise ArityMismatch("inner proofs must take at least one argument")
    p = len(gs)
    s = sum(gi.out_bangs for gi in ginfos)
    xs = [f"x{j}" for j in range(1, q + 1)]
    g_terms = [
        subst_many(gi.out_term, {v: Var(x) for v, x in zip(gi.variables, xs)})
        for gi in ginfos
    ]

    lifted: ProofScript = refresh_script(f)
    for t in g_terms:
        lifted = AllTermElim(lifted, t)
    for i, t in enumerate(g_terms, start=1):
        lifted = Application(lifted, Axiom(f"u{i}", _nf(t)))
    for lvl in range(1, s + 1):
        lifted = Promotion(
            tuple(
                (f"u{i}", Axiom(f"u{i}", bangs(lvl, _nf(t))))
                for i, t in enumerate(g_terms, start=1)
            ),
            lifted,
        )
    for i in range(p, 0, -1):
        t, gi = g_terms[i - 1], ginfos[i - 1]
        lifted = Abstraction(lifted, f"u{i}")
        inner_g: ProofScript = refresh_script(gs[i - 1])
        for x in xs:
            inner_g = AllTermElim(inner_g, Var(x))
        for j, x in enumerate(xs, start=1):
            inner_g = Application(inner_g, Axiom(f"u{i}_{j}", _nf(Var(x))))
        lifted = Application(lifted, _coerce_to(inner_g, t, gi.out_bangs, s))

    big = Promotion(
        tuple(
            (f"u{i}_{j}", Axiom(f"m{j}", Bang(_nf(Var(x)))))
            for i in range(1, p + 1)
            for j, x in enumerate(xs, start=1)
        ),
        lifted,
    )
    for j in range(1, q + 1):
        for _ in range(p - 1):
            big = Contraction(big, f"m{j}")
    for j in range(q, 0, -1):
        x = xs[j - 1]
        big = Abstraction(big, f"m{j}")
        coerced = Application(
            AllTermElim(refresh_script(proof_coercion()), Var(x)),
            Axiom(f"n{j}", _nf(Var(x))),
        )
        big = Application(big, coerced)
        big = Abstraction(big, f"n{j}")
    for x in reversed(xs):
        big = AllTermIntro(big, x, nat)
    return big


@cache
def proof_doubling() -> ProofScript:
    """``forall x, N x -o !N (plus x x)``, the composition-scheme demo."""
    return compose_scheme(proof_plus(), (proof_identity(), proof_identity()))


def _parse_unary(f_proof: ProofScript, k: int, thy: Theory) -> tuple[Term, Term]:
    """Extract the pointwise function of a unary totality proof.

    Returns ``(F, F_of_y)`` where ``F`` is the ``nat -> nat`` lambda
    and ``F_of_y`` its application to the fixed variable ``y``.
    """
    _, info = _checked_shape(f_proof, thy)
    if info.arity != 1 or info.premise_bangs != (0,):
        raise ShapeMismatch(
            "expected a normal-form totality statement in one variable"
        )
    if info.out_bangs != k:
        raise ShapeMismatch(
            f"declared output decoration {k} differs from the concluded {info.out_bangs}"
        )
    body = subst_many(info.out_term, {info.variables[0]: Var("y")})
    free = lam("y", nat, body)
    return free, App(free, Var("y"))


def _bounded_scheme(f_proof: ProofScript, k: int, thy: Theory, product: bool) -> ProofScript:
    sym = "prod" if product else "sum"
    slot_depth = k + 1 if product else k
    F, F_y = _parse_unary(f_proof, k, thy)
    y, n = Var("y"), Var("n")

    def acc(t: Term) -> Term:
        return op(sym, F, t)

    def slot_f(t: Term) -> Formula:
        return bangs(slot_depth, _nf(acc(t)))

    def pair_f(t: Term) -> Formula:
        return tensor(_nf(t), slot_f(t))

    def state_f(t: Term) -> Formula:
        return Bang(pair_f(t))

    hyp_f = all_term("y", nat, Lolli(_nf(Var("y")), bangs(k, _nf(App(F, Var("y"))))))

    counter = from_pair(
        Axiom("u1", pair_f(y)),
        _nf(op("s", y)),
        Abstraction(
            Abstraction(
                Weakening(
                    Application(AllTermElim(refresh_script(proof_succ()), y), Axiom("a1", _nf(y))),
                    "b1",
                    slot_f(y),
                ),
                "b1",
            ),
            "a1",
        ),
    )
    fv = Application(AllTermElim(Axiom("hh", hyp_f), y), Axiom("a2", _nf(y)))
    if product:
        def core(s1: ProofScript, s2: ProofScript) -> ProofScript:
            inst = AllTermElim(AllTermElim(refresh_script(proof_mult2()), acc(y)), F_y)
            return Application(Application(inst, s1), s2)
        combined = _apply_pair_under(
            k, slot_f(y), bangs(k, _nf(F_y)), Axiom("b2", slot_f(y)), fv, core
        )
        rec = _cast(
            combined,
            "prod_succ",
            {"x": y, "f": F},
            under=slot_depth,
        )
    else:
        def core(s1: ProofScript, s2: ProofScript) -> ProofScript:
            inst = AllTermElim(AllTermElim(refresh_script(proof_plus()), acc(y)), F_y)
            return Application(Application(inst, s1), s2)
        combined = _apply_pair_under(
            k, slot_f(y), bangs(k, _nf(F_y)), Axiom("b2", slot_f(y)), fv, core
        )
        rec = _cast(combined, "sum_succ", {"x": y, "f": F}, under=slot_depth)
    new_slot = from_pair(
        Axiom("u2", pair_f(y)),
        slot_f(op("s", y)),
        Abstraction(Abstraction(rec, "b2"), "a2"),
    )
    new_pair = make_pair(counter, new_slot, _nf(op("s", y)), slot_f(op("s", y)))
    step_box = Promotion(
        (
            ("hh", Axiom("w0", Bang(hyp_f))),
            ("u1", Axiom("w", state_f(y))),
            ("u2", Axiom("w", state_f(y))),
        ),
        new_pair,
    )
    step = AllTermIntro(Abstraction(Contraction(step_box, "w"), "w"), "y", nat)
    k1 = Promotion((("w0", _promote_closed(refresh_script(f_proof), 2)),), step)

    if product:
        base_seed = _promote_closed(refresh_script(proof_one()), slot_depth)
        base_slot = _cast(base_seed, "prod_zero", {"f": F}, under=slot_depth)
    else:
        base_seed = _promote_closed(refresh_script(proof_zero()), slot_depth)
        base_slot = _cast(base_seed, "sum_zero", {"f": F}, under=slot_depth)
    base = Promotion(
        (), make_pair(proof_zero(), base_slot, _nf(Var("0")), slot_f(Var("0")))
    )

    n_elim = AllPredElim(Axiom("nn", _nf(n)), ("c",), state_f(Var("c")))
    kk = Application(n_elim, k1)
    rn = Application(Axiom("w2", Lolli(state_f(Var("0")), state_f(n))), base)
    take_slot = from_pair(
        Axiom("p", pair_f(n)),
        slot_f(n),
        Abstraction(
            Abstraction(Weakening(Axiom("b3", slot_f(n)), "a3", _nf(n)), "b3"), "a3"
        ),
    )
    inner = Promotion((("p", rn),), take_slot)
    outer = Promotion((("w2", kk),), inner)
    return AllTermIntro(Abstraction(outer, "nn"), "n", nat)


def bounded_sum(f_proof: ProofScript, k: int, thy: Theory = theory) -> ProofScript:
    """``forall n, N n -o !^(k+2) N (sum F n)`` over a pointwise proof.

    ``f_proof`` must conclude ``forall y, N y -o !^k N (F y)``; its
    function part ``F`` is read off the conclusion.  Iterates the pair
    ``c |-> !(N c (x) !^k N (sum F c))``; the two extra bangs pay for
    the iteration box and for projecting the accumulator back out.
    """
    return _bounded_scheme(f_proof, k, thy, product=False)


def bounded_product(f_proof: ProofScript, k: int, thy: Theory = theory) -> ProofScript:
    """``forall n, N n -o !^(k+3) N (prod F n)`` over a pointwise proof.

    Same shape as :func:`bounded_sum` with the accumulator held one
    bang deeper: the recursive step multiplies, and multiplication
    needs its reusable argument boxed, so the slot lives at ``k + 1``
    and the conclusion at ``k + 3``.
    """
    return _bounded_scheme(f_proof, k, thy, product=True)


# ---------------------------------------------------------------------------
# The corpus


@cache
def corpus() -> dict[str, ProofScript]:
    """Every checkable library proof, keyed by a stable name.

    The minus candidate is deliberately absent: it does not check (see
    :func:`proof_minus`), and the corpus is the set of proofs every
    downstream suite must accept at 100%.
    """
    return {
        "zero": proof_zero(),
        "one": proof_one(),
        "succ": proof_succ(),
        "identity": proof_identity(),
        "const_zero": proof_const_zero(),
        "const_one": proof_const_one(),
        "coercion": proof_coercion(),
        "plus": proof_plus(),
        "mult_core": proof_mult2(),
        "mult": proof_mult(),
        "pred": proof_pred(),
        "doubling": proof_doubling(),
        "sum_of_identity": bounded_sum(proof_identity(), 0),
        "sum_of_doubling": bounded_sum(proof_doubling(), 1),
        "product_of_successor": bounded_product(proof_succ(), 0),
    }
