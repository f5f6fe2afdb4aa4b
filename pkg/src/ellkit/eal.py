"""The exponential backend: typed skeletons, boxes, and level-by-level runs.

A checked proof translates to a derivation over exponential types only:
first-order and type quantifiers disappear, equality steps disappear,
predicate quantifiers become type quantifiers over their carriers.
``check_eal`` replays such a derivation rule by rule, so the translation
can be audited independently of the full checker.

``to_box_term`` reads the same proof as a lambda term with explicit
boxes: every promotion node becomes a box carrying its premise
substitutions unevaluated.  ``stratified_normalize`` then runs the term
level by level: all redexes at box depth 0 first, then the pending
substitutions of depth-0 boxes are resolved, then depth 1, and so on.
Box-valued substituends merge into their host box rather than nesting,
which is what keeps every redex at the level its type says it has.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import FuelExhausted, RuleViolation
from .kernel import CheckedProof
from .projections import (
    EALType,
    EBang,
    EBound,
    EForall,
    ELol,
    EVar,
    PApp,
    PBound,
    PLam,
    PureTerm,
    PVar,
    _grow_stack,
    church_decode,
    church_encode,
    e_all,
    e_all_inst,
    e_all_open,
    erase,
    fv_ealtype,
    normal_order_normalize,
    plam,
    pred_tyvar,
    project_circ,
    show_ealtype,
)
from .syntax import DEFAULT_FUEL, gensym

__all__ = [
    "BApp",
    "BBound",
    "BBox",
    "BLam",
    "BVar",
    "BoxTerm",
    "CostProfile",
    "EALDerivation",
    "LevelCost",
    "box_depth",
    "box_erase",
    "box_size",
    "check_eal",
    "church_decode",
    "church_encode",
    "church_encode_box",
    "normal_order_normalize",
    "stratified_normalize",
    "to_box_term",
    "translate_to_eal",
]


# ---------------------------------------------------------------------------
# Derivations over exponential types


@dataclass(frozen=True)
class EALDerivation:
    """One node of a derivation in the exponential fragment.

    ``hyps`` is the linear context as (label, type, multiplicity)
    triples sorted by label.  The optional fields carry whatever the
    rule needs beyond its children: the touched hypothesis, the
    quantified carrier variable, the instantiation type, or the premise
    wiring of a box.
    """

    rule: str
    hyps: tuple[tuple[str, EALType, int], ...]
    term: PureTerm
    ty: EALType
    children: tuple["EALDerivation", ...] = ()
    label: str | None = None
    binder: str | None = None
    at: EALType | None = None
    premise_labels: tuple[str, ...] = ()


_COLLAPSED = {
    "all-term-intro",
    "all-term-elim",
    "all-type-intro",
    "all-type-elim",
    "rewrite",
}


def _hyp_triples(proof: CheckedProof) -> tuple[tuple[str, EALType, int], ...]:
    counts: dict[str, tuple[EALType, int]] = {}
    for label, formula in proof.sequent.hyps:
        ty = project_circ(formula)
        if label in counts:
            counts[label] = (counts[label][0], counts[label][1] + 1)
        else:
            counts[label] = (ty, 1)
    return tuple((l, ty, n) for l, (ty, n) in sorted(counts.items()))


def _labels_counted(proof: CheckedProof) -> dict[str, int]:
    out: dict[str, int] = {}
    for label, _ in proof.sequent.hyps:
        out[label] = out.get(label, 0) + 1
    return out


def _changed_label(a: CheckedProof, b: CheckedProof) -> str:
    """The single label whose multiplicity differs between two nodes."""
    ca, cb = _labels_counted(a), _labels_counted(b)
    diff = [l for l in set(ca) | set(cb) if ca.get(l, 0) != cb.get(l, 0)]
    if len(diff) != 1:
        raise RuleViolation(f"ambiguous hypothesis change: {sorted(diff)}")
    return diff[0]


def match_instance(quantified: EForall, instance: EALType) -> EALType:
    """Recover the type a quantifier was instantiated at.

    Matches the opened body against the instance; every position where
    the bound variable occurs must hold one and the same locally closed
    type.  When the variable does not occur at all the instantiation is
    unobservable and the identity carrier is returned.
    """
    marker = gensym("inst")
    opened = e_all_open(quantified, marker)
    found: list[EALType] = []

    def closed(t: EALType, depth: int) -> bool:
        match t:
            case EBound(i):
                return i < depth
            case EVar():
                return True
            case ELol(a, b):
                return closed(a, depth) and closed(b, depth)
            case EBang(body):
                return closed(body, depth)
            case EForall(body, _):
                return closed(body, depth + 1)
        return False

    def walk(a: EALType, b: EALType, depth: int) -> bool:
        if a == EVar(marker):
            if not closed(b, 0):
                return False
            found.append(b)
            return True
        match (a, b):
            case (EVar(x), EVar(y)):
                return x == y
            case (EBound(i), EBound(j)):
                return i == j
            case (ELol(a1, a2), ELol(b1, b2)):
                return walk(a1, b1, depth) and walk(a2, b2, depth)
            case (EBang(x), EBang(y)):
                return walk(x, y, depth)
            case (EForall(x, _), EForall(y, _)):
                return walk(x, y, depth + 1)
        return False

    if not walk(opened, instance, 0) or any(f != found[0] for f in found):
        raise RuleViolation(
            f"{show_ealtype(instance)} is not an instance"
            f" of {show_ealtype(quantified)}"
        )
    return found[0] if found else EForall(EBound(0))


def translate_to_eal(proof: CheckedProof) -> EALDerivation:
    """Project a checked proof onto the exponential fragment.

    Total on checked proofs: rules without exponential content collapse
    to their premise, predicate quantifier rules become type quantifier
    rules, everything else maps to its namesake.
    """
    if proof.rule in _COLLAPSED:
        return translate_to_eal(proof.children[0])
    hyps = _hyp_triples(proof)
    term = erase(proof.term)
    ty = project_circ(proof.sequent.goal)
    rule = proof.rule
    label: str | None = None
    binder: str | None = None
    at: EALType | None = None
    premise_labels: tuple[str, ...] = ()
    if rule == "axiom":
        label = hyps[0][0]
        children: tuple[EALDerivation, ...] = ()
    else:
        children = tuple(translate_to_eal(c) for c in proof.children)
    if rule in ("weaken", "contract", "abs"):
        label = _changed_label(proof.children[0], proof)
    elif rule == "promote":
        premise_labels = proof.promotion_labels
    elif rule == "all-pred-intro":
        rule = "forall-intro"
        goal = proof.sequent.goal
        binder = pred_tyvar(getattr(goal, "hint", "X"))
    elif rule == "all-pred-elim":
        rule = "forall-elim"
        child_ty = children[0].ty
        if not isinstance(child_ty, EForall):
            raise RuleViolation(
                f"instantiation of a non-quantifier {show_ealtype(child_ty)}"
            )
        at = match_instance(child_ty, ty)
    return EALDerivation(rule, hyps, term, ty, children, label, binder, at, premise_labels)


def _merge_hyps(
    parts: Iterable[tuple[tuple[str, EALType, int], ...]], where: str
) -> tuple[tuple[str, EALType, int], ...]:
    out: dict[str, tuple[EALType, int]] = {}
    for part in parts:
        for label, ty, mult in part:
            if label not in out:
                out[label] = (ty, mult)
                continue
            prev_ty, prev_mult = out[label]
            if prev_ty != ty or not isinstance(ty, EBang):
                raise RuleViolation(
                    f"{where}: hypothesis {label} shared at a non-reusable type"
                )
            out[label] = (ty, prev_mult + mult)
    return tuple((l, ty, n) for l, (ty, n) in sorted(out.items()))


def _subst_pure(t: PureTerm, name: str, repl: PureTerm) -> PureTerm:
    def shift(t: PureTerm, by: int, cutoff: int) -> PureTerm:
        match t:
            case PBound(i):
                return PBound(i + by) if i >= cutoff else t
            case PLam(body, hint):
                return PLam(shift(body, by, cutoff + 1), hint)
            case PApp(f, a):
                return PApp(shift(f, by, cutoff), shift(a, by, cutoff))
            case _:
                return t

    def go(t: PureTerm, depth: int) -> PureTerm:
        match t:
            case PVar(n):
                if n != name:
                    return t
                return shift(repl, depth, 0) if depth else repl
            case PLam(body, hint):
                return PLam(go(body, depth + 1), hint)
            case PApp(f, a):
                return PApp(go(f, depth), go(a, depth))
            case _:
                return t

    return go(t, 0)


def check_eal(derivation: EALDerivation) -> None:
    """Replay an exponential derivation; raise :class:`RuleViolation`
    with the offending node's path on any rule breach."""

    def fail(path: tuple[int, ...], msg: str) -> None:
        shown = ".".join(str(i) for i in path) or "root"
        raise RuleViolation(f"node {shown}: {msg}")

    def go(d: EALDerivation, path: tuple[int, ...]) -> None:
        for i, child in enumerate(d.children):
            go(child, path + (i,))
        match d.rule:
            case "axiom":
                if d.label is None or d.hyps != ((d.label, d.ty, 1),):
                    fail(path, "axiom context must be exactly its own hypothesis")
                if d.term != PVar(d.label):
                    fail(path, "axiom term must be its hypothesis variable")
            case "weaken":
                (child,) = d.children
                if d.label is None or any(l == d.label for l, _, _ in child.hyps):
                    fail(path, f"weakening re-adds hypothesis {d.label}")
                added = [h for h in d.hyps if h[0] == d.label]
                if len(added) != 1 or added[0][2] != 1:
                    fail(path, "weakening must add one fresh hypothesis")
                rest = tuple(h for h in d.hyps if h[0] != d.label)
                if rest != child.hyps or d.ty != child.ty or d.term != child.term:
                    fail(path, "weakening changes more than its own hypothesis")
            case "contract":
                (child,) = d.children
                got = {l: (t, n) for l, t, n in child.hyps}
                if d.label is None or d.label not in got:
                    fail(path, "contraction on an absent hypothesis")
                ty, n = got[d.label]
                if not isinstance(ty, EBang):
                    fail(path, f"contraction on non-reusable {show_ealtype(ty)}")
                if n < 2:
                    fail(path, "contraction needs two occurrences")
                got[d.label] = (ty, n - 1)
                want = tuple((l, t, m) for l, (t, m) in sorted(got.items()))
                if d.hyps != want or d.ty != child.ty or d.term != child.term:
                    fail(path, "contraction conclusion does not match")
            case "app":
                fn, arg = d.children
                if not isinstance(fn.ty, ELol):
                    fail(path, f"applying non-arrow {show_ealtype(fn.ty)}")
                if fn.ty.left != arg.ty:
                    fail(
                        path,
                        f"argument type {show_ealtype(arg.ty)} does not match"
                        f" {show_ealtype(fn.ty.left)}",
                    )
                if d.ty != fn.ty.right or d.term != PApp(fn.term, arg.term):
                    fail(path, "application conclusion does not match")
                if d.hyps != _merge_hyps((fn.hyps, arg.hyps), "application"):
                    fail(path, "application context is not the premise merge")
            case "abs":
                (child,) = d.children
                got = {l: (t, n) for l, t, n in child.hyps}
                if d.label is None or d.label not in got:
                    fail(path, "abstraction discharges an absent hypothesis")
                ty, n = got.pop(d.label)
                if n != 1:
                    fail(path, "abstraction needs a single occurrence")
                want = tuple((l, t, m) for l, (t, m) in sorted(got.items()))
                if d.hyps != want or d.ty != ELol(ty, child.ty):
                    fail(path, "abstraction conclusion does not match")
                if d.term != plam(d.label, child.term):
                    fail(path, "abstraction term does not bind its hypothesis")
            case "promote":
                if len(d.children) != len(d.premise_labels) + 1:
                    fail(path, "promotion premise wiring does not line up")
                inner = d.children[-1]
                premises = d.children[:-1]
                inner_want: dict[str, EALType] = {}
                for label, premise in zip(d.premise_labels, premises):
                    if not isinstance(premise.ty, EBang):
                        fail(path, f"premise for {label} is not boxed")
                    if label in inner_want:
                        fail(path, f"premise label {label} repeated")
                    inner_want[label] = premise.ty.body
                want = tuple((l, t, 1) for l, t in sorted(inner_want.items()))
                if inner.hyps != want:
                    fail(path, "inner context must be exactly the premise labels")
                if d.ty != EBang(inner.ty):
                    fail(path, "promotion must box the inner type")
                if d.hyps != _merge_hyps((p.hyps for p in premises), "promotion"):
                    fail(path, "promotion context is not the premise merge")
                term = inner.term
                for label, premise in zip(d.premise_labels, premises):
                    term = _subst_pure(term, label, premise.term)
                if d.term != term:
                    fail(path, "promotion term is not the premise substitution")
            case "forall-intro":
                (child,) = d.children
                if d.binder is None:
                    fail(path, "quantifier needs a carrier variable")
                for label, ty, _ in d.hyps:
                    if d.binder in fv_ealtype(ty):
                        fail(path, f"carrier {d.binder} free in hypothesis {label}")
                if d.hyps != child.hyps or d.term != child.term:
                    fail(path, "quantifier introduction changes the context")
                if d.ty != e_all(d.binder, child.ty):
                    fail(path, "quantifier conclusion does not match")
            case "forall-elim":
                (child,) = d.children
                if not isinstance(child.ty, EForall) or d.at is None:
                    fail(path, "instantiation needs a quantified premise")
                if d.ty != e_all_inst(child.ty, d.at):
                    fail(path, "instantiation conclusion does not match")
                if d.hyps != child.hyps or d.term != child.term:
                    fail(path, "instantiation changes the context")
            case _:
                fail(path, f"unknown rule {d.rule}")

    go(derivation, ())


# ---------------------------------------------------------------------------
# Box terms


@dataclass(frozen=True, slots=True)
class BVar:
    name: str
    size: int = field(default=1, init=False, compare=False)


@dataclass(frozen=True, slots=True)
class BBound:
    index: int
    size: int = field(default=1, init=False, compare=False)


@dataclass(frozen=True, slots=True)
class BLam:
    body: "BoxTerm"
    hint: str = field(default="x", compare=False)
    size: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "size", 1 + self.body.size)


@dataclass(frozen=True, slots=True)
class BApp:
    fn: "BoxTerm"
    arg: "BoxTerm"
    size: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "size", 1 + self.fn.size + self.arg.size)


@dataclass(frozen=True, slots=True)
class BBox:
    """A box with pending substitutions for its premise labels."""

    body: "BoxTerm"
    subs: tuple[tuple[str, "BoxTerm"], ...] = ()
    size: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        n = 1 + self.body.size
        for _, u in self.subs:
            n += u.size
        object.__setattr__(self, "size", n)


BoxTerm = Union[BVar, BBound, BLam, BApp, BBox]


def blam(name: str, body: BoxTerm) -> BLam:
    def close(t: BoxTerm, k: int) -> BoxTerm:
        match t:
            case BVar(n):
                return BBound(k) if n == name else t
            case BBound():
                return t
            case BLam(b, h):
                return BLam(close(b, k + 1), h)
            case BApp(f, a):
                return BApp(close(f, k), close(a, k))
            case BBox(b, subs):
                return BBox(close(b, k), tuple((x, close(u, k)) for x, u in subs))
        raise TypeError(f"not a box term: {t!r}")

    return BLam(close(body, 0), hint=name)


def _b_shift(t: BoxTerm, by: int, cutoff: int = 0) -> BoxTerm:
    match t:
        case BBound(i):
            return BBound(i + by) if i >= cutoff else t
        case BLam(b, h):
            return BLam(_b_shift(b, by, cutoff + 1), h)
        case BApp(f, a):
            return BApp(_b_shift(f, by, cutoff), _b_shift(a, by, cutoff))
        case BBox(b, subs):
            return BBox(
                _b_shift(b, by, cutoff),
                tuple((x, _b_shift(u, by, cutoff)) for x, u in subs),
            )
        case _:
            return t


def to_box_term(proof: CheckedProof) -> BoxTerm:
    """The program of a checked proof with promotions reified as boxes.

    Premise substitutions are attached to their box unevaluated; erasing
    the boxes recovers the erased extracted term of the proof.
    """
    rule = proof.rule
    if rule == "axiom":
        return BVar(proof.sequent.hyps[0][0])
    if rule == "app":
        return BApp(to_box_term(proof.children[0]), to_box_term(proof.children[1]))
    if rule == "abs":
        label = _changed_label(proof.children[0], proof)
        return blam(label, to_box_term(proof.children[0]))
    if rule == "promote":
        inner = to_box_term(proof.children[-1])
        subs = tuple(
            (label, to_box_term(premise))
            for label, premise in zip(proof.promotion_labels, proof.children[:-1])
        )
        return BBox(inner, subs)
    return to_box_term(proof.children[0])


def box_erase(t: BoxTerm) -> PureTerm:
    """Forget boxes, applying their pending substitutions."""
    match t:
        case BVar(n):
            return PVar(n)
        case BBound(i):
            return PBound(i)
        case BLam(body, hint):
            return PLam(box_erase(body), hint)
        case BApp(f, a):
            return PApp(box_erase(f), box_erase(a))
        case BBox(body, subs):
            out = box_erase(body)
            for name, u in subs:
                out = _subst_pure(out, name, box_erase(u))
            return out
    raise TypeError(f"not a box term: {t!r}")


def box_depth(t: BoxTerm) -> int:
    match t:
        case BVar() | BBound():
            return 0
        case BLam(body, _):
            return box_depth(body)
        case BApp(f, a):
            return max(box_depth(f), box_depth(a))
        case BBox(body, subs):
            d = 1 + box_depth(body)
            for _, u in subs:
                d = max(d, box_depth(u))
            return d
    raise TypeError(f"not a box term: {t!r}")


def box_size(t: BoxTerm) -> int:
    """Number of nodes in the term tree.

    Sizes are computed at construction, so this is a field read; walking
    would be exponential on heavily shared trees.
    """
    return t.size


def church_encode_box(n: int) -> BoxTerm:
    """The numeral at its boxed type: the iterated argument enters the
    box through a premise substitution, never applied bare."""
    if n < 0:
        raise ValueError("no negative numerals")
    body: BoxTerm = BVar("x")
    for _ in range(n):
        body = BApp(BVar("k"), body)
    boxed = BBox(blam("x", body), ((("k", BVar("f")),) if n else ()))
    return blam("f", boxed)


# ---------------------------------------------------------------------------
# Stratified normalization


@dataclass(frozen=True)
class LevelCost:
    depth: int
    steps: int
    max_size: int
    start_size: int


@dataclass(frozen=True)
class CostProfile:
    """Per-level cost of a stratified run.

    One record per processed level: how many beta contractions it took
    and the largest whole-term size reached while working that level.
    """

    levels: tuple[LevelCost, ...]

    @property
    def total_steps(self) -> int:
        return sum(l.steps for l in self.levels)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def to_text(self) -> str:
        lines = [
            f"depth={l.depth} steps={l.steps} max-size={l.max_size}"
            for l in self.levels
        ]
        lines.append(f"total steps={self.total_steps} levels={self.depth}")
        return "\n".join(lines)


class _LevelState:
    """Mutable bookkeeping for one stratified run."""

    __slots__ = ("budget", "used", "levels", "level", "steps", "size", "max_size", "start")

    def __init__(self, budget: int) -> None:
        self.budget = budget
        self.used = 0
        self.levels: list[LevelCost] = []
        self.level = 0
        self.steps = 0
        self.size = 0
        self.max_size = 0
        self.start = 0

    def open_level(self, level: int, size: int) -> None:
        self.level = level
        self.steps = 0
        self.size = size
        self.max_size = size
        self.start = size

    def close_level(self) -> None:
        self.levels.append(LevelCost(self.level, self.steps, self.max_size, self.start))

    def spend(self, size_delta: int) -> None:
        if self.used >= self.budget:
            partial = CostProfile(
                tuple(self.levels)
                + (LevelCost(self.level, self.steps, self.max_size, self.start),)
            )
            raise FuelExhausted(
                f"stratified budget of {self.budget} spent at level {self.level}",
                partial,
            )
        self.used += 1
        self.steps += 1
        self.size += size_delta
        if self.size > self.max_size:
            self.max_size = self.size


def _b_closed(t: BoxTerm, depth: int = 0) -> bool:
    """No bound index escapes; closed insertions never need shifting."""
    match t:
        case BBound(i):
            return i < depth
        case BVar():
            return True
        case BLam(b, _):
            return _b_closed(b, depth + 1)
        case BApp(f, a):
            return _b_closed(f, depth) and _b_closed(a, depth)
        case BBox(b, subs):
            return _b_closed(b, depth) and all(_b_closed(u, depth) for _, u in subs)
    raise TypeError(f"not a box term: {t!r}")


def _b_contract_counted(lam_body: BoxTerm, arg: BoxTerm) -> tuple[BoxTerm, int]:
    """Substitute ``arg`` for the outermost bound variable, reporting how
    many occurrences were replaced so sizes can be tracked incrementally."""
    occ = 0
    arg_closed = _b_closed(arg)

    def go(t: BoxTerm, j: int) -> BoxTerm:
        nonlocal occ
        match t:
            case BBound(i):
                if i == j:
                    occ += 1
                    if j == 0 or arg_closed:
                        return arg
                    return _b_shift(arg, j)
                return BBound(i - 1) if i > j else t
            case BLam(b, h):
                return BLam(go(b, j + 1), h)
            case BApp(f, a):
                return BApp(go(f, j), go(a, j))
            case BBox(b, subs):
                return BBox(go(b, j), tuple((x, go(u, j)) for x, u in subs))
            case _:
                return t

    return go(lam_body, 0), occ


def _whnf_level(t: BoxTerm, d: int, state: _LevelState) -> BoxTerm:
    """Head-normalize; contract only redexes whose node depth is the
    level being worked."""
    while isinstance(t, BApp):
        fn = _whnf_level(t.fn, d, state)
        if d == state.level and isinstance(fn, BLam):
            arg_size = box_size(t.arg)
            body, occ = _b_contract_counted(fn.body, t.arg)
            state.spend((occ - 1) * arg_size - occ - 2)
            t = body
            continue
        return t if fn is t.fn else BApp(fn, t.arg)
    return t


def _norm_level(t: BoxTerm, d: int, state: _LevelState) -> BoxTerm:
    """Normalize every redex at the working level, leftmost-outermost.

    A box's body sits one level deeper; its pending substitutions are
    content of the box's own level, mirroring where promotion premises
    live in a derivation.
    """
    t = _whnf_level(t, d, state)
    match t:
        case BLam(body, hint):
            b2 = _norm_level(body, d, state)
            return t if b2 is body else BLam(b2, hint)
        case BApp(f, a):
            f2 = _norm_level(f, d, state)
            a2 = _norm_level(a, d, state)
            return t if f2 is f and a2 is a else BApp(f2, a2)
        case BBox(body, subs):
            b2 = body if d + 1 > state.level else _norm_level(body, d + 1, state)
            s2 = tuple((x, _norm_level(u, d, state)) for x, u in subs)
            return BBox(b2, s2)
        case _:
            return t


def _env_subst(t: BoxTerm, env: dict[str, BoxTerm]) -> BoxTerm:
    """Simultaneous free-name substitution, shifting each insertion by
    the number of binders crossed."""

    closed = {n: _b_closed(r) for n, r in env.items()}

    def go(t: BoxTerm, j: int) -> BoxTerm:
        match t:
            case BVar(n):
                r = env.get(n)
                if r is None:
                    return t
                if j == 0 or closed[n]:
                    return r
                return _b_shift(r, j)
            case BLam(b, h):
                return BLam(go(b, j + 1), h)
            case BApp(f, a):
                return BApp(go(f, j), go(a, j))
            case BBox(b, subs):
                return BBox(go(b, j), tuple((x, go(u, j)) for x, u in subs))
            case _:
                return t

    return go(t, 0) if env else t


def _resolve_box(box: BBox) -> BBox:
    """Work off a box's pending substitutions in one pass over the body.

    A box-valued substituend merges: it is resolved first and then its
    bare body replaces the label, so the two boxes collapse into one.
    Anything else substitutes directly.  A pending's free labels are its
    own hypothesis labels, never a sibling's, so the substitutions are
    independent and no renaming is needed.
    """
    env: dict[str, BoxTerm] = {}
    for name, u in box.subs:
        env[name] = _resolve_box(u).body if isinstance(u, BBox) else u
    return BBox(_env_subst(box.body, env), ())


def _push_level(t: BoxTerm, d: int, level: int) -> BoxTerm:
    match t:
        case BBox(_, _):
            if d == level:
                return _resolve_box(t)
            if d > level:
                return t
            return BBox(
                _push_level(t.body, d + 1, level),
                tuple((x, _push_level(u, d, level)) for x, u in t.subs),
            )
        case BLam(body, hint):
            return BLam(_push_level(body, d, level), hint)
        case BApp(f, a):
            return BApp(_push_level(f, d, level), _push_level(a, d, level))
        case _:
            return t


def stratified_normalize(
    t: BoxTerm, budget: int = DEFAULT_FUEL
) -> tuple[PureTerm, CostProfile]:
    """Normalize level by level; only beta contractions spend budget.

    Levels are processed in increasing box depth: first the redexes at
    the current depth, to exhaustion, then the pending substitutions of
    the boxes at that depth.  On budget exhaustion the raised
    :class:`FuelExhausted` carries the partial profile.
    """
    _grow_stack()
    state = _LevelState(budget)
    level = 0
    while True:
        state.open_level(level, box_size(t))
        t = _norm_level(t, 0, state)
        t = _push_level(t, 0, level)
        state.close_level()
        if level >= box_depth(t):
            break
        level += 1
    return box_erase(t), CostProfile(tuple(state.levels))
