"""Concrete syntax for proof-script files.

A script file holds up to four kinds of items, in any order::

    signature { name : type; ... }          -- omitted: arithmetic default
    equations { name (x : ty, ...) : ty = lhs => rhs; ... }
    formula name = formula;
    proof name = (rule ...);

When the signature block is omitted the arithmetic signature is assumed,
and an omitted equations block then defaults to the recurrence
equations.  A file with its own signature but no equations block gets an
empty equational theory.

Types, terms, and formulas use the same notation the pretty printers
emit: ``forall a. (a -> a) -> a -> a``, ``\\(x : ty) body``, ``/\\(a) body``,
``f [ty]``, ``N(x)``, ``A -o B``, ``!A``, ``all x : ty . F``,
``All X : [ty, ...] . F``, ``alltype a . F``.  Proofs are parenthesized
rule trees whose payloads sit in braces::

    (abs (axiom h {N(x)}) h)
    (rewrite P q {N(q)} {plus x 0} {x} {ty} backward ((axiom plus_zero ((x {x})) () lr)))

Comments run from ``--`` to end of line.  ``%`` never appears in a
valid file (generated names stay internal), and names containing ``$``
may be mentioned but not declared; the carrier namespace belongs to the
realizability layer.

Parsing and printing are mutually inverse on the structured content:
``parse_script(show_script(s)) == s``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from .errors import ScriptSyntaxError
from .kernel import (
    Abstraction,
    AllPredElim,
    AllPredIntro,
    AllTermElim,
    AllTermIntro,
    AllTypeElim,
    AllTypeIntro,
    Application,
    Axiom,
    Contraction,
    Equality,
    ProofScript,
    Promotion,
    Weakening,
)
from .library import equations as default_equations
from .library import signature as default_signature
from .rewrite import (
    AxiomStep,
    BetaStep,
    CongStep,
    ExtStep,
    Refl,
    SymStep,
    TraceStep,
    TransStep,
)
from .syntax import (
    Atom,
    Bang,
    Formula,
    Lolli,
    TArrow,
    TVar,
    Term,
    Type,
    Var,
    all_pred,
    all_term,
    all_ty,
    app,
    lam,
    show_formula,
    show_term,
    show_type,
    tapp,
    ty_all,
    tylam,
)
from .wellformed import Equation, Signature, Theory

__all__ = ["ParsedScript", "parse_script", "show_script"]


# ---------------------------------------------------------------------------
# Result type


def _std_entries() -> tuple[tuple[str, Type], ...]:
    return tuple((n, default_signature[n]) for n in default_signature.names())


@dataclass(frozen=True)
class ParsedScript:
    """A parsed file: environment plus named formulas and proofs."""

    signature_entries: tuple[tuple[str, Type], ...]
    equations: tuple[Equation, ...]
    formulas: tuple[tuple[str, Formula], ...]
    proofs: tuple[tuple[str, ProofScript], ...]

    @cached_property
    def theory(self) -> Theory:
        return Theory(Signature(self.signature_entries), self.equations)

    def formula(self, name: str) -> Formula:
        for n, f in self.formulas:
            if n == name:
                return f
        raise KeyError(name)

    def proof(self, name: str) -> ProofScript:
        for n, p in self.proofs:
            if n == name:
                return p
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Lexer

_IDENT = re.compile(r"[A-Za-z0-9_'$]+(?:-[A-Za-z0-9_'$]+)*")
_TWO_CHAR = ("/\\", "->", "-o", "=>")
_ONE_CHAR = "(){}[]:;,.=!\\"


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == "%":
            raise ScriptSyntaxError("'%' is reserved for generated names", line, col)
        two = text[i : i + 2]
        if two in _TWO_CHAR:
            toks.append(_Tok("punct", two, line, col))
            i += 2
            col += 2
            continue
        m = _IDENT.match(text, i)
        if m:
            toks.append(_Tok("ident", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if c in _ONE_CHAR:
            toks.append(_Tok("punct", c, line, col))
            i += 1
            col += 1
            continue
        raise ScriptSyntaxError(f"stray character {c!r}", line, col)
    toks.append(_Tok("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Parser

_PROOF_HEADS = frozenset(
    {
        "axiom",
        "weaken",
        "app",
        "abs",
        "promote",
        "contract",
        "all-type-intro",
        "all-term-intro",
        "all-pred-intro",
        "all-type-elim",
        "all-term-elim",
        "all-pred-elim",
        "rewrite",
    }
)
_TRACE_HEADS = frozenset(
    {"refl", "axiom", "beta", "beta-expand", "sym", "trans", "cong", "ext"}
)


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = _lex(text)
        self.pos = 0

    # -- token plumbing

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, msg: str, tok: _Tok | None = None) -> ScriptSyntaxError:
        tok = tok or self.peek()
        return ScriptSyntaxError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            shown = tok.text or "end of file"
            raise self.fail(f"expected {text!r}, found {shown!r}", tok)
        return tok

    def ident(self, what: str = "name") -> str:
        tok = self.next()
        if tok.kind != "ident":
            shown = tok.text or "end of file"
            raise self.fail(f"expected {what}, found {shown!r}", tok)
        return tok.text

    def decl(self, what: str = "name") -> str:
        tok = self.peek()
        name = self.ident(what)
        if "$" in name:
            raise self.fail(f"'$' is reserved for carrier names, cannot declare {name!r}", tok)
        return name

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def at_ident(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == text

    # -- types

    def type_(self) -> Type:
        if self.at_ident("forall"):
            self.next()
            name = self.decl("type variable")
            self.expect(".")
            return ty_all(name, self.type_())
        left = self.type_atom()
        if self.at("->"):
            self.next()
            return TArrow(left, self.type_())
        return left

    def type_atom(self) -> Type:
        if self.at("("):
            self.next()
            ty = self.type_()
            self.expect(")")
            return ty
        return TVar(self.ident("type"))

    # -- terms

    def term(self) -> Term:
        if self.at("\\"):
            self.next()
            self.expect("(")
            name = self.decl("variable")
            self.expect(":")
            ty = self.type_()
            self.expect(")")
            return lam(name, ty, self.term())
        if self.at("/\\"):
            self.next()
            self.expect("(")
            name = self.decl("type variable")
            self.expect(")")
            return tylam(name, self.term())
        out = self.term_atom()
        while True:
            tok = self.peek()
            if tok.text == "[" and tok.kind == "punct":
                self.next()
                ty = self.type_()
                self.expect("]")
                out = tapp(out, ty)
            elif tok.kind == "ident" or tok.text == "(":
                out = app(out, self.term_atom())
            else:
                return out

    def term_atom(self) -> Term:
        if self.at("("):
            self.next()
            t = self.term()
            self.expect(")")
            return t
        return Var(self.ident("term"))

    # -- formulas

    def formula(self) -> Formula:
        if self.at_ident("All"):
            self.next()
            name = self.decl("predicate variable")
            self.expect(":")
            self.expect("[")
            arity: list[Type] = []
            if not self.at("]"):
                arity.append(self.type_())
                while self.at(","):
                    self.next()
                    arity.append(self.type_())
            self.expect("]")
            self.expect(".")
            return all_pred(name, tuple(arity), self.formula())
        if self.at_ident("all"):
            self.next()
            name = self.decl("variable")
            self.expect(":")
            ty = self.type_()
            self.expect(".")
            return all_term(name, ty, self.formula())
        if self.at_ident("alltype"):
            self.next()
            name = self.decl("type variable")
            self.expect(".")
            return all_ty(name, self.formula())
        left = self.formula_atom()
        if self.at("-o"):
            self.next()
            return Lolli(left, self.formula())
        return left

    def formula_atom(self) -> Formula:
        if self.at("!"):
            self.next()
            return Bang(self.formula_atom())
        if self.at("("):
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        head = self.ident("formula")
        args: list[Term] = []
        if self.at("("):
            self.next()
            args.append(self.term())
            while self.at(","):
                self.next()
                args.append(self.term())
            self.expect(")")
        return Atom(head, tuple(args))

    # -- braced payloads

    def braced_type(self) -> Type:
        self.expect("{")
        ty = self.type_()
        self.expect("}")
        return ty

    def braced_term(self) -> Term:
        self.expect("{")
        t = self.term()
        self.expect("}")
        return t

    def braced_formula(self) -> Formula:
        self.expect("{")
        f = self.formula()
        self.expect("}")
        return f

    # -- proofs

    def proof(self) -> ProofScript:
        self.expect("(")
        head_tok = self.peek()
        head = self.ident("rule keyword")
        if head not in _PROOF_HEADS:
            raise self.fail(f"unknown rule keyword {head!r}", head_tok)
        node = self.proof_body(head)
        self.expect(")")
        return node

    def proof_body(self, head: str) -> ProofScript:
        if head == "axiom":
            label = self.decl("hypothesis label")
            return Axiom(label, self.braced_formula())
        if head == "weaken":
            premise = self.proof()
            label = self.decl("hypothesis label")
            return Weakening(premise, label, self.braced_formula())
        if head == "app":
            return Application(self.proof(), self.proof())
        if head == "abs":
            return Abstraction(self.proof(), self.decl("hypothesis label"))
        if head == "contract":
            return Contraction(self.proof(), self.decl("hypothesis label"))
        if head == "promote":
            self.expect("(")
            premises: list[tuple[str, ProofScript]] = []
            while self.at("("):
                self.next()
                label = self.decl("hypothesis label")
                premises.append((label, self.proof()))
                self.expect(")")
            self.expect(")")
            return Promotion(tuple(premises), self.proof())
        if head == "all-type-intro":
            return AllTypeIntro(self.proof(), self.decl("type variable"))
        if head == "all-term-intro":
            premise = self.proof()
            name = self.decl("variable")
            return AllTermIntro(premise, name, self.braced_type())
        if head == "all-pred-intro":
            premise = self.proof()
            name = self.decl("predicate variable")
            self.expect("[")
            arity: list[Type] = []
            if not self.at("]"):
                arity.append(self.type_())
                while self.at(","):
                    self.next()
                    arity.append(self.type_())
            self.expect("]")
            return AllPredIntro(premise, name, tuple(arity))
        if head == "all-type-elim":
            return AllTypeElim(self.proof(), self.braced_type())
        if head == "all-term-elim":
            return AllTermElim(self.proof(), self.braced_term())
        if head == "all-pred-elim":
            premise = self.proof()
            self.expect("(")
            params: list[str] = []
            while self.peek().kind == "ident":
                params.append(self.decl("parameter"))
            self.expect(")")
            return AllPredElim(premise, tuple(params), self.braced_formula())
        premise = self.proof()
        hole_var = self.decl("hole variable")
        hole = self.braced_formula()
        lhs = self.braced_term()
        rhs = self.braced_term()
        ty = self.braced_type()
        direction_tok = self.peek()
        direction = self.ident("direction")
        if direction not in ("forward", "backward"):
            raise self.fail(f"direction must be forward or backward, found {direction!r}", direction_tok)
        return Equality(premise, hole_var, hole, lhs, rhs, ty, direction, self.trace())

    # -- rewrite traces

    def trace(self) -> tuple[TraceStep, ...]:
        self.expect("(")
        steps: list[TraceStep] = []
        while self.at("("):
            steps.append(self.trace_step())
        self.expect(")")
        return tuple(steps)

    def trace_step(self) -> TraceStep:
        self.expect("(")
        head_tok = self.peek()
        head = self.ident("trace step keyword")
        if head not in _TRACE_HEADS:
            raise self.fail(f"unknown trace step keyword {head!r}", head_tok)
        step = self.trace_step_body(head)
        self.expect(")")
        return step

    def trace_step_body(self, head: str) -> TraceStep:
        if head == "refl":
            return Refl()
        if head == "axiom":
            equation = self.ident("equation name")
            self.expect("(")
            assignment: list[tuple[str, Term]] = []
            while self.at("("):
                self.next()
                var = self.ident("equation variable")
                assignment.append((var, self.braced_term()))
                self.expect(")")
            self.expect(")")
            pos = self.position()
            orient_tok = self.peek()
            orient = self.ident("orientation")
            if orient not in ("lr", "rl"):
                raise self.fail(f"orientation must be lr or rl, found {orient!r}", orient_tok)
            return AxiomStep(equation, tuple(assignment), pos, orient)
        if head == "beta":
            pos = self.position()
            term = self.braced_term() if self.at("{") else None
            return BetaStep(pos, "contract", term)
        if head == "beta-expand":
            pos = self.position()
            return BetaStep(pos, "expand", self.braced_term())
        if head == "sym":
            return SymStep(self.braced_term(), self.trace())
        if head == "trans":
            return TransStep(self.trace(), self.trace())
        if head == "cong":
            return CongStep(self.position(), self.trace())
        return ExtStep(self.decl("variable"), self.braced_term(), self.trace())

    def position(self) -> tuple[int, ...]:
        self.expect("(")
        out: list[int] = []
        while self.peek().kind == "ident":
            tok = self.next()
            if not tok.text.isdigit():
                raise self.fail(f"position entries are numbers, found {tok.text!r}", tok)
            out.append(int(tok.text))
        self.expect(")")
        return tuple(out)

    # -- file structure

    def file(self) -> ParsedScript:
        entries: tuple[tuple[str, Type], ...] | None = None
        eqs: tuple[Equation, ...] | None = None
        formulas: list[tuple[str, Formula]] = []
        proofs: list[tuple[str, ProofScript]] = []
        names: set[str] = set()
        while self.peek().kind != "eof":
            tok = self.peek()
            head = self.ident("'signature', 'equations', 'formula', or 'proof'")
            if head == "signature":
                if entries is not None:
                    raise self.fail("duplicate signature block", tok)
                entries = self.signature_block()
            elif head == "equations":
                if eqs is not None:
                    raise self.fail("duplicate equations block", tok)
                eqs = self.equations_block()
            elif head == "formula":
                name = self.decl("formula name")
                if name in names:
                    raise self.fail(f"duplicate definition of {name!r}", tok)
                names.add(name)
                self.expect("=")
                formulas.append((name, self.formula()))
                self.expect(";")
            elif head == "proof":
                name = self.decl("proof name")
                if name in names:
                    raise self.fail(f"duplicate definition of {name!r}", tok)
                names.add(name)
                self.expect("=")
                proofs.append((name, self.proof()))
                self.expect(";")
            else:
                raise self.fail(
                    f"expected 'signature', 'equations', 'formula', or 'proof', found {head!r}",
                    tok,
                )
        if entries is None:
            entries = _std_entries()
            if eqs is None:
                eqs = default_equations
        elif eqs is None:
            eqs = ()
        return ParsedScript(entries, eqs, tuple(formulas), tuple(proofs))

    def signature_block(self) -> tuple[tuple[str, Type], ...]:
        self.expect("{")
        entries: list[tuple[str, Type]] = []
        seen: set[str] = set()
        while not self.at("}"):
            tok = self.peek()
            name = self.decl("constant name")
            if name in seen:
                raise self.fail(f"duplicate signature entry {name!r}", tok)
            seen.add(name)
            self.expect(":")
            entries.append((name, self.type_()))
            self.expect(";")
        self.next()
        return tuple(entries)

    def equations_block(self) -> tuple[Equation, ...]:
        self.expect("{")
        eqs: list[Equation] = []
        seen: set[str] = set()
        while not self.at("}"):
            tok = self.peek()
            name = self.decl("equation name")
            if name in seen:
                raise self.fail(f"duplicate equation {name!r}", tok)
            seen.add(name)
            self.expect("(")
            vars_: list[tuple[str, Type]] = []
            if not self.at(")"):
                while True:
                    var = self.decl("equation variable")
                    self.expect(":")
                    vars_.append((var, self.type_()))
                    if not self.at(","):
                        break
                    self.next()
            self.expect(")")
            self.expect(":")
            ty = self.type_()
            self.expect("=")
            lhs = self.term()
            self.expect("=>")
            rhs = self.term()
            self.expect(";")
            eqs.append(Equation(name, tuple(vars_), lhs, rhs, ty))
        self.next()
        return tuple(eqs)


def parse_script(text: str) -> ParsedScript:
    """Parse a script file; raise :class:`ScriptSyntaxError` with the
    line and column of the first offence."""
    return _Parser(text).file()


# ---------------------------------------------------------------------------
# Printer

_WIDTH = 96


def _group(parts: list[str], indent: int) -> str:
    """Join tree parts: one line when everything fits, else stacked."""
    flat = " ".join(parts)
    if "\n" not in flat and indent + len(flat) <= _WIDTH:
        return flat
    pad = " " * (indent + 2)
    head, *rest = parts
    lines = [head]
    for part in rest:
        lines.append(pad + part)
    return "\n".join(lines)


def _show_proof(p: ProofScript, indent: int) -> str:
    match p:
        case Axiom(label, formula):
            parts = ["(axiom", label, "{" + show_formula(formula) + "})"]
        case Weakening(premise, label, formula):
            parts = [
                "(weaken",
                _show_proof(premise, indent + 2),
                label,
                "{" + show_formula(formula) + "})",
            ]
        case Application(fn, arg):
            parts = ["(app", _show_proof(fn, indent + 2), _show_proof(arg, indent + 2) + ")"]
        case Abstraction(premise, label):
            parts = ["(abs", _show_proof(premise, indent + 2), label + ")"]
        case Contraction(premise, label):
            parts = ["(contract", _show_proof(premise, indent + 2), label + ")"]
        case Promotion(premises, inner):
            if premises:
                rows = [
                    _group(["(" + label, _show_proof(sub, indent + 6) + ")"], indent + 4)
                    for label, sub in premises
                ]
                plist = _group(["("] + rows, indent + 2) + ")"
            else:
                plist = "()"
            parts = ["(promote", plist, _show_proof(inner, indent + 2) + ")"]
        case AllTypeIntro(premise, name):
            parts = ["(all-type-intro", _show_proof(premise, indent + 2), name + ")"]
        case AllTermIntro(premise, name, ty):
            parts = [
                "(all-term-intro",
                _show_proof(premise, indent + 2),
                name,
                "{" + show_type(ty) + "})",
            ]
        case AllPredIntro(premise, name, arity):
            tys = ", ".join(show_type(t) for t in arity)
            parts = [
                "(all-pred-intro",
                _show_proof(premise, indent + 2),
                name,
                "[" + tys + "])",
            ]
        case AllTypeElim(premise, ty):
            parts = ["(all-type-elim", _show_proof(premise, indent + 2), "{" + show_type(ty) + "})"]
        case AllTermElim(premise, term):
            parts = ["(all-term-elim", _show_proof(premise, indent + 2), "{" + show_term(term) + "})"]
        case AllPredElim(premise, params, body):
            parts = [
                "(all-pred-elim",
                _show_proof(premise, indent + 2),
                "(" + " ".join(params) + ")",
                "{" + show_formula(body) + "})",
            ]
        case Equality(premise, hole_var, hole, lhs, rhs, ty, direction, trace):
            parts = [
                "(rewrite",
                _show_proof(premise, indent + 2),
                hole_var,
                "{" + show_formula(hole) + "}",
                "{" + show_term(lhs) + "}",
                "{" + show_term(rhs) + "}",
                "{" + show_type(ty) + "}",
                direction,
                _show_trace(trace, indent + 2) + ")",
            ]
        case _:
            raise TypeError(f"not a proof script: {p!r}")
    return _group(parts, indent)


def _show_trace(steps: tuple[TraceStep, ...], indent: int) -> str:
    if not steps:
        return "()"
    rows = [_show_step(s, indent + 2) for s in steps]
    return _group(["("] + rows, indent) + ")"


def _show_step(step: TraceStep, indent: int) -> str:
    match step:
        case Refl():
            return "(refl)"
        case AxiomStep(equation, assignment, pos, orient):
            pairs = " ".join(f"({v} {{{show_term(t)}}})" for v, t in assignment)
            parts = [
                "(axiom",
                equation,
                "(" + pairs + ")",
                _show_pos(pos),
                orient + ")",
            ]
        case BetaStep(pos, direction, term):
            head = "(beta" if direction == "contract" else "(beta-expand"
            parts = [head, _show_pos(pos)]
            if term is not None:
                parts.append("{" + show_term(term) + "}")
            parts[-1] += ")"
        case SymStep(start, steps):
            parts = ["(sym", "{" + show_term(start) + "}", _show_trace(steps, indent + 2) + ")"]
        case TransStep(first, second):
            parts = [
                "(trans",
                _show_trace(first, indent + 2),
                _show_trace(second, indent + 2) + ")",
            ]
        case CongStep(pos, steps):
            parts = ["(cong", _show_pos(pos), _show_trace(steps, indent + 2) + ")"]
        case ExtStep(var, target, steps):
            parts = [
                "(ext",
                var,
                "{" + show_term(target) + "}",
                _show_trace(steps, indent + 2) + ")",
            ]
        case _:
            raise TypeError(f"not a trace step: {step!r}")
    return _group(parts, indent)


def _show_pos(pos: tuple[int, ...]) -> str:
    return "(" + " ".join(str(i) for i in pos) + ")"


def show_script(parsed: ParsedScript) -> str:
    """Print a parsed script; the output reparses to an equal value."""
    chunks: list[str] = []
    sig_default = parsed.signature_entries == _std_entries()
    eq_default = parsed.equations == default_equations
    if not sig_default:
        rows = "\n".join(
            f"  {name} : {show_type(ty)};" for name, ty in parsed.signature_entries
        )
        chunks.append("signature {\n" + rows + "\n}")
    if not sig_default or not eq_default:
        rows = []
        for eq in parsed.equations:
            vars_ = ", ".join(f"{v} : {show_type(t)}" for v, t in eq.vars)
            rows.append(
                f"  {eq.name} ({vars_}) : {show_type(eq.ty)}"
                f" = {show_term(eq.lhs)} => {show_term(eq.rhs)};"
            )
        chunks.append("equations {\n" + "\n".join(rows) + "\n}")
    for name, f in parsed.formulas:
        chunks.append(f"formula {name} = {show_formula(f)};")
    for name, p in parsed.proofs:
        chunks.append(f"proof {name} =\n  {_show_proof(p, 2)};")
    return "\n\n".join(chunks) + "\n"
