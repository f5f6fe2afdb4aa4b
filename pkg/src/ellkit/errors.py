"""Exception taxonomy.

Every failure this library reports deliberately is an :class:`EllError`.
The hierarchy groups errors by pipeline stage so callers can catch a whole
family (say, everything the proof checker can object to) without naming
each condition, while tests can still pin down the precise one.
"""

from __future__ import annotations


class EllError(Exception):
    """Base class for all errors raised by ellkit."""


class ScriptSyntaxError(EllError):
    """Unparseable source text, with a 1-based line/column location."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class FuelExhausted(EllError):
    """A fuel-bounded computation ran out of steps.

    ``partial`` optionally carries whatever progress report the aborted
    computation could assemble (the stratified normalizer attaches its
    cost profile so far).
    """

    def __init__(self, message: str = "fuel exhausted", partial: object = None) -> None:
        super().__init__(message)
        self.partial = partial


# ---------------------------------------------------------------------------
# Declarations and contexts


class WellformednessFailure(EllError):
    """A signature, equation set, context, or formula fails its sanity judgment."""


class DuplicateName(WellformednessFailure):
    pass


class IllFormedEntryType(WellformednessFailure):
    pass


class ArityMismatch(WellformednessFailure):
    pass


# ---------------------------------------------------------------------------
# Typing of terms and formulas


class TypingError(WellformednessFailure):
    """A term or formula does not check against the ambient declarations."""


class UnboundVariable(TypingError):
    pass


class UnboundTypeVariable(TypingError):
    pass


class UnboundPredicate(TypingError):
    pass


class ApplicationMismatch(TypingError):
    pass


class TypeApplicationMismatch(TypingError):
    pass


class AtomArityMismatch(TypingError):
    pass


class AtomArgumentType(TypingError):
    pass


# ---------------------------------------------------------------------------
# Proof checking


class RuleViolation(EllError):
    """A proof step is used in a way its rule does not permit."""


class LinearityViolation(RuleViolation):
    pass


class NonBangContraction(RuleViolation):
    pass


class PromotionShape(RuleViolation):
    pass


class SideConditionFreeVariable(RuleViolation):
    pass


class IllFormedPayload(RuleViolation):
    pass


class HoleMismatch(RuleViolation):
    pass


class EqualityTraceRejected(RuleViolation):
    """The rewrite trace attached to an equality step does not verify."""


# ---------------------------------------------------------------------------
# Rewrite traces


class TraceError(EllError):
    """A rewrite trace fails to replay."""


class StepMismatch(TraceError):
    pass


class IllTypedInstance(TraceError):
    pass


class NonFreshExtensionVariable(TraceError):
    pass


class PositionOutOfRange(TraceError):
    pass


# ---------------------------------------------------------------------------
# Evaluation and decoding


class DecodeFailure(EllError):
    """A normal form does not have the shape of a numeral."""


class ShapeMismatch(EllError):
    """An extracted program disagrees with its reference behaviour."""
