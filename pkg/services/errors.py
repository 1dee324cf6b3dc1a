# services/errors.py
"""
Error hierarchy for the algebra toolkit.

Every error carries a `witness` dict (the first offending elements, indices, levels) so a report can
show WHY a structure was rejected, not only that it was. Three families map onto CLI exit codes:

    StructureError  - a mathematical object fails its axioms (exit 1 as a verdict, 2 as bad input)
    InputError      - unreadable file, unknown catalog key / functor name          (exit 2)
    InternalError   - a construction produced something its own proof rules out     (exit 3)
"""
from typing import Any, Dict, Optional


class AlgebraError(Exception):
    exit_code = 2

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.witness = dict(witness or {})

    @property
    def kind(self) -> str:
        return type(self).__name__

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"error": self.kind, "message": self.message}
        if self.witness:
            out["witness"] = self.witness
        return out


# --- structure errors --------------------------------------------------------------------------

class StructureError(AlgebraError):
    exit_code = 1


class GroupTooLarge(StructureError):
    pass


class NotAssociative(StructureError):
    pass


class NoIdentity(StructureError):
    pass


class NoInverse(StructureError):
    pass


class GeneratorsDoNotGenerate(StructureError):
    pass


class NotAPermutation(StructureError):
    pass


class IndexOutOfRange(StructureError):
    pass


class NotNormal(StructureError):
    pass


class NotAHomomorphism(StructureError):
    pass


class NotAnAction(StructureError):
    pass


class EquivarianceViolation(StructureError):
    pass


class PeifferViolation(StructureError):
    pass


class NotAMorphism(StructureError):
    pass


class NotSurjective(StructureError):
    pass


class NotInjective(StructureError):
    pass


class KernelNotCentral(StructureError):
    pass


class NotNormalSubXMod(StructureError):
    pass


class NotASubXMod(StructureError):
    pass


class NotExactAtT(StructureError):
    pass


class SequenceMismatch(StructureError):
    pass


class NotANullification(StructureError):
    pass


class NotRegularEpiLocalization(StructureError):
    pass


# --- input errors ------------------------------------------------------------------------------

class InputError(AlgebraError):
    exit_code = 2


class ParseError(InputError):
    pass


class UnknownKey(InputError):
    pass


class UnknownFunctor(InputError):
    pass


class MissingNullifier(InputError):
    pass


# --- internal errors ---------------------------------------------------------------------------

class InternalError(AlgebraError):
    exit_code = 3


class InducedMapIllDefined(InternalError):
    pass


# Cokernel / quotient structure maps are induced maps; the guard has its own name in reports.
InducedActionIllDefined = InducedMapIllDefined


class InvariantBroken(InternalError):
    pass
