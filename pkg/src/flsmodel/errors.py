"""Exception hierarchy shared by every flsmodel module."""

from __future__ import annotations


class FlsError(Exception):
    """Base class for all flsmodel errors."""


# -- schema definition -------------------------------------------------------

class SchemaError(FlsError):
    pass


class DuplicateSetName(SchemaError):
    pass


class UnknownRoleTarget(SchemaError):
    pass


class IsACycle(SchemaError):
    pass


class SchemaMismatch(FlsError):
    """The graph's schema lacks a set or attribute an operation relies on."""


# -- graph mutation ----------------------------------------------------------

class GraphError(FlsError):
    pass


class UnknownSet(GraphError, LookupError):
    pass


class UnknownId(GraphError, LookupError):
    pass


class AttributeTypeMismatch(GraphError, TypeError):
    pass


class UnknownAttribute(AttributeTypeMismatch):
    pass


class MissingRequiredAttribute(GraphError):
    pass


class ConstraintViolation(GraphError, ValueError):
    pass


class RoleTypeMismatch(GraphError):
    pass


class MissingRole(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class HasIncidentRelationships(GraphError):
    pass


class FrozenGraph(GraphError):
    """Mutation attempted on a snapshot."""


class InvalidGraph(GraphError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"graph has {len(report.violations)} violation(s)")


# -- animation / interpolation -----------------------------------------------

class UnknownChannel(FlsError, ValueError):
    pass


class DuplicateKeyTime(FlsError):
    pass


class InvalidKeyframe(FlsError, ValueError):
    pass


class OutOfSegment(FlsError, ValueError):
    pass


class MissingGeometry(FlsError):
    pass


# -- path generation ---------------------------------------------------------

class EmptyFrame(FlsError, ValueError):
    pass


class NotCompiled(FlsError):
    pass


# -- MRI ---------------------------------------------------------------------

class OutOfBounds(FlsError, ValueError):
    pass


class UnmappedIntensity(FlsError, LookupError):
    pass


# -- parsing / persistence ---------------------------------------------------

class ParseError(FlsError, ValueError):
    """Malformed input. ``line`` is 1-based for text, ``offset`` a byte offset for binary."""

    def __init__(self, reason: str, line: int | None = None, offset: int | None = None):
        self.reason = reason
        self.line = line
        self.offset = offset
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif offset is not None:
            where = f"byte {offset}: "
        super().__init__(where + reason)


class MissingHeader(ParseError):
    pass


class NonFiniteValue(ParseError):
    pass


class CountMismatch(ParseError):
    pass


class UnknownSchemaReference(ParseError):
    pass


class BadMagic(ParseError):
    pass


class VersionUnsupported(ParseError):
    pass


class TruncatedFile(ParseError):
    pass
