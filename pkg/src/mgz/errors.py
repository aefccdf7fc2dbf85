"""Exception hierarchy shared by every module in the package."""


class MGZError(Exception):
    """Base class for all errors raised by mgz."""


class GraphError(MGZError, ValueError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class UnknownMark(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class NotAPermutation(GraphError):
    pass


class DepthProfileMismatch(MGZError, ValueError):
    pass


class BudgetExceeded(MGZError, RuntimeError):
    pass


class DegreeBoundViolated(MGZError, ValueError):
    pass


class DepthTooSmall(MGZError, ValueError):
    pass


class SupportTooLarge(MGZError, ValueError):
    pass


class RankOutOfRange(MGZError, ValueError):
    pass


class EmptyTypeClass(MGZError, ValueError):
    pass


class MalformedStream(MGZError, ValueError):
    pass


class SlotCollision(MalformedStream):
    pass


class BadMagic(MalformedStream):
    pass


class UnsupportedVersion(MalformedStream):
    pass


class PatternOutOfBounds(MGZError, ValueError):
    pass


class NegativeInput(MGZError, ValueError):
    pass


class InfeasibleCounts(MGZError, ValueError):
    pass


class ParameterOutOfRange(MGZError, ValueError):
    pass


class UnsupportedDepth(MGZError, ValueError):
    pass


class FormatError(MGZError, ValueError):
    """Text input (graph or distribution file) could not be parsed."""
