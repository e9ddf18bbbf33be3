"""Exception hierarchy shared by every module."""


class AncrcError(Exception):
    """Base class for all library errors."""


class SingularMatrix(AncrcError):
    pass


class IllConditioned(AncrcError):
    pass


class DegenerateLeadingCoefficient(AncrcError):
    pass


class IndexOutOfRange(AncrcError):
    pass


class BasisMismatch(AncrcError):
    pass


class NotGeneric(AncrcError):
    """Weights hit a resonance (vanishing tangent weight and the like)."""


class GammaPole(AncrcError):
    pass


class NearSingularPoint(AncrcError):
    pass


class IntegerDifference(AncrcError):
    pass


class DomainNotCovered(AncrcError):
    pass


class SegmentHitsPuncture(AncrcError):
    pass


class AtPuncture(AncrcError):
    pass


class DegenerateCriticalPoints(AncrcError):
    pass


class PoleInQuantumSum(AncrcError):
    pass


class SineZero(AncrcError):
    pass


class ZeroWeight(AncrcError):
    pass


class SectorViolation(AncrcError):
    pass


class OracleNonConvergence(AncrcError):
    pass


class ConfigError(AncrcError):
    pass
