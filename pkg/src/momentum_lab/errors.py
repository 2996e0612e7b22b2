"""Exception hierarchy shared by all modules."""


class MomentumLabError(Exception):
    """Base class for every error raised by momentum_lab."""


class DimensionMismatch(MomentumLabError, ValueError):
    pass


class SingularInput(MomentumLabError, ValueError):
    pass


class NotPositiveDefinite(MomentumLabError, ValueError):
    pass


class DomainError(MomentumLabError, ValueError):
    pass


# symplin
class NotInvolution(MomentumLabError, ValueError):
    pass


class NotLagrangian(MomentumLabError, ValueError):
    pass


class NotComplementary(MomentumLabError, ValueError):
    pass


# geomcone
class DimensionTooLarge(MomentumLabError, ValueError):
    pass


class EmptyInput(MomentumLabError, ValueError):
    pass


# liecore / iwasawa
class UnsupportedFamily(MomentumLabError, KeyError):
    pass


class GenericityFailure(MomentumLabError, RuntimeError):
    pass


class NotInAlgebra(MomentumLabError, ValueError):
    pass


class NotInGroup(MomentumLabError, ValueError):
    pass


# leaf
class NotCompact(MomentumLabError, ValueError):
    pass


class NotInTorus(MomentumLabError, ValueError):
    pass


class NotInCompactAlgebra(MomentumLabError, ValueError):
    pass


# localmodel
class OutOfChart(MomentumLabError, ValueError):
    pass


# kostant
class RankTooLarge(MomentumLabError, ValueError):
    pass
