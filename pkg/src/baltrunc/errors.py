"""Exception hierarchy.

Every failure raised by the library derives from :class:`BaltruncError`, so
callers (the CLI in particular) can map them to exit codes in one place.
"""


class BaltruncError(Exception):
    pass


# numerical kernels
class SingularMatrix(BaltruncError):
    pass


class NoConvergence(BaltruncError):
    pass


class NotSymmetric(BaltruncError):
    pass


class NotPositiveDefinite(BaltruncError):
    pass


# system-level preconditions
class BadDimension(BaltruncError):
    pass


class BadInput(BaltruncError):
    pass


class NotStable(BaltruncError):
    pass


class NotMinimal(BaltruncError):
    pass


class ComplexEigenvalue(BaltruncError):
    pass


# balancing and reduction
class RepeatedHSV(BaltruncError):
    pass


class SplitsMultiplicityGroup(BaltruncError):
    pass


class SingularA22(SingularMatrix):
    pass


class SingularA11(SingularMatrix):
    pass


# arrowhead realizations
class SingularShift(SingularMatrix):
    pass


class PoleHit(SingularMatrix):
    pass


class HypothesisViolated(BaltruncError):
    pass


class ComplexZeros(BaltruncError):
    pass


class RepeatedZeros(BaltruncError):
    pass


class NotCoprime(BaltruncError):
    pass


class DegreeMismatch(BaltruncError):
    pass


# power-network configs
class BadConfig(BaltruncError):
    pass
