"""Exception types shared across the package.

Every precondition failure raises a distinct class so callers (and the
property suite) can tell a rejected input from a genuine numerical bug.
"""


class QslError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(QslError):
    """Operands live in Hilbert spaces of different dimension."""


class NonHermitianInput(QslError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class NotPositiveSemidefinite(QslError):
    """Eigenvalue below the negative round-off window."""


class NonRealExpectation(QslError):
    """Expectation value carries an imaginary part beyond tolerance."""


class InvalidBasis(QslError):
    """Vector set fails orthonormality or completeness."""


class ZeroEnergyVariance(QslError):
    """Energy variance too small for any speed limit to be meaningful."""


class NonPositiveMeanEnergy(QslError):
    """Mean energy not positive: the mean-energy bound is undefined."""


class ValidityExceeded(QslError):
    """Requested time lies past the trajectory's derivation-validity range."""


class SingularIntegrand(QslError):
    """Correction integrand hit a vanishing denominator with nonzero numerator."""


class DenominatorUnderflow(QslError):
    """Mixed-state correction radical underflowed while the correction is nonzero."""


class NonFiniteSample(QslError):
    """Quadrature input contains NaN or Inf."""


class BlockIndexOutOfRange(QslError):
    """Spin-chain block references a site outside the chain."""


class NotProductState(QslError):
    """State is not a tensor product of single-qubit states."""


class BoundViolation(QslError):
    """A provably nonnegative quantity came out below the round-off window."""


class ConfigError(QslError):
    """Experiment configuration failed validation."""
