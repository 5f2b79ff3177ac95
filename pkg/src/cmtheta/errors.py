"""Exception types shared across the package."""


class CmThetaError(Exception):
    """Base class for all package-specific errors."""


class NonconvergentModulus(CmThetaError, ValueError):
    """Theta modulus has nonpositive imaginary part; the series diverges."""


class IndexOutOfRange(CmThetaError, IndexError):
    """Basis index outside [0, mu)."""


class NotInLattice(CmThetaError, ValueError):
    """A point expected to be a lattice element is not one."""


class NonIntegralDegree(CmThetaError, ValueError):
    """2*lambda*Im(conj(omega2)*omega1) is not an integer."""


class BundleMismatch(CmThetaError, ValueError):
    """Operands live on different bundles (level, curve or lattice differ)."""


class NonPeriodicIntegrand(CmThetaError, ValueError):
    """Pairing integrand failed the sampled lattice-periodicity check."""


class NonPeriodicInput(CmThetaError, ValueError):
    """Coefficient extraction fed a function that is not periodic in the cusp variable."""


class UnsupportedIndex(CmThetaError, KeyError):
    """Requested coefficient index outside the series support."""


class ChartSingularity(CmThetaError, ArithmeticError):
    """Chart action evaluated at a pole of its Moebius factor."""


class InputsProportional(CmThetaError, ValueError):
    """Nilpotent pair is proportional; the two-cone check requires independence."""


class NotCommuting(CmThetaError, ValueError):
    """Nilpotent pair does not commute."""


class ConfigError(CmThetaError, ValueError):
    """Invalid run configuration (CLI exit code 2)."""
