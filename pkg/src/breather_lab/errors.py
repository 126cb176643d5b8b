"""Exception hierarchy shared by all modules."""


class BreatherLabError(Exception):
    """Base class for every error raised by the package."""


class InvalidParameters(BreatherLabError, ValueError):
    """Model parameters outside the admissible region (CLI exit code 2)."""


class BetaTooSmall(InvalidParameters):
    pass


class TauOutOfRange(InvalidParameters):
    pass


class ThetaOutOfRange(InvalidParameters):
    pass


class EvenMode(InvalidParameters):
    pass


class ExponentOutOfRange(InvalidParameters):
    pass


class InvalidCoefficient(BreatherLabError, ValueError):
    pass


class ZeroInSpectrum(InvalidParameters):
    def __init__(self, k, value):
        super().__init__(f"|D_{k}(0)| = {abs(value):.6g} <= 2: zero lies in the spectrum of L_{k}")
        self.k = k
        self.value = value


class OrderViolated(BreatherLabError, ValueError):
    pass


class GridMissingAtoms(BreatherLabError, ValueError):
    pass


class SolverFailure(BreatherLabError, RuntimeError):
    pass


class GapPolluted(BreatherLabError):
    """A discrete eigenvalue fell inside the certified spectral gap."""

    def __init__(self, k, eigenvalue, boundary_fraction, gap_tol):
        self.k = k
        self.eigenvalue = eigenvalue
        self.boundary_fraction = boundary_fraction
        self.gap_tol = gap_tol
        self.boundary_localized = boundary_fraction > 0.9
        kind = "boundary-localized" if self.boundary_localized else "bulk"
        super().__init__(
            f"k={k}: eigenvalue {eigenvalue:.6g} inside (-{gap_tol:.4g}, {gap_tol:.4g}), "
            f"{kind} (outer-period mass fraction {boundary_fraction:.3f})"
        )


class DimensionMismatch(BreatherLabError, ValueError):
    pass


class Aliasing(BreatherLabError, ValueError):
    pass


class MissingBasis(BreatherLabError, KeyError):
    pass


class InHMinus(BreatherLabError, ValueError):
    pass


class MaxIterations(BreatherLabError, RuntimeError):
    pass


class DegenerateStart(BreatherLabError, ValueError):
    pass


class ZeroField(BreatherLabError, ValueError):
    pass
