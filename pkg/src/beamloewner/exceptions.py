"""Exception types shared across the package."""


class BeamLoewnerError(Exception):
    """Base class for all package-specific errors."""


class SingularMatrix(BeamLoewnerError):
    """A linear system or matrix pencil is numerically singular.

    For the beam this typically means the evaluation frequency sits at
    (or extremely close to) a resonance of the undamped structure; for
    reduced models it means the requested state dimension exceeds the
    numerical rank of the data.
    """


class DegenerateParameter(BeamLoewnerError):
    """Physical parameters produce a degenerate spectral quantity
    (e.g. EI + rho*d*s vanishing)."""


class InconsistentConjugate(BeamLoewnerError):
    """A data set contains both s and conj(s) with values that are not
    complex conjugates of each other."""


class NodeCollision(BeamLoewnerError):
    """Left and right interpolation nodes collide (zero Loewner
    denominator)."""


class ImaginaryResidue(BeamLoewnerError):
    """Realification left a non-negligible imaginary part, which means
    the data was not properly conjugate-paired."""


class OverTruncation(BeamLoewnerError):
    """The requested reduced order makes the projected descriptor matrix
    numerically singular."""


class ConfigError(BeamLoewnerError):
    """An experiment configuration file is malformed or inconsistent."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
