# ============================================================================
# ERRORS
# ============================================================================
# Exception hierarchy for the rounding pipeline. Every error records the
# module it came from so the CLI can report "<module>: <message>".

from typing import Optional


class SpecRoundError(Exception):
    """Base class for every error raised by the pipeline"""

    def __init__(self, message: str, module: str = "rounding"):
        super().__init__(message)
        self.module = module

    def __str__(self) -> str:
        return f"{self.module}: {self.args[0]}"


class InvalidParameter(SpecRoundError, ValueError):
    """A tunable is outside its admissible range"""


class InvalidInput(SpecRoundError, ValueError):
    """Input data violates the data set invariants or cannot be parsed"""


class KTooLarge(SpecRoundError, ValueError):
    """A neighbour count or eigenvector count exceeds what n allows"""


class NonFiniteInput(SpecRoundError, ValueError):
    """Coordinates or similarities contain NaN or infinity"""


class IsolatedVertex(SpecRoundError):
    """A point has zero degree in the similarity graph"""

    def __init__(self, index: int, module: str = "graph"):
        super().__init__(
            f"point {index} has zero degree; the similarity graph isolates it",
            module,
        )
        self.index = index


class SolverFailure(SpecRoundError):
    """The eigensolver did not converge"""


class QOutOfRange(SpecRoundError, ValueError):
    """The number of leading eigenvectors is outside [2, K]"""


class LengthMismatch(SpecRoundError, ValueError):
    """Two partitions or data blocks cover different numbers of points"""


class EmptyData(SpecRoundError, ValueError):
    """A model was asked to fit zero points or zero features"""


class SingleCluster(SpecRoundError):
    """The secondary conditionals of the tree extension need at least two cells"""


class NonFiniteLikelihood(SpecRoundError):
    """Some point has probability zero under every latent state"""

    def __init__(self, message: str, point: Optional[int] = None, module: str = "ltm"):
        super().__init__(message, module)
        self.point = point


class KOutOfRange(SpecRoundError, ValueError):
    """The requested cluster count is outside [2, K]"""
