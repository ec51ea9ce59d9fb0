"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`SRBMError`.
The CLI maps the three families below onto process exit codes:

* :class:`InvalidInput` -> 2
* :class:`NotCovered` -> 3
* :class:`InternalConsistencyError` -> 4
"""

from __future__ import annotations


class SRBMError(Exception):
    """Base class for all library errors."""


class InvalidInput(SRBMError, ValueError):
    """The caller supplied parameters that violate a precondition."""


class InvalidModel(InvalidInput):
    """A model invariant failed.

    ``failed`` lists the names of the violated conditions.
    """

    def __init__(self, message: str, failed: tuple[str, ...] = ()):
        super().__init__(message)
        self.failed = tuple(failed)


class Degenerate(InvalidModel):
    """A strict inequality holds only within the safety margin."""


class OnCut(InvalidInput):
    """The argument lies on (or too close to) a branch cut."""


class AtPole(InvalidInput):
    """Evaluation requested at a pole."""


class AtKernelZero(InvalidInput):
    """Evaluation of the bivariate transform where the kernel vanishes."""


class PoleOfG(SRBMError, ArithmeticError):
    """The gluing function has a pole or zero at the requested point."""


class PoleOfE(SRBMError, ArithmeticError):
    """The rational function E has a pole at the requested point."""


class AmbiguousNumerical(InvalidInput):
    """A float angle sits on a lattice point but exactness was not declared."""


class NotCovered(SRBMError):
    """The requested object has no closed form in this parameter regime."""


class NoDecoupling(NotCovered):
    """Neither angle condition holds, so no decoupling function exists."""


class InternalConsistencyError(SRBMError, AssertionError):
    """Two routes to the same quantity disagree beyond tolerance."""


class DegreeMismatch(InternalConsistencyError):
    """A constructed polynomial does not have the degree the theory predicts."""


class QuadratureFailure(SRBMError, RuntimeError):
    """An adaptive quadrature could not reach the requested tolerance."""


class RadiusTooSmall(SRBMError, RuntimeError):
    """No usable Cauchy circle fits inside the disc of analyticity."""


class NoConvergence(SRBMError, RuntimeError):
    """An iterative solver did not converge."""


class PushbackDivergence(SRBMError, RuntimeError):
    """The oblique pushback failed to return a state to the quadrant."""

    def __init__(self, message: str, step: int = -1):
        super().__init__(message)
        self.step = step


class NearCoincidence(UserWarning):
    """A sign or equality test was decided on float angles within tolerance."""
