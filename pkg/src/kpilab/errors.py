"""Exception taxonomy shared by all kpilab modules.

Contract violations (bad inputs, broken invariants) derive from
``ContractError``; runtime failures of a numerical procedure derive from
``ComputeError``.  The CLI maps these to exit codes 1 and 2 respectively,
and plain I/O failures (``OSError``) to exit code 3.
"""


class KpilabError(Exception):
    """Base class for all kpilab errors."""


class ContractError(KpilabError):
    """An input violated a documented precondition or invariant."""


class SymmetryViolation(ContractError):
    """Spectral coefficients of real data lost Hermitian symmetry."""


class ConstraintViolation(ContractError):
    """The zero-x-mean constraint (or a zero-mean precondition) is violated."""


class DomainError(ContractError):
    """An argument lies outside the mathematical domain of the operation."""


class DomainTooSmall(ContractError):
    """The periodic box is too short for the requested localized profile."""


class GridIncompatible(ContractError):
    """The requested rescaling does not map the grid onto a valid grid."""


class HyperplaneViolation(ContractError):
    """A frequency triple does not lie on the zero-sum hyperplane."""


class DegenerateDerivative(ContractError):
    """inf |phi'| vanishes on the window, so the level-set bound is void."""


class FormatError(ContractError):
    """A binary snapshot or manifest failed structural validation."""


class ComputeError(KpilabError):
    """A numerical procedure failed to produce a trustworthy result."""


class BlowupDetected(ComputeError):
    """The solution exceeded the amplitude guard or became non-finite."""

    def __init__(self, t: float, linf: float):
        self.t = t
        self.linf = linf
        super().__init__(f"solution blew up at t={t:.6g} (linf={linf:.3e})")


class ConvergenceFailure(ComputeError):
    """Grid refinement or bracketing did not converge."""
