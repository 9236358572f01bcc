"""Exception types shared across the package."""


class RingCavityError(Exception):
    """Base class for all library errors."""


class DomainError(RingCavityError, ValueError):
    """An input lies outside the domain of validity of an operation."""


class UnsupportedConfigError(DomainError):
    """A configuration the closed-form observables cannot represent."""


class AboveThresholdError(RingCavityError):
    """A steady state was requested at or above a critical coupling."""

    def __init__(self, branch: int, beta: float, beta_c: float):
        self.branch = branch
        self.beta = beta
        self.beta_c = beta_c
        super().__init__(
            f"branch {branch} is not below threshold: "
            f"beta = {beta:.6g} >= beta_c{branch} = {beta_c:.6g}"
        )


class UndefinedObservableError(RingCavityError):
    """A normalized observable is 0/0 at this operating point."""


class NumericalError(RingCavityError):
    """A numerical routine failed to meet its accuracy contract."""


class BracketingError(NumericalError):
    """A root bracket does not enclose a sign change."""
