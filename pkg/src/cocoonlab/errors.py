"""Exception classes shared across the package."""


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a usable result (CLI exit 3)."""


class NonConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap without converging."""


class PairingError(NumericalError):
    """A spectrum could not be closed into conjugate pairs at the given tolerance."""
