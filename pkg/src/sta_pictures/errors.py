"""Exception types raised across the package."""


class DegenerateHamiltonian(ValueError):
    """The two eigenvalues coincide, so no eigenbasis can be attached."""


class InvalidSchedule(ValueError):
    pass


class GridTooCoarse(RuntimeError):
    """Adjacent eigenvectors on the time grid overlap too little to be tracked."""


class PhaseBranchError(ValueError):
    pass


class StepUnderflow(RuntimeError):
    pass


class InvalidRamp(ValueError):
    pass


class BoxOverflow(RuntimeError):
    """The wavefunction reached the edge of the spatial box."""


class NormDrift(RuntimeError):
    pass


class IncompleteBasis(RuntimeError):
    pass


class GridMismatch(ValueError):
    pass
