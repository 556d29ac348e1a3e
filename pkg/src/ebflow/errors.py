"""Exception hierarchy shared by all solver components."""


class EBFlowError(Exception):
    """Base class for every error raised by ebflow."""


class ConfigError(EBFlowError):
    """Bad user configuration (CLI exit code 2)."""


class NumericalError(EBFlowError):
    """Numerical failure (CLI exit code 3)."""


class InconsistentTopology(NumericalError):
    pass


class DegenerateCut(NumericalError):
    pass


class TopologyUnresolvable(NumericalError):
    pass


class BadPerturbation(ValueError, EBFlowError):
    pass


class CFLViolation(NumericalError):
    pass


class SingularStencil(NumericalError):
    pass


class MissingNeighbor(NumericalError):
    pass


class CurvatureUnresolved(NumericalError):
    pass


class InsufficientOscillations(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, max_iter, residual):
        super().__init__(f"no convergence after {max_iter} iterations "
                         f"(relative residual {residual:.3e})")
        self.max_iter = max_iter
        self.residual = residual
