"""Exception types shared across the package."""


class CrawlerlabError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(CrawlerlabError):
    """A parameter value violates its documented domain."""


class AssumptionViolation(CrawlerlabError):
    """A sufficient condition for an analytic result does not hold.

    Attributes
    ----------
    name : str
        Which assumption failed (e.g. "gain-window").
    detail : str
        Which bound failed and with what values.
    """

    def __init__(self, name, detail):
        self.name = name
        self.detail = detail
        super().__init__(f"{name} violated: {detail}")


class DegenerateEigenstructureError(CrawlerlabError):
    """The requested eigenpair is defective or numerically degenerate."""


class DegenerateHopfError(CrawlerlabError):
    """A linear solve inside the Lyapunov-coefficient computation is singular."""


class StiffnessError(CrawlerlabError):
    """Explicit integration failed; retry with an implicit method."""


class NoCycleError(CrawlerlabError):
    """Too few oscillation events in the trajectory (resting regime)."""


class LayerConvergenceError(CrawlerlabError):
    """The fast-layer flow did not settle within the step budget."""


class NoSwitchingError(CrawlerlabError):
    """The relay never fires: input amplitude below the switching threshold."""


class SaturatedInputError(CrawlerlabError):
    """Relay input never changes sign; fundamental-harmonic formulas invalid."""


class InfeasibleRelayError(CrawlerlabError):
    """No oscillation amplitude solves the balance equations."""


class InvalidBranchError(CrawlerlabError):
    """The balance solution lies on a nonphysical (omega <= 0) branch."""


class ConfigError(CrawlerlabError):
    """A run configuration file is malformed."""
