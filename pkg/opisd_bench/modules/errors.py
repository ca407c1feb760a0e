class OpisdError(Exception):
    """Base class for every error raised by opisd_bench."""


class NetworkFormatError(OpisdError, ValueError):
    pass


class UnknownBranchError(OpisdError, ValueError):
    pass


class NotRadialError(OpisdError, ValueError):
    pass


class BranchNotOpenError(OpisdError, ValueError):
    pass


class NotOnLoopError(OpisdError, ValueError):
    pass


class PowerFlowDivergedError(OpisdError, ValueError):
    pass


class DegenerateProblemError(OpisdError, RuntimeError):
    pass


class EnumerationBudgetExceeded(OpisdError, RuntimeError):
    def __init__(self, count, total, budget):
        self.count = count
        self.total = total
        self.budget = budget
        super().__init__(
            f"enumeration aborted after {count} configurations: "
            f"{total} radial configurations exceed the budget of {budget}"
        )


class NoFeasibleSolutionError(OpisdError, RuntimeError):
    pass


class MetricInputError(OpisdError, ValueError):
    pass


class ReferenceViolationError(OpisdError, ValueError):
    pass


class MixedReferencesError(OpisdError, ValueError):
    pass


class ExperimentConfigError(OpisdError, ValueError):
    pass


class ArchiveMismatchError(OpisdError, RuntimeError):
    pass
