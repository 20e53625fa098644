"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A build/configuration parameter is outside the supported range."""


class DomainError(ValueError):
    """An operation argument violates its mathematical domain."""


class ContractViolationError(ValueError):
    """An input object breaks an invariant it was required to satisfy."""


class ImpossibleOutcomeError(RuntimeError):
    """A conditional update was requested for an outcome of (numerically) zero probability."""


class DegenerateProbabilityError(ValueError):
    """A probability of exactly 0 or 1 makes the sensitivity formula singular."""
