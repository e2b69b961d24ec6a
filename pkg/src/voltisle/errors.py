"""Exception types shared across the pipeline."""


class SchemaError(ValueError):
    """A required column is missing from a timing report header."""


class ReportParseError(ValueError):
    """A timing report could not be parsed into path records."""


class UnmappedEndpointError(ValueError):
    """An endpoint name does not carry the MAC generate-loop pattern."""

    def __init__(self, endpoint: str):
        super().__init__(f"unmapped endpoint: {endpoint!r}")
        self.endpoint = endpoint


class ParameterError(ValueError):
    """An operation was called with out-of-range or inconsistent parameters."""


class CapacityError(ValueError):
    """A partition does not fit in its share of the slice grid."""


class BelowThresholdError(ValueError):
    """Supply voltage at or below the device threshold (crash region)."""


class ConfigError(ValueError):
    """Bad key or value in a pipeline configuration."""


class StageDependencyError(RuntimeError):
    """A pipeline stage is missing an artifact a prior stage produces."""
