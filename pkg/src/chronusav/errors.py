"""Exception hierarchy shared across the toolkit."""


class ChronusError(Exception):
    """Base class for all toolkit errors."""


class MalformedTimestamp(ChronusError):
    """String does not match the second{t} grammar."""


class MalformedInterval(ChronusError):
    """String does not match the second{a}-second{b} grammar."""


class SchemaError(ChronusError):
    """Record has a missing field, wrong type, or unparseable line."""


class ValidationError(ChronusError):
    """Record is well-typed but violates a semantic constraint."""


class DimensionMismatch(ChronusError):
    """Parallel inputs disagree in length."""


class DegenerateAgreement(ChronusError):
    """Chance agreement is exactly 1; kappa is undefined."""


class InvalidConfig(ChronusError):
    """Configuration value outside its legal range."""


class EmptyCorpus(ChronusError):
    """Document-frequency corpus has no documents."""


class EmptyResults(ChronusError):
    """Metric aggregation requires at least one result."""


class GroupSizeMismatch(ChronusError):
    """Completion group does not match the configured group size."""


class UnknownSubtask(ChronusError):
    """No reward weights registered for the subtask."""


class UnknownMetric(ChronusError):
    """Requested caption metric name is not registered."""


class EmptyAnnotation(ChronusError):
    """Annotation carries no segments."""


class UnresolvedQaId(ChronusError):
    """Prediction references a qa_id absent from the QA file."""


class EndpointUnreachable(ChronusError):
    """Model endpoint did not answer after retries."""
