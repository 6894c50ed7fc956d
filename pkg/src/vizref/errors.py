"""Exception types raised across the package."""


class VizrefError(Exception):
    """Base class for all package-specific errors."""


class OntologySchemaError(VizrefError):
    """Ontology file violates the documented schema."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field is not None:
            message = f"{message} (field: {field})"
        super().__init__(message)


class OntologyCardinalityError(VizrefError):
    """Ontology does not contain exactly the required number of parent slots."""


class EmbeddingFormatError(VizrefError):
    """Embedding file is malformed."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class EmptyTrainingSetError(VizrefError):
    """No usable training utterances remain after filtering."""


class NumericalTrainingError(VizrefError):
    """Training objective became non-finite."""

    def __init__(self, message: str, iteration: int):
        self.iteration = iteration
        super().__init__(f"{message} (iteration {iteration})")


class ModelFormatError(VizrefError):
    """Serialized tagger model is unreadable or from an incompatible template."""


class CorpusIntegrityError(VizrefError):
    """Corpus record violates schema or referential integrity."""

    def __init__(self, message: str, session_id: str | None = None, turn_index: int | None = None):
        self.session_id = session_id
        self.turn_index = turn_index
        where = ""
        if session_id is not None:
            where = f" [session {session_id}" + (f", turn {turn_index}]" if turn_index is not None else "]")
        super().__init__(message + where)


class UnknownSessionError(VizrefError):
    """Session id is not registered with the service."""


class ConfigValidationError(VizrefError):
    """Session or engine configuration value out of range."""
