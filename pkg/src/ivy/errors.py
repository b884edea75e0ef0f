"""Exception types shared across the package."""

from __future__ import annotations


class IvyError(Exception):
    """Base class for all errors raised by this package."""


class TmkSyntaxError(IvyError):
    """The model file is not well-formed (bad JSON, with line/column)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class TmkSchemaError(IvyError):
    """The model file is well-formed but violates the TMK schema."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class MissingSlot(IvyError):
    """An expression referenced a slot absent from the world state."""

    def __init__(self, slot: str):
        self.slot = slot
        super().__init__(f"slot {slot!r} is not present in the world state")


class TypeMismatch(IvyError):
    """An expression combined operands of incompatible kinds."""


class NoMethodForTask(IvyError):
    """Simulation was requested for a task that has no method."""

    def __init__(self, task_id: str):
        self.task_id = task_id
        super().__init__(f"task {task_id!r} has no method")


class MissingInitialState(IvyError):
    """No initial world state was supplied and the model declares no default."""


class ProviderUnavailable(IvyError):
    """The completion provider could not be reached or refused the request."""


class EmptyCompletion(IvyError):
    """The completion provider returned no text."""


class EmptyText(IvyError):
    """Embedding was requested for empty input."""


class EmptyCorpus(IvyError):
    """An index build was requested with no documents."""


class UnparseableLabel(IvyError):
    """A provider completion could not be mapped onto the expected label set."""

    def __init__(self, completion: str, expected):
        self.completion = completion
        self.expected = tuple(expected)
        super().__init__(
            f"completion {completion!r} does not match any of {', '.join(self.expected)}"
        )


class MissingAssociatedMethod(IvyError):
    """A task document has no associated method document."""

    def __init__(self, task_doc_id: str):
        self.task_doc_id = task_doc_id
        super().__init__(f"task document {task_doc_id!r} has no associated method document")


class EmptyReference(IvyError):
    """A metric was requested against an empty reference."""


class PipelineStageError(IvyError):
    """An answer-pipeline stage failed; carries the stage name and cause."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r}: {cause}")
