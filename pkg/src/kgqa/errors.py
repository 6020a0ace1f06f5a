"""Exception hierarchy shared by all kgqa subsystems.

Every error carries a stable machine-readable ``code`` so the HTTP service
can map failures to structured payloads without string matching.
"""


class KgqaError(Exception):
    """Base class for all kgqa errors."""

    code = "error"


class TripleParseError(KgqaError):
    code = "triple-parse"

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class CycleError(KgqaError):
    """An ``is_a`` cycle was introduced; names the offending cycle."""

    code = "isa-cycle"

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("is_a cycle: " + " -> ".join(self.cycle))


class UnknownEntityError(KgqaError):
    code = "not-found"

    def __init__(self, entity_id):
        self.entity_id = entity_id
        super().__init__(f"unknown entity: {entity_id!r}")


class LinkFailureError(KgqaError):
    """No KG entity matches a query phrase; carries the canonical form."""

    code = "link-failure"

    def __init__(self, phrase):
        self.phrase = phrase
        super().__init__(f"cannot link phrase to any entity: {phrase!r}")


class FrozenGraphError(KgqaError):
    code = "frozen-graph"


class SnapshotFormatError(KgqaError):
    code = "snapshot-format"


class ConllParseError(KgqaError):
    code = "annotation-parse"

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class AnnotationServiceError(KgqaError):
    code = "annotation-service"


class PatternSyntaxError(KgqaError):
    code = "pattern-syntax"

    def __init__(self, pattern, position, message):
        self.pattern = pattern
        self.position = position
        super().__init__(f"{message} at position {position} in {pattern!r}")


class UnsupportedQueryError(KgqaError):
    """No extraction pattern applies; lists the chunks that were detected."""

    code = "unsupported-query"

    def __init__(self, message, chunks=()):
        self.chunks = list(chunks)
        detail = ""
        if self.chunks:
            detail = " (detected: " + ", ".join(
                f"{c.kind}[{c.text}]" for c in self.chunks) + ")"
        super().__init__(message + detail)


class EmbeddingFormatError(KgqaError):
    code = "embedding-format"

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class DatasetError(KgqaError):
    code = "dataset"


class TrainingError(KgqaError):
    code = "training"


class ModelFormatError(KgqaError):
    code = "model-format"


class ValidationError(KgqaError):
    code = "validation"
