"""Exception hierarchy shared by every stage of the pipeline.

The CLI prints the class name of any :class:`TemporalQAError` it catches, so
names here are part of the command-line contract.
"""


class TemporalQAError(Exception):
    """Base class for all data errors raised by the package."""


class _LineError(TemporalQAError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        self.detail = detail
        msg = f"line {line_no}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class MalformedRecord(_LineError):
    pass


class SchemaViolation(_LineError):
    pass


class EmptyInput(TemporalQAError):
    pass


class EmptyLabel(TemporalQAError):
    pass


class EmptyPhrase(TemporalQAError):
    pass


class WrongArity(TemporalQAError):
    pass


class ArityMismatch(TemporalQAError):
    pass


class IdenticalActions(TemporalQAError):
    pass


class DuplicateChoice(TemporalQAError):
    pass


class EmptyCorpus(TemporalQAError):
    pass


class SinkFailure(TemporalQAError):
    pass


class UnknownId(TemporalQAError):
    pass


class DuplicatePrediction(TemporalQAError):
    pass


class UnparseableResponse(TemporalQAError):
    pass
