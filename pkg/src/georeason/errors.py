"""Exception hierarchy shared across the package.

Every error raised on purpose derives from :class:`GeoReasonError`. Errors
that correspond to malformed input additionally derive from
:class:`ValidationError`, which the CLI maps to exit status 2.
"""

from __future__ import annotations


class GeoReasonError(Exception):
    """Base class for all package errors."""


class ValidationError(GeoReasonError, ValueError):
    """Input violates a documented contract."""


class EmptyAfterNormalization(ValidationError):
    def __init__(self, raw: str):
        super().__init__(f"place string {raw!r} is empty after normalization")
        self.raw = raw


class SchemaError(ValidationError):
    """A record in a JSONL/TSV/config file does not match its schema."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path is not None:
            where += f"{path}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)
        self.line = line
        self.path = path
        self.detail = message


class DuplicateId(ValidationError):
    def __init__(self, sample_id: str, line: int | None = None):
        suffix = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate sample id {sample_id!r}{suffix}")
        self.sample_id = sample_id
        self.line = line


class ConfigError(ValidationError):
    pass


# completion parsing


class CompletionParseError(ValidationError):
    pass


class MissingThinkBlock(CompletionParseError):
    pass


class MissingCountryLine(CompletionParseError):
    pass


class MissingCityLine(CompletionParseError):
    pass


class UnknownSampleId(ValidationError, KeyError):
    def __init__(self, sample_id: str):
        super().__init__(f"no localizability score for sample id {sample_id!r}")
        self.sample_id = sample_id

    def __str__(self) -> str:  # KeyError would repr() the message
        return self.args[0]


# optimizer


class GroupTooSmall(ValidationError):
    pass


class SupportMismatch(ValidationError):
    pass


class UnknownPrompt(GeoReasonError, KeyError):
    def __init__(self, prompt_id: str):
        super().__init__(f"prompt {prompt_id!r} is not known to the policy")
        self.prompt_id = prompt_id

    def __str__(self) -> str:
        return self.args[0]


class ClipBoundaryHit(GeoReasonError):
    """A likelihood ratio sits on the clip boundary, where the objective has a kink."""


class GroupConstructionError(GeoReasonError):
    """A prompt cannot be turned into a valid sampling group."""


# curation / evaluation


class NoAnnotations(ValidationError):
    pass


class Unresolvable(GeoReasonError):
    """No coordinate could be obtained for a predicted place."""


class EmptyInput(GeoReasonError):
    pass


class UnknownPredictionId(ValidationError, KeyError):
    def __init__(self, prediction_id: str):
        super().__init__(f"prediction id {prediction_id!r} does not match any sample")
        self.prediction_id = prediction_id

    def __str__(self) -> str:
        return self.args[0]
