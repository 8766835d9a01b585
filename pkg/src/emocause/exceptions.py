class EmoCauseError(Exception):
    """Base class for package errors."""


class LexiconError(EmoCauseError, ValueError):
    pass


class EmptyCorpusError(EmoCauseError, ValueError):
    pass


class ConfigError(EmoCauseError, ValueError):
    pass


class ModelFormatError(EmoCauseError, ValueError):
    pass


class PipelineError(EmoCauseError):
    """A stage failure, tagged with the stage name."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
