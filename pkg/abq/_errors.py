class AbqError(Exception):
    pass


class DimensionError(AbqError, ValueError):
    def __init__(self, message: str, layer: int = None):
        super().__init__(message)
        self.layer = layer


class ProtocolError(AbqError):
    pass


class ConfigError(AbqError, ValueError):
    pass


class ValidationError(AbqError, ValueError):
    pass


class NumericError(AbqError, ArithmeticError):
    def __init__(self, message: str, index: int = None):
        super().__init__(message)
        self.index = index


class InsufficientDataError(AbqError):
    pass


class ResourceError(AbqError):
    pass


class IntegrityError(AbqError):
    pass


class ParseError(AbqError, ValueError):
    def __init__(self, message: str, path: str = None, line: int = None):
        if path is not None:
            message = f'{path}:{line}: {message}' if line is not None else f'{path}: {message}'
        super().__init__(message)
        self.path = path
        self.line = line


class TrainingAborted(AbqError):
    def __init__(self, message: str, records=()):
        super().__init__(message)
        self.records = list(records)


class EvaluationAborted(AbqError):
    def __init__(self, message: str, summary=None):
        super().__init__(message)
        self.summary = summary
