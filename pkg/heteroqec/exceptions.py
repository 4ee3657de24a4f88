class HeteroQECError(Exception):
    pass


class DimensionError(HeteroQECError, ValueError):
    pass


class ParameterError(HeteroQECError, ValueError):
    pass


class ValidationError(HeteroQECError):
    pass


class PreconditionError(HeteroQECError, ValueError):
    pass


class UnsupportedError(HeteroQECError):
    pass


class QubitIndexError(HeteroQECError, IndexError):
    pass


class NumericalError(HeteroQECError, ArithmeticError):
    def __init__(self, message: str, norms: dict = None):
        super().__init__(message)
        self.norms = norms or {}


class DecoderError(HeteroQECError):
    def __init__(self, message: str, trial: int = None):
        super().__init__(message if trial is None else f'{message} (trial {trial})')
        self.trial = trial


class NoCrossingError(HeteroQECError):
    """No crossing of the distance curves inside the simulated range.

    `bound` is 'lower' when the threshold lies above every simulated p (larger codes always win)
    and 'upper' when it lies below every simulated p.
    """

    def __init__(self, bound: str, value: float):
        relation = '>' if bound == 'lower' else '<'
        super().__init__(f'no crossing in range, threshold {relation} {value}')
        self.bound = bound
        self.value = value


class DegenerateFitError(HeteroQECError):
    pass


class ConfigError(HeteroQECError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__('; '.join(self.problems))
