"""Exception hierarchy shared by the kernels, the integral engine and the CLI."""


class HermiquadError(Exception):
    """Base class. ``code`` is the stable name written into reports."""

    code = "Error"


class IndexTooLargeError(HermiquadError, ValueError):
    code = "IndexTooLarge"


class FloatOverflowError(HermiquadError, ArithmeticError):
    code = "Overflow"


class GammaPoleError(HermiquadError, ValueError):
    code = "GammaPole"


class NonPositiveDecayError(HermiquadError, ValueError):
    code = "NonPositiveDecay"


class IllConditionedError(HermiquadError, ValueError):
    code = "IllConditioned"


class DivergentError(HermiquadError, ValueError):
    code = "Divergent"


class NotConvergedError(HermiquadError, ArithmeticError):
    code = "NotConverged"


class InvalidInputError(HermiquadError, ValueError):
    code = "InvalidInput"
