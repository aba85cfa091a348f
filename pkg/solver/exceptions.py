"""Exceptions raised by the solver.

Numerical failures carry the diagnostic values that explain them, so the
commands can print something more useful than a traceback.
"""


class SolverError(Exception):
    """Base class of all solver failures."""


class ConfigurationError(SolverError):
    """Invalid run configuration (exit code 2)."""

    def __init__(self, message, section=None, field=None, line=None):
        self.section = section
        self.field = field
        self.line = line
        where = ".".join(part for part in (section, field) if part)
        if line is not None:
            where = f"{where} (line {line})" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class NumericalError(SolverError):
    """A numerical stage failed its own checks (exit code 1)."""


class QuadratureError(NumericalError):
    def __init__(self, message, partial_value=None):
        self.partial_value = partial_value
        super().__init__(f"{message} (partial value {partial_value!r})")


class TailError(NumericalError):
    def __init__(self, message, required_x=None):
        self.required_x = required_x
        super().__init__(f"{message} (required x = {required_x!r})")


class ExceptionalPotentialError(NumericalError):
    def __init__(self, message, k=None, wronskian=None):
        self.k = k
        self.wronskian = wronskian
        super().__init__(
            f"{message} at k = {k!r} (|W| = {wronskian!r}); "
            "try shifting the profile")


class CoefficientError(NumericalError):
    def __init__(self, message, k=None, defect=None):
        self.k = k
        self.defect = defect
        super().__init__(f"{message} at k = {k!r} (defect {defect!r})")


class BoundStateCountError(NumericalError):
    def __init__(self, found, expected):
        self.found = found
        self.expected = expected
        super().__init__(
            f"Wronskian scan found {found} bound states, "
            f"eigensolver found {expected}")


class SplitError(NumericalError):
    def __init__(self, message, k=None, value=None):
        self.k = k
        self.value = value
        super().__init__(f"{message} at k = {k!r} (value {value!r})")


class VolterraError(NumericalError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(f"{message} (residual {residual!r})")


class RiccatiError(NumericalError):
    pass


class ContourError(NumericalError):
    def __init__(self, message, required_length=None):
        self.required_length = required_length
        super().__init__(
            f"{message} (required contour half-length {required_length!r})")


class KernelError(NumericalError):
    def __init__(self, message, s=None, estimate=None):
        self.s = s
        self.estimate = estimate
        super().__init__(f"{message} at s = {s!r} (estimate {estimate!r})")


class TruncationError(NumericalError):
    def __init__(self, message, value=None, suggested_length=None):
        self.value = value
        self.suggested_length = suggested_length
        super().__init__(
            f"{message} (|F(2L_s)| = {value!r}, try L_s >= {suggested_length!r})")


class DeterminantError(NumericalError):
    pass


class MethodMismatchError(NumericalError):
    def __init__(self, trace_value, difference_value):
        self.trace_value = trace_value
        self.difference_value = difference_value
        super().__init__(
            f"trace formula gives {trace_value!r}, finite differences give "
            f"{difference_value!r}")


class BlockVariantError(NumericalError):
    def __init__(self, values):
        self.values = dict(values)
        listing = ", ".join(f"{key}={value!r}" for key, value in self.values.items())
        super().__init__(f"block determinant variants disagree: {listing}")


class GridError(NumericalError):
    pass


class BlowUpError(NumericalError):
    def __init__(self, message, time=None, growth=None):
        self.time = time
        self.growth = growth
        super().__init__(f"{message} at t = {time!r} (norm growth {growth!r})")
