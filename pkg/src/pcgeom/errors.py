class PcgeomError(Exception):
    """Base class for workbench errors."""


class JetMismatchError(PcgeomError):
    """Jet operands disagree in variable count, order or center."""


class DomainError(PcgeomError):
    """An analytic primitive was evaluated outside its domain."""


class ArityError(PcgeomError):
    """An expression references a variable unknown to the chart."""


class ChartMismatchError(PcgeomError):
    """Operands live on charts of different dimension."""


class ConstraintError(PcgeomError):
    """A model constructor received data violating its constraints."""


class FrameError(PcgeomError):
    """Adopted-frame construction failed (degenerate or invalid input)."""


class ConfigError(PcgeomError):
    """A JSON config is malformed."""
