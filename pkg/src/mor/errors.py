"""Exception hierarchy shared across the package."""


class MorError(Exception):
    """Base class for all package errors."""


class ParameterError(MorError, ValueError):
    """A numeric or structural parameter is outside its allowed range."""


class CoordinateError(MorError, IndexError):
    """A coordinate index k is outside 1..K."""


class KindError(MorError, TypeError):
    """An operation received a class or label of the wrong kind."""


class ArityError(MorError, ValueError):
    """Two labels (or a label and a class) disagree on output dimension."""


class DomainError(MorError, KeyError):
    """A predictor or witness map is undefined on a required instance."""


class DegenerateLossError(MorError, ValueError):
    """A loss assigns 0 to some pair of distinct labels."""


class ProtocolError(MorError, RuntimeError):
    """An online game rule was violated (bad prediction, wrong feedback)."""


class ExpertBudgetError(MorError, RuntimeError):
    """An expert enumeration would exceed the configured cap."""


class ConfigError(MorError, ValueError):
    """An experiment configuration or descriptor file failed to parse."""


class FitError(MorError, ValueError):
    """Too few usable points remain for a regression fit."""
