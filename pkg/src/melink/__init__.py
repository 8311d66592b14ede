"""Link analysis and modem simulation for magnetoelectric antenna arrays in conductive water."""

from .errors import ConfigError, DomainError, ParseError

__version__ = "0.1.0"

__all__ = ["ConfigError", "DomainError", "ParseError", "__version__"]
