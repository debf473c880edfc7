"""Exception types shared across the package; the CLI maps them to exit codes."""


class GraphInputError(ValueError):
    """Unknown vertex or edge id, or a malformed edge."""


class ResourceLimitError(RuntimeError):
    """A desk-scale guard was exceeded; the message echoes the limit."""


class FamilyInvalidError(ValueError):
    """A family violates connectivity or the planar-subcubic requirement."""


class PreconditionError(ValueError):
    """An operation was called on input outside its contract."""


class ConfigurationError(RuntimeError):
    """A configured constant turned out to be wrong for the input at hand."""


class InstanceParseError(GraphInputError):
    """An instance file does not follow the ``v``/``e`` line format."""
