"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand dimensions are inconsistent."""


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. a non-Hermitian matrix)."""


class ConfigError(ValueError):
    """A run configuration is malformed or violates a field constraint."""


class OracleGuardError(ValueError):
    """Exhaustive search refused because the problem exceeds the desk-scale guard."""
