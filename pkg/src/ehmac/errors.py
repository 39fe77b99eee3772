"""Exception types shared across the toolkit."""


class AdmissibilityError(ValueError):
    """A spend exceeded the energy stored in a battery."""

    def __init__(self, user, spend, level, slot=None):
        self.user = user
        self.spend = spend
        self.level = level
        self.slot = slot
        where = f" at slot {slot}" if slot is not None else ""
        super().__init__(
            f"user {user} overspends{where}: spend {spend!r} > level {level!r}"
        )


class EnumerationBudgetError(RuntimeError):
    """Exact enumeration would exceed the configured sequence budget."""


class PolymatroidError(ValueError):
    """A region failed a structural polymatroid check."""


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested accuracy."""


class ScenarioError(ValueError):
    """A scenario file is malformed; ``path`` locates the offending JSON node."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
