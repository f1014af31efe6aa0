"""Exception types shared across the toolkit."""


class LevelFormatError(ValueError):
    """Level text violates the format contract (ragged rows, bad counts, ...)."""


class UnknownSymbolError(LevelFormatError):
    def __init__(self, symbol: str, row: int, col: int):
        super().__init__(f"unknown symbol {symbol!r} at row {row}, col {col}")
        self.symbol = symbol
        self.row = row
        self.col = col


class MarkerCountError(LevelFormatError):
    """Start/goal marker count violates the game's structural contract."""


class MixedGameError(ValueError):
    """An operation received levels from different games."""


class PaletteError(KeyError):
    """Palette does not cover the level's alphabet."""


class PatternSetError(ValueError):
    """Malformed pattern set or pattern file."""


class SearchLimitExceeded(RuntimeError):
    """Solvability search hit its state or time budget; result is unknown,
    which is distinct from unsolvable."""

    def __init__(self, expanded: int, elapsed: float):
        super().__init__(f"search limit exceeded after {expanded} states, {elapsed:.2f}s")
        self.expanded = expanded
        self.elapsed = elapsed


class GenerationBudgetError(RuntimeError):
    """No candidate met the target label within the retry budget."""

    def __init__(self, message: str, partial_manifest: dict | None = None):
        super().__init__(message)
        self.partial_manifest = partial_manifest


class WitnessFormatError(ValueError):
    """Witness file cannot be parsed."""


class PointsFormatError(ValueError):
    """Labeled points file cannot be parsed."""
