"""tilecorpus: generate, solve, and analyze 2D tile-based game levels."""

from .errors import (GenerationBudgetError, LevelFormatError, MarkerCountError,
                     MixedGameError, PaletteError, PatternSetError,
                     PointsFormatError, SearchLimitExceeded,
                     UnknownSymbolError, WitnessFormatError)
from .games import BUILTIN_GAMES, GameDef, get_game
from .level import (Level, Perturbation, enumerate_radius1, hamming_distance,
                    parse_level, sample_radius1, serialize_level)
from .mechanics import (EdgePath, Playthrough, SearchLimits, SolutionWitness,
                        check_solvable, detect_deadlock, label_solvable,
                        verify_witness)
from .patterns import (PatternSet, check_acceptable, extract_patterns,
                       load_patterns, dump_patterns, patterns_for)

__version__ = "0.1.0"
