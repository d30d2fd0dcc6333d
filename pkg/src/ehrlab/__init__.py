"""Game laboratory on rooted coloured trees.

Pebble games with a colouring round, level-censused node types, strategy
engines with machine-checked running invariants, deficiency search, witness
forest constructions, branching-process sampling, and a small monadic
second-order evaluator, plus a CLI and an interactive session service.
"""

__version__ = "0.1.0"

from .colouring import AugmentedPalette, Colouring, Palette, enhance
from .errors import EhrlabError, GuardExceededError
from .games import Player, Verdict, solve_dehr, solve_set_pebble_ehr, types_game_verdict
from .trees import RootedTree, parse_tree, serialize_tree
from .types_engine import TypeTable, census, compute_types

__all__ = [
    "__version__",
    "AugmentedPalette",
    "Colouring",
    "EhrlabError",
    "GuardExceededError",
    "Palette",
    "Player",
    "RootedTree",
    "TypeTable",
    "Verdict",
    "census",
    "compute_types",
    "enhance",
    "parse_tree",
    "serialize_tree",
    "solve_dehr",
    "solve_set_pebble_ehr",
    "types_game_verdict",
]
