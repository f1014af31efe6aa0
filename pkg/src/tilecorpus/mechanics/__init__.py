from .common import DEFAULT_LIMITS, SearchLimits
from .pusher import CratesState, count_pushes, detect_deadlock, make_state
from .solve import VerifyResult, check_solvable, label_solvable, verify_witness
from .witness import (EdgePath, Playthrough, SolutionWitness, dump_witness,
                      load_edge_path, load_playthrough, load_witness)

__all__ = [
    "DEFAULT_LIMITS", "SearchLimits", "CratesState", "count_pushes",
    "detect_deadlock", "make_state", "VerifyResult", "check_solvable",
    "label_solvable", "verify_witness", "EdgePath", "Playthrough",
    "SolutionWitness", "dump_witness", "load_edge_path", "load_playthrough",
    "load_witness",
]
