"""Bricks and mosaics: permutation representations of finitely presented groups.

Search for partial permutation representations (bricks) compatible with a
set of jump data, glue them into transitive permutation representations
(mosaics), and analyse the resulting permutation groups.
"""

from .brickfinder import (Brick, BrickFinder, PartialCosetTable, SearchConfig, SearchResult,
                          find_bricks, run_search, verify_brick)
from .fileformats import (Problem, ProblemFileError, brick_from_json, brick_to_json, emit_dot,
                          emit_problem, load_fixture, load_problem, parse_problem_file)
from .jumpdata import (CementSet, GroupoidRelator, IncompatibleJumpData, JumpData, JumpDataError,
                       Stay, close_stays, derive_groupoid_relators, factorize_shift,
                       validate_jump_data)
from .mosaic import (ConstructionInstruction, InstructionError, Mosaic, Placement, build_mosaic,
                     connectivity_graph, handle_index_sets, make_circle_instruction,
                     verify_instruction, verify_mosaic)
from .permanalysis import (DegreeSets, PermGroup, alternating_extension_check,
                           contains_alternating, evaluate_word, group_order,
                           minimal_block_system, orbits, realizable_degrees)
from .presentation import Alphabet, MalformedInput, Presentation, normalize_presentation

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "Brick", "BrickFinder", "CementSet", "ConstructionInstruction", "DegreeSets",
    "GroupoidRelator", "IncompatibleJumpData", "InstructionError", "JumpData", "JumpDataError",
    "MalformedInput", "Mosaic", "PartialCosetTable", "PermGroup", "Placement", "Presentation",
    "Problem", "ProblemFileError", "SearchConfig", "SearchResult", "Stay",
    "alternating_extension_check", "brick_from_json", "brick_to_json", "build_mosaic",
    "close_stays", "connectivity_graph", "contains_alternating", "derive_groupoid_relators",
    "emit_dot", "emit_problem", "evaluate_word", "factorize_shift", "find_bricks",
    "group_order", "handle_index_sets", "load_fixture", "load_problem",
    "make_circle_instruction", "minimal_block_system", "normalize_presentation", "orbits",
    "parse_problem_file", "realizable_degrees", "run_search", "validate_jump_data",
    "verify_brick", "verify_instruction", "verify_mosaic",
]
