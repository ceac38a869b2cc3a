"""Odometer-based construction sequences: words, parsing, frequencies and Toeplitz augmentation."""
from .odometer import CoefficientSequence, OdoPoint, add, cylinder_measure, regroup, succ, tower_row
from .words import (ConstructionSequence, ExpansionCapError, WordId, block_counts, expand, freq,
                    occurrences, validate)
from .builders import (build_alternating_complement, build_small_fingers, build_two_word,
                       check_tower_budget, minimal_admissible, paint_levels, small_fingers_coeffs)
from .parsing import materialize, parse, phi, phi_from_symbols, psi_window
from .toeplitz import (ToeplitzSpec, aperiodicity_scan, augment, dyadic_spec, per_set,
                       select_essential_periods, toeplitz_window)
from .analysis import check_swp, frequency_profile, measure_bound_check, thin

__all__ = [name for name in dir() if not name.startswith("_")]
