"""Generalized Rudin-Shapiro sequences, their discrete correlation, and related bounds."""

from corrlab.sequences import (
    Factor,
    GTable,
    IidRandom,
    PrimeGRS,
    SpecError,
    SquarefreeGRS,
    ThueMorse,
    Word,
    eval_a,
    generate_prefix,
    load_spec,
    validate_admissible,
)
from corrlab.measures import ShiftVector, corr_sum, d_window_min, normalize_shift

__version__ = "0.1.0"
