"""Reproductions of the divergent examples and the positive polyhedral-cone runs."""

from projlab.experiments.conified import ConifiedRun, ConifiedRunSpec, conified_run
from projlab.experiments.flat import FlatRun, FlatRunSpec, RecurrenceError, flat_gamma_sums, flat_recurrence_run
from projlab.experiments.l2 import (
    L2CounterexampleSpec,
    l2_closed_form,
    l2_simulated,
    l2_step_norm_sq,
    l2_step_norms,
    lower_bound,
    max_closed_form_deviation,
)
from projlab.experiments.polyhedral import PolyhedralRun, positive_polyhedral_run, random_cone

__all__ = [
    "ConifiedRun", "ConifiedRunSpec", "FlatRun", "FlatRunSpec", "L2CounterexampleSpec",
    "PolyhedralRun", "RecurrenceError", "conified_run", "flat_gamma_sums", "flat_recurrence_run", "l2_closed_form",
    "l2_simulated", "l2_step_norm_sq", "l2_step_norms", "lower_bound", "max_closed_form_deviation",
    "positive_polyhedral_run", "random_cone",
]
