"""Simulation of multi-rail photonic states and their GME verifiers."""

__version__ = "0.1.0"

from .fock import SparseState, SystemShape, enumerate_basis, inner_product, multinomial
from .loss import LossChannel, LossComponent, lossy_mixture, lossy_verifier_expectation, sweep_lossy
from .optics import (
    MeasurementSetting,
    apply_local_unitary,
    hadamard_matrix,
    outcome_distribution,
    permanent,
)
from .sources import SourceSpec, db_to_r, generate_postselected, sweep_displacement
from .symmetry import (
    XClass,
    build_Ek_state,
    check_complementary_set,
    check_hw_indices,
    clock_label,
    mode_shift,
    x_class_of,
)
from .verifier import BoundReport, VerifierSpec, biproducible_bound, verifier_expectation
