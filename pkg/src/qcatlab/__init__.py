"""Exact-arithmetic laboratory for quantized cat maps over prime fields.

Builds the finite Heisenberg and metaplectic (SL2) actions in every
line-model, extracts the joint eigenfunctions of the cat map's commutant
torus, and checks the sup-norm bound and value statistics across primes.
"""

from .arith import CyclicCharacter, FieldElement, additive_char, legendre, primes_in
from .groups import (
    CatMap,
    EnhancedLagrangian,
    HeckeTorus,
    HeisenbergElement,
    SympMatrix,
    SymplecticVector,
    build_hecke_torus,
    classify_prime,
    enumerate_lagrangians,
    heis_mul,
    matrix_act,
)
from .models import (
    Intertwiner,
    ModelVector,
    Realization,
    WeilOperator,
    canonical_intertwiner,
    change_realization,
    heisenberg_op,
    weil_op,
)
from .hecke import (
    HeckeEigenfunction,
    HeckeSpectrum,
    eigenfunction,
    hecke_spectrum,
    split_adapted_realization,
    split_closed_form,
)
from .harness import (
    DistributionReport,
    SupremumRecord,
    SweepConfig,
    projector_identity_check,
    supremum_check,
    universal_sweep,
    value_distribution,
)

__version__ = "0.1.0"
