"""Numerics for the anomaly of nonlocality.

Bell functionals and local polytopes (:mod:`bellanomaly.boxes`),
measurement optimisation, anomaly scans and the box-set enclosure test
(:mod:`bellanomaly.optimize`), and semiquantum games under LOSR and
one-round LOCC strategies (:mod:`bellanomaly.semiquantum`).
"""

__version__ = "0.1.0"

from .boxes import (
    CHSH_SCENARIO,
    BellFunctional,
    Box,
    LocalModel,
    Scenario,
    bell_value,
    box_from_state,
    canonical_functional,
    is_local,
    kl_to_local,
    local_bound,
    pr_box,
    white_noise,
)
from .errors import (
    AnomalyError,
    DegenerateState,
    Inconclusive,
    InvalidDims,
    NotHermitian,
    ScenarioMismatch,
    TooLarge,
    Unsupported,
)
from .kernels import BACKEND
from .optimize import (
    EnclosureConfig,
    SeeSawConfig,
    anomaly_scan,
    enclosure_test,
    horodecki_chsh,
    maximize_bell,
    qubit_schmidt_family,
    qutrit_schmidt_family,
    violation_probability,
)
from .quantum import (
    DensityOperator,
    Povm,
    PureState,
    entanglement_entropy,
    haar_unitary,
    hermitian_eig,
    kron,
    max_entangled,
    partial_trace,
    product_state,
    schmidt_decompose,
    schmidt_state,
    singlet,
    werner,
)
from .rng import SeededRng
from .semiquantum import (
    LoccStrategy,
    LosrStrategy,
    SemiquantumGame,
    SqCorrelation,
    mdi_witness_game,
    optimize_locc_payoff,
    optimize_losr_payoff,
    sq_correlation,
    sq_payoff,
    teleportation_game,
)
