"""Two-qubit entanglement criteria: Bell-CHSH (Horodecki), linear entropy and
its Q refinement, the teleportation quantity N, checked against concurrence
and PPT."""

from qent.criteria import (
    CriteriaReport,
    MeasurementSettings,
    chsh_optimal_settings,
    chsh_value,
    classify,
    concurrence,
    linear_entropy,
    m_value,
    n_value,
    ppt_check,
    q_value,
)
from qent.states import (
    BlochForm,
    DensityMatrix,
    bloch_decompose,
    mems,
    product_state,
    pure_state,
    purity,
    random_state,
    reconstruct,
    validate,
    werner,
)

__version__ = "0.1.0"
