"""Entanglement and coherence numerics for finite-dimensional multiparty states."""

from .bases import ConditionalProductBasis, computational_cpb, product_cpb, random_cpb
from .catalog import bell, bell_basis, ghz, rho2, w_state
from .coherence import (
    CoherenceResult,
    coherence_pure,
    convex_roof_coherence,
    min_coherence_pure,
    min_relative_coherence,
    relative_coherence,
)
from .entanglement import (
    PureDecomposition,
    REEResult,
    RoofResult,
    SchmidtForm,
    SeparableAnsatz,
    concurrence_2q,
    entanglement_entropy,
    eof_2q,
    eof_convex_roof,
    is_entangled_pure,
    is_gme_pure,
    is_ppt,
    random_density,
    random_product_pure,
    random_pure,
    random_separable,
    relative_entropy_of_entanglement,
    schmidt_coefficients,
    schmidt_decompose,
)
from .entropy import (
    BasisMixture,
    OrthonormalBasis,
    dephase,
    relative_entropy,
    relative_entropy_to_mixtures_numeric,
    shannon_entropy,
    von_neumann_entropy,
)
from .io import StateFileError, loads_state, read_state_file, write_state_file
from .locc import (
    LoccVerdict,
    Verdict,
    complete_product_extension,
    locc_distinguishable,
    product_extension_cpb,
    replay_protocol,
)
from .optimize import OptimizerConfig
from .qmat import DensityMatrix, PureState, partial_trace, partial_transpose, tensor_product
from .verify import TheoremReport, recheck_report, verify_theorem

__version__ = "0.1.0"
