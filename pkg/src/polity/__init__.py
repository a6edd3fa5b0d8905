"""Matrix model of influence in a society: power vectors, election support
matrices, family topologies and their small-perturbation limits."""

__version__ = "0.1.0"

from .core import (
    CenteredMatrix,
    DominatedMatrix,
    IndexPartition,
    PoliticsMatrix,
    SubmatrixBlock,
    centered,
    row_rescale,
    validate,
)
from .election import SupportMatrix, garden_support, neumann_inverse, support_matrix
from .families import (
    FamilyTopology,
    enumerate_families,
    family_in_block,
    is_connected,
    is_family,
    upper_class_families,
)
from .perturb import (
    Consensus,
    Decomposition,
    DominatedPower,
    SingularInverseExpansion,
    consensus,
    decompose,
    dominated_power,
    limit_support,
    power_limit_oracle,
    singular_inverse_expansion,
)
from .power import (
    ContractionBound,
    PowerVector,
    contraction_bound,
    iterate_limit,
    power_explicit,
    power_iterative,
)
from .simulate import SimulationResult, simulate_joint, simulate_marginals
from .structures import (
    TreeSpec,
    gen_equality,
    gen_family_tree,
    gen_father_and_sons,
    gen_garden,
    tree_preference_groups,
)
