"""crystalwalk: random walks in Weyl chambers via crystal combinatorics.

Builds minuscule crystals and their tensor words for the classical types,
applies the generalized Pitman transform, assembles the exact transition
kernels of the ambient walk and the chamber-valued chain, and verifies
the Doob-transform, intertwining, exit-probability, and asymptotic
multiplicity identities by exact counting and seeded Monte Carlo.
"""

__version__ = "0.1.0"

from .crystal import (
    Crystal,
    TensorWord,
    apply_e,
    apply_f,
    decompose_tensor_power,
    direct_sum,
    extract_component,
    is_highest,
    minuscule_crystal,
    pitman_transform,
    tensor_eps_phi,
    word,
    word_from_weights,
)
from .errors import (
    ChamberDomainError,
    ConfigError,
    CrystalWalkError,
    NotMinusculeError,
    ResourceLimitError,
    UnsupportedTypeError,
)
from .rootsystem import (
    RootSystemSpec,
    Weight,
    build_root_system,
    format_weight,
    is_minuscule,
    minuscule_indices,
    parse_weight,
    weight,
)
from .spectral import (
    SpectralParams,
    crystal_character,
    letter_distribution,
    make_params,
    nabla,
    psi,
    solve_x_from_t,
    t_from_drift_direction,
    weyl_character,
    weyl_dimension,
)

__all__ = [
    "Crystal",
    "TensorWord",
    "RootSystemSpec",
    "SpectralParams",
    "Weight",
    "apply_e",
    "apply_f",
    "build_root_system",
    "crystal_character",
    "decompose_tensor_power",
    "direct_sum",
    "extract_component",
    "format_weight",
    "is_highest",
    "is_minuscule",
    "letter_distribution",
    "make_params",
    "minuscule_crystal",
    "minuscule_indices",
    "nabla",
    "parse_weight",
    "pitman_transform",
    "psi",
    "solve_x_from_t",
    "t_from_drift_direction",
    "tensor_eps_phi",
    "weight",
    "weyl_character",
    "weyl_dimension",
    "word",
    "word_from_weights",
    "ChamberDomainError",
    "ConfigError",
    "CrystalWalkError",
    "NotMinusculeError",
    "ResourceLimitError",
    "UnsupportedTypeError",
]
