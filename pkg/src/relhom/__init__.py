"""relhom: exact relative homological algebra over Z/m."""

from .errors import (
    Cancelled,
    DimensionMismatch,
    IllDefinedMorphism,
    InputError,
    ModulusMismatch,
    NoPreimage,
    NotAChainMap,
    NotAComplex,
    NotXAcyclicInput,
    NotXQuasiIso,
    PdExceedsBudget,
    RelhomError,
    UnsupportedSubcategory,
    VerificationFailure,
    WindowTooSmall,
)
from .linalg import diagonalize, kernel_mod, smith_normal_form, solve_linear_mod
from .modules import (
    AbGroup,
    Biproduct,
    ModuleMorphism,
    ZmModule,
    cokernel,
    decompose,
    direct_sum,
    hom_group,
    image,
    is_in_add,
    kernel,
)
from .complexes import (
    ChainMap,
    Complex,
    HomComplex,
    Homotopy,
    cone,
    hom_complex,
    hom_k,
    homology,
    null_homotopy,
    shift,
)
from .relative import (
    AtLeast,
    Fraction,
    ProperResolution,
    SubcatDescriptor,
    is_x_acyclic,
    is_x_quasi_iso,
    lift_through,
    proper_resolution,
    reduce_fraction,
    resolve_complex,
    split_x_quasi_iso,
    x_pd,
    x_precover,
)
from .exact import ExactSequence, ExactnessCertificate
from .cohomology import (
    ExtTable,
    ModuleSES,
    am_sequence,
    classical_ext,
    complete_resolution,
    les_contravariant,
    les_covariant,
    relative_ext,
    tate_ext_complete,
    tate_ext_cone,
)

__version__ = "0.1.0"

__all__ = [
    "Cancelled",
    "DimensionMismatch",
    "IllDefinedMorphism",
    "InputError",
    "ModulusMismatch",
    "NoPreimage",
    "NotAChainMap",
    "NotAComplex",
    "NotXAcyclicInput",
    "NotXQuasiIso",
    "PdExceedsBudget",
    "RelhomError",
    "UnsupportedSubcategory",
    "VerificationFailure",
    "WindowTooSmall",
    "diagonalize",
    "kernel_mod",
    "smith_normal_form",
    "solve_linear_mod",
    "AbGroup",
    "Biproduct",
    "ModuleMorphism",
    "ZmModule",
    "cokernel",
    "decompose",
    "direct_sum",
    "hom_group",
    "image",
    "is_in_add",
    "kernel",
    "ChainMap",
    "Complex",
    "HomComplex",
    "Homotopy",
    "cone",
    "hom_complex",
    "hom_k",
    "homology",
    "null_homotopy",
    "shift",
    "AtLeast",
    "Fraction",
    "ProperResolution",
    "SubcatDescriptor",
    "is_x_acyclic",
    "is_x_quasi_iso",
    "lift_through",
    "proper_resolution",
    "reduce_fraction",
    "resolve_complex",
    "split_x_quasi_iso",
    "x_pd",
    "x_precover",
    "ExactSequence",
    "ExactnessCertificate",
    "ExtTable",
    "ModuleSES",
    "am_sequence",
    "classical_ext",
    "complete_resolution",
    "les_contravariant",
    "les_covariant",
    "relative_ext",
    "tate_ext_complete",
    "tate_ext_cone",
    "__version__",
]
