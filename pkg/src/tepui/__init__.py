"""tepui: singular vector bundles, section modules, and anchored bracket
algebroids over polynomial and semialgebraic-cellwise data."""

from .algebroid import (
    AnchoredBracket,
    SectionExpr,
    bracket,
    check_ideal,
    check_jacobi,
    check_leibniz,
    check_weak_jacobi,
    foliation_of,
    quotient_obstruction,
    synthesize_bracket,
    vector_field_commutator,
)
from .bundle import (
    Box,
    Cell,
    CellwiseBundle,
    SignCondition,
    SubbundlePresentation,
    fiber_dim,
    mrank_grid,
    rank_strata,
)
from .constructions import (
    FlatQuotient,
    JetModel,
    PolyMap,
    base_change_comparison,
    jet_module_tensor,
    pullback,
    section_jet_dim,
    tensor,
)
from .dynamics import (
    FPath,
    bott_transport,
    flow,
    leaf_explore,
    rank_constancy_along,
)
from .errors import (
    DomainError,
    FileAccessError,
    InvolutivityError,
    ParseError,
    PartitionError,
    RankDropError,
    TepuiError,
)
from .fpmodules import (
    FPModule,
    fiber_determination_univariate,
    fp_fiber_dim,
    invisible_test,
    module_member,
    module_to_bundle,
)
from .grobner import ModuleBasis, groebner_basis, lift_combination, syzygies
from .polyalg import Polynomial, PolyMatrix, parse_point, parse_polynomial

__version__ = "0.1.0"

__all__ = [
    "AnchoredBracket",
    "Box",
    "Cell",
    "CellwiseBundle",
    "DomainError",
    "FPath",
    "FPModule",
    "FileAccessError",
    "FlatQuotient",
    "InvolutivityError",
    "JetModel",
    "ModuleBasis",
    "ParseError",
    "PartitionError",
    "PolyMap",
    "PolyMatrix",
    "Polynomial",
    "RankDropError",
    "SectionExpr",
    "SignCondition",
    "SubbundlePresentation",
    "TepuiError",
    "base_change_comparison",
    "bott_transport",
    "bracket",
    "check_ideal",
    "check_jacobi",
    "check_leibniz",
    "check_weak_jacobi",
    "fiber_determination_univariate",
    "fiber_dim",
    "flow",
    "foliation_of",
    "fp_fiber_dim",
    "groebner_basis",
    "invisible_test",
    "jet_module_tensor",
    "leaf_explore",
    "lift_combination",
    "module_member",
    "module_to_bundle",
    "mrank_grid",
    "parse_point",
    "parse_polynomial",
    "pullback",
    "quotient_obstruction",
    "rank_constancy_along",
    "rank_strata",
    "section_jet_dim",
    "syzygies",
    "tensor",
    "vector_field_commutator",
    "__version__",
]
