"""Construction and exhaustive verification of q-covering designs."""

from .bounds import BoundsRow, bounds_2n32, bounds_3n8_42, bounds_43
from .design import Design, RecursionTrace
from .designs import build_2n32, build_2n43, build_3n8_42, build_842, build_843, census_842, census_843, embed_design
from .errors import (
    ConstructionError,
    FieldError,
    FormatError,
    GeometryError,
    QCoverError,
    ResourceLimitError,
    SearchBudgetExceeded,
    SearchError,
    SearchUnsolvable,
)
from .gfq import ExtFieldSpec, FieldSpec, ext_field, field_make, field_of_order
from .mrdlift import RankCode, check_lifting_case, gabidulin, lift
from .projgeom import Subspace, enumerate_subspaces, gaussian, rref, theta
from .quadrics import Design632, KleinCtx, build_design_632, hyperplane_census_632
from .spreads import LineSpread, Parallelism, find_parallelism, regular_spread, verify_parallelism, verify_spread
from .verify import CoverageReport, census, verify_covering

__all__ = [
    "BoundsRow",
    "ConstructionError",
    "CoverageReport",
    "Design",
    "Design632",
    "ExtFieldSpec",
    "FieldError",
    "FieldSpec",
    "FormatError",
    "GeometryError",
    "KleinCtx",
    "LineSpread",
    "Parallelism",
    "QCoverError",
    "RankCode",
    "RecursionTrace",
    "ResourceLimitError",
    "SearchBudgetExceeded",
    "SearchError",
    "SearchUnsolvable",
    "Subspace",
    "bounds_2n32",
    "bounds_3n8_42",
    "bounds_43",
    "build_2n32",
    "build_2n43",
    "build_3n8_42",
    "build_842",
    "build_843",
    "build_design_632",
    "census",
    "census_842",
    "census_843",
    "check_lifting_case",
    "embed_design",
    "enumerate_subspaces",
    "ext_field",
    "field_make",
    "field_of_order",
    "find_parallelism",
    "gabidulin",
    "gaussian",
    "hyperplane_census_632",
    "lift",
    "regular_spread",
    "rref",
    "theta",
    "verify_covering",
    "verify_parallelism",
    "verify_spread",
]
