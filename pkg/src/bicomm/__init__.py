"""Commutants, bicommutants and module properties of finite-dimensional operator algebras."""

from .algebra import (
    MatrixAlgebra,
    cyclic_membership,
    find_identity,
    generate_algebra,
    is_faithful,
    is_nondegenerate,
    star_closure,
    structure_constants,
)
from .classify import (
    ModuleFamily,
    PropertyReport,
    Verdict,
    is_cogenerator_rel,
    is_completely_subtracing,
    is_generator_rel,
    is_semicogenerator_rel,
    is_semigenerator_rel,
    is_subtracing,
    property_report,
)
from .commutant import (
    DcpVerdict,
    alg_lat_member,
    bicommutant,
    commutant,
    dcp_check,
    identity_suite,
    is_selfadjoint_space,
)
from .errors import (
    BicommError,
    ImplicationError,
    NotInvariantError,
    RepresentationError,
    ShapeError,
    VerificationError,
    WorkspaceError,
)
from .families import (
    T2Rep,
    UXRep,
    build_t2,
    build_ux,
    canonical_t2_family,
    canonical_ux_family,
    counterexample_search,
    refl_closure,
    t2_algebra,
    t2_closed_form,
    ux_algebra,
)
from .hilbmod import (
    Representation,
    adjointable_intertwiners,
    cyclic_submodule,
    direct_sum,
    intertwiners,
    multiple,
    quasi_equivalent,
    reject_module,
    trace_module,
    unitarily_equivalent,
)
from .linalg import DEFAULT_TOL, OperatorSubspace, Subspace, Tolerance, span_of, subspace_equal, subspace_leq

__version__ = "0.1.0"
