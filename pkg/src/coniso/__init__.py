"""Boolean constraint isomorphism: trichotomy classification, 2-affine
normal forms with a polynomial-time isomorphism decider, and complete
reductions from graph isomorphism, all cross-checked by brute-force
oracles at desk scale."""

from .constraints import (
    BUILTINS,
    Constraint,
    PropertySet,
    TrichotomyClass,
    classify_trichotomy,
    constraint_from_bits,
    detect_properties,
    eval_constraint,
    is_schaefer_set,
    make_constraint,
)
from .instances import (
    Application,
    BoolFunc,
    GuardExceeded,
    InstanceSet,
    align_universes,
    apply_permutation,
    count_sat,
    equivalent,
    func_from_callable,
    instance_set,
    satisfiable,
    satisfying_models,
    substitute,
)
from .closure import maximal_closure, realize
from .isosearch import brute_force_iso
from .affine_nf import (
    AffineNormalForm,
    XorClause,
    iso_2affine,
    normal_form,
    xor_clause_closure,
)
from .graphs import Graph, brute_force_graph_iso, graph, preprocess_pair
from .encoders import (
    encode_h4,
    encode_oneinthree,
    encode_or,
    encode_xor3,
)
from .reduction import (
    ReductionOutput,
    attach_gadget,
    build_sid,
    find_gadget,
    lift_constants,
    reduce_gi_to_iso,
    witness_substitution,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
