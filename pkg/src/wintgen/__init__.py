"""Curvature of surfaces in Euclidean space: the Wintgen (DDVV) inequality,
Wintgen ideal points and semiparallelity, with the rotation-surface families
of E^4 as worked examples."""
from .errors import (
    DegenerateError,
    DomainError,
    NotWintgenIdealError,
    ParseError,
    SpecError,
    SurfaceError,
    UmbilicalDegenerateError,
)
from .expr import ScalarJet2, eval_jet, evaluate, parse, to_string, variables
from .geometry import (
    SurfacePatch,
    adapted_frame,
    brioschi_curvature,
    eval_jet2,
    evaluate_point,
    first_fundamental_form,
    load_patch,
    patch_from_dict,
    patch_to_dict,
    second_fundamental_form,
    shape_operators,
)
from .invariants import (
    Kind,
    PointClassification,
    canonical_frame,
    classify_point,
    curvature_ellipse,
    curvature_invariants,
    point_kind,
)
from .semiparallel import (
    curvature_action_direct,
    curvature_action_lemma,
    is_semiparallel,
    wintgen_semiparallel_witness,
)
from .vranceanu import (
    closed_form_invariants,
    family_patch,
    first_kind_profile,
    exponential_profile,
    second_kind_profile,
    vranceanu_patch,
)

__version__ = "0.1.0"
