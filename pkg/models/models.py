from enum import Enum


class CausalCharacter(str, Enum):
    spacelike = "spacelike"
    timelike = "timelike"
    null = "null"
    zero = "zero"


class StructureKind(str, Enum):
    half_lightlike = "half_lightlike"
    non_degenerate = "non_degenerate"
    co_isotropic = "co_isotropic"


class DirectionKind(str, Enum):
    degenerate = "degenerate"
    nondegenerate = "nondegenerate"


class Backend(str, Enum):
    jet = "jet"
    fd = "fd"
    both = "both"


class Verdict(str, Enum):
    true = "true"
    false = "false"
    # every witness operator vanishes, the class holds vacuously
    indeterminate_true = "indeterminate_true"
    skipped = "skipped"


class CheckStatus(str, Enum):
    passed = "pass"
    failed = "fail"
    skipped = "skipped"


class CheckName(str, Enum):
    frame = "frame"
    identities = "identities"
    planar_degenerate = "planar_degenerate"
    planar_nondegenerate = "planar_nondegenerate"
    theorem_degenerate = "theorem_degenerate"
    theorem_nondegenerate = "theorem_nondegenerate"
    geodesic_h = "geodesic_h"
    vertex_degenerate = "vertex_degenerate"
    vertex_nondegenerate = "vertex_nondegenerate"
    corollary_radical_shape = "corollary_radical_shape"
    proposition_screen_geodesic = "proposition_screen_geodesic"
    equivalence_degenerate = "equivalence_degenerate"
    totally_geodesic = "totally_geodesic"
    totally_umbilical = "totally_umbilical"
    minimal = "minimal"
    irrotational = "irrotational"
    screen_conformal = "screen_conformal"
    null_curvature_theorem = "null_curvature_theorem"
    gauss_identity = "gauss_identity"
    implications = "implications"
    gauge = "gauge"
    backend_fd = "backend_fd"
    backend_trace = "backend_trace"
