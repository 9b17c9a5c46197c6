"""Spectral differential geometry and verification suites on the flat 2-torus."""

from .fields import (
    Grid,
    ScalarField,
    VectorField,
    OneForm,
    SymTensor2,
    ContraSymTensor2,
    MixedTensor,
    TwoForm,
    Interpolator,
    constant_field,
    field_from_function,
    integrate,
    interpolate,
    partial,
    random_band_limited,
    region_integral,
)
from .riemann import (
    Christoffel,
    Metric,
    VolumeForm,
    christoffel,
    complex_structure,
    covariant_divergence,
    divergence_vector,
    flat_metric,
    laplace_beltrami,
    linearized_scalar_curvature,
    lower_vector,
    metric_lie_derivative,
    metric_lie_derivative_nabla,
    metricity_residual,
    project_compatible,
    raise_oneform,
    raise_sym2,
    ricci_relation_residual,
    scalar_curvature,
    trace_sym2,
)
from .symplectic import (
    TangentVector,
    closedness_defect,
    metric_path,
    nondegeneracy_witness,
    omega,
    tracefree_project,
)
from .diffeo import (
    DiscreteDiffeo,
    DivFreeField,
    div_free_from_stream,
    flow,
    fundamental_vector,
    integration_by_parts_residual,
    lemma1_rhs,
    pairing_kappa,
    pushforward_metric,
    pushforward_tangent,
    skew_defect_mu_h,
)
from .bundles import (
    CircleBundleClass,
    Loop,
    canonical_class,
    connection_alpha,
    constant_curvature_class,
    dalpha_defect,
    divergence_identity_defect,
    frame_transport,
    holonomy_derivative_check,
    identity_class,
    kobayashi_add,
    kobayashi_neg,
    loop_integral_oneform,
    momentum_residual,
)

__version__ = "0.1.0"
