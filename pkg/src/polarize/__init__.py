"""Geometric opinion-dynamics model: spherical intervention updates, influencer
strategies, polarization metrics, and a scenario-driven CLI."""

from .duel import (
    ConeRegion,
    DuelConfig,
    SpanDecomposition,
    cone_distance,
    cone_membership,
    contraction_certificate,
    decompose,
    duel_diagnostics,
    xi_bound,
)
from .dynamics import (
    AlternatingPairSchedule,
    ExplicitSchedule,
    FixedSchedule,
    IIDUniformSchedule,
    PlanSchedule,
    PopulationState,
    RandomPairSchedule,
    Schedule,
    Trajectory,
    converged_pairs,
    run,
    step,
)
from .errors import ConfigError, GuardError
from .geometry import (
    angle,
    critical_angle,
    intervene,
    intervene_many,
    orientation_sign_2d,
    pull,
    sample_uniform_sphere,
)
from .metrics import (
    PolarizationReport,
    max_pair_disagreement,
    polarization_report,
    rho_topic,
    rho_total,
    two_cluster_assignment,
)
from .strategies import (
    Hemisphere,
    InterventionPlan,
    LabeledPoint,
    SphericalCap,
    cap_parameters,
    densest_hemisphere_exact,
    densest_hemisphere_heuristic,
    halfspace_agreement_count,
    halfspace_to_hemisphere_axis,
    hemisphere_count,
    hemisphere_feasible,
    one_agent_intervention,
    one_agent_other_value,
    plan_convergence,
    polarization_cost,
    reduce_agreement_to_hemisphere,
    spherical_cap_intervention,
    two_agent_intervention,
    two_agent_vectors,
    uplift,
    uplift_best_tilt,
    uplift_max,
)

__version__ = "0.1.0"
