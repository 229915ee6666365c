"""Information cost functions over finite statistical experiments."""

from .approx import SandwichPair, SandwichRow, coarsen, sandwich_report
from .axioms import (
    Axiom,
    AxiomProfile,
    AxiomReport,
    check_axiom,
    reevaluate_witness,
    run_suite,
)
from .blackwell import (
    DominanceResult,
    GarblingKernel,
    PairwiseResult,
    compose,
    dominates,
    garble,
    identity_kernel,
    pairwise_dominates,
    random_kernel,
)
from .cost import (
    ConvexPSCost,
    CostSpec,
    CustomPotential,
    CustomTransform,
    IdentityTransform,
    KLCost,
    KLPotential,
    MaxKLCost,
    MaxRenyiCost,
    PosteriorSeparableCost,
    RenyiCost,
    RenyiLogTransform,
    RenyiPotential,
    ShannonEntropy,
    SubadditivityReport,
    Tsallis,
    cost_from_json,
    cost_to_json,
    eval_cost,
    f_criterion,
    renyi_cost_as_transform_check,
    spec_n_states,
    tsallis_xform_lhs,
    ups_subadditivity_check,
)
from .divergence import (
    DivergenceMeasure,
    DivergenceParam,
    InteriorParam,
    SupParam,
    WeightedKLParam,
    chernoff_information,
    default_param_grid,
    diluted_power_divergence,
    extended_divergence,
    generalized_divergence,
    kl,
    param_from_json,
    param_to_json,
    posterior_divergence,
    privacy_loss,
    renyi,
    sup_divergence,
    unified_divergence,
)
from .experiment import (
    FiniteExperiment,
    PosteriorDistribution,
    dilute,
    experiment_from_posteriors,
    mixture,
    new_experiment,
    posterior_distribution,
    posteriors,
    power,
    product,
    random_experiment,
    restrict_pair,
    uninformative,
)
from .ri_solver import (
    Claim1Row,
    Policy,
    RIProblem,
    SolveOptions,
    SupportRow,
    SymmetricInstance,
    claim1_region,
    foc_root,
    matching_problem,
    maximize_symmetric_value,
    solve,
    support_comparison,
    symmetric_renyi_cost_spec,
    symmetric_value,
    symmetric_value_dalpha,
    symmetric_value_dpi,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
