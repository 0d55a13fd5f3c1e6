"""Design and certification of state-feedback regulators for networked
control loops with random packet loss."""

from .bmi_stab import StabilityResult, bmi_fitness, certify_gain
from .ga import GaConfig, GaRun, ga_minimize, ga_step
from .linalg import (
    NotPositiveDefiniteError,
    SymEig,
    expm,
    min_eigenvalue,
    solve_spd,
    spectral_radius_estimate,
    sym_eig,
)
from .lmi import (
    StabilityCertificate,
    degree_of_infeasibility,
    find_feasible_p,
    verify_certificate,
)
from .lqr import (
    DareNotConvergedError,
    LqrDesign,
    LqrWeights,
    lqr_gain,
    nominal_cost,
    solve_dare,
)
from .plant import (
    ContinuousPlant,
    DiscretePlant,
    SwitchedClosedLoop,
    closed_loop_phi,
    discretize_zoh,
)
from .regpso import (
    RegPsoConfig,
    RegPsoRun,
    SwarmState,
    pso_step,
    regpso_minimize,
    regroup,
    swarm_radius,
)
from .sim import (
    CostEstimate,
    SimTrace,
    expected_itae,
    itae_cost,
    simulate_once,
    trace_to_csv,
)
from .synth import (
    CertificationSettings,
    NoCertifiedDesignError,
    SimSettings,
    SynthConfig,
    SynthesisResult,
    evaluate_weights,
    run_statistics,
    synthesize,
)

__version__ = "0.1.0"
