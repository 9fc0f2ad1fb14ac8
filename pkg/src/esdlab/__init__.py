"""Two interacting qubits in decohering environments: exact propagators,
a cross-checked Lindblad integrator, and concurrence/ESD analysis."""

from .closedform import (
    concurrence_correlated_decay,
    concurrence_correlated_dephasing,
    concurrence_dephasing,
    concurrence_dissipative,
    propagator_for,
    rho_correlated_decay,
    rho_correlated_decay_interacting,
    rho_correlated_dephasing,
    rho_correlated_dephasing_interacting,
    rho_dephasing,
    rho_dissipative,
)
from .liouville import (
    IntegratorConfig,
    Superoperator,
    dissipator,
    evolve,
    hamiltonian_part,
    liouvillian,
)
from .metrics import (
    EntanglementReport,
    Trajectory,
    analyze,
    concurrence_wootters,
    concurrence_xstate,
    esd_onset_dephasing,
)
from .states import (
    Diagnostics,
    EnvironmentSpec,
    EnvModel,
    InitialStateParams,
    SystemParams,
    build_initial_density,
    spin_flip,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "EnvModel",
    "EnvironmentSpec",
    "InitialStateParams",
    "SystemParams",
    "Diagnostics",
    "build_initial_density",
    "spin_flip",
    "validate",
    "Superoperator",
    "IntegratorConfig",
    "hamiltonian_part",
    "dissipator",
    "liouvillian",
    "evolve",
    "Trajectory",
    "EntanglementReport",
    "analyze",
    "concurrence_wootters",
    "concurrence_xstate",
    "esd_onset_dephasing",
    "rho_dissipative",
    "rho_dephasing",
    "rho_correlated_decay",
    "rho_correlated_decay_interacting",
    "rho_correlated_dephasing",
    "rho_correlated_dephasing_interacting",
    "concurrence_dissipative",
    "concurrence_dephasing",
    "concurrence_correlated_decay",
    "concurrence_correlated_dephasing",
    "propagator_for",
]
