"""Dev scratch: arbitrate corrected closed forms against the integrator."""
import numpy as np

from esdlab import (
    EnvironmentSpec, InitialStateParams, IntegratorConfig, SystemParams,
    build_initial_density, evolve, propagator_for,
)

cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13, max_step=0.02)
rng = np.random.default_rng(7)

def random_x_state(rng):
    w = rng.dirichlet(np.ones(4)) * 3.0
    chi = rng.uniform(0, 2 * np.pi)
    return build_initial_density(InitialStateParams(w[0], w[1], w[2], w[3], chi))

def random_full_state(rng):
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return rho / rho.trace()

def compare(name, system, env, rho0, t_max=5.0, n=41):
    t = np.linspace(0.0, t_max, n)
    traj = evolve(rho0, system, env, t, cfg)
    prop = propagator_for(system, env)
    ana = prop(rho0, t)
    dev = np.max(np.abs(traj.states - ana))
    print(f"{name:55s} max|num-ana| = {dev:.3e}")
    return dev

devs = []
# dissipative, X state, interacting
devs.append(compare("dissipative v=5 g=1 (X state)", SystemParams(0, 5.0),
                    EnvironmentSpec.dissipative(1.0), random_x_state(rng)))
# dissipative, FULL state
devs.append(compare("dissipative v=3.3 g=0.7 (full state)", SystemParams(0, 3.3),
                    EnvironmentSpec.dissipative(0.7), random_full_state(rng), t_max=5/0.7))
# dephasing unequal rates
devs.append(compare("dephasing GA=1.3 GB=0.6 v=4", SystemParams(0, 4.0),
                    EnvironmentSpec.pure_dephasing(1.3, 0.6), random_x_state(rng)))
# correlated decay v=0
devs.append(compare("corr decay g=1 G12=0.8 v=0", SystemParams(0, 0.0),
                    EnvironmentSpec.correlated_decay(1.0, 0.8), random_x_state(rng)))
# correlated decay v=5
devs.append(compare("corr decay g=1 G12=0.8 v=5", SystemParams(0, 5.0),
                    EnvironmentSpec.correlated_decay(1.0, 0.8), random_x_state(rng)))
# correlated decay at the pole G12 == g (v=0 allowed)
devs.append(compare("corr decay g=1 G12=1.0 v=0 (pole)", SystemParams(0, 0.0),
                    EnvironmentSpec.correlated_decay(1.0, 1.0), random_x_state(rng)))
# correlated dephasing v=0
devs.append(compare("corr dephasing GA=GB=1 G0=0.5 v=0", SystemParams(0, 0.0),
                    EnvironmentSpec.correlated_dephasing(1.0, 1.0, 0.5), random_x_state(rng)))
# correlated dephasing v=5 unequal
devs.append(compare("corr dephasing GA=1.2 GB=0.8 G0=0.3 v=5", SystemParams(0, 5.0),
                    EnvironmentSpec.correlated_dephasing(1.2, 0.8, 0.3), random_x_state(rng)))

print("worst:", max(devs))
