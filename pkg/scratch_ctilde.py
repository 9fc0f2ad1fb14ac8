"""Dev scratch: concurrence evaluators vs xstate(closed-form state), and
printed-vs-corrected misprint arbitration."""
import math
import numpy as np

from esdlab import (
    EnvironmentSpec, InitialStateParams, IntegratorConfig, SystemParams,
    build_initial_density, evolve, propagator_for,
    concurrence_dissipative, concurrence_dephasing,
    concurrence_correlated_decay, concurrence_correlated_dephasing,
    concurrence_xstate,
)

t = np.linspace(0, 5, 201)
rng = np.random.default_rng(3)

def check(name, ct_vals, system, env, a, chi):
    rho0 = build_initial_density(InitialStateParams.one_parameter_family(a, chi))
    prop = propagator_for(system, env)
    states = prop(rho0, t)
    ref = np.array([concurrence_xstate(s) for s in states])
    dev = np.max(np.abs(ct_vals - ref))
    print(f"{name:45s} max dev vs xstate(rho) = {dev:.3e}")
    return dev

a, chi = 0.3, 1.1
print("-- evaluators vs analytic states --")
check("dissipative", concurrence_dissipative(a, chi, 5.0, 1.0, t),
      SystemParams(0, 5.0), EnvironmentSpec.dissipative(1.0), a, chi)
check("dissipative gamma=0", concurrence_dissipative(a, chi, 2.0, 0.0, t),
      SystemParams(0, 2.0), EnvironmentSpec.dissipative(0.0), a, chi)
check("dephasing", concurrence_dephasing(a, chi, 4.0, 1.0, t),
      SystemParams(0, 4.0), EnvironmentSpec.pure_dephasing(1.0), a, chi)
check("dephasing v=0.3 (hyperbolic)", concurrence_dephasing(a, chi, 0.3, 1.0, t),
      SystemParams(0, 0.3), EnvironmentSpec.pure_dephasing(1.0), a, chi)
check("corr decay v=0", concurrence_correlated_decay(a, chi, 1.0, 0.8, 0.0, t),
      SystemParams(0, 0.0), EnvironmentSpec.correlated_decay(1.0, 0.8), a, chi)
check("corr decay v=5", concurrence_correlated_decay(a, chi, 1.0, 0.8, 5.0, t),
      SystemParams(0, 5.0), EnvironmentSpec.correlated_decay(1.0, 0.8), a, chi)
check("corr dephasing v=0", concurrence_correlated_dephasing(a, chi, 1.0, 0.2, 0.0, t),
      SystemParams(0, 0.0), EnvironmentSpec.correlated_dephasing(1.0, 1.0, 0.2), a, chi)
check("corr dephasing v=5", concurrence_correlated_dephasing(a, chi, 1.0, 0.2, 5.0, t),
      SystemParams(0, 5.0), EnvironmentSpec.correlated_dephasing(1.0, 1.0, 0.2), a, chi)

print("-- misprint arbitration (vs numeric integrator) --")
cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13, max_step=0.02)

# (a) zeta factor: printed Eq. (25) vs corrected (=printed/2)
def ctilde_corr_decay_literal_zeta(a, chi, g, G, v, tt):
    tt = np.asarray(tt, float)
    with np.errstate(over='ignore'):
        zeta_printed = np.exp(-g*tt)*(((1+G/g)/(1-G/g))*(np.exp((1-G/g)*g*tt)-1)
                                      - ((1-G/g)/(1+G/g))*(np.exp((1+G/g)*g*tt)-1))
        kappa = (a/3)*np.exp(-2*g*tt)*(1+((1+G/g)/(1-G/g))*(np.exp((1-G/g)*g*tt)-1)
                                       + ((1-G/g)/(1+G/g))*(np.exp((1+G/g)*g*tt)-1)) \
                + (2/3)*np.exp(-g*tt)*(np.cosh(G*tt)-math.cos(chi)*np.sinh(G*tt))
    first = np.sqrt((math.cos(chi)*np.cosh(G*tt)-np.sinh(G*tt)+a*zeta_printed)**2
                    + np.cos(2*v*tt)**2*math.sin(chi)**2)
    return (2/3)*np.exp(-g*tt)*(first - np.sqrt(np.clip(3*a*(1-kappa), 0, None)))

rho0 = build_initial_density(InitialStateParams.one_parameter_family(0.3, math.pi/4))
tt = np.linspace(0, 4, 81)
traj = evolve(rho0, SystemParams(0, 0.0), EnvironmentSpec.correlated_decay(1.0, 0.8), tt, cfg)
num_ct = traj.ctilde
lit = ctilde_corr_decay_literal_zeta(0.3, math.pi/4, 1.0, 0.8, 0.0, tt)
mine = concurrence_correlated_decay(0.3, math.pi/4, 1.0, 0.8, 0.0, tt)
print(f"zeta: corrected dev={np.max(np.abs(mine-num_ct)):.2e}  printed dev={np.max(np.abs(lit-num_ct)):.2e}")

# (b) Eq. (33) printed Omega' = sqrt(4v^2 - (G-G0)) [no square] vs corrected
def ctilde_corr_deph_literal(a, chi, G, G0, v, tt):
    tt = np.asarray(tt, float)
    g = G - G0
    om = np.sqrt(complex(4*v*v - g))          # as printed: dimensionally garbled
    osc = (np.cos(om*tt) - (g/om)*np.sin(om*tt)).real
    first = np.sqrt(np.exp(-4*g*tt)*math.cos(chi)**2 + np.exp(-2*g*tt)*math.sin(chi)**2*osc**2)
    return (2/3)*(first - math.sqrt(a*(1-a)))

traj = evolve(rho0, SystemParams(0, 5.0), EnvironmentSpec.correlated_dephasing(1.0, 1.0, 0.2), tt, cfg)
lit = ctilde_corr_deph_literal(0.3, math.pi/4, 1.0, 0.2, 5.0, tt)
mine = concurrence_correlated_dephasing(0.3, math.pi/4, 1.0, 0.2, 5.0, tt)
print(f"Eq33: corrected dev={np.max(np.abs(mine-traj.ctilde)):.2e}  printed dev={np.max(np.abs(lit-traj.ctilde)):.2e}")

# (c) gamma=0: cos^2 vs printed cos
a0, chi0, v0 = 0.3, math.pi/4, 2.0
traj = evolve(rho0, SystemParams(0, v0), EnvironmentSpec.dissipative(0.0), tt, cfg)
lit = (2/3)*(np.sqrt(math.cos(chi0)**2 + math.sin(chi0)**2*np.cos(2*v0*tt)) - math.sqrt(a0*(1-a0)))
mine = concurrence_dissipative(a0, chi0, v0, 0.0, tt)
print(f"g=0 cos^2: corrected dev={np.max(np.abs(mine-traj.ctilde)):.2e}  printed-cos dev={np.max(np.abs(lit-traj.ctilde)):.2e}")

# (d) Appendix D rho_23 sinh coefficient 1/6 (printed) vs 1/2 (corrected)
from esdlab import rho_correlated_decay_interacting
g, G, v = 1.0, 0.6, 3.0
traj = evolve(rho0, SystemParams(0, v), EnvironmentSpec.correlated_decay(g, G), tt, cfg)
ana = rho_correlated_decay_interacting(rho0, g, G, v, tt)
r23_num = traj.states[:, 1, 2]
r23_mine = ana[:, 1, 2]
# literal printed rho_23 with the 1/6 coefficient and printed rho11 bracket:
r = rho0
with np.errstate(over='ignore'):
    r23_lit = (0.5*r[1,2]*np.exp(-g*tt)*(np.cos(2*v*tt)+np.cosh(G*tt))
               - 0.5*r[2,1]*np.exp(-g*tt)*(np.cos(2*v*tt)-np.cosh(G*tt))
               - r[0,0]*np.exp(-2*g*tt)*(2*g*G/(g*g-G*G))
               + 0.5*r[0,0]*np.exp(-g*tt)*(((g+G)/(g-G))*np.exp(G*tt)+((g-G)/(g+G))*np.exp(-G*tt))
               - (1/6)*(r[1,1]+r[2,2])*np.exp(-g*tt)*np.sinh(G*tt)
               + 0.5*(r[1,1]-r[2,2])*np.exp(-g*tt)*1j*np.sin(2*v*tt))
print(f"AppD r23: corrected dev={np.max(np.abs(r23_mine-r23_num)):.2e}  printed dev={np.max(np.abs(r23_lit-r23_num)):.2e}")
