"""Exact propagators and concurrence formulas for the four environment models.

Every function here evaluates an analytic solution of the quantum-Liouville
equation; the numerical integrator in :mod:`esdlab.liouville` is an
independent route to the same states and is used throughout the test suite as
the arbiter.  Where the published closed forms contain misprints (they fail
t = 0 consistency or disagree with the integrator), the corrected expressions
below were re-derived from the equations of motion; the test suite pins the
arbitration.  Known corrections:

* correlated decay: the population/coherence feed from the doubly excited
  state carries bracket  (g+G)/(g-G) e^{-Gt} - (g-G)/(g+G) e^{+Gt}  (the
  printed version swaps the exponentials and fails t = 0 consistency), and
  the  [rho_22(0)+rho_33(0)] sinh  term in the interacting coherence carries
  coefficient 1/2, not 1/6;
* the auxiliary decay integral zeta(t) is half the printed expression (the
  printed one doubles the doubly-excited feed);
* dephasing: the damped-oscillation coherence carries
  cos(2*Omega*t) - (rate/(4*Omega)) sin(2*Omega*t)  with a minus sign;
* the interacting correlated-dephasing concurrence uses the oscillation
  frequency sqrt(4 v^2 - (Gamma - Gamma0)^2), i.e. the dephasing result with
  Gamma -> Gamma - Gamma0 everywhere;
* the closed-system (zero decay) concurrence carries cos^2(2 v t) under the
  square root, not cos(2 v t).

Rates are angular frequencies; time is in the same inverse units.  All
evaluators accept a scalar or an array ``t`` and broadcast over it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FormError, PoleError, ValidationError
from .states import EnvironmentSpec, EnvModel, SystemParams, is_x_form

__all__ = [
    "AnalyticIntermediates",
    "analytic_intermediates",
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
    "ctilde_evaluator_for",
]


def _expm1m(x):
    """(exp(x) - 1)/x, elementwise, stable through x = 0 (real arguments)."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-5
    xs = np.where(small, 1.0, x)
    out = np.where(small, 1.0 + x / 2.0 + x * x / 6.0, np.expm1(xs) / xs)
    return out


def _expm1m_c(z):
    """Complex (exp(z) - 1)/z, stable through z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-5
    zs = np.where(small, 1.0, z)
    return np.where(small, 1.0 + z / 2.0 + z * z / 6.0, (np.exp(zs) - 1.0) / zs)


def _sinxx(z):
    """sin(z)/z for complex z, stable through z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    z2 = z * z
    return np.where(small, 1.0 - z2 / 6.0 + z2 * z2 / 120.0, np.sin(zs) / zs)


def _osc(half_width: float, v: float, t):
    """cos and sin/Omega blocks of the damped 2-3 oscillation.

    Omega = sqrt(v^2 - half_width^2) continues to i*|Omega| when the radicand
    is negative; both returned arrays are real and continuous across the zero.
    """
    omega = np.sqrt(complex(v * v - half_width * half_width))
    ang = 2.0 * omega * np.asarray(t, dtype=float)
    cos_term = np.cos(ang).real
    sin_over = (2.0 * np.asarray(t, dtype=float) * _sinxx(ang)).real
    return cos_term, sin_over


def _as_time_array(t):
    t_arr = np.asarray(t, dtype=float)
    return np.atleast_1d(t_arr), t_arr.ndim == 0


def _check_x_form(rho0, who: str):
    if not is_x_form(rho0):
        raise FormError(f"{who} requires a diagonal + rho_23 initial matrix")


def _x_parts(rho0):
    rho0 = np.asarray(rho0, dtype=complex)
    r00 = rho0[0, 0].real
    q0 = (rho0[1, 1] + rho0[2, 2]).real
    d0 = (rho0[1, 1] - rho0[2, 2]).real
    p0 = rho0[1, 2] + rho0[2, 1]
    s0 = rho0[1, 2] - rho0[2, 1]
    return r00, q0, d0, p0, s0


def _assemble_x(t_shape, r11, q, d, p, s):
    out = np.zeros(t_shape + (4, 4), dtype=complex)
    out[..., 0, 0] = r11
    out[..., 1, 1] = 0.5 * (q + d)
    out[..., 2, 2] = 0.5 * (q - d)
    r23 = 0.5 * (p + s)
    out[..., 1, 2] = r23
    out[..., 2, 1] = np.conj(r23)
    out[..., 3, 3] = 1.0 - out[..., 0, 0] - out[..., 1, 1] - out[..., 2, 2]
    return out


def rho_dissipative(rho0, gamma: float, v: float, t):
    """State at time t for independent decay at equal rates gamma, coupling v.

    Propagates all sixteen elements (the only model whose closed form is not
    restricted to the X family); the off-X elements assume omega0 = 0, the X
    block is omega0-independent.
    """
    if gamma < 0:
        raise DomainError(f"gamma = {gamma} < 0")
    rho0 = np.asarray(rho0, dtype=complex)
    t_arr, scalar = _as_time_array(t)

    e1 = np.exp(-gamma * t_arr)
    e2 = e1 * e1
    c2 = np.cos(2.0 * v * t_arr)
    s2 = np.sin(2.0 * v * t_arr)

    r00, q0, d0, p0, s0 = _x_parts(rho0)
    q = q0 * e1 + 2.0 * r00 * (e1 - e2)
    d = e1 * (d0 * c2 + 1j * s0 * s2)
    s = e1 * (s0 * c2 + 1j * d0 * s2)
    p = p0 * e1
    out = _assemble_x(t_arr.shape, r00 * e2, q, d, p, s)

    # One-excitation coherences to the doubly excited state.
    sum13 = (rho0[0, 1] + rho0[0, 2]) * np.exp((1j * v - 1.5 * gamma) * t_arr)
    dif13 = (rho0[0, 2] - rho0[0, 1]) * np.exp((-1j * v - 1.5 * gamma) * t_arr)
    out[..., 0, 1] = 0.5 * (sum13 - dif13)
    out[..., 0, 2] = 0.5 * (sum13 + dif13)
    out[..., 0, 3] = rho0[0, 3] * e1

    # Coherences to the ground state, driven by the decaying 0-1/0-2 block:
    # u'_+ = -(g/2 + iv) u_+ + g (r01 + r02)(t),  forcing ~ e^{(iv - 3g/2) t}.
    def driven(u0, c_force, lam, mu):
        k = np.exp(lam * t_arr) * t_arr * _expm1m_c((mu - lam) * t_arr)
        return u0 * np.exp(lam * t_arr) + c_force * k

    up = driven(
        rho0[1, 3] + rho0[2, 3],
        gamma * (rho0[0, 1] + rho0[0, 2]),
        -(0.5 * gamma + 1j * v),
        1j * v - 1.5 * gamma,
    )
    um = driven(
        rho0[1, 3] - rho0[2, 3],
        gamma * (rho0[0, 2] - rho0[0, 1]),
        1j * v - 0.5 * gamma,
        -1j * v - 1.5 * gamma,
    )
    out[..., 1, 3] = 0.5 * (up + um)
    out[..., 2, 3] = 0.5 * (up - um)
    for i, j in ((0, 1), (0, 2), (0, 3), (1, 3), (2, 3)):
        out[..., j, i] = np.conj(out[..., i, j])
    return out[0] if scalar else out


def rho_dephasing(rho0, big_gamma_a: float, big_gamma_b: float, v: float, t):
    """State under pure dephasing (rates Gamma_A, Gamma_B) with coupling v."""
    if big_gamma_a < 0 or big_gamma_b < 0:
        raise DomainError("dephasing rates must be non-negative")
    _check_x_form(rho0, "rho_dephasing")
    return _dephasing_x(rho0, big_gamma_a + big_gamma_b, v, t)


def _dephasing_x(rho0, gs: float, v: float, t):
    t_arr, scalar = _as_time_array(t)
    r00, q0, d0, p0, s0 = _x_parts(rho0)
    env = np.exp(-0.5 * gs * t_arr)
    c2, sx = _osc(gs / 4.0, v, t_arr)
    d = env * (d0 * (c2 + (gs / 4.0) * sx) + 1j * v * s0 * sx)
    s = env * (s0 * (c2 - (gs / 4.0) * sx) + 1j * v * d0 * sx)
    p = p0 * env * env
    q = np.full_like(t_arr, q0)
    out = _assemble_x(t_arr.shape, np.full_like(t_arr, r00), q, d, p, s)
    return out[0] if scalar else out


def _corr_decay_x(rho0, gamma: float, gamma12: float, v: float, t):
    if gamma12 < 0:
        raise DomainError(f"gamma12 = {gamma12} < 0")
    if gamma12 > gamma:
        raise PoleError(f"gamma12 = {gamma12} exceeds gamma = {gamma}")
    _check_x_form(rho0, "rho_correlated_decay")
    t_arr, scalar = _as_time_array(t)
    r00, q0, d0, p0, s0 = _x_parts(rho0)

    e1 = np.exp(-gamma * t_arr)
    e2 = e1 * e1
    c2 = np.cos(2.0 * v * t_arr)
    s2 = np.sin(2.0 * v * t_arr)
    emp = np.exp(-(gamma + gamma12) * t_arr)
    emm = np.exp(-(gamma - gamma12) * t_arr)

    # (Q +- P)' = -(g +- G)(Q +- P) + 2 (g +- G) rho_11; stable through G = g.
    up = (q0 + p0) * emp + 2.0 * r00 * (gamma + gamma12) * t_arr * emp * _expm1m(
        -(gamma - gamma12) * t_arr
    )
    um = (q0 - p0) * emm + 2.0 * r00 * (gamma - gamma12) * t_arr * emm * _expm1m(
        -(gamma + gamma12) * t_arr
    )
    q = 0.5 * (up + um)
    p = 0.5 * (up - um)
    d = e1 * (d0 * c2 + 1j * s0 * s2)
    s = e1 * (s0 * c2 + 1j * d0 * s2)
    out = _assemble_x(t_arr.shape, r00 * e2, q, d, p, s)
    return out[0] if scalar else out


def rho_correlated_decay(rho0, gamma: float, gamma12: float, t):
    """Non-interacting qubits decaying independently (gamma) and jointly (gamma12)."""
    return _corr_decay_x(rho0, gamma, gamma12, 0.0, t)


def rho_correlated_decay_interacting(rho0, gamma: float, gamma12: float, v: float, t):
    """Correlated decay with qubit-qubit coupling v rotating the 2-3 block."""
    return _corr_decay_x(rho0, gamma, gamma12, v, t)


def rho_correlated_dephasing(rho0, big_gamma_a: float, big_gamma_b: float, gamma0: float, t):
    """Correlated dephasing, non-interacting: populations frozen, coherence
    decaying at Gamma_A + Gamma_B - 2*Gamma0."""
    ge = big_gamma_a + big_gamma_b - 2.0 * gamma0
    if gamma0 < 0:
        raise DomainError(f"gamma0 = {gamma0} < 0")
    if ge < 0:
        raise DomainError("requires Gamma_A + Gamma_B >= 2*gamma0")
    _check_x_form(rho0, "rho_correlated_dephasing")
    rho0 = np.asarray(rho0, dtype=complex)
    t_arr, scalar = _as_time_array(t)
    decay = np.exp(-ge * t_arr)
    out = np.zeros(t_arr.shape + (4, 4), dtype=complex)
    for k in range(4):
        out[..., k, k] = rho0[k, k].real
    out[..., 1, 2] = rho0[1, 2] * decay
    out[..., 2, 1] = np.conj(out[..., 1, 2])
    return out[0] if scalar else out


def rho_correlated_dephasing_interacting(
    rho0, big_gamma_a: float, big_gamma_b: float, gamma0: float, v: float, t
):
    """Correlated dephasing with coupling v: the dephasing solution with the
    effective coherence rate Gamma_A + Gamma_B - 2*Gamma0."""
    ge = big_gamma_a + big_gamma_b - 2.0 * gamma0
    if gamma0 < 0:
        raise DomainError(f"gamma0 = {gamma0} < 0")
    if ge < 0:
        raise DomainError("requires Gamma_A + Gamma_B >= 2*gamma0")
    _check_x_form(rho0, "rho_correlated_dephasing_interacting")
    return _dephasing_x(rho0, ge, v, t)


# ---------------------------------------------------------------------------
# Scalar concurrence evaluators for the b = c = |z| = 1, d = 1 - a family.
# ---------------------------------------------------------------------------


def _check_a(a: float):
    # The trace-3 normalization would admit a up to 3, but d = 1 - a must stay
    # a population, so the family is only defined on [0, 1].
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"a = {a} outside the state family domain [0, 1]")


def concurrence_dissipative(a: float, chi: float, v: float, gamma: float, t):
    """Signed pre-concurrence under equal-rate dissipation; gamma = 0 gives the
    closed-system result with cos^2(2vt) under the root."""
    _check_a(a)
    if gamma < 0:
        raise DomainError(f"gamma = {gamma} < 0")
    t_arr = np.asarray(t, dtype=float)
    u = np.exp(-gamma * t_arr)
    coherence = np.sqrt(
        math.cos(chi) ** 2 + math.sin(chi) ** 2 * np.cos(2.0 * v * t_arr) ** 2
    )
    rad = a * (3.0 - 2.0 * u * (1.0 + a) + a * u * u)
    return (2.0 / 3.0) * u * (coherence - np.sqrt(rad))


def concurrence_dephasing(a: float, chi: float, v: float, big_gamma: float, t):
    """Signed pre-concurrence under equal-rate pure dephasing (Gamma_A = Gamma_B)."""
    _check_a(a)
    if big_gamma < 0:
        raise DomainError(f"Gamma = {big_gamma} < 0")
    return _ctilde_dephasing_family(a, chi, v, big_gamma, t)


def _ctilde_dephasing_family(a, chi, v, g, t):
    # g is the per-qubit coherence rate: Gamma for plain dephasing,
    # Gamma - Gamma0 for the correlated model.
    t_arr = np.asarray(t, dtype=float)
    c2, sx = _osc(g / 2.0, v, t_arr)
    osc = c2 - 0.5 * g * sx
    e2 = np.exp(-2.0 * g * t_arr)
    first = np.sqrt(e2 * e2 * math.cos(chi) ** 2 + e2 * math.sin(chi) ** 2 * osc * osc)
    return (2.0 / 3.0) * (first - math.sqrt(a * (1.0 - a)))


def _zeta_kappa(a, chi, gamma, gamma12, t_arr):
    """e^{-gamma t} * zeta(t) (as p/2) and kappa(t), pole-free forms."""
    emp = np.exp(-(gamma + gamma12) * t_arr)
    emm = np.exp(-(gamma - gamma12) * t_arr)
    fp = (gamma + gamma12) * t_arr * emp * _expm1m(-(gamma - gamma12) * t_arr)
    fm = (gamma - gamma12) * t_arr * emm * _expm1m(-(gamma + gamma12) * t_arr)
    p = fp - fm
    q = fp + fm
    ec = 0.5 * (emm + emp)  # e^{-g t} cosh(G t)
    es = 0.5 * (emm - emp)  # e^{-g t} sinh(G t)
    e2 = np.exp(-2.0 * gamma * t_arr)
    kappa = (a / 3.0) * e2 + (2.0 / 3.0) * (ec - math.cos(chi) * es) + (a / 3.0) * q
    return p, q, ec, es, kappa


def concurrence_correlated_decay(
    a: float, chi: float, gamma: float, gamma12: float, v: float, t
):
    """Signed pre-concurrence under correlated decay (equal gammas, cross rate
    gamma12), with the qubit-qubit coupling entering as cos^2(2vt)."""
    _check_a(a)
    if gamma < 0 or gamma12 < 0:
        raise DomainError("rates must be non-negative")
    if gamma12 > gamma:
        raise PoleError(f"gamma12 = {gamma12} exceeds gamma = {gamma}")
    t_arr = np.asarray(t, dtype=float)
    p, _, ec, es, kappa = _zeta_kappa(a, chi, gamma, gamma12, t_arr)
    e1 = np.exp(-gamma * t_arr)
    real_part = math.cos(chi) * ec - es + 0.5 * a * p
    coh2 = (e1 * np.cos(2.0 * v * t_arr)) ** 2 * math.sin(chi) ** 2
    first = np.sqrt(real_part * real_part + coh2)
    second = e1 * np.sqrt(np.clip(3.0 * a * (1.0 - kappa), 0.0, None))
    return (2.0 / 3.0) * (first - second)


def concurrence_correlated_dephasing(
    a: float, chi: float, big_gamma: float, gamma0: float, v: float, t
):
    """Signed pre-concurrence under correlated dephasing (equal Gammas, cross
    rate gamma0); gamma0 = Gamma freezes the coherence (decoherence-free)."""
    _check_a(a)
    if big_gamma < 0 or gamma0 < 0:
        raise DomainError("rates must be non-negative")
    if gamma0 > big_gamma:
        raise DomainError(f"gamma0 = {gamma0} exceeds Gamma = {big_gamma}")
    return _ctilde_dephasing_family(a, chi, v, big_gamma - gamma0, t)


@dataclass(frozen=True)
class AnalyticIntermediates:
    """Named intermediate quantities of the closed forms, for inspection/tests.

    ``omega`` and friends are reported as complex so a hyperbolic regime shows
    up as an imaginary value; ``zeta_t`` is the corrected (halved) decay
    integral, ``kappa_t`` the excited-population functional.
    """

    w: float
    tau: float
    omega: complex
    omega1: complex
    omega_prime: complex
    zeta_t: float
    kappa_t: float


def analytic_intermediates(
    a: float = 0.0,
    chi: float = 0.0,
    v: float = 0.0,
    gamma: float = 0.0,
    big_gamma: float = 0.0,
    gamma12: float = 0.0,
    gamma0: float = 0.0,
    t: float = 0.0,
) -> AnalyticIntermediates:
    w = math.sqrt(max(0.0, -math.expm1(-gamma * t)))
    tau = big_gamma * t
    omega = complex(np.sqrt(complex(v * v - (big_gamma / 2.0) ** 2)))
    omega1 = (
        complex(np.sqrt(complex((2.0 * v / big_gamma) ** 2 - 1.0)))
        if big_gamma > 0
        else complex("inf")
    )
    omega_prime = complex(np.sqrt(complex(v * v - ((big_gamma - gamma0) / 2.0) ** 2)))
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    p, _, _, _, kappa = _zeta_kappa(a, chi, gamma, gamma12, t_arr)
    zeta = 0.5 * float(p[0]) * math.exp(gamma * t) if gamma * t < 700 else 0.0
    return AnalyticIntermediates(
        w=w,
        tau=tau,
        omega=omega,
        omega1=omega1,
        omega_prime=omega_prime,
        zeta_t=zeta,
        kappa_t=float(kappa[0]),
    )


# ---------------------------------------------------------------------------
# Dispatch helpers used by the CLI and oracle tests.
# ---------------------------------------------------------------------------


def propagator_for(system: SystemParams, env: EnvironmentSpec):
    """Callable (rho0, t) -> rho(t) for parameters inside the analytic domain.

    Raises ValidationError when no closed form covers the parameters (unequal
    decay rates in the dissipative/correlated-decay models, or gamma12 = gamma
    with nonzero coupling).  The returned propagators are exact on the X block
    for any omega0; the dissipative one also covers general matrices when
    omega0 = 0 and rejects non-X input otherwise.
    """
    v = system.v
    if env.model is EnvModel.DISSIPATIVE:
        if env.gamma_a != env.gamma_b:
            raise ValidationError(
                "analytic dissipative propagator requires gamma_a == gamma_b"
            )
        gamma = env.gamma_a

        def prop(rho0, t, _g=gamma, _v=v, _w0=system.omega0):
            if _w0 != 0.0 and not is_x_form(rho0):
                raise ValidationError(
                    "dissipative closed form covers omega0 != 0 only for X-form states"
                )
            return rho_dissipative(rho0, _g, _v, t)

        return prop
    if env.model is EnvModel.PURE_DEPHASING:
        return lambda rho0, t: rho_dephasing(rho0, env.big_gamma_a, env.big_gamma_b, v, t)
    if env.model is EnvModel.CORRELATED_DECAY:
        if env.gamma_a != env.gamma_b:
            raise ValidationError(
                "analytic correlated-decay propagator requires gamma_a == gamma_b"
            )
        if v > 0 and env.gamma_corr >= env.gamma_a and env.gamma_a > 0:
            raise ValidationError(
                "interacting correlated decay requires gamma_corr strictly below gamma"
            )
        if v == 0.0:
            return lambda rho0, t: rho_correlated_decay(rho0, env.gamma_a, env.gamma_corr, t)
        return lambda rho0, t: rho_correlated_decay_interacting(
            rho0, env.gamma_a, env.gamma_corr, v, t
        )
    if env.model is EnvModel.CORRELATED_DEPHASING:
        if v == 0.0:
            return lambda rho0, t: rho_correlated_dephasing(
                rho0, env.big_gamma_a, env.big_gamma_b, env.gamma0, t
            )
        return lambda rho0, t: rho_correlated_dephasing_interacting(
            rho0, env.big_gamma_a, env.big_gamma_b, env.gamma0, v, t
        )
    raise ValidationError(f"no analytic propagator for model {env.model!r}")


def ctilde_evaluator_for(system: SystemParams, env: EnvironmentSpec, rho0):
    """Continuous signed pre-concurrence t -> ctilde(t) via the analytic state."""
    prop = propagator_for(system, env)

    def ctilde(t: float) -> float:
        rho = prop(rho0, float(t))
        p14 = max(rho[0, 0].real, 0.0) * max(rho[3, 3].real, 0.0)
        return float(2.0 * (abs(rho[1, 2]) - math.sqrt(p14)))

    return ctilde
