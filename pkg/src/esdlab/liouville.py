"""Generator of the two-qubit quantum-Liouville equation and its integration.

The right-hand side  d(rho)/dt = -i[H, rho] + L(rho)  is assembled as a linear
superoperator (16x16 matrix acting on vec(rho)) from the raising/lowering and
S^z operators of each qubit.  Time integration works on a packed real
16-vector (diagonal + re/im of the upper triangle), which keeps the state
exactly Hermitian at every step, with an embedded Dormand-Prince 5(4) pair
specialized to constant linear systems: for y' = M y every stage is a fixed
polynomial in h*M, so a step with unchanged h costs a few 16x16 mat-vecs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticsExceeded, StepSizeUnderflow, ValidationError
from .metrics import Trajectory, trajectory_from_states
from .states import EnvironmentSpec, EnvModel, SystemParams, validate

# Qubit operators in the |ee>,|eg>,|ge>,|gg> basis.
SM_A = np.zeros((4, 4))
SM_A[2, 0] = SM_A[3, 1] = 1.0
SM_B = np.zeros((4, 4))
SM_B[1, 0] = SM_B[3, 2] = 1.0
SP_A = SM_A.T.copy()
SP_B = SM_B.T.copy()
SZ_A = np.diag([0.5, 0.5, -0.5, -0.5])
SZ_B = np.diag([0.5, -0.5, 0.5, -0.5])

_UPPER = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

TRACE_ERROR_LIMIT = 1e-6


def pack(rho: np.ndarray) -> np.ndarray:
    """Hermitian 4x4 -> real 16-vector (diagonal, Re upper, Im upper)."""
    y = np.empty(16)
    for k in range(4):
        y[k] = rho[k, k].real
    for n, (i, j) in enumerate(_UPPER):
        y[4 + n] = rho[i, j].real
        y[10 + n] = rho[i, j].imag
    return y


def unpack(y: np.ndarray) -> np.ndarray:
    """Inverse of :func:`pack`; always returns an exactly Hermitian matrix."""
    rho = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        rho[k, k] = y[k]
    for n, (i, j) in enumerate(_UPPER):
        rho[i, j] = y[4 + n] + 1j * y[10 + n]
        rho[j, i] = y[4 + n] - 1j * y[10 + n]
    return rho


def unpack_batch(ys: np.ndarray) -> np.ndarray:
    """Vectorized :func:`unpack` for an (N, 16) array -> (N, 4, 4)."""
    n = ys.shape[0]
    rho = np.zeros((n, 4, 4), dtype=complex)
    for k in range(4):
        rho[:, k, k] = ys[:, k]
    for m, (i, j) in enumerate(_UPPER):
        rho[:, i, j] = ys[:, 4 + m] + 1j * ys[:, 10 + m]
        rho[:, j, i] = ys[:, 4 + m] - 1j * ys[:, 10 + m]
    return rho


def _term(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # vec(A rho B) = kron(A, B^T) vec(rho) for row-major vec.
    return np.kron(a, b.T)


class Superoperator:
    """Linear map rho -> d(rho)/dt, stored as a 16x16 matrix on vec(rho)."""

    def __init__(self, mat: np.ndarray):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (16, 16):
            raise ValidationError(f"superoperator matrix must be 16x16, got {mat.shape}")
        self.mat = mat

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return (self.mat @ rho.reshape(16)).reshape(4, 4)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return self.apply(rho)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.mat + other.mat)

    def packed_matrix(self) -> np.ndarray:
        """Real 16x16 matrix acting on the packed Hermitian representation."""
        m = np.empty((16, 16))
        eye = np.eye(16)
        for k in range(16):
            m[:, k] = pack(self.apply(unpack(eye[k])))
        return m


def hamiltonian_part(params: SystemParams) -> Superoperator:
    """rho -> -i[H, rho] with H = omega0*(Sz_A+Sz_B) + v*(Sp_A Sm_B + Sp_B Sm_A)."""
    h = params.omega0 * (SZ_A + SZ_B) + params.v * (SP_A @ SM_B + SP_B @ SM_A)
    eye = np.eye(4)
    return Superoperator(-1j * (_term(h, eye) - _term(eye, h)))


def _decay_pair(rate: float, collapse: np.ndarray, raising: np.ndarray) -> np.ndarray:
    # -(rate/2) * (raising@collapse rho - 2 collapse rho raising + rho raising@collapse)
    eye = np.eye(4)
    rc = raising @ collapse
    return -(rate / 2.0) * (_term(rc, eye) + _term(eye, rc) - 2.0 * _term(collapse, raising))


def _dephasing_pair(rate: float, sz: np.ndarray) -> np.ndarray:
    eye = np.eye(4)
    zz = sz @ sz
    return -rate * (_term(zz, eye) + _term(eye, zz) - 2.0 * _term(sz, sz))


def dissipator(env: EnvironmentSpec) -> Superoperator:
    """Lindblad action of the selected environment model."""
    mat = np.zeros((16, 16), dtype=complex)
    if env.model is EnvModel.DISSIPATIVE:
        mat += _decay_pair(env.gamma_a, SM_A, SP_A)
        mat += _decay_pair(env.gamma_b, SM_B, SP_B)
    elif env.model is EnvModel.PURE_DEPHASING:
        mat += _dephasing_pair(env.big_gamma_a, SZ_A)
        mat += _dephasing_pair(env.big_gamma_b, SZ_B)
    elif env.model is EnvModel.CORRELATED_DECAY:
        mat += _decay_pair(env.gamma_a, SM_A, SP_A)
        mat += _decay_pair(env.gamma_b, SM_B, SP_B)
        # Cross terms: -(G12/2)(Sp_j Sm_k rho - 2 Sm_k rho Sp_j + rho Sp_j Sm_k), j != k.
        eye = np.eye(4)
        for sp_j, sm_k in ((SP_A, SM_B), (SP_B, SM_A)):
            pm = sp_j @ sm_k
            mat += -(env.gamma_corr / 2.0) * (
                _term(pm, eye) + _term(eye, pm) - 2.0 * _term(sm_k, sp_j)
            )
    elif env.model is EnvModel.CORRELATED_DEPHASING:
        mat += _dephasing_pair(env.big_gamma_a, SZ_A)
        mat += _dephasing_pair(env.big_gamma_b, SZ_B)
        eye = np.eye(4)
        zab = SZ_A @ SZ_B
        mat += -2.0 * env.gamma0 * (
            _term(zab, eye) + _term(eye, zab) - _term(SZ_B, SZ_A) - _term(SZ_A, SZ_B)
        )
    else:  # pragma: no cover - EnvironmentSpec already validates the model
        raise ValidationError(f"unknown model {env.model!r}")
    return Superoperator(mat)


def liouvillian(params: SystemParams, env: EnvironmentSpec) -> Superoperator:
    """Full generator: Hamiltonian commutator plus dissipator."""
    return hamiltonian_part(params) + dissipator(env)


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and mode of the time stepper.

    ``max_step`` of None resolves to 1e-2 in units of the inverse largest
    rate/coupling of the problem (or a fiftieth of the horizon for a closed,
    static system).  ``hermitize_each_step`` is kept for interface
    compatibility; the packed real representation is Hermitian by
    construction, so the projection is implicit in every step.
    ``method`` is "rk45" (adaptive Dormand-Prince 5(4)) or "rk4"
    (fixed-step classical Runge-Kutta, reproducibility fallback).
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float | None = None
    hermitize_each_step: bool = True
    method: str = "rk45"

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValidationError("integrator tolerances must be positive")
        if self.max_step is not None and self.max_step <= 0:
            raise ValidationError("max_step must be positive")
        if self.method not in ("rk45", "rk4"):
            raise ValidationError(f"unknown integrator method {self.method!r}")


# Dormand-Prince 5(4) tableau.
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# b5 - b4hat, including the 7th (FSAL) stage weight.
_DP_ERR = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class _LinearDP45:
    """One Dormand-Prince step for y' = M y as cached matrix polynomials."""

    def __init__(self, m: np.ndarray):
        self.m = m
        self._h = None
        self._r5 = None
        self._err = None

    def matrices(self, h: float) -> tuple[np.ndarray, np.ndarray]:
        if h != self._h:
            hm = h * self.m
            eye = np.eye(self.m.shape[0])
            stages = [eye]
            for row in _DP_A[1:]:
                acc = eye.copy()
                for a_ij, s_j in zip(row, stages):
                    if a_ij != 0.0:
                        acc += a_ij * (hm @ s_j)
                stages.append(acc)
            update = sum(b * s for b, s in zip(_DP_B5, stages) if b != 0.0)
            r5 = eye + hm @ update
            stages.append(r5)  # FSAL stage state
            errsum = sum(e * s for e, s in zip(_DP_ERR, stages) if e != 0.0)
            self._r5 = r5
            self._err = hm @ errsum
            self._h = h
        return self._r5, self._err


def _hermite_eval(theta, h, y0, f0, y1, f1):
    """Cubic Hermite interpolant on one accepted step; theta in [0, 1]."""
    t2 = theta * theta
    t3 = t2 * theta
    return (
        np.outer(2 * t3 - 3 * t2 + 1, y0)
        + np.outer(h * (t3 - 2 * t2 + theta), f0)
        + np.outer(-2 * t3 + 3 * t2, y1)
        + np.outer(h * (t3 - t2), f1)
    )


def _integrate_dp45(m, y0, t_grid, rel_tol, abs_tol, max_step):
    t_end = float(t_grid[-1])
    out = np.empty((len(t_grid), y0.size))
    out[0] = y0
    if len(t_grid) == 1 or t_end == 0.0:
        return out

    stepper = _LinearDP45(m)
    t = 0.0
    y = y0.copy()
    f = m @ y
    idx = 1  # next grid sample to fill
    tiny = 1e-12 * max(1.0, t_end)

    # Initial step: conservative fraction of the fastest time scale.
    mnorm = np.linalg.norm(m, np.inf)
    h = min(max_step, t_end, 0.1 / mnorm if mnorm > 0 else t_end)
    n_reject = 0
    while t < t_end - tiny:
        h = min(h, max_step, t_end - t)
        if h < 16 * np.finfo(float).eps * max(abs(t), 1.0):
            raise StepSizeUnderflow(
                f"step size {h:.3e} underflowed at t = {t:.6g} "
                f"(rel_tol={rel_tol:g}, abs_tol={abs_tol:g})"
            )
        r5, emat = stepper.matrices(h)
        y_new = r5 @ y
        err_vec = emat @ y
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            f_new = m @ y_new
            upper = t + h + tiny
            if idx < len(t_grid) and t_grid[idx] <= upper:
                stop = idx
                while stop < len(t_grid) and t_grid[stop] <= upper:
                    stop += 1
                theta = np.clip((t_grid[idx:stop] - t) / h, 0.0, 1.0)
                out[idx:stop] = _hermite_eval(theta, h, y, f, y_new, f_new)
                idx = stop
            t += h
            y = y_new
            f = f_new
            n_reject = 0
            if err == 0.0:
                factor = 5.0
            else:
                factor = min(5.0, max(0.2, 0.9 * err ** -0.2))
            # Quantize growth so the cached step matrices are reused.
            if factor < 1.25:
                factor = 1.0
            h = h * factor
        else:
            n_reject += 1
            if n_reject > 60:
                raise StepSizeUnderflow(
                    f"step control stalled after {n_reject} rejections at t = {t:.6g}"
                )
            h = h * max(0.1, 0.9 * err ** -0.2)
    if idx < len(t_grid):  # fp remainder: grid points at (numerically) t_end
        out[idx:] = y
    return out


def _integrate_rk4(m, y0, t_grid, max_step):
    out = np.empty((len(t_grid), y0.size))
    out[0] = y0
    y = y0.copy()
    eye = np.eye(m.shape[0])
    cached = (None, None)
    for k in range(1, len(t_grid)):
        span = float(t_grid[k] - t_grid[k - 1])
        if span == 0.0:
            out[k] = y
            continue
        nsub = max(1, int(np.ceil(span / max_step)))
        h = span / nsub
        if cached[0] != h:
            hm = h * m
            # Classical RK4 on a linear autonomous system is the degree-4
            # Taylor polynomial of exp(h M).
            r = eye + hm @ (eye + hm @ (eye / 2 + hm @ (eye / 6 + hm / 24)))
            cached = (h, r)
        r = cached[1]
        for _ in range(nsub):
            y = r @ y
        out[k] = y
    return out


def evolve_superoperator(
    rho0: np.ndarray,
    sop: Superoperator,
    t_grid: np.ndarray,
    cfg: IntegratorConfig | None = None,
    rate_scale: float = 0.0,
) -> Trajectory:
    """Integrate d(rho)/dt = sop(rho) from rho0 over an ascending time grid.

    Lower-level entry point used by :func:`evolve`; ``rate_scale`` feeds the
    default max_step heuristic.  Trace drift is reported, never repaired, and
    a drift beyond 1e-6 raises :class:`DiagnosticsExceeded`.
    """
    cfg = cfg or IntegratorConfig()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValidationError("t_grid must be a 1-d array of times")
    if t_grid[0] != 0.0:
        raise ValidationError("t_grid must start at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be strictly ascending")
    rho0 = np.asarray(rho0, dtype=complex)
    diag = validate(rho0)
    if not diag.ok():
        raise ValidationError(f"rho0 is not a valid density matrix: {diag}")

    max_step = cfg.max_step
    if max_step is None:
        max_step = 1e-2 / rate_scale if rate_scale > 0 else t_grid[-1] / 50.0

    m = sop.packed_matrix()
    y0 = pack(0.5 * (rho0 + rho0.conj().T))
    if cfg.method == "rk4":
        ys = _integrate_rk4(m, y0, t_grid, max_step)
    else:
        ys = _integrate_dp45(m, y0, t_grid, cfg.rel_tol, cfg.abs_tol, max_step)

    states = unpack_batch(ys)
    states[0] = rho0  # exact identity at t = 0
    traj = trajectory_from_states(t_grid, states)
    worst = float(np.max(traj.trace_error))
    if worst > TRACE_ERROR_LIMIT:
        raise DiagnosticsExceeded(
            f"trace error {worst:.3e} exceeds {TRACE_ERROR_LIMIT:g}"
        )
    return traj


def evolve(
    rho0: np.ndarray,
    params: SystemParams,
    env: EnvironmentSpec,
    t_grid: np.ndarray,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Numerically evolve rho0 under the selected Hamiltonian and environment.

    Parameters
    ----------
    rho0 : (4, 4) complex array
        Valid initial density matrix.
    params : SystemParams
        Transition frequency and qubit-qubit coupling.
    env : EnvironmentSpec
        Environment model and rates.
    t_grid : array of floats
        Strictly ascending sample times starting at 0.
    cfg : IntegratorConfig, optional
        Stepper tolerances and mode.

    Returns
    -------
    Trajectory
        Sampled states with concurrence and per-sample diagnostics.
    """
    rate_scale = max(env.rate_scale(), params.v, abs(params.omega0))
    return evolve_superoperator(rho0, liouvillian(params, env), t_grid, cfg, rate_scale)
