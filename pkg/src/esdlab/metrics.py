"""Concurrence computation and trajectory-level entanglement analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, FormError, GridTooCoarse, NoESD, NumericalError
from .states import spin_flip, x_form_deviation

_LAMBDA_CLAMP = 1e-10
_LAMBDA_FAIL = 1e-8
EDGE_REFINE_TOL = 1e-8


@dataclass
class Trajectory:
    """Time-sampled density matrices with concurrence and diagnostics.

    ``ctilde`` is the signed pre-concurrence (2(|rho_23| - sqrt(rho_11 rho_44))
    on the X-form fast path, the signed Wootters difference otherwise) and
    ``concurrence`` is its positive part.
    """

    times: np.ndarray
    states: np.ndarray
    concurrence: np.ndarray
    ctilde: np.ndarray
    trace_error: np.ndarray
    min_eigenvalue: np.ndarray

    def __len__(self) -> int:
        return len(self.times)


@dataclass
class EntanglementReport:
    """Dark/bright structure of a concurrence trajectory.

    ``dark_intervals`` are maximal [t_start, t_end] spans with C = 0 (within
    zero_tol), disjoint and ascending; ``bright_peaks`` are interior local
    maxima (t, C) with C > 0; ``esd_time`` is the start of a final dark
    interval that extends to the horizon, if there is one.
    """

    dark_intervals: list[tuple[float, float]] = field(default_factory=list)
    bright_peaks: list[tuple[float, float]] = field(default_factory=list)
    esd_time: Optional[float] = None
    horizon: float = 0.0


def _sorted_lambdas(rho: np.ndarray) -> np.ndarray:
    """Eigenvalues of rho @ spin_flip(rho), descending, via a Hermitian solve."""
    rho = np.asarray(rho, dtype=complex)
    rho_t = spin_flip(rho)
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    a = sqrt_rho @ rho_t @ sqrt_rho
    lam = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    if lam[0] < -_LAMBDA_FAIL:
        raise NumericalError(f"eigenvalue {lam[0]:.3e} of rho*rho_tilde below -1e-8")
    return np.sort(np.clip(lam, 0.0, None))[::-1]


def wootters_ctilde(rho: np.ndarray) -> float:
    """Signed Wootters difference sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)."""
    s = np.sqrt(_sorted_lambdas(rho))
    return float(s[0] - s[1] - s[2] - s[3])


def concurrence_wootters(rho: np.ndarray) -> float:
    """Wootters concurrence of an arbitrary two-qubit density matrix."""
    return max(0.0, wootters_ctilde(rho))


def concurrence_xstate(rho: np.ndarray) -> float:
    """Signed pre-concurrence 2(|rho_23| - sqrt(rho_11 rho_44)).

    Fast path for the six-element family (diagonal + 2-3 coherence); raises
    FormError when other elements, including the 1-4 corner, exceed 1e-10.
    """
    rho = np.asarray(rho, dtype=complex)
    dev = x_form_deviation(rho)
    if dev > 1e-10:
        raise FormError(
            f"matrix is not of the diagonal + rho_23 form (off-form element {dev:.3e})"
        )
    return _ctilde_x_batch(rho[np.newaxis])[0]


def _ctilde_x_batch(states: np.ndarray) -> np.ndarray:
    p14 = np.clip(states[:, 0, 0].real, 0.0, None) * np.clip(states[:, 3, 3].real, 0.0, None)
    return 2.0 * (np.abs(states[:, 1, 2]) - np.sqrt(p14))


def _wootters_ctilde_batch(states: np.ndarray) -> np.ndarray:
    out = np.empty(len(states))
    for k, rho in enumerate(states):
        out[k] = wootters_ctilde(rho)
    return out


def trajectory_from_states(times: np.ndarray, states: np.ndarray) -> Trajectory:
    """Assemble a Trajectory, choosing the X fast path when the stack allows it."""
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=complex)
    herm = 0.5 * (states + states.conj().transpose(0, 2, 1))
    min_eig = np.linalg.eigvalsh(herm)[:, 0]
    trace = np.einsum("nii->n", states)
    trace_error = np.abs(trace - 1.0)
    if x_form_deviation(states) <= 1e-10:
        ctilde = _ctilde_x_batch(states)
    else:
        ctilde = _wootters_ctilde_batch(states)
    return Trajectory(
        times=times,
        states=states,
        concurrence=np.maximum(0.0, ctilde),
        ctilde=ctilde,
        trace_error=trace_error,
        min_eigenvalue=min_eig,
    )


def _bisect_edge(fn, t_lo, t_hi, tol=EDGE_REFINE_TOL):
    """Root of ctilde's sign change inside [t_lo, t_hi] by bisection."""
    f_lo = fn(t_lo)
    f_hi = fn(t_hi)
    if f_lo == 0.0:
        return t_lo
    if f_hi == 0.0:
        return t_hi
    if (f_lo > 0) == (f_hi > 0):
        # Sampled signs promised a crossing; the continuous evaluator may put
        # it a hair outside the bracket.  Fall back to the nearer endpoint.
        return t_lo if abs(f_lo) < abs(f_hi) else t_hi
    while t_hi - t_lo > tol:
        mid = 0.5 * (t_lo + t_hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            t_lo, f_lo = mid, f_mid
        else:
            t_hi, f_hi = mid, f_mid
    return 0.5 * (t_lo + t_hi)


def _interp_edge(t0, t1, c0, c1):
    if c0 == c1:
        return 0.5 * (t0 + t1)
    return t0 + c0 * (t1 - t0) / (c0 - c1)


def analyze(
    traj: Trajectory,
    zero_tol: float = 1e-9,
    ctilde_fn: Optional[Callable[[float], float]] = None,
) -> EntanglementReport:
    """Extract dark intervals, bright peaks, and the ESD onset from a trajectory.

    Dark intervals are maximal runs with C <= zero_tol; their edges are
    refined to 1e-8 absolute time by bisection on the continuous ``ctilde_fn``
    when one is supplied (closed-form trajectories), else by linear
    interpolation of the sampled pre-concurrence.  The grid must be fine
    enough for at most one sign change per step; with a continuous evaluator
    a hidden double crossing inside one step raises GridTooCoarse.
    """
    t = traj.times
    c = traj.concurrence
    ct = traj.ctilde
    n = len(t)
    report = EntanglementReport(horizon=float(t[-1]))
    if n < 2:
        return report

    dark = c <= zero_tol
    if ctilde_fn is not None:
        mids = 0.5 * (t[:-1] + t[1:])
        mid_dark = np.array([ctilde_fn(tm) for tm in mids]) <= zero_tol
        double = mid_dark & ~dark[:-1] & ~dark[1:] | (~mid_dark & dark[:-1] & dark[1:])
        if np.any(double):
            k = int(np.argmax(double))
            raise GridTooCoarse(
                f"two concurrence sign changes inside step [{t[k]:.6g}, {t[k + 1]:.6g}]"
            )

    def left_edge(i):
        # dark starts at sample i; crossing lies in (t[i-1], t[i]]
        if i == 0:
            return float(t[0])
        if ctilde_fn is not None:
            return float(_bisect_edge(ctilde_fn, t[i - 1], t[i]))
        return float(_interp_edge(t[i - 1], t[i], ct[i - 1], ct[i]))

    def right_edge(j):
        # dark ends at sample j; crossing lies in [t[j], t[j+1])
        if j == n - 1:
            return float(t[-1])
        if ctilde_fn is not None:
            return float(_bisect_edge(ctilde_fn, t[j], t[j + 1]))
        return float(_interp_edge(t[j], t[j + 1], ct[j], ct[j + 1]))

    i = 0
    while i < n:
        if dark[i]:
            j = i
            while j + 1 < n and dark[j + 1]:
                j += 1
            start = left_edge(i)
            end = right_edge(j)
            report.dark_intervals.append((start, end))
            if j == n - 1:
                report.esd_time = start
            i = j + 1
        else:
            i += 1

    for k in range(1, n - 1):
        if c[k] <= zero_tol:
            continue
        if c[k] >= c[k - 1] and c[k] >= c[k + 1] and (c[k] > c[k - 1] or c[k] > c[k + 1]):
            # parabolic refinement through the three samples
            denom = (c[k - 1] - 2 * c[k] + c[k + 1])
            if denom < 0:
                shift = 0.5 * (c[k - 1] - c[k + 1]) / denom
                shift = float(np.clip(shift, -0.5, 0.5))
                dt_l = t[k] - t[k - 1]
                dt_r = t[k + 1] - t[k]
                step = dt_l if shift < 0 else dt_r
                t_pk = float(t[k] + shift * step)
                c_pk = float(c[k] - 0.25 * (c[k - 1] - c[k + 1]) * shift)
            else:
                t_pk, c_pk = float(t[k]), float(c[k])
            report.bright_peaks.append((t_pk, c_pk))
    return report


def esd_onset_dephasing(a: float, big_gamma: float, gamma0: float = 0.0) -> float:
    """Disentanglement onset t = ln(1/sqrt(a(1-a))) / (2(Gamma - Gamma0)).

    Positive solution of exp(-2(Gamma-Gamma0) t) = sqrt(a(1-a)) for the
    b = c = |z| = 1, d = 1 - a family under (correlated) dephasing.  Raises
    NoESD when a(1-a) vanishes (no finite crossing) or when gamma0 >= Gamma
    (the coherence stops decaying).
    """
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"a = {a} outside [0, 1]")
    q = a * (1.0 - a)
    if q <= 0.0:
        raise NoESD(f"a = {a}: a(1-a) = 0, concurrence never crosses zero")
    if gamma0 >= big_gamma:
        raise NoESD("gamma0 >= Gamma: coherence is decoherence-free, no onset")
    return math.log(1.0 / math.sqrt(q)) / (2.0 * (big_gamma - gamma0))
