"""Two-qubit states, parameter types, and elementary matrix utilities.

Basis convention, used everywhere in the package (0-based array index on the
left, ket on the right):

    0 = |ee>,  1 = |eg>,  2 = |ge>,  3 = |gg>

Density matrices are plain 4x4 complex ``numpy`` arrays in this basis and are
treated as immutable values: no function in this package mutates its input,
results are always fresh arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ModelParameterError,
    NegativeParameter,
    NormalizationError,
    ValidationError,
)

TWO_PI = 2.0 * math.pi

# Tolerances for the density-matrix invariants.
TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-12
EIGENVALUE_SLACK = 1e-8
XFORM_TOL = 1e-10

# sigma_y (x) sigma_y in the |ee>,|eg>,|ge>,|gg> basis; real anti-diagonal.
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_YY = np.kron(_SIGMA_Y, _SIGMA_Y).real


class EnvModel(enum.Enum):
    """Supported decohering-environment models."""

    DISSIPATIVE = "dissipative"
    PURE_DEPHASING = "pure_dephasing"
    CORRELATED_DECAY = "correlated_decay"
    CORRELATED_DEPHASING = "correlated_dephasing"


@dataclass(frozen=True)
class InitialStateParams:
    """Weights (a, b, c, d) and coherence phase chi of the initial mixed state.

    The state carries populations a/3, b/3, c/3, d/3 and a single-photon
    coherence z/3 with z = exp(i*chi)*sqrt(b*c).  The weights must satisfy the
    normalization (a + b + c + d)/3 = 1; chi is stored reduced to [0, 2*pi).
    """

    a: float
    b: float
    c: float
    d: float
    chi: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"state weight {name} must be finite")
            if value < 0.0:
                raise NegativeParameter(f"state weight {name} = {value} < 0")
        total = (self.a + self.b + self.c + self.d) / 3.0
        if abs(total - 1.0) > 1e-12:
            raise NormalizationError(
                f"(a+b+c+d)/3 = {total!r}, must equal 1 within 1e-12"
            )
        if not math.isfinite(self.chi):
            raise ValidationError("chi must be finite")
        object.__setattr__(self, "chi", self.chi % TWO_PI)

    @classmethod
    def one_parameter_family(cls, a: float, chi: float = 0.0) -> "InitialStateParams":
        """The b = c = |z| = 1, d = 1 - a single-parameter family."""
        return cls(a=a, b=1.0, c=1.0, d=1.0 - a, chi=chi)


@dataclass(frozen=True)
class SystemParams:
    """Transition frequency omega0 and qubit-qubit coupling v (rad/time)."""

    omega0: float = 0.0
    v: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and math.isfinite(self.v)):
            raise ValidationError("omega0 and v must be finite")
        if self.v < 0.0:
            raise NegativeParameter(f"coupling v = {self.v} < 0")


@dataclass(frozen=True)
class EnvironmentSpec:
    """Environment model selector plus its rates.

    Only the rates read by the selected model matter:

    * ``DISSIPATIVE``          - gamma_a, gamma_b
    * ``PURE_DEPHASING``       - big_gamma_a, big_gamma_b
    * ``CORRELATED_DECAY``     - gamma_a, gamma_b, gamma_corr (cross decay)
    * ``CORRELATED_DEPHASING`` - big_gamma_a, big_gamma_b, gamma0 (cross rate)
    """

    model: EnvModel
    gamma_a: float = 0.0
    gamma_b: float = 0.0
    big_gamma_a: float = 0.0
    big_gamma_b: float = 0.0
    gamma_corr: float = 0.0
    gamma0: float = 0.0

    def __post_init__(self):
        if not isinstance(self.model, EnvModel):
            raise ModelParameterError(f"unknown environment model {self.model!r}")
        for name in self._required_rates():
            value = getattr(self, name)
            if value is None or not math.isfinite(value):
                raise ModelParameterError(
                    f"model {self.model.value} requires finite rate {name}"
                )
            if value < 0.0:
                raise ModelParameterError(
                    f"model {self.model.value}: rate {name} = {value} < 0"
                )
        if self.model is EnvModel.CORRELATED_DECAY:
            if self.gamma_corr > min(self.gamma_a, self.gamma_b):
                raise ModelParameterError(
                    "correlated decay requires gamma_corr <= min(gamma_a, gamma_b)"
                )
        if self.model is EnvModel.CORRELATED_DEPHASING:
            if 2.0 * self.gamma0 > self.big_gamma_a + self.big_gamma_b:
                raise ModelParameterError(
                    "correlated dephasing requires 2*gamma0 <= big_gamma_a + big_gamma_b"
                )

    def _required_rates(self) -> tuple[str, ...]:
        return {
            EnvModel.DISSIPATIVE: ("gamma_a", "gamma_b"),
            EnvModel.PURE_DEPHASING: ("big_gamma_a", "big_gamma_b"),
            EnvModel.CORRELATED_DECAY: ("gamma_a", "gamma_b", "gamma_corr"),
            EnvModel.CORRELATED_DEPHASING: ("big_gamma_a", "big_gamma_b", "gamma0"),
        }[self.model]

    def rate_scale(self) -> float:
        """Largest rate of the active model; 0 for a closed system."""
        return max(getattr(self, name) for name in self._required_rates())

    @classmethod
    def dissipative(cls, gamma_a: float, gamma_b: float | None = None) -> "EnvironmentSpec":
        gb = gamma_a if gamma_b is None else gamma_b
        return cls(EnvModel.DISSIPATIVE, gamma_a=gamma_a, gamma_b=gb)

    @classmethod
    def pure_dephasing(cls, big_gamma_a: float, big_gamma_b: float | None = None) -> "EnvironmentSpec":
        gb = big_gamma_a if big_gamma_b is None else big_gamma_b
        return cls(EnvModel.PURE_DEPHASING, big_gamma_a=big_gamma_a, big_gamma_b=gb)

    @classmethod
    def correlated_decay(cls, gamma: float, gamma_corr: float) -> "EnvironmentSpec":
        return cls(EnvModel.CORRELATED_DECAY, gamma_a=gamma, gamma_b=gamma, gamma_corr=gamma_corr)

    @classmethod
    def correlated_dephasing(
        cls, big_gamma_a: float, big_gamma_b: float, gamma0: float
    ) -> "EnvironmentSpec":
        return cls(
            EnvModel.CORRELATED_DEPHASING,
            big_gamma_a=big_gamma_a,
            big_gamma_b=big_gamma_b,
            gamma0=gamma0,
        )


@dataclass(frozen=True)
class Diagnostics:
    """Validity diagnostics of a density matrix (reporting only)."""

    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float

    def ok(self, tol: float = EIGENVALUE_SLACK) -> bool:
        return (
            self.trace_error <= max(tol, TRACE_TOL)
            and self.hermiticity_error <= max(tol, HERMITICITY_TOL)
            and self.min_eigenvalue >= -max(tol, EIGENVALUE_SLACK)
        )


def build_initial_density(p: InitialStateParams) -> np.ndarray:
    """Assemble the initial density matrix from its weight parameters.

    Populations are (a, b, c, d)/3 on the diagonal and the only coherence is
    rho[1, 2] = exp(i*chi)*sqrt(b*c)/3 between |eg> and |ge>.
    """
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = p.a / 3.0
    rho[1, 1] = p.b / 3.0
    rho[2, 2] = p.c / 3.0
    rho[3, 3] = p.d / 3.0
    z = np.exp(1j * p.chi) * math.sqrt(p.b * p.c) / 3.0
    rho[1, 2] = z
    rho[2, 1] = np.conj(z)
    return rho


def spin_flip(rho: np.ndarray) -> np.ndarray:
    """Time-reversed state (sigma_y x sigma_y) rho* (sigma_y x sigma_y).

    In this basis the flip matrix is the signed anti-diagonal
    antidiag(-1, +1, +1, -1), so the result is the element-wise map
    out[i, j] = s[i] s[j] conj(rho[3-i, 3-j]) with s = (-1, +1, +1, -1).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 matrix, got shape {rho.shape}")
    return SIGMA_YY @ rho.conj() @ SIGMA_YY


def validate(rho: np.ndarray, tol: float | None = None) -> Diagnostics:
    """Trace, Hermiticity, and positivity diagnostics for a 4x4 matrix.

    Reporting only; never raises for an unphysical matrix.  ``tol`` is unused
    for the computation and kept so callers can thread their tolerance through
    to :meth:`Diagnostics.ok`.
    """
    rho = np.asarray(rho, dtype=complex)
    trace_error = abs(rho.trace().real - 1.0) + abs(rho.trace().imag)
    hermiticity_error = float(np.max(np.abs(rho - rho.conj().T)))
    herm = 0.5 * (rho + rho.conj().T)
    min_eigenvalue = float(np.linalg.eigvalsh(herm)[0])
    return Diagnostics(
        trace_error=float(trace_error),
        hermiticity_error=hermiticity_error,
        min_eigenvalue=min_eigenvalue,
    )


def is_x_form(rho: np.ndarray, tol: float = XFORM_TOL, allow_rho14: bool = False) -> bool:
    """True when only the diagonal and the (1,2)/(2,1) coherence are populated.

    With ``allow_rho14`` the (0,3)/(3,0) anti-diagonal corner may also be
    nonzero (the general X shape).
    """
    rho = np.asarray(rho)
    mask = np.ones((4, 4), dtype=bool)
    np.fill_diagonal(mask, False)
    mask[1, 2] = mask[2, 1] = False
    if allow_rho14:
        mask[0, 3] = mask[3, 0] = False
    return bool(np.max(np.abs(rho[mask])) <= tol)


def x_form_deviation(rho: np.ndarray) -> float:
    """Largest magnitude among elements outside the diagonal + (1,2) coherence."""
    rho = np.asarray(rho)
    mask = np.ones((4, 4), dtype=bool)
    np.fill_diagonal(mask, False)
    mask[1, 2] = mask[2, 1] = False
    if rho.ndim == 2:
        return float(np.max(np.abs(rho[mask])))
    return float(np.max(np.abs(rho[..., mask])))
