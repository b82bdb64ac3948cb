"""Closed-form canonical-ensemble quantities for two oscillator ladders.

With mode frequencies W_pm = nu +- gap (real splitting) or nu +- i*gap
(imaginary splitting), the ladder spectrum E = n_+ W_+ + n_- W_- gives

    Z = e^{nu/T} / (4 sinh(W_+/2T) sinh(W_-/2T))
      = e^{nu/T} / (2 [cosh(nu/T) - C]),     C = cosh(gap/T) or cos(gap/T),

real in both regimes because complex frequencies come in conjugate pairs.
The code evaluates exact subtraction-safe rearrangements of the same
expressions (geometric-series / exponentially-scaled forms), so there is
no overflow at low temperature and no cancellation at high temperature:

    real gap:       Z = 1 / [(1 - e^{-W_-/T}) (1 - e^{-W_+/T})],
                    U = W_-/(e^{W_-/T}-1) + W_+/(e^{W_+/T}-1)
    imaginary gap:  Z = 1 / (1 - 2 q cos(gap/T) + q^2),  q = e^{-nu/T},
                    U = 2 q [nu cos(gap/T) + gap sin(gap/T) - q nu] / D

with F = -T ln Z and S = ln Z + U/T exactly. The pressure conjugate to the
coupling lam (the volume analogue) is p = -dF/dlam at fixed T, nu:

    p = sqrt(N) sinh(sqrt(N lam)/T) / (sqrt(lam) [2 cosh(nu/T) - 2 C]),

continued through lam = 0 by the sinh(z)/z series (both branches are one
analytic function of w = N lam / T^2). Units: hbar = k_B = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import NonNormalizable
from .numerics import DEFAULT_CONFIG, NumericsConfig, derivative_central
from .spectrum import GapKind, ModelParams, SpectralSplit, static_split

__all__ = [
    "ThermoPoint",
    "EvalDomain",
    "partition_function",
    "log_partition_function",
    "free_energy",
    "internal_energy",
    "entropy",
    "pressure",
    "heat_capacity",
    "thermo_point",
]

# series switch for the analytic continuation of sinh(sqrt(w))/sqrt(w) etc.
_SERIES_W = 1e-8


@dataclass(frozen=True)
class ThermoPoint:
    """All ensemble quantities at one (T, parameter) point; p only for static lam."""

    T: float
    Z: float
    F: float
    U: float
    S: float
    p: Optional[float] = None


@dataclass(frozen=True)
class EvalDomain:
    """A splitting plus a temperature; rejects non-normalizable inputs."""

    split: SpectralSplit
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"temperature must be positive, got {self.T}")
        if self.split.gap_kind is GapKind.REAL and self.split.gap >= self.split.nu:
            raise NonNormalizable(
                f"real splitting {self.split.gap} >= nu {self.split.nu}")


def _check(split: SpectralSplit, T: float) -> None:
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    if split.gap_kind is GapKind.REAL and split.gap >= split.nu:
        raise NonNormalizable(f"real splitting {split.gap} >= nu {split.nu}")


def _log_z(split: SpectralSplit, T: float) -> float:
    _check(split, T)
    nu, gap = split.nu, split.gap
    if split.gap_kind is GapKind.REAL:
        wm, wp = nu - gap, nu + gap
        return (-math.log1p(-math.exp(-wm / T))
                - math.log1p(-math.exp(-wp / T)))
    q = math.exp(-nu / T)
    return -math.log((1.0 - q) ** 2 + 2.0 * q * (1.0 - math.cos(gap / T)))


def _u(split: SpectralSplit, T: float) -> float:
    _check(split, T)
    nu, gap = split.nu, split.gap
    if split.gap_kind is GapKind.REAL:
        # w/(e^{w/T}-1) written with negative exponents only (no overflow)
        wm, wp = nu - gap, nu + gap
        return (wm * math.exp(-wm / T) / -math.expm1(-wm / T)
                + wp * math.exp(-wp / T) / -math.expm1(-wp / T))
    q = math.exp(-nu / T)
    c, s = math.cos(gap / T), math.sin(gap / T)
    D = 1.0 - 2.0 * q * c + q * q
    return 2.0 * q * (nu * c + gap * s - q * nu) / D


def log_partition_function(d: EvalDomain) -> float:
    """ln Z; preferred over Z itself at extreme temperatures."""
    return _log_z(d.split, d.T)


def partition_function(d: EvalDomain) -> float:
    """Canonical partition function Z > 0, real in both regimes."""
    return math.exp(_log_z(d.split, d.T))


def free_energy(d: EvalDomain) -> float:
    """Helmholtz free energy F = -T ln Z."""
    return -d.T * _log_z(d.split, d.T)


def internal_energy(d: EvalDomain) -> float:
    """Internal energy U = T^2 d(ln Z)/dT, in closed form."""
    return _u(d.split, d.T)


def entropy(d: EvalDomain) -> float:
    """Entropy S = ln Z + U/T (= -dF/dT at fixed couplings)."""
    return _log_z(d.split, d.T) + _u(d.split, d.T) / d.T


def heat_capacity(d: EvalDomain, cfg: NumericsConfig = DEFAULT_CONFIG) -> float:
    """dU/dT at fixed splitting, by Richardson central differences."""
    return derivative_central(lambda T: _u(d.split, T), d.T, cfg)


def _pressure_lambda(T: float, lam: float, nu: float, N: int) -> float:
    """p(T, lam) = -dF/dlam, one analytic function of w = N*lam/T^2."""
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    q = math.exp(-nu / T)
    w = N * lam / (T * T)
    if abs(w) < _SERIES_W:
        # sinh(sqrt(w))/sqrt(w) and cosh(sqrt(w)) by their series in w
        sinhc = 1.0 + w / 6.0 + w * w / 120.0
        one_minus_coshx = -(w / 2.0 + w * w / 24.0)
        D = (1.0 - q) ** 2 + 2.0 * q * one_minus_coshx
        return (N / T) * sinhc * q / D
    if lam > 0:
        g = math.sqrt(N * lam)
        if g >= nu:
            raise NonNormalizable(f"real splitting {g} >= nu {nu}")
        qm, qp = math.exp(-(nu - g) / T), math.exp(-(nu + g) / T)
        return math.sqrt(N / lam) * (qm - qp) / (2.0 * (1.0 - qm) * (1.0 - qp))
    m = math.sqrt(-N * lam)
    D = 1.0 - 2.0 * q * math.cos(m / T) + q * q
    return math.sqrt(N) * q * math.sin(m / T) / (math.sqrt(-lam) * D)


def pressure(T: float, p: ModelParams) -> float:
    """Pressure conjugate to the coupling lam at fixed T and nu."""
    return _pressure_lambda(T, p.lam, p.nu, p.N)


def thermo_point(T: float, p: ModelParams) -> ThermoPoint:
    """Full ThermoPoint (Z, F, U, S, p) for a static model at temperature T."""
    d = EvalDomain(static_split(p), T)
    ln_z = _log_z(d.split, d.T)
    u = _u(d.split, d.T)
    return ThermoPoint(T=T, Z=math.exp(ln_z), F=-T * ln_z, U=u,
                       S=ln_z + u / T, p=_pressure_lambda(T, p.lam, p.nu, p.N))
