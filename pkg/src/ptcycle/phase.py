"""Maxwell construction and spinodal decomposition in the broken regime.

For lam < 0 the pressure p(lam) oscillates and vanishes at

    lam0(n) = -n^2 pi^2 T^2 / N,      n = 1, 2, ...

Even-index zeros are minima of F(lam), odd-index zeros maxima, and the
signed areas between consecutive zeros cancel pairwise, so the lam-axis is
the Maxwell line (p_Max = 0). A coexistence (binodal) interval pairs the
even zeros lam1 = lam0(2n) and lam2 = lam0(2n+2); inside it the stable
state is the heterogeneous mixture given by the lever rule, with free
energy F_het(lam) = n1 F(lam1) + n2 F(lam2) = F(lam1) since
F(lam1) = F(lam2) exactly. The spinodal interval between the inflection
points of F (zeros of dp/dlam) marks the locally unstable states. Binodal
widths scale exactly as T^2 (inherited from the zeros), so binodal and
spinodal never merge at any positive temperature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import OutOfBinodal, RootNotBracketed
from .numerics import (
    DEFAULT_CONFIG,
    NumericsConfig,
    derivative_central,
    find_root_bracketed,
)
from .spectrum import ModelParams, static_split
from .thermo import EvalDomain, _pressure_lambda, free_energy, thermo_point

__all__ = [
    "PhaseRegions",
    "MixtureState",
    "pressure_zeros",
    "binodal_interval",
    "isotherm_area",
    "lever_fractions",
    "heterogeneous_free_energy",
    "spinodal_interval",
    "critical_temperature_scan",
    "heterogeneous_entropy",
    "phase_regions",
    "MAXWELL_PRESSURE",
]

MAXWELL_PRESSURE = 0.0  # the lam-axis is the Maxwell line


@dataclass(frozen=True)
class PhaseRegions:
    """Zeros, coexistence and instability intervals of one isotherm."""

    T: float
    zeros: Tuple[float, ...]          # lam0(n), n = 1..n_max, decreasing
    binodal: Tuple[float, float]      # (lam2, lam1), lam2 < lam1 < 0
    spinodal: Tuple[float, float]
    maxwell_pressure: float
    f_het: float                      # common tangent value F(lam1) = F(lam2)


@dataclass(frozen=True)
class MixtureState:
    """Lever-rule phase fractions at composition lam inside a binodal."""

    lam: float
    n1: float
    n2: float


def _zero(n: int, T: float, N: int) -> float:
    return -(n * n) * math.pi * math.pi * T * T / N


def pressure_zeros(T: float, N: int, n_max: int, nu: float = 1.0,
                   cfg: NumericsConfig = DEFAULT_CONFIG) -> list:
    """Zeros lam0(n) = -n^2 pi^2 T^2 / N for n = 1..n_max, decreasing.

    Each closed-form zero is verified as a sign-changing root of the
    pressure by bracketed refinement (the zeros do not depend on nu; any
    positive nu works for the verification evaluations).
    """
    if not T > 0 or n_max < 1:
        raise ValueError("need T > 0 and n_max >= 1")
    out = []
    for n in range(1, n_max + 1):
        lam0 = _zero(n, T, N)
        delta = 0.45 * (2 * n - 1) * math.pi * math.pi * T * T / N
        refined = find_root_bracketed(
            lambda lam: _pressure_lambda(T, lam, nu, N),
            lam0 - delta, lam0 + delta, cfg)
        out.append(refined)
    return out


def binodal_interval(T: float, N: int, branch: int = 1) -> Tuple[float, float]:
    """Coexistence interval (lam0(2n+2), lam0(2n)) for branch n >= 1."""
    if branch < 1:
        raise ValueError("branch index must be >= 1")
    return (_zero(2 * branch + 2, T, N), _zero(2 * branch, T, N))


def isotherm_area(n: int, T: float, nu: float, N: int) -> float:
    """Signed area of p(lam) between the zeros lam0(n-1) and lam0(n).

    Closed form T * ln[(cos((n-1) pi) - cosh(nu/T)) / (cos(n pi) - cosh(nu/T))],
    evaluated through sech(nu/T) to stay finite at low temperature. The
    areas alternate: area(n) = -area(n+1) for every n, which is what makes
    the lam-axis the Maxwell line.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    q = math.exp(-nu / T)
    sech = 2.0 * q / (1.0 + q * q)
    s_prev = -1.0 if (n - 1) % 2 else 1.0   # cos((n-1) pi)
    s_this = -1.0 if n % 2 else 1.0         # cos(n pi)
    return T * (math.log1p(-s_prev * sech) - math.log1p(-s_this * sech))


def lever_fractions(lam: float, lam1: float, lam2: float) -> MixtureState:
    """Phase fractions n1 = (lam2-lam)/(lam2-lam1), n2 = (lam-lam1)/(lam2-lam1)."""
    if lam1 == lam2:
        raise ValueError("lever rule needs lam1 != lam2")
    lo, hi = min(lam1, lam2), max(lam1, lam2)
    if not lo <= lam <= hi:
        raise OutOfBinodal(f"lam = {lam} outside [{lo}, {hi}]")
    n1 = (lam2 - lam) / (lam2 - lam1)
    return MixtureState(lam, n1, 1.0 - n1)


def heterogeneous_free_energy(lam: float, T: float, nu: float, N: int,
                              branch: int = 1) -> float:
    """Mixture free energy on branch n: the common tangent F(lam1) = F(lam2).

    Valid for lam inside the branch's binodal; the endpoint free energies
    are asserted equal (they agree exactly because both endpoints sit at
    even zeros, where cos(gap/T) = 1).
    """
    lo, hi = binodal_interval(T, N, branch)
    if not lo <= lam <= hi:
        raise OutOfBinodal(f"lam = {lam} outside binodal [{lo}, {hi}]")
    f1 = free_energy(EvalDomain(static_split(ModelParams(N, nu, hi)), T))
    f2 = free_energy(EvalDomain(static_split(ModelParams(N, nu, lo)), T))
    if abs(f1 - f2) > 1e-9 * (1.0 + abs(f1)):
        raise AssertionError(f"binodal endpoints not degenerate: {f1} vs {f2}")
    return f1


def spinodal_interval(T: float, nu: float, N: int, branch: int = 1,
                      cfg: NumericsConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    """Instability interval: the two zeros of dp/dlam inside the binodal.

    Between the returned points dp/dlam > 0 (mechanically unstable); the
    sub-intervals to the binodal edges are metastable (dp/dlam < 0). Found
    by finite-difference derivatives plus bracketed refinement.
    """
    lo, hi = binodal_interval(T, N, branch)

    def dp(lam: float) -> float:
        return derivative_central(
            lambda x: _pressure_lambda(T, x, nu, N), lam, cfg)

    # dp < 0 at both even-zero endpoints, > 0 at the odd zero in between
    mid = _zero(2 * branch + 1, T, N)
    eps = 1e-9 * (hi - lo)
    if not (dp(lo + eps) < 0.0 < dp(mid) and dp(hi - eps) < 0.0):
        raise RootNotBracketed(
            f"derivative sign pattern broken on binodal [{lo}, {hi}]")
    left = find_root_bracketed(dp, lo + eps, mid, cfg)
    right = find_root_bracketed(dp, mid, hi - eps, cfg)
    return (left, right)


def critical_temperature_scan(nu: float, N: int, T_list: Sequence[float],
                              branch: int = 1,
                              cfg: NumericsConfig = DEFAULT_CONFIG) -> list:
    """Binodal/spinodal widths per temperature, for locating a merge point.

    Returns rows (T, binodal_width, spinodal_width). Binodal widths are
    proportional to T^2 exactly, spinodal widths shrink with them, and the
    two never coincide for T > 0: the merge (critical) temperature is 0.
    """
    rows = []
    for T in T_list:
        if not T > 0:
            raise ValueError("temperatures must be positive")
        lo, hi = binodal_interval(T, N, branch)
        s_lo, s_hi = spinodal_interval(T, nu, N, branch, cfg)
        rows.append((T, hi - lo, s_hi - s_lo))
    return rows


def heterogeneous_entropy(T: float, nu: float = 1.0, N: int = 160,
                          lam_check: Optional[float] = None,
                          cfg: NumericsConfig = DEFAULT_CONFIG) -> float:
    """Entropy of the heterogeneous phase: identically zero.

    On the Maxwell line the mixture pressure vanishes at every temperature,
    so dS = (dp/dT) dlam integrates to zero along any mixture path; the
    lam-independence is what the Maxwell relation dS/dlam = dp/dT proves,
    and the absolute value 0 fixes the remaining constant. As a supporting
    check the homogeneous Maxwell relation is verified by finite
    differences at lam_check (default: middle of the first binodal).
    """
    if not T > 0:
        raise ValueError("temperature must be positive")
    if lam_check is None:
        lo, hi = binodal_interval(T, N, 1)
        lam_check = 0.5 * (lo + hi)
    ds_dlam = derivative_central(
        lambda lam: thermo_point(T, ModelParams(N, nu, lam)).S, lam_check, cfg)
    dp_dT = derivative_central(
        lambda Tx: _pressure_lambda(Tx, lam_check, nu, N), T, cfg)
    if abs(ds_dlam - dp_dT) > 1e-6 * (1.0 + abs(dp_dT)):
        raise AssertionError(
            f"Maxwell relation violated at (T={T}, lam={lam_check}): "
            f"dS/dlam = {ds_dlam} vs dp/dT = {dp_dT}")
    return 0.0


def phase_regions(T: float, nu: float, N: int, branch: int = 1,
                  n_max: Optional[int] = None,
                  cfg: NumericsConfig = DEFAULT_CONFIG) -> PhaseRegions:
    """Assembled phase diagram data for one isotherm and one branch."""
    if n_max is None:
        n_max = 2 * branch + 2
    zeros = pressure_zeros(T, N, n_max, nu, cfg)
    lo, hi = binodal_interval(T, N, branch)
    spin = spinodal_interval(T, nu, N, branch, cfg)
    f_het = heterogeneous_free_energy(0.5 * (lo + hi), T, nu, N, branch)
    return PhaseRegions(T=T, zeros=tuple(zeros), binodal=(lo, hi),
                        spinodal=spin, maxwell_pressure=MAXWELL_PRESSURE,
                        f_het=f_het)
