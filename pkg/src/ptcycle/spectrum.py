"""Model parameters and mode frequencies of a boson coupled to a boson bath.

A single boson (frequency nu) couples to a bath of N identical bosons
through a non-Hermitian, PT-symmetric bilinear interaction with couplings
g, k. After a similarity transformation the model reduces to two decoupled
oscillator ladders with frequencies

    W_pm = nu +- sqrt(N * lam),        lam := g**2 - k**2,

so everything thermodynamic only needs nu and the splitting sqrt(N*lam).
For lam > 0 the splitting is real (unbroken PT symmetry, bounded spectrum
for nu > sqrt(N*lam)); for lam < 0 it is imaginary and the two ladders form
complex-conjugate pairs (spontaneously broken regime); lam = 0 is the
exceptional point. Units: hbar = k_B = 1 throughout.

A time-dependent similarity map replaces the static splitting by mu(t),

    mu(t) = lam*sqrt(N)*sqrt(c1**2 + lam)
            / (2*lam + 2*c1**2 * sin(2*lam*sqrt(N)*(t + c2))**2),

with real integration constants c1 != 0 and c2 (a pure time shift). mu is
evaluated in complex arithmetic with principal square roots and classified
as real or imaginary; sqrt(c1**2 + lam) is the only complexity source, so
the result is real for lam > -c1**2 and imaginary below.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum

from .errors import (
    BrokenRegimeGamma,
    EvaluationFailed,
    NonClassifiableMu,
    OutsideRealityWindow,
    RealGapUnbounded,
)
from .numerics import DEFAULT_CONFIG, NumericsConfig, find_root_bracketed

__all__ = [
    "GapKind",
    "CouplingParams",
    "ModelParams",
    "TimeDependence",
    "SpectralSplit",
    "ClassifiedGap",
    "lambda_from_couplings",
    "dyson_gamma",
    "static_split",
    "mu_complex",
    "mu",
    "mu_imag",
    "split_at_time",
    "coincidence_time",
    "oscillation_period",
]

log = logging.getLogger(__name__)

# relative tolerance for deciding that a complex value is purely real/imaginary
REALITY_TOL = 1e-9


class GapKind(Enum):
    REAL = "real"
    IMAGINARY = "imaginary"


@dataclass(frozen=True)
class CouplingParams:
    """Raw interaction couplings g, k (energy units); any finite values."""

    g: float
    k: float


@dataclass(frozen=True)
class ModelParams:
    """Bath size N >= 1, oscillator frequency nu > 0, coupling lam.

    lam plays the role of the volume in the thermodynamic analogy. For
    lam > 0 normalizability additionally needs nu > sqrt(N*lam); that is
    enforced by the thermodynamic consumers, not here.
    """

    N: int
    nu: float
    lam: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"bath size N must be >= 1, got {self.N}")
        if not self.nu > 0:
            raise ValueError(f"frequency nu must be positive, got {self.nu}")


@dataclass(frozen=True)
class TimeDependence:
    """Integration constants of the time-dependent similarity map."""

    c1: float
    c2: float = 0.0

    def __post_init__(self):
        if self.c1 == 0.0:
            raise ValueError("c1 = 0 makes the time-dependent map singular")


@dataclass(frozen=True)
class SpectralSplit:
    """Mode-frequency pair W_pm = nu +- gap (real) or nu +- i*gap (imaginary)."""

    nu: float
    gap_kind: GapKind
    gap: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.gap < 0:
            raise ValueError(f"gap must be non-negative, got {self.gap}")


@dataclass(frozen=True)
class ClassifiedGap:
    """Reality classification of a complex splitting value.

    ``signed`` keeps the sign of the surviving component; ``gap`` is its
    magnitude, ready to build a SpectralSplit.
    """

    kind: GapKind
    gap: float
    signed: float


def lambda_from_couplings(c: CouplingParams) -> float:
    """Effective coupling lam = g**2 - k**2."""
    return c.g * c.g - c.k * c.k


def dyson_gamma(c: CouplingParams) -> float:
    """Angle gamma of the static similarity map, tanh(2*gamma) = -k/g.

    Only real (and hence only defined) in the unbroken regime |k| < |g|.
    """
    if abs(c.k) >= abs(c.g):
        raise BrokenRegimeGamma(
            f"gamma is not real for |k| >= |g| (g={c.g}, k={c.k})")
    return 0.5 * math.atanh(-c.k / c.g)


def static_split(p: ModelParams) -> SpectralSplit:
    """Static mode splitting: real gap sqrt(N*lam) or imaginary sqrt(N*|lam|)."""
    if p.lam >= 0:
        return SpectralSplit(p.nu, GapKind.REAL, math.sqrt(p.N * p.lam))
    return SpectralSplit(p.nu, GapKind.IMAGINARY, math.sqrt(-p.N * p.lam))


def oscillation_period(p: ModelParams) -> float:
    """Period pi/(2*|lam|*sqrt(N)) of the sin^2 drive in mu(t)."""
    if p.lam == 0.0:
        return math.inf
    return math.pi / (2.0 * abs(p.lam) * math.sqrt(p.N))


def mu_complex(t: float, p: ModelParams, td: TimeDependence) -> complex:
    """mu(t) over complex arithmetic with principal branches.

    At lam = 0 the formula is a removable 0/0; the analytic limit
    sqrt(N)*|c1|/2, constant in t, is returned instead.
    """
    if p.lam == 0.0:
        return complex(math.sqrt(p.N) * abs(td.c1) / 2.0, 0.0)
    arg = 2.0 * p.lam * math.sqrt(p.N) * (t + td.c2)
    num = p.lam * math.sqrt(p.N) * cmath.sqrt(complex(td.c1 * td.c1 + p.lam, 0.0))
    den = 2.0 * p.lam + 2.0 * td.c1 * td.c1 * math.sin(arg) ** 2
    if den == 0.0:
        raise EvaluationFailed(f"mu(t) has a pole at t = {t} (lam = {p.lam})")
    return num / den


def _classify(z: complex, what: str) -> ClassifiedGap:
    mag = abs(z)
    if mag == 0.0:
        return ClassifiedGap(GapKind.REAL, 0.0, 0.0)
    if abs(z.imag) <= REALITY_TOL * mag:
        return ClassifiedGap(GapKind.REAL, abs(z.real), z.real)
    if abs(z.real) <= REALITY_TOL * mag:
        return ClassifiedGap(GapKind.IMAGINARY, abs(z.imag), z.imag)
    raise NonClassifiableMu(f"{what} = {z} is neither purely real nor imaginary")


def mu(t: float, p: ModelParams, td: TimeDependence) -> ClassifiedGap:
    """Time-dependent splitting, classified as a real or imaginary gap."""
    return _classify(mu_complex(t, p, td), "mu")


def _mu_imag_complex(t: float, p: ModelParams, td: TimeDependence) -> complex:
    arg = 2.0 * p.lam * math.sqrt(p.N) * (t + td.c2)
    ratio = (cmath.sqrt(complex(td.c1 * td.c1 + p.lam, 0.0))
             / cmath.sqrt(complex(p.lam, 0.0)))
    return 0.5 * cmath.atan(ratio * math.tan(arg))


def mu_imag(t: float, p: ModelParams, td: TimeDependence) -> float:
    """Phase coefficient mu_I(t) of the time-dependent similarity map.

    Returned on the arctan branch that is continuous in t: the principal
    value jumps by -pi/2 across each tan pole, so pi/2 * round(u/pi) is
    added back, with u the drive argument. Raises NonClassifiableMu when
    the value is not purely real (which happens for -c1**2 < lam < 0, where
    the argument chain turns imaginary).
    """
    if p.lam == 0.0:
        # the arctan argument scales as 2*c1*sqrt(lam*N)*(t+c2) -> 0
        return 0.0
    z = _mu_imag_complex(t, p, td)
    cls = _classify(z, "mu_I")
    if cls.kind is not GapKind.REAL:
        raise NonClassifiableMu(
            f"mu_I(t={t}) = {z} is purely imaginary for lam = {p.lam}; "
            "the continuous real branch only exists for lam > 0 or lam < -c1**2")
    u = 2.0 * p.lam * math.sqrt(p.N) * (t + td.c2)
    return cls.signed + 0.5 * math.pi * round(u / math.pi)


def split_at_time(t: float, p: ModelParams, td: TimeDependence) -> SpectralSplit:
    """SpectralSplit with the instantaneous gap mu(t) in place of the static one."""
    cls = mu(t, p, td)
    if cls.kind is GapKind.REAL and cls.gap >= p.nu:
        raise RealGapUnbounded(
            f"|mu(t)| = {cls.gap} >= nu = {p.nu}: lower ladder unbounded")
    return SpectralSplit(p.nu, cls.kind, cls.gap)


def coincidence_time(p: ModelParams, td: TimeDependence, n: int = 0,
                     cfg: NumericsConfig = DEFAULT_CONFIG) -> float:
    """Time t_c at which the instantaneous splitting equals the static one.

    Closed form (unbroken regime, 0 < lam <= c1**2/3):

        t_c = arccos(A) / (4*lam*sqrt(N)) + pi*n / (2*lam*sqrt(N)) - c2,
        A   = 1 + (2*lam - sqrt(lam*(c1**2 + lam))) / c1**2,

    refined by root-finding on |mu(t)| - sqrt(N*lam); the root-finding value
    is authoritative and a disagreement beyond 1e-6 is logged. Outside
    (0, c1**2/3] there is no real solution matching the static splitting:
    in the broken regime mu(t) is real for lam > -c1**2 while the static
    splitting is imaginary, so OutsideRealityWindow is raised for lam <= 0
    as well as for lam > c1**2/3.
    """
    c1sq = td.c1 * td.c1
    if not 0.0 < p.lam <= c1sq / 3.0:
        raise OutsideRealityWindow(
            f"lam = {p.lam} outside (0, c1**2/3] = (0, {c1sq / 3.0}]: "
            "the arccos argument leaves [-1, 1]")
    lam = p.lam
    sqrtN = math.sqrt(p.N)
    arg = 1.0 + (2.0 * lam - math.sqrt(lam * (c1sq + lam))) / c1sq
    arg = min(1.0, max(-1.0, arg))  # guard roundoff at the window edge
    omega = 2.0 * lam * sqrtN
    guess = math.acos(arg) / (2.0 * omega) + math.pi * n / omega - td.c2

    target = math.sqrt(p.N * lam)
    resid = lambda t: mu(t, p, td).gap - target
    # tangent root at the window boundary (arg = 1): no sign change to bracket
    if arg >= 1.0 - 1e-12:
        return guess
    half = 0.05 * math.pi / omega
    try:
        refined = find_root_bracketed(resid, guess - half, guess + half, cfg)
    except Exception:
        return guess
    if abs(refined - guess) > 1e-6:
        log.warning("coincidence_time: closed form %.12g vs root %.12g disagree",
                    guess, refined)
    return refined
