"""Exception hierarchy shared by all ptcycle modules."""


class PtcycleError(Exception):
    """Base class for all ptcycle errors."""


# --- spectrum ---------------------------------------------------------------

class BrokenRegimeGamma(PtcycleError):
    """The similarity-map angle gamma is not real (|k| >= |g|)."""


class NonClassifiableMu(PtcycleError):
    """A time-dependent coefficient is neither purely real nor purely imaginary."""


class RealGapUnbounded(PtcycleError):
    """A real mode splitting reached or exceeded the base frequency nu."""


class OutsideRealityWindow(PtcycleError):
    """No real coincidence time exists for these parameters."""


# --- thermo -----------------------------------------------------------------

class NonNormalizable(PtcycleError):
    """Real splitting >= nu: the lower oscillator ladder is unbounded below."""


# --- numerics ---------------------------------------------------------------

class NotBracketed(PtcycleError):
    """f(a) and f(b) do not have opposite signs."""


class MaxIters(PtcycleError):
    """Iteration limit exhausted before convergence."""


class QuadratureNotConverged(PtcycleError):
    """Adaptive quadrature hit its recursion cap before meeting tolerance."""


# the quadrature depth cap is the only recursion limit in numerics
MaxDepth = QuadratureNotConverged


class EvaluationFailed(PtcycleError):
    """A user-supplied function raised during a finite-difference stencil."""


# --- cycles -----------------------------------------------------------------

class NoRootInBracket(PtcycleError):
    """A bracketed scan found no sign change."""


class BranchLost(PtcycleError):
    """Isentrope continuation failed to re-bracket the followed branch."""


class MultiValued(PtcycleError):
    """A parameter scan found several roots where a single branch was required."""


class CycleInfeasible(PtcycleError):
    """A cycle construction step has no solution for the requested corners."""


class InvalidRatio(PtcycleError):
    """Coupling ratio lambda2/lambda1 must be positive and different from 1."""


# --- phase ------------------------------------------------------------------

class OutOfBinodal(PtcycleError):
    """Coupling value lies outside the requested coexistence interval."""


class RootNotBracketed(PtcycleError):
    """Inflection-point search could not bracket a derivative sign change."""
