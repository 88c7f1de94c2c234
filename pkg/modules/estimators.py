"""
Parameter estimators and their bootstrap counterparts

The minimum-distance estimator scans a coarse grid and refines the best
cell by golden-section search; two-parameter families use coordinate
descent over the same 1-d routine.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import kendalltau

from modules.empirical import (
    ZERO,
    NormKind,
    SignedCombination,
    evaluate,
    evaluate_left,
)
from modules.functionals import copula_ranks
from utils.exceptions import DegenerateDesign, NonFiniteCriterion, OutOfRange

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - np.sqrt(5.0)) / 2.0


class EstimatorChoice(str, Enum):
    NONE = "none"
    MOMENTS = "moments"
    MD_CORRECTED = "md_corrected"
    MD_UNCORRECTED = "md_uncorrected"
    LEAST_SQUARES = "least_squares"
    TAU_INVERSION = "tau_inversion"


@dataclass(frozen=True)
class FitResult:
    theta: np.ndarray
    criterion_value: float = 0.0
    evaluations: int = 0

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)


@dataclass(frozen=True)
class SearchBox:
    """Per-coordinate bounds plus scan/refine settings"""

    lo: tuple
    hi: tuple
    grid_points: int = 101
    refine_tol: float = 1e-6
    sweeps: int = 3
    start: tuple = None

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")
        if any(not (l < h) for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"Empty search box {self.lo} .. {self.hi}")


class AdjustedTarget:
    """
    H*_n - (R_n - H_theta_hat), or just the base when no correction is given

    The correction is passed as one evaluable term (R_n - H_theta_hat); ZERO
    leaves the base bit-for-bit unchanged.
    """

    def __init__(self, base, correction=None):
        self.base = base
        self.correction = ZERO if correction is None else correction
        self._combined = SignedCombination(base, self.correction)

    @classmethod
    def from_pair(cls, base, subtract, add):
        return cls(base, SignedCombination(subtract, add))

    def __call__(self, x):
        return self._combined(x)

    def left_limit(self, x):
        return self._combined.left_limit(x)


# ---------------------------------------------------------------------------
# Closed-form estimators
# ---------------------------------------------------------------------------

def least_squares(s):
    """
    Ordinary least squares of Y on (1, X)

    Returns:
        (intercept, slope)

    Raises:
        DegenerateDesign: var_n(X) == 0
    """
    x_bar = s.x.mean()
    y_bar = s.y.mean()
    dx = s.x - x_bar
    sxx = np.sum(dx * dx)
    if sxx <= 0:
        raise DegenerateDesign("Regressor has zero empirical variance")
    slope = float(np.sum(dx * (s.y - y_bar)) / sxx)
    return float(y_bar - slope * x_bar), slope


def sample_moments(s):
    """Mean and biased (1/n) standard deviation"""
    values = s.values
    mean = float(values.mean())
    sd = float(np.sqrt(np.mean((values - mean) ** 2)))
    return mean, sd


def kendall_tau(s):
    """
    (#concordant - #discordant) / (n(n-1)/2) over unordered pairs

    Without ties tau-b reduces to this, so scipy's O(n log n) routine is used.

    Raises:
        TiesDetected: a marginal has duplicate values
    """
    copula_ranks(s)
    if s.n < 2:
        return 0.0
    return float(kendalltau(s.x, s.y).statistic)


def invert_tau(family, tau):
    """
    theta such that tau(C_theta) = tau

    Raises:
        OutOfRange: tau not attainable by the family
    """
    return family.tau_inverse(tau)


def tau_inversion_estimate(family, s):
    """
    Kendall-tau inversion, clamping negative tau to the independence boundary

    Raises:
        OutOfRange: perfectly concordant sample (tau = 1), which no finite
            parameter reproduces
    """
    tau = kendall_tau(s)
    if tau >= 1.0:
        raise OutOfRange(
            f"{family.family_id}: sample is perfectly concordant (Kendall tau = 1); "
            f"the copula parameter estimate would be infinite"
        )
    return family.tau_inverse(max(tau, 0.0))


# ---------------------------------------------------------------------------
# Minimum distance
# ---------------------------------------------------------------------------

def golden_section(obj, a, b, tol=1e-6):
    """
    Golden-section minimisation of a 1-d function on [a, b]

    Returns:
        (x_min, f_min, evaluations)
    """
    dist = b - a
    if dist <= tol:
        mid = 0.5 * (a + b)
        return mid, obj(mid), 1

    n_iter = int(np.ceil(np.log(tol / dist) / np.log(INV_PHI)))
    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = obj(c)
    yd = obj(d)
    evaluations = 2

    for _ in range(max(n_iter - 1, 0)):
        if yc <= yd:
            b = d
            d = c
            yd = yc
            dist = INV_PHI * dist
            c = a + INV_PHI_SQ * dist
            yc = obj(c)
        else:
            a = c
            c = d
            yc = yd
            dist = INV_PHI * dist
            d = a + INV_PHI * dist
            yd = obj(d)
        evaluations += 1

    if yc <= yd:
        return c, yc, evaluations
    return d, yd, evaluations


class _Criterion:
    """theta -> ||target - F_theta|| with target values cached on the grid"""

    def __init__(self, target, family, norm):
        self.family = family
        self.norm = norm
        self.points = norm.grid.points
        self.values = evaluate(target, self.points)
        self.left = None
        if norm.kind is NormKind.SUP_ON_CELLS and norm.grid.include_left_limits:
            self.left = evaluate_left(target, self.points)
        self.evaluations = 0

    def many(self, thetas):
        model = self.family.cdf_matrix(self.points, thetas)
        self.evaluations += model.shape[0]
        diff = self.values[None, :] - model
        if self.norm.kind is NormKind.SUP_ON_CELLS:
            out = np.max(np.abs(diff), axis=1)
            if self.left is not None:
                out = np.maximum(out, np.max(np.abs(self.left[None, :] - model), axis=1))
            return out
        return np.sqrt(np.sum(self.norm.weights[None, :] * diff * diff, axis=1))

    def __call__(self, theta):
        return float(self.many(np.atleast_2d(theta))[0])


def _minimise_coordinate(criterion, theta, k, lo, hi, grid_points, refine_tol):
    """Scan coordinate k on [lo, hi] with the others fixed, then refine"""
    scan = np.linspace(lo, hi, grid_points)
    thetas = np.repeat(theta[None, :], grid_points, axis=0)
    thetas[:, k] = scan
    values = criterion.many(thetas)
    if not np.all(np.isfinite(values)):
        raise NonFiniteCriterion(
            f"Minimum-distance criterion not finite on coordinate {k} scan"
        )
    best = int(np.argmin(values))  # first minimum: smallest theta wins ties
    a = scan[max(best - 1, 0)]
    b = scan[min(best + 1, grid_points - 1)]

    def along(value):
        trial = theta.copy()
        trial[k] = value
        return criterion(trial)

    x_ref, f_ref, _ = golden_section(along, a, b, refine_tol)
    out = theta.copy()
    if np.isfinite(f_ref) and f_ref < values[best]:
        out[k] = x_ref
        return out, f_ref
    out[k] = scan[best]
    return out, float(values[best])


def minimum_distance(target, family, norm, search):
    """
    argmin_theta ||target - F_theta|| under the norm

    Args:
        target: evaluable function (an ECDF or an AdjustedTarget)
        family: UnivariateFamily
        norm: NormSpec whose grid holds every jump of the target
        search: SearchBox

    Returns:
        FitResult

    Raises:
        NonFiniteCriterion: the criterion is NaN or infinite on a scan
        OutOfRange: the box leaves the family's domain
    """
    if len(search.lo) != family.n_params:
        raise OutOfRange(
            f"{family.family_id} has {family.n_params} parameter(s), box has {len(search.lo)}"
        )
    family.check_theta(search.lo)
    family.check_theta(search.hi)

    criterion = _Criterion(target, family, norm)
    if search.start is not None:
        theta = np.array(search.start, dtype=float)
    else:
        theta = 0.5 * (np.asarray(search.lo, dtype=float) + np.asarray(search.hi, dtype=float))

    sweeps = 1 if family.n_params == 1 else search.sweeps
    value = np.inf
    for _ in range(sweeps):
        for k in range(family.n_params):
            theta, value = _minimise_coordinate(
                criterion, theta, k, search.lo[k], search.hi[k],
                search.grid_points, search.refine_tol,
            )

    return FitResult(theta=theta, criterion_value=float(value),
                     evaluations=criterion.evaluations)
