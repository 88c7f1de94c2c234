"""
Functionals phi and the observed / bootstrap test statistics

A statistic is always sqrt(n) * ||phi(.)|| for one of four testing problems:
independence (KS over cells), regression slope (plain or studentised),
parametric goodness of fit, and copula goodness of fit.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from models.families import ClaytonCopula, UnivariateFamily
from modules.empirical import (
    ZERO,
    EmpiricalCdf,
    NormKind,
    NormSpec,
    ParametricCdf,
    SignedCombination,
    ZeroFunction,
    evaluate,
    evaluate_left,
    norm_of_values,
)
from utils.exceptions import DegenerateDesign, KindMismatch, TiesDetected


class TestKind(str, Enum):
    INDEPENDENCE = "independence"
    SLOPE = "slope"
    SLOPE_STUDENTISED = "slope_studentised"
    GOF = "gof"
    COPULA = "copula"

    __test__ = False  # keep pytest from collecting the enum

    @property
    def is_bivariate(self):
        return self is not TestKind.GOF

    @property
    def is_slope(self):
        return self in (TestKind.SLOPE, TestKind.SLOPE_STUDENTISED)


class StatisticVariant(str, Enum):
    """What the bootstrap statistic subtracts from phi(H*_n)"""

    EQUIVALENT = "equivalent"   # 0
    CENTRED = "centred"         # phi(H_n)
    CORRECTED = "corrected"     # phi(R_n) of the resampling scheme


@dataclass(frozen=True)
class FunctionalSpec:
    """
    Which phi-map a test uses

    GoF and copula functionals carry a family and a norm kind; the grid of the
    norm depends on the data and is built per sample.
    """

    kind: TestKind
    family: object = None
    norm_kind: NormKind = None

    def __post_init__(self):
        kind = TestKind(self.kind)
        object.__setattr__(self, "kind", kind)
        needs_norm = kind in (TestKind.GOF, TestKind.COPULA)
        if needs_norm:
            if self.family is None or self.norm_kind is None:
                raise KindMismatch(f"{kind.value} functional needs a family and a norm")
            object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))
            if kind is TestKind.GOF and not isinstance(self.family, UnivariateFamily):
                raise KindMismatch("gof functional needs a univariate family")
            if kind is TestKind.COPULA and not isinstance(self.family, ClaytonCopula):
                raise KindMismatch("copula functional needs a copula family")
        elif self.family is not None or self.norm_kind is not None:
            raise KindMismatch(f"{kind.value} functional takes no family or norm")

    @property
    def studentised(self):
        return self.kind is TestKind.SLOPE_STUDENTISED


# ---------------------------------------------------------------------------
# Independence
# ---------------------------------------------------------------------------

def independence_grid(*samples):
    """Distinct x and y coordinates over all given samples"""
    xs = np.unique(np.concatenate([s.x for s in samples]))
    ys = np.unique(np.concatenate([s.y for s in samples]))
    return xs, ys


def independence_phi_grid(s, xs, ys):
    """
    H_n(x, y) - F_n(x) G_n(y) on the product grid xs x ys

    Counts are accumulated with cumulative sums, so the cost is O(|xs| |ys|).

    Returns:
        (len(xs), len(ys)) array
    """
    n = s.n
    ix = np.searchsorted(xs, s.x, side="left")
    iy = np.searchsorted(ys, s.y, side="left")
    inside = (ix < xs.size) & (iy < ys.size)
    counts = np.zeros((xs.size, ys.size))
    np.add.at(counts, (ix[inside], iy[inside]), 1.0)
    joint = counts.cumsum(axis=0).cumsum(axis=1) / n
    fx = np.searchsorted(np.sort(s.x), xs, side="right") / n
    gy = np.searchsorted(np.sort(s.y), ys, side="right") / n
    return joint - fx[:, None] * gy[None, :]


class IndependenceMap:
    """phi(H_n) for the independence problem, evaluable on product grids"""

    def __init__(self, sample):
        self.sample = sample

    def on_grid(self, xs, ys):
        return independence_phi_grid(self.sample, xs, ys)


def independence_statistic(s):
    """sqrt(n) * sup |H_n - F_n G_n| over the data product grid"""
    xs, ys = independence_grid(s)
    phi = independence_phi_grid(s, xs, ys)
    return float(np.sqrt(s.n) * np.max(np.abs(phi)))


# ---------------------------------------------------------------------------
# Regression slope
# ---------------------------------------------------------------------------

def _centred_moments(s):
    dx = s.x - s.x.mean()
    dy = s.y - s.y.mean()
    var_x = np.mean(dx * dx)
    if var_x <= 0:
        raise DegenerateDesign("Regressor has zero empirical variance")
    return np.mean(dx * dy), var_x


def slope_phi(s, studentised=False):
    """
    Signed slope functional with biased (1/n) moments

    plain: cov_n / var_n(X); studentised: cov_n / sd_n(X)

    Raises:
        DegenerateDesign: var_n(X) == 0
    """
    cov, var_x = _centred_moments(s)
    if studentised:
        return float(cov / np.sqrt(var_x))
    return float(cov / var_x)


def slope_statistic(s, studentised=False):
    """sqrt(n) * |phi(H_n)|"""
    return float(np.sqrt(s.n) * abs(slope_phi(s, studentised)))


# ---------------------------------------------------------------------------
# Goodness of fit
# ---------------------------------------------------------------------------

def gof_phi_value(measure, theta, family, norm):
    """
    ||measure - F_theta|| under the norm (no sqrt(n) factor)

    Raises:
        OutOfRange: theta outside the family's domain
    """
    return grid_norm(SignedCombination(measure, ParametricCdf(family, theta)), norm)


def grid_norm(f, norm):
    """||f|| on the norm's grid, including left limits when the grid asks"""
    points = norm.grid.points
    values = evaluate(f, points)
    left = None
    if (norm.kind is NormKind.SUP_ON_CELLS and norm.grid.include_left_limits
            and not norm.grid.is_2d):
        left = evaluate_left(f, points)
    return norm_of_values(values, norm, left)


def gof_centering(rn, theta_hat, family):
    """R_n - H_theta_hat as a single evaluable term"""
    if isinstance(rn, ZeroFunction):
        return ZERO
    return SignedCombination(rn, ParametricCdf(family, theta_hat))


def gof_bootstrap_statistic(hstar, theta_star, rn, theta_hat, family, norm, n):
    """
    sqrt(n) * ||H*_n - H_theta* - R_n + H_theta_hat||

    Grouped as (H*_n - H_theta*) - (R_n - H_theta_hat), so under the
    parametric null (R_n = H_theta_hat) the second group is exactly zero.
    """
    phi_star = SignedCombination(hstar, ParametricCdf(family, theta_star))
    return corrected_bootstrap_statistic(
        phi_star, gof_centering(rn, theta_hat, family), n, norm
    )


# ---------------------------------------------------------------------------
# Corrected bootstrap statistic
# ---------------------------------------------------------------------------

def corrected_bootstrap_statistic(phi_star, phi_Rn, n, norm=None):
    """
    sqrt(n) * ||phi(H*_n) - phi(R_n)||

    Args:
        phi_star: scalar, array of grid values, or evaluable function
        phi_Rn: same kind as phi_star, or ZERO
        n: sample size
        norm: NormSpec for functions; ignored for scalars (absolute value)
            and for arrays (sup over entries)

    Raises:
        KindMismatch: phi_star and phi_Rn are of different kinds
    """
    root_n = np.sqrt(n)
    if np.isscalar(phi_star) or isinstance(phi_star, (float, np.floating)):
        if isinstance(phi_Rn, ZeroFunction):
            phi_Rn = 0.0
        if not np.isscalar(phi_Rn):
            raise KindMismatch("Scalar phi needs a scalar centering")
        return float(root_n * abs(phi_star - phi_Rn))

    if isinstance(phi_star, np.ndarray):
        if isinstance(phi_Rn, ZeroFunction):
            phi_Rn = np.zeros_like(phi_star)
        if not isinstance(phi_Rn, np.ndarray) or phi_Rn.shape != phi_star.shape:
            raise KindMismatch("Grid-valued phi needs a centering on the same grid")
        return float(root_n * np.max(np.abs(phi_star - phi_Rn)))

    if not callable(phi_star) or not callable(phi_Rn):
        raise KindMismatch("phi_star and phi_Rn must both be functions")
    if norm is None:
        raise KindMismatch("Function-valued phi needs a norm")
    return float(root_n * grid_norm(SignedCombination(phi_star, phi_Rn), norm))


# ---------------------------------------------------------------------------
# Copula
# ---------------------------------------------------------------------------

def copula_ranks(s):
    """
    Within-sample ranks 1..n of each coordinate

    Raises:
        TiesDetected: a marginal has duplicate values
    """
    if np.unique(s.x).size != s.n or np.unique(s.y).size != s.n:
        raise TiesDetected("Empirical copula needs tie-free marginals")
    rx = np.empty(s.n, dtype=int)
    ry = np.empty(s.n, dtype=int)
    rx[np.argsort(s.x, kind="stable")] = np.arange(1, s.n + 1)
    ry[np.argsort(s.y, kind="stable")] = np.arange(1, s.n + 1)
    return rx, ry


def empirical_copula_eval(s, u, v):
    """C_n(u, v) = n^-1 sum 1{rank(X_i)/n <= u, rank(Y_i)/n <= v}"""
    rx, ry = copula_ranks(s)
    n = s.n
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    inside = (rx / n <= u[..., None]) & (ry / n <= v[..., None])
    return inside.mean(axis=-1)


def empirical_copula_grid(s):
    """C_n(i/n, j/n) for i, j = 0..n as an (n+1, n+1) array"""
    rx, ry = copula_ranks(s)
    n = s.n
    counts = np.zeros((n + 1, n + 1))
    np.add.at(counts, (rx, ry), 1.0)
    return counts.cumsum(axis=0).cumsum(axis=1) / n


def copula_distance(s, theta, family, norm_kind=NormKind.SUP_ON_CELLS,
                    include_left_limits=False):
    """||C_n - C_theta|| on {i/n} x {j/n}, i, j = 1..n (no sqrt(n))"""
    theta = family.check_theta(theta)
    n = s.n
    emp = empirical_copula_grid(s)
    grid = np.arange(n + 1) / n
    model = family.copula_cdf(grid[:, None], grid[None, :], theta)
    diff = emp[1:, 1:] - model[1:, 1:]
    if NormKind(norm_kind) is NormKind.L2_GRID:
        return float(np.sqrt(np.sum(diff * diff) / (n * n)))
    value = np.max(np.abs(diff))
    if include_left_limits:
        # cell [i/n, (i+1)/n) x [j/n, (j+1)/n) holds C_n(i/n, j/n)
        value = max(value, np.max(np.abs(emp[:-1, :-1] - model[1:, 1:])))
    return float(value)


def copula_statistic(s, theta, family, norm_kind=NormKind.SUP_ON_CELLS,
                     include_left_limits=False):
    """sqrt(n) * ||C_n - C_theta||"""
    return float(np.sqrt(s.n) * copula_distance(s, theta, family, norm_kind,
                                                include_left_limits))


def observed_statistic(functional, sample, theta=None, norm=None, include_left_limits=False):
    """
    T_n for any functional

    Args:
        functional: FunctionalSpec
        sample: Sample1D (gof) or Sample2D
        theta: fitted parameter (gof, copula)
        norm: NormSpec (gof)
    """
    kind = functional.kind
    if kind is TestKind.INDEPENDENCE:
        return independence_statistic(sample)
    if kind.is_slope:
        return slope_statistic(sample, functional.studentised)
    if kind is TestKind.GOF:
        return float(np.sqrt(sample.n) * gof_phi_value(
            EmpiricalCdf(sample), theta, functional.family, norm))
    return copula_statistic(sample, theta, functional.family, functional.norm_kind,
                            include_left_limits)


__all__ = [
    "TestKind", "StatisticVariant", "FunctionalSpec", "IndependenceMap",
    "independence_grid", "independence_phi_grid", "independence_statistic",
    "slope_phi", "slope_statistic", "gof_phi_value", "gof_centering",
    "gof_bootstrap_statistic", "corrected_bootstrap_statistic", "grid_norm",
    "copula_ranks", "empirical_copula_eval", "empirical_copula_grid",
    "copula_distance", "copula_statistic", "observed_statistic", "NormSpec",
]
