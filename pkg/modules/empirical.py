"""
Empirical measures, CDF evaluation and the two grid norms

Everything here is pure: samples are immutable and every function returns
new arrays.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from utils.exceptions import EmptyInput, KindMismatch


def _frozen_array(values, ndim):
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"Expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Sample1D:
    """Univariate observations in their original order"""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values, 1)
        if arr.size < 1:
            raise EmptyInput("Sample1D needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Sample1D values must be finite")
        object.__setattr__(self, "values", arr)
        sorted_values = np.sort(arr)
        sorted_values.setflags(write=False)
        object.__setattr__(self, "_sorted", sorted_values)

    @property
    def n(self):
        return self.values.size

    @property
    def sorted_values(self):
        return self._sorted


@dataclass(frozen=True, eq=False)
class Sample2D:
    """Paired observations (x_i, y_i) in their original order"""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _frozen_array(self.x, 1)
        y = _frozen_array(self.y, 1)
        if x.size != y.size:
            raise ValueError(f"x and y lengths differ: {x.size} vs {y.size}")
        if x.size < 1:
            raise EmptyInput("Sample2D needs at least one pair")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("Sample2D coordinates must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, pairs):
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    @property
    def n(self):
        return self.x.size

    @property
    def pairs(self):
        return np.column_stack([self.x, self.y])


@dataclass(frozen=True, eq=False)
class EvalGrid:
    """Evaluation points: sorted reals (1-d) or an (m, 2) array of pairs"""

    points: np.ndarray
    include_left_limits: bool = False

    def __post_init__(self):
        arr = np.array(self.points, dtype=float)
        if arr.size == 0:
            raise EmptyInput("EvalGrid must not be empty")
        if arr.ndim == 1:
            if np.any(np.diff(arr) < 0):
                raise ValueError("1-d grid points must be sorted ascending")
        elif not (arr.ndim == 2 and arr.shape[1] == 2):
            raise ValueError(f"Grid must be 1-d or (m, 2), got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @property
    def is_2d(self):
        return self.points.ndim == 2

    @classmethod
    def from_observations(cls, *arrays, extra=None, include_left_limits=True):
        """Sorted union of observation arrays (plus optional extra points)"""
        parts = [np.asarray(a, dtype=float).ravel() for a in arrays]
        if extra is not None:
            parts.append(np.asarray(extra, dtype=float).ravel())
        return cls(np.unique(np.concatenate(parts)), include_left_limits)

    @classmethod
    def product(cls, xs, ys):
        """All pairs of xs x ys, x varying slowest"""
        gx, gy = np.meshgrid(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float),
                             indexing="ij")
        return cls(np.column_stack([gx.ravel(), gy.ravel()]), False)


class NormKind(str, Enum):
    SUP_ON_CELLS = "sup"
    L2_GRID = "l2"


@dataclass(frozen=True, eq=False)
class NormSpec:
    kind: NormKind
    grid: EvalGrid
    weights: np.ndarray = None

    def __post_init__(self):
        kind = NormKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is NormKind.L2_GRID:
            if self.weights is None:
                raise ValueError("L2 norm needs weights")
            w = np.array(self.weights, dtype=float)
            n_points = self.grid.points.shape[0]
            if w.shape != (n_points,):
                raise ValueError(f"Expected {n_points} weights, got shape {w.shape}")
            total = w.sum()
            if np.any(w < 0) or not np.isfinite(total) or total <= 0:
                raise ValueError("L2 weights must be nonnegative with a positive finite sum")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @classmethod
    def sup(cls, grid):
        return cls(NormKind.SUP_ON_CELLS, grid)


# ---------------------------------------------------------------------------
# Evaluable functions
# ---------------------------------------------------------------------------

def evaluate(f, points):
    """Value of an evaluable function at 1-d points or (m, 2) pairs"""
    points = np.asarray(points, dtype=float)
    if points.ndim == 2:
        return np.asarray(f(points[:, 0], points[:, 1]), dtype=float)
    return np.asarray(f(points), dtype=float)


def evaluate_left(f, points):
    """Left limit at 1-d points; continuous functions fall back to their value"""
    left = getattr(f, "left_limit", None)
    if left is None:
        return evaluate(f, points)
    return np.asarray(left(np.asarray(points, dtype=float)), dtype=float)


class EmpiricalCdf:
    """Right-continuous ECDF F_n(x) = #{X_i <= x} / n; ties count with multiplicity"""

    def __init__(self, sample):
        if not isinstance(sample, Sample1D):
            sample = Sample1D(sample)
        self.sample = sample
        self._sorted = sample.sorted_values
        self._n = float(sample.n)

    def __call__(self, x):
        return np.searchsorted(self._sorted, x, side="right") / self._n

    def left_limit(self, x):
        return np.searchsorted(self._sorted, x, side="left") / self._n

    @property
    def jump_points(self):
        return np.unique(self._sorted)


class ParametricCdf:
    """x -> F_theta(x) for a fixed theta (continuous)"""

    def __init__(self, family, theta):
        self.family = family
        self.theta = family.check_theta(theta)

    def __call__(self, x):
        return self.family.cdf(x, self.theta)


class ZeroFunction:
    """The zero element: phi(R_n) for null resampling schemes"""

    def __call__(self, x, y=None):
        return np.zeros(np.shape(x))

    def left_limit(self, x):
        return np.zeros(np.shape(x))


ZERO = ZeroFunction()


class SignedCombination:
    """
    f - g as an evaluable function (left limits taken term by term)

    Nesting keeps the grouping explicit, so (a - b) - (c - d) with c == d
    reduces to a - b without rounding.
    """

    def __init__(self, plus, minus):
        self.plus = plus
        self.minus = minus

    def __call__(self, x):
        return evaluate(self.plus, x) - evaluate(self.minus, x)

    def left_limit(self, x):
        return evaluate_left(self.plus, x) - evaluate_left(self.minus, x)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def ecdf_eval(s, x):
    """Fraction of observations <= x"""
    return EmpiricalCdf(s)(x)


def joint_ecdf_eval(s, x, y):
    """Fraction of pairs with X_i <= x and Y_i <= y"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inside = (s.x <= x[..., None]) & (s.y <= y[..., None])
    return inside.mean(axis=-1)


def norm_of_values(diff, norm, diff_left=None):
    """
    Apply a grid norm to precomputed differences

    Args:
        diff: f - g at the grid points
        norm: NormSpec
        diff_left: f - g at the left limits (sup norm only)

    Returns:
        Nonnegative float
    """
    diff = np.asarray(diff, dtype=float)
    if norm.kind is NormKind.SUP_ON_CELLS:
        value = np.max(np.abs(diff))
        if diff_left is not None:
            value = max(value, np.max(np.abs(diff_left)))
        return float(value)
    return float(np.sqrt(np.sum(norm.weights * diff * diff)))


def sup_cell_distance(f, g, grid):
    """
    max |f - g| over the grid (and the left limits when flagged)

    Raises:
        EmptyInput: empty grid
    """
    if grid is None or np.size(grid.points) == 0:
        raise EmptyInput("sup_cell_distance needs a nonempty grid")
    diff = evaluate(f, grid.points) - evaluate(g, grid.points)
    diff_left = None
    if grid.include_left_limits and not grid.is_2d:
        diff_left = evaluate_left(f, grid.points) - evaluate_left(g, grid.points)
    return norm_of_values(diff, NormSpec.sup(grid), diff_left)


def l2_grid_distance(f, g, norm):
    """
    sqrt(sum_j w_j (f(t_j) - g(t_j))^2)

    Raises:
        KindMismatch: norm is not an L2 grid norm
    """
    if norm.kind is not NormKind.L2_GRID:
        raise KindMismatch(f"l2_grid_distance needs an L2 norm, got {norm.kind.value}")
    diff = evaluate(f, norm.grid.points) - evaluate(g, norm.grid.points)
    return norm_of_values(diff, norm)


def distance(f, g, norm):
    """Dispatch on the norm kind"""
    if norm.kind is NormKind.SUP_ON_CELLS:
        return sup_cell_distance(f, g, norm.grid)
    return l2_grid_distance(f, g, norm)


def l2_norm_for(family, theta, grid_points=201, tail=0.001):
    """
    Cramér-von Mises style weights: d mu = f_theta dx on an equispaced grid

    The grid spans [F^-1(tail), F^-1(1 - tail)] and uses trapezoid weights.
    """
    if grid_points < 2:
        raise ValueError("L2 grid needs at least 2 points")
    lo, hi = family.ppf(np.array([tail, 1.0 - tail]), theta)
    points = np.linspace(lo, hi, grid_points)
    step = (hi - lo) / (grid_points - 1)
    trapezoid = np.full(grid_points, step)
    trapezoid[[0, -1]] *= 0.5
    weights = trapezoid * family.pdf(points, theta)
    return NormSpec(NormKind.L2_GRID, EvalGrid(points, False), weights)
