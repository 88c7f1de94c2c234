import numpy as np
import pytest

from models.families import NormalLocation
from modules.empirical import (
    ZERO,
    EmpiricalCdf,
    EvalGrid,
    NormKind,
    NormSpec,
    ParametricCdf,
    Sample1D,
    Sample2D,
    SignedCombination,
    distance,
    ecdf_eval,
    joint_ecdf_eval,
    l2_grid_distance,
    l2_norm_for,
    sup_cell_distance,
)
from utils.exceptions import EmptyInput, KindMismatch


@pytest.mark.parametrize("x, expected", [(2.0, 2 / 3), (0.5, 0.0), (3.0, 1.0), (10.0, 1.0)])
def test_ecdf_eval(x, expected):
    assert ecdf_eval(Sample1D([1.0, 2.0, 3.0]), x) == pytest.approx(expected)


def test_ecdf_counts_ties_with_multiplicity():
    f = EmpiricalCdf(Sample1D([1.0, 1.0, 2.0, 5.0]))
    assert f(1.0) == 0.5
    assert f.left_limit(1.0) == 0.0
    np.testing.assert_array_equal(f.jump_points, [1.0, 2.0, 5.0])


@pytest.mark.parametrize("x, y, expected", [(0, 0, 0.5), (1, 1, 1.0), (0, 1, 0.5), (-1, 5, 0.0)])
def test_joint_ecdf_eval(x, y, expected):
    s = Sample2D.from_pairs([(0, 0), (1, 1)])
    assert joint_ecdf_eval(s, x, y) == pytest.approx(expected)


def test_samples_reject_empty_and_mismatched():
    with pytest.raises(EmptyInput):
        Sample1D([])
    with pytest.raises(ValueError):
        Sample2D([1.0, 2.0], [1.0])


def test_grid_from_observations_is_sorted_union():
    grid = EvalGrid.from_observations([3.0, 1.0], [2.0, 1.0], extra=[0.5])
    np.testing.assert_array_equal(grid.points, [0.5, 1.0, 2.0, 3.0])
    assert grid.include_left_limits


def test_product_grid_enumerates_pairs():
    grid = EvalGrid.product([0.0, 1.0], [5.0, 6.0])
    assert grid.is_2d
    np.testing.assert_array_equal(grid.points, [[0, 5], [0, 6], [1, 5], [1, 6]])


def test_sup_distance_identity_is_zero():
    f = EmpiricalCdf(Sample1D([0.3, 1.2]))
    grid = EvalGrid.from_observations([0.3, 1.2])
    assert sup_cell_distance(f, f, grid) == 0.0


def test_sup_distance_single_jump_uses_left_limit():
    f = EmpiricalCdf(Sample1D([0.0]))
    g = ParametricCdf(NormalLocation(), 0.0)
    grid = EvalGrid([0.0], include_left_limits=True)
    assert sup_cell_distance(f, g, grid) == pytest.approx(0.5)


def test_sup_distance_joint_vs_product_of_marginals():
    s = Sample2D.from_pairs([(0, 0), (1, 1)])

    def joint(x, y):
        return joint_ecdf_eval(s, x, y)

    def product(x, y):
        return ecdf_eval(Sample1D(s.x), x) * ecdf_eval(Sample1D(s.y), y)

    grid = EvalGrid.product([0.0, 1.0], [0.0, 1.0])
    assert sup_cell_distance(joint, product, grid) == pytest.approx(0.25)


def test_sup_distance_empty_grid():
    with pytest.raises(EmptyInput):
        sup_cell_distance(ZERO, ZERO, None)


def test_l2_distance_hand_example():
    grid = EvalGrid([0.0, 1.0])
    norm = NormSpec(NormKind.L2_GRID, grid, [0.5, 0.5])

    def f(x):
        return np.where(np.asarray(x) < 0.5, 1.0, -1.0)

    assert l2_grid_distance(f, ZERO, norm) == pytest.approx(1.0)
    assert l2_grid_distance(f, f, norm) == 0.0


def test_l2_distance_of_constant_difference():
    grid = EvalGrid(np.linspace(-1, 1, 5))
    norm = NormSpec(NormKind.L2_GRID, grid, np.full(5, 0.2))

    def f(x):
        return np.full(np.shape(x), 0.3)

    assert l2_grid_distance(f, ZERO, norm) == pytest.approx(0.3)


def test_l2_distance_needs_l2_norm():
    norm = NormSpec.sup(EvalGrid([0.0, 1.0]))
    with pytest.raises(KindMismatch):
        l2_grid_distance(ZERO, ZERO, norm)


def test_l2_weights_validated():
    with pytest.raises(ValueError):
        NormSpec(NormKind.L2_GRID, EvalGrid([0.0, 1.0]), [0.5])
    with pytest.raises(ValueError):
        NormSpec(NormKind.L2_GRID, EvalGrid([0.0, 1.0]), [-1.0, 2.0])


def test_l2_norm_for_normal_integrates_density():
    fam = NormalLocation()
    norm = l2_norm_for(fam, 1.0)
    assert norm.grid.points.size == 201
    assert norm.weights.sum() == pytest.approx(0.998, abs=1e-3)
    assert norm.grid.points[0] == pytest.approx(1.0 + fam.ppf(0.001, 0.0))


def test_signed_combination_cancels_exactly():
    f = ParametricCdf(NormalLocation(), 0.7)
    x = np.linspace(-3, 3, 50)
    combo = SignedCombination(f, f)
    np.testing.assert_array_equal(combo(x), np.zeros_like(x))


def test_distance_dispatch():
    f = EmpiricalCdf(Sample1D([0.0]))
    g = ParametricCdf(NormalLocation(), 0.0)
    norm = NormSpec.sup(EvalGrid([0.0], include_left_limits=True))
    assert distance(f, g, norm) == pytest.approx(0.5)
