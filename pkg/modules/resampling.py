"""
Resampling schemes R_n

fit_scheme computes what a scheme needs from the data once; draw_bootstrap
is then a pure function of (scheme, sample, stream). phi_of_scheme gives the
centering object phi(R_n) used by the corrected bootstrap statistic.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from models.families import ClaytonCopula, UnivariateFamily
from modules.empirical import ZERO, EmpiricalCdf, Sample1D, Sample2D
from modules.estimators import FitResult, least_squares, tau_inversion_estimate
from modules.functionals import IndependenceMap, TestKind, gof_centering, slope_phi
from utils.exceptions import IncompatiblePair
from utils.rng import open_uniform


class SchemeKind(str, Enum):
    EMPIRICAL = "empirical"
    INDEPENDENCE_PRODUCT = "independence_product"
    PARAMETRIC_NULL = "parametric_null"
    RESIDUAL_PAIRS = "residual_pairs"
    FIXED_DESIGN_RESIDUAL = "fixed_design_residual"
    HYBRID_NULL = "hybrid_null"
    FIXED_DESIGN_NULL = "fixed_design_null"
    COPULA_PARAMETRIC = "copula_parametric"

    @property
    def uses_residuals(self):
        return self in RESIDUAL_KINDS


RESIDUAL_KINDS = frozenset({
    SchemeKind.RESIDUAL_PAIRS,
    SchemeKind.FIXED_DESIGN_RESIDUAL,
    SchemeKind.HYBRID_NULL,
    SchemeKind.FIXED_DESIGN_NULL,
})

# Which test kinds each scheme can serve
SCHEME_TESTS = {
    SchemeKind.EMPIRICAL: frozenset(TestKind) - {TestKind.COPULA},
    SchemeKind.INDEPENDENCE_PRODUCT: frozenset(
        {TestKind.INDEPENDENCE, TestKind.SLOPE, TestKind.SLOPE_STUDENTISED}),
    SchemeKind.PARAMETRIC_NULL: frozenset({TestKind.GOF}),
    SchemeKind.RESIDUAL_PAIRS: frozenset({TestKind.SLOPE, TestKind.SLOPE_STUDENTISED}),
    SchemeKind.FIXED_DESIGN_RESIDUAL: frozenset({TestKind.SLOPE, TestKind.SLOPE_STUDENTISED}),
    SchemeKind.HYBRID_NULL: frozenset({TestKind.SLOPE, TestKind.SLOPE_STUDENTISED}),
    SchemeKind.FIXED_DESIGN_NULL: frozenset({TestKind.SLOPE, TestKind.SLOPE_STUDENTISED}),
    SchemeKind.COPULA_PARAMETRIC: frozenset({TestKind.COPULA}),
}


@dataclass(frozen=True, eq=False)
class SchemeSpec:
    kind: SchemeKind
    family: object = None
    fitted: FitResult = None
    intercept: float = None
    slope: float = None
    residuals: np.ndarray = None

    @property
    def theta(self):
        return None if self.fitted is None else self.fitted.theta


def check_compatible(kind, test_kind):
    """
    Raises:
        IncompatiblePair: the scheme cannot resample data for this test
    """
    kind = SchemeKind(kind)
    test_kind = TestKind(test_kind)
    if test_kind not in SCHEME_TESTS[kind]:
        raise IncompatiblePair(
            f"Scheme '{kind.value}' cannot be used for a '{test_kind.value}' test"
        )


def fit_scheme(kind, sample, test_kind, family=None, theta_hat=None):
    """
    Fit whatever the scheme needs

    Args:
        kind: SchemeKind
        sample: Sample1D or Sample2D
        test_kind: TestKind
        family: parametric family (parametric kinds)
        theta_hat: estimate to reuse; when None the family's default
            estimator is applied (moments / tau inversion)

    Returns:
        SchemeSpec

    Raises:
        IncompatiblePair: scheme/test or sample-shape mismatch
        DegenerateDesign: least squares impossible
    """
    kind = SchemeKind(kind)
    test_kind = TestKind(test_kind)
    check_compatible(kind, test_kind)
    expected = Sample2D if test_kind.is_bivariate else Sample1D
    if not isinstance(sample, expected):
        raise IncompatiblePair(
            f"A '{test_kind.value}' test needs a {expected.__name__}"
        )

    if kind in (SchemeKind.EMPIRICAL, SchemeKind.INDEPENDENCE_PRODUCT):
        return SchemeSpec(kind)

    if kind is SchemeKind.PARAMETRIC_NULL:
        if not isinstance(family, UnivariateFamily):
            raise IncompatiblePair("parametric_null needs a univariate family")
        theta = family.moment_estimate(sample.values) if theta_hat is None else theta_hat
        return SchemeSpec(kind, family=family, fitted=FitResult(family.check_theta(theta)))

    if kind is SchemeKind.COPULA_PARAMETRIC:
        if not isinstance(family, ClaytonCopula):
            raise IncompatiblePair("copula_parametric needs a copula family")
        theta = tau_inversion_estimate(family, sample) if theta_hat is None else theta_hat
        return SchemeSpec(kind, family=family, fitted=FitResult(family.check_theta(theta)))

    if kind is SchemeKind.FIXED_DESIGN_NULL:
        intercept = float(sample.y.mean())
        return SchemeSpec(kind, intercept=intercept, slope=0.0,
                          residuals=sample.y - intercept)

    intercept, slope = least_squares(sample)
    residuals = sample.y - intercept - slope * sample.x
    return SchemeSpec(kind, intercept=intercept, slope=slope, residuals=residuals)


def draw_bootstrap(scheme, sample, rng):
    """
    Draw one bootstrap sample of the same shape and size

    Args:
        scheme: SchemeSpec from fit_scheme
        sample: the observed sample
        rng: RngStream

    Returns:
        Sample1D or Sample2D
    """
    gen = rng.generator()
    n = sample.n
    kind = scheme.kind

    if kind is SchemeKind.EMPIRICAL:
        idx = gen.integers(0, n, size=n)
        if isinstance(sample, Sample1D):
            return Sample1D(sample.values[idx])
        return Sample2D(sample.x[idx], sample.y[idx])

    if kind is SchemeKind.INDEPENDENCE_PRODUCT:
        ix = gen.integers(0, n, size=n)
        iy = gen.integers(0, n, size=n)
        return Sample2D(sample.x[ix], sample.y[iy])

    if kind is SchemeKind.PARAMETRIC_NULL:
        return Sample1D(scheme.family.ppf(open_uniform(gen, n), scheme.theta))

    if kind is SchemeKind.COPULA_PARAMETRIC:
        u = open_uniform(gen, n)
        w = open_uniform(gen, n)
        return Sample2D(u, scheme.family.conditional_quantile(u, w, scheme.theta))

    if kind in (SchemeKind.RESIDUAL_PAIRS, SchemeKind.HYBRID_NULL):
        idx = gen.integers(0, n, size=n)
        x_star = sample.x[idx]
        eps_star = scheme.residuals[idx]
        if kind is SchemeKind.HYBRID_NULL:
            return Sample2D(x_star, scheme.intercept + eps_star)
        return Sample2D(x_star, scheme.intercept + scheme.slope * x_star + eps_star)

    # fixed design: X* = X
    eps_star = scheme.residuals[gen.integers(0, n, size=n)]
    return Sample2D(sample.x, scheme.intercept + scheme.slope * sample.x + eps_star)


def phi_of_scheme(scheme, functional, sample, theta_hat=None):
    """
    phi(R_n): the object the corrected bootstrap statistic subtracts

    Returns:
        ZERO, a float (slope), an IndependenceMap, or an evaluable GoF term

    Raises:
        IncompatiblePair: combination not defined by the framework
    """
    kind = scheme.kind
    test_kind = functional.kind
    check_compatible(kind, test_kind)

    if test_kind is TestKind.INDEPENDENCE:
        if kind is SchemeKind.INDEPENDENCE_PRODUCT:
            return ZERO
        return IndependenceMap(sample)

    if test_kind.is_slope:
        if kind in (SchemeKind.INDEPENDENCE_PRODUCT, SchemeKind.HYBRID_NULL,
                    SchemeKind.FIXED_DESIGN_NULL):
            return 0.0
        # empirical and residual resampling keep phi(R_n) = phi(H_n)
        return slope_phi(sample, functional.studentised)

    if test_kind is TestKind.GOF:
        if kind is SchemeKind.PARAMETRIC_NULL:
            return ZERO
        if theta_hat is None:
            raise IncompatiblePair("Empirical GoF centering needs theta_hat")
        return gof_centering(EmpiricalCdf(sample), theta_hat, functional.family)

    # copula: only the parametric scheme reaches here
    return ZERO
