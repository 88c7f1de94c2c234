"""
Which scheme / statistic / estimator combinations make a valid test

Structural problems (the pieces cannot be combined at all) are always
refused. Statistical invalidity (the pieces combine but the test has
vanishing level and power) is refused unless the caller opts in, so the
failure mode can be reproduced on purpose.
"""
from modules.estimators import EstimatorChoice
from modules.functionals import StatisticVariant, TestKind
from modules.resampling import SCHEME_TESTS, SchemeKind
from utils.exceptions import IncompatiblePair

_SLOPE_VALID = frozenset({
    (SchemeKind.EMPIRICAL, StatisticVariant.CENTRED),
    (SchemeKind.RESIDUAL_PAIRS, StatisticVariant.CENTRED),
    (SchemeKind.FIXED_DESIGN_RESIDUAL, StatisticVariant.CENTRED),
    (SchemeKind.INDEPENDENCE_PRODUCT, StatisticVariant.EQUIVALENT),
    (SchemeKind.HYBRID_NULL, StatisticVariant.EQUIVALENT),
    (SchemeKind.FIXED_DESIGN_NULL, StatisticVariant.EQUIVALENT),
})

VALID_PAIRS = {
    TestKind.INDEPENDENCE: frozenset({
        (SchemeKind.EMPIRICAL, StatisticVariant.CENTRED),
        (SchemeKind.INDEPENDENCE_PRODUCT, StatisticVariant.EQUIVALENT),
    }),
    TestKind.SLOPE: _SLOPE_VALID,
    TestKind.SLOPE_STUDENTISED: _SLOPE_VALID,
    TestKind.GOF: frozenset({
        (SchemeKind.EMPIRICAL, StatisticVariant.CENTRED),
        (SchemeKind.PARAMETRIC_NULL, StatisticVariant.EQUIVALENT),
    }),
    TestKind.COPULA: frozenset({
        (SchemeKind.COPULA_PARAMETRIC, StatisticVariant.EQUIVALENT),
    }),
}

ESTIMATORS = {
    TestKind.INDEPENDENCE: frozenset({EstimatorChoice.NONE}),
    TestKind.SLOPE: frozenset({EstimatorChoice.LEAST_SQUARES}),
    TestKind.SLOPE_STUDENTISED: frozenset({EstimatorChoice.LEAST_SQUARES}),
    TestKind.GOF: frozenset({EstimatorChoice.MOMENTS, EstimatorChoice.MD_CORRECTED,
                             EstimatorChoice.MD_UNCORRECTED}),
    TestKind.COPULA: frozenset({EstimatorChoice.TAU_INVERSION}),
}

DEFAULT_ESTIMATORS = {
    TestKind.INDEPENDENCE: EstimatorChoice.NONE,
    TestKind.SLOPE: EstimatorChoice.LEAST_SQUARES,
    TestKind.SLOPE_STUDENTISED: EstimatorChoice.LEAST_SQUARES,
    TestKind.GOF: EstimatorChoice.MD_CORRECTED,
    TestKind.COPULA: EstimatorChoice.TAU_INVERSION,
}


def structural_problem(test, scheme, statistic, estimator):
    """Reason the pieces cannot be combined, or None"""
    test = TestKind(test)
    scheme = SchemeKind(scheme)
    statistic = StatisticVariant(statistic)
    estimator = EstimatorChoice(estimator)
    if test not in SCHEME_TESTS[scheme]:
        return f"scheme '{scheme.value}' cannot resample data for a '{test.value}' test"
    if estimator not in ESTIMATORS[test]:
        options = ", ".join(sorted(e.value for e in ESTIMATORS[test]))
        return f"estimator '{estimator.value}' does not apply to '{test.value}' (use {options})"
    if test is TestKind.COPULA and statistic is StatisticVariant.CENTRED:
        return "copula tests support only the equivalent/corrected statistic"
    return None


def is_valid_combo(test, scheme, statistic, estimator):
    """True when the combination yields a consistent bootstrap test"""
    if structural_problem(test, scheme, statistic, estimator) is not None:
        return False
    test = TestKind(test)
    scheme = SchemeKind(scheme)
    statistic = StatisticVariant(statistic)
    estimator = EstimatorChoice(estimator)
    if (test is TestKind.GOF and scheme is SchemeKind.EMPIRICAL
            and estimator is EstimatorChoice.MD_UNCORRECTED):
        return False
    if statistic is StatisticVariant.CORRECTED:
        return True
    return (scheme, statistic) in VALID_PAIRS[test]


def require_combo(test, scheme, statistic, estimator, allow_invalid=False):
    """
    Raises:
        IncompatiblePair: structural problem, or an invalid combination
            without allow_invalid
    """
    problem = structural_problem(test, scheme, statistic, estimator)
    if problem is not None:
        raise IncompatiblePair(problem)
    if not allow_invalid and not is_valid_combo(test, scheme, statistic, estimator):
        raise IncompatiblePair(
            f"({SchemeKind(scheme).value}, {StatisticVariant(statistic).value}, "
            f"{EstimatorChoice(estimator).value}) is not a consistent combination for a "
            f"'{TestKind(test).value}' test; pass --allow-invalid to run it anyway"
        )
