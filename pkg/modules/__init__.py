"""
Core building blocks: empirical objects, functionals, estimators, resampling, data generation
"""
try:
    from modules.empirical import EmpiricalCdf, EvalGrid, NormKind, NormSpec, Sample1D, Sample2D
    from modules.functionals import FunctionalSpec, StatisticVariant, TestKind
    from modules.estimators import EstimatorChoice, FitResult, SearchBox, minimum_distance
    from modules.resampling import SchemeKind, SchemeSpec, draw_bootstrap, fit_scheme
    from modules.data_generator import DGPSpec, generate

except Exception as e:
    print(f"ERROR in modules/__init__.py: {e}")
    import traceback
    traceback.print_exc()
    raise

__all__ = [
    'EmpiricalCdf', 'EvalGrid', 'NormKind', 'NormSpec', 'Sample1D', 'Sample2D',
    'FunctionalSpec', 'StatisticVariant', 'TestKind',
    'EstimatorChoice', 'FitResult', 'SearchBox', 'minimum_distance',
    'SchemeKind', 'SchemeSpec', 'draw_bootstrap', 'fit_scheme',
    'DGPSpec', 'generate',
]
