"""
Test and study pipelines
"""
try:
    from methods.validity import is_valid_combo, require_combo
    from methods.bootstrap_test import BootstrapTest, TestResult, TestSpec, run_test
    from methods.simulation import StudyConfig, StudyRow, run_study

except Exception as e:
    print(f"ERROR in methods/__init__.py: {e}")
    import traceback
    traceback.print_exc()
    raise

__all__ = ['is_valid_combo', 'require_combo', 'BootstrapTest', 'TestResult', 'TestSpec',
           'run_test', 'StudyConfig', 'StudyRow', 'run_study']
