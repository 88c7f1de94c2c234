from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from methods.simulation import (
    Combo,
    StudyConfig,
    clopper_pearson_ci,
    compare_combos,
    plot_tables,
    pvalue_calibration,
    run_cell,
    run_simulation,
    run_study,
    simulation_seed,
    two_proportion_test,
)
from utils.config_loader import load_yaml_document
from utils.exceptions import ConfigError, EmptyInput, IncompatiblePair

STUDIES = Path(__file__).resolve().parent.parent / "config" / "studies"


def _study(**overrides):
    doc = {
        "test": "slope",
        "dgps": ["regression_normal:b=0", {"name": "regression_normal", "b": 1.5}],
        "sample_sizes": [8, 12],
        "combos": ["hybrid_null+equivalent", {"scheme": "empirical", "statistic": "centred"}],
        "n_sims": 6,
        "B": 9,
        "seed": 5,
    }
    doc.update(overrides)
    return StudyConfig.from_dict(doc)


class TestBinomialSummaries:
    def test_clopper_pearson_edges(self):
        lo, hi = clopper_pearson_ci(0, 200)
        assert lo == 0.0
        assert 0.0 < hi < 0.02
        lo, hi = clopper_pearson_ci(200, 200)
        assert hi == 1.0
        assert 0.98 < lo < 1.0

    def test_clopper_pearson_interior(self):
        lo, hi = clopper_pearson_ci(10, 200)
        assert lo == pytest.approx(0.0243, abs=1e-3)
        assert hi == pytest.approx(0.0900, abs=1e-3)

    def test_clopper_pearson_bad_counts(self):
        with pytest.raises(ValueError):
            clopper_pearson_ci(5, 4)

    def test_two_proportion_equal(self):
        assert two_proportion_test(30, 100, 30, 100) == pytest.approx(1.0)
        assert two_proportion_test(0, 50, 0, 80) == 1.0

    def test_two_proportion_power_anchor(self):
        p = two_proportion_test(1690, 2000, 1594, 2000)
        assert 4e-5 < p < 2e-4

    def test_two_proportion_extreme(self):
        assert two_proportion_test(0, 10, 10, 10) < 0.001

    def test_two_proportion_empty(self):
        with pytest.raises(EmptyInput):
            two_proportion_test(0, 0, 1, 10)

    def test_pvalue_calibration_uniform(self):
        B = 99
        p = (np.arange(1, B + 2) / (B + 1)).repeat(3)
        table = pvalue_calibration(p, B)
        assert list(table.columns) == ["decile", "ecdf", "bound", "ok"]
        assert len(table) == 9
        assert table["ok"].all()

    def test_pvalue_calibration_flags_anticonservative(self):
        table = pvalue_calibration(np.full(200, 0.01), 99)
        assert not table["ok"].any()


class TestStudyConfig:
    def test_parses_and_orders_cells(self):
        study = _study()
        cells = study.cells()
        assert len(cells) == 8
        assert [c[0] for c in cells] == list(range(8))
        _, dgp, n, combo = cells[1]
        assert dgp.dgp_id == "regression_normal[b=0]"
        assert n == 8
        assert combo.combo_id == "empirical+centred+least_squares"
        assert cells[2][2] == 12

    def test_combo_descriptor(self):
        combo = Combo.parse("parametric_null+equivalent", "gof")
        assert combo.estimator.value == "md_corrected"
        combo = Combo.parse("parametric_null+equivalent+moments", "gof")
        assert combo.estimator.value == "moments"
        with pytest.raises(ConfigError):
            Combo.parse("empirical", "slope")
        with pytest.raises(ConfigError):
            Combo.parse({"scheme": "empirical", "statistic": "centred", "weight": 1}, "slope")

    @pytest.mark.parametrize("overrides", [
        {"dgps": []},
        {"sample_sizes": [1]},
        {"sample_sizes": [10.5]},
        {"combos": []},
        {"n_sims": 0},
        {"B": 0},
        {"alpha": 1.5},
        {"schema_version": 2},
        {"colour": "blue"},
        {"dgps": ["normal"]},
        {"family": "normal_location"},
        {"test": "anova"},
        {"seed": -3},
    ])
    def test_rejects_bad_documents(self, overrides):
        with pytest.raises(ConfigError):
            _study(**overrides)

    def test_invalid_combo_needs_opt_in(self):
        with pytest.raises(IncompatiblePair):
            _study(combos=["empirical+equivalent"])
        study = _study(combos=["empirical+equivalent"], allow_invalid=True)
        assert study.allow_invalid

    def test_structural_combo_refused(self):
        with pytest.raises(IncompatiblePair):
            _study(combos=["parametric_null+equivalent"], allow_invalid=True)

    def test_gof_defaults(self):
        study = StudyConfig.from_dict({
            "test": "gof", "dgps": ["normal"], "sample_sizes": [10],
            "combos": ["parametric_null+equivalent"],
        })
        assert study.family == "normal_location"
        assert study.norm == "sup"

    def test_defaults_come_from_tool_config(self):
        study = StudyConfig.from_dict(
            {"test": "slope", "dgps": ["regression_normal"], "sample_sizes": [10],
             "combos": ["hybrid_null+equivalent"]},
            {"engine": {"B": 49, "seed": 17}, "simulation": {"n_sims": 30}},
        )
        assert (study.B, study.seed, study.n_sims) == (49, 17, 30)

    def test_to_dict_is_canonical(self):
        assert _study().to_dict() == _study().to_dict()
        assert _study().to_dict() != _study(seed=6).to_dict()


class TestRunning:
    def test_simulation_seed_is_deterministic(self):
        assert simulation_seed(5, 0, 0) == simulation_seed(5, 0, 0)
        assert simulation_seed(5, 0, 0) != simulation_seed(5, 0, 1)
        assert simulation_seed(5, 0, 1) != simulation_seed(5, 1, 0)

    def test_run_simulation(self):
        study = _study()
        _, dgp, n, combo = study.cells()[0]
        reject, p = run_simulation(study, 0, dgp, n, combo, 3)
        assert isinstance(reject, bool)
        assert reject == (p <= study.alpha)
        assert (reject, p) == run_simulation(study, 0, dgp, n, combo, 3)

    def test_rows(self):
        study = _study()
        rows = run_study(study)
        assert len(rows) == 8
        for row in rows:
            assert row.nsims == 6
            assert 0 <= row.rejections <= 6
            assert row.rate == row.rejections / 6
            assert row.ci_lo <= row.rate <= row.ci_hi

    def test_deterministic_and_worker_independent(self):
        study = _study()
        serial = run_study(study)
        assert run_study(study) == serial
        assert run_study(study, workers=2) == serial
        assert run_study(study, blocks_per_cell=3) == serial

    def test_run_cell_reproduces_row(self):
        study = _study()
        rows = run_study(study)
        cell_index, dgp, n, combo = study.cells()[5]
        assert run_cell(study, cell_index, dgp, n, combo) == rows[5]

    def test_pvalue_records(self):
        study = _study(sample_sizes=[8], dgps=["regression_normal"])
        rows, pvalues = run_study(study, record_pvalues=True)
        assert len(pvalues) == 2 * 6
        assert set(pvalues["sim"]) == set(range(6))
        first = pvalues[pvalues["scheme"] == "hybrid_null"]
        assert first["reject"].sum() == rows[0].rejections
        lattice = first["p_value"] * 10
        np.testing.assert_allclose(lattice, np.round(lattice))

    def test_compare_identical_combos(self):
        study = _study(dgps=["regression_normal:b=1"], sample_sizes=[10])
        combo = Combo.parse("hybrid_null+equivalent", "slope")
        outcome = compare_combos(study, combo, combo)
        first, second = outcome["rows"]
        assert first == second
        assert outcome["p_value"] == pytest.approx(1.0)

    def test_compare_uses_first_cell(self):
        study = _study()
        first = Combo.parse("hybrid_null+equivalent", "slope")
        second = Combo.parse("residual_pairs+centred", "slope")
        outcome = compare_combos(study, first, second)
        assert [row.combo_id for row in outcome["rows"]] == [first.combo_id, second.combo_id]
        assert all(row.dgp == "regression_normal[b=0]" and row.n == 8
                   for row in outcome["rows"])
        assert 0.0 <= outcome["p_value"] <= 1.0


def test_plot_tables():
    frame = pd.DataFrame({
        "dgp": ["a", "a", "a", "a", "b"],
        "n": [20, 20, 10, 10, 10],
        "scheme": ["empirical", "hybrid_null", "empirical", "hybrid_null", "empirical"],
        "statistic": ["centred", "equivalent", "centred", "equivalent", "centred"],
        "estimator": ["least_squares"] * 5,
        "rate": [0.8, 0.9, 0.4, 0.5, 0.05],
    })
    tables = plot_tables(frame)
    assert list(tables) == ["a", "b"]
    a = tables["a"]
    assert list(a.index) == [10, 20]
    assert list(a.columns) == ["empirical+centred+least_squares",
                               "hybrid_null+equivalent+least_squares"]
    assert a.loc[20, "hybrid_null+equivalent+least_squares"] == 0.9


@pytest.mark.slow
class TestMonteCarloBehaviour:
    """Loose checks on rejection rates; each takes a while"""

    def _rate(self, combo, b, n=20, n_sims=200, allow_invalid=False):
        study = StudyConfig.from_dict({
            "test": "slope", "dgps": [f"regression_normal:b={b}"], "sample_sizes": [n],
            "combos": [combo], "n_sims": n_sims, "B": 99, "seed": 2024,
            "allow_invalid": allow_invalid,
        })
        return run_study(study)[0]

    def test_valid_pair_holds_level(self):
        row = self._rate("hybrid_null+equivalent", 0)
        assert 0.0 <= row.rate <= 0.11

    def test_invalid_pair_rarely_rejects(self):
        row = self._rate("empirical+equivalent", 0, allow_invalid=True)
        assert row.rate <= 0.03

    def test_valid_pair_has_power(self):
        row = self._rate("independence_product+equivalent", 1)
        assert row.rate >= 0.7

    def test_null_pvalues_are_calibrated(self):
        study = StudyConfig.from_dict({
            "test": "independence", "dgps": ["regression_normal"], "sample_sizes": [15],
            "combos": ["independence_product+equivalent"], "n_sims": 200, "B": 49,
            "seed": 8,
        })
        _, pvalues = run_study(study, record_pvalues=True)
        assert pvalue_calibration(pvalues["p_value"], 49)["ok"].all()

    def test_gof_md_correction_restores_level(self):
        doc = load_yaml_document(STUDIES / "gof_centering.yaml")
        doc = {**doc, "dgps": [{"name": "normal", "mean": 0.0, "sd": 1.0}], "sample_sizes": [200]}
        rows = {row.estimator: row for row in run_study(StudyConfig.from_dict(doc))}
        assert 0.015 <= rows["md_corrected"].rate <= 0.10
        assert rows["md_uncorrected"].rate <= 0.02

    def test_power_anchor(self):
        study = StudyConfig.from_dict(load_yaml_document(STUDIES / "power_anchor.yaml"))
        rows = {row.scheme: row for row in run_study(study)}
        centred, product = rows["empirical"], rows["independence_product"]
        assert 0.80 <= centred.rate <= 0.89
        assert 0.75 <= product.rate <= 0.84
        p = two_proportion_test(centred.rejections, centred.nsims,
                                product.rejections, product.nsims)
        assert p < 0.01
