import pytest

from methods.simulation import StudyRow, clopper_pearson_ci
from modules.empirical import Sample1D, Sample2D
from utils import data_io
from utils.config_loader import load_config, load_yaml_document
from utils.env_loader import EnvLoader
from utils.exceptions import ConfigError, DataError


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadSample:
    def test_two_columns(self, tmp_path):
        path = _write(tmp_path, "pairs.csv", "x,y\n1.0,2.0\n3.0,4.5\n")
        sample = data_io.load_sample(path, bivariate=True)
        assert isinstance(sample, Sample2D)
        assert list(sample.y) == [2.0, 4.5]

    def test_one_column(self, tmp_path):
        path = _write(tmp_path, "x.csv", "value\n-0.5\n2\n")
        sample = data_io.load_sample(path, bivariate=False)
        assert isinstance(sample, Sample1D)
        assert sample.n == 2

    @pytest.mark.parametrize("name, text, bivariate", [
        ("wide.csv", "a,b,c\n1,2,3\n", True),
        ("narrow.csv", "a\n1\n", True),
        ("header_only.csv", "x,y\n", True),
        ("words.csv", "x\n1.0\nabc\n", False),
        ("gap.csv", "x,y\n1.0,\n2.0,3.0\n", True),
        ("blank.csv", "", False),
    ])
    def test_bad_files(self, tmp_path, name, text, bivariate):
        with pytest.raises(DataError):
            data_io.load_sample(_write(tmp_path, name, text), bivariate)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            data_io.load_sample(tmp_path / "nope.csv", False)


def _rows():
    return [
        StudyRow("regression_normal[b=1]", 20, "empirical", "centred", "least_squares",
                 169, 200, 0.845, 0.787, 0.892),
        StudyRow("regression_normal[b=1]", 20, "independence_product", "equivalent",
                 "least_squares", 159, 200, 0.795, 0.733, 0.848),
    ]


class TestStudyTable:
    def test_format(self, tmp_path):
        path = data_io.write_study_table(tmp_path / "t.csv", _rows(), {"seed": 3}, 3)
        raw = path.read_bytes()
        assert b"\r\n" not in raw
        lines = raw.decode("utf-8").splitlines()
        assert lines[0] == ",".join(data_io.STUDY_COLUMNS)
        assert lines[1] == ("regression_normal[b=1],20,empirical,centred,least_squares,"
                            "169,200,0.845,0.787,0.892")

    def test_sidecar(self, tmp_path):
        path = data_io.write_study_table(tmp_path / "t.csv", _rows(), {"seed": 3}, 3)
        meta = data_io.read_result_document(tmp_path / "t.csv.meta.json")
        assert meta["seed"] == 3
        assert meta["config_digest"] == data_io.config_digest({"seed": 3})
        assert meta["tool_version"]
        frame = data_io.read_study_table(path)
        assert list(frame["rejections"]) == [169, 159]

    def test_floats_round_trip(self, tmp_path):
        lo, hi = clopper_pearson_ci(1, 3)
        rows = [StudyRow("normal[mean=0;sd=1]", 10, "parametric_null", "equivalent",
                         "moments", 1, 3, 1 / 3, lo, hi)]
        path = data_io.write_study_table(tmp_path / "t.csv", rows, {"seed": 3}, 3)
        frame = data_io.read_study_table(path)
        assert frame.loc[0, "rate"] == 1 / 3
        assert frame.loc[0, "ci_lo"] == lo
        assert frame.loc[0, "ci_hi"] == hi

    def test_read_missing_columns(self, tmp_path):
        path = _write(tmp_path, "bad.csv", "dgp,n\nx,1\n")
        with pytest.raises(DataError):
            data_io.read_study_table(path)


def test_config_digest_is_order_independent():
    a = data_io.config_digest({"B": 100, "alpha": 0.05, "combos": ["x", "y"]})
    b = data_io.config_digest({"combos": ["x", "y"], "alpha": 0.05, "B": 100})
    assert a == b
    assert a != data_io.config_digest({"B": 101, "alpha": 0.05, "combos": ["x", "y"]})
    assert len(a) == 64


class TestConfigLoading:
    def test_default_config(self):
        config = load_config()
        assert config["engine"]["B"] == 100
        assert config["norms"]["l2_grid_points"] == 201

    def test_missing(self, tmp_path):
        with pytest.raises(ConfigError):
            load_yaml_document(tmp_path / "missing.yaml")

    def test_not_a_mapping(self, tmp_path):
        with pytest.raises(ConfigError):
            load_yaml_document(_write(tmp_path, "list.yaml", "- a\n- b\n"))

    def test_invalid_yaml(self, tmp_path):
        with pytest.raises(ConfigError):
            load_yaml_document(_write(tmp_path, "bad.yaml", "a: [1, 2\n"))


class TestWorkerCount:
    def test_precedence(self, monkeypatch):
        monkeypatch.setenv("BOOTTEST_WORKERS", "3")
        assert EnvLoader.get_worker_count(cli_value=2, config_value=1) == 2
        assert EnvLoader.get_worker_count(cli_value=None, config_value=1) == 3
        monkeypatch.delenv("BOOTTEST_WORKERS")
        assert EnvLoader.get_worker_count(cli_value=None, config_value=4) == 4

    def test_invalid(self, monkeypatch):
        monkeypatch.setenv("BOOTTEST_WORKERS", "many")
        assert EnvLoader.get_worker_count(config_value=2) == 2
        with pytest.raises(ValueError):
            EnvLoader.get_worker_count(cli_value=0)
