import numpy as np
import pytest

from modules.data_generator import DGPSpec, generate
from modules.empirical import Sample1D, Sample2D
from utils.exceptions import ConfigError
from utils.rng import RngStream


def test_descriptor_parsing_and_id():
    dgp = DGPSpec.from_descriptor("lognormal:sigma=0.8")
    assert dgp.param("sigma") == 0.8
    assert dgp.param("mu") == 0.0
    assert dgp.dgp_id == "lognormal[mu=0;sigma=0.8]"
    assert DGPSpec.from_descriptor("lognormal:sigma=0.8") == dgp


def test_from_dict_matches_descriptor():
    assert DGPSpec.from_dict({"name": "t", "df": 5}) == DGPSpec.from_descriptor("t:df=5")


@pytest.mark.parametrize("text", ["gumbel", "t:df=-1", "normal:sd=0", "normal:scale=2", "t:df"])
def test_invalid_descriptors(text):
    with pytest.raises(ConfigError):
        DGPSpec.from_descriptor(text)


def test_generation_is_deterministic():
    dgp = DGPSpec.from_descriptor("mixture:mu=2")
    a = generate(dgp, 50, RngStream(3, 0))
    b = generate(dgp, 50, RngStream(3, 0))
    np.testing.assert_array_equal(a.values, b.values)
    c = generate(dgp, 50, RngStream(4, 0))
    assert not np.array_equal(a.values, c.values)


def test_regression_null_has_independent_streams():
    s = generate(DGPSpec("regression_normal", (("b", 0.0),)), 200, RngStream(1, 0))
    assert isinstance(s, Sample2D)
    assert abs(np.corrcoef(s.x, s.y)[0, 1]) < 0.25
    assert not np.array_equal(s.x, s.y)


def test_regression_slope_enters_y():
    s0 = generate(DGPSpec.from_descriptor("regression_normal:b=0"), 20, RngStream(1, 0))
    s2 = generate(DGPSpec.from_descriptor("regression_normal:b=2"), 20, RngStream(1, 0))
    np.testing.assert_array_equal(s0.x, s2.x)
    np.testing.assert_allclose(s2.y - s0.y, 2.0 * s0.x, atol=1e-12)


def test_clayton_zero_gives_independent_uniforms():
    s = generate(DGPSpec.from_descriptor("clayton_pairs:theta=0"), 500, RngStream(2, 0))
    assert np.all((s.x > 0) & (s.x < 1) & (s.y > 0) & (s.y < 1))
    assert abs(np.corrcoef(s.x, s.y)[0, 1]) < 0.15


def test_clayton_positive_theta_gives_concordance():
    s = generate(DGPSpec.from_descriptor("clayton_pairs:theta=4"), 500, RngStream(2, 0))
    assert np.corrcoef(s.x, s.y)[0, 1] > 0.5


@pytest.mark.parametrize("text", ["normal", "t:df=5", "lognormal:sigma=1", "mixture:mu=3",
                                  "cauchy:gamma=2"])
def test_univariate_draws(text):
    s = generate(DGPSpec.from_descriptor(text), 100, RngStream(6, 0))
    assert isinstance(s, Sample1D)
    assert s.n == 100
    assert np.all(np.isfinite(s.values))


def test_lognormal_is_positive():
    s = generate(DGPSpec.from_descriptor("lognormal:sigma=0.3"), 100, RngStream(6, 0))
    assert np.all(s.values > 0)


def test_sample_size_must_be_positive():
    with pytest.raises(ValueError):
        generate(DGPSpec("normal"), 0, RngStream(6, 0))
