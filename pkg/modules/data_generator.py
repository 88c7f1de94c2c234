"""
Data-generating processes for power and level studies

Each DGP is named by a short descriptor such as ``regression_normal:b=1``
or ``lognormal:sigma=0.8``. Draws go through documented sub-streams of one
RngStream, so a simulation's data depend on nothing but its stream.
"""
from dataclasses import dataclass

import numpy as np

from models.families import ClaytonCopula
from modules.empirical import Sample1D, Sample2D
from utils.exceptions import ConfigError
from utils.logger import logger
from utils.rng import normal_draws, open_uniform

# name -> (defaults, validators, bivariate)
DGP_CATALOGUE = {
    "regression_normal": ({"b": 0.0}, {}, True),
    "clayton_pairs": ({"theta": 0.0}, {"theta": lambda v: v >= 0}, True),
    "normal": ({"mean": 0.0, "sd": 1.0}, {"sd": lambda v: v > 0}, False),
    "t": ({"df": 5.0}, {"df": lambda v: v > 0}, False),
    "lognormal": ({"mu": 0.0, "sigma": 1.0}, {"sigma": lambda v: v > 0}, False),
    "mixture": ({"mu": 2.0, "sd": 1.0}, {"sd": lambda v: v > 0}, False),
    "cauchy": ({"loc": 0.0, "gamma": 1.0}, {"gamma": lambda v: v > 0}, False),
}


@dataclass(frozen=True)
class DGPSpec:
    name: str
    params: tuple = ()

    def __post_init__(self):
        if self.name not in DGP_CATALOGUE:
            raise ConfigError(
                f"Unknown distribution '{self.name}'. "
                f"Options: {', '.join(sorted(DGP_CATALOGUE))}"
            )
        defaults, validators, _ = DGP_CATALOGUE[self.name]
        given = dict(self.params)
        unknown = set(given) - set(defaults)
        if unknown:
            raise ConfigError(f"DGP '{self.name}' has no parameter(s) {sorted(unknown)}")
        merged = {**defaults, **{k: float(v) for k, v in given.items()}}
        for key, value in merged.items():
            if not np.isfinite(value):
                raise ConfigError(f"DGP '{self.name}': {key} must be finite")
            check = validators.get(key)
            if check is not None and not check(value):
                raise ConfigError(f"DGP '{self.name}': {key}={value} outside its domain")
        object.__setattr__(self, "params", tuple(sorted(merged.items())))

    @property
    def bivariate(self):
        return DGP_CATALOGUE[self.name][2]

    @property
    def dgp_id(self):
        inner = ";".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.name}[{inner}]"

    def param(self, key):
        return dict(self.params)[key]

    @classmethod
    def from_descriptor(cls, text):
        """Parse ``name`` or ``name:key=value,key=value``"""
        name, _, rest = text.strip().partition(":")
        params = []
        for item in filter(None, (part.strip() for part in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"Malformed DGP parameter '{item}' in '{text}'")
            try:
                params.append((key.strip(), float(value)))
            except ValueError:
                raise ConfigError(f"DGP parameter '{item}' is not numeric") from None
        return cls(name.strip(), tuple(params))

    @classmethod
    def from_dict(cls, doc):
        """Parse ``{name: ..., <param>: value, ...}`` from a study document"""
        if not isinstance(doc, dict) or "name" not in doc:
            raise ConfigError(f"DGP entry needs a 'name': {doc!r}")
        params = tuple((k, v) for k, v in doc.items() if k != "name")
        return cls(str(doc["name"]), params)


def generate(dgp, n, rng):
    """
    Draw a sample of size n

    Sub-streams: child(0) and child(1) of the given stream. Normals are
    inverse-CDF draws; t uses a normal over sqrt(chi2/df) from the second
    sub-stream; the mixture picks a component with one uniform then draws
    a normal; Cauchy uses the tangent transform.

    Args:
        dgp: DGPSpec
        n: sample size (>= 1)
        rng: RngStream

    Returns:
        Sample2D for regression_normal / clayton_pairs, Sample1D otherwise
    """
    if n < 1:
        raise ValueError(f"Sample size must be >= 1, got {n}")
    p = dict(dgp.params)
    first = rng.child(0).generator()
    second = rng.child(1).generator()

    if dgp.name == "regression_normal":
        x = normal_draws(first, n)
        eps = normal_draws(second, n)
        return Sample2D(x, p["b"] * x + eps)

    if dgp.name == "clayton_pairs":
        u = open_uniform(first, n)
        w = open_uniform(first, n)
        return Sample2D(u, ClaytonCopula().conditional_quantile(u, w, p["theta"]))

    if dgp.name == "normal":
        values = p["mean"] + p["sd"] * normal_draws(first, n)
    elif dgp.name == "t":
        z = normal_draws(first, n)
        chi2 = second.chisquare(p["df"], size=n)
        values = z / np.sqrt(chi2 / p["df"])
    elif dgp.name == "lognormal":
        values = np.exp(p["mu"] + p["sigma"] * normal_draws(first, n))
    elif dgp.name == "mixture":
        sign = np.where(open_uniform(first, n) < 0.5, -1.0, 1.0)
        values = sign * p["mu"] + p["sd"] * normal_draws(second, n)
    else:
        values = p["loc"] + p["gamma"] * np.tan(np.pi * (open_uniform(first, n) - 0.5))

    logger.debug(f"Generated {dgp.dgp_id} sample of size {n}")
    return Sample1D(values)
