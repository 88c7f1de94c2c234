"""
Parametric families used as null models

Normal families serve the goodness-of-fit tests; the Clayton copula serves
the copula goodness-of-fit test. Families are stateless and picklable so
they can travel to worker processes.
"""
import numpy as np
from scipy.special import ndtr, ndtri

from utils.exceptions import ConfigError, OutOfRange

# Below this the Clayton copula is treated as the independence copula
CLAYTON_ZERO = 1e-10


class ParametricFamily:
    """Base class: a family {H_theta} with box constraints on theta"""

    family_id = "base"
    param_names = ()
    lower = ()
    upper = ()

    @property
    def n_params(self):
        return len(self.param_names)

    def check_theta(self, theta):
        """
        Validate a parameter vector against the family's domain

        Args:
            theta: Scalar or sequence of length n_params

        Returns:
            1-d float array

        Raises:
            OutOfRange: wrong length, non-finite, or outside the box
        """
        arr = np.atleast_1d(np.asarray(theta, dtype=float))
        if arr.shape != (self.n_params,):
            raise OutOfRange(
                f"{self.family_id} expects {self.n_params} parameter(s), got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise OutOfRange(f"{self.family_id}: non-finite parameter {arr}")
        for name, value, lo, hi in zip(self.param_names, arr, self.lower, self.upper):
            if value < lo or value > hi:
                raise OutOfRange(f"{self.family_id}: {name}={value} outside [{lo}, {hi}]")
        return arr

    def __repr__(self):
        return f"{type(self).__name__}()"

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self).__name__)


class UnivariateFamily(ParametricFamily):
    """Families of distributions on the real line"""

    def cdf(self, x, theta):
        raise NotImplementedError

    def ppf(self, u, theta):
        raise NotImplementedError

    def pdf(self, x, theta):
        raise NotImplementedError

    def cdf_matrix(self, x, thetas):
        """
        Evaluate F_theta(x) for many thetas at once

        Args:
            x: 1-d array of m points
            thetas: (k, n_params) array

        Returns:
            (k, m) array
        """
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        return np.vstack([self.cdf(x, t) for t in thetas])

    def moment_estimate(self, values):
        raise NotImplementedError

    def search_box(self, values, half_width_sd=4.0):
        """Box (lo, hi) per parameter centred on the moment estimate"""
        raise NotImplementedError

    def extremal_points(self, theta_a, theta_b):
        """Points where F_{theta_a} - F_{theta_b} may peak; empty when unknown"""
        return np.empty(0)


def _moments(values):
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    sd = float(np.sqrt(np.mean((values - mean) ** 2)))
    return mean, sd


class NormalLocation(UnivariateFamily):
    """N(mu, 1) with unknown mean"""

    family_id = "normal_location"
    param_names = ("mean",)
    lower = (-np.inf,)
    upper = (np.inf,)

    def cdf(self, x, theta):
        mu = np.atleast_1d(theta)[0]
        return ndtr(np.asarray(x, dtype=float) - mu)

    def ppf(self, u, theta):
        mu = np.atleast_1d(theta)[0]
        return mu + ndtri(np.asarray(u, dtype=float))

    def pdf(self, x, theta):
        mu = np.atleast_1d(theta)[0]
        z = np.asarray(x, dtype=float) - mu
        return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)

    def cdf_matrix(self, x, thetas):
        mus = np.asarray(thetas, dtype=float).reshape(-1, 1)
        return ndtr(np.asarray(x, dtype=float)[None, :] - mus)

    def moment_estimate(self, values):
        return np.array([_moments(values)[0]])

    def search_box(self, values, half_width_sd=4.0):
        mean, sd = _moments(values)
        if sd <= 0:
            sd = 1.0
        return (mean - half_width_sd * sd,), (mean + half_width_sd * sd,)

    def extremal_points(self, theta_a, theta_b):
        # Phi(x - a) - Phi(x - b) peaks halfway between the means
        a = np.atleast_1d(theta_a)[0]
        b = np.atleast_1d(theta_b)[0]
        return np.array([0.5 * (a + b)])


class NormalLocationScale(UnivariateFamily):
    """N(mu, sd^2) with both parameters unknown"""

    family_id = "normal_location_scale"
    param_names = ("mean", "sd")
    lower = (-np.inf, np.finfo(float).tiny)
    upper = (np.inf, np.inf)

    def cdf(self, x, theta):
        mu, sd = theta
        return ndtr((np.asarray(x, dtype=float) - mu) / sd)

    def ppf(self, u, theta):
        mu, sd = theta
        return mu + sd * ndtri(np.asarray(u, dtype=float))

    def pdf(self, x, theta):
        mu, sd = theta
        z = (np.asarray(x, dtype=float) - mu) / sd
        return np.exp(-0.5 * z * z) / (sd * np.sqrt(2.0 * np.pi))

    def cdf_matrix(self, x, thetas):
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        mus = thetas[:, 0:1]
        sds = thetas[:, 1:2]
        return ndtr((np.asarray(x, dtype=float)[None, :] - mus) / sds)

    def moment_estimate(self, values):
        mean, sd = _moments(values)
        if sd <= 0:
            raise OutOfRange("normal_location_scale: sample has zero spread")
        return np.array([mean, sd])

    def search_box(self, values, half_width_sd=4.0):
        mean, sd = _moments(values)
        if sd <= 0:
            sd = 1.0
        return (
            (mean - half_width_sd * sd, sd / half_width_sd),
            (mean + half_width_sd * sd, sd * half_width_sd),
        )


class ClaytonCopula(ParametricFamily):
    """Clayton copula C(u, v) = (u^-t + v^-t - 1)^(-1/t), t >= 0"""

    family_id = "clayton"
    param_names = ("theta",)
    lower = (0.0,)
    upper = (np.inf,)

    def copula_cdf(self, u, v, theta):
        t = float(np.atleast_1d(theta)[0])
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if t < CLAYTON_ZERO:
            return u * v
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            inner = u ** (-t) + v ** (-t) - 1.0
            value = inner ** (-1.0 / t)
        return np.where((u <= 0) | (v <= 0), 0.0, value)

    def tau(self, theta):
        t = float(np.atleast_1d(theta)[0])
        return t / (t + 2.0)

    def tau_inverse(self, tau):
        """
        Invert tau = theta / (theta + 2)

        Raises:
            OutOfRange: tau outside [0, 1)
        """
        tau = float(tau)
        if not 0.0 <= tau < 1.0:
            raise OutOfRange(f"clayton: Kendall tau {tau} outside [0, 1)")
        return 2.0 * tau / (1.0 - tau)

    def conditional_quantile(self, u, w, theta):
        """v such that P(V <= v | U = u) = w"""
        t = float(np.atleast_1d(theta)[0])
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        if t < CLAYTON_ZERO:
            return w.copy()
        return (u ** (-t) * (w ** (-t / (1.0 + t)) - 1.0) + 1.0) ** (-1.0 / t)


FAMILIES = {
    NormalLocation.family_id: NormalLocation,
    NormalLocationScale.family_id: NormalLocationScale,
    ClaytonCopula.family_id: ClaytonCopula,
}


def get_family(family_id):
    """Look up a family by id"""
    try:
        return FAMILIES[family_id]()
    except KeyError:
        raise ConfigError(
            f"Unknown family '{family_id}'. Options: {', '.join(sorted(FAMILIES))}"
        ) from None
