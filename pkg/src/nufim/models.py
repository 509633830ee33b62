"""Model zoo: closed-form Gaussian and Poisson-count models used to
exercise every estimator against analytic oracles.

All zoo models keep both parameter blocks one-dimensional, so every
information quantity has a hand-checkable closed form.  Each model also
implements the vectorized hooks from :mod:`nufim.core`, which the
estimators rely on for speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, xlogy

from .core import ConfigError, EvaluationError, as_vector, substream

__all__ = [
    "GaussianLocation",
    "GaussianPrior",
    "LinearGaussianPrior",
    "DependentPriorModel",
    "PoissonDoor",
    "GaussianThetaPrior",
    "GaussianConjugate",
    "ZooBundle",
    "make_zoo",
    "oracle_fims",
    "sample_dataset",
    "MODEL_IDS",
]

LOG_2PI = math.log(2.0 * math.pi)

_STAGE_DATASET = 1

#: Default node count for deterministic data-space rules.
DATA_QUAD_NODES = 160

#: Enumeration guard for count-vector quadrature.
MAX_COUNT_NODES = 200_000


def _gauss_hermite_rule(mean: float, proposal_sd: float, n_nodes: int):
    """Plain-measure quadrature over the real line through a Gaussian
    proposal: sum w_i f(a_i) ~ integral f(a) da."""
    x, w = np.polynomial.hermite.hermgauss(n_nodes)
    nodes = mean + math.sqrt(2.0) * proposal_sd * x
    # w * exp(x^2) overflows when formed directly; combine in log space.
    log_w = np.log(w) + x**2 + 0.5 * math.log(2.0) + math.log(proposal_sd)
    return nodes, np.exp(log_w)


# ---------------------------------------------------------------------------
# Gaussian location model: n_obs iid draws centered at theta + phi.


@dataclass(frozen=True)
class GaussianLocation:
    """Attribute samples A_n = theta + phi + eps_n, eps_n ~ N(0, sigma^2)."""

    n_obs: int = 1
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.n_obs < 1:
            raise ConfigError("n_obs must be >= 1")
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")

    def dims(self) -> tuple[int, int, str]:
        return 1, 1, "continuous"

    def _center(self, phi, theta) -> float:
        return float(theta[0]) + float(phi[0])

    def log_density(self, data, phi, theta) -> float:
        z = (np.asarray(data, dtype=np.float64) - self._center(phi, theta)) / self.sigma
        return float(-0.5 * self.n_obs * (LOG_2PI + 2.0 * math.log(self.sigma))
                     - 0.5 * np.sum(z * z))

    def score_theta(self, data, phi, theta) -> np.ndarray:
        r = np.asarray(data, dtype=np.float64) - self._center(phi, theta)
        return np.array([np.sum(r) / self.sigma**2])

    def score_phi(self, data, phi, theta) -> np.ndarray:
        return self.score_theta(data, phi, theta)

    def hessian_phi_density(self, data, phi, theta) -> np.ndarray:
        # Second derivative of the density itself: pr * (u^2 - n/sigma^2)
        # with u the summed standardized residual gradient.
        pr = math.exp(self.log_density(data, phi, theta))
        r = np.asarray(data, dtype=np.float64) - self._center(phi, theta)
        u = float(np.sum(r)) / self.sigma**2
        return np.array([[pr * (u * u - self.n_obs / self.sigma**2)]])

    def sample(self, phi, theta, rng) -> np.ndarray:
        return self._center(phi, theta) + self.sigma * rng.standard_normal(self.n_obs)

    # Vectorized hooks -----------------------------------------------------

    def sample_batch(self, phi, theta, n, rng) -> np.ndarray:
        return self._center(phi, theta) + self.sigma * rng.standard_normal((n, self.n_obs))

    def log_density_batch(self, data_batch, phi, theta) -> np.ndarray:
        z = (np.asarray(data_batch, dtype=np.float64) - self._center(phi, theta)) / self.sigma
        const = -0.5 * self.n_obs * (LOG_2PI + 2.0 * math.log(self.sigma))
        return const - 0.5 * np.sum(z * z, axis=1)

    def score_theta_batch(self, data_batch, phi, theta) -> np.ndarray:
        r = np.asarray(data_batch, dtype=np.float64) - self._center(phi, theta)
        return (np.sum(r, axis=1) / self.sigma**2)[:, None]

    def score_phi_batch(self, data_batch, phi, theta) -> np.ndarray:
        return self.score_theta_batch(data_batch, phi, theta)

    def log_density_nodes(self, data, phis, theta) -> np.ndarray:
        centers = float(theta[0]) + np.asarray(phis, dtype=np.float64)[:, 0]
        z = (np.asarray(data, dtype=np.float64)[None, :] - centers[:, None]) / self.sigma
        const = -0.5 * self.n_obs * (LOG_2PI + 2.0 * math.log(self.sigma))
        return const - 0.5 * np.sum(z * z, axis=1)

    def score_theta_nodes(self, data, phis, theta) -> np.ndarray:
        centers = float(theta[0]) + np.asarray(phis, dtype=np.float64)[:, 0]
        r = np.asarray(data, dtype=np.float64)[None, :] - centers[:, None]
        return (np.sum(r, axis=1) / self.sigma**2)[:, None]

    def hessian_phi_density_batch(self, data_batch, phi, theta) -> np.ndarray:
        pr = np.exp(self.log_density_batch(data_batch, phi, theta))
        r = np.asarray(data_batch, dtype=np.float64) - self._center(phi, theta)
        u = np.sum(r, axis=1) / self.sigma**2
        vals = pr * (u * u - self.n_obs / self.sigma**2)
        return vals[:, None, None]

    def data_quadrature(self, phi, theta, extra_spread: float = 0.0,
                        n_nodes: int = DATA_QUAD_NODES):
        if self.n_obs != 1:
            return None
        sd = 1.5 * math.sqrt(self.sigma**2 + extra_spread**2)
        nodes, weights = _gauss_hermite_rule(self._center(phi, theta), sd, n_nodes)
        return nodes[:, None], weights


# ---------------------------------------------------------------------------
# Priors


@dataclass(frozen=True)
class GaussianPrior:
    """Theta-independent nuisance prior phi ~ N(mu, tau^2)."""

    mu: float = 0.0
    tau: float = 1.0

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ConfigError("tau must be positive")

    def log_density(self, phi, theta) -> float:
        z = (float(phi[0]) - self.mu) / self.tau
        return -0.5 * (LOG_2PI + 2.0 * math.log(self.tau)) - 0.5 * z * z

    def score_theta(self, phi, theta) -> np.ndarray:
        return np.zeros(len(theta))

    def score_phi(self, phi, theta) -> np.ndarray:
        return np.array([-(float(phi[0]) - self.mu) / self.tau**2])

    def sample(self, theta, rng) -> np.ndarray:
        return np.array([self.mu + self.tau * rng.standard_normal()])

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([-np.inf]), np.array([np.inf])

    def moments(self, theta) -> tuple[np.ndarray, np.ndarray]:
        return np.array([self.mu]), np.array([self.tau])

    def covariance(self, theta) -> np.ndarray:
        return np.array([[self.tau**2]])

    def log_density_nodes(self, phis, theta) -> np.ndarray:
        z = (np.asarray(phis, dtype=np.float64)[:, 0] - self.mu) / self.tau
        return -0.5 * (LOG_2PI + 2.0 * math.log(self.tau)) - 0.5 * z * z

    def score_theta_nodes(self, phis, theta) -> np.ndarray:
        return np.zeros((np.asarray(phis).shape[0], len(theta)))


@dataclass(frozen=True)
class LinearGaussianPrior:
    """Theta-dependent nuisance prior phi | theta ~ N(a * theta, tau^2)."""

    a: float = 1.0
    tau: float = 1.0

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ConfigError("tau must be positive")

    def _mean(self, theta) -> float:
        return self.a * float(theta[0])

    def log_density(self, phi, theta) -> float:
        z = (float(phi[0]) - self._mean(theta)) / self.tau
        return -0.5 * (LOG_2PI + 2.0 * math.log(self.tau)) - 0.5 * z * z

    def score_theta(self, phi, theta) -> np.ndarray:
        return np.array([self.a * (float(phi[0]) - self._mean(theta)) / self.tau**2])

    def score_phi(self, phi, theta) -> np.ndarray:
        return np.array([-(float(phi[0]) - self._mean(theta)) / self.tau**2])

    def sample(self, theta, rng) -> np.ndarray:
        return np.array([self._mean(theta) + self.tau * rng.standard_normal()])

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([-np.inf]), np.array([np.inf])

    def moments(self, theta) -> tuple[np.ndarray, np.ndarray]:
        return np.array([self._mean(theta)]), np.array([self.tau])

    def covariance(self, theta) -> np.ndarray:
        return np.array([[self.tau**2]])

    def log_density_nodes(self, phis, theta) -> np.ndarray:
        z = (np.asarray(phis, dtype=np.float64)[:, 0] - self._mean(theta)) / self.tau
        return -0.5 * (LOG_2PI + 2.0 * math.log(self.tau)) - 0.5 * z * z

    def score_theta_nodes(self, phis, theta) -> np.ndarray:
        resid = np.asarray(phis, dtype=np.float64)[:, 0] - self._mean(theta)
        return (self.a * resid / self.tau**2)[:, None]


@dataclass(frozen=True)
class GaussianThetaPrior:
    """Task-parameter prior theta ~ N(0, spread^2)."""

    spread: float = 1.0

    def __post_init__(self) -> None:
        if self.spread <= 0:
            raise ConfigError("spread must be positive")

    def log_density(self, theta) -> float:
        z = float(theta[0]) / self.spread
        return -0.5 * (LOG_2PI + 2.0 * math.log(self.spread)) - 0.5 * z * z

    def score(self, theta) -> np.ndarray:
        return np.array([-float(theta[0]) / self.spread**2])

    def sample(self, rng) -> np.ndarray:
        return np.array([self.spread * rng.standard_normal()])


# ---------------------------------------------------------------------------
# Model whose data carry no direct information about theta: the only route
# is through the theta-dependent nuisance prior.


@dataclass(frozen=True)
class DependentPriorModel:
    """Single observation A ~ N(phi, sigma^2); theta enters only via the
    paired LinearGaussianPrior."""

    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")

    def dims(self) -> tuple[int, int, str]:
        return 1, 1, "continuous"

    def log_density(self, data, phi, theta) -> float:
        z = (float(data[0]) - float(phi[0])) / self.sigma
        return -0.5 * (LOG_2PI + 2.0 * math.log(self.sigma)) - 0.5 * z * z

    def score_theta(self, data, phi, theta) -> np.ndarray:
        return np.zeros(1)

    def score_phi(self, data, phi, theta) -> np.ndarray:
        return np.array([(float(data[0]) - float(phi[0])) / self.sigma**2])

    def hessian_phi_density(self, data, phi, theta) -> np.ndarray:
        pr = math.exp(self.log_density(data, phi, theta))
        u = (float(data[0]) - float(phi[0])) / self.sigma**2
        return np.array([[pr * (u * u - 1.0 / self.sigma**2)]])

    def sample(self, phi, theta, rng) -> np.ndarray:
        return np.array([float(phi[0]) + self.sigma * rng.standard_normal()])

    def sample_batch(self, phi, theta, n, rng) -> np.ndarray:
        return float(phi[0]) + self.sigma * rng.standard_normal((n, 1))

    def log_density_batch(self, data_batch, phi, theta) -> np.ndarray:
        z = (np.asarray(data_batch, dtype=np.float64)[:, 0] - float(phi[0])) / self.sigma
        return -0.5 * (LOG_2PI + 2.0 * math.log(self.sigma)) - 0.5 * z * z

    def score_theta_batch(self, data_batch, phi, theta) -> np.ndarray:
        return np.zeros((np.asarray(data_batch).shape[0], 1))

    def score_phi_batch(self, data_batch, phi, theta) -> np.ndarray:
        z = np.asarray(data_batch, dtype=np.float64)[:, 0] - float(phi[0])
        return (z / self.sigma**2)[:, None]

    def log_density_nodes(self, data, phis, theta) -> np.ndarray:
        z = (float(data[0]) - np.asarray(phis, dtype=np.float64)[:, 0]) / self.sigma
        return -0.5 * (LOG_2PI + 2.0 * math.log(self.sigma)) - 0.5 * z * z

    def score_theta_nodes(self, data, phis, theta) -> np.ndarray:
        return np.zeros((np.asarray(phis).shape[0], 1))

    def data_quadrature(self, phi, theta, extra_spread: float = 0.0,
                        n_nodes: int = DATA_QUAD_NODES):
        sd = 1.5 * math.sqrt(self.sigma**2 + extra_spread**2)
        nodes, weights = _gauss_hermite_rule(float(phi[0]), sd, n_nodes)
        return nodes[:, None], weights


# ---------------------------------------------------------------------------
# Poisson counting model with an occluding door.


def _door_trig(phi_val: float) -> tuple[float, float, float]:
    """Transmission cos^2(phi) with its first two derivatives.

    cos(phi) is snapped to exactly zero within 1e-12 so that the closed
    door yields an exactly-zero photon rate, not a ~1e-33 residue of
    floating-point pi.
    """
    c = math.cos(phi_val)
    if abs(c) < 1e-12:
        c = 0.0
    s = math.sin(phi_val)
    t = c * c
    dt = -2.0 * c * s
    ddt = 2.0 * s * s - 2.0 * c * c
    return t, dt, ddt


@dataclass(frozen=True)
class PoissonDoor:
    """Photon counts from a source occluded by a swinging door.

    Detector k sees counts g_k ~ Poisson(intensity * cos^2(phi) * b_k(theta))
    with Gaussian beam profile b_k(theta) = exp(-(x_k - theta)^2 / 2 width^2).
    The door is fully closed at phi = pi/2, where the rate (and hence the
    conditional information about theta) vanishes identically.
    """

    intensity: float = 100.0
    positions: tuple[float, ...] = (-2.0, -1.0, 0.0, 1.0, 2.0)
    width: float = 1.0

    def __post_init__(self) -> None:
        if self.intensity <= 0 or self.width <= 0:
            raise ConfigError("intensity and width must be positive")

    def dims(self) -> tuple[int, int, str]:
        return 1, 1, "counts"

    def _profile(self, theta) -> np.ndarray:
        x = np.asarray(self.positions, dtype=np.float64)
        return np.exp(-((x - float(theta[0])) ** 2) / (2.0 * self.width**2))

    def rates(self, phi, theta) -> np.ndarray:
        t, _, _ = _door_trig(float(phi[0]))
        return self.intensity * t * self._profile(theta)

    def log_density(self, data, phi, theta) -> float:
        g = np.asarray(data, dtype=np.float64)
        lam = self.rates(phi, theta)
        return float(np.sum(xlogy(g, lam) - lam - gammaln(g + 1.0)))

    def score_theta(self, data, phi, theta) -> np.ndarray:
        g = np.asarray(data, dtype=np.float64)
        lam = self.rates(phi, theta)
        coef = (np.asarray(self.positions) - float(theta[0])) / self.width**2
        return np.array([float(np.sum((g - lam) * coef))])

    def score_phi(self, data, phi, theta) -> np.ndarray:
        g = np.asarray(data, dtype=np.float64)
        t, dt, _ = _door_trig(float(phi[0]))
        total_profile = float(np.sum(self._profile(theta)))
        total_counts = float(np.sum(g))
        if t == 0.0:
            if total_counts > 0:
                raise EvaluationError(
                    "nuisance score undefined: counts observed through a closed door"
                )
            return np.array([-self.intensity * dt * total_profile])
        return np.array([total_counts * dt / t - self.intensity * dt * total_profile])

    def hessian_phi_density(self, data, phi, theta) -> np.ndarray:
        g = np.asarray(data, dtype=np.float64)
        t, dt, ddt = _door_trig(float(phi[0]))
        total = float(np.sum(g))
        profile_sum = self.intensity * float(np.sum(self._profile(theta)))
        if t == 0.0:
            # pr = C * t^G * exp(-t*S); only G <= 2 terms survive at t = 0.
            log_c = float(np.sum(
                xlogy(g, self.intensity * self._profile(theta)) - gammaln(g + 1.0)
            ))
            c = math.exp(log_c)
            if total == 0:
                d1, d2 = -profile_sum * c, profile_sum**2 * c
            elif total == 1:
                d1, d2 = c, -2.0 * profile_sum * c
            elif total == 2:
                d1, d2 = 0.0, 2.0 * c
            else:
                d1 = d2 = 0.0
            return np.array([[d2 * dt * dt + d1 * ddt]])
        pr = math.exp(self.log_density(data, phi, theta))
        d1 = pr * (total / t - profile_sum)
        d2 = pr * (total * (total - 1.0) / t**2
                   - 2.0 * total * profile_sum / t + profile_sum**2)
        return np.array([[d2 * dt * dt + d1 * ddt]])

    def sample(self, phi, theta, rng) -> np.ndarray:
        return rng.poisson(self.rates(phi, theta))

    def conditional_fim_oracle(self, phi, theta) -> float:
        """Closed-form conditional information: sum_k lambda_k (d log rate)^2."""
        lam = self.rates(phi, theta)
        coef = (np.asarray(self.positions) - float(theta[0])) / self.width**2
        return float(np.sum(lam * coef**2))

    # Vectorized hooks -----------------------------------------------------

    def sample_batch(self, phi, theta, n, rng) -> np.ndarray:
        lam = self.rates(phi, theta)
        return rng.poisson(lam, size=(n, lam.size))

    def log_density_batch(self, data_batch, phi, theta) -> np.ndarray:
        g = np.asarray(data_batch, dtype=np.float64)
        lam = self.rates(phi, theta)
        return np.sum(xlogy(g, lam[None, :]) - lam[None, :] - gammaln(g + 1.0), axis=1)

    def score_theta_batch(self, data_batch, phi, theta) -> np.ndarray:
        g = np.asarray(data_batch, dtype=np.float64)
        lam = self.rates(phi, theta)
        coef = (np.asarray(self.positions) - float(theta[0])) / self.width**2
        return ((g - lam[None, :]) @ coef)[:, None]

    def log_density_nodes(self, data, phis, theta) -> np.ndarray:
        g = np.asarray(data, dtype=np.float64)
        lam = self._rates_nodes(phis, theta)
        return np.sum(xlogy(g[None, :], lam) - lam - gammaln(g + 1.0)[None, :], axis=1)

    def score_theta_nodes(self, data, phis, theta) -> np.ndarray:
        g = np.asarray(data, dtype=np.float64)
        lam = self._rates_nodes(phis, theta)
        coef = (np.asarray(self.positions) - float(theta[0])) / self.width**2
        return ((g[None, :] - lam) @ coef)[:, None]

    def _rates_nodes(self, phis, theta) -> np.ndarray:
        angles = np.asarray(phis, dtype=np.float64)[:, 0]
        c = np.cos(angles)
        c = np.where(np.abs(c) < 1e-12, 0.0, c)
        return self.intensity * (c * c)[:, None] * self._profile(theta)[None, :]

    def data_quadrature(self, phi, theta, extra_spread: float = 0.0):
        """Exhaustive enumeration of count vectors with appreciable mass near
        the given door angle, as a counting-measure rule."""
        lam = self.rates(phi, theta)
        caps = np.ceil(lam + 12.0 * np.sqrt(lam)).astype(np.int64) + 3
        sizes = caps + 1
        total = int(np.prod(sizes))
        if total > MAX_COUNT_NODES:
            return None
        axes = [np.arange(s) for s in sizes]
        mesh = np.meshgrid(*axes, indexing="ij")
        counts = np.stack([m.ravel() for m in mesh], axis=-1)
        return counts, np.ones(counts.shape[0])


# ---------------------------------------------------------------------------
# Bundles and registry


@dataclass(frozen=True)
class GaussianConjugate:
    """Single-observation Gaussian location model with Gaussian priors on
    both parameter blocks; every joint-information block is closed form."""

    sigma: float = 1.0
    tau: float = 1.0
    spread: float = 1.0

    @property
    def model(self) -> GaussianLocation:
        return GaussianLocation(n_obs=1, sigma=self.sigma)

    @property
    def prior(self) -> GaussianPrior:
        return GaussianPrior(mu=0.0, tau=self.tau)

    @property
    def theta_prior(self) -> GaussianThetaPrior:
        return GaussianThetaPrior(spread=self.spread)


@dataclass(frozen=True)
class ZooBundle:
    model: object
    prior: object
    theta_prior: object | None = None


MODEL_IDS = ("gaussian_location", "dependent_prior", "poisson_door", "gaussian_conjugate")


def make_zoo(model_id: str, params: dict | None = None) -> ZooBundle:
    """Instantiate a zoo model with its paired prior(s) by string id."""
    p = dict(params or {})
    if model_id == "gaussian_location":
        bundle = ZooBundle(
            model=GaussianLocation(n_obs=int(p.pop("n_obs", 1)),
                                   sigma=float(p.pop("sigma", 1.0))),
            prior=GaussianPrior(mu=float(p.pop("mu", 0.0)),
                                tau=float(p.pop("tau", 1.0))),
        )
    elif model_id == "dependent_prior":
        bundle = ZooBundle(
            model=DependentPriorModel(sigma=float(p.pop("sigma", 1.0))),
            prior=LinearGaussianPrior(a=float(p.pop("a", 1.0)),
                                      tau=float(p.pop("tau", 1.0))),
        )
    elif model_id == "poisson_door":
        nominal = float(p.pop("nominal_angle", math.pi / 2.0))
        bundle = ZooBundle(
            model=PoissonDoor(intensity=float(p.pop("intensity", 100.0)),
                              width=float(p.pop("width", 1.0))),
            prior=GaussianPrior(mu=nominal, tau=float(p.pop("prior_sd", 0.1))),
        )
    elif model_id == "gaussian_conjugate":
        conj = GaussianConjugate(sigma=float(p.pop("sigma", 1.0)),
                                 tau=float(p.pop("tau", 1.0)),
                                 spread=float(p.pop("spread", 1.0)))
        bundle = ZooBundle(model=conj.model, prior=conj.prior,
                           theta_prior=conj.theta_prior)
    else:
        raise ConfigError(f"unknown model id {model_id!r}")
    if p:
        raise ConfigError(f"unknown parameters for {model_id}: {sorted(p)}")
    return bundle


def oracle_fims(model_id: str, params: dict | None = None) -> dict[str, float]:
    """Closed-form information values for a zoo model.

    Keys present depend on the model; ``conditional`` / ``averaged`` /
    ``marginal`` / ``nuisance_info`` cover the marginalization studies, the
    ``f_*`` keys cover the joint-prior ones.
    """
    p = dict(params or {})
    if model_id == "gaussian_location":
        n, sigma, tau = int(p.get("n_obs", 1)), float(p.get("sigma", 1.0)), float(p.get("tau", 1.0))
        conditional = n / sigma**2
        marginal = n / (sigma**2 + n * tau**2)
        return {
            "conditional": conditional,
            "averaged": conditional,
            "marginal": marginal,
            "nuisance_info": 0.0,
            "gap": conditional - marginal,
        }
    if model_id == "dependent_prior":
        a, sigma, tau = float(p.get("a", 1.0)), float(p.get("sigma", 1.0)), float(p.get("tau", 1.0))
        nuisance = a**2 / tau**2
        marginal = a**2 / (sigma**2 + tau**2)
        return {
            "conditional": 0.0,
            "averaged": 0.0,
            "marginal": marginal,
            "nuisance_info": nuisance,
            "gap": nuisance - marginal,
        }
    if model_id == "gaussian_conjugate":
        sigma, tau, s = (float(p.get("sigma", 1.0)), float(p.get("tau", 1.0)),
                         float(p.get("spread", 1.0)))
        marginal = 1.0 / (sigma**2 + tau**2)
        return {
            "conditional": 1.0 / sigma**2,
            "averaged": 1.0 / sigma**2,
            "marginal": marginal,
            "nuisance_info": 0.0,
            "f_tt": 1.0 / sigma**2 + 1.0 / s**2,
            "f_tp": 1.0 / sigma**2,
            "f_pp": 1.0 / sigma**2 + 1.0 / tau**2,
            "f_m": marginal + 1.0 / s**2,
            "prior_info": 1.0 / s**2,
            "avg_marginal": marginal,
        }
    if model_id == "poisson_door":
        return {"conditional_closed": 0.0}
    raise ConfigError(f"unknown model id {model_id!r}")


def sample_dataset(model_id: str, params: dict | None, phi, theta, n: int, seed: int) -> np.ndarray:
    """Reproducible stacked draws from a zoo model's conditional sampler."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    bundle = make_zoo(model_id, params)
    phi = as_vector(phi, "phi")
    theta = as_vector(theta, "theta")
    rng = substream(seed, _STAGE_DATASET)
    hook = getattr(bundle.model, "sample_batch", None)
    if hook is not None:
        return hook(phi, theta, int(n), rng)
    return np.stack([bundle.model.sample(phi, theta, rng) for _ in range(int(n))])
