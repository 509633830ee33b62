"""Marginalization over the nuisance space.

Computes the nuisance-marginalized data density, the posterior over the
nuisance parameters given one data sample, the global score vector, and the
posterior variance of the score, using either a tensorized Gauss-Legendre
grid or self-normalized importance sampling from the prior.  All density
work happens in log space with max-shift stabilization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .core import (
    ConditionalModel,
    ConfigError,
    DegenerateMarginalError,
    DimensionError,
    NuisancePrior,
    as_vector,
    log_density_nodes,
    prior_log_density_nodes,
    prior_score_theta_nodes,
    score_theta_nodes,
    substream,
)

__all__ = [
    "Integrator",
    "PosteriorWeights",
    "log_marginal_density",
    "log_marginal_mc",
    "posterior_weights",
    "global_score",
    "posterior_score_variance",
]

GRID_MAX_DIM = 3
MC_MIN_DRAWS = 100

# Stage tags for derived RNG streams.
_STAGE_MC_DRAWS = 11
_STAGE_MOMENTS = 12

#: Sample count used to estimate truncation moments for priors that expose
#: neither finite support nor a ``moments`` hook.
_MOMENT_SAMPLES = 4096


@dataclass(frozen=True)
class Integrator:
    """Node-weight rule or Monte Carlo scheme over the nuisance space.

    ``grid`` integrators hold explicit nodes ``(m, d_phi)`` and positive
    weights ``(m,)``; ``monte_carlo`` integrators hold a draw count and a
    seed.  Tensorized grids are limited to ``d_phi <= 3``.
    """

    kind: str
    nodes: np.ndarray | None = None
    weights: np.ndarray | None = None
    n_draws: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind == "grid":
            if self.nodes is None or self.weights is None:
                raise ConfigError("grid integrator requires nodes and weights")
            nodes = np.atleast_2d(np.asarray(self.nodes, dtype=np.float64))
            weights = np.asarray(self.weights, dtype=np.float64)
            if nodes.shape[0] != weights.shape[0]:
                raise DimensionError("node and weight counts differ")
            if nodes.shape[1] > GRID_MAX_DIM:
                raise ConfigError(
                    f"grid integration limited to d_phi <= {GRID_MAX_DIM}"
                )
            if np.any(weights <= 0) or not np.isfinite(weights.sum()):
                raise ConfigError("grid weights must be positive with finite sum")
            object.__setattr__(self, "nodes", nodes)
            object.__setattr__(self, "weights", weights)
            self.nodes.setflags(write=False)
            self.weights.setflags(write=False)
        elif self.kind == "monte_carlo":
            if self.n_draws < MC_MIN_DRAWS:
                raise ConfigError(f"n_draws must be >= {MC_MIN_DRAWS}")
            if self.seed < 0:
                raise ConfigError("seed must be nonnegative")
        else:
            raise ConfigError(f"unknown integrator kind {self.kind!r}")

    @classmethod
    def grid(cls, nodes, weights) -> "Integrator":
        return cls(kind="grid", nodes=np.asarray(nodes, dtype=np.float64),
                   weights=np.asarray(weights, dtype=np.float64))

    @classmethod
    def monte_carlo(cls, n_draws: int, seed: int) -> "Integrator":
        return cls(kind="monte_carlo", n_draws=int(n_draws), seed=int(seed))

    @classmethod
    def gauss_legendre(
        cls, prior: NuisancePrior, theta: np.ndarray, n_nodes: int
    ) -> "Integrator":
        """Per-axis Gauss-Legendre rule, tensorized over the nuisance axes.

        Unbounded support axes are truncated at the prior mean plus/minus six
        prior standard deviations.
        """
        theta = as_vector(theta, "theta")
        lo, hi = _truncated_box(prior, theta)
        if lo.size > GRID_MAX_DIM:
            raise ConfigError(f"grid integration limited to d_phi <= {GRID_MAX_DIM}")
        x, w = np.polynomial.legendre.leggauss(int(n_nodes))
        axis_nodes, axis_weights = [], []
        for a, b in zip(lo, hi):
            axis_nodes.append(0.5 * (b - a) * x + 0.5 * (b + a))
            axis_weights.append(0.5 * (b - a) * w)
        grids = np.meshgrid(*axis_nodes, indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=-1)
        wgrids = np.meshgrid(*axis_weights, indexing="ij")
        weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
        return cls.grid(nodes, weights)


def _truncated_box(prior: NuisancePrior, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = (np.atleast_1d(np.asarray(b, dtype=np.float64)) for b in prior.support())
    if np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)):
        return lo, hi
    moments = getattr(prior, "moments", None)
    if moments is not None:
        mean, sd = (np.atleast_1d(np.asarray(m, dtype=np.float64)) for m in moments(theta))
    else:
        rng = substream(0, _STAGE_MOMENTS)
        draws = np.stack([prior.sample(theta, rng) for _ in range(_MOMENT_SAMPLES)])
        mean, sd = draws.mean(axis=0), draws.std(axis=0)
    box_lo = np.where(np.isfinite(lo), lo, mean - 6.0 * sd)
    box_hi = np.where(np.isfinite(hi), hi, mean + 6.0 * sd)
    if np.any(box_hi <= box_lo):
        raise ConfigError("degenerate truncation box for grid integrator")
    return np.maximum(lo, box_lo), np.minimum(hi, box_hi)


@dataclass(frozen=True)
class PosteriorWeights:
    """Normalized posterior masses of the nuisance grid nodes given one
    data sample, plus the log marginal density of that sample."""

    nodes: np.ndarray
    weights: np.ndarray
    log_marginal: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if np.any(w < 0):
            raise ConfigError("posterior weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ConfigError("posterior weights must sum to 1")
        object.__setattr__(self, "weights", w)
        self.weights.setflags(write=False)


def _log_joint_at_nodes(model, prior, data, theta, integ: Integrator) -> np.ndarray:
    """log[ pr(data|phi_i, theta) pr(phi_i|theta) w_i ] at the grid nodes."""
    ld = log_density_nodes(model, data, integ.nodes, theta)
    lp = prior_log_density_nodes(prior, integ.nodes, theta)
    with np.errstate(divide="ignore"):
        return ld + lp + np.log(integ.weights)


def log_marginal_density(
    model: ConditionalModel,
    prior: NuisancePrior,
    data,
    theta: np.ndarray,
    integ: Integrator,
) -> float:
    """Log of the nuisance-marginalized data density.

    Grid integrators evaluate the node sum by max-shift log-sum-exp; Monte
    Carlo integrators average the conditional density over prior draws.
    Raises :class:`DegenerateMarginalError` when every integrand evaluation
    underflows to ``-inf``.
    """
    theta = as_vector(theta, "theta")
    if integ.kind == "grid":
        log_terms = _log_joint_at_nodes(model, prior, data, theta, integ)
        if np.all(np.isneginf(log_terms)):
            raise DegenerateMarginalError("all grid nodes underflowed")
        return float(logsumexp(log_terms))
    value, _ = log_marginal_mc(model, prior, data, theta, integ.n_draws, integ.seed)
    return value


def log_marginal_mc(
    model: ConditionalModel,
    prior: NuisancePrior,
    data,
    theta: np.ndarray,
    n_draws: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo log marginal with a delta-method standard error.

    Importance-samples from the prior, so the estimator is the log of the
    sample mean of conditional densities.
    """
    theta = as_vector(theta, "theta")
    rng = substream(seed, _STAGE_MC_DRAWS)
    phis = np.stack([prior.sample(theta, rng) for _ in range(int(n_draws))])
    log_p = log_density_nodes(model, data, phis, theta)
    if np.all(np.isneginf(log_p)):
        raise DegenerateMarginalError("all Monte Carlo draws underflowed")
    shift = np.max(log_p)
    ratios = np.exp(log_p - shift)
    mean = float(np.mean(ratios))
    sd = float(np.std(ratios, ddof=1))
    value = shift + np.log(mean)
    stderr = sd / (np.sqrt(n_draws) * mean)
    return float(value), float(stderr)


def posterior_weights(
    model: ConditionalModel,
    prior: NuisancePrior,
    data,
    theta: np.ndarray,
    integ: Integrator,
) -> PosteriorWeights:
    """Posterior masses over the grid nodes for one data sample."""
    if integ.kind != "grid":
        raise ConfigError("posterior_weights requires a grid integrator")
    theta = as_vector(theta, "theta")
    log_terms = _log_joint_at_nodes(model, prior, data, theta, integ)
    if np.all(np.isneginf(log_terms)):
        raise DegenerateMarginalError("all grid nodes underflowed")
    log_norm = logsumexp(log_terms)
    w = np.exp(log_terms - log_norm)
    w = w / w.sum()
    return PosteriorWeights(nodes=integ.nodes, weights=w, log_marginal=float(log_norm))


def _node_scores(model, prior, data, theta, nodes) -> np.ndarray:
    """s(data|phi_i, theta) + s(phi_i|theta) at the given nodes."""
    s_data = score_theta_nodes(model, data, nodes, theta)
    s_prior = prior_score_theta_nodes(prior, nodes, theta)
    return s_data + s_prior


def global_score(
    model: ConditionalModel,
    prior: NuisancePrior,
    data,
    theta: np.ndarray,
    integ: Integrator,
) -> np.ndarray:
    """Score of the marginalized model: the posterior expectation of the
    conditional score plus the nuisance-prior score.

    The prior-score summand is exactly zero for theta-independent priors,
    by the prior contract.
    """
    theta = as_vector(theta, "theta")
    if integ.kind == "grid":
        pw = posterior_weights(model, prior, data, theta, integ)
        scores = _node_scores(model, prior, data, theta, pw.nodes)
        return pw.weights @ scores
    rng = substream(integ.seed, _STAGE_MC_DRAWS)
    phis = np.stack([prior.sample(theta, rng) for _ in range(integ.n_draws)])
    log_p = log_density_nodes(model, data, phis, theta)
    if np.all(np.isneginf(log_p)):
        raise DegenerateMarginalError("all Monte Carlo draws underflowed")
    w = np.exp(log_p - logsumexp(log_p))
    w = w / w.sum()
    scores = _node_scores(model, prior, data, theta, phis)
    return w @ scores


def posterior_score_variance(
    model: ConditionalModel,
    prior: NuisancePrior,
    data,
    theta: np.ndarray,
    integ: Integrator,
) -> np.ndarray:
    """Covariance, under the nuisance posterior for one data sample, of the
    conditional score plus prior score.  PSD by construction."""
    if integ.kind != "grid":
        raise ConfigError("posterior_score_variance requires a grid integrator")
    theta = as_vector(theta, "theta")
    pw = posterior_weights(model, prior, data, theta, integ)
    scores = _node_scores(model, prior, data, theta, pw.nodes)
    mean = pw.weights @ scores
    centered = scores - mean
    cov = (centered * pw.weights[:, None]).T @ centered
    return 0.5 * (cov + cov.T)
