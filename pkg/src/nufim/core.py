"""Shared domain types, matrix predicates, and derivative checking.

Conventions used across the package:

* Task parameters ``theta`` and nuisance parameters ``phi`` are 1-D float64
  arrays (lengths ``d_theta >= 1`` and ``d_phi >= 1``).
* A data sample is either a 1-D float array of per-photon attributes (fixed
  length ``n_obs``) or a 1-D nonnegative integer count vector; a *batch* of
  samples stacks them along a new leading axis.
* All densities are handled in log space; ``-inf`` encodes a zero density.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Protocol, runtime_checkable

import numpy as np

__all__ = [
    "NufimError",
    "SymmetryError",
    "DimensionError",
    "EvaluationError",
    "DegenerateMarginalError",
    "SingularFimError",
    "ExpansionUndefinedError",
    "ConfigError",
    "FisherMatrix",
    "MatrixEstimate",
    "ConditionalModel",
    "NuisancePrior",
    "ThetaPrior",
    "psd_check",
    "loewner_leq",
    "check_gradient",
    "finite_difference_gradient",
    "finite_difference_hessian",
    "substream",
    "chunk_ranges",
]

BLOCK_TAGS = ("theta", "phi", "joint")

#: Default relative symmetry tolerance for FisherMatrix validation.
SYMMETRY_RTOL = 1e-10

#: Samples processed per RNG substream; fixed so that reductions are
#: bit-stable regardless of how chunks are distributed over workers.
CHUNK_SIZE = 1024


class NufimError(Exception):
    """Base class for all package errors."""


class SymmetryError(NufimError):
    """Matrix is not symmetric within tolerance."""


class DimensionError(NufimError):
    """Shapes or block tags of two operands do not match."""


class EvaluationError(NufimError):
    """A model, prior, or user function returned a non-finite value."""


class DegenerateMarginalError(NufimError):
    """Every integrand evaluation underflowed; the marginal is numerically zero."""


class SingularFimError(NufimError):
    """FIM is singular or too ill-conditioned to invert."""


class ExpansionUndefinedError(NufimError):
    """The second-order density expansion hit a zero conditional density."""


class ConfigError(NufimError):
    """Invalid run configuration."""


def as_vector(x: Any, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise EvaluationError(f"{name} has non-finite entries")
    return arr


def _symmetry_gap(m: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(m))), np.finfo(np.float64).tiny)
    return float(np.max(np.abs(m - m.T))) / scale


@dataclass(frozen=True)
class FisherMatrix:
    """A symmetric information matrix with a block tag.

    Parameters
    ----------
    entries:
        Square ``(d, d)`` array.
    block_tag:
        One of ``"theta"``, ``"phi"``, ``"joint"``, recording which
        parameter block the matrix refers to.
    approximate:
        Marks outputs of the second-order expansion, which are exempt from
        the positive-semidefiniteness expectation that estimator outputs
        carry.  Symmetry is required either way.
    """

    entries: np.ndarray
    block_tag: str
    approximate: bool = False

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"entries must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise EvaluationError("FisherMatrix entries must be finite")
        if self.block_tag not in BLOCK_TAGS:
            raise ConfigError(f"unknown block_tag {self.block_tag!r}")
        if _symmetry_gap(arr) > SYMMETRY_RTOL:
            raise SymmetryError(
                f"matrix asymmetric beyond rtol {SYMMETRY_RTOL:g}"
            )
        object.__setattr__(self, "entries", arr)
        self.entries.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class MatrixEstimate:
    """A Monte Carlo matrix estimate with per-entry standard errors.

    ``score_mean_diagnostic`` holds the empirical mean of the score vectors
    that entered the estimate; it should be statistically indistinguishable
    from zero when the underlying model is implemented correctly.
    """

    mean: FisherMatrix
    stderr: np.ndarray
    n_samples: int
    score_mean_diagnostic: np.ndarray

    def __post_init__(self) -> None:
        se = np.asarray(self.stderr, dtype=np.float64)
        if se.shape != self.mean.entries.shape:
            raise DimensionError("stderr shape must match mean")
        if not np.all(np.isfinite(se)) or np.any(se < 0):
            raise EvaluationError("stderr entries must be finite and nonnegative")
        if self.n_samples < 2:
            raise ConfigError("n_samples must be >= 2")
        diag = as_vector(self.score_mean_diagnostic, "score_mean_diagnostic")
        if diag.shape[0] != self.mean.dim:
            raise DimensionError("score_mean_diagnostic length must match matrix dim")
        object.__setattr__(self, "stderr", se)
        object.__setattr__(self, "score_mean_diagnostic", diag)
        self.stderr.setflags(write=False)
        self.score_mean_diagnostic.setflags(write=False)

    @property
    def score_mean_stderr(self) -> np.ndarray:
        """Standard error of the score mean, derived from the FIM diagonal.

        The variance of a single score coordinate equals the corresponding
        FIM diagonal entry, so the mean over ``n_samples`` draws has standard
        error ``sqrt(diag / n)``.
        """
        diag = np.clip(np.diag(self.mean.entries), 0.0, None)
        return np.sqrt(diag / self.n_samples)

    @property
    def dim(self) -> int:
        return self.mean.dim


# ---------------------------------------------------------------------------
# Contracts


@runtime_checkable
class ConditionalModel(Protocol):
    """Data model conditional on both parameter blocks.

    Implementors may additionally provide vectorized hooks, which the
    estimators use when present and emulate with loops otherwise:

    * ``sample_batch(phi, theta, n, rng)`` -> stacked payloads, leading axis n
    * ``log_density_batch(data_batch, phi, theta)`` -> (n,)
    * ``score_theta_batch(data_batch, phi, theta)`` -> (n, d_theta)
    * ``score_phi_batch(data_batch, phi, theta)`` -> (n, d_phi)
    * ``log_density_nodes(data, phis, theta)`` -> (m,) for phi node arrays
    * ``score_theta_nodes(data, phis, theta)`` -> (m, d_theta)
    * ``hessian_phi_density_batch(data_batch, phi, theta)`` -> (n, d_phi, d_phi)
    * ``data_quadrature(phi, theta, extra_spread=0.0)`` -> (payload_batch,
      weights) realizing a plain-measure rule over the data space, or None
      when no deterministic rule is available.
    """

    def log_density(self, data: Any, phi: np.ndarray, theta: np.ndarray) -> float:
        """Natural log of the conditional data density (or probability)."""
        ...

    def score_theta(self, data: Any, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """Gradient of the log density in the task parameters."""
        ...

    def score_phi(self, data: Any, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """Gradient of the log density in the nuisance parameters."""
        ...

    def hessian_phi_density(
        self, data: Any, phi: np.ndarray, theta: np.ndarray
    ) -> np.ndarray | None:
        """Second partials of the *density* (not log) in phi, or None to
        request central finite differences."""
        ...

    def sample(self, phi: np.ndarray, theta: np.ndarray, rng: np.random.Generator) -> Any:
        ...

    def dims(self) -> tuple[int, int, str]:
        """(d_theta, d_phi, data descriptor), descriptor in
        {"continuous", "counts"}."""
        ...


@runtime_checkable
class NuisancePrior(Protocol):
    """Prior over the nuisance parameters, optionally depending on theta.

    ``score_theta`` must return an exactly-zero vector for priors that do
    not depend on theta.  Optional hooks used when present:

    * ``score_phi(phi, theta)`` -> gradient of the log density in phi
    * ``log_density_nodes(phis, theta)`` / ``score_theta_nodes(phis, theta)``
    * ``moments(theta)`` -> (mean, sd) arrays, used to truncate unbounded
      supports for grid integration
    * ``covariance(theta)`` -> (d_phi, d_phi) covariance matrix
    """

    def log_density(self, phi: np.ndarray, theta: np.ndarray) -> float:
        ...

    def score_theta(self, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
        ...

    def sample(self, theta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        ...

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """(lower, upper) per-axis bounds; +-inf marks an unbounded axis."""
        ...


@runtime_checkable
class ThetaPrior(Protocol):
    """Proper, smooth prior over the task parameters."""

    def log_density(self, theta: np.ndarray) -> float:
        ...

    def score(self, theta: np.ndarray) -> np.ndarray:
        ...

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        ...


# ---------------------------------------------------------------------------
# Matrix predicates


def _entries_of(m: FisherMatrix | np.ndarray) -> np.ndarray:
    if isinstance(m, FisherMatrix):
        return m.entries
    return np.asarray(m, dtype=np.float64)


def default_psd_tol(m: FisherMatrix | np.ndarray) -> float:
    """Default eigenvalue slack: 1e-8 times the trace magnitude."""
    return 1e-8 * abs(float(np.trace(_entries_of(m))))


def psd_check(
    m: FisherMatrix | np.ndarray, tol: float | None = None
) -> tuple[bool, float]:
    """Test positive semidefiniteness by symmetric eigendecomposition.

    Returns ``(is_psd, min_eigenvalue)`` where ``is_psd`` means the smallest
    eigenvalue is at least ``-tol``.  Raises :class:`SymmetryError` for
    inputs asymmetric beyond the structural tolerance.
    """
    arr = _entries_of(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if _symmetry_gap(arr) > SYMMETRY_RTOL:
        raise SymmetryError("psd_check requires a symmetric matrix")
    if tol is None:
        tol = default_psd_tol(arr)
    min_eig = float(np.linalg.eigvalsh(0.5 * (arr + arr.T))[0])
    return min_eig >= -tol, min_eig


def loewner_leq(
    mlo: FisherMatrix | np.ndarray,
    mhi: FisherMatrix | np.ndarray,
    tol: float | None = None,
) -> tuple[bool, float]:
    """Test the matrix ordering mlo <= mhi (mhi - mlo PSD within tol)."""
    lo, hi = _entries_of(mlo), _entries_of(mhi)
    if lo.shape != hi.shape:
        raise DimensionError(f"shape mismatch: {lo.shape} vs {hi.shape}")
    if isinstance(mlo, FisherMatrix) and isinstance(mhi, FisherMatrix):
        if mlo.block_tag != mhi.block_tag:
            raise DimensionError(
                f"block_tag mismatch: {mlo.block_tag!r} vs {mhi.block_tag!r}"
            )
    return psd_check(hi - lo, tol)


# ---------------------------------------------------------------------------
# Finite differences


def _steps(x: np.ndarray, h: float) -> np.ndarray:
    return h * np.maximum(1.0, np.abs(x))


def finite_difference_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient with per-coordinate step h*max(1, |x_i|)."""
    x = as_vector(x, "x")
    steps = _steps(x, h)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = steps[i]
        fp, fm = float(f(x + e)), float(f(x - e))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise EvaluationError(f"non-finite function value near coordinate {i}")
        grad[i] = (fp - fm) / (2.0 * steps[i])
    return grad


def finite_difference_hessian(
    f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-4
) -> np.ndarray:
    """Central second-difference Hessian (symmetric by construction)."""
    x = as_vector(x, "x")
    steps = _steps(x, h)
    d = x.size
    f0 = float(f(x))
    if not np.isfinite(f0):
        raise EvaluationError("non-finite function value at expansion point")
    hess = np.empty((d, d))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = steps[i]
        fpp = float(f(x + ei))
        fmm = float(f(x - ei))
        if not (np.isfinite(fpp) and np.isfinite(fmm)):
            raise EvaluationError(f"non-finite function value near coordinate {i}")
        hess[i, i] = (fpp - 2.0 * f0 + fmm) / steps[i] ** 2
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = steps[j]
            vals = [float(f(x + ei + ej)), float(f(x + ei - ej)),
                    float(f(x - ei + ej)), float(f(x - ei - ej))]
            if not all(np.isfinite(v) for v in vals):
                raise EvaluationError("non-finite function value in Hessian stencil")
            hess[i, j] = hess[j, i] = (
                vals[0] - vals[1] - vals[2] + vals[3]
            ) / (4.0 * steps[i] * steps[j])
    return hess


def check_gradient(
    f: Callable[[np.ndarray], float],
    analytic_grad: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    h: float = 1e-5,
) -> float:
    """Max relative discrepancy between an analytic gradient and central
    finite differences: ``max_i |a_i - g_i| / max(1, |a_i|)``."""
    x = as_vector(x, "x")
    numeric = finite_difference_gradient(f, x, h)
    analytic = as_vector(analytic_grad(x), "analytic gradient")
    if analytic.shape != numeric.shape:
        raise DimensionError("analytic gradient has wrong length")
    denom = np.maximum(1.0, np.abs(analytic))
    return float(np.max(np.abs(analytic - numeric) / denom))


# ---------------------------------------------------------------------------
# Seeded substreams

def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator derived from (seed, *key).

    Streams are a pure function of their key, so estimators can hand out
    per-chunk generators whose draws do not depend on worker count or
    execution order.
    """
    if seed < 0:
        raise ConfigError("seed must be nonnegative")
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def chunk_ranges(n: int, chunk_size: int = CHUNK_SIZE):
    """Yield (index, start, stop) for fixed-size chunks of range(n)."""
    idx = 0
    for start in range(0, n, chunk_size):
        yield idx, start, min(start + chunk_size, n)
        idx += 1


# ---------------------------------------------------------------------------
# Batched-evaluation dispatch.  Estimators call these instead of the model
# methods directly; zoo models implement the vectorized hooks, arbitrary
# contract implementations fall back to loops.


def sample_batch(
    model: ConditionalModel,
    phi: np.ndarray,
    theta: np.ndarray,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    hook = getattr(model, "sample_batch", None)
    if hook is not None:
        return hook(phi, theta, n, rng)
    return np.stack([model.sample(phi, theta, rng) for _ in range(n)])


def log_density_batch(model, data_batch, phi, theta) -> np.ndarray:
    hook = getattr(model, "log_density_batch", None)
    if hook is not None:
        return np.asarray(hook(data_batch, phi, theta), dtype=np.float64)
    return np.array(
        [model.log_density(a, phi, theta) for a in data_batch], dtype=np.float64
    )


def score_theta_batch(model, data_batch, phi, theta) -> np.ndarray:
    hook = getattr(model, "score_theta_batch", None)
    if hook is not None:
        return np.asarray(hook(data_batch, phi, theta), dtype=np.float64)
    return np.stack([model.score_theta(a, phi, theta) for a in data_batch])


def score_phi_batch(model, data_batch, phi, theta) -> np.ndarray:
    hook = getattr(model, "score_phi_batch", None)
    if hook is not None:
        return np.asarray(hook(data_batch, phi, theta), dtype=np.float64)
    return np.stack([model.score_phi(a, phi, theta) for a in data_batch])


def log_density_nodes(model, data, phis, theta) -> np.ndarray:
    hook = getattr(model, "log_density_nodes", None)
    if hook is not None:
        return np.asarray(hook(data, phis, theta), dtype=np.float64)
    return np.array(
        [model.log_density(data, p, theta) for p in phis], dtype=np.float64
    )


def score_theta_nodes(model, data, phis, theta) -> np.ndarray:
    hook = getattr(model, "score_theta_nodes", None)
    if hook is not None:
        return np.asarray(hook(data, phis, theta), dtype=np.float64)
    return np.stack([model.score_theta(data, p, theta) for p in phis])


def prior_log_density_nodes(prior, phis, theta) -> np.ndarray:
    hook = getattr(prior, "log_density_nodes", None)
    if hook is not None:
        return np.asarray(hook(phis, theta), dtype=np.float64)
    return np.array([prior.log_density(p, theta) for p in phis], dtype=np.float64)


def prior_score_theta_nodes(prior, phis, theta) -> np.ndarray:
    hook = getattr(prior, "score_theta_nodes", None)
    if hook is not None:
        return np.asarray(hook(phis, theta), dtype=np.float64)
    return np.stack([prior.score_theta(p, theta) for p in phis])


def prior_score_phi(prior, phi, theta, h: float = 1e-5) -> np.ndarray:
    """Gradient of the nuisance-prior log density in phi.

    Uses the prior's analytic ``score_phi`` hook when available, central
    finite differences of ``log_density`` otherwise.
    """
    hook = getattr(prior, "score_phi", None)
    if hook is not None:
        return as_vector(hook(phi, theta), "prior score_phi")
    return finite_difference_gradient(
        lambda p: prior.log_density(p, theta), np.asarray(phi, dtype=np.float64), h
    )


def hessian_phi_density_batch(model, data_batch, phi, theta, h: float = 1e-4) -> np.ndarray:
    """Density Hessians in phi for a batch of samples, analytic when offered."""
    hook = getattr(model, "hessian_phi_density_batch", None)
    if hook is not None:
        return np.asarray(hook(data_batch, phi, theta), dtype=np.float64)
    out = []
    for a in data_batch:
        hess = model.hessian_phi_density(a, phi, theta)
        if hess is None:
            hess = finite_difference_hessian(
                lambda p: np.exp(model.log_density(a, p, theta)),
                np.asarray(phi, dtype=np.float64),
                h,
            )
        out.append(np.asarray(hess, dtype=np.float64))
    return np.stack(out)
