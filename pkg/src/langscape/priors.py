"""Analytic latent priors: isotropic Gaussian mixtures under VP noising.

A Gaussian mixture with per-component isotropic covariance is closed under
the variance-preserving forward noising kernel (mean scale sqrt(alpha_bar),
added variance 1 - alpha_bar), so its log-density and score are available
exactly at every noise level.  These stand in for a trained score model in
the samplers: same interface, zero approximation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "GaussianMixturePrior",
    "VpSchedule",
    "gmm_log_density_and_score",
    "vp_noised",
    "sample_prior",
]


@dataclass(frozen=True)
class GaussianMixturePrior:
    """Mixture of isotropic Gaussians N(mean_j, var_j I) with weights w_j."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        mu = np.atleast_2d(np.asarray(self.means, dtype=float))
        v = np.asarray(self.variances, dtype=float)
        if w.ndim != 1 or mu.shape[0] != w.shape[0] or v.shape != w.shape:
            raise ValueError("weights, means, variances must have matching counts")
        if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1 within 1e-12")
        if np.any(v <= 0):
            raise ValueError("component variances must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "variances", v)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def components(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def standard(cls, p: int) -> "GaussianMixturePrior":
        return cls(weights=np.array([1.0]), means=np.zeros((1, p)),
                   variances=np.array([1.0]))


@dataclass(frozen=True)
class VpSchedule:
    """Variance-preserving noise schedule on t in [0, 1].

    alpha_bar(t) = exp(-t beta_min - t^2 (beta_max - beta_min) / 2);
    alpha_bar(0) = 1 and alpha_bar is strictly decreasing.
    """

    beta_min: float = 0.1
    beta_max: float = 20.0

    def __post_init__(self):
        if not (0 < self.beta_min <= self.beta_max):
            raise ValueError("need 0 < beta_min <= beta_max")

    def alpha_bar(self, t: float) -> float:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {t}")
        return math.exp(-t * self.beta_min
                        - 0.5 * t * t * (self.beta_max - self.beta_min))


def gmm_log_density_and_score(prior: GaussianMixturePrior, z):
    """log p(z) and its gradient, stabilized with log-sum-exp.

    The score is the responsibility-weighted average of the component
    scores (mean_j - z) / var_j.  z may be a single point (p,) or a batch
    (..., p); outputs match.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    if z.shape[-1] != prior.dim:
        raise ValueError(f"z has dimension {z.shape[-1]}, prior is {prior.dim}-d")
    p = prior.dim
    diff = z[..., None, :] - prior.means          # (..., J, p)
    sq = np.sum(diff * diff, axis=-1)             # (..., J)
    v = prior.variances
    log_comp = (np.log(prior.weights) - 0.5 * sq / v
                - 0.5 * p * np.log(2.0 * math.pi * v))
    logp = logsumexp(log_comp, axis=-1)
    resp = np.exp(log_comp - logp[..., None])     # responsibilities
    score = np.sum(resp[..., None] * (-diff / v[:, None]), axis=-2)
    if single:
        return float(logp), score
    return logp, score


def vp_noised(prior: GaussianMixturePrior, t: float,
              schedule: VpSchedule) -> GaussianMixturePrior:
    """Marginal of the prior after VP noising to time t (closed form).

    Component j becomes N(sqrt(alpha_bar) mean_j, (alpha_bar var_j
    + 1 - alpha_bar) I); weights are unchanged.  t = 0 returns an equal
    prior; the kernel composes multiplicatively in alpha_bar.
    """
    ab = schedule.alpha_bar(t)
    return GaussianMixturePrior(
        weights=prior.weights,
        means=math.sqrt(ab) * prior.means,
        variances=ab * prior.variances + (1.0 - ab),
    )


def sample_prior(prior: GaussianMixturePrior, count: int, seed: int) -> np.ndarray:
    """Draw count i.i.d. samples: component index, then a Gaussian draw."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.choice(prior.components, size=count, p=prior.weights)
    eps = rng.standard_normal((count, prior.dim))
    return prior.means[idx] + np.sqrt(prior.variances[idx])[:, None] * eps
