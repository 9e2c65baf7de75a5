"""Reconstruction and sampling algorithms on latent landscapes.

One update rule underlies everything here: z <- z - eta grad U(z)
+ sqrt(2 eta / beta) u with u ~ N(0, I), the unadjusted Langevin chain
targeting exp(-beta U).  Variants: plain / sign-negation gradient descent
(beta = inf), l1-projected intermediate-layer descent (the classical
sparse-deviations baseline), posterior SGLD on an intermediate latent with
an exact mixture score, annealed reverse sampling from a VP-noised prior
(hot start), and synchronously coupled chain pairs sharing their noise.

Potential oracles are callables z -> (U(z), grad U(z)), read-only and
reentrant; every sampler is a deterministic function of (arguments, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generator import InverseProblem, ReluGenerator, empirical_loss_grad, \
    forward, split_forward
from .priors import GaussianMixturePrior, VpSchedule, \
    gmm_log_density_and_score, sample_prior, vp_noised

__all__ = [
    "LangevinConfig",
    "Trajectory",
    "EnsembleRun",
    "L1ProjectionSpec",
    "run_langevin",
    "run_langevin_ensemble",
    "run_gd",
    "project_l1",
    "run_ilo_baseline",
    "posterior_sgld",
    "hot_start_reverse",
    "coupled_pair",
]


@dataclass(frozen=True)
class LangevinConfig:
    """Step size, inverse temperature, horizon, seed, recording stride."""

    eta: float
    beta: float
    steps: int
    seed: int
    record_every: int = 1

    def __post_init__(self):
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not (self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.steps < 1 or self.record_every < 1:
            raise ValueError("steps and record_every must be >= 1")

    @property
    def sigma_step(self) -> float:
        return math.sqrt(2.0 * self.eta / self.beta)


@dataclass(frozen=True)
class Trajectory:
    """Recorded chain states with potentials and negation flags.

    accepted_meta[i] is True when a sign negation was applied in the
    recording interval ending at states[i]; step_indices maps records to
    chain steps; aborted_at is the step of the first non-finite gradient
    (records stop just before it) or None.
    """

    states: np.ndarray
    losses: np.ndarray
    accepted_meta: np.ndarray
    step_indices: np.ndarray
    aborted_at: int | None = None

    def __post_init__(self):
        k = len(self.states)
        if not (len(self.losses) == len(self.accepted_meta)
                == len(self.step_indices) == k):
            raise ValueError("trajectory record arrays must share length")
        if not np.all(np.isfinite(self.states)):
            raise ValueError("trajectory states must be finite")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class EnsembleRun:
    """Recorded history of many independent chains advanced in lockstep.

    states has shape (records, chains, dim); losses (records, chains).
    """

    states: np.ndarray
    losses: np.ndarray
    step_indices: np.ndarray

    def snapshot(self, step: int) -> np.ndarray:
        """States (chains, dim) recorded at an exact chain step."""
        hits = np.nonzero(self.step_indices == step)[0]
        if len(hits) == 0:
            raise KeyError(f"step {step} was not recorded")
        return self.states[hits[0]]

    def chain(self, c: int) -> Trajectory:
        """View one chain's records as a Trajectory."""
        k = len(self.step_indices)
        return Trajectory(states=self.states[:, c], losses=self.losses[:, c],
                          accepted_meta=np.zeros(k, dtype=bool),
                          step_indices=self.step_indices)


@dataclass(frozen=True)
class L1ProjectionSpec:
    """l1 ball {x : ||x - center||_1 <= radius}; radius may be inf."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        if not self.radius >= 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")


class _Recorder:
    def __init__(self, steps: int, record_every: int):
        self.every = record_every
        self.last = steps
        self.states, self.losses, self.meta, self.idx = [], [], [], []

    def want(self, step: int) -> bool:
        return step % self.every == 0 or step == self.last

    def add(self, step, z, u, flipped=False):
        self.states.append(np.array(z))
        self.losses.append(float(u))
        self.meta.append(bool(flipped))
        self.idx.append(int(step))

    def done(self, aborted_at=None) -> Trajectory:
        return Trajectory(states=np.array(self.states),
                          losses=np.array(self.losses),
                          accepted_meta=np.array(self.meta, dtype=bool),
                          step_indices=np.array(self.idx, dtype=int),
                          aborted_at=aborted_at)


def run_langevin(potential_grad, z0, cfg: LangevinConfig) -> Trajectory:
    """Unadjusted Langevin chain z <- z - eta grad U + sqrt(2 eta/beta) u.

    Records every record_every steps (always step 0 and the final step).
    A non-finite potential or gradient aborts the chain; the trajectory
    then ends at the last finite state and aborted_at gives the step.
    """
    rng = np.random.default_rng(cfg.seed)
    z = np.array(z0, dtype=float)
    sigma = cfg.sigma_step
    rec = _Recorder(cfg.steps, cfg.record_every)
    u_val, g = potential_grad(z)
    rec.add(0, z, u_val)
    for step in range(1, cfg.steps + 1):
        if not (np.isfinite(u_val) and np.all(np.isfinite(g))):
            return rec.done(aborted_at=step - 1)
        z = z - cfg.eta * g + sigma * rng.standard_normal(z.shape)
        u_val, g = potential_grad(z)
        if rec.want(step):
            if not (np.isfinite(u_val) and np.all(np.isfinite(z))):
                return rec.done(aborted_at=step)
            rec.add(step, z, u_val)
    return rec.done()


def run_langevin_ensemble(potential_grad, z0: np.ndarray,
                          cfg: LangevinConfig) -> EnsembleRun:
    """Advance (chains, dim) independent Langevin chains in lockstep.

    The potential oracle must accept batched states.  One RNG stream
    drives all chains (a (chains, dim) draw per step), so the run is
    deterministic for a fixed seed but chains are not individually
    seed-stable under ensemble resizing.
    """
    rng = np.random.default_rng(cfg.seed)
    Z = np.array(z0, dtype=float)
    if Z.ndim != 2:
        raise ValueError("ensemble start must have shape (chains, dim)")
    sigma = cfg.sigma_step
    states, losses, idx = [], [], []
    U, G = potential_grad(Z)
    states.append(Z.copy()); losses.append(np.asarray(U, dtype=float).copy())
    idx.append(0)
    for step in range(1, cfg.steps + 1):
        Z = Z - cfg.eta * G + sigma * rng.standard_normal(Z.shape)
        U, G = potential_grad(Z)
        if step % cfg.record_every == 0 or step == cfg.steps:
            states.append(Z.copy())
            losses.append(np.asarray(U, dtype=float).copy())
            idx.append(step)
    return EnsembleRun(states=np.array(states), losses=np.array(losses),
                       step_indices=np.array(idx, dtype=int))


def run_gd(potential_grad, z0, eta: float, steps: int,
           negation: bool = False, record_every: int = 1) -> Trajectory:
    """Gradient descent, optionally with the sign-negation heuristic.

    With negation on, after each step z is replaced by -z iff
    U(-z) < U(z) strictly, so the recorded potential never increases due
    to a flip.  Ties keep the current iterate.
    """
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    z = np.array(z0, dtype=float)
    rec = _Recorder(steps, record_every)
    u_val, g = potential_grad(z)
    rec.add(0, z, u_val)
    flipped_since = False
    for step in range(1, steps + 1):
        if not (np.isfinite(u_val) and np.all(np.isfinite(g))):
            return rec.done(aborted_at=step - 1)
        z = z - eta * g
        u_val, g = potential_grad(z)
        if negation:
            u_neg, g_neg = potential_grad(-z)
            if u_neg < u_val:
                z, u_val, g = -z, u_neg, g_neg
                flipped_since = True
        if rec.want(step):
            if not np.all(np.isfinite(z)):
                return rec.done(aborted_at=step)
            rec.add(step, z, u_val, flipped=flipped_since)
            flipped_since = False
    return rec.done()


def project_l1(v, spec: L1ProjectionSpec) -> np.ndarray:
    """Euclidean projection onto the l1 ball ||x - center||_1 <= radius.

    Sort-and-threshold soft shrinkage: exact, O(p log p).  Points already
    inside are returned unchanged.
    """
    v = np.asarray(v, dtype=float)
    w = v - spec.center
    a = np.abs(w)
    if a.sum() <= spec.radius:
        return v.copy()
    if spec.radius == 0.0:
        return spec.center.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u) - spec.radius
    j = np.arange(1, len(u) + 1)
    rho = int(np.nonzero(u > css / j)[0][-1])
    tau = css[rho] / (rho + 1.0)
    return spec.center + np.sign(w) * np.maximum(a - tau, 0.0)


def run_ilo_baseline(problem: InverseProblem, split_layer: int, radius: float,
                     eta: float, steps: int, z0=None, seed: int = 0) -> Trajectory:
    """Projected GD on an intermediate layer (the l1 sparse-deviations
    baseline).

    The generator splits as G = G2 o G1 at split_layer; the optimization
    variable is w in R^{n_split}, initialized at the range point G1(z0)
    and projected after every step onto the l1 ball of the given radius
    around that point.  z0 defaults to a seeded standard normal latent.
    States in the returned trajectory are intermediate iterates w.
    """
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    G = problem.generator
    if G is None:
        raise ValueError("problem has no generator attached")
    G1, G2 = split_forward(G, split_layer)
    if z0 is None:
        z0 = np.random.default_rng((seed, 0)).standard_normal(G.latent_dim)
    w0 = forward(G1, np.asarray(z0, dtype=float))[0]
    ball = L1ProjectionSpec(center=w0, radius=radius)
    sub = InverseProblem(generator=G2, map=problem.map, y=problem.y,
                         noise_sigma=problem.noise_sigma, mask=problem.mask)
    w = w0
    rec = _Recorder(steps, 1)
    u_val, g = empirical_loss_grad(sub, w)
    rec.add(0, w, u_val)
    for step in range(1, steps + 1):
        w = project_l1(w - eta * g, ball)
        u_val, g = empirical_loss_grad(sub, w)
        rec.add(step, w, u_val)
    return rec.done()


def _tail_map(G2, p: int):
    """Normalize the tail map to (apply, pullback, input_dim) closures.

    G2 may be None (identity), a matrix, or a ReluGenerator.
    """
    if G2 is None:
        return (lambda w: (w, None)), (lambda w, aux, v: v), p
    if isinstance(G2, np.ndarray):
        M = np.asarray(G2, dtype=float)
        return (lambda w: (w @ M.T, None)), (lambda w, aux, v: v @ M), M.shape[1]
    if isinstance(G2, ReluGenerator):
        def apply(w):
            out, masks = forward(G2, w)
            return out, masks

        def pullback(w, masks, v):
            for wt, m in zip(reversed(G2.weights), reversed(masks)):
                v = G2.scale * (np.where(m, v, 0.0) @ wt)
            return v

        return apply, pullback, G2.latent_dim
    raise TypeError(f"unsupported tail generator type {type(G2).__name__}")


def posterior_sgld(problem: InverseProblem, prior: GaussianMixturePrior,
                   G2, cfg: LangevinConfig, likelihood_weight: float = 1.0,
                   z0=None) -> Trajectory:
    """Langevin on the posterior potential of an intermediate latent.

    U(w) = lw ||A G2(w) - y||^2 / (2 sigma^2) - log p(w), targeting the
    posterior exp(-U) at beta = 1.  G2 is None (identity), a linear map,
    or a ReluGenerator; lw = 0 reduces to sampling the prior.  The chain
    starts at z0 or, by default, at a prior draw seeded from cfg.seed.
    """
    if problem.noise_sigma <= 0:
        raise ValueError("posterior sampling requires noise_sigma > 0")
    apply, pullback, p = _tail_map(G2, prior.dim)
    if p != prior.dim:
        raise ValueError("tail generator input dim differs from prior dim")
    inv_s2 = likelihood_weight / (problem.noise_sigma ** 2)

    def potential(w):
        out, aux = apply(w)
        residual = problem.map.apply(out) - problem.y
        if problem.mask is not None:
            residual = np.where(problem.mask, residual, 0.0)
        logp, score = gmm_log_density_and_score(prior, w)
        u = 0.5 * inv_s2 * np.sum(residual * residual, axis=-1) - logp
        g = inv_s2 * pullback(w, aux, problem.map.apply_transpose(residual)) \
            - score
        return u, g

    if z0 is None:
        z0 = sample_prior(prior, 1, seed=np.random.default_rng(
            (cfg.seed, 1)).integers(2**63))[0]
    return run_langevin(potential, z0, cfg)


def hot_start_reverse(z0, t: float, prior: GaussianMixturePrior,
                      schedule: VpSchedule, cfg: LangevinConfig,
                      levels: int = 32) -> np.ndarray:
    """Noise z0 forward to time t, then anneal back with exact scores.

    Forward: z_t = sqrt(alpha_bar) z0 + sqrt(1 - alpha_bar) eps (closed
    form).  Reverse: Langevin targeting the noised prior on a geometric
    grid of times from t down to 0, with the step size scaled to each
    level's smallest component variance and cfg.steps split evenly across
    levels (defaults match a ~300-evaluation budget).  t = 0 returns z0
    unchanged; batched z0 of shape (..., p) runs independent repeats.
    """
    z0 = np.asarray(z0, dtype=float)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t == 0.0:
        return z0.copy()
    rng = np.random.default_rng(cfg.seed)
    ab = schedule.alpha_bar(t)
    z = math.sqrt(ab) * z0 + math.sqrt(1.0 - ab) * rng.standard_normal(z0.shape)

    grid = np.concatenate([
        np.geomspace(t, max(t * 1e-3, 1e-6), max(1, levels - 1)), [0.0]])
    steps_per = max(1, round(cfg.steps / levels))
    v_first = None
    for t_i in grid:
        noised = vp_noised(prior, float(t_i), schedule)
        v_i = float(np.min(noised.variances))
        if v_first is None:
            v_first = v_i
        eta_i = cfg.eta * v_i / v_first
        sigma_i = math.sqrt(2.0 * eta_i / cfg.beta)
        for _ in range(steps_per):
            _, score = gmm_log_density_and_score(noised, z)
            z = z + eta_i * score + sigma_i * rng.standard_normal(z.shape)
    return z


def coupled_pair(potential_grad, z0_a, z0_b,
                 cfg: LangevinConfig) -> tuple[Trajectory, Trajectory]:
    """Two Langevin chains driven by identical Gaussian increments.

    The noise cancels in the difference, so the pair measures the pure
    gradient-map contraction between the chains.  Equal starts give
    bitwise-identical trajectories.
    """
    rng = np.random.default_rng(cfg.seed)
    za = np.array(z0_a, dtype=float)
    zb = np.array(z0_b, dtype=float)
    if za.shape != zb.shape:
        raise ValueError("coupled starts must share a shape")
    sigma = cfg.sigma_step
    ra = _Recorder(cfg.steps, cfg.record_every)
    rb = _Recorder(cfg.steps, cfg.record_every)
    ua, ga = potential_grad(za)
    ub, gb = potential_grad(zb)
    ra.add(0, za, ua)
    rb.add(0, zb, ub)
    for step in range(1, cfg.steps + 1):
        u = sigma * rng.standard_normal(za.shape)
        za = za - cfg.eta * ga + u
        zb = zb - cfg.eta * gb + u
        ua, ga = potential_grad(za)
        ub, gb = potential_grad(zb)
        if ra.want(step):
            ra.add(step, za, ua)
            rb.add(step, zb, ub)
    return ra.done(), rb.done()
