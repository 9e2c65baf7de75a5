"""Closed-form inversion landscape in polar coordinates.

The squared-error loss of inverting a deep random expansive ReLU generator
concentrates, as layer widths grow, around a rotationally symmetric function
of (r, theta) = (norm of the iterate, angle to the target z*).  This module
implements that limiting landscape exactly:

* the one-step angle map g(theta) = arccos(((pi-theta) cos(theta)
  + sin(theta)) / pi) and its d-fold composition theta_d with first and
  second derivatives,
* the idealized loss L(r, theta) = r^2/2 - r cos(theta_d) + 1/2 with
  gradient, polar Hessian coefficients and Laplacian,
* a piecewise-quadratic smooth step and the smoothed loss that replaces L
  by a constant bump xi near the origin,
* the drift potential V = Lhat - lambda cos(theta) step(r) 1(theta >= pi/2)
  and its chain generator script_LV = lap(V) - beta <grad Lhat, grad V>.

All scalar values are reported in units where ||z*|| = 1 (inputs are
rescaled internally).  Vector outputs are true ambient derivatives of the
reported scalar fields, so central finite differences agree for any
||z*||.  Every operation broadcasts over leading axes of ``x`` / ``theta``
and is a pure function: safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "THETA_SWITCH",
    "PolarFrame",
    "ThetaChain",
    "SmoothStepParams",
    "ModifiedLossParams",
    "dyn_g",
    "theta_chain",
    "polar_frame",
    "saddle_radius",
    "ideal_loss",
    "ideal_gradient",
    "ideal_hessian",
    "hessian_vector_product",
    "smooth_step",
    "modified_loss",
    "potential",
]

# Below this angular distance from an endpoint the raw arccos formula is
# evaluated as a frozen Taylor series instead (the raw form is 0/0 at the
# endpoints and loses half the mantissa well before reaching them).
THETA_SWITCH = 1e-4

# Series coefficients of g(t) = t (1 + C1 t + C2 t^2 + C3 t^3 + C4 t^4)
# near t = 0; exact closed forms, truncation error < 1e-18 at the switch.
_C1 = -1.0 / (3.0 * math.pi)
_C2 = -1.0 / (18.0 * math.pi**2)
_C3 = -1.0 / (45.0 * math.pi) - 1.0 / (54.0 * math.pi**3)
_C4 = 1.0 / (90.0 * math.pi**2) - 5.0 / (648.0 * math.pi**4)


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class PolarFrame:
    """Polar decomposition of a point x relative to the target z*.

    r is the ambient norm of x, theta the angle to z* in [0, pi].
    unit_tangential is None exactly when theta is an endpoint (the
    tangential direction is then undefined); r * unit_radial reconstructs x.
    """

    r: float
    theta: float
    unit_radial: np.ndarray
    unit_tangential: np.ndarray | None

    @property
    def tangential_defined(self) -> bool:
        return self.unit_tangential is not None


@dataclass(frozen=True)
class ThetaChain:
    """d-fold composition of the angle map with its theta-derivatives.

    theta_d = g^(d)(theta); theta_d_prime is the product of g' along the
    orbit (stays in [0, 1]); theta_d_double_prime <= 0 by concavity of g.
    Fields are scalars or arrays matching the input shape.
    """

    theta_d: float | np.ndarray
    theta_d_prime: float | np.ndarray
    theta_d_double_prime: float | np.ndarray
    depth: int


@dataclass(frozen=True)
class SmoothStepParams:
    """Knots of the piecewise-quadratic step: 0 on [0,a], 1 on [b,inf)."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a >= 0.0 and math.isfinite(self.a)):
            raise ValueError(f"smooth step requires a >= 0, got a={self.a}")
        if not (self.b > self.a and math.isfinite(self.b)):
            raise ValueError(f"smooth step requires b > a, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class ModifiedLossParams:
    """Parameters of the smoothed loss and the drift potential.

    r0 is the outer radius of the origin bump (default cos(g^(d)(pi))/2,
    half the saddle radius); xi the bump height; lam the weight of the
    angular escape term; beta the inverse temperature used by script_LV.
    """

    r0: float
    xi: float = 10.0
    lam: float = 0.1
    beta: float = 1.0

    def __post_init__(self):
        if not (self.r0 > 0 and self.xi > 0 and self.lam > 0 and self.beta > 0):
            raise ValueError(
                "ModifiedLossParams requires r0, xi, lam, beta all positive"
            )

    @classmethod
    def for_depth(cls, d: int, xi: float = 10.0, lam: float = 0.1,
                  beta: float = 1.0) -> "ModifiedLossParams":
        return cls(r0=saddle_radius(d) / 2.0, xi=xi, lam=lam, beta=beta)


# ---------------------------------------------------------------------------
# angle map


def _as_angle_array(theta):
    th = np.asarray(theta, dtype=float)
    scalar = th.ndim == 0
    if not np.all(np.isfinite(th)):
        raise ValueError("angle must be finite")
    if np.any(th < 0.0) or np.any(th > math.pi):
        raise ValueError("angle outside the domain [0, pi]")
    return th, scalar


def _g_core(th: np.ndarray):
    """g, g', g'' on [0, pi]; series branches inside THETA_SWITCH of 0/pi."""
    g = np.empty_like(th)
    gp = np.empty_like(th)
    gpp = np.empty_like(th)

    lo = th < THETA_SWITCH
    hi = (math.pi - th) < THETA_SWITCH
    mid = ~(lo | hi)

    if np.any(mid):
        t = th[mid]
        ct = np.cos(t)
        st = np.sin(t)
        u = ((math.pi - t) * ct + st) / math.pi
        up = -(math.pi - t) * st / math.pi
        upp = (st - (math.pi - t) * ct) / math.pi
        one_m_u2 = 1.0 - u * u
        den = np.sqrt(one_m_u2)
        g[mid] = np.arccos(u)
        gp[mid] = -up / den
        gpp[mid] = -(upp * one_m_u2 + u * up * up) / (one_m_u2 * den)

    if np.any(lo):
        t = th[lo]
        g[lo] = t * (1.0 + t * (_C1 + t * (_C2 + t * (_C3 + t * _C4))))
        gp[lo] = 1.0 + t * (2 * _C1 + t * (3 * _C2 + t * (4 * _C3 + t * (5 * _C4))))
        gpp[lo] = 2 * _C1 + t * (6 * _C2 + t * (12 * _C3 + t * (20 * _C4)))

    if np.any(hi):
        e = math.pi - th[hi]
        e2 = e * e
        u = e * e2 * (1.0 / 3.0 - e2 / 30.0 + e2 * e2 / 840.0) / math.pi
        g[hi] = math.pi / 2.0 - np.arcsin(u)
        gp[hi] = e2 * (1.0 - e2 / 6.0 + e2 * e2 / 120.0) / math.pi
        gpp[hi] = -e * (2.0 - 2.0 * e2 / 3.0 + e2 * e2 / 20.0) / math.pi

    return g, gp, gpp


def dyn_g(theta):
    """One step of the angle dynamical system.

    Returns (g, g_prime, g_second) with g = arccos(((pi-theta) cos(theta)
    + sin(theta)) / pi).  g is increasing with g(theta) <= theta,
    g' in [0, 1], g'' <= 0; endpoints are evaluated by series expansion.
    Accepts a scalar or an array of angles in [0, pi].
    """
    th, scalar = _as_angle_array(theta)
    g, gp, gpp = _g_core(np.atleast_1d(th))
    if scalar:
        return float(g[0]), float(gp[0]), float(gpp[0])
    return g, gp, gpp


def theta_chain(theta, d: int) -> ThetaChain:
    """Iterate the angle map d times, tracking first and second derivatives.

    Uses the recurrences T <- g(T), P <- g'(T) P, S <- g''(T) P^2 + g'(T) S,
    which keep P in [0, 1] and S <= 0 exactly (no cancelling divisions).
    d = 0 returns the identity chain.
    """
    if not isinstance(d, (int, np.integer)):
        raise TypeError("depth must be an integer")
    if d < 0:
        raise ValueError("depth must be nonnegative")
    th, scalar = _as_angle_array(theta)
    T = np.atleast_1d(th).copy()
    P = np.ones_like(T)
    S = np.zeros_like(T)
    for _ in range(int(d)):
        g, gp, gpp = _g_core(T)
        S = gpp * P * P + gp * S
        P = gp * P
        T = g
    if scalar:
        return ThetaChain(float(T[0]), float(P[0]), float(S[0]), int(d))
    return ThetaChain(T, P, S, int(d))


_SADDLE_CACHE: dict[int, float] = {}


def saddle_radius(d: int) -> float:
    """cos(g^(d)(pi)): the distance from the origin to the saddle -A z*."""
    d = int(d)
    if d not in _SADDLE_CACHE:
        _SADDLE_CACHE[d] = math.cos(theta_chain(math.pi, d).theta_d)
    return _SADDLE_CACHE[d]


# ---------------------------------------------------------------------------
# polar frame


def _check_z_star(z_star) -> tuple[np.ndarray, float]:
    z = np.asarray(z_star, dtype=float)
    if z.ndim != 1:
        raise ValueError("z_star must be a 1-D vector")
    s = float(np.linalg.norm(z))
    if not (s > 0.0 and np.all(np.isfinite(z))):
        raise ValueError("z_star must be a finite nonzero vector")
    return z, s


def _polar_parts(x, z_star):
    """Broadcast helper: canonical radius, angle and the radial frame.

    Returns (x, scale, r, theta, rhat, zhat) where r = ||x|| / ||z*||,
    theta = atan2(||x_perp||, <x, zhat>) (stable at both endpoints), and
    rhat is x / ||x|| (zero vector where x = 0).
    """
    z, s = _check_z_star(z_star)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != z.shape[0]:
        raise ValueError(
            f"x has last dimension {x.shape[-1]}, z_star has {z.shape[0]}"
        )
    zhat = z / s
    proj = x @ zhat
    perp = x - proj[..., None] * zhat
    pn = np.linalg.norm(perp, axis=-1)
    theta = np.arctan2(pn, proj)
    r_amb = np.linalg.norm(x, axis=-1)
    safe = np.where(r_amb > 0.0, r_amb, 1.0)
    rhat = x / safe[..., None]
    return x, s, r_amb / s, theta, rhat, zhat


def polar_frame(x, z_star) -> PolarFrame:
    """Decompose a nonzero point into (r, theta, rhat, thetahat) w.r.t. z*.

    The tangential unit vector (cos(theta) rhat - zhat) / sin(theta) is
    undefined on the z* axis; it is returned as None when sin(theta) < 1e-8.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("polar_frame expects a single vector")
    if not np.any(x):
        raise ValueError("polar frame undefined at x = 0")
    _, s, r_canon, theta, rhat, zhat = _polar_parts(x, z_star)
    theta = float(theta)
    st = math.sin(theta)
    if st >= 1e-8:
        that = (math.cos(theta) * rhat - zhat) / st
    else:
        that = None
    return PolarFrame(r=float(r_canon) * s, theta=theta,
                      unit_radial=rhat, unit_tangential=that)


# ---------------------------------------------------------------------------
# idealized loss


def _tangential_ratio(theta, chain: ThetaChain):
    """sin(theta_d) theta_d' / sin(theta) with its analytic endpoint limits.

    This is the coefficient of (cos(theta) rhat - zhat) in the gradient; it
    tends to theta_d'^2 as theta -> 0 and to 0 as theta -> pi.
    """
    st = np.sin(theta)
    num = np.sin(chain.theta_d) * chain.theta_d_prime
    safe = np.where(st > 0.0, st, 1.0)
    limit = chain.theta_d_prime * chain.theta_d_prime
    return np.where(st > 0.0, num / safe, limit)


def ideal_loss(x, z_star, d: int):
    """Idealized inversion loss L = r^2/2 - r cos(theta_d) + 1/2.

    r and the value are in units of ||z*||: L(z*) = 0, L(0) = 1/2.
    Broadcasts over leading axes of x.
    """
    x, _, r, theta, _, _ = _polar_parts(x, z_star)
    c = theta_chain(theta, d)
    val = 0.5 * r * r - r * np.cos(c.theta_d) + 0.5
    return float(val) if x.ndim == 1 else val


def ideal_gradient(x, z_star, d: int):
    """Ambient gradient of ideal_loss.

    Equals ((r - cos(theta_d)) rhat + sin(theta_d) theta_d' thetahat)
    / ||z*||, assembled directly from x and z* without rotations; the
    tangential term vanishes analytically at theta in {0, pi}, and the
    zero vector is returned at x = 0 (subgradient convention).
    """
    x, s, r, theta, rhat, zhat = _polar_parts(x, z_star)
    c = theta_chain(theta, d)
    ratio = _tangential_ratio(theta, c)
    coef_r = (r - np.cos(c.theta_d)) + ratio * np.cos(theta)
    grad = (coef_r[..., None] * rhat - ratio[..., None] * zhat) / s
    return np.where((r > 0.0)[..., None], grad, 0.0)


def _hessian_coeffs(r, theta, d: int):
    """Canonical polar Hessian coefficients of L at radius r > 0.

    Returns (c_rr, c_tt, c_rt, c_psi): the Hessian in an orthonormal basis
    (rhat, thetahat, psi_1..psi_{n-2}) is [[c_rr, c_rt], [c_rt, c_tt]] on
    the first block and c_psi I on the complement.  c_rt = L_rtheta/r
    - L_theta/r^2 vanishes identically for this loss (L_rtheta = L_theta/r);
    it is kept for the general polar form used by the potential.
    """
    c = theta_chain(theta, d)
    cos_td = np.cos(c.theta_d)
    sin_td = np.sin(c.theta_d)
    P = c.theta_d_prime
    S = c.theta_d_double_prime
    ratio = _tangential_ratio(theta, c)
    c_rr = np.ones_like(r)
    c_tt = (r - cos_td + cos_td * P * P + sin_td * S) / r
    c_rt = np.zeros_like(r)
    c_psi = (r - cos_td) / r + ratio * np.cos(theta) / r
    return c_rr, c_tt, c_rt, c_psi


def ideal_hessian(x, z_star, d: int, n: int):
    """Polar Hessian coefficients and Laplacian of ideal_loss at x != 0.

    Returns (c_rr, c_tt, c_rt, c_psi, laplacian) with laplacian
    = c_rr + c_tt + (n-2) c_psi; n is the ambient dimension (multiplicity
    of the psi block).  Coefficients are ambient second derivatives, i.e.
    the canonical values divided by ||z*||^2.
    """
    x, s, r, theta, _, _ = _polar_parts(x, z_star)
    if np.any(r == 0.0):
        raise ValueError("Hessian undefined at x = 0")
    c_rr, c_tt, c_rt, c_psi = _hessian_coeffs(r, theta, d)
    s2 = s * s
    c_rr, c_tt, c_rt, c_psi = c_rr / s2, c_tt / s2, c_rt / s2, c_psi / s2
    lap = c_rr + c_tt + (n - 2) * c_psi
    if x.ndim == 1:
        return (float(c_rr), float(c_tt), float(c_rt), float(c_psi), float(lap))
    return c_rr, c_tt, c_rt, c_psi, lap


def hessian_vector_product(x, z_star, d: int, v):
    """Apply the Hessian of ideal_loss at x to a vector v.

    Assembled from the polar coefficients and the frame; on the z* axis
    (tangential direction undefined) the tangential and psi coefficients
    coincide analytically and the axis-symmetric form is used.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or v.shape != x.shape:
        raise ValueError("x and v must be vectors of equal length")
    n = x.shape[0]
    c_rr, c_tt, c_rt, c_psi, _ = ideal_hessian(x, z_star, d, n)
    frame = polar_frame(x, z_star)
    rhat = frame.unit_radial
    vr = float(v @ rhat)
    if frame.tangential_defined:
        that = frame.unit_tangential
        vt = float(v @ that)
        rest = v - vr * rhat - vt * that
        return (c_rr * vr + c_rt * vt) * rhat \
            + (c_rt * vr + c_tt * vt) * that + c_psi * rest
    rest = v - vr * rhat
    return c_rr * vr * rhat + c_psi * rest


# ---------------------------------------------------------------------------
# smooth step, smoothed loss, potential


def _step_parts(a: float, b: float, r: np.ndarray):
    """(h, h_r, h_rr) of the piecewise-quadratic step; knots take the value
    of the closed-left piece."""
    inv = 1.0 / ((b - a) * (b - a))
    mid = 0.5 * (a + b)
    h = np.empty_like(r)
    h_r = np.empty_like(r)
    h_rr = np.empty_like(r)

    m1 = r <= a
    m2 = (r > a) & (r <= mid)
    m3 = (r > mid) & (r < b)
    m4 = r >= b

    h[m1] = 0.0
    h_r[m1] = 0.0
    h_rr[m1] = 0.0

    t = r[m2] - a
    h[m2] = 2.0 * t * t * inv
    h_r[m2] = 4.0 * t * inv
    h_rr[m2] = 4.0 * inv

    t = b - r[m3]
    h[m3] = 1.0 - 2.0 * t * t * inv
    h_r[m3] = 4.0 * t * inv
    h_rr[m3] = -4.0 * inv

    h[m4] = 1.0
    h_r[m4] = 0.0
    h_rr[m4] = 0.0
    return h, h_r, h_rr


def smooth_step(params: SmoothStepParams, r):
    """Evaluate the step and its first two radial derivatives at r >= 0.

    h rises from 0 at a to 1 at b through two quadratic arcs meeting at
    ((a+b)/2, 1/2); h and h_r are continuous, h_rr jumps at the knots.
    """
    rr = np.asarray(r, dtype=float)
    scalar = rr.ndim == 0
    if np.any(rr < 0.0):
        raise ValueError("smooth_step requires r >= 0")
    h, h_r, h_rr = _step_parts(params.a, params.b, np.atleast_1d(rr))
    if scalar:
        return float(h[0]), float(h_r[0]), float(h_rr[0])
    return h, h_r, h_rr


def _modified_parts(r, theta, d: int, params: ModifiedLossParams):
    """Value and polar derivatives of the smoothed loss Lhat at canonical r.

    Lhat = L h1 + xi (1 - h2) with h1 = step(r0/3, 2 r0/3), h2 = step(0, r0).
    Second radial derivative uses the full product rule
    Lhat_rr = L_rr h1 + 2 L_r h1_r + L h1_rr - xi h2_rr.
    """
    r0 = params.r0
    c = theta_chain(theta, d)
    cos_td = np.cos(c.theta_d)
    sin_td = np.sin(c.theta_d)
    P = c.theta_d_prime
    S = c.theta_d_double_prime
    ratio = _tangential_ratio(theta, c)

    L = 0.5 * r * r - r * cos_td + 0.5
    L_r = r - cos_td
    L_t = r * sin_td * P          # dL/dtheta
    h1, h1_r, h1_rr = _step_parts(r0 / 3.0, 2.0 * r0 / 3.0, r)
    h2, h2_r, h2_rr = _step_parts(0.0, r0, r)

    val = L * h1 + params.xi * (1.0 - h2)
    Lhat_r = L_r * h1 + L * h1_r - params.xi * h2_r
    Lhat_t = L_t * h1
    Lhat_rr = h1 + 2.0 * L_r * h1_r + L * h1_rr - params.xi * h2_rr  # L_rr = 1
    Lhat_tt = (r * cos_td * P * P + r * sin_td * S) * h1
    Lhat_rt = sin_td * P * h1 + L_t * h1_r
    # tangential gradient coefficient Lhat_t / r and the cot-term
    # Lhat_t cos(theta) / (r^2 sin(theta)), both with endpoint limits
    tang = h1 * ratio * np.sin(theta)        # = Lhat_t / r
    q = h1 * ratio * np.cos(theta)           # = Lhat_t cos / (r sin) / r * r
    return {
        "chain": c, "L": L, "L_r": L_r,
        "h1": h1, "h1_r": h1_r, "h2": h2, "h2_r": h2_r, "h2_rr": h2_rr,
        "val": val, "Lhat_r": Lhat_r, "Lhat_t": Lhat_t,
        "Lhat_rr": Lhat_rr, "Lhat_tt": Lhat_tt, "Lhat_rt": Lhat_rt,
        "tang": tang, "q": q,
    }


def modified_loss(x, z_star, d: int, params: ModifiedLossParams):
    """Smoothed loss: equals ideal_loss for r >= r0, flattens to xi at 0.

    Returns (value, gradient).  For r >= r0 both outputs reproduce
    ideal_loss / ideal_gradient exactly (the step factors are exactly 1/0
    there); at x = 0 the value is xi and the gradient the zero vector.
    """
    x, s, r, theta, rhat, zhat = _polar_parts(x, z_star)
    squeeze = x.ndim == 1
    r = np.atleast_1d(r)
    theta = np.atleast_1d(theta)
    rhat = np.atleast_2d(rhat)
    p = _modified_parts(r, theta, d, params)
    ratio_h = p["h1"] * _tangential_ratio(theta, p["chain"])
    coef_r = p["Lhat_r"] + ratio_h * np.cos(theta)
    grad = (coef_r[..., None] * rhat - ratio_h[..., None] * zhat) / s
    grad = np.where((r > 0.0)[..., None], grad, 0.0)
    if squeeze:
        return float(p["val"][0]), grad[0]
    return p["val"], grad


def potential(x, z_star, d: int, params: ModifiedLossParams):
    """Drift potential V and its chain generator.

    V = Lhat - lam cos(theta) step(r0, 3 r0/2)(r) on theta >= pi/2 and
    V = Lhat otherwise.  Returns (V, grad_V, script_LV) where
    script_LV = lap(V) - beta <grad Lhat, grad V> with beta from params;
    the angular term makes script_LV strictly negative near the saddle.
    Scalar fields broadcast; x = 0 is handled by the analytic limits.
    """
    x, s, r, theta, rhat, zhat = _polar_parts(x, z_star)
    squeeze = x.ndim == 1
    r = np.atleast_1d(r)
    theta = np.atleast_1d(theta)
    rhat = np.atleast_2d(rhat)
    n = x.shape[-1]
    lam = params.lam

    p = _modified_parts(r, theta, d, params)
    h3, h3_r, h3_rr = _step_parts(params.r0, 1.5 * params.r0, r)
    on = theta >= math.pi / 2.0
    ind = np.where(on, 1.0, 0.0)
    ct = np.cos(theta)
    st = np.sin(theta)

    V = p["val"] - lam * ct * h3 * ind

    # polar gradient components; the angular-term tangential part is
    # (lam h3 / r)(cos rhat - zhat), free of sin division
    pos = r > 0.0
    rsafe = np.where(pos, r, 1.0)
    W_r = -lam * ct * h3_r * ind
    w_tan = lam * h3 / rsafe * ind            # W_theta / (r sin(theta))
    ratio_h = p["h1"] * _tangential_ratio(theta, p["chain"])
    coef_r = p["Lhat_r"] + W_r + (ratio_h + w_tan) * ct
    coef_z = ratio_h + w_tan
    grad_V = (coef_r[..., None] * rhat - coef_z[..., None] * zhat) / s
    grad_V = np.where(pos[..., None], grad_V, 0.0)

    # Laplacians; near the origin Lhat is the smooth quadratic
    # xi (1 - 2 r^2 / r0^2), so at r = 0 the Laplacian is -4 n xi / r0^2
    # (the piecewise knot convention would wrongly report 0 there)
    Lhat_r_over_r = np.where(pos, p["Lhat_r"] / rsafe, 0.0)
    lap_Lhat = p["Lhat_rr"] + Lhat_r_over_r \
        + np.where(pos, p["Lhat_tt"] / (rsafe * rsafe), 0.0) \
        + (n - 2) * (Lhat_r_over_r + np.where(pos, p["q"] / rsafe, 0.0))
    lap_Lhat = np.where(pos, lap_Lhat,
                        -4.0 * n * params.xi / (params.r0 * params.r0))
    lap_W = (-lam * ct * (h3_rr + (n - 1) * h3_r / rsafe)
             + (n - 1) * lam * ct * h3 / (rsafe * rsafe)) * ind
    lap_W = np.where(pos, lap_W, 0.0)         # h3 vanishes near the origin

    # <grad Lhat, grad V> in polar components
    V_r = p["Lhat_r"] + W_r
    V_tan = ratio_h * st + w_tan * st         # V_theta / r
    L_tan = ratio_h * st
    inner = p["Lhat_r"] * V_r + L_tan * V_tan

    script_LV = (lap_Lhat + lap_W - params.beta * inner) / (s * s)
    if squeeze:
        return float(V[0]), grad_V[0], float(script_LV[0])
    return V, grad_V, script_LV
