"""Steady potential-flow shock polar and self-similar configuration geometry.

Across a straight shock the tangential velocity is continuous, the normal
mass flux is continuous, and the Bernoulli relation

    q**2/2 + (rho**(gamma-1) - 1)/(gamma-1) = B0

holds on both sides.  For a fixed supersonic upstream state these reduce to
one scalar equation per shock inclination; sweeping the inclination traces
the polar of attainable downstream velocities, whose extreme deflection is
the detachment angle and whose sonic crossing marks the sonic angle.

Also provides the uniform-state pseudo-potential of the self-similar plane,
its pseudo-sonic circle, and the stretched coordinates used near that arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar


class DetachedShockError(ValueError):
    """Requested deflection exceeds the detachment angle."""


@dataclass(frozen=True)
class UpstreamState:
    """Uniform supersonic upstream state of a steady potential flow."""

    gamma: float
    rho_inf: float
    q_inf: float

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not self.rho_inf > 0.0:
            raise ValueError(f"rho_inf must be > 0, got {self.rho_inf}")
        if not self.q_inf > 0.0:
            raise ValueError(f"q_inf must be > 0, got {self.q_inf}")
        if self.q_inf < self.sound_speed * (1.0 - 1e-12):
            raise ValueError(f"upstream must be supersonic: q_inf={self.q_inf} "
                             f"< sound speed {self.sound_speed}")

    @property
    def sound_speed(self) -> float:
        return self.rho_inf ** (0.5 * (self.gamma - 1.0))

    @property
    def B0(self) -> float:
        g = self.gamma
        return 0.5 * self.q_inf ** 2 + (self.rho_inf ** (g - 1.0) - 1.0) / (g - 1.0)


def bernoulli_density(state: UpstreamState, speed: float) -> float:
    """Density at the given flow speed on the same Bernoulli level.

    rho = (1 + (gamma-1)*(B0 - speed**2/2)) ** (1/(gamma-1)); raises on
    cavitation (speed beyond the stagnation-energy limit).
    """
    g = state.gamma
    arg = 1.0 + (g - 1.0) * (state.B0 - 0.5 * speed * speed)
    if arg <= 0.0:
        raise ValueError(f"cavitation: speed {speed} exceeds the Bernoulli bound "
                         f"{math.sqrt(2.0 * (state.B0 + 1.0 / (g - 1.0))):.6g}")
    return arg ** (1.0 / (g - 1.0))


def _normal_root(state: UpstreamState, u_n: float, v_t: float) -> float:
    """Downstream normal velocity from mass-flux continuity.

    Solves rho(sqrt(w^2 + v_t^2)) * w = rho_inf * u_n for the root w < u_n
    (the compressive, normal-subsonic branch).  The mass-flux function rises
    to its maximum where the normal component is sonic and decreases past it,
    so the bracket (0, u_n) contains exactly one root for a supersonic u_n.
    """
    m = state.rho_inf * u_n

    def f(w):
        return bernoulli_density(state, math.hypot(w, v_t)) * w - m

    hi = u_n * (1.0 - 1e-13)
    if f(hi) <= 0.0:  # vanishing-strength limit
        return u_n
    return float(brentq(f, 1e-13 * u_n, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def normal_shock(state: UpstreamState):
    """Downstream (u, rho) of the straight normal shock.

    The subsonic root of rho(u)*u = rho_inf*q_inf.  If the upstream is
    exactly sonic the shock has vanishing strength and the state is returned
    unchanged.
    """
    if state.q_inf <= state.sound_speed * (1.0 + 1e-12):
        return state.q_inf, state.rho_inf
    u = _normal_root(state, state.q_inf, 0.0)
    return u, bernoulli_density(state, u)


def _downstream(state: UpstreamState, sigma: float):
    """Downstream velocity/density across a shock inclined at sigma.

    sigma is the angle between the upstream flow and the shock front;
    sigma = pi/2 is the normal shock.  Returns (u1, u2, rho, w_n).
    """
    q = state.q_inf
    u_n = q * math.sin(sigma)
    v_t = q * math.cos(sigma)
    w = _normal_root(state, u_n, v_t)
    u1 = v_t * math.cos(sigma) + w * math.sin(sigma)
    u2 = math.cos(sigma) * (u_n - w)
    rho = bernoulli_density(state, math.hypot(w, v_t))
    return u1, u2, rho, w


def _deflection(state: UpstreamState, sigma: float) -> float:
    u1, u2, _, _ = _downstream(state, sigma)
    return math.atan2(u2, u1)


@dataclass(frozen=True)
class ShockPolarCurve:
    """Sampled shock polar with its detachment and sonic angles.

    Samples cover the upper half (u2 >= 0); the polar is symmetric under
    u2 -> -u2.  Only compressive (entropy-consistent) inclinations between
    the acoustic angle and pi/2 are represented.
    """

    upstream: UpstreamState
    sigma: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    rho: np.ndarray
    deflection: np.ndarray
    theta_d: float
    sigma_detach: float
    theta_sonic: float
    sigma_sonic: float
    normal_state: tuple  # (u, rho) at sigma = pi/2
    residuals: np.ndarray = field(repr=False, default=None)


def compute_polar(state: UpstreamState, n_samples: int = 2048) -> ShockPolarCurve:
    """Sweep shock inclinations and assemble the polar.

    The detachment angle is located by dense sampling plus golden-section
    refinement of the deflection; the sonic angle is the deflection at which
    the downstream speed equals the downstream sound speed.
    """
    if state.q_inf <= state.sound_speed * (1.0 + 1e-12):
        raise ValueError("polar needs a strictly supersonic upstream")
    g = state.gamma
    sigma_min = math.asin(state.sound_speed / state.q_inf)
    sigma = np.linspace(sigma_min, 0.5 * math.pi, n_samples)
    u1 = np.empty(n_samples)
    u2 = np.empty(n_samples)
    rho = np.empty(n_samples)
    res = np.empty(n_samples)
    for i, s in enumerate(sigma):
        a1, a2, r, w = _downstream(state, s)
        u1[i], u2[i], rho[i] = a1, a2, r
        v_t = state.q_inf * math.cos(s)
        res[i] = abs(r * w - state.rho_inf * state.q_inf * math.sin(s))
    theta = np.arctan2(u2, u1)

    i_max = int(np.argmax(theta))
    lo = sigma[max(0, i_max - 2)]
    mid = sigma[i_max]
    hi = sigma[min(n_samples - 1, i_max + 2)]
    opt = minimize_scalar(lambda s: -_deflection(state, s),
                          bracket=(lo, mid, hi), method="golden",
                          options={"xtol": 1e-13})
    sigma_d = float(opt.x)
    theta_d = _deflection(state, sigma_d)

    def sonic_gap(s):
        a1, a2, r, _ = _downstream(state, s)
        return a1 * a1 + a2 * a2 - r ** (g - 1.0)

    gaps = u1 ** 2 + u2 ** 2 - rho ** (g - 1.0)
    idx = np.nonzero(gaps[:-1] * gaps[1:] < 0.0)[0]
    if len(idx) == 0:
        raise RuntimeError("no sonic crossing found on the polar")
    i = int(idx[0])
    sigma_sonic = float(brentq(sonic_gap, sigma[i], sigma[i + 1], xtol=1e-14))
    theta_sonic = _deflection(state, sigma_sonic)

    u_ns, rho_ns = normal_shock(state)
    return ShockPolarCurve(upstream=state, sigma=sigma, u1=u1, u2=u2, rho=rho,
                           deflection=theta, theta_d=theta_d, sigma_detach=sigma_d,
                           theta_sonic=theta_sonic, sigma_sonic=sigma_sonic,
                           normal_state=(u_ns, rho_ns), residuals=res)


def weak_state(curve: ShockPolarCurve, theta_w: float, branch: str = "weak"):
    """Downstream velocity for an attached shock at deflection theta_w.

    The polar is double-valued in deflection; the weak branch (smaller shock
    inclination, larger downstream speed) is the default.  theta_w = 0 on the
    weak branch returns the vanishing shock (q_inf, 0), not the normal shock.
    """
    state = curve.upstream
    if theta_w < 0.0:
        raise ValueError("theta_w must be >= 0")
    if theta_w > curve.theta_d:
        raise DetachedShockError(
            f"detached: no attached shock state for theta_w={theta_w:.6g} "
            f"> theta_d={curve.theta_d:.6g}")
    sigma_min = math.asin(state.sound_speed / state.q_inf)
    if branch == "weak":
        lo, hi = sigma_min, curve.sigma_detach
    elif branch == "strong":
        lo, hi = curve.sigma_detach, 0.5 * math.pi
    else:
        raise ValueError(f"branch must be weak/strong, got {branch!r}")

    f = lambda s: _deflection(state, s) - theta_w
    flo, fhi = f(lo), f(hi)
    tiny = 1e-11
    if abs(flo) <= tiny:
        s_hit = lo
    elif abs(fhi) <= tiny:
        s_hit = hi
    elif flo * fhi > 0.0:
        if abs(theta_w - curve.theta_d) <= 1e-9:  # tangency
            s_hit = curve.sigma_detach
        else:
            raise RuntimeError(f"no {branch}-branch intersection for theta_w={theta_w:.9g}")
    else:
        s_hit = float(brentq(f, lo, hi, xtol=1e-14))
    a1, a2, rho, _ = _downstream(state, s_hit)
    return np.array([a1, a2]), rho, s_hit


@dataclass(frozen=True)
class SelfSimilarState:
    """Uniform state in the self-similar plane with its pseudo-sonic circle."""

    gamma: float
    u0_vec: tuple
    rho0: float
    k: float = 0.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not self.rho0 > 0.0:
            raise ValueError(f"rho0 must be > 0, got {self.rho0}")

    @property
    def sonic_radius(self) -> float:
        return self.rho0 ** (0.5 * (self.gamma - 1.0))


@dataclass(frozen=True)
class PseudoSonicGeometry:
    """Pseudo-potential, sonic circle and local (x, y) chart near the arc."""

    state: SelfSimilarState
    theta_w: float
    configuration: str  # reflection | wedge-flow

    def potential(self, xi) -> float:
        """phi(xi) = -|xi|^2/2 + u0.xi + k."""
        xi = np.asarray(xi, dtype=float)
        u0 = np.asarray(self.state.u0_vec, dtype=float)
        return float(-0.5 * np.dot(xi, xi) + np.dot(u0, xi) + self.state.k)

    def gradient(self, xi):
        """grad phi = u0 - xi (the pseudo-velocity)."""
        return np.asarray(self.state.u0_vec, dtype=float) - np.asarray(xi, dtype=float)

    def to_local(self, xi):
        """Map xi to (x, y): x is the inward distance from the sonic circle.

        The polar angle is unwrapped to the branch centered on the chart's
        reference ray (theta_w for reflection, pi + theta_w for wedge flow).
        """
        u0 = np.asarray(self.state.u0_vec, dtype=float)
        d = np.asarray(xi, dtype=float) - u0
        r = float(np.hypot(d[0], d[1]))
        th = float(math.atan2(d[1], d[0]))
        center = self.theta_w if self.configuration == "reflection" \
            else math.pi + self.theta_w
        th += 2.0 * math.pi * round((center - th) / (2.0 * math.pi))
        x = self.state.sonic_radius - r
        if self.configuration == "reflection":
            y = th - self.theta_w
        else:
            y = math.pi + self.theta_w - th
        return x, y

    def from_local(self, x: float, y: float):
        u0 = np.asarray(self.state.u0_vec, dtype=float)
        r = self.state.sonic_radius - x
        if self.configuration == "reflection":
            th = y + self.theta_w
        else:
            th = math.pi + self.theta_w - y
        return u0 + r * np.array([math.cos(th), math.sin(th)])

    def arc_points(self, theta_from: float, theta_to: float, n: int = 181) -> np.ndarray:
        """Points of the sonic circle between two polar angles around u0."""
        u0 = np.asarray(self.state.u0_vec, dtype=float)
        th = np.linspace(theta_from, theta_to, n)
        return u0 + self.state.sonic_radius * np.column_stack([np.cos(th), np.sin(th)])


def pseudo_sonic_geometry(state: SelfSimilarState, theta_w: float,
                          configuration: str = "reflection") -> PseudoSonicGeometry:
    """Build the pseudo-sonic arc geometry and the local chart for a state."""
    if configuration not in ("reflection", "wedge-flow"):
        raise ValueError(f"configuration must be 'reflection' or 'wedge-flow', got {configuration!r}")
    return PseudoSonicGeometry(state=state, theta_w=theta_w, configuration=configuration)
