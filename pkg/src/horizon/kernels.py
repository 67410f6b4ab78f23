"""Smooth compactly supported target kernels and their exact derivatives.

The base shape is the standard bump exp(-1/(1-u^2)) on (-1, 1).  Its k-th
derivative is P_k(u) (1-u^2)^(-2k) exp(-1/(1-u^2)) where P_k satisfies the
integer-coefficient recurrence

    P_{k+1} = P_k' (1-u^2)^2 + P_k (4 k u (1-u^2) - 2u),   P_0 = 1.

P_k is built once in exact integer arithmetic and then evaluated in
floating point (or in the extended context for the ill-conditioned
high-degree paths).  Finite differences are useless past k ~ 6 because
the derivative magnitudes grow factorially; the recurrence is exact.

High-order derivatives concentrate into wavepackets near the support
endpoints whose local frequency diverges like 1/delta^2 (delta the
distance to the edge in the unit coordinate).  ``derivative_panel_edges``
builds quadrature panels by marching inward so that the log-variation of
the envelope per panel stays bounded; every convolution against these
kernels must use such panels.
"""

import json
import math
import threading
from functools import lru_cache

import numpy as np

from ._accel import bump_derivative_values
from ._mp import ctx
from .spectral_core import PANEL_DEGREE, fourier_transform_at, gauss_legendre_edges, gauss_legendre_rule

D_MAX = 16


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _poly_add(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _poly_diff(p):
    return [i * p[i] for i in range(1, len(p))] or [0]


@lru_cache(maxsize=None)
def bump_poly_exact(k):
    """Integer coefficients of P_k, ascending powers."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return (1,)
    p = list(bump_poly_exact(k - 1))
    sq = (1, 0, -2, 0, 1)  # (1-u^2)^2
    t1 = _poly_mul(_poly_diff(p), sq)
    t2 = _poly_mul(p, _poly_add([0, -2], [0, 4 * (k - 1), 0, -4 * (k - 1)]))
    out = _poly_add(t1, t2)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def _bump_poly_float(k):
    return np.array(bump_poly_exact(k), dtype=np.float64)


def _bump_fk_mp(u, k):
    """f^(k)(u) for the unit bump, scalar, extended precision."""
    delta = 1 - u * u
    if delta <= 0:
        return ctx.mpf(0)
    p = ctx.mpf(0)
    for c in reversed(bump_poly_exact(k)):
        p = p * u + c
    if p == 0:
        return ctx.mpf(0)
    return p * ctx.exp(-2 * k * ctx.log(delta) - 1 / delta)


@lru_cache(maxsize=1)
def _raw_bump_mass():
    """integral of exp(-1/(1-u^2)) over (-1, 1) in double precision."""
    n, w = gauss_legendre_rule(-1.0, 1.0, 32)
    return float(bump_derivative_values(n, _bump_poly_float(0), 0) @ w)


@lru_cache(maxsize=1)
def _gl_mp(degree=PANEL_DEGREE):
    """Gauss-Legendre nodes/weights at extended precision (Newton on P_n)."""
    n = degree
    xs, ws = [], []
    for i in range(1, n + 1):
        x = ctx.mpf(math.cos(math.pi * (i - 0.25) / (n + 0.5)))
        for _ in range(60):
            p0, p1 = ctx.mpf(1), x
            for j in range(2, n + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = n * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x = x - dx
            if abs(dx) < ctx.mpf(10) ** (-ctx.dps - 2):
                break
        xs.append(x)
        ws.append(2 / ((1 - x * x) * dp * dp))
    return list(reversed(xs)), list(reversed(ws))


@lru_cache(maxsize=1)
def _raw_bump_mass_mp():
    x, w = _gl_mp()
    total = ctx.mpf(0)
    edges = [ctx.mpf(-1) + ctx.mpf(i) / 16 for i in range(33)]
    for i in range(32):
        mid = (edges[i] + edges[i + 1]) / 2
        half = (edges[i + 1] - edges[i]) / 2
        for xi, wi in zip(x, w):
            total += half * wi * _bump_fk_mp(mid + half * xi, 0)
    return total


def derivative_panel_edges(width, k, dg_max=2.0):
    """Panel edges on [0, width] resolving the order-k derivative wavepacket.

    Edges march inward from each endpoint keeping the per-panel variation
    of g = -1/delta - 2k log(delta) below ``dg_max``, then mirror.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    inv_delta_max = 60.0 + 6.0 * k

    def gprime(s):
        u = -1.0 + 2.0 * s / width
        delta = max(1e-12, 1.0 - u * u)
        dd = abs(2.0 * u) * (2.0 / width)
        return (1.0 / delta**2 + 2.0 * k / delta) * dd + 1e-30

    s0 = 0.5 * width * (1.0 - math.sqrt(max(0.0, 1.0 - 1.0 / inv_delta_max)))
    edges = [0.0, s0]
    s = s0
    cap = width / 24.0
    half_w = 0.5 * width
    while s < half_w:
        s = min(s + min(dg_max / gprime(s), cap), half_w)
        edges.append(s)
    mirrored = [width - e for e in reversed(edges[:-1])]
    return np.array(edges + mirrored)


class TargetKernel:
    """C-infinity kernel h supported on [-T, theta].

    T is the anticausal reach (prediction horizon), theta the causal tail.
    q(t) = h(t - T) is then causal with support [0, T + theta].
    """

    d_max = D_MAX

    def __init__(self, T, theta, shape="bump", epsilon=None, prototype=None):
        if T <= 0:
            raise ValueError("prediction horizon T must be positive")
        if theta < 0:
            raise ValueError("causal tail theta must be nonnegative")
        if T + theta <= 0:
            raise ValueError("degenerate support")
        self.T = float(T)
        self.theta = float(theta)
        self.shape = shape
        self.epsilon = epsilon
        self._prototype = prototype
        self._lock = threading.Lock()
        self._mass_mp = None
        if shape == "bump":
            self.normalization = 2.0 / (self.width * _raw_bump_mass())
        elif shape == "mollified":
            if epsilon is None or prototype is None:
                raise ValueError("mollified kernel needs epsilon and prototype")
            if not 0 < epsilon < self.width / 2:
                raise ValueError("epsilon must be below half the support width")
            self.normalization = 1.0
            self._mollifier = MollifierKernel(epsilon)
        else:
            raise ValueError(f"unknown kernel shape {shape!r}")

    @property
    def width(self):
        return self.T + self.theta

    @property
    def support(self):
        return (-self.T, self.theta)

    def _to_unit(self, t):
        return (2.0 * t - (self.theta - self.T)) / self.width

    def __call__(self, t):
        return self.derivative(0, t)

    def derivative(self, k, t):
        """k-th derivative of h at t (vectorized); exact zero off support."""
        if not 0 <= k <= self.d_max:
            raise ValueError(f"derivative order {k} outside [0, {self.d_max}]")
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if self.shape == "bump":
            u = self._to_unit(t)
            vals = bump_derivative_values(u, _bump_poly_float(k), k)
            out = vals * self.normalization * (2.0 / self.width) ** k
        else:
            out = np.array([self._mollified_derivative(k, float(ti)) for ti in t])
        return float(out[0]) if scalar else out

    def _mollified_region(self, t):
        a = max(self.support[0] + self.epsilon, t - self.epsilon)
        b = min(self.support[1] - self.epsilon, t + self.epsilon)
        return a, b

    def _mollified_derivative(self, k, t):
        a, b = self._mollified_region(t)
        if b <= a:
            return 0.0
        edges = t - derivative_panel_edges(2.0 * self.epsilon, k)[::-1] + self.epsilon
        edges = np.clip(edges, a, b)
        edges = np.unique(edges)
        if edges.size < 2:
            return 0.0
        s_nodes, s_weights = gauss_legendre_edges(edges)
        kv = self._mollifier.derivative(k, t - s_nodes)
        pv = np.asarray(self._prototype(s_nodes), dtype=float)
        return float((kv * pv) @ s_weights)

    def derivative_mp(self, t, k):
        """Scalar k-th derivative in the extended context."""
        if not 0 <= k <= self.d_max:
            raise ValueError(f"derivative order {k} outside [0, {self.d_max}]")
        tm = ctx.mpf(t)
        if self.shape == "bump":
            u = (2 * tm - (ctx.mpf(self.theta) - ctx.mpf(self.T))) / ctx.mpf(self.width)
            scale = 2 / (ctx.mpf(self.width) * self._mass_mp_value())
            return _bump_fk_mp(u, k) * scale * (2 / ctx.mpf(self.width)) ** k
        a, b = self._mollified_region(float(t))
        if b <= a:
            return ctx.mpf(0)
        edges = float(t) - derivative_panel_edges(2.0 * self.epsilon, k)[::-1] + self.epsilon
        edges = np.unique(np.clip(edges, a, b))
        if edges.size < 2:
            return ctx.mpf(0)
        x, w = _gl_mp()
        eps_m = ctx.mpf(self.epsilon)
        total = ctx.mpf(0)
        for i in range(edges.size - 1):
            mid = (ctx.mpf(edges[i]) + ctx.mpf(edges[i + 1])) / 2
            half = (ctx.mpf(edges[i + 1]) - ctx.mpf(edges[i])) / 2
            for xi, wi in zip(x, w):
                s = mid + half * xi
                v = (tm - s) / eps_m
                kv = _bump_fk_mp(v, k) / (_raw_bump_mass_mp() * eps_m ** (k + 1))
                total += half * wi * kv * ctx.mpf(float(self._prototype(float(s))))
        return total

    def _mass_mp_value(self):
        if self._mass_mp is None:
            with self._lock:
                if self._mass_mp is None:
                    self._mass_mp = _raw_bump_mass_mp()
        return self._mass_mp

    def mass(self):
        """integral of h over its support."""
        nodes, weights = gauss_legendre_rule(*self.support, 32)
        return float(self(nodes) @ weights)

    def to_json(self):
        spec = {"shape": self.shape, "T": self.T, "theta": self.theta}
        if self.epsilon is not None:
            spec["epsilon"] = self.epsilon
        return json.dumps(spec)

    @classmethod
    def from_spec(cls, spec):
        shape = spec.get("shape", "bump")
        if shape == "bump":
            return bump_kernel(spec["T"], spec["theta"])
        if shape == "mollified":
            return mollify(lambda s: np.ones_like(np.asarray(s, dtype=float)),
                           spec["epsilon"], spec["T"], spec["theta"])
        raise ValueError(f"unknown kernel shape {shape!r}")

    @classmethod
    def from_json(cls, text):
        return cls.from_spec(json.loads(text))


class MollifierKernel:
    """Unit-mass smoothing bump kappa_eps supported on [-eps, eps]."""

    def __init__(self, epsilon):
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        self.epsilon = float(epsilon)

    def __call__(self, v):
        return self.derivative(0, v)

    def derivative(self, k, v):
        v = np.asarray(v, dtype=float)
        u = v / self.epsilon
        vals = bump_derivative_values(u, _bump_poly_float(k), k)
        return vals / (_raw_bump_mass() * self.epsilon ** (k + 1))


def bump_kernel(T, theta):
    """Unit-mass bump kernel on [-T, theta]."""
    return TargetKernel(T, theta, shape="bump")


def mollify(prototype, epsilon, T, theta):
    """Smooth a square-integrable prototype supported in (-T, theta).

    h_eps(t) = int kappa_eps(t - s) 1_[-T+eps, theta-eps](s) prototype(s) ds,
    which is C-infinity with support inside [-T, theta].  No rescaling is
    applied; the plateau of a unit prototype stays at height 1.
    """
    if epsilon >= (T + theta) / 2:
        raise ValueError("epsilon must be below half the support width")
    return TargetKernel(T, theta, shape="mollified", epsilon=float(epsilon), prototype=prototype)


def kernel_derivative(h, k, t):
    """k-th derivative of a target kernel at t."""
    return h.derivative(k, t)


def derivative_spectrum(h, k, omegas, precision="extended"):
    """F[h^(k)](i omega) by direct quadrature of the k-th derivative.

    Independent of the closed route (i omega)^k F[h]; their agreement is a
    consistency invariant.  The integrand's L1 mass grows factorially with
    k while the transform stays O(omega^k |H|), so the quadrature switches
    to the extended context once double-precision roundoff would exceed
    the cancellation headroom.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    edges = derivative_panel_edges(h.width, k) + h.support[0]
    nodes, weights = gauss_legendre_edges(edges)
    vals = h.derivative(k, nodes)
    l1 = float(weights @ np.abs(vals))
    if precision == "double" or l1 * 1e-15 <= 1e-11:
        from ._accel import oscillatory_transform

        return oscillatory_transform(nodes, weights, vals, omegas)
    x, w = _gl_mp()
    table = []
    for i in range(edges.size - 1):
        mid = (ctx.mpf(edges[i]) + ctx.mpf(edges[i + 1])) / 2
        half = (ctx.mpf(edges[i + 1]) - ctx.mpf(edges[i])) / 2
        for xi, wi in zip(x, w):
            u = mid + half * xi
            table.append((u, half * wi, h.derivative_mp(u, k)))
    out = []
    for om in omegas:
        om_m = ctx.mpf(float(om))
        out.append(complex(ctx.fsum(wi * vi * ctx.expj(-om_m * ui)
                                    for ui, wi, vi in table)))
    return np.array(out)


def q_transform(h, z, base_panels=32):
    """Q(z) = int_0^{T+theta} e^{-z t} h(t - T) dt (entire in z)."""
    z = complex(z)
    width = h.width
    n_panels = max(base_panels, int(np.ceil(width * abs(z) / 6.0)))
    nodes, weights = gauss_legendre_rule(0.0, width, n_panels)
    vals = h(nodes - h.T)
    return complex(np.exp(-z * nodes) @ (weights * vals))


def q_spectrum(h, omegas, base_panels=32):
    """Q(i omega) on an array of frequencies via the oscillatory rule."""
    return fourier_transform_at(lambda t: h(t - h.T), (0.0, h.width), omegas, base_panels)


def h_spectrum(h, omegas, base_panels=32):
    """H(i omega) = F h, the transform of the kernel itself."""
    return fourier_transform_at(h, h.support, omegas, base_panels)
