"""Analytic test processes with exact Fourier transforms.

Every generator returns a real-valued signal carrying a vectorized time
evaluator, its closed-form spectrum X(i omega) where one exists, the
exponential decay rate of |X| (np.inf for compact or super-exponential
spectra), and a scalar extended-precision evaluator used by the
high-degree convolution path.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._mp import ctx
from .spectral_core import SpectralGrid, default_omega_max


@dataclass(frozen=True)
class Signal:
    kind: str
    params: dict = field(repr=True)
    time: Callable = field(repr=False)
    spectrum: Optional[Callable] = field(repr=False, default=None)
    spectral_decay: float = 0.0
    time_mp: Optional[Callable] = field(repr=False, default=None)

    def __call__(self, t):
        return self.time(np.asarray(t, dtype=float))

    def to_json(self):
        return json.dumps({"kind": self.kind, "params": self.params})

    @classmethod
    def from_spec(cls, spec):
        kind = spec["kind"]
        params = spec.get("params", {k: v for k, v in spec.items() if k != "kind"})
        factories = {
            "poisson": lambda p: poisson_signal(p["a"]),
            "gaussian": lambda p: gaussian_signal(p["sigma"]),
            "cosine_modulated_poisson": lambda p: cosine_modulated_poisson(p["a"], p["omega0"]),
            "chirp_noise": lambda p: chirp_noise(tuple(p["band"]), p["amplitude"]),
            "zero": lambda p: zero_signal(),
        }
        if kind not in factories:
            raise ValueError(f"unknown signal kind {kind!r}")
        return factories[kind](params)

    @classmethod
    def from_json(cls, text):
        return cls.from_spec(json.loads(text))


@dataclass(frozen=True)
class ClassReport:
    """Membership report for the exponentially weighted spectral class."""

    r: float
    norm: float
    member: bool
    unit_ball: bool

    @property
    def norm_sq(self):
        return self.norm * self.norm if math.isfinite(self.norm) else math.inf


def zero_signal():
    return Signal(
        kind="zero",
        params={},
        time=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        spectrum=lambda om: np.zeros_like(np.asarray(om, dtype=float), dtype=complex),
        spectral_decay=np.inf,
        time_mp=lambda t: ctx.mpf(0),
    )


def poisson_signal(a):
    """x(t) = (1/pi) a / (a^2 + t^2) with X(i omega) = e^{-a|omega|}."""
    if a <= 0:
        raise ValueError("a must be positive")
    a = float(a)

    def time(t):
        return (a / np.pi) / (a * a + t * t)

    def spectrum(om):
        return np.exp(-a * np.abs(om)).astype(complex)

    am = ctx.mpf(a)
    return Signal(
        kind="poisson",
        params={"a": a},
        time=time,
        spectrum=spectrum,
        spectral_decay=a,
        time_mp=lambda t: (am / ctx.pi) / (am * am + t * t),
    )


def gaussian_signal(sigma):
    """Unit-mass Gaussian; X(i omega) = e^{-sigma^2 omega^2 / 2}."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    sigma = float(sigma)
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))

    def time(t):
        return norm * np.exp(-t * t / (2.0 * sigma * sigma))

    def spectrum(om):
        return np.exp(-0.5 * (sigma * om) ** 2).astype(complex)

    sm = ctx.mpf(sigma)
    nm = 1 / (sm * ctx.sqrt(2 * ctx.pi))
    return Signal(
        kind="gaussian",
        params={"sigma": sigma},
        time=time,
        spectrum=spectrum,
        spectral_decay=np.inf,
        time_mp=lambda t: nm * ctx.exp(-t * t / (2 * sm * sm)),
    )


def cosine_modulated_poisson(a, omega0):
    """Poisson envelope modulated by cos(omega0 t); spectrum is the
    half-sum of the envelope spectrum shifted to +-omega0."""
    if a <= 0:
        raise ValueError("a must be positive")
    a, omega0 = float(a), float(omega0)

    def time(t):
        return (a / np.pi) / (a * a + t * t) * np.cos(omega0 * t)

    def spectrum(om):
        om = np.asarray(om, dtype=float)
        return 0.5 * (np.exp(-a * np.abs(om - omega0)) + np.exp(-a * np.abs(om + omega0))).astype(complex)

    am, wm = ctx.mpf(a), ctx.mpf(omega0)
    return Signal(
        kind="cosine_modulated_poisson",
        params={"a": a, "omega0": omega0},
        time=time,
        spectrum=spectrum,
        spectral_decay=a,
        time_mp=lambda t: (am / ctx.pi) / (am * am + t * t) * ctx.cos(wm * t),
    )


def chirp_noise(band, amplitude):
    """Flat band-limited noise: X = amplitude on band <= |omega| <= band.

    Time profile (amplitude/pi) (sin(hi t) - sin(lo t)) / t; the compact
    spectrum makes the L1/L2 noise norms exact.
    """
    lo, hi = float(band[0]), float(band[1])
    if not 0 <= lo < hi:
        raise ValueError("band must satisfy 0 <= lo < hi")
    amplitude = float(amplitude)

    def time(t):
        t = np.asarray(t, dtype=float)
        # sin(b t)/t = b sinc(b t / pi)
        return (amplitude / np.pi) * (hi * np.sinc(hi * t / np.pi) - lo * np.sinc(lo * t / np.pi))

    def spectrum(om):
        om = np.abs(np.asarray(om, dtype=float))
        return (amplitude * ((om >= lo) & (om <= hi))).astype(complex)

    lom, him, am = ctx.mpf(lo), ctx.mpf(hi), ctx.mpf(amplitude)

    def time_mp(t):
        if t == 0:
            return am / ctx.pi * (him - lom)
        return am / ctx.pi * (ctx.sin(him * t) - ctx.sin(lom * t)) / t

    return Signal(
        kind="chirp_noise",
        params={"band": [lo, hi], "amplitude": amplitude},
        time=time,
        spectrum=spectrum,
        spectral_decay=np.inf,
        time_mp=time_mp,
    )


def superposition(signals, weights=None):
    """Weighted sum of signals; spectra combine when all parts carry one."""
    signals = list(signals)
    if not signals:
        raise ValueError("need at least one component")
    weights = [1.0] * len(signals) if weights is None else [float(w) for w in weights]
    if len(weights) != len(signals):
        raise ValueError("one weight per component")

    def time(t):
        t = np.asarray(t, dtype=float)
        return sum(w * s.time(t) for w, s in zip(weights, signals))

    spectrum = None
    if all(s.spectrum is not None for s in signals):
        def spectrum(om):
            return sum(w * s.spectrum(om) for w, s in zip(weights, signals))

    time_mp = None
    if all(s.time_mp is not None for s in signals):
        wm = [ctx.mpf(w) for w in weights]
        def time_mp(t):
            return ctx.fsum(w * s.time_mp(t) for w, s in zip(wm, signals))

    return Signal(
        kind="superposition",
        params={"parts": [{"kind": s.kind, "params": s.params} for s in signals],
                "weights": weights},
        time=time,
        spectrum=spectrum,
        spectral_decay=min(s.spectral_decay for s in signals),
        time_mp=time_mp,
    )


def _default_grid(r):
    return SpectralGrid.for_rate(r, n_points=4096)


def class_norm(x, r, sign=-1, grid=None):
    """Weighted spectral norm of a signal and class membership.

    sign=-1 is the defining weight of the class; sign=+1 probes the
    spectral-energy weight of the error bound, where membership requires
    the spectrum to decay strictly faster than e^{-r|omega|/2}.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    if x.spectrum is None:
        raise ValueError("signal carries no exact spectrum")
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")

    rho = x.spectral_decay
    if sign > 0 and math.isfinite(rho) and 2.0 * rho <= r:
        return ClassReport(r=r, norm=math.inf, member=False, unit_ball=False)

    if x.kind == "poisson":
        a = x.params["a"]
        norm_sq = 2.0 / (r + 2.0 * a) if sign < 0 else 2.0 / (2.0 * a - r)
    else:
        if grid is None:
            grid = _adequate_grid(x, r, sign, rho)
        vals = np.abs(x.spectrum(grid.nodes)) ** 2
        integrand = np.exp(sign * r * np.abs(grid.nodes)) * vals
        if not np.all(np.isfinite(integrand)):
            return ClassReport(r=r, norm=math.inf, member=False, unit_ball=False)
        from .weighted_space import _tail_is_divergent

        if sign > 0 and _tail_is_divergent(integrand, grid.nodes):
            return ClassReport(r=r, norm=math.inf, member=False, unit_ball=False)
        norm_sq = float(integrand @ grid.weights)
    norm = math.sqrt(norm_sq)
    return ClassReport(r=r, norm=norm, member=True, unit_ball=norm <= 1.0)


def _adequate_grid(x, r, sign, rho):
    """Truncate where the weighted integrand is negligible."""
    if sign < 0:
        return SpectralGrid.for_rate(r)
    if math.isfinite(rho):
        return SpectralGrid.for_rate(2.0 * rho - r)
    omega = default_omega_max(r)
    for _ in range(8):
        grid = SpectralGrid.build(omega, 4096)
        integrand = np.exp(sign * r * np.abs(grid.nodes)) * np.abs(x.spectrum(grid.nodes)) ** 2
        peak = float(np.max(integrand))
        if peak == 0.0 or integrand[-1] <= 1e-16 * peak:
            return grid
        omega *= 2.0
    return grid


def noise_norm(eta, p, grid):
    """||N(i .)||_{L_p} of a noise signal, computed on the given grid."""
    if eta.spectrum is None:
        raise ValueError("noise signal carries no exact spectrum")
    mag = np.abs(eta.spectrum(grid.nodes))
    if p == 1:
        return float(mag @ grid.weights)
    if p == 2:
        return math.sqrt(float((mag * mag) @ grid.weights))
    raise ValueError("p must be 1 or 2")


def add_noise(x0, eta, nu, p, grid=None):
    """x = x0 + eta with the noise spectrum scaled to ||N||_{L_p} = nu.

    Normalization is grid-relative by contract: the norm is evaluated with
    the same quadrature rule the experiment uses.
    """
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    if nu == 0.0:
        return x0
    if grid is None:
        grid = _default_grid(2.0)
    base = noise_norm(eta, p, grid)
    if base <= 0.0:
        raise ValueError("noise signal has zero spectrum: cannot normalize")
    return superposition([x0, eta], [1.0, nu / base])
