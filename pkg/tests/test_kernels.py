import math

import numpy as np
import pytest

from horizon import (
    MollifierKernel,
    TargetKernel,
    bump_kernel,
    fourier_transform_at,
    h_spectrum,
    kernel_derivative,
    mollify,
    q_spectrum,
    q_transform,
)
from horizon.kernels import bump_poly_exact, derivative_spectrum

from oracles import adaptive_simpson, richardson_derivative


class TestBumpPolynomials:
    def test_first_terms(self):
        assert bump_poly_exact(0) == (1,)
        assert bump_poly_exact(1) == (0, -2)
        assert bump_poly_exact(2) == (-2, 0, 0, 0, 6)

    def test_against_sympy(self):
        sympy = pytest.importorskip("sympy")
        u = sympy.symbols("u")
        f = sympy.exp(-1 / (1 - u**2))
        for k in (1, 2, 3, 5):
            deriv = sympy.simplify(sympy.diff(f, u, k) / f * (1 - u**2) ** (2 * k))
            poly = sympy.Poly(sympy.expand(deriv), u)
            coeffs = [int(c) for c in reversed(poly.all_coeffs())]
            mine = list(bump_poly_exact(k))
            coeffs += [0] * (len(mine) - len(coeffs))
            assert mine == coeffs

    def test_coefficients_fit_in_float64(self):
        for k in range(17):
            assert max(abs(c) for c in bump_poly_exact(k)) < 1e300


class TestBumpKernel:
    def test_support_endpoints_vanish(self, canonical_kernel):
        h = canonical_kernel
        assert h(-h.T) == 0.0
        assert h(h.theta) == 0.0
        assert h(-h.T - 0.01) == 0.0 and h(h.theta + 0.01) == 0.0

    def test_unnormalized_peak_value(self, unit_bump):
        # T = theta = 1 makes the unit map the identity; peak at 0 is e^{-1}
        peak = unit_bump(0.0) / unit_bump.normalization
        assert peak == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_unit_mass(self, canonical_kernel):
        assert canonical_kernel.mass() == pytest.approx(1.0, rel=1e-12)

    def test_midpoint_is_maximum(self, canonical_kernel):
        h = canonical_kernel
        mid = (h.theta - h.T) / 2.0
        ts = np.linspace(-h.T, h.theta, 501)
        assert h(mid) == pytest.approx(np.max(h(ts)), rel=1e-9)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            bump_kernel(0.0, 0.0)
        with pytest.raises(ValueError):
            bump_kernel(1.0, -0.5)


class TestKernelDerivative:
    def test_zero_outside_support(self, canonical_kernel):
        h = canonical_kernel
        for k in range(1, 9):
            assert kernel_derivative(h, k, -h.T - 1e-6) == 0.0
            assert kernel_derivative(h, k, h.theta + 1e-6) == 0.0

    def test_first_derivative_vanishes_at_center(self, unit_bump):
        assert kernel_derivative(unit_bump, 1, 0.0) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("k", range(1, 7))
    def test_matches_finite_differences(self, canonical_kernel, k):
        h = canonical_kernel
        # interior points clear of the endpoint underflow region
        ts = np.linspace(-h.T + 0.05, h.theta - 0.02, 20)
        for t in ts:
            fd = richardson_derivative(lambda s: h.derivative(k - 1, s), t, h=1e-5)
            exact = h.derivative(k, t)
            scale = max(abs(exact), np.max(np.abs(h.derivative(k, ts))))
            assert abs(fd - exact) <= 1e-5 * scale

    @pytest.mark.parametrize("k", range(1, 7))
    def test_frequency_domain_consistency(self, canonical_kernel, k):
        # F[h^(k)](i w) must equal (i w)^k F[h](i w)
        h = canonical_kernel
        omegas = np.array([0.1, 0.5, 1.0, 3.0, 10.0])
        lhs = derivative_spectrum(h, k, omegas)
        rhs = (1j * omegas) ** k * h_spectrum(h, omegas)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-8)

    def test_extended_matches_double(self, canonical_kernel):
        h = canonical_kernel
        for k in (0, 3, 6):
            for t in (-0.3, 0.0, 0.05):
                assert float(h.derivative_mp(t, k)) == pytest.approx(
                    h.derivative(k, t), rel=1e-11)

    def test_order_cap(self, canonical_kernel):
        with pytest.raises(ValueError):
            canonical_kernel.derivative(TargetKernel.d_max + 1, 0.0)


class TestMollifier:
    def test_unit_mass(self):
        for eps in (0.5, 0.1):
            kappa = MollifierKernel(eps)
            val = adaptive_simpson(lambda v: kappa(np.asarray(v)), -eps, eps, tol=1e-13)
            assert val == pytest.approx(1.0, rel=1e-10)

    def test_support(self):
        kappa = MollifierKernel(0.25)
        assert kappa(0.26) == 0.0 and kappa(-0.26) == 0.0


class TestMollify:
    def test_zero_prototype(self):
        zero = lambda s: np.zeros_like(np.asarray(s, dtype=float))
        h = mollify(zero, 0.05, 0.5, 0.5)
        ts = np.linspace(-0.5, 0.5, 21)
        np.testing.assert_array_equal(h(ts), 0.0)

    def test_plateau_of_unit_prototype(self):
        one = lambda s: np.ones_like(np.asarray(s, dtype=float))
        eps = 0.1
        h = mollify(one, eps, 0.5, 0.5)
        plateau = np.linspace(-0.5 + 2 * eps, 0.5 - 2 * eps, 9)
        np.testing.assert_allclose(h(plateau), 1.0, atol=1e-10)

    def test_support_containment(self):
        one = lambda s: np.ones_like(np.asarray(s, dtype=float))
        h = mollify(one, 0.1, 0.5, 0.5)
        assert h(0.55) == 0.0 and h(-0.55) == 0.0
        assert h(0.5) == 0.0 and h(-0.5) == 0.0

    def test_l2_convergence_to_prototype(self):
        # edge clipping makes the L2 gap shrink like sqrt(eps): monotone down
        proto = lambda s: np.cos(np.asarray(s, dtype=float))
        errs = []
        for eps in (0.1, 0.05, 0.025):
            h = mollify(proto, eps, 0.5, 0.5)
            err = adaptive_simpson(
                lambda s: (h(np.asarray(s)) - proto(s)) ** 2, -0.5, 0.5, tol=1e-10)
            errs.append(math.sqrt(max(err, 0.0)))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 0.6 * errs[0]

    def test_endpoint_flatness(self):
        one = lambda s: np.ones_like(np.asarray(s, dtype=float))
        h = mollify(one, 0.1, 0.5, 0.5)
        for k in range(0, 5):
            inner = np.linspace(-0.45, 0.45, 31)
            scale = np.max(np.abs(h.derivative(k, inner)))
            assert abs(h.derivative(k, -0.5 + 1e-9)) < 1e-6 * scale
            assert abs(h.derivative(k, 0.5 - 1e-9)) < 1e-6 * scale

    def test_epsilon_guard(self):
        one = lambda s: np.ones_like(np.asarray(s, dtype=float))
        with pytest.raises(ValueError):
            mollify(one, 0.6, 0.5, 0.5)


class TestQTransform:
    def test_mass_at_zero(self, canonical_kernel):
        val = q_transform(canonical_kernel, 0.0)
        assert val.real == pytest.approx(1.0, rel=1e-12)

    def test_identity_with_kernel_transform(self, canonical_kernel):
        # Q(i w) e^{i w T} = F[h](i w)
        h = canonical_kernel
        for om in (0.5, 1.0, 5.0):
            q = q_transform(h, 1j * om)
            H = fourier_transform_at(h, h.support, [om])[0]
            assert q * np.exp(1j * om * h.T) == pytest.approx(H, rel=1e-10)

    def test_bounded_with_decay(self, canonical_kernel):
        h = canonical_kernel
        q0 = abs(q_transform(h, 0.0))
        q100 = abs(q_transform(h, 100.0j))
        assert q100 < q0
        assert np.all(np.abs(q_spectrum(h, np.linspace(0, 300, 40))) <= q0 + 1e-12)

    def test_entire_in_left_half_plane(self, canonical_kernel):
        val = q_transform(canonical_kernel, -1.0 + 3.0j)
        assert np.isfinite(val.real) and np.isfinite(val.imag)


class TestSupportOrientation:
    def test_q_is_causal(self, canonical_kernel):
        h = canonical_kernel
        q = lambda t: h(np.asarray(t) - h.T)
        assert np.all(q(np.linspace(-1.0, -1e-9, 11)) == 0.0)
        assert np.all(q(np.linspace(h.width + 1e-9, 2.0, 11)) == 0.0)
        ts = np.linspace(1e-3, h.width - 1e-3, 101)
        assert np.max(np.abs(q(ts))) > 0.0


class TestSerialization:
    def test_bump_roundtrip(self, canonical_kernel):
        text = canonical_kernel.to_json()
        back = TargetKernel.from_json(text)
        assert back.shape == "bump"
        assert back.T == canonical_kernel.T and back.theta == canonical_kernel.theta

    def test_mollified_roundtrip(self):
        one = lambda s: np.ones_like(np.asarray(s, dtype=float))
        h = mollify(one, 0.1, 0.5, 0.5)
        back = TargetKernel.from_json(h.to_json())
        assert back.shape == "mollified" and back.epsilon == 0.1
        ts = np.linspace(-0.4, 0.4, 9)
        np.testing.assert_allclose(back(ts), h(ts), rtol=1e-12)
