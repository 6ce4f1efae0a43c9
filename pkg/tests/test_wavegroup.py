import math

import numpy as np
import pytest

from mirrorsim import (ComplexQuadraticForm, PhysicalParams, SpacetimePoint,
                       WavegroupSpec, amplitude_closed, amplitude_parts,
                       amplitude_quadrature, gaussian_integral, joint_pdf,
                       spectral_amplitude)
from mirrorsim.wavegroup import incident_frame, reflected_frame

TWO_PI = 2.0 * math.pi


def trapezoid_gaussian_2d(A, b, c=0.0, half_width=9.0, n=1201):
    """Direct 2D trapezoid evaluation of the Gaussian integral (oracle)."""
    D = A.real
    evals, evecs = np.linalg.eigh(D)
    u = np.linspace(-half_width, half_width, n)
    U1, U2 = np.meshgrid(u / math.sqrt(evals[0]), u / math.sqrt(evals[1]),
                         indexing="ij")
    X = evecs[:, 0][:, None, None] * U1 + evecs[:, 1][:, None, None] * U2
    quad = (A[0, 0] * X[0] ** 2 + 2 * A[0, 1] * X[0] * X[1] + A[1, 1] * X[1] ** 2)
    integrand = np.exp(-0.5 * quad + b[0] * X[0] + b[1] * X[1] + c)
    jac = abs(np.linalg.det(np.column_stack([
        evecs[:, 0] / math.sqrt(evals[0]), evecs[:, 1] / math.sqrt(evals[1])])))
    du = u[1] - u[0]
    return np.trapezoid(np.trapezoid(integrand, dx=du, axis=1), dx=du, axis=0) * jac


def random_pd_form(rng, b_scale=1.0):
    L = rng.normal(size=(2, 2))
    D = L @ L.T + 0.5 * np.eye(2)
    S = rng.normal(size=(2, 2))
    S = 0.5 * (S + S.T) * rng.uniform(0.2, 2.0)
    A = D + 1j * S
    b = (rng.normal(size=2) + 1j * rng.normal(size=2)) * b_scale
    return ComplexQuadraticForm(A=A, b=b, c=complex(rng.normal(), rng.normal()))


class TestGaussianIntegral:
    def test_identity_matrix(self):
        q = ComplexQuadraticForm(A=np.eye(2, dtype=complex), b=np.zeros(2))
        assert gaussian_integral(q) == pytest.approx(TWO_PI, rel=1e-14)

    def test_isotropic_scaling(self):
        for a in (0.5, 2.0, 7.0):
            q = ComplexQuadraticForm(A=a * np.eye(2, dtype=complex), b=np.zeros(2))
            assert gaussian_integral(q) == pytest.approx(TWO_PI / a, rel=1e-14)

    def test_against_trapezoid_oracle(self, rng):
        for _ in range(12):
            q = random_pd_form(rng)
            closed = gaussian_integral(q)
            brute = trapezoid_gaussian_2d(q.A, q.b, q.c)
            assert abs(closed - brute) / abs(closed) < 1e-8

    def test_branch_continuity(self, rng):
        # value must vary continuously as Im(A) grows from zero
        S = np.array([[3.0, 1.0], [1.0, -2.0]])
        prev = None
        for theta in np.linspace(0.0, 40.0, 400):
            q = ComplexQuadraticForm(A=np.eye(2) + 1j * theta * S, b=np.zeros(2))
            val = gaussian_integral(q)
            if prev is not None:
                assert abs(val - prev) < 0.2 * abs(prev) + 1e-12
            prev = val

    def test_rejects_indefinite_real_part(self):
        q = ComplexQuadraticForm(A=np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
                                 b=np.zeros(2))
        with pytest.raises(ValueError):
            gaussian_integral(q)

    def test_rejects_asymmetric(self):
        q = ComplexQuadraticForm(A=np.array([[1.0, 0.5], [0.2, 1.0]], dtype=complex),
                                 b=np.zeros(2))
        with pytest.raises(ValueError):
            gaussian_integral(q)


class TestSpectralAmplitude:
    def test_peak_modulus_is_norm_const(self, spec_fig5):
        val = spectral_amplitude(spec_fig5, spec_fig5.k0, spec_fig5.K0)
        assert abs(val) == pytest.approx(spec_fig5.norm_const, rel=1e-14)

    def test_width_falloff(self, spec_fig5):
        s = spec_fig5
        for k, K in ((s.k0 + s.dk, s.K0), (s.k0 - s.dk, s.K0),
                     (s.k0, s.K0 + s.dK), (s.k0, s.K0 - s.dK)):
            ratio = abs(spectral_amplitude(s, k, K)) / s.norm_const
            assert ratio == pytest.approx(math.exp(-0.5), rel=1e-13)

    def test_unit_spectral_norm(self, spec_fig5):
        s = spec_fig5
        k = np.linspace(s.k0 - 6 * s.dk, s.k0 + 6 * s.dk, 801)
        K = np.linspace(s.K0 - 6 * s.dK, s.K0 + 6 * s.dK, 801)
        dens = np.abs(spectral_amplitude(s, k[:, None], K[None, :])) ** 2
        total = np.trapezoid(np.trapezoid(dens, K, axis=1), k, axis=0)
        assert total == pytest.approx(1.0, abs=1e-8)


class TestSpecInvariants:
    def test_rejects_bad_widths(self, params_fig5):
        with pytest.raises(ValueError):
            WavegroupSpec.from_params(params_fig5, dk=0.0, dK=2.0, x1c=-10, x2c=0)

    def test_rejects_wrong_order(self, params_fig5):
        with pytest.raises(ValueError):
            WavegroupSpec.from_params(params_fig5, dk=1.0, dK=2.0, x1c=1.0, x2c=0.0)

    def test_rejects_close_centres(self, params_fig5):
        with pytest.raises(ValueError):
            WavegroupSpec.from_params(params_fig5, dk=1.0, dK=2.0, x1c=-6.0, x2c=0.0)

    def test_rejects_inconsistent_centres(self, params_fig5):
        with pytest.raises(ValueError):
            WavegroupSpec(params=params_fig5, k0=1.0, dk=1.0, K0=90.0, dK=2.0,
                          x1c=-10.0, x2c=0.0)

    def test_wrong_side_defect_small(self, spec_fig5):
        assert spec_fig5.wrong_side_defect() < 1e-6


class TestClosedForm:
    def test_unit_norm_at_reference_time(self, spec_fig5):
        s = spec_fig5
        x1 = np.linspace(s.x1c - 8 / s.dk, s.x1c + 8 / s.dk, 601)
        x2 = np.linspace(s.x2c - 8 / s.dK, s.x2c + 8 / s.dK, 601)
        pdf = joint_pdf(s, x1[:, None], s.t0, x2[None, :], s.t0)
        total = np.trapezoid(np.trapezoid(pdf, x2, axis=1), x1, axis=0)
        assert total == pytest.approx(1.0, abs=1e-4)

    def test_boundary_condition_survives_superposition(self, spec_fig5, rng):
        peak = math.sqrt(spec_fig5.dk * spec_fig5.dK / math.pi)
        for _ in range(50):
            x = rng.uniform(-12, 25)
            t = rng.uniform(0.0, 1.0)
            amp = amplitude_closed(spec_fig5, SpacetimePoint(x, t, x, t))
            assert abs(amp) < 1e-10 * peak

    def test_dead_zone(self, spec_fig5):
        assert amplitude_closed(spec_fig5, SpacetimePoint(1.0, 0.1, 0.0, 0.1)) == 0.0

    def test_incident_peak_amplitude(self, spec_fig5):
        s = spec_fig5
        i_in, _ = amplitude_parts(s, SpacetimePoint(s.x1c, s.t0, s.x2c, s.t0))
        assert abs(i_in) == pytest.approx(math.sqrt(s.dk * s.dK / math.pi), rel=1e-12)

    def test_dispersion_monotone(self, spec_fig5):
        widths = [math.sqrt(incident_frame(spec_fig5, t, t)[1][0, 0])
                  for t in (0.0, 0.1, 0.3, 0.6)]
        assert all(b > a for a, b in zip(widths, widths[1:]))

    def test_fringe_stationarity(self, spec_fig2):
        # deep minima near the overlap centre stay put (to 2% of a fringe)
        # while the envelopes themselves move sixty times faster
        s = spec_fig2
        t_c = s.collision_time
        fringe = math.pi / s.K_rel0
        x_c = s.collision_point
        x2 = np.linspace(x_c - 1.0, x_c + 1.0, 40001)

        def minima(t):
            y = joint_pdf(s, x_c, t, x2, t)
            idx = np.where((np.diff(y)[:-1] < 0) & (np.diff(y)[1:] >= 0))[0] + 1
            keep = idx[(y[idx] < 0.2 * y.max())
                       & (np.abs(x2[idx] - x_c) < 4 * fringe)]
            return x2[keep]

        ma = minima(t_c)
        mb = minima(t_c + 0.02 * s.tau)
        assert ma.size >= 3 and mb.size >= 3
        for pos in ma:
            assert np.min(np.abs(mb - pos)) < 0.02 * fringe


class TestQuadratureOracle:
    def test_rejects_few_nodes(self, spec_fig5):
        with pytest.raises(ValueError):
            amplitude_quadrature(spec_fig5, SpacetimePoint(0, 0, 0, 0), nodes=16)

    def test_self_convergence(self, spec_fig5):
        s = spec_fig5
        pt = SpacetimePoint(s.collision_point - 0.4, s.collision_time,
                            s.collision_point + 0.2, s.collision_time)
        a64 = amplitude_quadrature(s, pt, nodes=64)
        a128 = amplitude_quadrature(s, pt, nodes=128)
        assert abs(a64 - a128) < 1e-10 * abs(a128)

    def test_incident_only_is_gaussian_packet_peak(self, spec_fig5):
        s = spec_fig5
        val = amplitude_quadrature(s, SpacetimePoint(s.x1c, s.t0, s.x2c, s.t0),
                                   nodes=96, part="incident")
        assert abs(val) == pytest.approx(math.sqrt(s.dk * s.dK / math.pi), rel=1e-10)

    def test_closed_matches_quadrature(self, spec_fig5, rng):
        s = spec_fig5
        for _ in range(200):
            t = rng.uniform(s.t0, s.collision_time + 2 * s.tau)
            branch = rng.integers(0, 2)
            frame = incident_frame if branch == 0 else reflected_frame
            centre, cov = frame(s, t, t)
            x1 = centre[0] + rng.uniform(-2, 2) * math.sqrt(cov[0, 0])
            x2 = centre[1] + rng.uniform(-2, 2) * math.sqrt(cov[1, 1])
            pt = SpacetimePoint(x1, t, x2, t)
            closed = amplitude_closed(s, pt)
            quad = amplitude_quadrature(s, pt, nodes=128)
            if pt.x1 > pt.x2:
                assert closed == 0.0 and quad == 0.0
                continue
            assert abs(closed - quad) <= 1e-8 * abs(quad)

    def test_raw_integrand_trapezoid(self, spec_fig5):
        """Fully independent route: the literal spectral integral, no shifted
        variables, trapezoid over +-6 sigma in (k, K)."""
        s = spec_fig5
        p = s.params
        a11, a12, a21, a22 = s._a
        t_c = s.collision_time
        for pt in (SpacetimePoint(s.collision_point - 0.3, t_c,
                                  s.collision_point + 0.1, t_c),
                   SpacetimePoint(s.x1c + p.v * 0.1 + 0.3, 0.1,
                                  s.x2c + p.V * 0.05 - 0.2, 0.05)):
            k = np.linspace(s.k0 - 6 * s.dk, s.k0 + 6 * s.dk, 901)[:, None]
            K = np.linspace(s.K0 - 6 * s.dK, s.K0 + 6 * s.dK, 901)[None, :]
            kr = a11 * k + a12 * K
            Kr = a21 * k + a22 * K
            amp = spectral_amplitude(s, k, K)
            phi_in = (k * pt.x1 - k**2 * pt.t1 / (2 * p.m)
                      + K * pt.x2 - K**2 * pt.t2 / (2 * p.M))
            phi_ref = (kr * pt.x1 - kr**2 * pt.t1 / (2 * p.m)
                       + Kr * pt.x2 - Kr**2 * pt.t2 / (2 * p.M))
            integrand = amp * (np.exp(1j * (phi_in % TWO_PI))
                               - np.exp(1j * (phi_ref % TWO_PI))) / TWO_PI
            brute = np.trapezoid(np.trapezoid(integrand, K[0], axis=1), k[:, 0], axis=0)
            closed = amplitude_closed(s, pt)
            assert abs(closed - brute) < 1e-7 * abs(closed)
