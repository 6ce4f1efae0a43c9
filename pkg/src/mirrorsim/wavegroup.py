"""Gaussian-spectrum two-body wavegroups evaluated in closed form.

A wavegroup superposes the two-time plane-wave pairs of :mod:`.harmonic`
with a Gaussian spectral weight in (k, K). Because the reflected
wavevectors are linear in (k, K), both the incident and the reflected
spectral integrals are two-dimensional Gaussian integrals with complex
symmetric quadratic forms, evaluated exactly here. An independent
Gauss-Hermite quadrature of the same integrals serves as the oracle.

Numerical layout
----------------
The integration variables are shifted to the spectral centre, so the
closed form splits into

    I = C * exp(i*Phi0) * G(A, b)

where Phi0 is the (possibly astronomically large) carrier phase at the
central wavevectors and G is a well-conditioned Gaussian integral. Only
the *difference* of the incident and reflected carrier phases is
physical for densities and currents; it is computed in closed form
(never as a difference of large floats), so PDFs, marginals, conditional
densities and currents remain accurate even when the absolute carrier
phase exceeds float precision. The absolute phase of a single amplitude
is reduced modulo 2*pi and is meaningful only while |Phi0| stays well
below 1/eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from .harmonic import SpacetimePoint
from .kinematics import PhysicalParams

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# complex Gaussian integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexQuadraticForm:
    """Quadratic data of a 2D Gaussian integrand exp(-u^T A u / 2 + b^T u + c).

    ``A`` is a 2x2 complex symmetric matrix whose real part must be positive
    definite for the integral to converge.
    """

    A: np.ndarray
    b: np.ndarray
    c: complex = 0.0


def _sqrt_det2(a11, a12, a22):
    """Branch-continuous sqrt(det A) for 2x2 complex symmetric A, Re(A) > 0.

    Writing A = D + iS with D positive definite, det A factors as
    det(D) * det(I + iT) with T = D^{-1/2} S D^{-1/2}; the principal square
    root of det(I + iT) equals the product of the principal roots of its
    eigenvalue factors (their arguments each lie in (-pi/2, pi/2)), which is
    the branch that connects continuously to the real-A case.
    """
    d11, d12, d22 = a11.real, a12.real, a22.real
    s11, s12, s22 = a11.imag, a12.imag, a22.imag
    det_d = d11 * d22 - d12 * d12
    det_s = s11 * s22 - s12 * s12
    # tr(D^{-1} S) for 2x2
    tr_t = (d22 * s11 - 2.0 * d12 * s12 + d11 * s22) / det_d
    det_factor = (1.0 - det_s / det_d) + 1j * tr_t
    return np.sqrt(det_d) * np.sqrt(det_factor)


def _gauss2(a11, a12, a22, b1, b2, c=0.0):
    """Closed form of the 2D integral for broadcastable component arrays."""
    det_a = a11 * a22 - a12 * a12
    q1 = (a22 * b1 - a12 * b2) / det_a
    q2 = (a11 * b2 - a12 * b1) / det_a
    expo = 0.5 * (b1 * q1 + b2 * q2) + c
    return _TWO_PI / _sqrt_det2(a11, a12, a22) * np.exp(expo)


def gaussian_integral(q: ComplexQuadraticForm) -> complex:
    """Exact value of the 2D Gaussian integral of a ComplexQuadraticForm.

    Returns (2*pi / sqrt(det A)) * exp(b^T A^{-1} b / 2 + c) with the
    determinant branch chosen continuously from the real-A case. Raises if
    Re(A) is not positive definite or A is not symmetric.
    """
    A = np.asarray(q.A, dtype=complex)
    b = np.asarray(q.b, dtype=complex)
    if A.shape != (2, 2) or b.shape != (2,):
        raise ValueError("expected a 2x2 matrix and a 2-vector")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-13 * max(1.0, np.abs(A).max())):
        raise ValueError("A must be symmetric")
    D = A.real
    if not (D[0, 0] > 0 and np.linalg.det(D) > 0):
        raise ValueError("Re(A) must be positive definite")
    return complex(_gauss2(A[0, 0], A[0, 1], A[1, 1], b[0], b[1], q.c))


# ---------------------------------------------------------------------------
# wavegroup specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WavegroupSpec:
    """Gaussian spectral amplitudes and initial packet centres.

    The spectral weight is exp[-(k-k0)^2/(2 dk^2)] exp[-(K-K0)^2/(2 dK^2)]
    with linear phases centring the packets at (x1c, x2c) at the reference
    time t0, normalised to unit total probability. The packet centres must
    be separated widely enough that the incident packet's weight on the
    unphysical side x1 > x2 is negligible.
    """

    params: PhysicalParams
    k0: float
    dk: float
    K0: float
    dK: float
    x1c: float
    x2c: float
    t0: float = 0.0

    def __post_init__(self):
        if not (self.dk > 0 and self.dK > 0):
            raise ValueError("spectral widths must be positive")
        if not self.x1c < self.x2c:
            raise ValueError("particle centre must start left of the mirror centre")
        sep = self.x2c - self.x1c
        if not sep > 5.0 * (1.0 / self.dk + 1.0 / self.dK):
            raise ValueError("packet centres closer than five combined widths")
        p = self.params
        if not (math.isclose(self.k0, p.k, rel_tol=1e-9, abs_tol=0.0)
                and math.isclose(self.K0, p.K, rel_tol=1e-9, abs_tol=1e-300)):
            raise ValueError("spectral centres inconsistent with params velocities")
        if self.wrong_side_defect() > 1e-6:
            raise ValueError("wrong-side probability defect exceeds 1e-6")

    @classmethod
    def from_params(cls, params: PhysicalParams, dk: float, dK: float,
                    x1c: float, x2c: float, t0: float = 0.0) -> "WavegroupSpec":
        return cls(params=params, k0=params.k, dk=dk, K0=params.K, dK=dK,
                   x1c=x1c, x2c=x2c, t0=t0)

    # collision kinematics of the spectral centre
    @property
    def _a(self) -> tuple[float, float, float, float]:
        m, M = self.params.m, self.params.M
        s = m + M
        return (m - M) / s, 2.0 * m / s, 2.0 * M / s, (M - m) / s

    @property
    def k_ref0(self) -> float:
        a11, a12, _, _ = self._a
        return a11 * self.k0 + a12 * self.K0

    @property
    def K_ref0(self) -> float:
        _, _, a21, a22 = self._a
        return a21 * self.k0 + a22 * self.K0

    @property
    def K_rel0(self) -> float:
        p = self.params
        return (p.M * self.k0 - p.m * self.K0) / (p.m + p.M)

    @property
    def beat0(self) -> float:
        """Central beat frequency, the phase-advance rate of the cross term."""
        p = self.params
        return p.hbar * self.K_rel0 * (self.k0 + self.K0) / (p.m + p.M)

    @property
    def norm_const(self) -> float:
        """Spectral normalisation 1/sqrt(pi dk dK); unit norm with the 1/2pi transform."""
        return 1.0 / math.sqrt(math.pi * self.dk * self.dK)

    @property
    def collision_time(self) -> float:
        return self.t0 + (self.x2c - self.x1c) / (self.params.v - self.params.V)

    @property
    def collision_point(self) -> float:
        return self.x1c + self.params.v * (self.collision_time - self.t0)

    @property
    def tau(self) -> float:
        """Overlap time scale: incident and reflected centroids separate by
        twice the particle packet width 2/dk in this time."""
        return 4.0 / (self.dk * (self.params.v - self.params.V))

    def wrong_side_defect(self) -> float:
        """Incident-packet probability on x1 > x2 at t0 (Gaussian tail)."""
        var = 0.5 / self.dk**2 + 0.5 / self.dK**2
        return 0.5 * math.erfc((self.x2c - self.x1c) / math.sqrt(2.0 * var))


def spectral_amplitude(spec: WavegroupSpec, k, K):
    """Normalised Gaussian spectral weight with packet-centring phases."""
    k = np.asarray(k, dtype=float)
    K = np.asarray(K, dtype=float)
    env = np.exp(-((k - spec.k0) ** 2) / (2.0 * spec.dk**2)
                 - ((K - spec.K0) ** 2) / (2.0 * spec.dK**2))
    phase = np.exp(-1j * np.remainder(k * spec.x1c + K * spec.x2c, _TWO_PI))
    return spec.norm_const * env * phase


# ---------------------------------------------------------------------------
# closed-form evaluation
# ---------------------------------------------------------------------------

def _fields(spec: WavegroupSpec, x1, t1, x2, t2, *, detune: float = 1.0,
            reflected_weight: float = 1.0, gradients: bool = False,
            logs: bool = False) -> SimpleNamespace:
    """Evaluate both spectral integrals at broadcastable coordinate arrays.

    Returns F_in and F_ref such that the full amplitudes are
    exp(i*phase0) * F and the physical state is exp(i*phase0) *
    (F_in - F_ref) * theta(x2 - x1). ``detune`` scales the reflected
    carrier wavevectors without touching the energies (a deliberately
    broken field for negative-control tests); ``reflected_weight``
    linearly rescales the reflected branch. ``logs`` adds complex
    log-amplitudes assembled before exponentiation, usable where the
    envelope factors themselves underflow.
    """
    p = spec.params
    m, M, hb = p.m, p.M, p.hbar
    a11, a12, a21, a22 = spec._a
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    tau1 = np.asarray(t1, dtype=float) - spec.t0
    tau2 = np.asarray(t2, dtype=float) - spec.t0

    k0, K0 = spec.k0, spec.K0
    kr0, Kr0 = spec.k_ref0, spec.K_ref0
    v0, V0 = hb * k0 / m, hb * K0 / M
    vr0, Vr0 = hb * kr0 / m, hb * Kr0 / M
    w1, w2 = hb * k0**2 / (2 * m), hb * K0**2 / (2 * M)

    c1, c2 = hb * tau1 / m, hb * tau2 / M  # chirp coefficients

    # incident quadratic form (diagonal)
    ai11 = 1.0 / spec.dk**2 + 1j * c1
    ai22 = 1.0 / spec.dK**2 + 1j * c2
    bi1 = x1 - spec.x1c - v0 * tau1
    bi2 = x2 - spec.x2c - V0 * tau2
    qi1 = bi1 / ai11
    qi2 = bi2 / ai22
    sqrt_det_in = np.sqrt(ai11) * np.sqrt(ai22)
    expo_in = -0.5 * (bi1 * qi1 + bi2 * qi2)
    g_in = _TWO_PI / sqrt_det_in * np.exp(expo_in)

    # reflected quadratic form (coupled)
    ar11 = 1.0 / spec.dk**2 + 1j * (c1 * a11 * a11 + c2 * a21 * a21)
    ar12 = 1j * (c1 * a11 * a12 + c2 * a21 * a22)
    ar22 = 1.0 / spec.dK**2 + 1j * (c1 * a12 * a12 + c2 * a22 * a22)
    y1 = x1 - vr0 * tau1
    y2 = x2 - Vr0 * tau2
    br1 = a11 * y1 + a21 * y2 - spec.x1c
    br2 = a12 * y1 + a22 * y2 - spec.x2c
    det_r = ar11 * ar22 - ar12 * ar12
    qr1 = (ar22 * br1 - ar12 * br2) / det_r
    qr2 = (ar11 * br2 - ar12 * br1) / det_r
    sqrt_det_ref = _sqrt_det2(ar11, ar12, ar22)
    expo_ref = -0.5 * (br1 * qr1 + br2 * qr2)
    g_ref = _TWO_PI / sqrt_det_ref * np.exp(expo_ref)

    # carrier phases: absolute one reduced mod 2*pi, difference kept exact
    phase0 = np.remainder(
        k0 * (x1 - spec.x1c) + K0 * (x2 - spec.x2c) - w1 * tau1 - w2 * tau2, _TWO_PI
    )
    dphase = -2.0 * spec.K_rel0 * (x1 - x2) + 2.0 * spec.beat0 * (tau1 - tau2)
    if detune != 1.0:
        dphase = dphase + (detune - 1.0) * (kr0 * x1 + Kr0 * x2)

    pref = spec.norm_const / _TWO_PI
    f_in = pref * g_in
    f_ref = reflected_weight * pref * np.exp(1j * np.remainder(dphase, _TWO_PI)) * g_ref

    out = SimpleNamespace(
        F_in=f_in,
        F_ref=f_ref,
        phase0=phase0,
        physical=x1 <= x2,
    )
    if logs:
        log_pref = math.log(pref) + math.log(_TWO_PI)
        out.log_in = log_pref - np.log(sqrt_det_in) + expo_in
        out.log_ref = (log_pref - np.log(sqrt_det_ref) + expo_ref
                       + 1j * np.remainder(dphase, _TWO_PI))
    if gradients:
        # log-derivatives of the full amplitudes (carrier included)
        out.Lin1 = 1j * k0 - qi1
        out.Lin2 = 1j * K0 - qi2
        out.Lref1 = 1j * detune * kr0 - (a11 * qr1 + a12 * qr2)
        out.Lref2 = 1j * detune * Kr0 - (a21 * qr1 + a22 * qr2)
    return out


def amplitude_parts(spec: WavegroupSpec, pt: SpacetimePoint):
    """Incident and reflected closed-form amplitudes (no step function)."""
    f = _fields(spec, pt.x1, pt.t1, pt.x2, pt.t2)
    common = np.exp(1j * f.phase0)
    return common * f.F_in, common * f.F_ref


def amplitude_closed(spec: WavegroupSpec, pt: SpacetimePoint):
    """Full wavegroup amplitude (incident - reflected) * theta(x2 - x1)."""
    f = _fields(spec, pt.x1, pt.t1, pt.x2, pt.t2)
    amp = np.exp(1j * f.phase0) * (f.F_in - f.F_ref)
    return np.where(f.physical, amp, 0.0 + 0.0j)


def joint_pdf(spec: WavegroupSpec, x1, t1, x2, t2, *, detune: float = 1.0,
              reflected_weight: float = 1.0, apply_step: bool = True):
    """|Psi|^2 on the physical domain, stable at any carrier-phase magnitude.

    ``apply_step=False`` evaluates the smooth closed form everywhere; the
    conservation checks use that branch, on which the coordinate-pair
    evolutions are exactly unitary.
    """
    f = _fields(spec, x1, t1, x2, t2, detune=detune, reflected_weight=reflected_weight)
    val = np.abs(f.F_in - f.F_ref) ** 2
    if not apply_step:
        return val
    return np.where(f.physical, val, 0.0)


def currents(spec: WavegroupSpec, x1, t1, x2, t2, *, detune: float = 1.0,
             reflected_weight: float = 1.0):
    """Probability currents (j1, j2) from analytic derivatives of the amplitude.

    Carrier phases cancel in Psi* dPsi, so both currents stay accurate in
    regimes where the absolute amplitude phase does not.
    """
    p = spec.params
    f = _fields(spec, x1, t1, x2, t2, detune=detune,
                reflected_weight=reflected_weight, gradients=True)
    psi = f.F_in - f.F_ref
    dpsi1 = f.F_in * f.Lin1 - f.F_ref * f.Lref1
    dpsi2 = f.F_in * f.Lin2 - f.F_ref * f.Lref2
    j1 = p.hbar / p.m * np.imag(np.conj(psi) * dpsi1)
    j2 = p.hbar / p.M * np.imag(np.conj(psi) * dpsi2)
    return j1, j2


# ---------------------------------------------------------------------------
# packet tracking (framing helpers)
# ---------------------------------------------------------------------------

def incident_frame(spec: WavegroupSpec, t1: float, t2: float):
    """Centre and intensity covariance of the incident packet at (t1, t2)."""
    p = spec.params
    tau1, tau2 = t1 - spec.t0, t2 - spec.t0
    centre = np.array([
        spec.x1c + p.v * tau1,
        spec.x2c + p.V * tau2,
    ])
    a11 = 1.0 / spec.dk**2 + 1j * p.hbar * tau1 / p.m
    a22 = 1.0 / spec.dK**2 + 1j * p.hbar * tau2 / p.M
    cov = np.diag([abs(a11) ** 2 / (2.0 * a11.real), abs(a22) ** 2 / (2.0 * a22.real)])
    return centre, cov


def reflected_frame(spec: WavegroupSpec, t1: float, t2: float):
    """Centre and intensity covariance of the reflected packet at (t1, t2)."""
    p = spec.params
    m, M, hb = p.m, p.M, p.hbar
    a11, a12, a21, a22 = spec._a
    tau1, tau2 = t1 - spec.t0, t2 - spec.t0
    vr0, Vr0 = hb * spec.k_ref0 / m, hb * spec.K_ref0 / M
    E = np.array([[a11, a21], [a12, a22]])
    shift = np.linalg.solve(E, np.array([spec.x1c, spec.x2c]))
    centre = np.array([vr0 * tau1 + shift[0], Vr0 * tau2 + shift[1]])
    c1, c2 = hb * tau1 / m, hb * tau2 / M
    A = np.array([
        [1.0 / spec.dk**2 + 1j * (c1 * a11 * a11 + c2 * a21 * a21),
         1j * (c1 * a11 * a12 + c2 * a21 * a22)],
        [1j * (c1 * a11 * a12 + c2 * a21 * a22),
         1.0 / spec.dK**2 + 1j * (c1 * a12 * a12 + c2 * a22 * a22)],
    ])
    re_ainv = np.linalg.inv(A).real
    q_form = E.T @ re_ainv @ E
    cov = np.linalg.inv(2.0 * q_form)
    return centre, cov


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------

def amplitude_quadrature(spec: WavegroupSpec, pt: SpacetimePoint, nodes: int = 64,
                         part: str = "both"):
    """Tensor-product Gauss-Hermite evaluation of the same spectral integrals.

    The spectral variables are shifted to the Gaussian centres, so the node
    sums converge whenever the residual chirp hbar dk^2 |t - t0| / m (and the
    mirror analogue) stays well below the node count. ``part`` selects
    "incident", "reflected" or "both" (with the step function applied).
    """
    if nodes < 32:
        raise ValueError("need at least 32 quadrature nodes per axis")
    p = spec.params
    m, M, hb = p.m, p.M, p.hbar
    a11, a12, a21, a22 = spec._a
    s, w = np.polynomial.hermite.hermgauss(nodes)
    kap = math.sqrt(2.0) * spec.dk * s[:, None]
    Kap = math.sqrt(2.0) * spec.dK * s[None, :]
    w2 = (w[:, None] * w[None, :]) * (2.0 * spec.dk * spec.dK)

    tau1, tau2 = pt.t1 - spec.t0, pt.t2 - spec.t0
    k0, K0 = spec.k0, spec.K0
    v0, V0 = hb * k0 / m, hb * K0 / M
    vr0, Vr0 = hb * spec.k_ref0 / m, hb * spec.K_ref0 / M
    w1, w2c = hb * k0**2 / (2 * m), hb * K0**2 / (2 * M)
    pref = spec.norm_const / _TWO_PI

    phase0 = np.remainder(
        k0 * (pt.x1 - spec.x1c) + K0 * (pt.x2 - spec.x2c) - w1 * tau1 - w2c * tau2,
        _TWO_PI,
    )
    dphase = (-2.0 * spec.K_rel0 * (pt.x1 - pt.x2)
              + 2.0 * spec.beat0 * (tau1 - tau2))

    i_in = i_ref = 0.0 + 0.0j
    if part in ("incident", "both"):
        ph = (kap * (pt.x1 - spec.x1c - v0 * tau1)
              + Kap * (pt.x2 - spec.x2c - V0 * tau2)
              - hb * tau1 / (2 * m) * kap**2
              - hb * tau2 / (2 * M) * Kap**2)
        s_in = np.sum(w2 * np.exp(1j * np.remainder(ph, _TWO_PI)))
        i_in = pref * np.exp(1j * phase0) * s_in
    if part in ("reflected", "both"):
        dk_ = a11 * kap + a12 * Kap
        dK_ = a21 * kap + a22 * Kap
        ph = (dk_ * (pt.x1 - vr0 * tau1) + dK_ * (pt.x2 - Vr0 * tau2)
              - kap * spec.x1c - Kap * spec.x2c
              - hb * tau1 / (2 * m) * dk_**2
              - hb * tau2 / (2 * M) * dK_**2)
        s_ref = np.sum(w2 * np.exp(1j * np.remainder(ph, _TWO_PI)))
        i_ref = pref * np.exp(1j * (phase0 + np.remainder(dphase, _TWO_PI))) * s_ref

    if part == "incident":
        return i_in
    if part == "reflected":
        return i_ref
    if pt.x1 > pt.x2:
        return 0.0 + 0.0j
    return i_in - i_ref
