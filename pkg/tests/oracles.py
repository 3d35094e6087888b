"""Independent reference computations used to freeze expected test values.

Everything here deliberately avoids the package's own code paths: the KdV
integrator evaluates its phi-functions by series/closed forms instead of
contour averaging, soliton moments come from adaptive quadrature, measures
from brute-force enumeration, and shift distances from a dense scan.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad


# --- soliton moment oracle (adaptive quadrature over the real line) --------

def soliton_moment(c: float, power: int) -> float:
    """Integral over R of Q_c(x)^power with Q_c = 3c sech^2(sqrt(c)/2 x)."""
    a = 0.5 * math.sqrt(c)

    def integrand(x: float) -> float:
        return (3.0 * c / math.cosh(a * x) ** 2) ** power

    val, _ = quad(integrand, -60.0 / math.sqrt(c), 60.0 / math.sqrt(c), limit=400)
    return val


def soliton_gradient_moment(c: float) -> float:
    """Integral over R of (Q_c')^2."""
    a = 0.5 * math.sqrt(c)

    def integrand(x: float) -> float:
        s = 1.0 / math.cosh(a * x)
        t = math.tanh(a * x)
        return (-6.0 * c * a * s * s * t) ** 2

    val, _ = quad(integrand, -60.0 / math.sqrt(c), 60.0 / math.sqrt(c), limit=400)
    return val


# --- independent 1-D KdV integrator (series-based phi functions) ------------

def _phi(k: int, z: np.ndarray) -> np.ndarray:
    """phi_k(z) = sum_{j>=0} z^j / (j+k)!, via closed form away from 0."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    small = np.abs(z) < 0.25
    zb = z[~small]
    if k == 1:
        out[~small] = (np.exp(zb) - 1.0) / zb
    elif k == 2:
        out[~small] = (np.exp(zb) - 1.0 - zb) / zb**2
    elif k == 3:
        out[~small] = (np.exp(zb) - 1.0 - zb - 0.5 * zb**2) / zb**3
    else:
        raise ValueError(k)
    zs = z[small]
    acc = np.zeros_like(zs)
    term = np.ones_like(zs) / math.factorial(k)
    acc += term
    for j in range(1, 24):
        term = term * zs / (j + k)
        acc += term
    out[small] = acc
    return out


def kdv_reference(u0: np.ndarray, length: float, dt: float, n_steps: int) -> np.ndarray:
    """Integrate v_t + v v_x + v_xxx = 0 on a periodic grid of given length.

    Plain-FFT ETD-RK4 with phi coefficients from series/closed forms; the 2/3
    rule dealiases the quadratic term.
    """
    n = u0.size
    k_int = np.rint(np.fft.fftfreq(n) * n).astype(int)
    kappa = (2.0 * math.pi / length) * k_int
    keep = (np.abs(k_int) <= n // 3) & (k_int != -(n // 2))

    lin = 1j * kappa**3
    z = dt * lin
    exp_full = np.exp(z)
    exp_half = np.exp(0.5 * z)
    q_half = 0.5 * dt * _phi(1, 0.5 * z)
    f1 = dt * (_phi(1, z) - 3.0 * _phi(2, z) + 4.0 * _phi(3, z))
    f2 = dt * (_phi(2, z) - 2.0 * _phi(3, z))
    f3 = dt * (4.0 * _phi(3, z) - _phi(2, z))

    def nonlin(v: np.ndarray) -> np.ndarray:
        w = np.fft.ifft(np.where(keep, v, 0)).real
        return np.where(keep, -0.5j * kappa * np.fft.fft(w * w), 0)

    v = np.where(keep, np.fft.fft(u0).astype(complex), 0)
    for _ in range(n_steps):
        n1 = nonlin(v)
        a = exp_half * v + q_half * n1
        n2 = nonlin(a)
        b = exp_half * v + q_half * n2
        n3 = nonlin(b)
        c = exp_half * a + q_half * (2.0 * n3 - n1)
        n4 = nonlin(c)
        v = exp_full * v + f1 * n1 + 2.0 * f2 * (n2 + n3) + f3 * n4
    return np.fft.ifft(v).real


# --- brute-force helpers -----------------------------------------------------

def brute_lattice_count(poly: tuple[float, ...], window: tuple[float, float],
                        box: tuple[float, float], lam: float) -> int:
    """Count q in window cap lambda^{-1}Z with poly(q) in box, by enumeration."""
    first = math.ceil(window[0] * lam - 1e-9)
    last = math.floor(window[1] * lam + 1e-9)
    count = 0
    for m in range(first, last + 1):
        x = m / lam
        val = 0.0
        for coeff in poly:
            val = val * x + coeff
        if box[0] - 1e-12 <= val <= box[1] + 1e-12:
            count += 1
    return count


def brute_shift_distance(u_coeffs: np.ndarray, q_coeffs: np.ndarray,
                         weight: np.ndarray, area: float, xi: np.ndarray,
                         length: float, oversample: int = 10) -> tuple[float, float]:
    """Dense scan of ||u - Q(.-a)||_w over oversampled shifts."""
    n = xi.size
    best = (math.inf, 0.0)
    for m in range(n * oversample):
        a = m * length / (n * oversample)
        shifted = q_coeffs * np.exp(-1j * xi[:, None] * a)
        d2 = float(np.sum(weight * np.abs(u_coeffs - shifted) ** 2)) / area
        if d2 < best[0]:
            best = (d2, a)
    d2, a = best
    a = (a + 0.5 * length) % length - 0.5 * length
    return math.sqrt(max(d2, 0.0)), a
