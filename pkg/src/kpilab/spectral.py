"""Fourier-side core for fields on the rectangle [-Lx/2, Lx/2) x [0, 2*pi*lambda_y).

The x direction approximates the real line by a long periodic box; the y
direction is a circle of circumference 2*pi*lambda_y, so x-frequencies live on
(2*pi/Lx)*Z and y-frequencies on lambda_y^{-1}*Z.  The discrete transform pair
is normalized like the integral transform it approximates:

    fhat(xi, q) = sum_{x,y} u(x,y) exp(-i(xi*x + q*y)) dx dy
    u(x, y)     = (1 / (Lx * 2*pi*lambda_y)) * sum_{xi,q} fhat exp(+i(xi*x + q*y))

so that Parseval reads  sum u^2 dx dy = sum |fhat|^2 / (Lx * 2*pi*lambda_y)
with no hidden constants, and the weighted-norm identity

    (1 + xi^2) * (1 + q^2 / (xi^2 * (1 + xi^2)))  =  1 + xi^2 + q^2/xi^2

is exact in floating point.

Two hard conventions, applied by every operator in this module:

* Nyquist modes are always zeroed (they carry no sign information for real
  data and break Hermitian symmetry under odd-order symbols).
* The dispersion symbol is extended by omega(0, q) := 0; the singular ray
  xi = 0 is excluded by the zero-x-mean constraint fhat(0, q != 0) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ConstraintViolation, DomainError, SymmetryViolation

__all__ = [
    "CHI_PLATEAU",
    "CHI_SUPPORT",
    "FrequencyPair",
    "Grid",
    "RealField",
    "SpectralField",
    "apply_linear_group",
    "bump_chi",
    "dispersion_symbol",
    "energy",
    "energy_norm",
    "forward_transform",
    "hamiltonian_c",
    "inverse_transform",
    "is_dyadic",
    "l2_norm",
    "lp_projector",
    "lp_projector_leq",
    "mass",
    "project_zero_x_mean",
    "weight_p",
    "x_antiderivative",
    "x_derivative",
    "y_derivative",
]

# chi == 1 on [-5/4, 5/4] and chi == 0 outside [-8/5, 8/5]
CHI_PLATEAU = 1.25
CHI_SUPPORT = 1.6

_SYMMETRY_TOL = 1e-10
_CONSTRAINT_TOL = 1e-10


class FrequencyPair(NamedTuple):
    """A point zeta = (xi, q) in the frequency plane."""

    xi: float
    q: float


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def is_dyadic(m: float) -> bool:
    """True when m is an exact power of two (positive, any integer exponent)."""
    if not (m > 0.0 and math.isfinite(m)):
        return False
    mantissa, _ = math.frexp(m)
    return mantissa == 0.5


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on [-Lx/2, Lx/2) x [0, 2*pi*lambda_y)."""

    nx: int
    ny: int
    length_x: float
    lambda_y: float = 1.0

    def __post_init__(self) -> None:
        if not (_is_power_of_two(self.nx) and self.nx >= 16):
            raise DomainError(f"nx must be a power of two >= 16, got {self.nx}")
        if not (_is_power_of_two(self.ny) and self.ny >= 4):
            raise DomainError(f"ny must be a power of two >= 4, got {self.ny}")
        if not (self.length_x > 0.0 and math.isfinite(self.length_x)):
            raise DomainError(f"length_x must be positive, got {self.length_x}")
        if not (self.lambda_y >= 1.0 and math.isfinite(self.lambda_y)):
            raise DomainError(f"lambda_y must be >= 1, got {self.lambda_y}")

    @property
    def dx(self) -> float:
        return self.length_x / self.nx

    @property
    def dy(self) -> float:
        return 2.0 * math.pi * self.lambda_y / self.ny

    @property
    def length_y(self) -> float:
        return 2.0 * math.pi * self.lambda_y

    @property
    def area(self) -> float:
        return self.length_x * self.length_y

    @cached_property
    def x(self) -> np.ndarray:
        return -0.5 * self.length_x + self.dx * np.arange(self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return self.dy * np.arange(self.ny)

    @cached_property
    def kx_index(self) -> np.ndarray:
        """Integer x mode numbers in FFT layout (0..nx/2-1, -nx/2..-1)."""
        return np.rint(np.fft.fftfreq(self.nx) * self.nx).astype(np.int64)

    @cached_property
    def ky_index(self) -> np.ndarray:
        return np.rint(np.fft.fftfreq(self.ny) * self.ny).astype(np.int64)

    @cached_property
    def xi(self) -> np.ndarray:
        """x frequencies 2*pi*k/Lx in FFT layout."""
        return (2.0 * math.pi / self.length_x) * self.kx_index

    @cached_property
    def q(self) -> np.ndarray:
        """y frequencies k/lambda_y in FFT layout."""
        return self.ky_index / self.lambda_y

    @cached_property
    def xi_col(self) -> np.ndarray:
        return self.xi[:, None]

    @cached_property
    def q_row(self) -> np.ndarray:
        return self.q[None, :]

    @cached_property
    def nyquist_free(self) -> np.ndarray:
        """Boolean mask: True away from the Nyquist rows/columns."""
        keep_x = self.kx_index != -(self.nx // 2)
        keep_y = self.ky_index != -(self.ny // 2)
        return keep_x[:, None] & keep_y[None, :]

    @cached_property
    def x_phase(self) -> np.ndarray:
        """(-1)^k column compensating the x origin at -Lx/2."""
        return np.where(self.kx_index % 2 == 0, 1.0, -1.0)[:, None]

    @cached_property
    def dealias_free(self) -> np.ndarray:
        """Two-thirds-rule mask for quadratic products."""
        keep_x = np.abs(self.kx_index) <= self.nx // 3
        keep_y = np.abs(self.ky_index) <= self.ny // 3
        return keep_x[:, None] & keep_y[None, :]

    @cached_property
    def energy_weight(self) -> np.ndarray:
        """1 + xi^2 + q^2/xi^2, with the xi = 0 column set to 1.

        Valid only on constraint-satisfying fields, where the xi = 0,
        q != 0 coefficients vanish and contribute nothing.
        """
        xi2 = self.xi_col**2
        safe = np.where(xi2 == 0.0, 1.0, xi2)
        w = 1.0 + xi2 + np.where(xi2 == 0.0, 0.0, self.q_row**2 / safe)
        return np.broadcast_to(w, (self.nx, self.ny))


@dataclass(frozen=True)
class RealField:
    """Real-valued samples u(x, y) on a grid, indexed [ix, iy]."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.nx, self.grid.ny):
            raise DomainError(
                f"values shape {v.shape} does not match grid ({self.grid.nx}, {self.grid.ny})"
            )
        if not np.all(np.isfinite(v)):
            raise DomainError("field values must be finite")
        object.__setattr__(self, "values", v)

    def linf(self) -> float:
        return float(np.abs(self.values).max())


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients fhat(xi, q) on a grid, FFT mode layout, [ikx, iky]."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.nx, self.grid.ny):
            raise DomainError(
                f"coeffs shape {c.shape} does not match grid ({self.grid.nx}, {self.grid.ny})"
            )
        object.__setattr__(self, "coeffs", c)


def _hermitian_reflection(coeffs: np.ndarray) -> np.ndarray:
    """Return the array r with r[i, j] = coeffs[-i mod nx, -j mod ny]."""
    return np.roll(coeffs[::-1, ::-1], 1, axis=(0, 1))


def hermitian_defect(f: SpectralField) -> float:
    """Max absolute deviation from fhat(-xi,-q) = conj(fhat(xi,q))."""
    return float(np.abs(f.coeffs - np.conj(_hermitian_reflection(f.coeffs))).max())


def constraint_defect(f: SpectralField) -> float:
    """Max |fhat(0, q)| over q != 0."""
    return float(np.abs(f.coeffs[0, 1:]).max())


def _check_constraint(f: SpectralField) -> None:
    scale = max(float(np.abs(f.coeffs).max()), 1e-300)
    if constraint_defect(f) > _CONSTRAINT_TOL * scale:
        raise ConstraintViolation(
            "zero-x-mean constraint violated: fhat(0, q != 0) "
            f"reaches {constraint_defect(f):.3e} (scale {scale:.3e})"
        )


def project_zero_x_mean(f: SpectralField) -> SpectralField:
    """Zero the coefficients fhat(0, q) for q != 0 (and the Nyquist modes)."""
    c = np.where(f.grid.nyquist_free, f.coeffs, 0.0)
    c[0, 1:] = 0.0
    return SpectralField(f.grid, c)


def forward_transform(u: RealField) -> SpectralField:
    """Riemann-sum Fourier transform; Nyquist modes are dropped."""
    g = u.grid
    coeffs = np.fft.fft2(u.values) * (g.dx * g.dy) * g.x_phase
    coeffs[~g.nyquist_free] = 0.0
    return SpectralField(g, coeffs)


def inverse_transform(f: SpectralField) -> RealField:
    """Inverse transform back to real samples.

    Raises SymmetryViolation when the coefficients are not Hermitian
    symmetric (relative defect above 1e-10); the sub-roundoff imaginary
    residue of the inverse FFT is discarded.
    """
    g = f.grid
    scale = max(float(np.abs(f.coeffs).max()), 1e-300)
    if hermitian_defect(f) > _SYMMETRY_TOL * scale:
        raise SymmetryViolation(
            f"coefficients are not Hermitian symmetric (defect {hermitian_defect(f):.3e}, "
            f"scale {scale:.3e})"
        )
    u = np.fft.ifft2(f.coeffs * g.x_phase) / (g.dx * g.dy)
    return RealField(g, u.real)


def dispersion_symbol(zeta: FrequencyPair | tuple[float, float]) -> float:
    """omega(xi, q) = xi^3 + q^2/xi, with omega(0, q) := 0 by convention."""
    xi, q = float(zeta[0]), float(zeta[1])
    if xi == 0.0:
        return 0.0
    return xi**3 + q * q / xi


def _dispersion_grid(grid: Grid, epsilon_sign: int = -1) -> np.ndarray:
    """Linear symbol xi^3 - epsilon*q^2/xi on the lattice; xi = 0 row -> 0."""
    xi = grid.xi_col
    safe = np.where(xi == 0.0, 1.0, xi)
    omega = xi**3 - epsilon_sign * np.where(xi == 0.0, 0.0, grid.q_row**2 / safe)
    return np.broadcast_to(omega, (grid.nx, grid.ny)).copy()


def apply_linear_group(f: SpectralField, t: float) -> SpectralField:
    """Multiply by exp(i*t*omega); unitary, so the L2 norm is preserved."""
    _check_constraint(f)
    phase = np.exp(1j * t * _dispersion_grid(f.grid))
    c = f.coeffs * phase
    c[~f.grid.nyquist_free] = 0.0
    return SpectralField(f.grid, c)


def x_derivative(f: SpectralField) -> SpectralField:
    c = f.coeffs * (1j * f.grid.xi_col)
    c[~f.grid.nyquist_free] = 0.0
    return SpectralField(f.grid, c)


def y_derivative(f: SpectralField) -> SpectralField:
    c = f.coeffs * (1j * f.grid.q_row)
    c[~f.grid.nyquist_free] = 0.0
    return SpectralField(f.grid, c)


def x_antiderivative(f: SpectralField) -> SpectralField:
    """Divide by i*xi; requires fhat(0, q) = 0 for every q, mean included."""
    g = f.grid
    scale = max(float(np.abs(f.coeffs).max()), 1e-300)
    if float(np.abs(f.coeffs[0, :]).max()) > _CONSTRAINT_TOL * scale:
        raise ConstraintViolation(
            "x_antiderivative needs fhat(0, q) = 0 for all q; "
            f"max |fhat(0, .)| = {float(np.abs(f.coeffs[0, :]).max()):.3e}"
        )
    xi = g.xi_col
    safe = np.where(xi == 0.0, 1.0, xi)
    c = f.coeffs / (1j * safe)
    c[0, :] = 0.0
    c[~g.nyquist_free] = 0.0
    return SpectralField(g, c)


def weight_p(zeta: FrequencyPair | tuple[float, float]) -> float:
    """Anisotropic weight <<xi>^{-1} q/xi> with <s> = sqrt(1 + s^2)."""
    xi, q = float(zeta[0]), float(zeta[1])
    if xi == 0.0:
        raise DomainError("weight_p is undefined on the ray xi = 0")
    s = q / (xi * math.sqrt(1.0 + xi * xi))
    return math.sqrt(1.0 + s * s)


def l2_norm(u: RealField) -> float:
    g = u.grid
    return math.sqrt(float(np.sum(u.values**2)) * g.dx * g.dy)


def _l2_norm_spectral(f: SpectralField) -> float:
    return math.sqrt(float(np.sum(np.abs(f.coeffs) ** 2)) / f.grid.area)


def energy_norm_spectral(f: SpectralField) -> float:
    """Weighted-coefficient energy norm; assumes the constraint was checked."""
    g = f.grid
    return math.sqrt(float(np.sum(g.energy_weight * np.abs(f.coeffs) ** 2)) / g.area)


def energy_norm(u: RealField) -> float:
    """sqrt(||u||^2 + ||u_x||^2 + ||dx^{-1} dy u||^2) via the weighted sum."""
    f = forward_transform(u)
    _check_constraint(f)
    return energy_norm_spectral(f)


def mass(u: RealField) -> float:
    """Integral of u^2 over the rectangle."""
    return float(np.sum(u.values**2)) * u.grid.dx * u.grid.dy


def energy(u: RealField) -> float:
    """Integral of (u_x)^2 + (dx^{-1} dy u)^2 - u^3/3."""
    f = forward_transform(u)
    _check_constraint(f)
    f = project_zero_x_mean(f)  # snap sub-tolerance round-off to exact zeros
    ux = inverse_transform(x_derivative(f)).values
    w = inverse_transform(x_antiderivative(y_derivative(f))).values
    integrand = ux**2 + w**2 - u.values**3 / 3.0
    return float(np.sum(integrand)) * u.grid.dx * u.grid.dy


def hamiltonian_c(u: RealField, c: float) -> float:
    """Moving-frame Hamiltonian: energy + c * mass."""
    return energy(u) + c * mass(u)


def bump_chi(x):
    """Smooth even cutoff: 1 on [-5/4, 5/4], 0 outside [-8/5, 8/5].

    Realized with the standard exp(-1/t) transition, so it is C-infinity
    and monotone on each transition band.  Accepts scalars or arrays.
    """
    ax = np.abs(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    t = np.clip((CHI_SUPPORT - ax) / (CHI_SUPPORT - CHI_PLATEAU), 0.0, 1.0)

    def _f(s):
        out = np.zeros_like(s)
        pos = s > 0.0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    num = _f(t)
    den = num + _f(1.0 - t)
    chi = num / den
    if np.ndim(x) == 0:
        return float(chi[0])
    return chi.reshape(np.shape(x))


def _eta_m(xi: np.ndarray, m: float) -> np.ndarray:
    return bump_chi(xi / m) - bump_chi(2.0 * xi / m)


def _require_dyadic(m: float) -> None:
    if not is_dyadic(m):
        raise DomainError(f"scale must be a power of two, got {m}")


def lp_projector(f: SpectralField, m: float) -> SpectralField:
    """Dyadic band projector: multiply by chi(xi/M) - chi(2 xi/M)."""
    _require_dyadic(m)
    c = f.coeffs * _eta_m(f.grid.xi_col, m)
    c[~f.grid.nyquist_free] = 0.0
    return SpectralField(f.grid, c)


def lp_projector_leq(f: SpectralField, m: float) -> SpectralField:
    """Low-pass projector: multiply by chi(xi/M)."""
    _require_dyadic(m)
    c = f.coeffs * bump_chi(f.grid.xi_col / m)
    c[~f.grid.nyquist_free] = 0.0
    return SpectralField(f.grid, c)
