"""Line-soliton construction, orbital-distance metric, and the stability spectrum.

The traveling wave Q_c(x) = 3c / cosh(sqrt(c)/2 * x)^2 solves the moving-frame
equation -c*u_x + u_xxx + u*u_x = 0 and, viewed as a y-independent field, is a
stationary state of KP-I in the frame moving at speed c.  Its transverse
stability is governed by the fourth-order operator

    L_c = d^4/dx^4 - c d^2/dx^2 + d/dx Q_c d/dx + 1,

whose lowest eigenvalue crosses zero at the critical speed 4/sqrt(3): below it
the quadratic forms B_c^k are positive for every transverse mode k, above it
the k = 1 mode carries a negative direction and the soliton is transversely
unstable.  Whenever a discrete eigenvalue exists it sits at 1 - 3c^2/16, which
the eigensolver here reproduces and the scan uses as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import (
    ConstraintViolation,
    ConvergenceFailure,
    DomainError,
    DomainTooSmall,
    BlowupDetected,
)
from .solver import DiagnosticsRecord, SolverConfig, _Stepper, _record
from .spectral import (
    FrequencyPair,
    Grid,
    RealField,
    energy_norm,
    forward_transform,
)

__all__ = [
    "CRITICAL_SPEED",
    "SolitonParams",
    "SpectrumResult",
    "StabilityRunConfig",
    "StabilityRunResult",
    "characteristic_value_defect",
    "critical_speed_scan",
    "hessian_coercivity",
    "hessian_form",
    "linearized_operator_matrix",
    "min_eigenvalue",
    "orbital_distance",
    "predicted_negative_eigenvalue",
    "run_stability_experiment",
    "soliton_profile",
    "verify_exact_eigenfunction",
]

CRITICAL_SPEED = 4.0 / math.sqrt(3.0)

_DECAY_FRACTION = 1e-12


def predicted_negative_eigenvalue(c: float) -> float:
    """Location 1 - 3c^2/16 of the discrete eigenvalue of L_c (negative iff c > 4/sqrt(3))."""
    return 1.0 - 3.0 * c * c / 16.0


def characteristic_value_defect(mu: float) -> float:
    """mu^3 + 2mu - 3mu^2; a decaying bound state requires this to vanish."""
    return mu**3 + 2.0 * mu - 3.0 * mu**2


@dataclass(frozen=True)
class SolitonParams:
    """Speed and center of a line soliton."""

    c: float
    x0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise DomainError(f"soliton speed must be positive, got {self.c}")

    @property
    def peak(self) -> float:
        return 3.0 * self.c


def soliton_samples(c: float, x: np.ndarray) -> np.ndarray:
    """Q_c(x) = 3c / cosh(sqrt(c)/2 x)^2 on arbitrary sample points."""
    return 3.0 * c / np.cosh(0.5 * math.sqrt(c) * x) ** 2


def soliton_profile(params: SolitonParams, grid: Grid) -> RealField:
    """Sample Q_c(x - x0) as a y-independent field; the tails must fit the box."""
    c, x0 = params.c, params.x0
    edge = max(
        soliton_samples(c, np.array([-0.5 * grid.length_x - x0]))[0],
        soliton_samples(c, np.array([0.5 * grid.length_x - x0]))[0],
    )
    if edge >= _DECAY_FRACTION * params.peak:
        raise DomainTooSmall(
            f"Q_c tail at the box edge is {edge:.3e} >= {_DECAY_FRACTION:.0e} * peak; "
            "increase length_x or reduce |x0|"
        )
    column = soliton_samples(c, grid.x - x0)
    return RealField(grid, np.repeat(column[:, None], grid.ny, axis=1))


def _correlation_profile(u: RealField, c: float) -> tuple[float, float, np.ndarray, Grid]:
    """Norms and the per-xi cross term of the shifted-template distance.

    dist(a)^2 = ||u||_E^2 + ||Q||_E^2 - 2*Re sum_xi G(xi) e^{i xi a}, where the
    template Q_c is translated by a (exact spectral phase, no interpolation).
    """
    grid = u.grid
    fu = forward_transform(u).coeffs
    fu[0, 1:] = 0.0
    fq = forward_transform(soliton_profile(SolitonParams(c), grid)).coeffs
    w = grid.energy_weight
    norm2_u = float(np.sum(w * np.abs(fu) ** 2)) / grid.area
    norm2_q = float(np.sum(w * np.abs(fq) ** 2)) / grid.area
    g_of_xi = np.sum(w * fu * np.conj(fq), axis=1) / grid.area
    return norm2_u, norm2_q, g_of_xi, grid


def orbital_distance(u: RealField, c: float) -> tuple[float, float]:
    """Minimize ||u - Q_c(. - a)||_E over the shift a.

    A coarse scan over all nx grid shifts (one FFT) brackets the optimum; a
    golden-section refinement narrows it below 1e-6 * dx.  Returns the
    minimal distance and the optimal shift, wrapped into [-Lx/2, Lx/2).
    """
    norm2_u, norm2_q, g_of_xi, grid = _correlation_profile(u, c)
    xi = grid.xi

    # Re sum G e^{i xi m dx} = Re(nx * ifft(G))[m]
    corr_grid = (grid.nx * np.fft.ifft(g_of_xi)).real
    m_best = int(np.argmax(corr_grid))
    a0 = m_best * grid.dx

    def corr(a: float) -> float:
        return float(np.sum(g_of_xi * np.exp(1j * xi * a)).real)

    lo, hi = a0 - grid.dx, a0 + grid.dx
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = corr(x1), corr(x2)
    while hi - lo > 1e-6 * grid.dx:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = corr(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = corr(x1)
    a_best = 0.5 * (lo + hi)

    # corr is a trigonometric polynomial: Newton on corr' polishes the argmax
    # to machine precision, which the distance of an exact translate needs
    for _ in range(4):
        phase = np.exp(1j * xi * a_best)
        d1 = float(np.sum(g_of_xi * (1j * xi) * phase).real)
        d2 = float(np.sum(g_of_xi * -(xi**2) * phase).real)
        if d2 >= 0.0 or not math.isfinite(d1 / d2):
            break
        step_len = d1 / d2
        if abs(step_len) > grid.dx:
            break
        a_best -= step_len
    dist2 = norm2_u + norm2_q - 2.0 * corr(a_best)
    a_wrapped = (a_best + 0.5 * grid.length_x) % grid.length_x - 0.5 * grid.length_x
    return math.sqrt(max(dist2, 0.0)), a_wrapped


@dataclass(frozen=True)
class StabilityRunConfig:
    """One perturbed-soliton experiment in the frame moving at speed c."""

    c: float
    delta: float
    perturbation_mode: FrequencyPair
    t_end: float
    solver: SolverConfig

    def __post_init__(self) -> None:
        if not (0.0 <= self.delta < 1.0):
            raise DomainError(f"perturbation size delta must lie in [0, 1), got {self.delta}")
        if self.c <= 0.0:
            raise DomainError(f"soliton speed must be positive, got {self.c}")


@dataclass
class StabilityRunResult:
    """Diagnostics trace plus the instability markers of one run."""

    records: list[DiagnosticsRecord] = field(default_factory=list)
    unstable: bool = False
    blowup_time: float | None = None

    def sup_distance(self) -> float:
        ds = [r.orbital_distance for r in self.records if r.orbital_distance is not None]
        return max(ds) if ds else math.nan


def perturbation_field(grid: Grid, mode: FrequencyPair) -> RealField:
    """cos(xi0 x) cos(q0 y), normalized to unit energy norm."""
    xi0, q0 = mode
    if xi0 == 0.0:
        raise DomainError("perturbation mode needs xi != 0 (zero-x-mean constraint)")
    values = np.cos(xi0 * grid.x)[:, None] * np.cos(q0 * grid.y)[None, :]
    u = RealField(grid, values)
    return RealField(grid, values / energy_norm(u))


def run_stability_experiment(grid: Grid, cfg: StabilityRunConfig) -> StabilityRunResult:
    """Evolve Q_c + delta * (unit-norm perturbation) and track the orbital distance.

    A blow-up ends the run early: it is recorded as instability evidence
    (``unstable`` flag and failure time), not raised.
    """
    base = soliton_profile(SolitonParams(cfg.c), grid)
    u0 = base
    if cfg.delta > 0.0:
        pert = perturbation_field(grid, cfg.perturbation_mode)
        u0 = RealField(grid, base.values + cfg.delta * pert.values)

    run_cfg = replace(cfg.solver, t_end=cfg.t_end, moving_frame_speed=cfg.c)
    stepper = _Stepper(grid, run_cfg)
    v = stepper.constrain(stepper.to_coeffs(u0.values))
    n_steps = int(round(cfg.t_end / run_cfg.dt))

    def dist(u: RealField) -> float:
        return orbital_distance(u, cfg.c)[0]

    result = StabilityRunResult()
    result.records.append(_record(grid, 0.0, stepper.to_values(v), cfg.c, dist))
    for k in range(n_steps):
        try:
            v = stepper.advance(v, k * run_cfg.dt)
        except BlowupDetected as blowup:
            result.unstable = True
            result.blowup_time = blowup.t
            return result
        if (k + 1) % run_cfg.record_every == 0 or k + 1 == n_steps:
            result.records.append(
                _record(grid, (k + 1) * run_cfg.dt, stepper.to_values(v), cfg.c, dist)
            )
    return result


def hessian_form(values: np.ndarray, length_x: float, c: float, k: int) -> float:
    """Transverse Hessian form ||v'||^2 + k^2 ||dx^{-1} v||^2 + c ||v||^2 - int Q_c v^2.

    ``values`` samples a real function of x alone on a uniform periodic grid
    of length ``length_x`` centered at 0.  For k != 0 the mean of v must
    vanish so the antiderivative term is defined.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    dxs = length_x / n
    x = -0.5 * length_x + dxs * np.arange(n)
    vhat = np.fft.fft(v) * dxs
    xi = (2.0 * math.pi / length_x) * np.rint(np.fft.fftfreq(n) * n)
    mean_coeff = abs(vhat[0])
    scale = max(float(np.abs(vhat).max()), 1e-300)
    if k != 0 and mean_coeff > 1e-10 * scale:
        raise ConstraintViolation(
            f"hessian_form with k != 0 needs a zero-mean slice; |mean coeff| = {mean_coeff:.3e}"
        )
    abs2 = np.abs(vhat) ** 2
    grad = float(np.sum(xi**2 * abs2)) / length_x
    safe = np.where(xi == 0.0, 1.0, xi)
    inv = float(np.sum(np.where(xi == 0.0, 0.0, abs2 / safe**2))) / length_x
    l2 = float(np.sum(abs2)) / length_x
    potential = float(np.sum(soliton_samples(c, x) * v * v)) * dxs
    return grad + float(k * k) * inv + c * l2 - potential


def hessian_coercivity(c: float, k: int, n: int = 512, half_width: float = 30.0) -> float:
    """Smallest Rayleigh quotient of B_c^k against ||v||_H1^2 + k^2 ||dx^{-1} v||^2.

    Minimized exactly over the zero-mean trigonometric space on the periodic
    box by a generalized symmetric eigensolve; positive values certify the
    coercivity of the form at this speed and transverse mode.
    """
    length = 2.0 * half_width
    dxs = length / n
    x = -half_width + dxs * np.arange(n)
    q_diag = soliton_samples(c, x)

    # real trigonometric basis of zero-mean modes, orthonormal in L2(dx)
    m_max = n // 2 - 1
    freqs = (2.0 * math.pi / length) * np.arange(1, m_max + 1)
    norm = math.sqrt(2.0 / length)
    basis = np.concatenate(
        [
            norm * np.cos(freqs[:, None] * x[None, :]),
            norm * np.sin(freqs[:, None] * x[None, :]),
        ]
    )
    xi_all = np.concatenate([freqs, freqs])
    pot = basis @ (q_diag[None, :] * basis).T * dxs
    a_mat = np.diag(xi_all**2 + float(k * k) / xi_all**2 + c) - pot
    b_mat = np.diag(1.0 + xi_all**2 + float(k * k) / xi_all**2)
    vals = scipy.linalg.eigh(a_mat, b_mat, eigvals_only=True, subset_by_index=[0, 0])
    return float(vals[0])


def _fd_circulant(n: int, scale: float, stencil: list[float], offsets: list[int]) -> np.ndarray:
    first_col = np.zeros(n)
    for s, o in zip(stencil, offsets):
        first_col[o % n] += s
    mat = scipy.linalg.circulant(first_col)
    return mat / scale


def linearized_operator_matrix(
    c: float, n: int, half_width: float, zero_potential: bool = False
) -> np.ndarray:
    """Dense symmetric discretization of d^4 - c d^2 + d Q_c d + 1 on [-hw, hw].

    Periodic fourth-order central differences; the middle term is assembled
    as D^T diag(Q_c) D (D antisymmetric) so the matrix is exactly
    self-adjoint.  ``zero_potential`` is a test hook replacing Q_c by 0.
    """
    if n < 256:
        raise DomainError(f"need n >= 256 grid points, got {n}")
    if half_width < 20.0 / math.sqrt(c):
        raise DomainError(
            f"half_width {half_width} too small for speed {c}; need >= {20.0 / math.sqrt(c):.2f}"
        )
    length = 2.0 * half_width
    h = length / n
    x = -half_width + h * np.arange(n)
    q_diag = np.zeros(n) if zero_potential else soliton_samples(c, x)

    d1 = _fd_circulant(n, 12.0 * h, [1.0, -8.0, 8.0, -1.0], [-2, -1, 1, 2])
    d2 = _fd_circulant(n, 12.0 * h * h, [-1.0, 16.0, -30.0, 16.0, -1.0], [-2, -1, 0, 1, 2])
    # d1 is antisymmetric, so -d1.T @ diag(Q) @ d1 = d1 @ diag(Q) @ d1
    a = d2 @ d2 - c * d2 + d1 @ (q_diag[:, None] * d1) + np.eye(n)
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest part of the spectrum of the linearized operator at one speed."""

    c: float
    min_eigenvalue: float
    eigenvalues_below_one: list[float]
    grid_n: int
    domain_half_width: float
    error_estimate: float


def min_eigenvalue(
    c: float, n: int = 1024, half_width: float = 40.0, n_lowest: int = 8
) -> SpectrumResult:
    """Lowest eigenvalues of the discretized operator, Richardson extrapolated.

    Solves at resolutions n and 2n and combines fourth-order; the spread of
    the two resolutions gives the error bar and triggers ConvergenceFailure
    when it exceeds 1e-3.
    """
    vals = []
    for grid_n in (n, 2 * n):
        a = linearized_operator_matrix(c, grid_n, half_width)
        vals.append(
            scipy.linalg.eigh(a, eigvals_only=True, subset_by_index=[0, n_lowest - 1])
        )
    coarse, fine = vals
    spread = abs(fine[0] - coarse[0])
    if spread > 1e-3:
        raise ConvergenceFailure(
            f"eigenvalues at n={n} and n={2*n} differ by {spread:.3e} (> 1e-3); "
            "refine the grid or shrink the domain"
        )
    extrapolated = fine + (fine - coarse) / 15.0
    below_one = sorted(float(v) for v in extrapolated if v < 1.0 - 1e-9)
    min_val = float(extrapolated[0])
    return SpectrumResult(
        c=c,
        min_eigenvalue=min_val,
        eigenvalues_below_one=below_one if below_one else [min_val],
        grid_n=2 * n,
        domain_half_width=half_width,
        error_estimate=spread / 15.0,
    )


def critical_speed_scan(
    c_min: float,
    c_max: float,
    steps: int = 24,
    n: int = 1024,
    half_width: float = 40.0,
    tol: float = 1e-3,
) -> float:
    """Bisection on the sign of the lowest eigenvalue; returns the crossing speed."""
    lo, hi = float(c_min), float(c_max)
    if not lo < hi:
        raise DomainError(f"need c_min < c_max, got [{c_min}, {c_max}]")
    f_lo = min_eigenvalue(lo, n, half_width).min_eigenvalue
    f_hi = min_eigenvalue(hi, n, half_width).min_eigenvalue
    if f_lo <= 0.0 or f_hi >= 0.0:
        raise ConvergenceFailure(
            f"no sign change of the lowest eigenvalue on [{c_min}, {c_max}] "
            f"(values {f_lo:.4e}, {f_hi:.4e})"
        )
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            break
        f_mid = min_eigenvalue(mid, n, half_width).min_eigenvalue
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _tanh_derivative_chain(t: np.ndarray, s2: np.ndarray) -> list[np.ndarray]:
    """Derivatives of tanh up to order four, written in t = tanh and s2 = sech^2."""
    d1 = s2
    d2 = -2.0 * s2 * t
    d3 = 4.0 * s2 * t**2 - 2.0 * s2**2
    d4 = -8.0 * s2 * t**3 + 16.0 * s2**2 * t
    return [d1, d2, d3, d4]


def verify_exact_eigenfunction(mu: float, nu2: float, x_max: float = 10.0, n: int = 2001) -> float:
    """Max-norm residual of g'''' - 4(1 - 3 sech^2) g'' + 3 nu^2 g for g = g_mu.

    g_mu(x) = e^{mu x} (mu^3 + 2 mu - 3 mu^2 tanh x); its derivatives are
    evaluated in closed form (Leibniz against the tanh derivative chain), so
    the residual is pure round-off whenever mu^4 - 4 mu^2 + 3 nu^2 = 0.
    """
    x = np.linspace(-x_max, x_max, n)
    t = np.tanh(x)
    s2 = 1.0 / np.cosh(x) ** 2
    d = _tanh_derivative_chain(t, s2)
    amp = mu**3 + 2.0 * mu
    slope = 3.0 * mu**2
    base = amp - slope * t
    expo = np.exp(mu * x)

    g = expo * base
    g2 = expo * (mu**2 * base - slope * (2.0 * mu * d[0] + d[1]))
    g4 = expo * (
        mu**4 * base
        - slope * (4.0 * mu**3 * d[0] + 6.0 * mu**2 * d[1] + 4.0 * mu * d[2] + d[3])
    )
    residual = g4 - 4.0 * (1.0 - 3.0 * s2) * g2 + 3.0 * nu2 * g
    return float(np.abs(residual).max())
