"""Numerical checks of the quantitative harmonic-analysis primitives.

Three families of checks live here:

* the three-wave resonance function on the zero-sum frequency hyperplane,
  its factored closed form, and the gradient identity in the first
  transverse frequency;
* level-set measure bounds for affine and quadratic phases, in both the
  continuous and the lattice (renormalized counting measure) settings, plus
  the projection/section bound for sampled staircase sets;
* the anisotropic cubic-integral inequality, in its literal product form
  and in the additive-corrected form that survives y-independent data.

Bounds stated up to an unspecified constant are tested against a fixed
calibration constant of 4; a failing sample is a hard failure, never a
silent constant inflation.  All randomness flows through a counter-based
generator keyed by (seed, suite), so sweeps are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateDerivative, DomainError, HyperplaneViolation
from .spectral import (
    FrequencyPair,
    Grid,
    RealField,
    SpectralField,
    _check_constraint,
    dispersion_symbol,
    forward_transform,
    inverse_transform,
    l2_norm,
    project_zero_x_mean,
    x_antiderivative,
    x_derivative,
    y_derivative,
)

__all__ = [
    "CALIBRATION_CONSTANT",
    "LevelSetQuery",
    "MeasureCheck",
    "ResonanceTriple",
    "SectionedSet",
    "SobolevCheck",
    "anisotropic_sobolev_check",
    "level_set_measure",
    "parabola_level_measure",
    "random_band_limited_field",
    "resonance",
    "resonance_expanded_display",
    "resonance_factored",
    "resonance_gradient_q1",
    "run_verify",
    "section_projection_measure",
    "suite_names",
]

# fixed constant standing in for every "up to a constant" bound
CALIBRATION_CONSTANT = 4.0

_HYPERPLANE_TOL = 1e-12


def _bracket(x: float) -> float:
    return math.sqrt(1.0 + x * x)


@dataclass(frozen=True)
class ResonanceTriple:
    """Three frequency pairs with zeta1 + zeta2 + zeta3 = 0 and all xi_i != 0."""

    zeta1: FrequencyPair
    zeta2: FrequencyPair
    zeta3: FrequencyPair

    def __post_init__(self) -> None:
        xs = (self.zeta1[0], self.zeta2[0], self.zeta3[0])
        qs = (self.zeta1[1], self.zeta2[1], self.zeta3[1])
        scale = max(1.0, *(abs(v) for v in xs), *(abs(v) for v in qs))
        if abs(sum(xs)) > _HYPERPLANE_TOL * scale or abs(sum(qs)) > _HYPERPLANE_TOL * scale:
            raise HyperplaneViolation(
                f"frequencies must sum to zero: sum xi = {sum(xs):.3e}, sum q = {sum(qs):.3e}"
            )
        if any(x == 0.0 for x in xs):
            raise HyperplaneViolation("all xi components must be nonzero")


def resonance_factored(t: ResonanceTriple) -> float:
    """Closed form -xi1*xi2/(xi1+xi2) * {3(xi1+xi2)^2 - (q1/xi1 - q2/xi2)^2}."""
    (x1, q1), (x2, q2), _ = t.zeta1, t.zeta2, t.zeta3
    slope = q1 / x1 - q2 / x2
    return -(x1 * x2 / (x1 + x2)) * (3.0 * (x1 + x2) ** 2 - slope * slope)


def resonance_expanded_display(t: ResonanceTriple) -> float:
    """-3 xi1 xi2 xi3 + (xi1 q2 - xi2 q1)^2 / (xi1 xi2 xi3).

    On the hyperplane this evaluates to the NEGATIVE of the direct sum; it is
    kept as a documented sign normalization and asserted as such in tests.
    """
    (x1, q1), (x2, q2), (x3, _) = t.zeta1, t.zeta2, t.zeta3
    return -3.0 * x1 * x2 * x3 + (x1 * q2 - x2 * q1) ** 2 / (x1 * x2 * x3)


def resonance(t: ResonanceTriple) -> float:
    """Direct sum omega(zeta1) + omega(zeta2) + omega(zeta3).

    The factored closed form is evaluated alongside and must agree to 1e-10
    relative; a mismatch indicates corrupt inputs or a broken identity.
    """
    direct = (
        dispersion_symbol(t.zeta1) + dispersion_symbol(t.zeta2) + dispersion_symbol(t.zeta3)
    )
    factored = resonance_factored(t)
    scale = max(1.0, abs(direct), abs(factored))
    if abs(direct - factored) > 1e-10 * scale:
        raise ArithmeticError(
            f"resonance closed forms disagree: direct {direct!r} vs factored {factored!r}"
        )
    return direct


def resonance_gradient_q1(xi: float, q: float, xi1: float, q1: float) -> float:
    """|d/dq1 of Omega(zeta1, zeta - zeta1, -zeta)| = 2|q1/xi1 - (q-q1)/(xi-xi1)|.

    The resonance is a quadratic polynomial in q1, so a centered difference
    is exact up to round-off; it is evaluated as a built-in cross-check.
    """
    if xi1 == 0.0 or xi == xi1:
        raise DomainError("need xi1 != 0 and xi - xi1 != 0")
    grad = 2.0 * abs(q1 / xi1 - (q - q1) / (xi - xi1))

    def omega_sum(q1v: float) -> float:
        return (
            dispersion_symbol((xi1, q1v))
            + dispersion_symbol((xi - xi1, q - q1v))
            + dispersion_symbol((-xi, -q))
        )

    h = 0.25 * (1.0 + abs(q1))
    fd = abs((omega_sum(q1 + h) - omega_sum(q1 - h)) / (2.0 * h))
    if abs(fd - grad) > 1e-6 * max(1.0, grad):
        raise ArithmeticError(
            f"gradient identity failed its finite-difference cross-check: {grad!r} vs {fd!r}"
        )
    return grad


class MeasureCheck(NamedTuple):
    measured: float
    bound: float
    holds: bool


@dataclass(frozen=True)
class LevelSetQuery:
    """{x in J : phi(x) in I} with phi affine (a, b) or quadratic (a, b, c).

    ``poly`` lists coefficients highest degree first.  With
    ``lattice_lambda`` set, x ranges over J intersected with the lattice
    lambda^{-1} Z and the measure is the renormalized counting measure
    (1/lambda per point).
    """

    poly: tuple[float, ...]
    J: tuple[float, float]
    I: tuple[float, float]
    lattice_lambda: float | None = None

    def __post_init__(self) -> None:
        if len(self.poly) not in (2, 3):
            raise DomainError("poly must have 2 (affine) or 3 (quadratic) coefficients")
        if self.J[0] > self.J[1] or self.I[0] > self.I[1]:
            raise DomainError("intervals must be nonempty: (lo, hi) with lo <= hi")
        if self.lattice_lambda is not None and self.lattice_lambda < 1.0:
            raise DomainError("lattice_lambda must be >= 1")


def _poly_eval(poly: tuple[float, ...], x: float) -> float:
    out = 0.0
    for coeff in poly:
        out = out * x + coeff
    return out


def _real_roots(poly: tuple[float, ...], level: float) -> list[float]:
    """Real solutions of poly(x) = level for degree <= 2."""
    if len(poly) == 2:
        a, b = poly
        if a == 0.0:
            return []
        return [(level - b) / a]
    a, b, c = poly
    if a == 0.0:
        return _real_roots((b, c), level)
    disc = b * b - 4.0 * a * (c - level)
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    return sorted(((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)))


def _preimage_intervals(poly: tuple[float, ...], lo: float, hi: float) -> list[tuple[float, float]]:
    """Exact preimage of [lo, hi] as a finite union of closed intervals.

    For affine or nondegenerate quadratic phases the preimage of a bounded
    interval is bounded; degenerate (constant) phases are rejected upstream
    by the derivative check.
    """
    if len(poly) == 2 or poly[0] == 0.0:
        a, b = poly[-2], poly[-1]
        if a == 0.0:
            return []
        ends = sorted(((lo - b) / a, (hi - b) / a))
        return [(ends[0], ends[1])]
    cuts = sorted(set(_real_roots(poly, lo) + _real_roots(poly, hi)))
    if not cuts:
        return []
    intervals: list[tuple[float, float]] = []
    for left, right in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (left + right)
        if lo - 1e-12 <= _poly_eval(poly, mid) <= hi + 1e-12:
            intervals.append((left, right))
    # endpoints that are isolated solutions (tangency) add measure zero
    merged: list[tuple[float, float]] = []
    for iv in intervals:
        if merged and iv[0] <= merged[-1][1] + 1e-15:
            merged[-1] = (merged[-1][0], iv[1])
        else:
            merged.append(iv)
    return merged


def _clip_intervals(
    intervals: list[tuple[float, float]], window: tuple[float, float]
) -> list[tuple[float, float]]:
    out = []
    for lo, hi in intervals:
        a, b = max(lo, window[0]), min(hi, window[1])
        if a <= b:
            out.append((a, b))
    return out


def _lattice_measure(intervals: list[tuple[float, float]], lam: float) -> float:
    count = 0
    for lo, hi in intervals:
        first = math.ceil(lo * lam - 1e-9)
        last = math.floor(hi * lam + 1e-9)
        count += max(0, last - first + 1)
    return count / lam


def _min_abs_derivative(poly: tuple[float, ...], window: tuple[float, float]) -> float:
    if len(poly) == 2:
        return abs(poly[0])
    a, b, _ = poly
    d_lo = 2.0 * a * window[0] + b
    d_hi = 2.0 * a * window[1] + b
    if d_lo == 0.0 or d_hi == 0.0 or (d_lo < 0.0) != (d_hi < 0.0):
        return 0.0
    return min(abs(d_lo), abs(d_hi))


def level_set_measure(query: LevelSetQuery) -> MeasureCheck:
    """Measure of {x in J : phi(x) in I} against the derivative bound.

    Continuous case: exact Lebesgue measure via root solving, bound
    |I| / inf_J |phi'| with constant exactly 1.  Lattice case: renormalized
    point count, bound 4 * <|I| / inf_J |phi'|>.
    """
    slope = _min_abs_derivative(query.poly, query.J)
    if slope == 0.0:
        raise DegenerateDerivative("inf |phi'| vanishes on J; the level-set bound is void here")
    pre = _clip_intervals(_preimage_intervals(query.poly, *query.I), query.J)
    ratio = (query.I[1] - query.I[0]) / slope
    if query.lattice_lambda is None:
        measured = sum(hi - lo for lo, hi in pre)
        bound = ratio
    else:
        measured = _lattice_measure(pre, query.lattice_lambda)
        bound = CALIBRATION_CONSTANT * _bracket(ratio)
    return MeasureCheck(measured, bound, measured <= bound + 1e-12)


def parabola_level_measure(
    a: float, b: float, c: float, I: tuple[float, float], lattice_lambda: float | None = None
) -> MeasureCheck:
    """Measure of {x : a x^2 + b x + c in I} against 4 * sqrt(|I| / |a|)."""
    if a == 0.0:
        raise DomainError("parabola bound needs a != 0")
    if I[0] > I[1]:
        raise DomainError("interval must be nonempty")
    pre = _preimage_intervals((a, b, c), *I)
    ratio = math.sqrt((I[1] - I[0]) / abs(a))
    if lattice_lambda is None:
        measured = sum(hi - lo for lo, hi in pre)
        bound = CALIBRATION_CONSTANT * ratio
    else:
        if lattice_lambda < 1.0:
            raise DomainError("lattice_lambda must be >= 1")
        measured = _lattice_measure(pre, lattice_lambda)
        bound = CALIBRATION_CONSTANT * _bracket(ratio)
    return MeasureCheck(measured, bound, measured <= bound + 1e-12)


@dataclass(frozen=True)
class SectionedSet:
    """Staircase subset of the strip I x R, stored by its q-section measures.

    ``xi_breaks`` (ascending) split the projection interval into cells;
    ``section_measures[i]`` is the measure of every q-section over cell i.
    """

    xi_breaks: np.ndarray
    section_measures: np.ndarray

    def __post_init__(self) -> None:
        breaks = np.asarray(self.xi_breaks, dtype=np.float64)
        secs = np.asarray(self.section_measures, dtype=np.float64)
        if breaks.ndim != 1 or breaks.size < 2 or np.any(np.diff(breaks) < 0.0):
            raise DomainError("xi_breaks must be an ascending array with >= 2 entries")
        if secs.shape != (breaks.size - 1,) or np.any(secs < 0.0):
            raise DomainError("section_measures must be nonnegative, one per cell")
        object.__setattr__(self, "xi_breaks", breaks)
        object.__setattr__(self, "section_measures", secs)


def section_projection_measure(
    sampled: SectionedSet, I: tuple[float, float], c_sections: float
) -> MeasureCheck:
    """Total measure of a sampled set against C_sections * |projection interval|."""
    breaks, secs = sampled.xi_breaks, sampled.section_measures
    if breaks[0] < I[0] - 1e-12 or breaks[-1] > I[1] + 1e-12:
        raise DomainError("the xi projection of the set must lie inside I")
    if np.any(secs > c_sections + 1e-12):
        raise DomainError("every q-section measure must be bounded by C_sections")
    measured = float(np.sum(np.diff(breaks) * secs))
    bound = c_sections * (I[1] - I[0])
    return MeasureCheck(measured, bound, measured <= bound + 1e-12)


class SobolevCheck(NamedTuple):
    lhs: float
    rhs_paper: float
    rhs_corrected: float
    ratio: float


def anisotropic_sobolev_check(u: RealField) -> SobolevCheck:
    """Evaluate both sides of the anisotropic cubic-integral inequality.

    lhs = int u^3; the literal product form 2 ||u||^{3/2} ||u_x|| ||dx^{-1}dy u||^{1/2}
    vanishes on y-independent data, so the corrected form replaces the last
    factor by (||dx^{-1}dy u|| + ||u||)^{1/2}.  No inequality is asserted
    here; sweeps assert on the corrected form.
    """
    f = forward_transform(u)
    _check_constraint(f)
    f = project_zero_x_mean(f)
    g = u.grid
    lhs = float(np.sum(u.values**3)) * g.dx * g.dy
    n_l2 = l2_norm(u)
    n_dx = l2_norm(inverse_transform(x_derivative(f)))
    n_aniso = l2_norm(inverse_transform(x_antiderivative(y_derivative(f))))
    rhs_paper = 2.0 * n_l2**1.5 * n_dx * math.sqrt(n_aniso)
    rhs_corrected = 2.0 * n_l2**1.5 * n_dx * math.sqrt(n_aniso + n_l2)
    if rhs_corrected == 0.0:
        ratio = 0.0 if lhs == 0.0 else math.inf
    else:
        ratio = lhs / rhs_corrected
    return SobolevCheck(lhs, rhs_paper, rhs_corrected, ratio)


def random_band_limited_field(grid: Grid, rng: np.random.Generator, amplitude: float = 1.0) -> RealField:
    """Seeded random real field, band-limited to |index| <= n/4, zero x-mean.

    Normalized so the maximum absolute value equals ``amplitude``.
    """
    white = rng.standard_normal((grid.nx, grid.ny))
    f = forward_transform(RealField(grid, white))
    keep_x = np.abs(grid.kx_index) <= grid.nx // 4
    keep_y = np.abs(grid.ky_index) <= grid.ny // 4
    c = np.where(keep_x[:, None] & keep_y[None, :], f.coeffs, 0.0)
    c[0, :] = 0.0
    u = inverse_transform(SpectralField(grid, c)).values
    peak = np.abs(u).max()
    if peak == 0.0:
        return RealField(grid, u)
    return RealField(grid, u * (amplitude / peak))


# ---------------------------------------------------------------------------
# verification suites


def _suite_rng(seed: int, suite_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, suite_index], dtype=np.uint64)))


def _draw_xi(rng: np.random.Generator, lo: float = 0.1, hi: float = 5.0) -> float:
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return sign * rng.uniform(lo, hi)


def _suite_resonance(samples: int, seed: int) -> dict:
    rng = _suite_rng(seed, 0)
    failures = 0
    worst = 0.0
    for _ in range(samples):
        while True:
            x1, x2 = _draw_xi(rng), _draw_xi(rng)
            if abs(x1 + x2) > 1e-3:
                break
        q1 = rng.uniform(-5.0, 5.0)
        q2 = rng.uniform(-5.0, 5.0)
        triple = ResonanceTriple(
            FrequencyPair(x1, q1), FrequencyPair(x2, q2), FrequencyPair(-x1 - x2, -q1 - q2)
        )
        try:
            direct = resonance(triple)
        except ArithmeticError:
            failures += 1
            continue
        scale = max(1.0, abs(direct))
        err = abs(resonance_factored(triple) - direct) / scale
        err = max(err, abs(resonance_expanded_display(triple) + direct) / scale)
        worst = max(worst, err / 1e-10)
        if err > 1e-10:
            failures += 1
        # gradient identity on the induced splitting zeta = zeta1 + zeta2
        xi, q = x1 + x2, q1 + q2
        try:
            resonance_gradient_q1(xi, q, x1, q1)
        except ArithmeticError:
            failures += 1
    return {"name": "resonance", "samples": samples, "failures": failures,
            "worst_ratio": worst, "seed": seed}


def _random_level_query(rng: np.random.Generator, quadratic: bool) -> LevelSetQuery:
    while True:
        if quadratic:
            a = _draw_xi(rng, 0.1, 4.0)
            b = rng.uniform(-5.0, 5.0)
            c = rng.uniform(-5.0, 5.0)
            poly = (a, b, c)
        else:
            poly = (_draw_xi(rng, 0.1, 10.0), rng.uniform(-10.0, 10.0))
        j_lo = rng.uniform(-10.0, 10.0)
        j = (j_lo, j_lo + rng.uniform(0.1, 20.0))
        i_lo = rng.uniform(-10.0, 10.0)
        i = (i_lo, i_lo + rng.uniform(0.0, 5.0))
        lam = float(rng.choice([1.0, 2.0, 4.0, 8.0])) if rng.random() < 0.5 else None
        query = LevelSetQuery(poly, j, i, lam)
        if _min_abs_derivative(poly, j) > 0.0:
            return query


def _suite_measures(samples: int, seed: int) -> dict:
    rng = _suite_rng(seed, 1)
    failures = 0
    worst = 0.0
    for _ in range(samples):
        for quadratic in (False, True):
            check = level_set_measure(_random_level_query(rng, quadratic))
            if check.bound > 0.0:
                worst = max(worst, check.measured / check.bound)
            if not check.holds:
                failures += 1
        a = _draw_xi(rng, 0.05, 5.0)
        i_lo = rng.uniform(-10.0, 10.0)
        i = (i_lo, i_lo + rng.uniform(0.0, 8.0))
        lam = float(rng.choice([1.0, 2.0, 4.0])) if rng.random() < 0.5 else None
        check = parabola_level_measure(a, rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), i, lam)
        if check.bound > 0.0:
            worst = max(worst, check.measured / check.bound)
        if not check.holds:
            failures += 1
        # staircase sets satisfy the projection/section bound by construction
        n_cells = int(rng.integers(2, 12))
        lo = rng.uniform(-5.0, 5.0)
        width = rng.uniform(0.5, 10.0)
        cuts = np.sort(rng.uniform(lo, lo + width, n_cells - 1))
        breaks = np.concatenate([[lo], cuts, [lo + width]])
        cap = rng.uniform(0.5, 4.0)
        secs = rng.uniform(0.0, cap, n_cells)
        check = section_projection_measure(SectionedSet(breaks, secs), (lo, lo + width), cap)
        if check.bound > 0.0:
            worst = max(worst, check.measured / check.bound)
        if not check.holds:
            failures += 1
    return {"name": "measures", "samples": samples, "failures": failures,
            "worst_ratio": worst, "seed": seed}


def _suite_sobolev(samples: int, seed: int) -> dict:
    rng = _suite_rng(seed, 2)
    grid = Grid(64, 32, 16.0 * math.pi, 1.0)
    failures = 0
    worst = 0.0
    for _ in range(samples):
        u = random_band_limited_field(grid, rng, amplitude=float(rng.uniform(0.1, 3.0)))
        check = anisotropic_sobolev_check(u)
        worst = max(worst, check.ratio)
        if check.ratio > 1.0:
            failures += 1
    # y-independent positive data defeats the literal product form:
    # the product right-hand side vanishes while the cubic integral does not
    bump = 1.0 / np.cosh(0.5 * grid.x) ** 2
    u_line = RealField(grid, np.repeat(bump[:, None], grid.ny, axis=1))
    counter = anisotropic_sobolev_check(u_line)
    counterexample_ok = (
        counter.lhs > counter.rhs_paper and counter.lhs > 0.0 and counter.ratio <= 1.0
    )
    if not counterexample_ok:
        failures += 1
    return {"name": "sobolev", "samples": samples, "failures": failures,
            "worst_ratio": worst, "seed": seed,
            "counterexample": {"lhs": counter.lhs, "rhs_paper": counter.rhs_paper,
                               "rhs_corrected": counter.rhs_corrected,
                               "reproduced": counterexample_ok}}


_SUITES = {
    "resonance": _suite_resonance,
    "measures": _suite_measures,
    "sobolev": _suite_sobolev,
}


def suite_names() -> list[str]:
    return list(_SUITES)


def run_verify(suites: list[str], samples: int, seed: int) -> dict:
    """Run the named suites and return the JSON-ready report."""
    report: dict = {"seed": seed, "suites": []}
    for name in suites:
        if name not in _SUITES:
            raise DomainError(f"unknown suite {name!r}; choose from {sorted(_SUITES)}")
        report["suites"].append(_SUITES[name](samples, seed))
    report["total_failures"] = int(sum(s["failures"] for s in report["suites"]))
    return report
