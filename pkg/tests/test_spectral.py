"""Transforms, symbols, norms, conserved functionals, dyadic projectors."""

import math

import numpy as np
import pytest

from kpilab.errors import ConstraintViolation, DomainError, SymmetryViolation
from kpilab.spectral import (
    FrequencyPair,
    Grid,
    RealField,
    SpectralField,
    apply_linear_group,
    bump_chi,
    dispersion_symbol,
    energy,
    energy_norm,
    forward_transform,
    hamiltonian_c,
    inverse_transform,
    l2_norm,
    lp_projector,
    lp_projector_leq,
    mass,
    weight_p,
    x_antiderivative,
    x_derivative,
    y_derivative,
)
from kpilab.soliton import SolitonParams, soliton_profile

import oracles


def y_independent(grid, column):
    return RealField(grid, np.repeat(np.asarray(column)[:, None], grid.ny, axis=1))


class TestGrid:
    def test_lattice_frequencies(self, unit_grid):
        g = unit_grid
        assert g.dx == pytest.approx(2.0 * math.pi / 64)
        assert sorted(g.kx_index) == list(range(-32, 32))
        # q lattice is exactly lambda^{-1} Z
        assert np.all(g.q * g.lambda_y == g.ky_index)

    def test_rejects_bad_sizes(self):
        with pytest.raises(DomainError):
            Grid(48, 16, 1.0)
        with pytest.raises(DomainError):
            Grid(64, 2, 1.0)
        with pytest.raises(DomainError):
            Grid(64, 16, -1.0)
        with pytest.raises(DomainError):
            Grid(64, 16, 1.0, lambda_y=0.5)


class TestTransforms:
    def test_constant_maps_to_zero_mode(self, unit_grid):
        g = unit_grid
        f = forward_transform(RealField(g, np.ones((g.nx, g.ny))))
        assert f.coeffs[0, 0] == pytest.approx(g.area, rel=1e-14)
        rest = f.coeffs.copy()
        rest[0, 0] = 0.0
        assert np.abs(rest).max() < 1e-12 * g.area

    def test_cosine_single_mode(self, unit_grid):
        g = unit_grid
        f = forward_transform(y_independent(g, np.cos(g.x)))
        plus = np.where(g.kx_index == 1)[0][0]
        minus = np.where(g.kx_index == -1)[0][0]
        assert f.coeffs[plus, 0] == pytest.approx(g.area / 2, rel=1e-13)
        assert f.coeffs[minus, 0] == pytest.approx(g.area / 2, rel=1e-13)
        rest = f.coeffs.copy()
        rest[plus, 0] = rest[minus, 0] = 0.0
        assert np.abs(rest).max() < 1e-12 * g.area

    def test_round_trip(self, smooth_field):
        back = inverse_transform(forward_transform(smooth_field))
        scale = smooth_field.linf()
        assert np.abs(back.values - smooth_field.values).max() < 1e-12 * scale

    def test_inverse_of_delta_mode(self, unit_grid):
        g = unit_grid
        c = np.zeros((g.nx, g.ny), dtype=complex)
        c[0, 0] = g.area
        u = inverse_transform(SpectralField(g, c))
        assert np.abs(u.values - 1.0).max() < 1e-13

    def test_non_hermitian_rejected(self, unit_grid):
        g = unit_grid
        c = np.zeros((g.nx, g.ny), dtype=complex)
        c[3, 2] = 1.0  # no conjugate partner
        with pytest.raises(SymmetryViolation):
            inverse_transform(SpectralField(g, c))

    def test_parseval(self, smooth_field):
        f = forward_transform(smooth_field)
        lhs = float(np.sum(smooth_field.values**2)) * smooth_field.grid.dx * smooth_field.grid.dy
        rhs = float(np.sum(np.abs(f.coeffs) ** 2)) / smooth_field.grid.area
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestSymbols:
    @pytest.mark.parametrize(
        "zeta,expected",
        [((1.0, 0.0), 1.0), ((2.0, 2.0), 10.0), ((-1.0, 1.0), -2.0), ((0.0, 3.0), 0.0)],
    )
    def test_dispersion_values(self, zeta, expected):
        assert dispersion_symbol(zeta) == expected

    def test_group_identity_at_zero_time(self, smooth_field):
        f = forward_transform(smooth_field)
        assert np.array_equal(apply_linear_group(f, 0.0).coeffs, f.coeffs)

    def test_group_phase_on_single_mode(self, unit_grid):
        g = unit_grid
        c = np.zeros((g.nx, g.ny), dtype=complex)
        i = np.where(g.kx_index == 1)[0][0]
        j = np.where(g.ky_index == 1)[0][0]
        c[i, j] = 1.0
        out = apply_linear_group(SpectralField(g, c), 0.7)
        # omega(1, 1) = 2
        assert out.coeffs[i, j] == pytest.approx(np.exp(2j * 0.7), rel=1e-14)

    def test_group_law_and_unitarity(self, smooth_field):
        f = forward_transform(smooth_field)
        one = apply_linear_group(apply_linear_group(f, 0.3), 1.1)
        two = apply_linear_group(f, 1.4)
        assert np.abs(one.coeffs - two.coeffs).max() < 1e-12 * np.abs(f.coeffs).max()
        before = float(np.sum(np.abs(f.coeffs) ** 2))
        after = float(np.sum(np.abs(two.coeffs) ** 2))
        assert after == pytest.approx(before, rel=1e-13)

    def test_group_requires_constraint(self, unit_grid):
        g = unit_grid
        c = np.zeros((g.nx, g.ny), dtype=complex)
        c[0, 1] = 1.0
        c[0, -1] = 1.0
        with pytest.raises(ConstraintViolation):
            apply_linear_group(SpectralField(g, c), 0.1)


class TestDerivatives:
    def test_antiderivative_of_cosine(self, unit_grid):
        g = unit_grid
        f = forward_transform(y_independent(g, np.cos(g.x)))
        out = inverse_transform(x_antiderivative(f))
        expected = np.sin(g.x)[:, None] * np.ones((1, g.ny))
        assert np.abs(out.values - expected).max() < 1e-12

    def test_inverse_pair(self, smooth_field):
        f = forward_transform(smooth_field)
        back = inverse_transform(x_derivative(x_antiderivative(f)))
        assert np.abs(back.values - smooth_field.values).max() < 1e-12

    def test_antiderivative_rejects_x_mean(self, unit_grid):
        g = unit_grid
        c = np.zeros((g.nx, g.ny), dtype=complex)
        c[0, 1] = 1.0
        c[0, -1] = 1.0
        with pytest.raises(ConstraintViolation):
            x_antiderivative(SpectralField(g, c))


class TestWeight:
    def test_values(self):
        assert weight_p((1.0, 0.0)) == 1.0
        assert weight_p((1.0, 1.0)) == pytest.approx(math.sqrt(1.5), rel=1e-15)

    def test_zero_xi_rejected(self):
        with pytest.raises(DomainError):
            weight_p((0.0, 1.0))

    def test_square_identity(self, rng):
        # |<xi> p|^2 = 1 + xi^2 + q^2/xi^2 on random pairs
        for _ in range(1000):
            xi = rng.uniform(0.01, 10.0) * (1 if rng.random() < 0.5 else -1)
            q = rng.uniform(-10.0, 10.0)
            lhs = ((1.0 + xi * xi) ** 0.5 * weight_p((xi, q))) ** 2
            rhs = 1.0 + xi * xi + q * q / (xi * xi)
            assert lhs == pytest.approx(rhs, rel=1e-13)


class TestEnergyNorm:
    def test_zero_field(self, small_grid):
        assert energy_norm(RealField(small_grid, np.zeros((small_grid.nx, small_grid.ny)))) == 0.0

    def test_y_independent_drops_third_term(self, small_grid):
        g = small_grid
        u = y_independent(g, np.sin(4.0 * np.pi * g.x / g.length_x))
        f = forward_transform(u)
        ux = inverse_transform(x_derivative(f))
        expected = math.sqrt(l2_norm(u) ** 2 + l2_norm(ux) ** 2)
        assert energy_norm(u) == pytest.approx(expected, rel=1e-12)

    def test_three_term_decomposition(self, smooth_field):
        f = forward_transform(smooth_field)
        ux = inverse_transform(x_derivative(f))
        w = inverse_transform(x_antiderivative(y_derivative(f)))
        expected = math.sqrt(l2_norm(smooth_field) ** 2 + l2_norm(ux) ** 2 + l2_norm(w) ** 2)
        assert energy_norm(smooth_field) == pytest.approx(expected, rel=1e-10)

    def test_homogeneity(self, smooth_field, rng):
        base = energy_norm(smooth_field)
        for _ in range(5):
            alpha = rng.uniform(-3.0, 3.0)
            scaled = RealField(smooth_field.grid, alpha * smooth_field.values)
            assert energy_norm(scaled) == pytest.approx(abs(alpha) * base, rel=1e-12)


class TestFunctionals:
    def test_mass_of_sine(self, unit_grid):
        g = unit_grid
        u = y_independent(g, np.sin(g.x))
        assert mass(u) == pytest.approx(2.0 * math.pi**2, rel=1e-12)

    def test_soliton_mass_against_quadrature(self, soliton_grid):
        q1 = soliton_profile(SolitonParams(1.0), soliton_grid)
        expected = 2.0 * math.pi * oracles.soliton_moment(1.0, 2)
        assert expected == pytest.approx(2.0 * math.pi * 24.0, rel=1e-10)
        assert mass(q1) == pytest.approx(expected, rel=1e-6)

    def test_soliton_energy_against_quadrature(self, soliton_grid):
        q1 = soliton_profile(SolitonParams(1.0), soliton_grid)
        expected = 2.0 * math.pi * (
            oracles.soliton_gradient_moment(1.0) - oracles.soliton_moment(1.0, 3) / 3.0
        )
        assert expected == pytest.approx(-2.0 * math.pi * 72.0 / 5.0, rel=1e-10)
        assert energy(q1) == pytest.approx(expected, rel=1e-6)

    def test_hamiltonian_combination(self, smooth_field):
        c = 1.7
        assert hamiltonian_c(smooth_field, c) == pytest.approx(
            energy(smooth_field) + c * mass(smooth_field), rel=1e-14
        )

    def test_group_preserves_mass(self, smooth_field):
        f = forward_transform(smooth_field)
        moved = inverse_transform(apply_linear_group(f, 2.37))
        assert mass(moved) == pytest.approx(mass(smooth_field), rel=1e-13)


class TestBumpChi:
    def test_plateau_and_support(self):
        xs = np.linspace(-1.25, 1.25, 101)
        assert np.all(bump_chi(xs) == 1.0)
        xs = np.concatenate([np.linspace(1.6, 3.0, 50), -np.linspace(1.6, 3.0, 50)])
        assert np.all(bump_chi(xs) == 0.0)
        mid = bump_chi(np.linspace(1.26, 1.59, 100))
        assert np.all((0.0 < mid) & (mid < 1.0))

    def test_monotone_on_transition(self):
        xs = np.linspace(1.25, 1.6, 400)
        vals = bump_chi(xs)
        assert np.all(np.diff(vals) <= 1e-15)

    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_divided_differences_bounded(self, order):
        # smoothness proxy: high-order divided differences converge, not blow up
        xs = np.linspace(-2.0, 2.0, 801)

        def divided(h):
            offsets = np.arange(order + 1) - order / 2.0
            binom = [math.comb(order, j) * (-1) ** j for j in range(order + 1)]
            acc = sum(b * bump_chi(xs + o * h) for b, o in zip(binom, offsets))
            return np.abs(acc).max() / h**order

        d1, d2 = divided(1e-2), divided(5e-3)
        assert d2 < 1.5 * d1 + 1.0


class TestLittlewoodPaley:
    def test_plane_wave_passes_unchanged(self, unit_grid):
        g = unit_grid
        # xi = 1 sits on the plateau of eta_1
        u = y_independent(g, np.cos(g.x))
        f = forward_transform(u)
        out = lp_projector(f, 1.0)
        assert np.abs(out.coeffs - f.coeffs).max() < 1e-14 * g.area

    def test_telescoping_sum(self, smooth_field):
        g = smooth_field.grid
        f = forward_transform(smooth_field)
        xi_min = 2.0 * math.pi / g.length_x
        xi_max = float(np.abs(g.xi).max())
        m = 2.0 ** math.floor(math.log2(1.25 * xi_min))
        total = np.zeros_like(f.coeffs)
        while m <= 2.0 ** math.ceil(math.log2(xi_max / 0.8) + 1):
            total = total + lp_projector(f, m).coeffs
            m *= 2.0
        expected = f.coeffs.copy()
        expected[0, :] = 0.0
        assert np.abs(total - expected).max() < 1e-10 * np.abs(f.coeffs).max()

    def test_separated_scales_annihilate(self, smooth_field, rng):
        f = forward_transform(smooth_field)
        for m in (0.25, 0.5, 1.0):
            for factor in (4.0, 8.0):
                out = lp_projector(lp_projector(f, factor * m), m)
                assert np.abs(out.coeffs).max() < 1e-14 * np.abs(f.coeffs).max()

    def test_low_pass_counts_low_modes(self, unit_grid):
        g = unit_grid
        u = y_independent(g, np.cos(g.x))
        f = forward_transform(u)
        assert np.abs(lp_projector_leq(f, 1.0).coeffs - f.coeffs).max() < 1e-14 * g.area
        assert np.abs(lp_projector_leq(f, 0.25).coeffs).max() < 1e-14 * g.area

    def test_dyadic_scale_required(self, smooth_field):
        f = forward_transform(smooth_field)
        with pytest.raises(DomainError):
            lp_projector(f, 0.3)
