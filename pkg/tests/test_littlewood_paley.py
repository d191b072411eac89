"""Tests for the dyadic decomposition, norms, and estimate probes."""

import numpy as np
import pytest

from hallmhd.littlewood_paley import (
    NormSpec,
    besov_norm,
    commutator_advection,
    commutator_bound_ratio,
    dyadic_block,
    gagliardo_nirenberg_ratio,
    get_blocks,
    low_pass,
    sobolev_norm,
    widened_block,
)
from hallmhd.spectral import (
    PhysicalVectorField,
    SpectralVectorField,
    advect,
    l2_norm,
    multiplier_norm,
    spectral_from_raw,
    transform_forward,
    zero_field,
)

from conftest import random_divfree, random_field


def single_mode(grid, k, component=0, amplitude=1.0):
    xx, yy, zz = grid.collocation_points()
    phase = k[0] * xx + k[1] * yy + k[2] * zz
    scale = 2.0 * np.pi / grid.box_length
    f = np.zeros((3, grid.n, grid.n, grid.n))
    f[component] = amplitude * np.cos(scale * phase)
    return transform_forward(PhysicalVectorField(grid, f))


class TestPartition:
    def test_partition_of_unity(self, grid32):
        assert get_blocks(grid32).partition_residual() < 1e-14

    @pytest.mark.parametrize("seed", range(20))
    def test_reconstruction(self, grid32, seed):
        f = random_field(grid32, 1000 + seed)
        blocks = get_blocks(grid32)
        total = np.zeros_like(f.coefficients)
        for j in range(blocks.j_min, blocks.j_max + 1):
            total += dyadic_block(f, j).coefficients
        err = l2_norm(SpectralVectorField(grid32, total - f.coefficients))
        assert err < 1e-12 * max(l2_norm(f), 1e-30)

    def test_single_mode_block_support(self, grid32):
        j = 2
        f = single_mode(grid32, (2**j, 0, 0))
        blocks = get_blocks(grid32)
        for k in range(blocks.j_min, blocks.j_max + 1):
            norm = l2_norm(dyadic_block(f, k))
            if abs(k - j) > 1:
                assert norm < 1e-13
        assert l2_norm(dyadic_block(f, j)) > 0

    def test_distant_blocks_disjoint(self, grid32):
        f = random_field(grid32, 77)
        for j, k in [(0, 2), (0, 3), (1, 3), (2, 4)]:
            out = dyadic_block(dyadic_block(f, j), k)
            assert np.max(np.abs(out.coefficients)) < 1e-14

    def test_block_index_out_of_range(self, grid32):
        f = random_field(grid32, 76)
        blocks = get_blocks(grid32)
        with pytest.raises(ValueError):
            dyadic_block(f, blocks.j_min - 1)
        with pytest.raises(ValueError):
            dyadic_block(f, blocks.j_max + 1)

    def test_widened_block_is_three_blocks(self, grid32):
        f = random_field(grid32, 78)
        w = widened_block(f, 2)
        expected = sum(dyadic_block(f, j).coefficients for j in (1, 2, 3))
        assert np.max(np.abs(w.coefficients - expected)) < 1e-14

    def test_bernstein_gradient_bound(self, grid32):
        f = random_field(grid32, 79)
        blocks = get_blocks(grid32)
        for j in range(0, blocks.j_max + 1):
            blk = dyadic_block(f, j)
            if l2_norm(blk) == 0:
                continue
            assert multiplier_norm(blk, 1.0) <= (8.0 / 3.0) * 2.0**j * l2_norm(blk) * (1 + 1e-12)


class TestLowPass:
    def test_full_range_is_identity(self, grid32):
        f = random_field(grid32, 80)
        blocks = get_blocks(grid32)
        out = low_pass(f, blocks.j_max + 2)
        assert l2_norm(SpectralVectorField(grid32, out.coefficients - f.coefficients)) < 1e-12 * l2_norm(f)

    def test_bottom_is_zero(self, grid32):
        f = random_field(grid32, 81)
        out = low_pass(f, get_blocks(grid32).j_min)
        assert np.max(np.abs(out.coefficients)) == 0.0

    def test_telescoping(self, grid32):
        f = random_field(grid32, 82)
        blocks = get_blocks(grid32)
        k = 2
        total = low_pass(f, k).coefficients.copy()
        for j in range(k, blocks.j_max + 1):
            total += dyadic_block(f, j).coefficients
        err = l2_norm(SpectralVectorField(grid32, total - f.coefficients))
        assert err < 1e-12 * l2_norm(f)


class TestSobolevNorm:
    def test_single_mode_multiplier(self, grid32):
        f = single_mode(grid32, (2, 0, 0))
        direct = sobolev_norm(f, 1.0, homogeneous=True, method="direct")
        assert direct == pytest.approx(2.0 * l2_norm(f), rel=1e-12)

    def test_s_zero_is_l2(self, grid32):
        f = random_field(grid32, 83)
        assert sobolev_norm(f, 0.0, homogeneous=True, method="direct") == pytest.approx(
            l2_norm(f), rel=1e-12
        )

    @pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_lp_direct_equivalence_band(self, grid32, s, seed):
        f = random_field(grid32, 900 + seed)
        lp = sobolev_norm(f, s, homogeneous=True, method="lp")
        direct = sobolev_norm(f, s, homogeneous=True, method="direct")
        assert 0.5 <= lp / direct <= 2.0

    def test_inhomogeneous_adds_l2(self, grid32):
        f = random_field(grid32, 84)
        hom = sobolev_norm(f, 2.0, homogeneous=True)
        inhom = sobolev_norm(f, 2.0, homogeneous=False)
        assert inhom == pytest.approx(hom + l2_norm(f), rel=1e-12)


class TestBesovNorm:
    def test_zero_field(self, grid32):
        assert besov_norm(zero_field(grid32), NormSpec(1.0, np.inf, np.inf)) == 0.0

    def test_single_shell_sup_norm(self, grid32):
        j, amplitude = 1, 1.5
        f = single_mode(grid32, (2**j, 0, 0), amplitude=amplitude)
        val = besov_norm(f, NormSpec(1.0, np.inf, np.inf))
        ref = 2.0**j * amplitude
        assert ref / 3.0 <= val <= 3.0 * ref

    def test_b022_matches_lp_l2(self, grid32):
        f = random_field(grid32, 85)
        b = besov_norm(f, NormSpec(0.0, 2.0, 2.0))
        lp = sobolev_norm(f, 0.0, homogeneous=True, method="lp")
        assert b == pytest.approx(lp, rel=1e-12)


class TestCommutator:
    def test_constant_velocity_commutes(self, grid32):
        c = np.zeros((3, 32, 32, 32), dtype=np.complex128)
        c[0][0, 0, 0] = 1.3
        H = spectral_from_raw(grid32, c, mask=False)
        X = random_field(grid32, 86)
        for j in (0, 1, 2):
            out = commutator_advection(H, X, j)
            assert np.max(np.abs(out.coefficients)) < 1e-12

    def test_linearity_in_velocity(self, grid32):
        H = random_divfree(grid32, 87)
        X = random_field(grid32, 88)
        lam = 2.75
        scaled = commutator_advection(
            SpectralVectorField(grid32, lam * H.coefficients), X, 2
        )
        base = commutator_advection(H, X, 2)
        err = np.max(np.abs(scaled.coefficients - lam * base.coefficients))
        assert err < 1e-12 * max(1.0, np.max(np.abs(base.coefficients)))

    def test_paraproduct_assembly_oracle(self, grid32):
        # assemble the commutator from the exact block-pair decomposition:
        # every (H-block, X-block) pair lands in exactly one of the three
        # groups, so bilinearity makes the sum equal the direct commutator.
        H = random_divfree(grid32, 89, band_fraction=0.5)
        X = random_field(grid32, 90, band_fraction=0.5)
        j = 1
        blocks = get_blocks(grid32)
        direct = commutator_advection(H, X, j)

        def comm(velocity, target):
            d = dyadic_block(advect(velocity, target), j)
            s = advect(velocity, dyadic_block(target, j))
            return d.coefficients - s.coefficients

        total = np.zeros_like(direct.coefficients)
        for k in range(blocks.j_min, blocks.j_max + 1):
            s_km1 = low_pass(H, k - 1)
            total += comm(s_km1, dyadic_block(X, k))
            total += comm(dyadic_block(H, k), low_pass(X, k - 1))
            total += comm(dyadic_block(H, k), widened_block(X, k))
        scale = max(np.max(np.abs(direct.coefficients)), 1e-30)
        assert np.max(np.abs(total - direct.coefficients)) < 1e-10 * scale


class TestCommutatorRatio:
    def test_constant_velocity_ratio_zero(self, grid32):
        c = np.zeros((3, 32, 32, 32), dtype=np.complex128)
        c[1][0, 0, 0] = 0.7
        H = spectral_from_raw(grid32, c, mask=False)
        X = random_divfree(grid32, 91)
        W = random_divfree(grid32, 92)
        assert commutator_bound_ratio(H, X, W, 1) == 0.0

    def test_scaling_invariance(self, grid32):
        H = random_divfree(grid32, 93)
        X = random_divfree(grid32, 94)
        W = random_divfree(grid32, 95)
        base = commutator_bound_ratio(H, X, W, 2)
        scaled = commutator_bound_ratio(
            SpectralVectorField(grid32, 3.0 * H.coefficients),
            SpectralVectorField(grid32, 0.5 * X.coefficients),
            SpectralVectorField(grid32, 7.0 * W.coefficients),
            2,
        )
        assert scaled == pytest.approx(base, rel=1e-10)

    @pytest.mark.parametrize("seed", range(10))
    def test_ratio_finite_over_sweep(self, grid32, seed):
        H = random_divfree(grid32, 2000 + seed)
        X = random_divfree(grid32, 3000 + seed)
        W = random_divfree(grid32, 4000 + seed)
        for j in range(0, 4):
            r = commutator_bound_ratio(H, X, W, j)
            assert np.isfinite(r) and r >= 0


class TestGagliardoNirenberg:
    def test_single_mode_equality(self, grid32):
        f = single_mode(grid32, (3, 0, 0))
        for s, gamma in [(1.0, 0.5), (3.0, 0.5), (2.0, 1.0)]:
            assert gagliardo_nirenberg_ratio(f, s, gamma) == pytest.approx(1.0, abs=1e-12)

    def test_two_mode_holder_oracle(self, grid32):
        # equal-amplitude modes at |xi| = 1 and 4; closed-form frequency sums
        xx, yy, _ = grid32.collocation_points()
        f = np.zeros((3, 32, 32, 32))
        f[0] = np.cos(xx)
        f[1] = np.cos(4 * yy)
        sf = transform_forward(PhysicalVectorField(grid32, f))
        s, gamma = 1.0, 0.5

        def norm_sq(sigma):
            return 0.5 * (1.0 + 16.0**sigma)

        theta = gamma / s
        expected = np.sqrt(norm_sq(s)) / (
            norm_sq(gamma) ** (theta / 2) * norm_sq(gamma + s) ** ((1 - theta) / 2)
        )
        got = gagliardo_nirenberg_ratio(sf, s, gamma)
        assert got == pytest.approx(expected, rel=1e-10)
        assert got <= 1.0 + 1e-10

    @pytest.mark.parametrize("seed", range(20))
    def test_random_fields_bounded(self, grid32, seed):
        f = random_field(grid32, 5000 + seed)
        assert gagliardo_nirenberg_ratio(f, 1.0, 0.5) <= 1.0 + 1e-10

    def test_zero_field(self, grid32):
        assert gagliardo_nirenberg_ratio(zero_field(grid32), 1.0, 0.5) == 0.0

    def test_bad_exponents_rejected(self, grid32):
        with pytest.raises(ValueError):
            gagliardo_nirenberg_ratio(zero_field(grid32), 0.5, 1.0)
