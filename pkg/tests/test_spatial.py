"""Gaussian packets, box probabilities and the localization factor.

Closed-form box probabilities are checked against adaptive 1-d quadrature of
the Gaussian density (scipy.integrate.quad), and the 6-d quadrature path is
checked against the closed-form product path.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from bellspace.rng import make_generator
from bellspace.spatial import (
    BoxRegion,
    GaussianPacket,
    LocalizationFactor,
    QuadratureError,
    expanded_width,
    g_decay_curve,
    g_factor_product,
    g_factor_quadrature,
    packet_probability_in_box,
    product_density,
    separated_gaussian_setup,
    setup_g_factor,
)

# (Phi(1) - Phi(-1))^3 and its sixth power, frozen from the quad oracle below
ONE_SIGMA_CUBE_PROB = 0.31817763901728086
BENCHMARK_G = 0.10123700997061108


def one_axis_quad(width_param: float, lo: float, hi: float, center: float = 0.0) -> float:
    """Independent 1-d quadrature of the Gaussian position density."""

    def density(x: float) -> float:
        return math.sqrt(width_param**2 / (2 * math.pi)) * math.exp(
            -(width_param**2) * (x - center) ** 2 / 2
        )

    value, err = integrate.quad(density, lo, hi, epsabs=1e-14, epsrel=1e-13)
    assert err < 1e-12
    return value


class TestPacketProbability:
    def test_whole_space_normalization(self):
        packet = GaussianPacket((0.3, -1.0, 2.0), width_param=2.0)
        big = 1e9 / 2.0  # +- 2e9 sigma
        region = BoxRegion((-big, -big, -big), (big, big, big))
        assert packet_probability_in_box(packet, region, 0.0) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_one_sigma_cube_vs_quad_oracle(self):
        packet = GaussianPacket((0.0, 0.0, 0.0), width_param=1.0)
        region = BoxRegion((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
        prob = packet_probability_in_box(packet, region, 0.0)
        oracle = one_axis_quad(1.0, -1.0, 1.0) ** 3
        assert prob == pytest.approx(oracle, abs=1e-12)
        assert prob == pytest.approx(ONE_SIGMA_CUBE_PROB, abs=1e-12)

    def test_far_box_is_negligible(self):
        packet = GaussianPacket((0.0, 0.0, 0.0), width_param=1.0)
        region = BoxRegion((20.0, -0.5, -0.5), (21.0, 0.5, 0.5))
        assert packet_probability_in_box(packet, region, 0.0) < 1e-50

    def test_random_boxes_vs_quad_oracle(self):
        rng = make_generator(3)
        for _ in range(20):
            m = rng.uniform(0.5, 3.0)
            center = rng.uniform(-2, 2, 3)
            packet = GaussianPacket(tuple(center), width_param=m)
            lo = center + rng.uniform(-3, 0, 3) / m
            hi = lo + rng.uniform(0.5, 4, 3) / m
            region = BoxRegion(tuple(lo), tuple(hi))
            oracle = 1.0
            for axis in range(3):
                oracle *= one_axis_quad(m, lo[axis], hi[axis], center[axis])
            assert packet_probability_in_box(packet, region, 0.0) == pytest.approx(
                oracle, abs=1e-11
            )


class TestGFactorProduct:
    def test_benchmark_setup_value(self):
        setup = separated_gaussian_setup(1.0, (100.0, 0.0, 0.0))
        g = setup_g_factor(setup, 0.0).g
        oracle = one_axis_quad(1.0, -1.0, 1.0) ** 6
        assert g == pytest.approx(oracle, abs=1e-12)
        assert g == pytest.approx(BENCHMARK_G, abs=1e-9)

    def test_benchmark_setup_below_bounds(self):
        setup = separated_gaussian_setup(1.0, (100.0, 0.0, 0.0))
        g = setup_g_factor(setup, 0.0).g
        assert g < (2 / math.pi) ** 3
        assert g < 0.5

    def test_disjoint_far_regions(self):
        packet = GaussianPacket((0.0, 0.0, 0.0), width_param=1.0)
        far = BoxRegion((50.0, 50.0, 50.0), (51.0, 51.0, 51.0))
        near = BoxRegion((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
        assert g_factor_product(packet, packet, far, near).g < 1e-100

    def test_translation_invariance(self):
        rng = make_generator(7)
        for _ in range(20):
            shift = rng.uniform(-5, 5, 3)
            m = rng.uniform(0.5, 2.0)
            pa = GaussianPacket((0.0, 0.0, 0.0), m)
            pb = GaussianPacket((12.0, 0.0, 0.0), m)
            ra = BoxRegion.centered_cube((0.0, 0.0, 0.0), 1.0)
            rb = BoxRegion.centered_cube((12.0, 0.0, 0.0), 1.0)
            g0 = g_factor_product(pa, pb, ra, rb, 0.5).g
            pa2 = GaussianPacket(tuple(shift), m)
            pb2 = GaussianPacket(tuple(shift + [12.0, 0.0, 0.0]), m)
            g1 = g_factor_product(
                pa2, pb2, ra.translate(shift), rb.translate(shift), 0.5
            ).g
            assert g1 == pytest.approx(g0, abs=1e-12)

    def test_region_growth_never_decreases_g(self):
        rng = make_generator(13)
        packet_a = GaussianPacket((0.0, 0.0, 0.0), 1.0)
        packet_b = GaussianPacket((8.0, 0.0, 0.0), 1.5)
        for _ in range(200):
            lo = rng.uniform(-3, 0, 3)
            hi = lo + rng.uniform(0.1, 3, 3)
            grow_lo = lo - rng.uniform(0, 2, 3)
            grow_hi = hi + rng.uniform(0, 2, 3)
            small = BoxRegion(tuple(lo), tuple(hi))
            large = BoxRegion(tuple(grow_lo), tuple(grow_hi))
            region_b = BoxRegion.centered_cube((8.0, 0.0, 0.0), 1.0)
            g_small = g_factor_product(packet_a, packet_b, small, region_b).g
            g_large = g_factor_product(packet_a, packet_b, large, region_b).g
            assert g_large >= g_small - 1e-15

    def test_bounds_always_hold(self):
        rng = make_generator(17)
        for _ in range(50):
            pa = GaussianPacket(tuple(rng.uniform(-2, 2, 3)), rng.uniform(0.3, 3))
            pb = GaussianPacket(tuple(rng.uniform(-2, 2, 3)), rng.uniform(0.3, 3))
            lo = rng.uniform(-4, 2, 3)
            region = BoxRegion(tuple(lo), tuple(lo + rng.uniform(0.1, 5, 3)))
            g = g_factor_product(pa, pb, region, region, rng.uniform(0, 3)).g
            assert 0.0 <= g <= 1.0


class TestQuadraturePath:
    def test_matches_product_path_benchmark(self):
        setup = separated_gaussian_setup(1.0, (15.0, 0.0, 0.0))
        density = product_density(setup.packet_a, setup.packet_b)
        g_quad = g_factor_quadrature(density, setup.region_a, setup.region_b, tol=1e-9)
        g_prod = setup_g_factor(setup, 0.0)
        assert g_quad.g == pytest.approx(g_prod.g, abs=1e-8)

    def test_matches_product_path_random_configs(self):
        rng = make_generator(19)
        for _ in range(50):
            m_a, m_b = rng.uniform(0.6, 2.0, 2)
            c_a = rng.uniform(-1, 1, 3)
            c_b = rng.uniform(4, 6, 3)
            pa = GaussianPacket(tuple(c_a), m_a)
            pb = GaussianPacket(tuple(c_b), m_b)
            ra = BoxRegion(tuple(c_a - rng.uniform(0.3, 2, 3) / m_a),
                           tuple(c_a + rng.uniform(0.3, 2, 3) / m_a))
            rb = BoxRegion(tuple(c_b - rng.uniform(0.3, 2, 3) / m_b),
                           tuple(c_b + rng.uniform(0.3, 2, 3) / m_b))
            t = rng.uniform(0, 1)
            tol = 1e-6
            g_quad = g_factor_quadrature(product_density(pa, pb, t), ra, rb, tol=tol)
            g_prod = g_factor_product(pa, pb, ra, rb, t)
            assert abs(g_quad.g - g_prod.g) < 2 * tol

    def test_zero_density(self):
        def zero(r1, r2):
            return np.zeros(r1.shape[:-1])

        region = BoxRegion((-1, -1, -1), (1, 1, 1))
        assert g_factor_quadrature(zero, region, region, tol=1e-10).g == 0.0

    def test_symmetric_density_swap(self):
        pa = GaussianPacket((0.0, 0.0, 0.0), 1.0)
        pb = GaussianPacket((6.0, 0.0, 0.0), 1.0)

        def symmetric(r1, r2):
            return 0.5 * (pa.density(r1) * pb.density(r2) + pb.density(r1) * pa.density(r2))

        ra = BoxRegion.centered_cube((0.0, 0.0, 0.0), 1.2)
        rb = BoxRegion.centered_cube((6.0, 0.0, 0.0), 0.8)
        tol = 1e-8
        g1 = g_factor_quadrature(symmetric, ra, rb, tol=tol).g
        g2 = g_factor_quadrature(symmetric, rb, ra, tol=tol).g
        assert abs(g1 - g2) < 2 * tol

    def test_nonconvergence_reports_best_estimate(self):
        packet = GaussianPacket((0.0, 0.0, 0.0), 1.0)

        def wiggly(r1, r2):
            return packet.density(r1) * packet.density(r2) * np.cos(80.0 * r1[..., 0]) ** 2

        region = BoxRegion((-1, -1, -1), (1, 1, 1))
        with pytest.raises(QuadratureError) as excinfo:
            g_factor_quadrature(wiggly, region, region, tol=1e-12, orders=(4, 6, 8))
        assert math.isfinite(excinfo.value.best_estimate)
        assert excinfo.value.error_bound > 0


class TestBenchmarkSetup:
    def test_geometry(self):
        setup = separated_gaussian_setup(1.0, (100.0, 0.0, 0.0))
        assert setup.region_a.lo == (-1.0, -1.0, -1.0)
        assert setup.region_a.hi == (1.0, 1.0, 1.0)
        assert setup.region_b.lo == (99.0, -1.0, -1.0)
        assert setup.region_b.hi == (101.0, 1.0, 1.0)
        assert setup.packet_b.center == (100.0, 0.0, 0.0)

    def test_width_scaling(self):
        setup = separated_gaussian_setup(2.0, (50.0, 0.0, 0.0))
        assert setup.region_a.hi == (0.5, 0.5, 0.5)

    def test_separation_too_small(self):
        with pytest.raises(ValueError):
            separated_gaussian_setup(1.0, (5.0, 0.0, 0.0))
        # exactly at the limit is allowed
        separated_gaussian_setup(1.0, (10.0, 0.0, 0.0))


class TestExpandedWidth:
    def test_zero_time(self):
        assert expanded_width(1.0, 1.0, 0.0, 1.0) == 1.0
        assert expanded_width(0.37, 2.1, 0.0, 0.9) == 0.37

    def test_unit_substitution(self):
        assert expanded_width(1.0, 1.0, 1.0, 1.0) == pytest.approx(
            math.sqrt(2.0), abs=1e-15
        )

    def test_ballistic_asymptote(self):
        t = 1e6
        width = expanded_width(1.0, 1.0, t, 1.0)
        assert width / t == pytest.approx(1.0, abs=1e-6)

    def test_strictly_increasing(self):
        widths = [expanded_width(0.5, 1.3, t, 1.0) for t in (0.0, 0.1, 1.0, 5.0, 50.0)]
        assert all(w2 > w1 for w1, w2 in zip(widths, widths[1:]))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            expanded_width(0.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            expanded_width(1.0, 1.0, -1.0, 1.0)


class TestDecayCurve:
    def test_t0_matches_static(self):
        setup = separated_gaussian_setup(1.0, (100.0, 0.0, 0.0))
        curve = g_decay_curve(setup, [0.0, 1.0, 2.0])
        assert curve[0][1] == setup_g_factor(setup, 0.0).g

    def test_monotone_and_below_half(self):
        setup = separated_gaussian_setup(1.0, (100.0, 0.0, 0.0))
        times = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4]
        curve = g_decay_curve(setup, times)
        values = [g for _, g in curve]
        assert all(g2 <= g1 + 1e-15 for g1, g2 in zip(values, values[1:]))
        assert all(g < 0.5 for g in values)
        assert values[-1] < 1e-6

    def test_grid_validation(self):
        setup = separated_gaussian_setup(1.0, (100.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            g_decay_curve(setup, [1.0, 0.5])
        with pytest.raises(ValueError):
            g_decay_curve(setup, [-1.0, 0.5])


class TestTypes:
    def test_localization_factor_bounds(self):
        with pytest.raises(ValueError):
            LocalizationFactor(1.2)
        with pytest.raises(ValueError):
            LocalizationFactor(-0.01)
        assert float(LocalizationFactor(0.25)) == 0.25

    def test_box_region_validation(self):
        with pytest.raises(ValueError):
            BoxRegion((0.0, 0.0, 0.0), (1.0, 0.0, 1.0))

    def test_packet_validation(self):
        with pytest.raises(ValueError):
            GaussianPacket((0.0, 0.0, 0.0), width_param=-1.0)
        with pytest.raises(ValueError):
            GaussianPacket((0.0, 0.0), width_param=1.0)

    def test_packet_density_normalized(self):
        packet = GaussianPacket((0.5, -0.5, 1.0), 1.3)
        # integrate the density over a generous box by quadrature product
        prob = packet_probability_in_box(
            packet, BoxRegion.centered_cube(packet.center, 40.0), 0.0
        )
        assert prob == pytest.approx(1.0, abs=1e-12)
