import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scsqkd.fidelity import (VacuousBoundError, VirtualIntensities,
                             fidelity_lower_bound, g_func,
                             virtual_intensities)
from scsqkd.model import SourceBounds

import refcalc

# frozen from refcalc at 60 digits
G_09_099 = 0.9123051867514526
FID_TROJAN = 0.9047750667630382          # v0=e^-1e-8, s0=e^-0.1, xi=1, mu_e=1e-6
MU_A_VAC_1E6 = 0.10065370667785698       # a0=e^-0.1, av0=e^-1e-6, xi=1, mu_e=0

overlaps = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestGFunc:
    def test_half_half_is_zero(self):
        assert g_func(0.5, 0.5) == 0.0

    def test_identity_case(self):
        assert g_func(1.0, 1.0) == 1.0

    def test_high_precision_value(self):
        assert g_func(0.9, 0.99) == pytest.approx(G_09_099, rel=1e-14)

    def test_negative_for_small_arguments(self):
        assert g_func(0.1, 0.1) < 0.0

    @pytest.mark.parametrize("a,b", [(-0.1, 0.5), (0.5, 1.1), (2.0, 2.0),
                                     (float("nan"), 0.5)])
    def test_domain_error(self, a, b):
        with pytest.raises(ValueError):
            g_func(a, b)

    @settings(max_examples=200, deadline=None)
    @given(a=overlaps, b=overlaps)
    def test_symmetry(self, a, b):
        assert g_func(a, b) == pytest.approx(g_func(b, a), abs=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(a=overlaps, b=overlaps)
    def test_matches_reference(self, a, b):
        want = float(refcalc.g(a, b))
        got = g_func(a, b)
        if want == 0.0:
            assert got == 0.0
        else:
            assert got == pytest.approx(want, rel=1e-12)


class TestFidelityLowerBound:
    def test_ideal_vacuum_reduces_to_s0(self):
        s0 = math.exp(-0.1)
        assert fidelity_lower_bound(1.0, s0, xi=1, mu_e=0.0) == pytest.approx(
            s0, rel=1e-14)

    def test_identical_states(self):
        assert fidelity_lower_bound(1.0, 1.0, xi=0, mu_e=0.0) == 1.0

    def test_trojan_extension_value(self):
        got = fidelity_lower_bound(math.exp(-1e-8), math.exp(-0.1),
                                   xi=1, mu_e=1e-6)
        assert got == pytest.approx(FID_TROJAN, rel=1e-12)

    def test_vacuous_product_raises(self):
        # G(s0, v0) = 0 at s0 = v0 = 0.5
        with pytest.raises(VacuousBoundError):
            fidelity_lower_bound(0.5, 0.5, xi=0, mu_e=0.0)
        with pytest.raises(VacuousBoundError):
            fidelity_lower_bound(1.0, 1.0, xi=0, mu_e=0.5)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            fidelity_lower_bound(0.4, 0.9, xi=1, mu_e=0.0)
        with pytest.raises(ValueError):
            fidelity_lower_bound(0.9, 0.9, xi=-1, mu_e=0.0)
        with pytest.raises(ValueError):
            fidelity_lower_bound(0.9, 0.9, xi=1, mu_e=1.0)


def bounds_from(mu, mu_o, mu_e=0.0, xi=1):
    return SourceBounds.from_intensities(mu=mu, mu_o=mu_o, mu_e=mu_e, xi=xi)


class TestVirtualIntensities:
    def test_perfect_vacuum_gives_physical_intensity(self):
        vi = virtual_intensities(bounds_from(0.1, 0.0, 0.0, 1))
        assert vi.mu_a == pytest.approx(0.1, rel=1e-12)
        assert vi.mu_b == vi.mu_a

    def test_continuous_at_zero_trojan(self):
        base = virtual_intensities(bounds_from(0.1, 1e-8, 0.0, 1))
        tiny = virtual_intensities(bounds_from(0.1, 1e-8, 1e-30, 1))
        assert tiny.mu_a == pytest.approx(base.mu_a, rel=1e-12)

    def test_imperfect_vacuum_value(self):
        vi = virtual_intensities(bounds_from(0.1, 1e-6, 0.0, 1))
        assert vi.mu_a == pytest.approx(MU_A_VAC_1E6, rel=1e-12)

    def test_reduction_is_exact(self):
        # xi = 0, mu_e = 0, ideal vacuum: mu' = -ln(a0) exactly
        b = bounds_from(0.3, 0.0, 0.0, 0)
        vi = virtual_intensities(b)
        assert vi.mu_a == -math.log(b.a0)

    def test_vacuous_reports_no_secure_mapping(self):
        b = SourceBounds(a0=0.5, av0=0.5, b0=1.0, bv0=1.0, mu_e=0.0, xi=1)
        with pytest.raises(VacuousBoundError, match="no secure mapping"):
            virtual_intensities(b)

    def test_asymmetric_sides(self):
        b = SourceBounds(a0=math.exp(-0.1), av0=1.0, b0=math.exp(-0.2),
                         bv0=1.0, mu_e=0.0, xi=0)
        vi = virtual_intensities(b)
        assert vi.mu_a == pytest.approx(0.1, rel=1e-12)
        assert vi.mu_b == pytest.approx(0.2, rel=1e-12)

    @settings(max_examples=150, deadline=None)
    @given(mu=st.floats(min_value=1e-6, max_value=0.6),
           mu_o=st.floats(min_value=0.0, max_value=1e-2),
           mu_e=st.floats(min_value=0.0, max_value=0.2),
           xi=st.integers(min_value=0, max_value=3))
    def test_matches_reference(self, mu, mu_o, mu_e, xi):
        b = bounds_from(mu, mu_o, mu_e, xi)
        vi = virtual_intensities(b)
        want = float(refcalc.virtual_mu(b.a0, b.av0, xi, mu_e))
        assert vi.mu_a == pytest.approx(want, rel=1e-10)


class TestMonotonicity:
    @settings(max_examples=150, deadline=None)
    @given(mu=st.floats(min_value=1e-4, max_value=0.5),
           bump=st.floats(min_value=1e-4, max_value=0.15),
           mu_o=st.floats(min_value=0.0, max_value=1e-3))
    def test_decreasing_in_a0(self, mu, bump, mu_o):
        low = virtual_intensities(bounds_from(mu + bump, mu_o)).mu_a
        high = virtual_intensities(bounds_from(mu, mu_o)).mu_a
        assert high <= low * (1.0 + 1e-12) + 1e-15

    @settings(max_examples=150, deadline=None)
    @given(mu=st.floats(min_value=1e-4, max_value=0.5),
           mu_o=st.floats(min_value=0.0, max_value=1e-3),
           bump=st.floats(min_value=1e-6, max_value=1e-2))
    def test_decreasing_in_av0(self, mu, mu_o, bump):
        worse = virtual_intensities(bounds_from(mu, mu_o + bump)).mu_a
        better = virtual_intensities(bounds_from(mu, mu_o)).mu_a
        assert better <= worse * (1.0 + 1e-12) + 1e-15

    @settings(max_examples=150, deadline=None)
    @given(mu=st.floats(min_value=1e-4, max_value=0.5),
           mu_e=st.floats(min_value=0.0, max_value=0.2),
           bump=st.floats(min_value=1e-8, max_value=0.2))
    def test_increasing_in_mu_e(self, mu, mu_e, bump):
        lo = virtual_intensities(bounds_from(mu, 1e-8, mu_e)).mu_a
        hi = virtual_intensities(bounds_from(mu, 1e-8, min(mu_e + bump, 0.45))).mu_a
        assert hi >= lo * (1.0 - 1e-12) - 1e-15

    @settings(max_examples=100, deadline=None)
    @given(mu=st.floats(min_value=1e-4, max_value=0.5),
           mu_o=st.floats(min_value=1e-10, max_value=1e-3),
           xi=st.integers(min_value=0, max_value=4))
    def test_increasing_in_xi(self, mu, mu_o, xi):
        lo = virtual_intensities(bounds_from(mu, mu_o, 0.0, xi)).mu_a
        hi = virtual_intensities(bounds_from(mu, mu_o, 0.0, xi + 1)).mu_a
        assert hi >= lo * (1.0 - 1e-12)

    def test_trojan_bound_nested_inside_plain_bound(self):
        v0, s0 = math.exp(-1e-8), math.exp(-0.1)
        plain = fidelity_lower_bound(v0, s0, xi=1, mu_e=0.0)
        trojan = fidelity_lower_bound(v0, s0, xi=1, mu_e=1e-4)
        assert trojan <= plain


class TestVirtualIntensitiesType:
    def test_rejects_negative(self):
        with pytest.raises(Exception):
            VirtualIntensities(mu_a=-0.1, mu_b=0.1)
