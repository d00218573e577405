import pytest
from hypothesis import given, strategies as st

from mtcavity.transfer import ForsterParams, compare_channels, forster_rate


def test_rate_at_forster_radius():
    assert forster_rate(ForsterParams(T1=2e-12, r0_angstrom=2.1, r_angstrom=2.1)) == 1 / 2e-12


def test_water_values():
    k = forster_rate(ForsterParams(T1=1.0))
    assert 0.75**6 == pytest.approx(0.177978515625)
    assert k == pytest.approx(0.178, abs=1e-3)


def test_sixth_power_far_field():
    p = ForsterParams(T1=1.0, r0_angstrom=2.0, r_angstrom=20.0)
    assert forster_rate(p) == pytest.approx(1e-6, rel=1e-12)


@pytest.mark.parametrize("kw", [{"T1": 0}, {"T1": 1, "r_angstrom": 0}, {"T1": 1, "r0_angstrom": -1}])
def test_invalid(kw):
    with pytest.raises(ValueError):
        ForsterParams(**kw)


@given(st.floats(0.5, 50), st.floats(0.5, 50), st.floats(1e-15, 1e-9))
def test_monotonicity_and_scaling(r0, r, t1):
    k = forster_rate(ForsterParams(t1, r0, r))
    assert forster_rate(ForsterParams(t1, r0, r * 1.01)) < k
    assert forster_rate(ForsterParams(t1, r0 * 1.01, r)) > k
    assert forster_rate(ForsterParams(t1 * 3, r0, r)) == pytest.approx(k / 3, rel=1e-12)


class TestCompareChannels:
    def test_hop_chain(self):
        # 1e-6 / 2.8e-10 = 3571.4 hops at 1e-12 s each
        res = compare_channels(ForsterParams(1e-12, 2.1, 2.1), 2.8e-10, 1e-6, (1e-6, 2.0))
        assert res.forster_chain_time_s == pytest.approx(3.6e-9, rel=0.01)
        assert res.forster_chain_time_s == pytest.approx(1e-6 / 2.8e-10 * 1e-12, rel=1e-12)

    def test_kink_time(self):
        res = compare_channels(ForsterParams(1e-12), 2.8e-10, 1e-6, (1e-6, 2.0))
        assert res.kink_time_s == pytest.approx(5e-7, rel=1e-12)
        assert res.ratio == pytest.approx(res.forster_chain_time_s / 5e-7)

    def test_empty_chain(self):
        assert compare_channels(ForsterParams(1e-12), 2.8e-10, 0.0, (1e-6, 2.0)).forster_chain_time_s == 0.0

    @given(st.floats(1e-8, 1e-4), st.floats(0.1, 10))
    def test_homogeneous_in_length(self, length, a):
        p = ForsterParams(1e-12)
        one = compare_channels(p, 2.8e-10, length, (length, 2.0))
        scaled = compare_channels(p, 2.8e-10, a * length, (a * length, 2.0))
        assert scaled.forster_chain_time_s == pytest.approx(a * one.forster_chain_time_s, rel=1e-12)
        assert scaled.kink_time_s == pytest.approx(a * one.kink_time_s, rel=1e-12)

    def test_report_keys(self):
        text = compare_channels(ForsterParams(1e-12), 2.8e-10, 1e-6, (1e-6, 2.0)).report_text()
        assert [ln.split("=")[0] for ln in text.splitlines()] == [
            "k_per_s",
            "forster_chain_time_s",
            "kink_time_s",
            "ratio",
        ]
