import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mtcavity.lattice import (
    ConformationState,
    DimerSpec,
    build_lattice,
    estimate_dipole,
    lattice_csv,
    longitudinal_projection,
    simulated_dipole_preset,
    site_position,
)


class TestBuildLattice:
    def test_one_micron_tube(self):
        lat = build_lattice(125)
        assert lat.length_m == pytest.approx(1.0e-6, rel=1e-12)

    def test_single_ring_has_13_sites(self):
        assert build_lattice(1).n_sites == 13

    def test_site_count_by_counting(self):
        lat = build_lattice(125)
        counted = sum(1 for p in range(lat.n_protofilaments) for n in range(lat.n_rings))
        assert counted == 1625 == lat.n_sites
        assert lat.states.shape == (13, 125)

    def test_starts_all_down(self):
        lat = build_lattice(4)
        assert (lat.states == ConformationState.DOWN).all()

    @pytest.mark.parametrize("n", [0, -3])
    def test_rejects_non_positive_rings(self, n):
        with pytest.raises(ValueError):
            build_lattice(n)

    def test_overrides(self):
        lat = build_lattice(3, n_protofilaments=11, inner_radius_nm=6.0)
        assert lat.n_sites == 33
        assert lat.mean_radius_nm == pytest.approx(9.25)

    def test_radius_ordering_enforced(self):
        with pytest.raises(ValueError):
            build_lattice(2, inner_radius_nm=13.0)

    def test_states_are_immutable(self):
        lat = build_lattice(2)
        with pytest.raises(ValueError):
            lat.states[0, 0] = 1

    def test_with_state(self):
        lat = build_lattice(2).with_state(3, 1, ConformationState.UP)
        assert lat.states[3, 1] == ConformationState.UP
        assert lat.states.sum() == 1


class TestDimerSpec:
    def test_defaults(self):
        d = DimerSpec()
        assert (d.height_nm, d.mobile_electrons, d.flip_angle_free_deg) == (8.0, 36, 27.7)

    @pytest.mark.parametrize(
        "kw",
        [
            {"height_nm": 0},
            {"pocket_separation_nm": -1},
            {"flip_angle_free_deg": 90},
            {"flip_angle_trunk_deg": 30.0},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            DimerSpec(**kw)


class TestSitePosition:
    def test_origin(self):
        assert site_position(build_lattice(3), 0, 0)[0] == 0.0

    def test_stagger_is_a_fifth(self):
        assert site_position(build_lattice(3), 1, 0)[0] == pytest.approx(1.6)

    def test_hand_value(self):
        # 2 * 8 + 5 * 1.6
        assert site_position(build_lattice(3), 5, 2)[0] == pytest.approx(24.0)

    def test_transverse_on_mean_circle(self):
        lat = build_lattice(2)
        for p in range(13):
            _, y, z = site_position(lat, p, 1)
            assert math.hypot(y, z) == pytest.approx(9.75)
            assert math.atan2(z, y) % (2 * math.pi) == pytest.approx((2 * math.pi * p / 13) % (2 * math.pi), abs=1e-12)

    @pytest.mark.parametrize("p,n", [(13, 0), (-1, 0), (0, 3)])
    def test_out_of_range(self, p, n):
        with pytest.raises(ValueError):
            site_position(build_lattice(3), p, n)

    @given(st.integers(1, 40), st.integers(0, 12))
    def test_axial_strictly_increasing(self, rings, p):
        lat = build_lattice(rings)
        xs = [site_position(lat, p, n)[0] for n in range(rings)]
        assert all(b > a for a, b in zip(xs, xs[1:]))


class TestDipole:
    def test_raw_magnitude(self):
        assert estimate_dipole(epsilon_rel=1).raw_Cm == pytest.approx(2.3e-26, rel=0.01)

    def test_screened_by_water(self):
        d = estimate_dipole(epsilon_rel=80)
        assert d.screened_Cm == pytest.approx(2.88e-28, rel=2e-3)
        assert d.screened_Cm == pytest.approx(3e-28, rel=0.05)
        assert d.screened_Cm * 80 == pytest.approx(d.raw_Cm, rel=1e-15)

    def test_zero_charge(self):
        assert estimate_dipole(DimerSpec(mobile_electrons=0)).raw_Cm == 0.0

    def test_debye_round_trip(self):
        d = estimate_dipole()
        assert d.debye * 3.33564e-30 == pytest.approx(d.raw_Cm, rel=1e-12)

    def test_rejects_epsilon_below_one(self):
        with pytest.raises(ValueError):
            estimate_dipole(epsilon_rel=0.5)

    @given(st.integers(0, 200), st.floats(0.1, 20.0))
    def test_linear_in_charge_and_separation(self, electrons, sep):
        base = estimate_dipole(DimerSpec(mobile_electrons=1, pocket_separation_nm=1.0), 1).raw_Cm
        d = estimate_dipole(DimerSpec(mobile_electrons=electrons, pocket_separation_nm=sep), 1).raw_Cm
        assert d == pytest.approx(base * electrons * sep, rel=1e-12, abs=1e-40)

    def test_simulation_preset(self):
        d = simulated_dipole_preset()
        assert d.debye == 1714.0
        assert d.raw_Cm == pytest.approx(1714 * 3.33564e-30)


class TestProjection:
    def test_free_angle(self):
        # sin(27.7 deg) = 0.464842...
        assert longitudinal_projection(DimerSpec(), 3e-28) == pytest.approx(1.394e-28, rel=1e-3)

    def test_zero_angle(self):
        spec = DimerSpec(flip_angle_free_deg=0.0, flip_angle_trunk_deg=0.0)
        assert longitudinal_projection(spec, 3e-28) == 0.0

    def test_zero_dipole(self):
        assert longitudinal_projection(DimerSpec(), 0.0) == 0.0

    def test_trunk_is_smaller(self):
        spec = DimerSpec()
        assert longitudinal_projection(spec, 1.0, trunk=True) < longitudinal_projection(spec, 1.0)

    def test_negative_dipole_rejected(self):
        with pytest.raises(ValueError):
            longitudinal_projection(DimerSpec(), -1.0)


def test_csv_dump_order_and_header():
    lat = build_lattice(2, n_protofilaments=3).with_state(1, 0, ConformationState.UP)
    lines = lattice_csv(lat).splitlines()
    assert lines[0] == "p,n,x_nm,y_nm,z_nm,state"
    keys = [tuple(map(int, ln.split(",")[:2])) for ln in lines[1:]]
    assert keys == [(p, n) for p in range(3) for n in range(2)]
    assert lines[1 + 2].endswith(",up")
    assert np.isclose(float(lines[2].split(",")[2]), 8.0)
