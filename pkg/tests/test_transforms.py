"""Scale function, darning map, case classification, speed measures."""

import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import traceform as tf
from traceform import PreconditionError, Tail, ValidationError

from helpers import random_iset

isets = st.integers(0, 10**6).map(lambda s: random_iset(np.random.default_rng(s)))
window_fracs = st.fractions(min_value=0, max_value=1, max_denominator=96)


def first_gap_interior(iset):
    a, b = iset.components[0]
    return (a + b) / 2


class TestScale:
    def test_gap_increment(self, svc1):
        s = tf.ScaleFunction(svc1, anchor=0)
        assert s(Fr(5, 8)) - s(Fr(3, 8)) == Fr(1, 4)

    def test_flat_on_f(self, svc1):
        s = tf.ScaleFunction(svc1, anchor=0)
        assert s(Fr(3, 8)) - s(0) == 0

    def test_inverse_of_plateau_is_component(self, svc1):
        s = tf.ScaleFunction(svc1, anchor=0)
        assert s.inverse(s(Fr(3, 8))) == (Fr(0), Fr(3, 8))

    def test_inverse_of_g_point_is_point(self, svc1):
        s = tf.ScaleFunction(svc1, anchor=0)
        y = s(0.5)
        assert s.inverse(y) == (0.5, 0.5)

    def test_inverse_outside_image(self, svc1):
        s = tf.ScaleFunction(svc1, anchor=0)
        with pytest.raises(PreconditionError):
            s.inverse(Fr(1, 2))

    def test_anchor_shift(self, svc1):
        s0 = tf.ScaleFunction(svc1, anchor=0)
        s1 = tf.ScaleFunction(svc1, anchor=Fr(1, 2))
        assert s1(Fr(1, 2)) == 0
        diff = s0(Fr(1, 2)) - s1(Fr(1, 2))
        for x in (0, Fr(3, 8), Fr(7, 10), 1):
            assert s0(x) - s1(x) == diff

    @settings(max_examples=60, deadline=None)
    @given(isets, window_fracs, window_fracs)
    def test_increment_is_g_mass(self, iset, t0, t1):
        w0, w1 = iset.window
        x = w0 + (w1 - w0) * min(t0, t1)
        y = w0 + (w1 - w0) * max(t0, t1)
        s = tf.ScaleFunction(iset, anchor=w0)
        assert s(y) - s(x) == iset.lebesgue(x, y, "G")


class TestClassify:
    def test_case_two(self):
        iset = tf.svc_complement(1, tails=(Tail.ALL_F, Tail.ALL_G))
        assert tf.classify_case(iset) is tf.Case.II

    def test_case_three(self, svc1):
        assert tf.classify_case(svc1) is tf.Case.III

    def test_case_one_allg(self, svc1_allg):
        assert tf.classify_case(svc1_allg) is tf.Case.I

    def test_window_enlargement_invariance(self):
        for tails in ((Tail.ALL_F, Tail.ALL_F), (Tail.ALL_G, Tail.ALL_F),
                      (Tail.ALL_G, Tail.ALL_G)):
            small = tf.build_interval_set([(Fr(1, 4), Fr(1, 2))], (0, 1), tails=tails)
            large = tf.build_interval_set([(Fr(1, 4), Fr(1, 2))], (-5, 6), tails=tails)
            assert tf.classify_case(small) is tf.classify_case(large)


class TestDarningMap:
    def test_worked_values(self, svc1):
        j = tf.DarningMap(svc1, z=0)
        assert j(1) == Fr(3, 4)
        for x in (Fr(3, 8), Fr(1, 2), Fr(5, 8)):
            assert j(x) == Fr(3, 8)
        assert j(0) == 0

    def test_collapsed_point(self, svc1):
        j = tf.DarningMap(svc1, z=0)
        (cp,) = j.collapsed_points
        assert cp.position == Fr(3, 8)
        assert cp.width == Fr(1, 4)

    def test_anchor_in_g_rejected(self, svc1):
        with pytest.raises(PreconditionError):
            tf.DarningMap(svc1, z=Fr(1, 2))

    def test_anchor_in_h_rejected(self, svc1):
        with pytest.raises(PreconditionError):
            tf.DarningMap(svc1, z=Fr(3, 8))

    def test_default_anchor_is_f_interior(self, svc1_allg):
        j = tf.DarningMap(svc1_allg)
        assert not svc1_allg.in_g(j.z)
        assert j.z not in svc1_allg.endpoints

    def test_image_boundary_membership(self, svc1, svc1_allg):
        img_f = tf.DarningMap(svc1, z=0).image()
        assert not img_f.bounded_left and not img_f.bounded_right
        img_g = tf.DarningMap(svc1_allg).image()
        assert img_g.bounded_left and img_g.bounded_right

    def test_round_trip_on_f(self, svc1):
        j = tf.DarningMap(svc1, z=0)
        for x in (Fr(1, 10), Fr(3, 10), Fr(7, 10), Fr(9, 10)):
            lo, hi = j.inverse(j(x))
            assert lo == hi == x

    def test_inverse_of_collapsed_point(self, svc1):
        j = tf.DarningMap(svc1, z=0)
        assert j.inverse(Fr(3, 8)) == (Fr(3, 8), Fr(5, 8))

    @settings(max_examples=60, deadline=None)
    @given(isets, window_fracs, window_fracs)
    def test_scale_darn_complementarity(self, iset, t0, t1):
        w0, w1 = iset.window
        x = w0 + (w1 - w0) * min(t0, t1)
        y = w0 + (w1 - w0) * max(t0, t1)
        s = tf.ScaleFunction(iset, anchor=w0)
        j = tf.DarningMap(iset)
        assert (s(y) - s(x)) + (j(y) - j(x)) == y - x


class TestPushforward:
    def test_lebesgue_source(self, svc1):
        sp = tf.pushforward_speed(tf.DarningMap(svc1, z=0))
        assert sp.carrier == (0, Fr(3, 4))
        assert sp.density_pieces == ((0, Fr(3, 4), 1),)
        assert sp.atoms == ((Fr(3, 8), Fr(1, 4)),)

    def test_f_indicator_source(self, svc1):
        sp = tf.pushforward_speed(tf.DarningMap(svc1, z=0), "f_indicator")
        assert sp.atoms == ()

    def test_trace_source_merges_endpoint_atoms(self, svc1):
        sp = tf.pushforward_speed(tf.DarningMap(svc1, z=0), "trace")
        assert sp.atoms == ((Fr(3, 8), Fr(1, 4)),)

    def test_unknown_source(self, svc1):
        with pytest.raises(PreconditionError):
            tf.pushforward_speed(tf.DarningMap(svc1, z=0), "counting")

    def test_allg_tails_add_infinite_atoms(self, svc1_allg):
        sp = tf.pushforward_speed(tf.DarningMap(svc1_allg))
        lo, hi = sp.carrier
        masses = dict(sp.atoms)
        assert math.isinf(masses[lo]) and math.isinf(masses[hi])

    @settings(max_examples=50, deadline=None)
    @given(isets, window_fracs, window_fracs)
    def test_mass_preservation_between_f_points(self, iset, t0, t1):
        # sample query endpoints from F so collapsed atoms are never split
        f_pts = []
        for lo, hi in iset.f_components:
            f_pts.append(lo + (hi - lo) * Fr(1, 3))
            f_pts.append(lo + (hi - lo) * Fr(2, 3))
        if len(f_pts) < 2:
            return
        x = f_pts[int(t0 * (len(f_pts) - 1))]
        y = f_pts[int(t1 * (len(f_pts) - 1))]
        x, y = min(x, y), max(x, y)
        j = tf.DarningMap(iset)
        sp = tf.pushforward_speed(j)
        assert sp.mass(j(x), j(y), skip_infinite=True) == y - x


class TestScalePushforward:
    def test_svc1_speed(self, svc1):
        sp = tf.scale_pushforward_speed(tf.ScaleFunction(svc1, anchor=0))
        assert sp.carrier == (0, Fr(1, 4))
        assert sp.density_pieces == ((0, Fr(1, 4), 1),)
        assert sp.atoms == ((0, Fr(3, 8)), (Fr(1, 4), Fr(3, 8)))

    def test_periodic_speed(self, periodic1):
        sp = tf.scale_pushforward_speed(tf.ScaleFunction(periodic1, anchor=0))
        assert sp.carrier == (0, Fr(5, 4))
        assert sp.atoms == ((0, Fr(3, 8)), (Fr(1, 4), Fr(3, 8)))

    def test_depth0_collapses(self):
        sf = tf.ScaleFunction(tf.svc_complement(0))
        with pytest.raises(PreconditionError, match="collapse"):
            tf.scale_pushforward_speed(sf)

    @settings(max_examples=40, deadline=None)
    @given(isets)
    def test_total_mass_matches_window(self, iset):
        if not iset.components:
            return
        sp = tf.scale_pushforward_speed(tf.ScaleFunction(iset, anchor=iset.window[0]))
        lo, hi = sp.carrier
        assert sp.mass(lo, hi) == iset.window[1] - iset.window[0]


class TestSpeedMeasure:
    def test_round_trip_with_infinity(self):
        sp = tf.SpeedMeasure((0, 1), ((0, 1, 2),), atoms=((Fr(1, 2), Fr(1, 4)), (1, float("inf"))))
        again = tf.SpeedMeasure.from_dict(sp.to_dict())
        assert again.to_dict() == sp.to_dict()
        assert math.isinf(again.atoms[-1][1])

    def test_atom_outside_carrier_rejected(self):
        with pytest.raises(ValidationError):
            tf.SpeedMeasure((0, 1), ((0, 1, 1),), atoms=((2, 1),))

    def test_duplicate_atoms_rejected(self):
        with pytest.raises(ValidationError):
            tf.SpeedMeasure((0, 1), ((0, 1, 1),), atoms=((Fr(1, 2), 1), (Fr(1, 2), 2)))

    def test_nonpositive_mass_rejected(self):
        with pytest.raises(ValidationError):
            tf.SpeedMeasure((0, 1), ((0, 1, 1),), atoms=((Fr(1, 2), 0),))

    def test_negative_density_rejected(self):
        with pytest.raises(ValidationError):
            tf.SpeedMeasure((0, 1), ((0, 1, -1),))

    def test_tent_integral_interior(self):
        sp = tf.SpeedMeasure((0, 1), ((0, 1, 1),))
        assert sp.tent_integral(0.5, 0.125) == pytest.approx(0.125**2, rel=1e-12)

    def test_tent_integral_boundary_is_half(self):
        sp = tf.SpeedMeasure((0, 1), ((0, 1, 1),))
        assert sp.tent_integral(0.0, 0.125) == pytest.approx(0.5 * 0.125**2, rel=1e-12)

    def test_tent_integral_atom_contribution(self):
        h = 0.125
        sp = tf.SpeedMeasure((0, 1), ((0, 1, 1),), atoms=((0.5, 2.0),))
        assert sp.tent_integral(0.5, h) == pytest.approx(h * h + h * 2.0, rel=1e-12)
        assert sp.tent_integral(0.5 + h / 2, h) == pytest.approx(h * h + (h / 2) * 2.0, rel=1e-12)

    def test_tent_integral_infinite_atom(self):
        sp = tf.SpeedMeasure((0, 1), ((0, 1, 1),), atoms=((0.5, float("inf")),))
        assert math.isinf(sp.tent_integral(0.5, 0.125))

    def test_mass_queries(self):
        sp = tf.SpeedMeasure((0, 1), ((0, 1, 2),), atoms=((Fr(1, 2), Fr(1, 4)),))
        assert sp.mass(0, 1) == 2 + Fr(1, 4)
        assert sp.mass(0, 1, include_atoms=False) == 2
