import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linear_sum_assignment

from stable_slices import (
    HalfPlane,
    NonRealInput,
    NotInImage,
    Poly,
    find_roots,
    hurwitz_embed,
    hurwitz_unembed,
    is_stable,
    is_weakly_hurwitz,
    vieta_from_roots,
)


def match_roots(found, expected):
    found = np.asarray(found)
    expected = np.asarray(expected)
    cost = np.abs(found[:, None] - expected[None, :])
    ri, ci = linear_sum_assignment(cost)
    return float(cost[ri, ci].max())


real_poly_z = st.lists(
    st.floats(-5, 5, allow_nan=False), min_size=1, max_size=8
).map(lambda zs: Poly(tuple(complex(v) for v in zs)))


class TestIsStable:
    def test_double_root_on_axis(self):
        v = is_stable(Poly((2j, -1.0)))
        assert v.stable
        assert v.profile.measure() == (2, 0)

    def test_unstable(self):
        v = is_stable(Poly((0.0, 1.0)))  # T^2 + 1 has a root at -i
        assert not v.stable

    def test_flagship_point(self):
        v = is_stable(Poly((23j, -463.0, -8461j, 8020.0)))
        assert v.stable
        assert v.profile.measure() == (4, 0)

    def test_witness_are_roots(self):
        p = Poly((1 + 2j, -1.0))
        v = is_stable(p)
        assert match_roots(v.witness, find_roots(p)) == 0.0


class TestHurwitzEmbed:
    def test_embed_cubic(self):
        # T^3 + 4T^2 + 6T + 4 maps to T^3 - 4iT^2 - 6T + 4i
        p = Poly((-4.0, 6.0, -4.0))
        g = hurwitz_embed(p)
        assert np.allclose(g.raw_coefficients(), (1, -4j, -6, 4j), atol=0)

    def test_linear(self):
        g = hurwitz_embed(Poly((-1.0,)))  # T + 1
        assert np.allclose(g.raw_coefficients(), (1, -1j), atol=0)
        assert match_roots(find_roots(g), [1j]) < 1e-12

    def test_pure_power(self):
        p = Poly((0.0,) * 6)
        assert hurwitz_embed(p).z == p.z

    def test_rejects_complex_input(self):
        with pytest.raises(NonRealInput):
            hurwitz_embed(Poly((1j,)))

    def test_unembed_cubic(self):
        g = Poly.from_raw((1, -4j, -6, 4j))
        p = hurwitz_unembed(g)
        assert np.allclose(p.raw_coefficients(), (1, 4, 6, 4), atol=1e-12)

    def test_unembed_rejects_wrong_pattern(self):
        with pytest.raises(NotInImage):
            hurwitz_unembed(Poly((1 + 1j, 2.0)))

    @given(real_poly_z)
    def test_roundtrip(self, p):
        assert np.allclose(hurwitz_unembed(hurwitz_embed(p)).z, p.z, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(real_poly_z)
    def test_root_rotation(self, p):
        embedded = hurwitz_embed(p)
        expected = [-1j * x for x in find_roots(p)]
        assert match_roots(find_roots(embedded), expected) < 1e-6


class TestWeaklyHurwitz:
    def test_strict_cubic(self):
        v = is_weakly_hurwitz(Poly((-4.0, 6.0, -4.0)))
        assert v.stable and v.strict

    def test_weak_not_strict(self):
        v = is_weakly_hurwitz(Poly((0.0, 1.0)))  # roots +/- i on the axis
        assert v.stable and not v.strict

    def test_not_hurwitz(self):
        v = is_weakly_hurwitz(Poly((1.0,)))  # T - 1
        assert not v.stable

    @settings(max_examples=60, deadline=None)
    @given(real_poly_z)
    def test_embedding_preserves_verdict(self, p):
        direct = is_weakly_hurwitz(p).stable
        via_embed = is_stable(hurwitz_embed(p)).stable
        assert direct == via_embed

    @settings(max_examples=50, deadline=None)
    @given(real_poly_z)
    def test_conjugate_closure(self, p):
        roots = np.asarray(find_roots(p))
        assert match_roots(roots, np.conj(roots)) < 1e-6
