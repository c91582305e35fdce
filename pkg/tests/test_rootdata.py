from fractions import Fraction as Q

import pytest

from dhmeasure.rootdata import (GroupSpec, RationalVector, RepSpec,
                                _defining_weights, _eps_to_omega,
                                build_root_data, epsilon_matrix,
                                volume_polynomial, weights_of,
                                weyl_orbit_signed)


def test_group_spec_basics():
    g = GroupSpec((2, 3, 2))
    assert g.rank == 1 + 2 + 1
    assert g.frame == "su2x3x2"
    assert g.coord_slices() == [(0, 1), (1, 3), (3, 4)]
    with pytest.raises(ValueError):
        GroupSpec((0,))


def test_su2_power_roots_and_rho():
    rd = build_root_data(GroupSpec((2, 2, 2)))
    assert set(rd.positive_roots) == {(2, 0, 0), (0, 2, 0), (0, 0, 2)}
    assert rd.rho == (1, 1, 1)
    assert rd.weyl_group_size == 8


def test_su3_root_data():
    rd = build_root_data(GroupSpec((3,)))
    assert len(rd.positive_roots) == 3
    assert rd.rho == (1, 1)
    assert rd.weyl_group_size == 6
    # the highest root is the sum of the two simple roots
    roots = set(rd.positive_roots)
    assert (1, 1) in roots  # highest root in fundamental-weight coordinates


def test_defining_weights_sum_to_zero():
    for d in (2, 3, 4, 5):
        ws = _defining_weights(d)
        assert len(ws) == d
        total = [sum(w[i] for w in ws) for i in range(d - 1)]
        assert all(c == 0 for c in total)


def test_epsilon_matrix_inverts():
    for d in (2, 3, 4):
        M = epsilon_matrix(d)
        # columns of M are traceless
        for k in range(d - 1):
            assert sum(M[i][k] for i in range(d)) == 0
        # round trip through epsilon coordinates
        lam = tuple(Q(i + 1) for i in range(d - 1))
        x = tuple(sum(M[i][k] * lam[k] for k in range(d - 1))
                  for i in range(d))
        assert _eps_to_omega(d, x) == lam


def test_tensor_weights():
    rep = RepSpec(GroupSpec((2, 2)), "tensor")
    ws = {tuple(w.coords) for w, m in weights_of(rep)}
    assert ws == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert all(m == 1 for _, m in weights_of(rep))


def test_sym_alt_weights():
    sym = RepSpec(GroupSpec((2,)), "sym", 3)
    assert sorted(w.coords[0] for w, _ in weights_of(sym)) == [-3, -1, 1, 3]
    alt = RepSpec(GroupSpec((3,)), "alt", 2)
    ws = [w.coords for w, _ in weights_of(alt)]
    assert len(ws) == 3
    total = [sum(w[i] for w in ws) for i in range(2)]
    assert all(c == 0 for c in total)


def test_dim_hilbert():
    assert RepSpec(GroupSpec((2, 3)), "tensor").dim_hilbert == 6
    assert RepSpec(GroupSpec((2,)), "sym", 4).dim_hilbert == 5
    assert RepSpec(GroupSpec((4,)), "alt", 2).dim_hilbert == 6
    assert RepSpec(GroupSpec((2,)), "onesided", 3).dim_hilbert == 6
    assert RepSpec(GroupSpec((2, 2)), "tensor", env=4).dim_hilbert == 16


def test_env_weights_gain_block():
    rep = RepSpec(GroupSpec((2,)), "sym", 2, env=3)
    assert rep.symmetry_group.factors == (2, 3)
    ws = weights_of(rep)
    assert len(ws) == 3 * 3
    assert all(len(w.coords) == 3 for w, _ in ws)


def test_onesided_multiplicities():
    rep = RepSpec(GroupSpec((3,)), "onesided", 4)
    ws = weights_of(rep)
    assert len(ws) == 3
    assert all(m == 4 for _, m in ws)


def test_repspec_validation():
    with pytest.raises(ValueError):
        RepSpec(GroupSpec((2, 2)), "sym", 2)
    with pytest.raises(ValueError):
        RepSpec(GroupSpec((2,)), "alt", 3)
    with pytest.raises(ValueError):
        RepSpec(GroupSpec((2,)), "nope")
    with pytest.raises(ValueError):
        RepSpec(GroupSpec((2,)), "onesided", 2, env=3)


def test_volume_polynomial_su2():
    rd = build_root_data(GroupSpec((2,)))
    p = volume_polynomial(rd)
    assert p.evaluate((Q(1),)) == 1
    assert p.evaluate((Q(5),)) == 5


def test_volume_polynomial_is_gram_independent():
    # prod <lam, alpha>/<rho, alpha> at lam = rho is always 1
    for factors in ((3,), (4,), (2, 3)):
        rd = build_root_data(GroupSpec(factors))
        assert volume_polynomial(rd).evaluate(rd.rho) == 1


def test_weyl_orbit_signed_generic():
    rd = build_root_data(GroupSpec((2,)))
    orbit = weyl_orbit_signed(rd, (Q(3),))
    assert sorted((p.coords[0], s) for p, s in orbit) == [(-3, -1), (3, 1)]

    rd3 = build_root_data(GroupSpec((3,)))
    orbit3 = weyl_orbit_signed(rd3, (Q(1), Q(2)))
    assert len(orbit3) == 6
    assert sum(s for _, s in orbit3) == 0


def test_weyl_orbit_signed_cancellation():
    # a stabilized point: lam fixed by a reflection drops out entirely
    rd = build_root_data(GroupSpec((2,)))
    assert weyl_orbit_signed(rd, (Q(0),)) == []


def test_rational_vector_frames():
    a = RationalVector((Q(1), Q(2)), "su2x2")
    b = RationalVector((Q(1), Q(0)), "su2x2")
    assert (a + b).coords == (2, 2)
    assert (a - b).coords == (0, 2)
    with pytest.raises(ValueError):
        a + RationalVector((Q(1), Q(0)), "other")


def test_pairing_symmetric_positive():
    rd = build_root_data(GroupSpec((3,)))
    for alpha in rd.positive_roots:
        assert rd.pairing(alpha, alpha) > 0
    x, y = (Q(1), Q(2)), (Q(3), Q(-1))
    assert rd.pairing(x, y) == rd.pairing(y, x)
