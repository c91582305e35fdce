import itertools
from fractions import Fraction as Q

import pytest

from dhmeasure.multiplicity import (ScaleError, WeightMultiplicityFn,
                                    YoungDiagram, character_oracle,
                                    gaussian_binomial, kronecker,
                                    multiplicity_measure,
                                    plethysm_character_sym2,
                                    steinberg_multiplicity,
                                    steinberg_multiplicity_subsets,
                                    weight_multiplicity, weyl_dimension,
                                    _mn_character, _partitions)
from dhmeasure.qmarginal import CoadjointOrbit, MarginalProblem
from dhmeasure.rootdata import GroupSpec, RepSpec, build_root_data


def test_young_diagram_basics():
    d = YoungDiagram((3, 1))
    assert d.boxes == 4
    assert d.height == 2
    assert d.transpose() == YoungDiagram((2, 1, 1))
    assert d.transpose().transpose() == d
    with pytest.raises(ValueError):
        YoungDiagram((1, 2))
    with pytest.raises(ValueError):
        YoungDiagram((2, -1))


def test_weight_multiplicity_symmetric_power():
    # Sym^2 of the adjoint weights of SU(2) acting on Sym^2(C^2):
    # occupation counts of the multiset {2, 0, -2} summing to the target
    rep = RepSpec(GroupSpec((2,)), "onesided", 1)  # weights {1, -1}, mult 1
    assert weight_multiplicity(rep, (Q(2),), 2) == 1   # both up
    assert weight_multiplicity(rep, (Q(0),), 2) == 1   # one up, one down
    assert weight_multiplicity(rep, (Q(1),), 2) == 0   # parity mismatch


def test_steinberg_sym_powers_of_sym2():
    rep = RepSpec(GroupSpec((2,)), "sym", 2)
    rd = build_root_data(GroupSpec((2,)))
    m1 = WeightMultiplicityFn.for_symmetric_power(rep, 1)
    assert steinberg_multiplicity(m1, rd, (Q(2),)) == 1
    assert steinberg_multiplicity(m1, rd, (Q(0),)) == 0
    m2 = WeightMultiplicityFn.for_symmetric_power(rep, 2)
    assert [steinberg_multiplicity(m2, rd, (Q(c),)) for c in (4, 2, 0)] == \
        [1, 0, 1]


def test_steinberg_subset_form_agrees():
    rep = RepSpec(GroupSpec((2,)), "sym", 2)
    rd = build_root_data(GroupSpec((2,)))
    for k in (1, 2, 3):
        m = WeightMultiplicityFn.for_symmetric_power(rep, k)
        for c in range(0, 2 * k + 1, 2):
            assert steinberg_multiplicity(m, rd, (Q(c),)) == \
                steinberg_multiplicity_subsets(m, rd, (Q(c),))


def test_steinberg_diagonal_singlet():
    # two spin-1/2 particles under the diagonal SU(2): one singlet
    rd = build_root_data(GroupSpec((2,)))
    m = WeightMultiplicityFn.from_table({(Q(2),): 1, (Q(0),): 2, (Q(-2),): 1})
    assert steinberg_multiplicity(m, rd, (Q(0),)) == 1
    assert steinberg_multiplicity(m, rd, (Q(2),)) == 1
    with pytest.raises(ValueError):
        steinberg_multiplicity(m, rd, (Q(-2),))


def test_kronecker_small_values():
    k = lambda a, b, c: kronecker(YoungDiagram(a), YoungDiagram(b),
                                  YoungDiagram(c))
    assert k((2,), (2,), (2,)) == 1
    assert k((1, 1), (1, 1), (2,)) == 1
    assert k((1, 1), (1, 1), (1, 1)) == 0
    assert k((2, 1), (2, 1), (2, 1)) == 1
    assert k((4,), (1, 1, 1, 1), (1, 1, 1, 1)) == 1
    assert k((4,), (4,), (1, 1, 1, 1)) == 0
    with pytest.raises(ValueError):
        k((2,), (2,), (3,))


def test_kronecker_height_one_shortcut():
    # g_{(k), mu, nu} = [mu == nu] for any k, exercised far beyond the
    # contingency-table range
    for k in (12, 20):
        assert kronecker(YoungDiagram((k,)), YoungDiagram((k,)),
                         YoungDiagram((k,))) == 1
        assert kronecker(YoungDiagram((k,)), YoungDiagram((k - 1, 1)),
                         YoungDiagram((k - 1, 1))) == 1
        assert kronecker(YoungDiagram((k,)), YoungDiagram((k,)),
                         YoungDiagram((k - 1, 1))) == 0


def test_kronecker_symmetries():
    triples = [((3, 1), (2, 2), (2, 1, 1)), ((3, 2), (3, 2), (4, 1)),
               ((2, 2, 1), (3, 2), (3, 1, 1))]
    for a, b, c in triples:
        base = kronecker(YoungDiagram(a), YoungDiagram(b), YoungDiagram(c))
        for pa, pb, pc in itertools.permutations((a, b, c)):
            assert kronecker(YoungDiagram(pa), YoungDiagram(pb),
                             YoungDiagram(pc)) == base
        # transposing two arguments leaves the coefficient unchanged
        assert kronecker(YoungDiagram(a).transpose(),
                         YoungDiagram(b).transpose(), YoungDiagram(c)) == base


def test_kronecker_matches_character_oracle():
    for n in (4, 5):
        parts = [tuple(p) for p in _partitions(n)]
        for a, b, c in itertools.combinations_with_replacement(parts, 3):
            assert kronecker(YoungDiagram(a), YoungDiagram(b),
                             YoungDiagram(c)) == \
                character_oracle(YoungDiagram(a), YoungDiagram(b),
                                 YoungDiagram(c))


def test_character_values():
    # standard character table entries of S_3
    assert _mn_character((2, 1), (1, 1, 1)) == 2
    assert _mn_character((2, 1), (3,)) == -1
    assert _mn_character((2, 1), (2, 1)) == 0
    assert _mn_character((3,), (3,)) == 1
    assert _mn_character((1, 1, 1), (2, 1)) == -1


def test_character_oracle_guard():
    big = YoungDiagram((11,))
    with pytest.raises(ScaleError):
        character_oracle(big, big, big)


def test_gaussian_binomial():
    assert gaussian_binomial(4, 2) == [1, 1, 2, 1, 1]
    assert gaussian_binomial(5, 1) == [1, 1, 1, 1, 1]
    assert gaussian_binomial(3, 0) == [1]
    for m, r in ((5, 2), (6, 3), (7, 2)):
        coeffs = gaussian_binomial(m, r)
        assert coeffs == coeffs[::-1]  # palindromic
        # specializes to the ordinary binomial coefficient at q = 1
        from math import comb
        assert sum(coeffs) == comb(m, r)


def test_plethysm_character_table():
    # Sym^2(Sym^2(C^2)) has weights {4, 2, 0, 0, -2, -4}
    assert plethysm_character_sym2(2) == {4: 1, 2: 1, 0: 2, -2: 1, -4: 1}
    total = sum(plethysm_character_sym2(4).values())
    from math import comb
    assert total == comb(4 + 2, 2)  # dim Sym^4(Sym^2(C^2))


def test_plethysm_irreducible_content():
    # Sym^k(Sym^2(C^2)) = sum of irreducibles 2k, 2k-4, ..., multiplicity one
    rd = build_root_data(GroupSpec((2,)))
    for k in (3, 4, 5):
        m = WeightMultiplicityFn.from_table(
            {(Q(w),): c for w, c in plethysm_character_sym2(k).items()})
        want = set(range(2 * k, -1, -4))
        for c in range(0, 2 * k + 1):
            assert steinberg_multiplicity(m, rd, (Q(c),)) == \
                (1 if c in want else 0)


def test_multiplicity_measure_projective():
    rep = RepSpec(GroupSpec((2,)), "sym", 2)
    for k in (3, 4):
        atoms = dict()
        for pt, mass in multiplicity_measure(rep, k):
            atoms[pt.coords[0]] = mass
        # atoms at l/k for l = 2k, 2k-4, ..., each with mass 1/k
        assert atoms == {Q(l, k): Q(1, k) for l in range(2 * k, -1, -4)}


def test_multiplicity_measure_first_moment():
    # for even k the (unnormalized) first moment is 1/2 + 1/k, approaching
    # the continuum torus-measure moment 1/2 at rate exactly 1/k
    rep = RepSpec(GroupSpec((2,)), "sym", 2)
    for k in (4, 8, 16):
        meas = multiplicity_measure(rep, k)
        moment = sum(pt.coords[0] * mass for pt, mass in meas)
        assert moment == Q(1, 2) + Q(1, k)
        assert sum(mass for _, mass in meas) == Q(1, 2) + Q(1, k)


def test_multiplicity_measure_orbit_self():
    problem = MarginalProblem(RepSpec(GroupSpec((4,)), "tensor"),
                              CoadjointOrbit((Q(1, 2), Q(1, 4), Q(1, 8),
                                              Q(1, 8))))
    meas = multiplicity_measure(problem, 8)
    assert len(meas) == 1
    pt, mass = meas[0]
    assert mass == 1
    assert pt.coords == (Q(1, 4), Q(1, 8), Q(0))


def test_multiplicity_measure_orbit_kronecker():
    problem = MarginalProblem(RepSpec(GroupSpec((2, 2)), "tensor"),
                              CoadjointOrbit((Q(1, 2), Q(1, 4), Q(1, 8),
                                              Q(1, 8))))
    meas = multiplicity_measure(problem, 8)
    assert meas
    assert all(mass > 0 for _, mass in meas)
    # every atom lies inside the unit Weyl box of the two qubits
    for pt, _ in meas:
        assert all(Q(0) <= c <= Q(1) for c in pt.coords)


def test_multiplicity_measure_scale_guard():
    rep = RepSpec(GroupSpec((2,)), "sym", 2)
    with pytest.raises(ScaleError):
        multiplicity_measure(rep, 10 ** 7)


def test_weyl_dimension():
    rd2 = build_root_data(GroupSpec((2,)))
    assert [weyl_dimension(rd2, (Q(k),)) for k in range(4)] == [1, 2, 3, 4]
    rd3 = build_root_data(GroupSpec((3,)))
    assert weyl_dimension(rd3, (Q(1), Q(1))) == 8
    assert weyl_dimension(rd3, (Q(1), Q(0))) == 3
    assert weyl_dimension(rd3, (Q(2), Q(0))) == 6
