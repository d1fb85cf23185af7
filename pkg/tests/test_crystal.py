import pytest
from conftest import anticommuting_crystal_pair, commuting_crystal_pair, random_witt_unit_matrix

from wedgelat import linalg as la
from wedgelat.crystal import (
    ANTICOMMUTES,
    COMMUTES,
    NEITHER,
    FCrystalH1,
    commutes_with_f2,
    frobenius_action,
    is_crystal_morphism,
    smith_valuations,
    wedge_crystal_check,
    xi_element,
    xi_twist,
)
from wedgelat.errors import NoAnticommutation, NotAdmissible, SingularInput, WittMismatch
from wedgelat.scalars import WittRing
from wedgelat.wedge import wedge_square

CASES = [(p, s) for p in (3, 5) for s in (1, 2)]


@pytest.mark.parametrize("p, s", CASES)
def test_identity_commutes(rng, p, s):
    ring = WittRing(p, s, 6)
    X = FCrystalH1.of(ring, random_witt_unit_matrix(rng, ring))
    report = is_crystal_morphism(la.identity(4, ring.one()), X, X)
    assert report.verdict == COMMUTES and report.precision == 6


@pytest.mark.parametrize("p, s", CASES)
def test_frobenius_is_semilinear(rng, p, s):
    ring = WittRing(p, s, 4)
    X = FCrystalH1.of(ring, random_witt_unit_matrix(rng, ring))
    a = ring(*[rng.randrange(ring.modulus) for _ in range(s)])
    v = [ring(*[rng.randrange(ring.modulus) for _ in range(s)]) for _ in range(4)]
    lhs = frobenius_action(X, [a * x for x in v])
    rhs = [a.frobenius() * x for x in frobenius_action(X, v)]
    assert lhs == rhs


@pytest.mark.parametrize("p, s", CASES)
def test_commuting_fixture_round_trip(rng, p, s):
    for _ in range(3):
        X, Y, rho = commuting_crystal_pair(rng, p, s, 6)
        assert is_crystal_morphism(rho, X, Y).verdict == COMMUTES
        assert commutes_with_f2(rho, X, Y)
        phi = wedge_square(rho)
        out, sign, report = wedge_crystal_check(phi, X, Y)
        assert la.equal(wedge_square(out), phi if sign > 0 else la.neg(phi))
        assert la.equal(out, rho) or la.equal(out, la.neg(rho))
        assert report.verdict == COMMUTES and report.phi_intertwines and report.f2_commutes


@pytest.mark.parametrize("p, s", CASES)
def test_anticommuting_fixture_and_xi(rng, p, s):
    X, Y = anticommuting_crystal_pair(rng, p, s, 6)
    ring = X.ring
    I = la.identity(4, ring.one())
    report = is_crystal_morphism(I, X, Y)
    assert report.verdict == ANTICOMMUTES
    assert report.to_json()["relation"] == "rho o F_X = -F_Y o rho"
    twisted, xi, X2, Y2, rep2 = xi_twist(I, X, Y)
    assert xi ** (p - 1) == -xi.ring.one()
    assert rep2.verdict == COMMUTES
    assert is_crystal_morphism(twisted, X2, Y2).verdict == COMMUTES


def test_xi_for_p3_is_u():
    ring = WittRing(3, 2, 6)
    assert xi_element(ring) == ring.u()


def test_xi_twist_needs_anticommutation(rng):
    ring = WittRing(5, 2, 4)
    X = FCrystalH1.of(ring, random_witt_unit_matrix(rng, ring))
    with pytest.raises(NoAnticommutation):
        xi_twist(la.identity(4, ring.one()), X, X)


def test_neither_verdict(rng):
    ring = WittRing(5, 1, 4)
    X = FCrystalH1.of(ring, random_witt_unit_matrix(rng, ring))
    Y = FCrystalH1.of(ring, random_witt_unit_matrix(rng, ring))
    assert is_crystal_morphism(la.identity(4, ring.one()), X, Y).verdict == NEITHER


def test_validation(rng):
    ring = WittRing(3, 1, 4)
    with pytest.raises(SingularInput):
        FCrystalH1.of(ring, la.zeros(4, 4, ring.zero()))
    X = FCrystalH1.of(ring, random_witt_unit_matrix(rng, ring))
    other = WittRing(3, 1, 5)
    Y = FCrystalH1.of(other, random_witt_unit_matrix(rng, other))
    with pytest.raises(WittMismatch):
        is_crystal_morphism(la.identity(4, ring.one()), X, Y)
    phi = la.identity(6, ring.one())
    phi[0][0] = ring(2)
    with pytest.raises(NotAdmissible):
        wedge_crystal_check(phi, X, X)


@pytest.mark.parametrize("p, s", CASES)
def test_frobenius_image_profile(rng, p, s):
    ring = WittRing(p, s, 6)
    X = FCrystalH1.of(ring, random_witt_unit_matrix(rng, ring))
    assert smith_valuations(X.linear_part()) == [0, 0, 1, 1]


def test_frobenius_on_identity_crystal():
    ring = WittRing(5, 1, 3)
    X = FCrystalH1.of(ring, la.identity(4, ring.one()))
    e = [[ring(int(i == j)) for j in range(4)] for i in range(4)]
    assert frobenius_action(X, e[0]) == e[0]
    assert frobenius_action(X, e[2]) == [x * 5 for x in e[2]]


@pytest.mark.parametrize("p, s", CASES)
def test_verdict_stable_under_precision(rng, p, s):
    # the same fixture truncated to lower precision keeps its verdict
    X, Y, rho = commuting_crystal_pair(rng, p, s, 6)
    A, B = anticommuting_crystal_pair(rng, p, s, 6)
    for N in (2, 4):
        ring = WittRing(p, s, N)

        def cut(M):
            return [[x.truncate(N) for x in row] for row in M]

        Xn, Yn = FCrystalH1.of(ring, cut(X.C_matrix())), FCrystalH1.of(ring, cut(Y.C_matrix()))
        assert is_crystal_morphism(cut(rho), Xn, Yn).verdict == COMMUTES
        An, Bn = FCrystalH1.of(ring, cut(A.C_matrix())), FCrystalH1.of(ring, cut(B.C_matrix()))
        assert is_crystal_morphism(la.identity(4, ring.one()), An, Bn).verdict == ANTICOMMUTES


def test_xi_twist_twice_fails(rng):
    X, Y = anticommuting_crystal_pair(rng, 5, 1, 6)
    twisted, _, X2, Y2, _ = xi_twist(la.identity(4, X.ring.one()), X, Y)
    with pytest.raises(NoAnticommutation):
        xi_twist(twisted, X2, Y2)


def test_wedge_check_on_anticommuting_pair(rng):
    X, Y = anticommuting_crystal_pair(rng, 3, 1, 6)
    rho, sign, report = wedge_crystal_check(la.identity(6, X.ring.one()), X, Y)
    assert sign == 1 and la.equal(la.matmul(rho, rho), la.identity(4, X.ring.one()))
    assert report.verdict == ANTICOMMUTES and report.f2_commutes
    assert report.to_json()["relation"] == "rho o F_X = -F_Y o rho"
