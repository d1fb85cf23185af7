import math

import pytest
from conftest import random_b, random_isometry, random_rational_b
from gmpy2 import mpq

from wedgelat import linalg as la
from wedgelat.errors import NotAdmissible, NotAnIsometry
from wedgelat.mukai import (
    BField,
    MukaiVector,
    TwistedLattice,
    certificate_from_json,
    exp_b,
    is_filtered,
    is_mukai_isometry,
    is_prime_to_ell_zigzag,
    mukai_gram,
    mukai_pairing,
    reflexive_twisted_isometry,
    verify,
    zigzag_factorize,
)
from wedgelat.reflections import Reflection, primitive
from wedgelat.scalars import square_class
from wedgelat.wedge import poincare_duality, q, wedge_square


def test_mukai_pairing_formula(rng):
    G = mukai_gram()
    for _ in range(50):
        u = [rng.randint(-5, 5) for _ in range(8)]
        v = [rng.randint(-5, 5) for _ in range(8)]
        direct = q(u[1:7], v[1:7]) - u[0] * v[7] - v[0] * u[7]
        assert mukai_pairing(u, v) == direct
        assert la.dot([mpq(x) for x in u], la.matvec(G, [mpq(x) for x in v])) == direct
    assert mukai_pairing(MukaiVector.of(1, [0] * 6, 0), MukaiVector.of(0, [0] * 6, 1)) == -1


def test_exp_b_action(rng):
    B = random_rational_b(rng)
    v = [mpq(rng.randint(-4, 4)) for _ in range(8)]
    r, c, chi = v[0], v[1:7], v[7]
    image = la.matvec(exp_b(B), v)
    assert image[0] == r
    assert image[1:7] == [ci + r * bi for ci, bi in zip(c, B)]
    assert image[7] == chi + q(c, B) + r * q(B, B) / 2


def test_exp_b_graded_piece(rng):
    # exp(B) e_r = (1, B, B^2/2)
    B = random_rational_b(rng)
    col = [row[0] for row in exp_b(B)]
    assert col == [1, *B, q(B, B) / 2]


def test_exp_b_laws(rng):
    for _ in range(100):
        B, C = random_rational_b(rng), random_rational_b(rng)
        BC = [x + y for x, y in zip(B, C)]
        assert la.equal(la.matmul(exp_b(B), exp_b(C)), exp_b(BC))
        assert is_mukai_isometry(exp_b(B))
        assert la.is_identity(la.matmul(exp_b(B), exp_b([-x for x in B])))


def test_bfield_order_and_normalization():
    B = BField.of([mpq(1, 2), mpq(-4, 3), 0, 2, mpq(5, 4), 0])
    assert B.order == 12
    B0, shift = B.normalized()
    assert all(0 <= x < 1 for x in B0.b)
    assert [x + s for x, s in zip(B0.b, shift)] == list(B.b)
    assert B0.order == B.order


def test_twisted_lattice_contains():
    B = BField.of([mpq(1, 3), 0, 0, 0, 0, 0])
    L = TwistedLattice(B)
    assert L.contains([1, mpq(1, 3), 0, 0, 0, 0, 0, 0])
    assert not L.contains([1, 0, 0, 0, 0, 0, 0, 0])
    assert L.contains([0, 1, 0, 0, 0, 0, 0, 0])


def test_reflexive_twist_examples():
    t = reflexive_twisted_isometry([1, 0, 0, 0, 0, 1])
    assert t.n == 1 and t.integral
    t = reflexive_twisted_isometry([1, 0, 0, 0, 0, 3])
    assert t.n == 3 and t.B.order == 3 and t.brauer_order_bound == 3
    assert t.integral
    # B' = -psi_b(B) = B, since psi_b(b) = -b
    assert t.Bprime == t.B


def test_reflexive_twist_integral(rng):
    for _ in range(80):
        b = list(primitive(random_b(rng, bound=4, max_norm=40)))
        t = reflexive_twisted_isometry(b)
        K = t.change_of_basis
        assert t.integral
        assert all(x.denominator == 1 for row in K for x in row)
        assert abs(la.det(K)) == 1
        assert is_mukai_isometry(t.tilde_psi)
        # the order of B divides n
        assert int(t.n) % t.B.order == 0


def test_is_filtered():
    assert is_filtered(la.identity(8), [0] * 6, [0] * 6)
    B = [mpq(1, 2), 0, 0, 0, 0, mpq(1, 3)]
    assert is_filtered(la.identity(8), B, B)
    # swapping r and chi does not fix (0,0,1)
    t = reflexive_twisted_isometry([1, 0, 0, 0, 0, 1])
    assert not is_filtered(t.tilde_psi, t.B.b, t.Bprime.b)
    with pytest.raises(NotAnIsometry):
        is_filtered(la.scale(mpq(2), la.identity(8)), B, B)


def test_zigzag_roundtrip(rng):
    for _ in range(20):
        A, k = random_isometry(rng)
        if k % 2:
            continue
        cert = zigzag_factorize(A)
        report = verify(cert)
        assert report.ok, report
        obj = cert.to_json()
        cert2, flags = certificate_from_json(obj)
        assert verify(cert2, flags).ok


def test_zigzag_prime_to_ell(rng):
    for _ in range(10):
        A, k = random_isometry(rng, ell=5)
        if k % 2:
            continue
        cert = zigzag_factorize(A, prime_to=5)
        assert is_prime_to_ell_zigzag(cert, 5)
        assert verify(cert, {5: True}).ok


def test_verify_rejects_tampering():
    A = la.matmul(Reflection.of([1, 0, 0, 0, 0, 1]).matrix(), Reflection.of([1, 0, 0, 0, 0, 3]).matrix())
    obj = zigzag_factorize(A).to_json()
    # false prime-to-3 claim
    bad = dict(obj, prime_to={"3": True})
    cert, flags = certificate_from_json(bad)
    assert not verify(cert, flags).ok
    # altered composite
    bad = dict(obj, composite=["1" if i % 7 == 0 else "0" for i in range(36)])
    cert, flags = certificate_from_json(bad)
    assert not verify(cert, flags).recomposes


def test_zigzag_requires_admissible():
    with pytest.raises(NotAdmissible):
        zigzag_factorize(poincare_duality())


def test_filtered_examples():
    B0 = [1, 0, -2, 0, 0, 3]
    assert is_filtered(exp_b(B0), [0] * 6, [0] * 6)
    swap = la.identity(8)
    swap[0][0] = swap[7][7] = mpq(0)
    swap[0][7] = swap[7][0] = mpq(1)
    assert is_mukai_isometry(swap)
    assert not is_filtered(swap, [0] * 6, [0] * 6)


def test_reflexive_twist_rescales_b():
    t1 = reflexive_twisted_isometry([2, 0, 0, 0, 0, 2])
    t2 = reflexive_twisted_isometry([1, 0, 0, 0, 0, 1])
    assert t1.b == t2.b and la.equal(t1.psi, t2.psi)


def test_zigzag_of_scaled_wedge():
    g0 = la.rat_matrix([[1, 2, 0, 1], [0, 5, 1, 0], [0, 0, 1, 3], [0, 0, 0, 5]])
    assert la.det(g0) == 25
    phi = la.scale(mpq(1, 5), wedge_square(g0))
    cert = zigzag_factorize(phi)
    assert la.equal([list(r) for r in cert.composite], phi)
    assert verify(cert).ok


def test_zigzag_two_steps():
    b, c = [1, 0, 0, 0, 0, 1], [1, 0, 0, 0, 0, 3]
    phi = la.matmul(Reflection.of(c).matrix(), Reflection.of(b).matrix())
    cert = zigzag_factorize(phi)
    # the search may pick other reflections; count and spinor class are what is determined
    assert len(cert.steps) == 2
    assert square_class(math.prod(2 * s.n for s in cert.steps)) == square_class(2 * 6)
    assert not is_prime_to_ell_zigzag(cert, 3) and is_prime_to_ell_zigzag(cert, 5)
    assert verify(cert).ok
    assert zigzag_factorize(la.identity(6)).steps == ()
