"""The Mukai lattice Z + Lambda + Z, B-field twists and reflexive isometries.

Mukai vectors are ordered (r, c_12, ..., c_34, chi).  The pairing is
<(r, c, chi), (r', c', chi')> = q(c, c') - r chi' - r' chi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

from gmpy2 import mpq

from . import linalg as la
from .errors import InvalidInput, IsotropicVector, NotAdmissible, NotAnIsometry
from .reflections import Reflection, cd_decompose, cd_decompose_prime_to_ell, compose, gram_apply
from .scalars import local_integrality, rat, rat_str
from .wedge import admissibility_degree, is_isometry, q

DEFAULT_PRIMES = (2, 3, 5, 7, 11, 13)


@dataclass(frozen=True)
class MukaiVector:
    r: object
    c: tuple
    chi: object

    @classmethod
    def of(cls, r, c, chi) -> MukaiVector:
        c = tuple(rat(x) for x in c)
        if len(c) != 6:
            raise InvalidInput("the degree-2 part has six coordinates")
        return cls(rat(r), c, rat(chi))

    @classmethod
    def from_list(cls, v) -> MukaiVector:
        if len(v) != 8:
            raise InvalidInput("a Mukai vector has eight coordinates")
        return cls.of(v[0], v[1:7], v[7])

    def as_list(self) -> list:
        return [self.r, *self.c, self.chi]


def mukai_pairing(u, v):
    if isinstance(u, MukaiVector):
        u = u.as_list()
    if isinstance(v, MukaiVector):
        v = v.as_list()
    return q(u[1:7], v[1:7]) - u[0] * v[7] - v[0] * u[7]


def mukai_gram() -> list:
    M = la.zeros(8, 8)
    M[0][7] = M[7][0] = mpq(-1)
    for a in range(6):
        M[a + 1][6 - a] = mpq((1, -1, 1, 1, -1, 1)[a])
    return M


def is_mukai_isometry(Phi) -> bool:
    MG = mukai_gram()
    return la.equal(la.matprod(la.transpose(Phi), MG, Phi), MG)


@dataclass(frozen=True)
class BField:
    """A rational class B with its order n (least n > 0 with n B integral)."""

    b: tuple

    @classmethod
    def of(cls, b) -> BField:
        b = tuple(rat(x) for x in b)
        if len(b) != 6:
            raise InvalidInput("a B-field has six coordinates")
        return cls(b)

    @property
    def order(self) -> int:
        return reduce(math.lcm, (int(x.denominator) for x in self.b), 1)

    def normalized(self) -> tuple[BField, tuple]:
        """Representative with coordinates in [0, 1) and the integral shift B - B_0."""
        shift = tuple(mpq(math.floor(x)) for x in self.b)
        return BField(tuple(x - s for x, s in zip(self.b, shift))), shift

    def __neg__(self) -> BField:
        return BField(tuple(-x for x in self.b))

    def to_json(self) -> list:
        return [rat_str(x) for x in self.b]


def exp_b(B) -> list:
    """(r, c, chi) -> (r, c + r B, chi + q(c, B) + r q(B, B)/2)."""
    b = B.b if isinstance(B, BField) else tuple(rat(x) for x in B)
    E = la.identity(8)
    GB = gram_apply(b)
    for i in range(6):
        E[i + 1][0] = b[i]
        E[7][i + 1] = GB[i]
    E[7][0] = q(b, b) / 2
    return E


@dataclass(frozen=True)
class TwistedLattice:
    """exp(B) applied to the integral Mukai lattice; the basis matrix has these images as columns."""

    bfield: BField

    @property
    def basis(self) -> list:
        return exp_b(self.bfield)

    def contains(self, v) -> bool:
        coords = la.matvec(exp_b(-self.bfield), [rat(x) for x in v])
        return all(x.denominator == 1 for x in coords)

    def change_of_basis(self, Phi, target: TwistedLattice) -> list:
        """Matrix of Phi from this lattice's basis to the target's basis."""
        return la.matprod(exp_b(-target.bfield), Phi, self.basis)


def _block_matrix(lam, u) -> list:
    """8x8 matrix acting by ``lam`` on Lambda and by the 2x2 ``u`` on (r, chi)."""
    M = la.zeros(8, 8)
    for i in range(6):
        for j in range(6):
            M[i + 1][j + 1] = lam[i][j]
    M[0][0], M[0][7] = u[0]
    M[7][0], M[7][7] = u[1]
    return M


@dataclass(frozen=True)
class ReflexiveTwist:
    b: tuple
    n: object
    psi: list
    B: BField
    Bprime: BField
    tilde_psi: list
    change_of_basis: list
    integral: bool

    @property
    def brauer_order_bound(self) -> int:
        return abs(int(self.n))


def reflexive_twisted_isometry(b) -> ReflexiveTwist:
    """The reflexive isometry of b and its integral extension between twisted lattices.

    With n = q(b,b)/2 and B = b/n, the extension is -psi_b on Lambda and
    (r, chi) -> (n chi, r/n) on the hyperbolic plane.  Since psi_b(B) = -B
    the target field B' = -psi_b(B) equals B.
    """
    ref = Reflection.of(b)
    pb = [mpq(x) for x in ref.b]
    n = mpq(ref.norm, 2)
    psi = ref.matrix()
    B = BField(tuple(2 * x / ref.norm for x in pb))
    Bprime = BField(tuple(-x for x in la.matvec(psi, list(B.b))))
    tilde = _block_matrix(la.neg(psi), ((mpq(0), n), (1 / n, mpq(0))))
    K = la.matprod(exp_b(-Bprime), tilde, exp_b(B))
    integral = all(x.denominator == 1 for row in K for x in row) and abs(la.det(K)) == 1
    return ReflexiveTwist(ref.b, n, psi, B, Bprime, tilde, K, integral)


def is_filtered(Phi, B, Bprime) -> bool:
    """Does Phi fix (0,0,1) and carry F^1 of the B-twisted lattice into F^1 of the B'-twisted one?

    F^1 is spanned by (0, c, q(c, B)) and (0, 0, 1).
    """
    Phi = la.rat_matrix(Phi)
    if not is_mukai_isometry(Phi):
        raise NotAnIsometry("Phi does not preserve the Mukai pairing")
    B = B if isinstance(B, BField) else BField.of(B)
    e_chi = [mpq(0)] * 7 + [mpq(1)]
    if la.matvec(Phi, e_chi) != e_chi:
        return False
    E = exp_b(B)
    for j in range(1, 7):
        image = la.matvec(Phi, [row[j] for row in E])
        # F^1 of any twist is the hyperplane r = 0
        if image[0] != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# zig-zag certificates


@dataclass(frozen=True)
class ZigzagStep:
    b: tuple
    n: object
    B: BField
    Bprime: BField

    @property
    def brauer_order_bound(self) -> int:
        return abs(int(self.n))

    def to_json(self) -> dict:
        return {
            "b": list(self.b),
            "n": int(self.n),
            "B": self.B.to_json(),
            "Bprime": self.Bprime.to_json(),
            "brauer_order_bound": self.brauer_order_bound,
        }


def _step(ref: Reflection) -> ZigzagStep:
    t = reflexive_twisted_isometry(ref.b)
    return ZigzagStep(ref.b, int(t.n), t.B, t.Bprime)


@dataclass(frozen=True)
class ZigzagCertificate:
    steps: tuple
    composite: tuple

    def reflections(self) -> list:
        return [Reflection.of(s.b) for s in self.steps]

    def to_json(self, primes=DEFAULT_PRIMES) -> dict:
        from .serialize import vector_to_json

        return {
            "steps": [s.to_json() for s in self.steps],
            "composite": vector_to_json([x for row in self.composite for x in row]),
            "prime_to": {str(p): is_prime_to_ell_zigzag(self, p) for p in primes},
            "order": "steps[0] is applied first",
        }


def zigzag_factorize(phi, prime_to: int | None = None, seed: int | None = None) -> ZigzagCertificate:
    """Factor an admissible isometry into reflexive steps (prime to l when asked)."""
    phi = la.rat_matrix(phi)
    if not is_isometry(phi):
        raise NotAnIsometry("input does not preserve the wedge pairing")
    if admissibility_degree(phi) != 1:
        raise NotAdmissible("zig-zag factorization needs determinant 1")
    if prime_to is None:
        dec = cd_decompose(phi, seed=seed)
    else:
        dec = cd_decompose_prime_to_ell(phi, prime_to, seed=seed)
    steps = tuple(_step(f) for f in dec.factors)
    return ZigzagCertificate(steps, tuple(tuple(r) for r in phi))


def is_prime_to_ell_zigzag(cert: ZigzagCertificate, ell: int) -> bool:
    return all(int(s.n) % ell != 0 for s in cert.steps)


@dataclass(frozen=True)
class VerificationReport:
    recomposes: bool
    steps_consistent: bool
    prime_flags_consistent: dict

    @property
    def ok(self) -> bool:
        return self.recomposes and self.steps_consistent and all(self.prime_flags_consistent.values())

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "recomposes": self.recomposes,
            "steps_consistent": self.steps_consistent,
            "prime_flags_consistent": {str(k): v for k, v in self.prime_flags_consistent.items()},
        }


def verify(cert: ZigzagCertificate, flags: dict | None = None) -> VerificationReport:
    """Recompose, recheck each step's fields and integrality, and audit prime-to-l flags.

    A flag claiming prime-to-l must agree with the step norms and, when
    true, the composite must be unimodular over Z_(l).
    """
    composite = [list(r) for r in cert.composite]
    recomposes = la.equal(compose(cert.reflections()), composite)
    steps_ok = True
    for s in cert.steps:
        t = reflexive_twisted_isometry(s.b)
        if tuple(t.b) != tuple(s.b) or t.n != s.n or t.B != s.B or t.Bprime != s.Bprime or not t.integral:
            steps_ok = False
    if flags is None:
        flags = {p: is_prime_to_ell_zigzag(cert, p) for p in DEFAULT_PRIMES}
    consistent = {}
    for p, claimed in flags.items():
        p = int(p)
        actual = is_prime_to_ell_zigzag(cert, p)
        good = claimed == actual
        if good and claimed:
            good = local_integrality(composite, p).unimodular
        consistent[p] = good
    return VerificationReport(recomposes, steps_ok, consistent)


def certificate_from_json(obj) -> tuple[ZigzagCertificate, dict]:
    try:
        steps = []
        for s in obj["steps"]:
            ref = Reflection.of([int(x) for x in s["b"]])
            if list(ref.b) != [int(x) for x in s["b"]]:
                raise InvalidInput("certificate vectors must be primitive and sign-normalized")
            steps.append(ZigzagStep(ref.b, int(s["n"]), BField.of(s["B"]), BField.of(s["Bprime"])))
        flat = [rat(x) for x in obj["composite"]]
        if len(flat) != 36:
            raise InvalidInput("composite must have 36 entries")
        composite = tuple(tuple(flat[6 * i : 6 * i + 6]) for i in range(6))
        flags = {int(k): bool(v) for k, v in obj.get("prime_to", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed certificate: {exc}") from None
    except IsotropicVector as exc:
        raise InvalidInput(f"malformed certificate: {exc}") from None
    return ZigzagCertificate(tuple(steps), composite), flags
