"""F-crystal linear algebra over W(F_{p^s})/p^N.

H^1 is W^4 with slope exponents (0, 0, 1, 1) and Frobenius
F(v) = C . D . sigma(v), where D = diag(1, 1, p, p).  With C = I this is
diag(1, 1, p, p) sigma, and the image of F is H_0 + p H_1.

A W-linear rho: X -> Y commutes with Frobenius when rho F_X = F_Y rho, i.e.
rho C_X D = C_Y D sigma(rho).  The test is division free, so verdicts are
exact at the working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import linalg as la
from .errors import (
    InvalidInput,
    NoAnticommutation,
    NotAdmissible,
    SingularInput,
    WittMismatch,
    WittObstruction,
)
from .lift import pair_product, proportionality
from .reflections import scherk_over_field
from .scalars import WittRing, WittScalar, teichmueller
from .wedge import wedge_square

SLOPES = (0, 0, 1, 1)

COMMUTES = "commutes"
ANTICOMMUTES = "anticommutes"
NEITHER = "neither"


def _sigma(M) -> list:
    return [[x.frobenius() for x in row] for row in M]


def slope_matrix(ring: WittRing) -> list:
    D = la.identity(4, ring.one())
    for i, a in enumerate(SLOPES):
        D[i][i] = ring(ring.p**a)
    return D


def _coerce_matrix(M, ring: WittRing) -> list:
    out = []
    for row in M:
        new = []
        for x in row:
            if isinstance(x, WittScalar):
                if x.ring != ring:
                    raise WittMismatch(f"entry over {x.ring}, expected {ring}")
                new.append(x)
            else:
                new.append(ring(int(x)) if isinstance(x, int) else ring.one() * x)
        out.append(new)
    return out


@dataclass(frozen=True)
class FCrystalH1:
    ring: WittRing
    C: tuple

    @classmethod
    def of(cls, ring: WittRing, C) -> FCrystalH1:
        C = _coerce_matrix(C, ring)
        if len(C) != 4 or any(len(r) != 4 for r in C):
            raise InvalidInput("C must be 4x4")
        if not la.det(C).is_unit():
            raise SingularInput("C is not invertible over the Witt ring")
        return cls(ring, tuple(tuple(r) for r in C))

    @property
    def slopes(self) -> tuple:
        return SLOPES

    def C_matrix(self) -> list:
        return [list(r) for r in self.C]

    def linear_part(self) -> list:
        """C . D, so F = (C . D) o sigma."""
        return la.matmul(self.C_matrix(), slope_matrix(self.ring))

    def frobenius_squared(self) -> list:
        """F^2 is linear: C D sigma(C) D (sigma^2 = 1 for s <= 2)."""
        CD = self.linear_part()
        return la.matmul(CD, _sigma(CD))

    def to_json(self) -> dict:
        return {**self.ring.descriptor(), "C": [x.to_json() for row in self.C for x in row]}

    def embed(self, s: int) -> FCrystalH1:
        """The same crystal over W(F_{p^s}), s >= current degree."""
        if s == self.ring.s:
            return self
        if self.ring.s != 1 or s != 2:
            raise InvalidInput("can only extend scalars from s = 1 to s = 2")
        ring = WittRing(self.ring.p, 2, self.ring.N)
        return FCrystalH1(ring, tuple(tuple(ring(x.coeffs[0]) for x in row) for row in self.C))


def frobenius_action(X: FCrystalH1, v) -> list:
    v = [x if isinstance(x, WittScalar) else X.ring(int(x)) for x in v]
    return la.matvec(X.linear_part(), [x.frobenius() for x in v])


@dataclass(frozen=True)
class CrystalMorphismReport:
    verdict: str
    precision: int
    wedge_sign: int | None = None
    f2_commutes: bool | None = None
    phi_intertwines: bool | None = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "precision": self.precision}
        if self.wedge_sign is not None:
            out["wedge_sign"] = "+" if self.wedge_sign > 0 else "-"
        if self.f2_commutes is not None:
            out["f2_commutes"] = self.f2_commutes
        if self.phi_intertwines is not None:
            out["phi_intertwines"] = self.phi_intertwines
        if self.verdict == ANTICOMMUTES:
            out["relation"] = "rho o F_X = -F_Y o rho"
        return out


def _same_ring(*crystals) -> WittRing:
    rings = {c.ring for c in crystals}
    if len(rings) != 1:
        raise WittMismatch("crystals live over different Witt rings")
    return rings.pop()


def is_crystal_morphism(rho, X: FCrystalH1, Y: FCrystalH1) -> CrystalMorphismReport:
    ring = _same_ring(X, Y)
    rho = _coerce_matrix(rho, ring)
    left = la.matmul(rho, X.linear_part())
    right = la.matmul(Y.linear_part(), _sigma(rho))
    if la.equal(left, right):
        verdict = COMMUTES
    elif la.equal(left, la.neg(right)):
        verdict = ANTICOMMUTES
    else:
        verdict = NEITHER
    return CrystalMorphismReport(verdict, ring.N)


def commutes_with_f2(rho, X: FCrystalH1, Y: FCrystalH1) -> bool:
    ring = _same_ring(X, Y)
    rho = _coerce_matrix(rho, ring)
    return la.equal(la.matmul(rho, X.frobenius_squared()), la.matmul(Y.frobenius_squared(), rho))


def wedge_frobenius(X: FCrystalH1) -> list:
    """Linear part of wedge^2 F, which is wedge^2(C D) o sigma."""
    return wedge_square(X.linear_part())


def intertwines_wedge(phi, X: FCrystalH1, Y: FCrystalH1) -> bool:
    return la.equal(la.matmul(phi, wedge_frobenius(X)), la.matmul(wedge_frobenius(Y), _sigma(phi)))


# ---------------------------------------------------------------------------
# lifting through the wedge square over W/p^N


def _residue_matrix(M, field: WittRing) -> list:
    return [[field(*x.residue()) for x in row] for row in M]


def _lift_matrix(M, ring: WittRing) -> list:
    return [[ring(*x.coeffs) for x in row] for row in M]


def _divide_exact(x: WittScalar, k: int, field: WittRing) -> WittScalar:
    pk = x.ring.p**k
    if any(c % pk for c in x.coeffs):
        raise AssertionError("Hensel step lost divisibility")
    return field(*(c // pk for c in x.coeffs))


def _wedge_differential(rho_bar) -> list:
    """36x16 matrix of X -> d(wedge^2)_{rho_bar}(X), unknowns X[i][j] in row-major order."""
    zero = rho_bar[0][0] - rho_bar[0][0]
    one = zero + 1
    cols = []
    for idx in range(16):
        E = [[zero] * 4 for _ in range(4)]
        E[idx // 4][idx % 4] = one
        # derivative of wedge^2 at rho along E: bilinear polarization
        W = _wedge_bilinear(rho_bar, E)
        cols.append([x for row in W for x in row])
    return [[cols[j][i] for j in range(16)] for i in range(36)]


def _wedge_bilinear(A, B) -> list:
    from .wedge import PAIRS

    out = []
    for k, l in PAIRS:
        out.append([A[k][i] * B[l][j] + B[k][i] * A[l][j] - A[l][i] * B[k][j] - B[l][i] * A[k][j] for i, j in PAIRS])
    return out


def hensel_wedge_lift(rho_bar, target) -> list:
    """Lift rho_bar over F_q with wedge^2 rho_bar = target mod p to rho with wedge^2 rho = target at precision N."""
    ring = target[0][0].ring
    field = ring.with_precision(1)
    rho = _lift_matrix(rho_bar, ring)
    J = _wedge_differential(rho_bar)
    p = ring.p
    for k in range(1, ring.N):
        err = la.sub(target, wedge_square(rho))
        E = [_divide_exact(x, k, field) for row in err for x in row]
        try:
            X = la.solve(J, E)
        except SingularInput:
            raise WittObstruction(f"Hensel step {k} has no solution") from None
        pk = p**k
        rho = [[rho[i][j] + ring(*X[4 * i + j].coeffs) * pk for j in range(4)] for i in range(4)]
    if not la.equal(wedge_square(rho), target):
        raise WittObstruction("lift does not reach the working precision")
    return rho


def wedge_crystal_check(phi, X: FCrystalH1, Y: FCrystalH1):
    """rho with wedge^2 rho = sign * phi, and how rho meets Frobenius.

    The residue isometry is decomposed into reflections over F_{p^s}, lifted
    through pair operators, rescaled by a square root, then Hensel-lifted.
    """
    ring = _same_ring(X, Y)
    phi = _coerce_matrix(phi, ring)
    if len(phi) != 6 or any(len(r) != 6 for r in phi):
        raise InvalidInput("phi must be 6x6")
    if la.berkowitz_det(phi) != 1:
        raise NotAdmissible("phi must have determinant 1 at the working precision")
    field = ring.with_precision(1)
    phi_bar = _residue_matrix(phi, field)
    from .wedge import is_isometry

    if not is_isometry(phi_bar):
        raise InvalidInput("phi is not an isometry modulo p")
    factors = scherk_over_field(phi_bar)
    H = pair_product(factors, field.one())
    c = proportionality(wedge_square(H), phi_bar)
    from .scalars import witt_sqrt

    chosen = None
    for sign in (1, -1):
        s = witt_sqrt(c.inverse() * sign)
        if s is not None:
            chosen = (sign, s)
            break
    if chosen is None:
        raise WittObstruction(f"neither class of {c} is a square in F_{ring.p}^{ring.s}", residue_class=c.coeffs)
    sign, s = chosen
    rho_bar = la.scale(s, H)
    target = phi if sign > 0 else la.neg(phi)
    rho = hensel_wedge_lift(rho_bar, target)
    base = is_crystal_morphism(rho, X, Y)
    report = CrystalMorphismReport(
        base.verdict,
        ring.N,
        wedge_sign=sign,
        f2_commutes=commutes_with_f2(rho, X, Y),
        phi_intertwines=intertwines_wedge(phi, X, Y),
    )
    return rho, sign, report


# ---------------------------------------------------------------------------
# the xi twist


def xi_element(ring: WittRing) -> WittScalar:
    """Teichmueller lift xi with xi^(p-1) = -1 (ring must have s = 2)."""
    if ring.s != 2:
        raise InvalidInput("xi lives in W(F_{p^2})")
    field = ring.with_precision(1)
    for r in ring.residue_elements():
        if any(r) and field(*r) ** (ring.p - 1) == -1:
            return teichmueller(r, ring)
    raise AssertionError("F_{p^2} always contains a root of x^(p-1) = -1")


def xi_twist(rho, X: FCrystalH1, Y: FCrystalH1):
    """Turn an anticommuting rho into the commuting xi * rho over W(F_{p^2})/p^N."""
    X2, Y2 = X.embed(2), Y.embed(2)
    ring = X2.ring
    rho2 = [
        [ring(*(x.coeffs + (0,) * (2 - len(x.coeffs)))) if isinstance(x, WittScalar) else ring(int(x)) for x in row]
        for row in rho
    ]
    verdict = is_crystal_morphism(rho2, X2, Y2).verdict
    if verdict != ANTICOMMUTES:
        raise NoAnticommutation(f"rho {verdict} with Frobenius; nothing to repair")
    xi = xi_element(ring)
    twisted = la.scale(xi, rho2)
    report = is_crystal_morphism(twisted, X2, Y2)
    if report.verdict != COMMUTES:
        raise AssertionError("xi twist failed to commute")
    return twisted, xi, X2, Y2, report


# ---------------------------------------------------------------------------
# Smith-form diagnostics


def smith_valuations(M) -> list:
    """Valuations of the elementary divisors of a square Witt matrix (inf for zero)."""
    ring = M[0][0].ring
    p = ring.p
    A = [list(r) for r in M]
    n = len(A)
    out = []
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                v = A[i][j].valuation()
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, i, j = best
        if v == math.inf:
            out.extend([math.inf] * (n - k))
            break
        A[k], A[i] = A[i], A[k]
        for row in A:
            row[k], row[j] = row[j], row[k]
        pv = p**v
        unit = ring(*(c // pv for c in A[k][k].coeffs))
        uinv = unit.inverse()
        for r in range(k + 1, n):
            e = A[r][k]
            if e:
                f = ring(*(c // pv for c in e.coeffs)) * uinv
                A[r] = [x - f * y for x, y in zip(A[r], A[k])]
        for cidx in range(k + 1, n):
            e = A[k][cidx]
            if e:
                f = ring(*(c // pv for c in e.coeffs)) * uinv
                for row in A:
                    row[cidx] = row[cidx] - f * row[k]
        out.append(v)
    return sorted(out)


def frobenius_image_profile(X: FCrystalH1) -> list:
    """Elementary divisor valuations of F; (0, 0, 1, 1) means F(H^1) = H_0 + p H_1."""
    return smith_valuations(X.linear_part())
