"""Inverting the wedge-square map (Shioda's trick) and principal isogeny data.

A product of an even number of reflections is lifted two factors at a time
through the pair operator T_{b,c}(x) = contraction of c with mu(b ^ x),
where mu: wedge^3 V -> V* is <mu(beta), y> = tr(beta ^ y).  One checks
wedge^2 T_{b,c} = q(b,b) q(c,c)/4 * R_c R_b, so a product H of pair
operators satisfies wedge^2 H = c * g and h = H / sqrt(c) is the lift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from . import linalg as la
from .errors import (
    EllIsTwo,
    GaloisTestFailure,
    InvalidInput,
    NotAnIsometry,
    NotEllIntegral,
    ObstructionAtEll,
    ProportionalityFailure,
)
from .reflections import cd_decompose
from .scalars import (
    LocalIntegralityReport,
    QuadScalar,
    SquareClass,
    class_in_local_units,
    local_integrality,
    rat,
    rational_sqrt,
)
from .wedge import PAIRS, is_isometry, levi_civita, poincare_duality, require_admissible, wedge_square

# EPS[k][l] lists (pair index, sign) with sign = eps(i, j, k, l) != 0
_EPS = [
    [[(a, levi_civita(i, j, k, l)) for a, (i, j) in enumerate(PAIRS) if levi_civita(i, j, k, l)] for l in range(4)]
    for k in range(4)
]


def _antisymmetric(c) -> list:
    zero = c[0] - c[0]
    M = [[zero] * 4 for _ in range(4)]
    for a, (i, j) in enumerate(PAIRS):
        M[i][j] = c[a]
        M[j][i] = -c[a]
    return M


def pair_operator(b, c) -> list:
    """4x4 matrix of x -> iota_{mu(b ^ x)} c (exact, any coefficient ring)."""
    ct = _antisymmetric(c)
    zero = c[0] - c[0]
    T = [[zero] * 4 for _ in range(4)]
    for k in range(4):
        # covector mu(b ^ e_k)
        f = []
        for l in range(4):
            acc = zero
            for a, sign in _EPS[k][l]:
                acc = acc + b[a] if sign > 0 else acc - b[a]
            f.append(acc)
        for n in range(4):
            acc = zero
            for l in range(4):
                if f[l] and ct[l][n]:
                    acc = acc + f[l] * ct[l][n]
            T[n][k] = acc
    return T


def pair_product(factors, one) -> list:
    """H with wedge^2 H proportional to R_{b_{k-1}} ... R_{b_0} (k even, b_0 applied first)."""
    if len(factors) % 2:
        raise InvalidInput("pair product needs an even number of reflections")
    H = la.identity(4, one)
    for i in range(0, len(factors), 2):
        H = la.matmul(pair_operator(factors[i], factors[i + 1]), H)
    return H


def proportionality(W, g):
    """The scalar c with W = c g, checked on all entries."""
    pos = next(((i, j) for i in range(len(g)) for j in range(len(g)) if g[i][j]), None)
    if pos is None:
        raise ProportionalityFailure("target matrix is zero")
    c = W[pos[0]][pos[1]] / g[pos[0]][pos[1]]
    for i in range(len(g)):
        for j in range(len(g)):
            if W[i][j] != c * g[i][j]:
                raise ProportionalityFailure(f"wedge square is not proportional at entry ({i},{j})")
    if not c:
        raise ProportionalityFailure("proportionality constant vanished")
    return c


def _sign_of(x) -> int:
    key = getattr(x, "sign_key", None)
    if key is not None:
        return key()
    return (x > 0) - (x < 0)


def normalize_sign(h) -> list:
    """Flip h so its first nonzero entry (row-major) is positive."""
    first = la.first_nonzero(h)
    if first is not None and _sign_of(first) < 0:
        return la.neg(h)
    return h


@dataclass(frozen=True)
class LiftResult:
    h: list | None
    obstruction: SquareClass | str | None
    field: str
    sign: str = "n/a"
    report: LocalIntegralityReport | None = None
    spinor_norm: SquareClass | None = None

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        out = {
            "h": None if self.h is None else matrix_to_json(self.h),
            "sign": self.sign,
            "obstruction": None if self.obstruction is None else str(self.obstruction),
            "field": self.field,
        }
        if self.report is not None:
            out["integrality"] = self.report.to_json()
        return out


def field_name(d: int) -> str:
    return "Q" if d == 1 else f"Q(sqrt {d})"


def _prepare(g) -> list:
    g = la.rat_matrix(g)
    if not is_isometry(g):
        raise NotAnIsometry("input does not preserve the wedge pairing")
    require_admissible(g)
    return g


def _lift_core(g, seed=None):
    """(H, c, SN) with wedge^2 H = c g over Q."""
    dec = cd_decompose(g, seed=seed)
    factors = [[mpq(x) for x in f.b] for f in dec.factors]
    H = pair_product(factors, mpq(1))
    c = proportionality(wedge_square(H), g)
    expected = math.prod(mpq(n) for n in dec.norms) / mpq(4) ** (len(dec.norms) // 2)
    if c != expected:
        raise ProportionalityFailure(f"constant {c} differs from the product of norms {expected}")
    return H, c, dec.spinor_norm


def lift_so_to_sl(g, seed: int | None = None) -> LiftResult:
    """h in SL_4(Q) with wedge^2 h = g, or the spinor-norm obstruction.

    ``g`` may also have QuadScalar entries; then the lift is sought over
    that quadratic field.
    """
    quad = _quad_field(g)
    if quad is not None:
        return _lift_quadratic_input(g, quad)
    g = _prepare(g)
    H, c, sn = _lift_core(g, seed)
    t = rational_sqrt(c)
    if t is None:
        return LiftResult(None, sn, "Q", spinor_norm=sn)
    h = normalize_sign(la.scale(1 / t, H))
    _check_lift(h, g)
    return LiftResult(h, None, "Q", spinor_norm=sn)


def _check_lift(h, g) -> None:
    if not la.equal(wedge_square(h), g):
        raise ProportionalityFailure("lift does not reproduce its target")
    if la.det(h) != 1:
        raise ProportionalityFailure("lift does not have determinant 1")


def _quad_field(g):
    ds = {x.d for row in g for x in row if isinstance(x, QuadScalar)}
    if len(ds) > 1:
        raise InvalidInput("entries from different quadratic fields")
    return ds.pop() if ds else None


def _lift_quadratic_input(g, d) -> LiftResult:
    g = [[x if isinstance(x, QuadScalar) else QuadScalar(d, rat(x)) for x in row] for row in g]
    if all(x.is_rational for row in g for x in row):
        res = lift_over_quadratic([[x.a for x in row] for row in g])
        n = res.spinor_norm.representative
        if n == 1:
            h = [[QuadScalar(d, x) for x in row] for row in res.h]
            return LiftResult(h, None, field_name(d), spinor_norm=res.spinor_norm)
        if n != d:
            return LiftResult(None, res.spinor_norm, field_name(d), spinor_norm=res.spinor_norm)
        return res
    from .reflections import scherk_over_field

    if not is_isometry(g):
        raise NotAnIsometry("input does not preserve the wedge pairing")
    require_admissible(g)
    one = QuadScalar(d, 1)
    factors = scherk_over_field(g, max_height=16, max_factors=8)
    H = pair_product(factors, one)
    c = proportionality(wedge_square(H), g)
    s = c.inverse().sqrt()
    if s is None:
        # the class of c in Q(sqrt d)*/squares, shown by a representative
        return LiftResult(None, str(c), field_name(d))
    h = normalize_sign(la.scale(s, H))
    _check_lift(h, g)
    return LiftResult(h, None, field_name(d))


def lift_over_quadratic(g) -> LiftResult:
    """Lift a rational isometry over Q(sqrt n), n the spinor norm class.

    With c = n t^2 the lift is h = sqrt(n) H / (t n), so every entry is a
    rational multiple of sqrt(n).  A trivial class gives a rational lift.
    """
    g = _prepare(g)
    H, c, sn = _lift_core(g)
    n = sn.representative
    if n == 1:
        h = normalize_sign(la.scale(1 / rational_sqrt(c), H))
        _check_lift(h, g)
        return LiftResult(h, None, "Q", spinor_norm=sn)
    t = rational_sqrt(c / n)
    if t is None:
        raise ProportionalityFailure("proportionality constant is not in the spinor norm class")
    coeff = 1 / (t * n)
    h = normalize_sign([[QuadScalar(n, 0, coeff * x) for x in row] for row in H])
    _check_lift(h, [[QuadScalar(n, x) for x in row] for row in g])
    return LiftResult(h, None, field_name(n), spinor_norm=sn)


@dataclass(frozen=True)
class IsogenyData:
    g0: list
    n: int
    dualized: bool
    target: list = field(repr=False, default=None)

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        return {"g0": matrix_to_json(self.g0), "n": self.n, "dualized": self.dualized, "degree": self.n * self.n}


def principal_isogeny_data(phi) -> IsogenyData:
    """g0 over Q with wedge^2 g0 = n * phi (phi pre-composed with D when det phi = -1)."""
    phi = la.rat_matrix(phi)
    if not is_isometry(phi):
        raise NotAnIsometry("input does not preserve the wedge pairing")
    dualized = la.det(phi) == -1
    if dualized:
        phi = la.matmul(poincare_duality(), phi)
    res = lift_over_quadratic(phi)
    n = res.spinor_norm.representative
    if n == 1:
        return IsogenyData(res.h, 1, dualized, phi)
    g = res.h
    conj = [[x.conj() for x in row] for row in g]
    if la.equal(conj, g):
        return IsogenyData([[x.a for x in row] for row in g], 1, dualized, phi)
    if not la.equal(conj, la.neg(g)):
        raise GaloisTestFailure("conjugate lift is neither g nor -g")
    # sqrt(n) * (b sqrt(n)) = n b
    g0 = normalize_sign([[n * x.b for x in row] for row in g])
    if not la.equal(wedge_square(g0), la.scale(mpq(n), phi)) or la.det(g0) != n * n:
        raise GaloisTestFailure("descended matrix fails wedge^2 g0 = n phi")
    return IsogenyData(g0, n, dualized, phi)


def prime_to_ell_lift(phi, ell: int) -> LiftResult:
    """A Z_(l)-unimodular h with wedge^2 h = +-phi, the sign reported.

    The sign is chosen so that the spinor norm m of sign*phi is a square in
    Z_l*.  Then h lives over Q(sqrt m), and because sqrt(m) is an l-adic
    unit the integrality report is taken on the rational matrix sqrt(m) h.
    """
    ell = int(ell)
    if ell == 2:
        raise EllIsTwo("the l-adic lift needs l odd")
    phi = la.rat_matrix(phi)
    if not is_isometry(phi):
        raise NotAnIsometry("input does not preserve the wedge pairing")
    if not local_integrality(phi, ell).unimodular:
        raise NotEllIntegral(f"input is not unimodular over Z_({ell})")
    require_admissible(phi)
    classes = []
    for eps, label in ((1, "+"), (-1, "-")):
        target = la.scale(mpq(eps), phi)
        H, c, sn = _lift_core(target)
        classes.append(sn)
        if class_in_local_units(sn, ell):
            break
    else:
        raise ObstructionAtEll(
            f"neither {classes[0]} nor {classes[1]} is a square in Z_{ell}*", square_class=classes[0]
        )
    m = sn.representative
    descended = la.scale(1 / rational_sqrt(c / m), H)
    report = local_integrality(descended, ell)
    if m == 1:
        h = normalize_sign(descended)
        _check_lift(h, target)
        return LiftResult(h, None, "Q", sign=label, report=report, spinor_norm=sn)
    h = normalize_sign([[QuadScalar(m, 0, x / m) for x in row] for row in descended])
    _check_lift(h, [[QuadScalar(m, x) for x in row] for row in target])
    return LiftResult(h, None, field_name(m), sign=label, report=report, spinor_norm=sn)
