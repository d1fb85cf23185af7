"""Reflections of Lambda, Cartan-Dieudonne decomposition and spinor norms.

Decompositions follow Scherk's constructive procedure.  A factor list
``[b_0, ..., b_{k-1}]`` represents the product R_{b_{k-1}} ... R_{b_0}:
``factors[0]`` is applied first.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import reduce

from gmpy2 import mpq

from . import linalg as la
from .errors import (
    EllIsTwo,
    InvariantViolation,
    IsotropicVector,
    NotAnIsometry,
    NotEllIntegral,
    SearchExhausted,
)
from .scalars import SquareClass, ell_valuation, local_integrality, rat, rat_str, square_class
from .wedge import is_isometry, q

DEFAULT_MAX_HEIGHT = 16
MAX_FACTORS = 8
MAX_FACTORS_PRIME_TO_ELL = 24

_G_SIGNS = (1, -1, 1, 1, -1, 1)


def gram_apply(x) -> list:
    """G x for the wedge Gram matrix."""
    return [_G_SIGNS[a] * x[5 - a] for a in range(6)]


def primitive(b) -> tuple:
    """Scale a nonzero rational vector to a primitive integral one, first nonzero coordinate positive."""
    b = [rat(x) for x in b]
    if not any(b):
        raise IsotropicVector("the zero vector does not define a reflection")
    den = reduce(math.lcm, (int(x.denominator) for x in b), 1)
    ints = [int(x * den) for x in b]
    g = reduce(math.gcd, ints)
    ints = [x // g for x in ints]
    if next(x for x in ints if x) < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def reflection_matrix(b) -> list:
    """Matrix of x -> x - 2 q(x,b)/q(b,b) b."""
    nb = q(b, b)
    if not nb:
        raise IsotropicVector(f"q(b,b) = 0 for b = {list(b)}")
    Gb = gram_apply(b)
    one = nb - nb + 1
    factor = (one + one) / nb
    coeff = [factor * x for x in b]
    return [[(one if i == j else one - one) - coeff[i] * Gb[j] for j in range(6)] for i in range(6)]


def reflect(b, x) -> list:
    nb = q(b, b)
    if not nb:
        raise IsotropicVector(f"q(b,b) = 0 for b = {list(b)}")
    t = 2 * q(x, b) / nb
    return [xi - t * bi for xi, bi in zip(x, b)]


@dataclass(frozen=True)
class Reflection:
    b: tuple
    norm: int

    @classmethod
    def of(cls, b) -> Reflection:
        pb = primitive(b)
        nb = q(pb, pb)
        if nb == 0:
            raise IsotropicVector(f"q(b,b) = 0 for b = {list(pb)}")
        return cls(pb, int(nb))

    def matrix(self) -> list:
        return reflection_matrix([mpq(x) for x in self.b])


def compose(factors) -> list:
    """R_{b_{k-1}} ... R_{b_0} over Q."""
    M = la.identity(6)
    for f in factors:
        M = la.matmul(f.matrix(), M)
    return M


@dataclass(frozen=True)
class CDDecomposition:
    factors: tuple
    target: tuple

    @property
    def norms(self) -> list:
        return [f.norm for f in self.factors]

    @property
    def spinor_norm(self) -> SquareClass:
        # the product's class is small even when single norms are huge and hard to factor
        return square_class(math.prod(self.norms))

    def product(self) -> list:
        return compose(self.factors)

    def to_json(self) -> dict:
        return {
            "factors": [list(f.b) for f in self.factors],
            "norms": [str(n) for n in self.norms],
            "spinor_norm": str(self.spinor_norm),
            "order": "factors[0] is applied first",
        }


# ---------------------------------------------------------------------------
# candidate vectors


def _shell(height: int, dim: int):
    """Vectors of sup-norm exactly ``height`` in lexicographic order."""
    if dim == 0:
        return
    rng = range(-height, height + 1)
    for first in rng:
        if abs(first) == height:
            for rest in itertools.product(rng, repeat=dim - 1):
                yield (first,) + rest
        else:
            for rest in _shell(height, dim - 1):
                yield (first,) + rest


def candidate_vectors(max_height: int, seed: int | None = None, dim: int = 6):
    """Nonzero integer vectors by increasing sup-norm; a seed applies a fixed signed coordinate permutation."""
    if seed is None:
        perm, signs = list(range(dim)), [1] * dim
    else:
        r = random.Random(seed)
        perm = list(range(dim))
        r.shuffle(perm)
        signs = [r.choice((1, -1)) for _ in range(dim)]
    for h in range(1, max_height + 1):
        for v in _shell(h, dim):
            yield tuple(signs[i] * v[perm[i]] for i in range(dim))


# ---------------------------------------------------------------------------
# Scherk's procedure


def _is_skew(S) -> bool:
    n = len(S)
    return all(not (S[i][j] + S[j][i]) for i in range(n) for j in range(i, n))


def _G_times(M) -> list:
    return [[_G_SIGNS[a] * x for x in M[5 - a]] for a in range(6)]


def _quad_form(S, a):
    acc = None
    for i in range(6):
        if not a[i]:
            continue
        row = S[i]
        t = None
        for j in range(6):
            if a[j]:
                term = row[j] * a[j]
                t = term if t is None else t + term
        term = t * a[i]
        acc = term if acc is None else acc + term
    return acc


def _mat_int_vec(M, a) -> list:
    out = []
    for row in M:
        acc = None
        for x, y in zip(row, a):
            if y:
                t = x * y
                acc = t if acc is None else acc + t
        out.append(acc if acc is not None else row[0] - row[0])
    return out


class _Engine:
    """Scherk's loop over a field; hooks specialize it to Q, Q prime-to-l, or F_q."""

    def __init__(self, *, normalize, accept=None, stuck=None, max_height, seed, max_factors):
        self.normalize = normalize
        self.accept = accept or (lambda b, nb: True)
        self.stuck = stuck or (lambda A: False)
        self.max_height = max_height
        self.seed = seed
        self.max_factors = max_factors

    def _step_kind(self, A):
        """'done', ('rank1', b) or 'generic' / 'skew'."""
        one = A[0][0] - A[0][0] + 1
        AmI = la.sub(A, la.identity(6, one))
        if all(not x for row in AmI for x in row):
            return "done", None
        if la.rank(AmI) == 1:
            col = next(j for j in range(6) if any(AmI[i][j] for i in range(6)))
            b = self.normalize([AmI[i][col] for i in range(6)])
            nb = q(b, b)
            if nb and self.accept(b, nb):
                return "rank1", b
        S = _G_times(AmI)
        if _is_skew(S) or self.stuck(A):
            return "skew", (AmI, S)
        return "generic", (AmI, S)

    def _good(self, A2) -> bool:
        kind, _ = self._step_kind(A2)
        return kind != "skew"

    def run(self, A) -> list:
        factors = []
        while True:
            kind, data = self._step_kind(A)
            if kind == "done":
                return factors
            if len(factors) >= self.max_factors:
                raise SearchExhausted(f"no decomposition within {self.max_factors} factors")
            if kind == "rank1":
                factors.append(data)
                return factors
            AmI, S = data
            found = None
            if kind == "generic":
                for a in candidate_vectors(self.max_height, self.seed):
                    if not _quad_form(S, a):
                        continue
                    b = self.normalize(_mat_int_vec(AmI, a))
                    nb = q(b, b)
                    if not nb or not self.accept(b, nb):
                        continue
                    A2 = la.matmul(A, reflection_matrix(b))
                    if self._good(A2):
                        found = (b, A2)
                        break
            else:
                # escape: any admissible reflection that leaves a non-skew residue
                one = A[0][0] - A[0][0] + 1
                for c in candidate_vectors(self.max_height, self.seed):
                    c = self.normalize([one * x for x in c])
                    nc = q(c, c)
                    if not nc or not self.accept(c, nc):
                        continue
                    A2 = la.matmul(A, reflection_matrix(c))
                    if self._good(A2):
                        found = (c, A2)
                        break
            if found is None:
                raise SearchExhausted(f"no witness vector up to height {self.max_height}")
            factors.append(found[0])
            A = found[1]


def _rational_normalize(b) -> list:
    return [mpq(x) for x in primitive(b)]


def _check_isometry(A) -> list:
    A = la.rat_matrix(A)
    if not is_isometry(A):
        raise NotAnIsometry("input does not preserve the wedge pairing")
    return A


def _finish(raw, A) -> CDDecomposition:
    factors = tuple(Reflection.of(b) for b in raw)
    if not la.equal(compose(factors), A):
        raise InvariantViolation("decomposition does not recompose to its target")
    return CDDecomposition(factors, tuple(tuple(r) for r in A))


def cd_decompose(A, seed: int | None = None, max_height: int = DEFAULT_MAX_HEIGHT) -> CDDecomposition:
    """Write a rational isometry of Lambda as a product of at most 8 reflections."""
    A = _check_isometry(A)
    engine = _Engine(normalize=_rational_normalize, max_height=max_height, seed=seed, max_factors=MAX_FACTORS)
    return _finish(engine.run(A), A)


def _sym_vanishes_mod(A, ell: int) -> bool:
    AmI = la.sub(A, la.identity(6))
    S = _G_times(AmI)
    return all(ell_valuation(S[i][j] + S[j][i], ell) >= 1 for i in range(6) for j in range(i, 6))


def cd_decompose_prime_to_ell(
    A, ell: int, seed: int | None = None, max_height: int = DEFAULT_MAX_HEIGHT
) -> CDDecomposition:
    """Decomposition into reflections whose norms are l-adic units."""
    ell = int(ell)
    if ell == 2:
        raise EllIsTwo("prime-to-l decomposition needs l odd")
    A = _check_isometry(A)
    if not local_integrality(A, ell).unimodular:
        raise NotEllIntegral(f"input is not an isometry over Z_({ell})")

    def accept(b, nb):
        return ell_valuation(nb, ell) == 0

    def stuck(M):
        # no a with l not dividing a^T S a exists exactly when sym(S) = 0 mod l
        return _sym_vanishes_mod(M, ell)

    engine = _Engine(
        normalize=_rational_normalize,
        accept=accept,
        stuck=stuck,
        max_height=max_height,
        seed=seed,
        max_factors=MAX_FACTORS_PRIME_TO_ELL,
    )
    return _finish(engine.run(A), A)


def scherk_over_field(A, max_height: int = 4, max_factors: int = 12) -> list:
    """Reflection vectors (no normalization) for an isometry over a finite field.

    Entries must be field elements supporting ring arithmetic and truthiness.
    """
    engine = _Engine(normalize=list, max_height=max_height, seed=None, max_factors=max_factors)
    return engine.run(A)


def spinor_norm(g, seed: int | None = None) -> SquareClass:
    """Square class of the product of the factor norms, with SN(R_b) = [q(b,b)]."""
    return cd_decompose(g, seed=seed).spinor_norm


def decomposition_from_json(obj) -> list:
    return [Reflection.of([int(x) for x in b]) for b in obj["factors"]]


def norms_json(dec: CDDecomposition) -> list:
    return [rat_str(n) for n in dec.norms]
