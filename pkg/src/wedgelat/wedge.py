"""The wedge lattice Lambda = wedge^2 Z^4 and the wedge-square map.

Basis order is (v12, v13, v14, v23, v24, v34) with v_ij = v_i ^ v_j, and
the trace is normalized by tr(e1 ^ e2 ^ e3 ^ e4) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from . import _kernels
from . import linalg as la
from .errors import InvalidInput, NotAdmissible, SingularInput

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_INDEX = {pair: idx for idx, pair in enumerate(PAIRS)}
BASIS_LABELS = ("v12", "v13", "v14", "v23", "v24", "v34")

_GRAM_ANTIDIAGONAL = (1, -1, 1, 1, -1, 1)


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
            elif seq[i] == seq[j]:
                return 0
    return sign


def levi_civita(i: int, j: int, k: int, l: int) -> int:
    return _perm_sign((i, j, k, l))


def gram_lambda() -> list:
    """Gram matrix of the wedge pairing q."""
    G = la.zeros(6, 6)
    for a in range(6):
        G[a][5 - a] = mpq(_GRAM_ANTIDIAGONAL[a])
    return G


def gram_int() -> np.ndarray:
    G = np.zeros((6, 6), dtype=np.int64)
    for a in range(6):
        G[a, 5 - a] = _GRAM_ANTIDIAGONAL[a]
    return G


def q(x, y):
    """The wedge pairing of two coordinate vectors."""
    return x[0] * y[5] - x[1] * y[4] + x[2] * y[3] + x[3] * y[2] - x[4] * y[1] + x[5] * y[0]


def wedge_square(h) -> list:
    """Matrix of wedge^2 h on the ordered basis (exact, any coefficient ring)."""
    if len(h) != 4 or any(len(row) != 4 for row in h):
        raise InvalidInput("wedge_square expects a 4x4 matrix")
    out = []
    for k, l in PAIRS:
        hk, hl = h[k], h[l]
        out.append([hk[i] * hl[j] - hl[i] * hk[j] for i, j in PAIRS])
    return out


def wedge_square_int(h) -> np.ndarray:
    """Fast path for integer matrices (batched over leading axes)."""
    return _kernels.wedge_square_batch(np.asarray(h, dtype=np.int64))


def poincare_duality() -> list:
    """v12 -> v34*, v13 -> -v24*, v14 -> v23*, v23 -> v14*, v24 -> -v13*, v34 -> v12*.

    Identifying the dual basis through the wedge pairing, this is the Gram matrix.
    """
    D = la.zeros(6, 6)
    images = (5, 4, 3, 2, 1, 0)
    signs = (1, -1, 1, 1, -1, 1)
    for col, (row, sign) in enumerate(zip(images, signs)):
        D[row][col] = mpq(sign)
    return D


def is_isometry(phi) -> bool:
    if len(phi) != 6 or any(len(row) != 6 for row in phi):
        return False
    # phi^T G phi: G only swaps and signs rows, so build G phi directly
    Gphi = [[_GRAM_ANTIDIAGONAL[a] * x for x in phi[5 - a]] for a in range(6)]
    prod = la.matmul(la.transpose(phi), Gphi)
    for a in range(6):
        for b in range(6):
            want = _GRAM_ANTIDIAGONAL[a] if b == 5 - a else 0
            if prod[a][b] != want:
                return False
    return True


def admissibility_degree(phi):
    """det(phi) in the standard (admissible) coordinates; 1 means admissible."""
    d = la.det(phi)
    if not d:
        raise SingularInput("isometry candidate is singular")
    return d


def require_admissible(phi) -> None:
    d = admissibility_degree(phi)
    if d != 1:
        raise NotAdmissible(f"determinant is {d}; pre-compose with poincare_duality()")


@dataclass(frozen=True)
class AdmissibleBasis:
    """A basis of V (as matrix columns) with tr(b1 ^ b2 ^ b3 ^ b4) = degree."""

    basis_matrix: tuple

    @classmethod
    def from_matrix(cls, M) -> AdmissibleBasis:
        M = la.rat_matrix(M)
        if len(M) != 4 or any(len(r) != 4 for r in M):
            raise InvalidInput("a basis of V is a 4x4 matrix")
        if not la.det(M):
            raise SingularInput("basis vectors are linearly dependent")
        return cls(tuple(tuple(r) for r in M))

    @property
    def degree(self):
        return la.det([list(r) for r in self.basis_matrix])

    @property
    def is_admissible(self) -> bool:
        return self.degree == 1

    def wedge_basis(self) -> list:
        """Columns are b_i ^ b_j in the ordered wedge basis."""
        return wedge_square([list(r) for r in self.basis_matrix])
