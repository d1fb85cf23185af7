"""Dense exact linear algebra over duck-typed coefficient rings.

Matrices are lists of row lists.  Entries may be mpq, QuadScalar or
WittScalar; anything with ring arithmetic and truthiness works.  Pivoting
only ever divides by entries that are invertible in the ring (nonzero in
a field, a unit in W/p^N).
"""

from __future__ import annotations

from gmpy2 import mpq

from .errors import SingularInput


def _invertible(x) -> bool:
    is_unit = getattr(x, "is_unit", None)
    if is_unit is not None:
        return is_unit()
    return bool(x)


def identity(n: int, one=None) -> list:
    one = mpq(1) if one is None else one
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int, zero=None) -> list:
    zero = mpq(0) if zero is None else zero
    return [[zero] * cols for _ in range(rows)]


def rat_matrix(rows) -> list:
    from .scalars import rat

    return [[rat(x) for x in row] for row in rows]


def shape(A) -> tuple:
    return len(A), len(A[0]) if A else 0


def transpose(A) -> list:
    return [list(col) for col in zip(*A)]


def matmul(A, B) -> list:
    Bt = list(zip(*B))
    out = []
    for row in A:
        out_row = []
        for col in Bt:
            acc = row[0] * col[0]
            for k in range(1, len(row)):
                a = row[k]
                if a:
                    acc = acc + a * col[k]
            out_row.append(acc)
        out.append(out_row)
    return out


def matprod(*mats) -> list:
    out = mats[0]
    for m in mats[1:]:
        out = matmul(out, m)
    return out


def matvec(A, v) -> list:
    out = []
    for row in A:
        acc = row[0] * v[0]
        for k in range(1, len(row)):
            acc = acc + row[k] * v[k]
        out.append(acc)
    return out


def dot(u, v):
    acc = u[0] * v[0]
    for k in range(1, len(u)):
        acc = acc + u[k] * v[k]
    return acc


def scale(c, A) -> list:
    return [[c * x for x in row] for row in A]


def add(A, B) -> list:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(A, B) -> list:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def neg(A) -> list:
    return [[-x for x in row] for row in A]


def apply(f, A) -> list:
    return [[f(x) for x in row] for row in A]


def equal(A, B) -> bool:
    return all(x == y for ra, rb in zip(A, B) for x, y in zip(ra, rb))


def is_identity(A) -> bool:
    n = len(A)
    return all((A[i][j] == 1) if i == j else (not A[i][j]) for i in range(n) for j in range(n))


def outer(u, v) -> list:
    return [[x * y for y in v] for x in u]


def berkowitz_det(A):
    """Division-free determinant (Berkowitz); valid over any commutative ring."""
    n = len(A)
    one = A[0][0] - A[0][0] + 1
    # characteristic-polynomial vector of the leading 1x1 block
    poly = [one, -A[0][0]]
    for r in range(1, n):
        R = [A[r][j] for j in range(r)]
        C = [A[i][r] for i in range(r)]
        Asub = [row[:r] for row in A[:r]]
        # Toeplitz column: 1, -a_rr, -R C, -R A C, ...
        col = [one, -A[r][r]]
        vec = C
        for _ in range(r):
            col.append(-dot(R, vec))
            vec = matvec(Asub, vec)
        new = []
        for i in range(r + 2):
            acc = one - one
            for j in range(min(i, r) + 1):
                acc = acc + col[i - j] * poly[j]
            new.append(acc)
        poly = new
    det = poly[-1]
    return det if n % 2 == 0 else -det


def det(A):
    """Determinant by elimination; falls back to Berkowitz when no pivot is a unit."""
    n = len(A)
    M = [list(row) for row in A]
    sign = 1
    result = None
    for c in range(n):
        piv = next((r for r in range(c, n) if _invertible(M[r][c])), None)
        if piv is None:
            if all(not M[r][c] for r in range(c, n)):
                return M[0][0] - M[0][0]
            return berkowitz_det(A)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        p = M[c][c]
        result = p if result is None else result * p
        inv = 1 / p
        for r in range(c + 1, n):
            f = M[r][c]
            if f:
                f = f * inv
                row_c = M[c]
                M[r] = [x - f * y for x, y in zip(M[r], row_c)]
    return result if sign == 1 else -result


def rank(A) -> int:
    """Rank over a field."""
    M = [list(row) for row in A]
    rows, cols = len(M), len(M[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        for i in range(r + 1, rows):
            f = M[i][c]
            if f:
                f = f * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        r += 1
        if r == rows:
            break
    return r


def inverse(A) -> list:
    """Gauss-Jordan inverse; raises SingularInput when no invertible pivot exists."""
    n = len(A)
    one = A[0][0] - A[0][0] + 1
    zero = one - one
    M = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if _invertible(M[r][c])), None)
        if piv is None:
            raise SingularInput("matrix is not invertible")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c:
                f = M[r][c]
                if f:
                    M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def solve(A, b) -> list:
    """One solution x of A x = b over a field; raises SingularInput if inconsistent."""
    rows, cols = len(A), len(A[0])
    M = [list(A[i]) + [b[i]] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    zero = b[0] - b[0]
    for i in range(r, rows):
        if M[i][cols]:
            raise SingularInput("inconsistent linear system")
    x = [zero] * cols
    for i, c in enumerate(pivots):
        x[c] = M[i][cols]
    return x


def first_nonzero(A):
    for row in A:
        for x in row:
            if x:
                return x
    return None
