"""Shared random generators.  Every generator takes an explicit random.Random."""

from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from wedgelat import linalg as la
from wedgelat.crystal import SLOPES, FCrystalH1, _sigma
from wedgelat.reflections import Reflection, compose
from wedgelat.scalars import WittRing
from wedgelat.wedge import q


@pytest.fixture
def rng():
    return random.Random(20261016)


def random_sl4(rng, bound=3, steps=14):
    """Product of elementary row operations, kept inside the entry box."""
    M = la.identity(4)
    for _ in range(steps):
        i, j = rng.sample(range(4), 2)
        k = rng.choice((-1, 1))
        N = [r[:] for r in M]
        N[i] = [a + k * b for a, b in zip(M[i], M[j])]
        if max(abs(x) for r in N for x in r) <= bound:
            M = N
    # random row swap with a sign keeps det 1 and spreads entries
    if rng.random() < 0.5:
        i, j = rng.sample(range(4), 2)
        M[i], M[j] = M[j], [-x for x in M[i]]
    return M


def random_b(rng, bound=3, ell=None, max_norm=None):
    while True:
        b = [rng.randint(-bound, bound) for _ in range(6)]
        n = q(b, b)
        if not any(b) or n == 0:
            continue
        if ell is not None and n % ell == 0:
            continue
        if max_norm is not None and abs(n) > max_norm:
            continue
        return b


def random_isometry(rng, max_reflections=6, ell=None):
    k = rng.randint(0, max_reflections)
    bs = [random_b(rng, ell=ell) for _ in range(k)]
    return compose([Reflection.of(b) for b in bs]), k


def random_rational_b(rng, max_den=12, bound=3):
    return [mpq(rng.randint(-bound * max_den, bound * max_den), rng.randint(1, max_den)) for _ in range(6)]


def random_witt_unit_matrix(rng, ring, upper_right_divisible=False):
    """Random 4x4 matrix over the Witt ring with determinant 1."""
    while True:
        M = [[ring(*[rng.randrange(ring.modulus) for _ in range(ring.s)]) for _ in range(4)] for _ in range(4)]
        if upper_right_divisible:
            for i in range(2):
                for j in range(2, 4):
                    M[i][j] = M[i][j] * ring.p
        d = la.det(M)
        if d.is_unit():
            inv = d.inverse()
            for r in M:
                r[0] = r[0] * inv
            return M


def commuting_crystal_pair(rng, p, s, N):
    """(X, Y, rho) with rho a morphism of F-crystals X -> Y at precision N.

    Built one digit higher and truncated, since D^-1 costs one p.
    """
    big, ring = WittRing(p, s, N + 1), WittRing(p, s, N)
    CX = random_witt_unit_matrix(rng, big)
    rho = random_witt_unit_matrix(rng, big, upper_right_divisible=True)
    srho_inv = la.inverse(_sigma(rho))
    # D sigma(rho)^-1 D^-1, D = diag(p^slopes)
    M = [[None] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            x = srho_inv[i][j] * (p ** SLOPES[i])
            M[i][j] = x.divide_by_p() if SLOPES[j] else x.truncate(N)
    CXt = [[x.truncate(N) for x in r] for r in CX]
    rhot = [[x.truncate(N) for x in r] for r in rho]
    CY = la.matprod(rhot, CXt, M)
    return FCrystalH1.of(ring, CXt), FCrystalH1.of(ring, CY), rhot


def anticommuting_crystal_pair(rng, p, s, N):
    ring = WittRing(p, s, N)
    C = random_witt_unit_matrix(rng, ring)
    return FCrystalH1.of(ring, C), FCrystalH1.of(ring, la.neg(C))


# --- acceptance reporting ----------------------------------------------------------
# tests marked @pytest.mark.criterion(n, title) get one PASS/FAIL line in the summary

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        passed = report.passed
        detail = getattr(item, "criterion_detail", "")
        _CRITERIA[number] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
