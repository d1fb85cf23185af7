import json
import subprocess
import sys

import pytest
from conftest import anticommuting_crystal_pair, random_isometry, random_sl4
from gmpy2 import mpq

from wedgelat import linalg as la
from wedgelat.cli import COMMANDS, load_schema, main
from wedgelat.reflections import Reflection, compose
from wedgelat.serialize import matrix_to_json
from wedgelat.wedge import wedge_square

G_MINUS = compose([Reflection.of([1, 0, 0, 0, 0, 1]), Reflection.of([0, 1, 0, 0, 1, 0])])


def run(capsys, tmp_path, command, payload, *flags):
    path = tmp_path / "in.json"
    path.write_text(json.dumps(payload))
    code = main([command, str(path), *flags])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_every_command_has_a_schema():
    for command in COMMANDS:
        if command != "gram":
            assert load_schema(command)["$schema"].startswith("https://json-schema.org")


def test_gram(capsys):
    assert main(["gram"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["det"] == "-1" and len(out["gram"]) == 6


def test_lift_and_obstruction(capsys, tmp_path, rng):
    h = la.rat_matrix(random_sl4(rng))
    code, out, _ = run(capsys, tmp_path, "lift", {"g": matrix_to_json(wedge_square(h))})
    assert code == 0 and out["obstruction"] is None
    code, out, _ = run(capsys, tmp_path, "lift", matrix_to_json(G_MINUS))
    assert code == 2 and out["obstruction"] == "-1"


def test_decompose_prime_to(capsys, tmp_path, rng):
    A, _ = random_isometry(rng, ell=5)
    code, out, _ = run(capsys, tmp_path, "decompose", {"A": matrix_to_json(A)}, "--prime-to", "5")
    assert code == 0 and out["prime_to"] == 5
    assert all(int(n) % 5 for n in out["norms"])


def test_invalid_inputs(capsys, tmp_path):
    assert run(capsys, tmp_path, "lift", {"g": [[1, 2], [3, 4]]})[0] == 3
    not_iso = la.identity(6)
    not_iso[0][1] = 1
    assert run(capsys, tmp_path, "lift", matrix_to_json(not_iso))[0] == 3
    assert run(capsys, tmp_path, "twist", {"b": [1, 0, 0, 0, 0, 0]})[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["lift", "--no-such-flag"])
    assert exc.value.code == 3
    capsys.readouterr()


def test_search_bound_exit_code(capsys, tmp_path):
    A = compose([Reflection.of(b) for b in ([3, 1, 2, 0, 1, 1], [1, 3, 0, 2, 1, 2])])
    code, out, _ = run(capsys, tmp_path, "decompose", matrix_to_json(A), "--max-height", "0")
    assert code == 4 and out["error"] == "SearchExhausted"


def test_byte_stable(capsys, tmp_path, rng):
    A, _ = random_isometry(rng)
    payload = {"phi": matrix_to_json(A if la.det(A) == 1 else la.matmul(A, Reflection.of([1, 0, 0, 0, 0, 1]).matrix()))}
    first = run(capsys, tmp_path, "zigzag", payload, "--seed", "3")[2]
    second = run(capsys, tmp_path, "zigzag", payload, "--seed", "3")[2]
    assert first == second


def test_zigzag_certificate_verifies(capsys, tmp_path, rng):
    A, k = random_isometry(rng, ell=3)
    if k % 2:
        A = la.matmul(A, Reflection.of([1, 0, 0, 0, 0, 1]).matrix())
    code, cert, _ = run(capsys, tmp_path, "zigzag", {"phi": matrix_to_json(A)}, "--prime-to", "3", "--primes", "3,5")
    assert code == 0 and set(cert["prime_to"]) == {"3", "5"}
    code, report, _ = run(capsys, tmp_path, "verify", cert)
    assert code == 0 and report["ok"]
    cert["prime_to"]["3"] = not cert["prime_to"]["3"]
    code, report, _ = run(capsys, tmp_path, "verify", cert)
    assert code == 3 and not report["ok"]


def test_twist(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "twist", [1, 0, 0, 0, 0, 3])
    assert code == 0 and out["integral"] and out["n"] == "3" and out["B_order"] == 3


def test_isogeny(capsys, tmp_path):
    g0 = [[1, 1, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]]
    phi = la.scale(mpq(1, 2), wedge_square(la.rat_matrix(g0)))
    code, out, _ = run(capsys, tmp_path, "isogeny", matrix_to_json(phi))
    assert code == 0 and out["n"] == 2 and out["degree"] == 4 and out["g0"] == matrix_to_json(la.rat_matrix(g0))


def test_crystal_check_and_xi(capsys, tmp_path, rng):
    X, Y = anticommuting_crystal_pair(rng, 3, 2, 6)
    payload = {"X": X.to_json(), "Y": Y.to_json(), "rho": [[int(i == j) for j in range(4)] for i in range(4)]}
    code, out, _ = run(capsys, tmp_path, "crystal-check", payload, "--p", "3", "--s", "2", "--N", "6")
    assert code == 0 and out == {"verdict": "anticommutes", "precision": 6, "relation": "rho o F_X = -F_Y o rho"}
    code, out, _ = run(capsys, tmp_path, "xi-twist", payload)
    assert code == 0 and out["verdict"] == "commutes"
    code, out, _ = run(capsys, tmp_path, "crystal-check", payload, "--p", "5")
    assert code == 3 and out["error"] == "WittMismatch"
    phi_payload = {"X": payload["X"], "Y": payload["Y"], "phi": [[int(i == j) for j in range(6)] for i in range(6)]}
    code, out, _ = run(capsys, tmp_path, "crystal-check", phi_payload)
    assert code == 0 and out["phi_intertwines"] and out["precision"] == 6


def test_jobs_preserve_order(capsys, tmp_path, rng):
    h = la.rat_matrix(random_sl4(rng))
    batch = [matrix_to_json(wedge_square(h)), matrix_to_json(G_MINUS), [[1]]]
    code, out, _ = run(capsys, tmp_path, "lift", batch, "--jobs", "2")
    assert [r["exit_code"] for r in out] == [0, 2, 3]
    assert code == 3


def test_console_script_stdin(rng):
    h = la.rat_matrix(random_sl4(rng))
    payload = json.dumps({"h": matrix_to_json(h)})
    proc = subprocess.run(
        [sys.executable, "-m", "wedgelat", "wedge", "-"], input=payload, capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["wedge"] == matrix_to_json(wedge_square(h))
