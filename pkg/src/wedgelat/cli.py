"""Command-line front end: JSON in, JSON out, stable exit codes.

Exit codes: 0 success, 2 mathematical obstruction (the obstruction is still
printed as JSON), 3 invalid input, 4 resource bound, 5 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import jsonschema

from . import linalg as la
from .crystal import FCrystalH1, is_crystal_morphism, wedge_crystal_check, xi_twist
from .errors import InvalidInput, Obstruction, WedgeLatError, WittMismatch
from .lift import lift_so_to_sl, prime_to_ell_lift, principal_isogeny_data
from .mukai import (
    DEFAULT_PRIMES,
    certificate_from_json,
    reflexive_twisted_isometry,
    verify,
    zigzag_factorize,
)
from .reflections import DEFAULT_MAX_HEIGHT, cd_decompose, cd_decompose_prime_to_ell
from .scalars import WittRing
from .serialize import matrix_to_json, parse_matrix, parse_vector, parse_witt_matrix, scalar_to_json
from .wedge import gram_lambda, wedge_square

COMMANDS = (
    "gram",
    "wedge",
    "decompose",
    "spinor-norm",
    "lift",
    "isogeny",
    "twist",
    "zigzag",
    "crystal-check",
    "xi-twist",
    "verify",
)

# single-matrix payloads: a bare array, or an object under this key or "matrix"
_MATRIX_KEY = {
    "wedge": ("h", 4),
    "decompose": ("A", 6),
    "spinor-norm": ("g", 6),
    "lift": ("g", 6),
    "isogeny": ("phi", 6),
    "zigzag": ("phi", 6),
}


def load_schema(command: str) -> dict:
    text = resources.files("wedgelat").joinpath("schemas", f"{command}.json").read_text()
    return json.loads(text)


def _validate(command: str, payload) -> None:
    try:
        jsonschema.validate(payload, load_schema(command))
    except jsonschema.ValidationError as exc:
        raise InvalidInput(f"input does not match the {command} schema: {exc.message}") from None


def _matrix(payload, command):
    key, n = _MATRIX_KEY[command]
    obj = payload if isinstance(payload, list) else payload.get(key, payload.get("matrix"))
    return parse_matrix(obj, n, n)


def _ring(opts, payload) -> WittRing:
    desc = {}
    for name in ("X", "Y"):
        cr = payload[name]
        desc[name] = tuple(int(cr[k]) for k in ("p", "s", "N"))
    if desc["X"] != desc["Y"]:
        raise WittMismatch("X and Y have different Witt descriptors")
    p, s, N = desc["X"]
    for flag, value in (("p", p), ("s", s), ("N", N)):
        given = opts.get(flag)
        if given is not None and given != value:
            raise WittMismatch(f"--{flag} {given} disagrees with the input ({value})")
    return WittRing(p, s, N)


def _crystal(obj, ring) -> FCrystalH1:
    return FCrystalH1.of(ring, parse_witt_matrix(obj["C"], ring, 4, 4))


def run_command(command: str, payload, opts: dict) -> tuple[int, dict]:
    """Dispatch one job; returns (exit code, JSON-ready result)."""
    if command != "gram":
        _validate(command, payload)
    primes = opts.get("primes") or DEFAULT_PRIMES
    seed = opts.get("seed")
    height = DEFAULT_MAX_HEIGHT if opts.get("max_height") is None else opts["max_height"]

    if command == "gram":
        G = gram_lambda()
        return 0, {
            "gram": matrix_to_json(G),
            "det": scalar_to_json(la.det(G)),
            "basis": ["v12", "v13", "v14", "v23", "v24", "v34"],
        }

    if command == "wedge":
        h = _matrix(payload, command)
        W = wedge_square(h)
        return 0, {"wedge": matrix_to_json(W), "det_h": scalar_to_json(la.det(h))}

    if command == "decompose":
        A = _matrix(payload, command)
        ell = opts.get("prime_to")
        if ell is None:
            dec = cd_decompose(A, seed=seed, max_height=height)
        else:
            dec = cd_decompose_prime_to_ell(A, ell, seed=seed, max_height=height)
        out = dec.to_json()
        if ell is not None:
            out["prime_to"] = ell
        return 0, out

    if command == "spinor-norm":
        g = _matrix(payload, command)
        dec = cd_decompose(g, seed=seed, max_height=height)
        return 0, {"spinor_norm": str(dec.spinor_norm)}

    if command == "lift":
        g = _matrix(payload, command)
        ell = opts.get("prime_to")
        res = lift_so_to_sl(g, seed=seed) if ell is None else prime_to_ell_lift(g, ell)
        return (2 if res.obstruction is not None else 0), res.to_json()

    if command == "isogeny":
        data = principal_isogeny_data(_matrix(payload, command))
        return 0, data.to_json()

    if command == "twist":
        b = parse_vector(payload if isinstance(payload, list) else payload["b"], 6)
        t = reflexive_twisted_isometry(b)
        return 0, {
            "b": list(t.b),
            "n": scalar_to_json(t.n),
            "psi": matrix_to_json(t.psi),
            "B": t.B.to_json(),
            "B_order": t.B.order,
            "Bprime": t.Bprime.to_json(),
            "tilde_psi": matrix_to_json(t.tilde_psi),
            "change_of_basis": matrix_to_json(t.change_of_basis),
            "integral": t.integral,
            "brauer_order_bound": t.brauer_order_bound,
        }

    if command == "zigzag":
        cert = zigzag_factorize(_matrix(payload, command), prime_to=opts.get("prime_to"), seed=seed)
        return 0, cert.to_json(primes)

    if command == "verify":
        cert, flags = certificate_from_json(payload)
        report = verify(cert, flags or None)
        return (0 if report.ok else 3), report.to_json()

    if command == "crystal-check":
        ring = _ring(opts, payload)
        X, Y = _crystal(payload["X"], ring), _crystal(payload["Y"], ring)
        if "rho" in payload:
            rho = parse_witt_matrix(payload["rho"], ring, 4, 4)
            return 0, is_crystal_morphism(rho, X, Y).to_json()
        phi = parse_witt_matrix(payload["phi"], ring, 6, 6)
        rho, _, report = wedge_crystal_check(phi, X, Y)
        return 0, {**report.to_json(), "rho": matrix_to_json(rho)}

    if command == "xi-twist":
        ring = _ring(opts, payload)
        X, Y = _crystal(payload["X"], ring), _crystal(payload["Y"], ring)
        rho = parse_witt_matrix(payload["rho"], ring, 4, 4)
        twisted, xi, _, _, report = xi_twist(rho, X, Y)
        return 0, {**report.to_json(), "rho": matrix_to_json(twisted), "xi": xi.to_json()}

    raise InvalidInput(f"unknown command {command!r}")


def run_safely(command: str, payload, opts: dict) -> tuple[int, dict]:
    try:
        return run_command(command, payload, opts)
    except Obstruction as exc:
        cls = getattr(exc, "square_class", None)
        residue = getattr(exc, "residue_class", None)
        out = {"error": type(exc).__name__, "message": str(exc)}
        if cls is not None:
            out["obstruction"] = str(cls)
        if residue is not None:
            out["obstruction"] = list(residue)
        return exc.exit_code, out
    except WedgeLatError as exc:
        return exc.exit_code, {"error": type(exc).__name__, "message": str(exc)}
    except (KeyError, TypeError, ValueError) as exc:
        return InvalidInput.exit_code, {"error": "InvalidInput", "message": f"{type(exc).__name__}: {exc}"}


def _job(args):
    command, payload, opts = args
    return run_safely(command, payload, opts)


def _read_input(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read JSON input: {exc}") from None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input (3); argparse's default 2 means obstruction here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(InvalidInput.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wedgelat", description="Exact lattice toolkit for wedge-square lifting.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", nargs="?", default="-", help="JSON file, or - for standard input")
    parser.add_argument("--prime-to", type=int, dest="prime_to", help="work prime to this odd prime")
    parser.add_argument("--seed", type=int, help="tie-breaking seed for the vector search")
    parser.add_argument("--max-height", type=int, dest="max_height", help="sup-norm bound of the vector search")
    parser.add_argument(
        "--primes", type=lambda s: tuple(int(x) for x in s.split(",")), help="comma-separated primes for certificates"
    )
    parser.add_argument("--p", type=int, help="Witt prime")
    parser.add_argument("--s", type=int, help="Witt residue degree")
    parser.add_argument("--N", type=int, help="Witt precision")
    parser.add_argument("--jobs", type=int, help="input is a list of payloads; process with this many workers")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    opts = {
        "prime_to": args.prime_to,
        "seed": args.seed,
        "max_height": args.max_height,
        "primes": args.primes,
        "p": args.p,
        "s": args.s,
        "N": args.N,
    }
    try:
        payload = None if args.command == "gram" else _read_input(args.input)
    except InvalidInput as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_code
    if args.jobs:
        if not isinstance(payload, list):
            print("--jobs expects a JSON list of payloads", file=sys.stderr)
            return InvalidInput.exit_code
        work = [(args.command, item, opts) for item in payload]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_job, work))
        else:
            results = [_job(w) for w in work]
        print(dumps([{"exit_code": code, "result": out} for code, out in results]))
        return max((code for code, _ in results), default=0)
    code, out = run_safely(args.command, payload, opts)
    if "error" in out:
        print(f"{out['error']}: {out['message']}", file=sys.stderr)
    print(dumps(out))
    return code


if __name__ == "__main__":
    sys.exit(main())
