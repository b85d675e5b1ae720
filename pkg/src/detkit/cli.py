"""Command line entry point: ``detkit <command> <file> [options]``.

Exit codes: 0 success, 1 hypotheses violated or verification failed,
2 usage or parse error, 3 resource cap exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Callable

from . import __version__
from .cotangent import (
    ModulePresentation,
    Presentation,
    annihilator,
    is_zero_module,
    t1,
    t1_truncated_dimension,
    t2,
    t2_truncated_dimension,
)
from .determinacy import DEFAULT_CAP, check_t1_support, determinacy_report, divisor_report, t1_annihilator
from .errors import DetkitError, HypothesisError, ParseError, VerificationError
from .groebner import membership_certificate
from .lifting import (
    Divisor,
    FamilyPair,
    LiftCertificate,
    check_certificate,
    emit_artin_system,
    formal_lift,
    psi_coherent,
    stage_agreement,
)
from .oracle import TruncationBox, truncated_iso_search, truncated_t1
from .problem import ProblemSpec, parse_problem
from .rings import Polynomial, Ring, parse_polynomial

COMMANDS = ("t1", "t2", "bound", "divisor-bound", "support", "lift", "verify", "oracle", "artin-system")
SCHEMA = 1


def _txt(p: Polynomial) -> str:
    return str(p)


def _module(mp: ModulePresentation) -> dict:
    return {
        "rank": mp.rank,
        "zero": is_zero_module(mp),
        "relations": [[_txt(c) for c in r] for r in mp.relations],
        "generators": None if mp.embedding is None else [[_txt(c) for c in e] for e in mp.embedding],
    }


def _options(spec: ProblemSpec, args) -> dict:
    return {
        "cap": args.cap if args.cap is not None else (spec.cap or DEFAULT_CAP),
        "order": args.order if args.order is not None else spec.order,
        "box": args.box if args.box is not None else spec.box,
    }


def _presentation(spec: ProblemSpec) -> Presentation:
    return Presentation(spec.ring(), tuple(spec.ideal_polys()))


def _pair(spec: ProblemSpec) -> FamilyPair:
    if spec.perturbed is None or spec.k is None:
        raise ParseError("this command needs 'perturbed' and 'k'")
    div = Divisor(*spec.divisor) if spec.divisor else None
    return FamilyPair(_presentation(spec), Presentation(spec.ring(), tuple(spec.perturbed_polys())), spec.k, div)


# ---------------------------------------------------------------------------
# commands; each returns (results, certificates)


def cmd_t1(spec, opts):
    pres = _presentation(spec)
    mp = t1(pres)
    res = {"module": _module(mp), "annihilator": [_txt(a) for a in annihilator(mp)]}
    if opts["box"]:
        L, d = opts["box"]
        res["truncated_dimension"] = t1_truncated_dimension(pres, L, d)
    return res, {}


def cmd_t2(spec, opts):
    pres = _presentation(spec)
    mp = t2(pres)
    res = {"module": _module(mp)}
    if opts["box"]:
        L, d = opts["box"]
        res["truncated_dimension"] = t2_truncated_dimension(pres, L, d)
    return res, {}


def _annihilation_certificate(elem: Polynomial, ann: list[Polynomial]) -> dict:
    coeffs = membership_certificate(elem, ann)
    return {
        "element": _txt(elem),
        "annihilator": [_txt(a) for a in ann],
        "coefficients": None if coeffs is None else [_txt(c) for c in coeffs],
    }


def cmd_bound(spec, opts):
    pres = _presentation(spec)
    rep = determinacy_report(pres, opts["cap"])
    ring = pres.ring
    ann = t1_annihilator(pres)
    certs = {"t_power": _annihilation_certificate(ring.t_power(rep.N1), ann)}
    return rep.as_dict(), certs


def cmd_divisor_bound(spec, opts):
    if spec.divisor is None:
        raise ParseError("divisor-bound needs a 'divisor' line")
    pres = _presentation(spec)
    rep = divisor_report(pres, spec.divisor[0], opts["cap"])
    ring = pres.ring
    elem = ring.t_power(rep.N) * ring.gen(rep.variable) ** rep.M
    certs = {"t_w_power": _annihilation_certificate(elem, t1_annihilator(pres))}
    return rep.as_dict(), certs


def cmd_support(spec, opts):
    pres = _presentation(spec)
    ring = pres.ring
    cutouts = [parse_polynomial(ring, c.strip()) for c in opts["cutouts"].split(",") if c.strip()]
    ok = check_t1_support(pres, cutouts)
    return {"cutouts": [_txt(c) for c in cutouts], "supported": ok}, {}


def _cert_json(cert: LiftCertificate) -> dict:
    return {
        "images": [_txt(p) for p in cert.images],
        "order": cert.order,
        "window": _txt(cert.window),
        "cofactors": [[_txt(c) for c in row] for row in cert.cofactors],
        "remainders": [_txt(q) for q in cert.remainders],
        "agreement_order": cert.agreement_order,
        "agreement_factor": _txt(cert.agreement_factor),
        "N": cert.N,
        "M": cert.M,
        "trace": [{"order": s.order, "theta": [_txt(p) for p in s.theta]} for s in cert.trace],
    }


def cmd_lift(spec, opts):
    pair = _pair(spec)
    L = opts["order"]
    if L is None:
        raise ParseError("lift needs a target order ('order:' or --order)")
    mp, cert = formal_lift(pair, L, cap=opts["cap"])
    res = {
        "images": [_txt(p) for p in mp.images],
        "order": mp.order,
        "N": cert.N,
        "M": cert.M,
        "agreement_order": cert.agreement_order,
        "stage_agreement": stage_agreement(cert, pair),
        "psi_coherent": psi_coherent(cert, pair),
    }
    return res, {"lift": _cert_json(cert)}


def cmd_artin(spec, opts):
    pair = _pair(spec)
    system = emit_artin_system(pair)
    return {
        "unknowns": list(system.unknowns),
        "variables": list(system.ring.names),
        "equations": [_txt(e) for e in system.equations],
    }, {}


def cmd_oracle(spec, opts):
    if not opts["box"]:
        raise ParseError("oracle needs a box ('box:' or --box)")
    L, d = opts["box"]
    box = TruncationBox(L, d)
    pres = _presentation(spec)
    fs = list(pres.generators)
    o = truncated_t1(fs, box) if fs else None
    res = {
        "box": [L, d],
        "t1_dimension": 0 if o is None else o.dimension,
        "conclusive": True if o is None else o.conclusive,
        "cotangent_t1_dimension": t1_truncated_dimension(pres, L, d),
    }
    if spec.perturbed is not None:
        h = truncated_iso_search(fs, spec.perturbed_polys(), spec.k, box)
        res["iso_search"] = None if h is None else [_txt(p) for p in h]
    return res, {}


def _load_certificate(ring: Ring, d: dict) -> LiftCertificate:
    P = lambda s: parse_polynomial(ring, s)  # noqa: E731
    return LiftCertificate(
        images=tuple(P(s) for s in d["images"]),
        order=int(d["order"]),
        window=P(d["window"]),
        cofactors=tuple(tuple(P(s) for s in row) for row in d["cofactors"]),
        remainders=tuple(P(s) for s in d["remainders"]),
        agreement_order=int(d["agreement_order"]),
        agreement_factor=P(d["agreement_factor"]),
        N=int(d["N"]),
        M=int(d["M"]),
    )


def cmd_verify(envelope: dict, opts):
    """Re-check a ``lift`` envelope by pure expansion."""
    try:
        spec = ProblemSpec.from_dict(envelope["inputs"])
        raw = envelope["certificates"]["lift"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"not a lift report: missing {exc}") from None
    pair = _pair(spec)
    cert = _load_certificate(spec.ring(), raw)
    check_certificate(cert, pair)
    return {"accepted": True, "order": cert.order, "equations": len(cert.cofactors)}, {}


HANDLERS: dict[str, Callable] = {
    "t1": cmd_t1,
    "t2": cmd_t2,
    "bound": cmd_bound,
    "divisor-bound": cmd_divisor_bound,
    "support": cmd_support,
    "lift": cmd_lift,
    "oracle": cmd_oracle,
    "artin-system": cmd_artin,
}


# ---------------------------------------------------------------------------
# envelopes


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def envelope(command: str, inputs: dict, results: dict | None, certificates: dict | None, error: dict | None = None) -> dict:
    body = {
        "command": command,
        "inputs": inputs,
        "results": results,
        "certificates": certificates,
        "error": error,
    }
    digest = hashlib.sha256(canonical_json(body).encode()).hexdigest()
    return dict(body, schema=SCHEMA, tool="detkit", version=__version__, run_hash=digest)


def run(command: str, spec: ProblemSpec, opts: dict) -> dict:
    """Run one command on a parsed problem and return the envelope."""
    if command not in HANDLERS:
        raise ParseError(f"unknown command {command!r}")
    results, certs = HANDLERS[command](spec, opts)
    return envelope(command, spec.as_dict(), results, certs)


def _box(text: str) -> tuple[int, int]:
    try:
        L, d = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("box must be 'L,d'") from None
    if L < 1 or d < 0:
        raise argparse.ArgumentTypeError("box needs L >= 1 and d >= 0")
    return L, d


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="detkit", description="Cotangent cohomology, determinacy bounds and certified lifts.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="problem file, a lift report for 'verify', or '-' for stdin")
    p.add_argument("--cap", type=_positive, default=None, help=f"search cap for bounds (default {DEFAULT_CAP})")
    p.add_argument("--order", type=_positive, default=None, help="target truncation order for lift")
    p.add_argument("--box", type=_box, default=None, help="truncation box L,d")
    p.add_argument("--cutouts", default="t", help="comma-separated cutout polynomials for support")
    p.add_argument("--out", default=None, help="write the JSON report to this file")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--version", action="version", version=f"detkit {__version__}")
    return p


def _summary(env: dict) -> str:
    if env.get("error"):
        return f"{env['command']}: {env['error']['type']}: {env['error']['message']}"
    lines = [f"{env['command']}:"]
    for key in sorted(env["results"] or {}):
        val = env["results"][key]
        if isinstance(val, dict):
            val = canonical_json(val)
        lines.append(f"  {key}: {val}")
    return "\n".join(lines)


def _emit(env: dict, args) -> None:
    text = json.dumps(env, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        print(_summary(env))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    except OSError as exc:
        print(f"detkit: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return 2
    command = args.command
    inputs: dict = {}
    try:
        if command == "verify":
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
            inputs = data.get("inputs", {}) if isinstance(data, dict) else {}
            results, certs = cmd_verify(data, {})
            env = envelope(command, inputs, results, certs)
        else:
            spec = parse_problem(text)
            inputs = spec.as_dict()
            opts = _options(spec, args)
            opts["cutouts"] = args.cutouts
            env = run(command, spec, opts)
    except DetkitError as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, HypothesisError):
            err["evidence"] = exc.evidence
        if isinstance(exc, VerificationError):
            err["index"] = exc.index
        if isinstance(exc, ParseError):
            err["line"], err["column"] = exc.line, exc.column
        env = envelope(command, inputs, None, None, err)
        print(f"detkit: {err['type']}: {exc}", file=sys.stderr)
        if args.json or args.out:
            _emit(env, args)
        return exc.exit_code
    _emit(env, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
