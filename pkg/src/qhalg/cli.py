"""Command-line interface: ``qhalg <command> ...``.

Exit status: 0 success (or quasi-hereditary), 1 verified negative outcome
(not quasi-hereditary, invalid input algebra, rejected certificate),
2 input or precondition error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import fixtures
from .algebra import (
    Algebra,
    InvalidAlgebra,
    corner,
    idempotent_ideal,
    peirce_dims,
    quotient,
    validate_algebra,
)
from .constructions import (
    BlockSpec,

    block_dim_formula,
    block_extension_chain,
    build_block_extension,
    build_morita_ring,
    build_triangular,
    check_fac_ring_iso,
    check_morita_hypotheses,
    morita_qh_chain,
    triangular_chain,
    validate_morita_context,
)
from .errors import QHAlgError
from .exactmath import field_from_descriptor
from .heredity import biprojective, decide_qh, is_heredity_ideal, verify_chain
from .heredity import check_layers
from .serialize import (
    FormatError,
    algebra_from_dict,
    block_spec_from_dict,
    certificate_from_dict,
    dumps,
    morita_from_dict,
    quiver_from_dict,
    read_json,
    write_text,
)


class UsageError(QHAlgError):
    pass


def _field(args):
    if args.field is None:
        return None
    text = args.field.strip()
    try:
        return field_from_descriptor(int(text) if text.isdigit() else text)
    except QHAlgError as exc:
        raise UsageError(f"bad --field: {exc}") from exc


def _emit(args, obj, path=None):
    text = dumps(obj)
    path = path if path is not None else getattr(args, "out", None)
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def _load_algebra(args, path=None) -> Algebra:
    d = read_json(path or args.input)
    return algebra_from_dict(d, _field(args))


def _workers(args) -> int:
    return max(1, getattr(args, "threads", 1) or 1)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    d = read_json(args.input)
    kind = d.get("type", "algebra") if isinstance(d, dict) else None
    F = _field(args)
    if kind == "morita_context":
        mc = morita_from_dict(d, F, os.path.dirname(args.input))
        rep = validate_morita_context(mc)
        _emit(args, {"type": "validation", "object": "morita_context", **rep.to_dict()})
        return 0 if rep.ok else 1
    if kind == "quiver":
        Q = quiver_from_dict(d, F)
        from .quiver import compile_bound_quiver

        A = compile_bound_quiver(Q)
        rep = validate_algebra(A, A.radical)
        _emit(args, {"type": "validation", "object": "quiver", "dim": A.dim, **rep.to_dict()})
        return 0 if rep.ok else 1
    if kind == "block_spec":
        spec = block_spec_from_dict(d, F, os.path.dirname(args.input))
        B, _ = build_block_extension(spec)
        _emit(args, {"type": "validation", "object": "block_spec", "dim": B.dim, "ok": True})
        return 0
    try:
        A = algebra_from_dict(d, F)
    except InvalidAlgebra as exc:
        _emit(args, {"type": "validation", "object": "algebra", **exc.report.to_dict()})
        return 1
    rep = validate_algebra(A, A.radical)
    _emit(args, {"type": "validation", "object": "algebra", "dim": A.dim, **rep.to_dict()})
    return 0


def _radical_payload(A: Algebra) -> dict:
    F = A.field
    return {
        "type": "radical",
        "algebra_hash": A.structure_hash,
        "dim": A.radical.dim,
        "basis": [[F.format(c) for c in v] for v in A.radical.basis],
        "basic": A.basic,
    }


def cmd_radical(args) -> int:
    _emit(args, _radical_payload(_load_algebra(args)))
    return 0


def cmd_qh(args) -> int:
    A = _load_algebra(args)
    if args.qh_command == "verify":
        cert = certificate_from_dict(read_json(args.certificate))
        # a certificate for another algebra is an input error, not a verdict
        ok = verify_chain(cert, A)
        problems = [] if ok else check_layers(A, cert.layers)
        _emit(args, {"type": "verification", "valid": ok, "problems": problems})
        return 0 if ok else 1
    res = decide_qh(A, _workers(args))
    if args.qh_command == "check":
        _emit(args, {
            "type": "verdict",
            "algebra_hash": A.structure_hash,
            "quasi_hereditary": res.quasi_hereditary,
        })
    else:
        _emit(args, res)
    return 0 if res.quasi_hereditary else 1


def _oracle(args, B: Algebra, summary: dict):
    bound = args.oracle_bound
    if bound is not None and B.dim <= bound:
        res = decide_qh(B, _workers(args))
        summary["oracle"] = {"quasi_hereditary": res.quasi_hereditary}


def _sizes(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --sizes {text!r}: expected comma-separated integers") from exc


def cmd_construct(args) -> int:
    F = _field(args)
    summary: dict = {"type": "construction", "kind": args.construct_command}
    cert = None
    if args.construct_command == "triangular":
        R = _load_algebra(args)
        B = build_triangular(R, args.size)
        summary["size"] = args.size
        base = decide_qh(R, _workers(args))
        if base.quasi_hereditary:
            cert = triangular_chain(R, base, args.size)
    elif args.construct_command == "morita":
        mc = morita_from_dict(read_json(args.input), F, os.path.dirname(args.input))
        rep = validate_morita_context(mc)
        if not rep.ok:
            _emit(args, {"type": "validation", "object": "morita_context", **rep.to_dict()})
            return 1
        B = build_morita_ring(mc)
        hyp = check_morita_hypotheses(mc, workers=_workers(args))
        summary["hypotheses"] = hyp.to_dict()
        if hyp.ok:
            cert = morita_qh_chain(mc, hyp.cert_quotient, hyp.cert_S, workers=_workers(args))
        else:
            summary["refusal"] = (
                "sufficient conditions fail; the ring may still be quasi-hereditary"
            )
    else:
        d = read_json(args.input)
        sizes = _sizes(args.sizes) if args.sizes else None
        if isinstance(d, dict) and d.get("type") == "block_spec":
            spec = block_spec_from_dict(d, F, os.path.dirname(args.input))
            if sizes is not None:
                spec = BlockSpec(spec.base, sizes)
        elif sizes is None:
            raise UsageError("--sizes is required when the input is an algebra or quiver")
        else:
            spec = BlockSpec(algebra_from_dict(d, F), sizes)
        B, _ = build_block_extension(spec)
        summary["sizes"] = list(spec.sizes)
        summary["dim_formula"] = block_dim_formula(spec)
        summary["factor_ring_iso"] = [check_fac_ring_iso(spec, i)[0] for i in range(spec.base.n)]
        base = decide_qh(spec.base, _workers(args))
        if base.quasi_hereditary:
            cert = block_extension_chain(spec, base, args.oracle_bound, _workers(args))
    summary["dim"] = B.dim
    summary["algebra_hash"] = B.structure_hash
    summary["certified"] = cert is not None
    _oracle(args, B, summary)
    if args.out:
        write_text(args.out, dumps(B))
    if args.cert_out and cert is not None:
        write_text(args.cert_out, dumps(cert))
    sys.stdout.write(dumps(summary))
    return 0


def example_report(workers: int = 1) -> dict:
    """The four documented properties of the three-cycle example."""
    A = fixtures.example_algebra()
    e = A.sub_sum([0, 2])
    I = idempotent_ideal(A, [0, 2])
    right, left = biprojective(A, e)
    Q, _ = quotient(A, I)
    C, _ = corner(A, e)
    res = decide_qh(A, workers)
    cq, cc = decide_qh(Q, workers), decide_qh(C, workers)
    return {
        "type": "example_report",
        "algebra_hash": A.structure_hash,
        "dim": A.dim,
        "idempotent": [A.class_names[i] for i in e.support],
        "ideal_dim": I.dim,
        "quasi_hereditary": res.quasi_hereditary,
        "ideal_right_projective": right,
        "ideal_left_projective": left,
        "quotient_quasi_hereditary": cq.quasi_hereditary,
        "corner_quasi_hereditary": cc.quasi_hereditary,
        "quotient_dim": Q.dim,
        "corner_dim": C.dim,
        "refusal": res.payload() if not res.quasi_hereditary else None,
    }


def cmd_example(args) -> int:
    rep = example_report(_workers(args))
    _emit(args, rep)
    expected = (
        not rep["quasi_hereditary"]
        and rep["ideal_right_projective"]
        and not rep["ideal_left_projective"]
        and rep["quotient_quasi_hereditary"]
        and rep["corner_quasi_hereditary"]
    )
    return 0 if expected else 1


def full_report(A: Algebra, workers: int = 1) -> dict:
    rep = validate_algebra(A, A.radical)
    res = decide_qh(A, workers)
    tests = []
    for i in range(A.n):
        flag, t = is_heredity_ideal(A, A.sub_sum([i]))
        tests.append({"class": A.class_names[i], "heredity": flag, "reason": t.reason})
    return {
        "type": "report",
        "algebra_hash": A.structure_hash,
        "dim": A.dim,
        "field": A.field.descriptor(),
        "validation": rep.to_dict(),
        "radical_dim": A.radical.dim,
        "peirce_dims": [list(r) for r in peirce_dims(A)],
        "projective_dims": list(A.projective_dims),
        "single_class_heredity": tests,
        "quasi_hereditary": res.quasi_hereditary,
        "result": res.payload(),
    }


def cmd_report(args) -> int:
    A = _load_algebra(args)
    rep = full_report(A, _workers(args))
    _emit(args, rep)
    return 0 if rep["quasi_hereditary"] else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="field override: QQ, a prime p, or GF(p)")
    common.add_argument("--oracle-bound", type=int, default=None,
                        help="cross-check constructions by exhaustive search up to this dimension")
    common.add_argument("--out", help="write the main artifact to this file instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="worker threads for the search")

    p = argparse.ArgumentParser(prog="qhalg", description="Quasi-hereditary algebra toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="validate an algebra, quiver, context or block spec")
    s.add_argument("input")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("radical", parents=[common], help="print the Jacobson radical")
    s.add_argument("input")
    s.set_defaults(func=cmd_radical)

    s = sub.add_parser("qh", help="quasi-heredity decisions and certificates")
    qsub = s.add_subparsers(dest="qh_command", required=True)
    for name, helptext in (("check", "verdict only"), ("certify", "emit a certificate or refusal")):
        q = qsub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("input")
        q.set_defaults(func=cmd_qh)
    q = qsub.add_parser("verify", parents=[common], help="re-check a certificate")
    q.add_argument("input", help="algebra or quiver file")
    q.add_argument("certificate")
    q.set_defaults(func=cmd_qh)

    s = sub.add_parser("construct", help="build Morita, triangular and block-extension algebras")
    csub = s.add_subparsers(dest="construct_command", required=True)
    c = csub.add_parser("triangular", parents=[common])
    c.add_argument("input")
    c.add_argument("--size", type=int, required=True)
    c.add_argument("--cert-out")
    c.set_defaults(func=cmd_construct)
    c = csub.add_parser("morita", parents=[common])
    c.add_argument("input", help="Morita context file")
    c.add_argument("--cert-out")
    c.set_defaults(func=cmd_construct)
    c = csub.add_parser("block-ext", parents=[common])
    c.add_argument("input", help="block spec file, or an algebra/quiver together with --sizes")
    c.add_argument("--sizes", help="comma-separated sizes overriding the spec")
    c.add_argument("--cert-out")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("example", aliases=["paper-example"], parents=[common],
                       help="three-cycle example and its properties")
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("report", parents=[common], help="full diagnostic bundle")
    s.add_argument("input")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) is not None and args.threads < 1:
        parser.error("--threads must be positive")
    try:
        return args.func(args)
    except (QHAlgError, FormatError) as exc:
        sys.stderr.write(dumps({"error": {"kind": type(exc).__name__, "message": str(exc)}}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
