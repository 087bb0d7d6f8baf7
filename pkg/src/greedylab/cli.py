"""Command-line front end: analyze, renorm, verify, sequence."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import metrics
from .metrics import CapExceeded, constants_report
from .renorm import (AlmostGreedyRenorm, InvalidConstants, MainRenorm, RenormConstants, pipeline_renorm)
from .seqlab import PosSequence, SequenceError, check_regularity, dini_regularize, load_sequence
from .spaces import DescriptorError, load_space
from .verify import run_suites

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP, EXIT_SIGMA = 0, 1, 2, 3, 4


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _json_arg(text, what):
    if text is None:
        return {}
    try:
        val = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"bad {what} JSON: {exc}") from exc
    if not isinstance(val, dict):
        raise DescriptorError(f"{what} must be a JSON object")
    return val


def cmd_analyze(args) -> int:
    space = load_space(args.space)
    caps = _json_arg(args.caps, "--caps")
    report = constants_report(space, seed=args.seed, samples=int(caps.get("samples", 400)),
                              cap=int(caps.get("enum", metrics.ENUM_CAP)), slc_size=int(caps.get("slc_size", 3)))
    out = {"schema_version": SCHEMA_VERSION, "space": space.descriptor(), "seed": args.seed,
           "constants": report.to_json()}
    write_atomic(os.path.join(args.out, "constants.json"), dump_json(out))
    write_atomic(os.path.join(args.out, "constants.csv"), report.to_csv())
    write_atomic(os.path.join(args.out, "profile.csv"), report.profile.to_csv())
    lines = [f"{k}: {v.value:.6g} ({v.mode})" for k, v in report.entries.items() if not isinstance(v, list)]
    write_atomic(os.path.join(args.out, "summary.txt"), "\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def _eval_vectors(args, dim, rng):
    if args.vectors:
        with open(args.vectors) as fh:
            vecs = np.array(json.load(fh), dtype=float)
        if vecs.ndim != 2 or vecs.shape[1] != dim:
            raise DescriptorError(f"vectors must be a list of length-{dim} lists")
        return vecs
    grid = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    return np.vstack([np.eye(dim), grid[rng.integers(0, 5, size=(16, dim))]])


def cmd_renorm(args) -> int:
    space = load_space(args.space)
    sigma = None
    if args.sigma:
        sigma = load_sequence(args.sigma)
    elif args.sigma_policy != "dini":
        raise DescriptorError("give --sigma PATH or --sigma-policy dini")
    policy = "given" if sigma is not None else "dini"
    res = pipeline_renorm(space, sigma, policy, kind=args.kind, eps_target=args.eps, seed=args.seed)
    model, consts = res.model, res.constants
    if args.delta is not None:
        if args.kind != "almost-greedy":
            raise DescriptorError("--delta only applies to --kind almost-greedy")
        d = consts.to_json()
        d["delta"] = args.delta
        d["provenance"]["delta"] = "user-supplied"
        consts = RenormConstants.from_json(d)
        model = AlmostGreedyRenorm(res.lattice, res.sigma, consts, args.eps)
    write_atomic(os.path.join(args.out, "renormed.json"),
                 dump_json(dict(model.descriptor(), schema_version=SCHEMA_VERSION)))
    write_atomic(os.path.join(args.out, "renorm_constants.json"),
                 dump_json({"schema_version": SCHEMA_VERSION, "constants": consts.to_json(),
                            "sigma": res.sigma.to_json(), "kind": args.kind,
                            "lattice_step": "identity" if res.lattice is space else "sign-pattern maximum"}))
    rng = np.random.default_rng(args.seed)
    vecs = _eval_vectors(args, model.dim, rng)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "vector", "base_norm", "renormed_norm"])
    for i, v in enumerate(vecs):
        w.writerow([i, " ".join(repr(float(x)) for x in v), repr(space.norm(v)), repr(model.norm(v))])
    write_atomic(os.path.join(args.out, "eval.csv"), buf.getvalue())
    print(f"renormed model written to {os.path.join(args.out, 'renormed.json')}")
    return EXIT_OK


def cmd_verify(args) -> int:
    space = load_space(args.space)
    checks = run_suites(space, seed=args.seed, tol=_json_arg(args.tol, "--tol"))
    ok = all(c.passed for c in checks)
    out = {"schema_version": SCHEMA_VERSION, "space": space.descriptor(), "seed": args.seed,
           "passed": ok, "checks": [c.to_json() for c in checks]}
    write_atomic(os.path.join(args.out, "verify.json"), dump_json(out))
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  value={c.value:.3g} tol={c.tolerance:.1g}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sequence(args) -> int:
    seq = load_sequence(args.sigma)
    rep = check_regularity(seq, r_max=args.r_max)
    out = {"schema_version": SCHEMA_VERSION, "sequence": seq.to_json(), "regularity": rep.to_json()}
    if args.dini:
        reg = dini_regularize(seq)
        out["dini_regularization"] = reg.to_json()
        write_atomic(os.path.join(args.out, "dini.csv"), reg.to_csv())
    write_atomic(os.path.join(args.out, "sequence.csv"), seq.to_csv())
    write_atomic(os.path.join(args.out, "regularity.json"), dump_json(out))
    print(dump_json(rep.to_json()), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="greedylab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, space=True):
        if space:
            sp.add_argument("--space", required=True, help="space descriptor JSON")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--caps", help="JSON object: enum, samples, slc_size")
        sp.add_argument("--tol", help="JSON object of tolerance overrides")

    a = sub.add_parser("analyze", help="fundamental profile and greedy-type constants")
    common(a)
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("renorm", help="lattice renorm followed by the main or almost-greedy renorm")
    common(r)
    r.add_argument("--sigma", help="sequence JSON")
    r.add_argument("--sigma-policy", choices=["given", "dini"], default="given")
    r.add_argument("--kind", choices=["main", "almost-greedy"], default="main")
    r.add_argument("--delta", type=float)
    r.add_argument("--eps", type=float)
    r.add_argument("--vectors", help="JSON list of vectors to evaluate")
    r.set_defaults(func=cmd_renorm)

    v = sub.add_parser("verify", help="run the invariant suites for a model")
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sequence", help="regularity report for a sequence")
    common(s, space=False)
    s.add_argument("--sigma", required=True)
    s.add_argument("--r-max", type=int, default=8)
    s.add_argument("--dini", action="store_true", help="also write the Dini regularization")
    s.set_defaults(func=cmd_sequence)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SequenceError as exc:
        print(f"invalid sequence: {exc}", file=sys.stderr)
        return EXIT_SIGMA
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (DescriptorError, InvalidConstants, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
