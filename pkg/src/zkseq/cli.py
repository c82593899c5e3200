"""Command-line client for the service.

Commands run against an in-process application instance by default, or
against a remote service with --server URL.  Exit codes: 0 success,
1 usage error, 2 construction failed, 3 verification failed.

Machine output goes to --out when given (JSON, or CSV for census/mc);
stdout then carries a one-line summary.  Without --out the JSON result is
printed to stdout.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONSTRUCTION = 2
EXIT_VERIFY = 3

_TEST_CLIENT = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class Client:
    """Thin POST/GET wrapper over the in-process app or a remote server."""

    def __init__(self, server: str | None = None):
        self.server = server.rstrip("/") if server else None

    def _local(self):
        global _TEST_CLIENT
        if _TEST_CLIENT is None:
            import warnings
            with warnings.catch_warnings():
                # starlette 1.3 warns about its own httpx-1 test client
                warnings.simplefilter("ignore")
                from starlette.testclient import TestClient
            from .service.app import app
            _TEST_CLIENT = TestClient(app)
        return _TEST_CLIENT

    def post(self, path: str, payload: dict):
        if self.server is None:
            r = self._local().post(path, json=payload)
        else:
            import httpx
            try:
                r = httpx.post(self.server + path, json=payload, timeout=600.0)
            except httpx.HTTPError as exc:
                print(f"could not reach server: {exc}", file=sys.stderr)
                raise SystemExit(EXIT_USAGE)
        try:
            body = r.json()
        except ValueError:
            body = {"detail": r.text}
        return r.status_code, body


def _parse_elements(text: str) -> list:
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok != ""]
    except ValueError:
        raise SystemExit(EXIT_USAGE)


def _load_set(args, parser) -> tuple:
    """(k, elements) from --set FILE or --modulus + --elements."""
    if getattr(args, "set", None):
        try:
            with open(args.set) as fh:
                data = json.load(fh)
            k, elements = int(data["k"]), [int(x) for x in data["elements"]]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"could not read set file: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        if args.modulus is not None and args.modulus != k:
            parser.error(f"--modulus {args.modulus} contradicts set file k={k}")
        return k, elements
    if args.modulus is None or getattr(args, "elements", None) is None:
        parser.error("need --set FILE or both --modulus and --elements")
    return args.modulus, _parse_elements(args.elements)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SEQ_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            print(f"ignoring non-integer SEQ_SEED={env!r}", file=sys.stderr)
    return 0


def _emit(payload: dict, out: str | None, summary: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        print(summary)
    else:
        print(text)


def _usage_from(code: int, body: dict) -> int:
    detail = body.get("detail", body)
    print(f"request rejected ({code}): {detail}", file=sys.stderr)
    return EXIT_USAGE


def cmd_sequence(args, parser) -> int:
    k, elements = _load_set(args, parser)
    if args.mode == "tweak" and args.t is None:
        parser.error("--mode tweak needs --t")
    payload = {"k": k, "elements": elements, "mode": args.mode, "t": args.t,
               "seed": _seed(args), "c1": args.c1, "c2": args.c2,
               "max_retries": args.max_retries}
    if args.max_resamples is not None:
        payload["max_resamples"] = args.max_resamples
    if args.K is not None:
        payload["K"] = args.K
    if args.R is not None:
        payload["R"] = args.R
    if args.no_oracle_fallback:
        payload["oracle_fallback"] = False
    code, body = Client(args.server).post("/sequence", payload)
    if code != 200:
        return _usage_from(code, body)
    if body.get("status") != "ok":
        print(f"construction failed: {body.get('reason')} "
              f"flags={body.get('flags')}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    result = body["result"]
    summary = (f"ordered {len(result['ordering'])} elements of Z_{k} "
               f"(mode={result['mode']}, resamples={result['resamples']}, "
               f"flags={result['flags']})")
    _emit(result, args.out, summary)
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    try:
        with open(args.ordering) as fh:
            data = json.load(fh)
        k = int(data["k"])
        ordering = [int(x) for x in data["ordering"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"could not read ordering file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    goal = args.goal
    if args.t is not None and args.goal == "sequencing":
        goal = "tweak"
    payload = {"k": k, "ordering": ordering, "goal": goal, "t": args.t}
    code, body = Client(args.server).post("/verify", payload)
    if code != 200:
        return _usage_from(code, body)
    if body["ok"]:
        summary = f"ok: {goal} of {body['n']} elements in Z_{k}"
        _emit(body, args.out, summary)
        return EXIT_OK
    print(f"verification failed: {json.dumps(body['witness'])}", file=sys.stderr)
    _emit(body, args.out, "verification failed")
    return EXIT_VERIFY


def cmd_dissociate(args, parser) -> int:
    k, elements = _load_set(args, parser)
    payload = {"k": k, "elements": elements, "dimension": args.dimension,
               "greedy": args.greedy, "target_size": args.target_size}
    code, body = Client(args.server).post("/tools/dissociate", payload)
    if code != 200:
        return _usage_from(code, body)
    _emit(body, args.out, f"dissociated={body['dissociated']}")
    return EXIT_OK


def cmd_rectify(args, parser) -> int:
    k, elements = _load_set(args, parser)
    payload = {"k": k, "elements": elements, "target": args.target}
    code, body = Client(args.server).post("/tools/rectify", payload)
    if code != 200:
        return _usage_from(code, body)
    _emit(body, args.out,
          f"lambda={body['lam']} max_abs={body['max_abs']} method={body['method']}")
    return EXIT_OK


def cmd_decompose(args, parser) -> int:
    k, elements = _load_set(args, parser)
    payload = {"k": k, "elements": elements, "seed": _seed(args),
               "c1": args.c1, "tolerance": args.tolerance,
               "retries": args.retries, "mode": args.pipeline_mode}
    if args.R is not None:
        payload["R"] = args.R
    code, body = Client(args.server).post("/tools/decompose", payload)
    if code != 200:
        return _usage_from(code, body)
    if body.get("status") != "ok":
        print(f"decomposition failed: {body.get('failed')}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    d = body["decomposition"]
    _emit(body, args.out,
          f"decomposed: s={len(d['blocks'])} |P|={len(d['P'])} |N|={len(d['N'])} "
          f"lambda={d['lambda']} warnings={body['warnings']}")
    return EXIT_OK


def cmd_oracle(args, parser) -> int:
    if args.max_size is not None:
        return cmd_census(args, parser)
    k, elements = _load_set(args, parser)
    payload = {"k": k, "elements": elements, "goal": args.goal, "t": args.t}
    code, body = Client(args.server).post("/tools/oracle", payload)
    if code != 200:
        return _usage_from(code, body)
    _emit(body, args.out, f"achievable={body['achievable']}")
    return EXIT_OK


def cmd_census(args, parser) -> int:
    if args.modulus is None or args.max_size is None:
        parser.error("census needs --modulus and --max-size")
    payload = {"k": args.modulus, "max_size": args.max_size,
               "goal": args.goal, "t": args.t}
    code, body = Client(args.server).post("/tools/census", payload)
    if code != 200:
        return _usage_from(code, body)
    summary = (f"census of Z_{args.modulus} up to size {args.max_size}: "
               f"{body['failures']} failures, goal {body['goal']}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=body["columns"])
            w.writeheader()
            for row in body["rows"]:
                w.writerow(row)
        print(summary)
    else:
        print(json.dumps(body, indent=2, sort_keys=True))
    return EXIT_OK


def _emit_report(body: dict, out: str | None) -> int:
    report = body["report"]
    rows = []
    for name, est in report["estimates"].items():
        label = report["experiment"] if len(report["estimates"]) == 1 \
            else f"{report['experiment']}:{name}"
        bound = report["bounds"].get(name)
        rows.append({"experiment": label, "seed": report["seed"],
                     "trials": report["trials"], "estimate": est["estimate"],
                     "stderr": est["stderr"],
                     "bound": "" if bound is None else bound,
                     "verdict": report["verdicts"].get(name, "info")})
    summary = "; ".join(f"{r['experiment']}: {r['estimate']:.6g} [{r['verdict']}]"
                        for r in rows)
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["experiment", "seed", "trials",
                                               "estimate", "stderr", "bound",
                                               "verdict"])
            w.writeheader()
            for row in rows:
                w.writerow(row)
        print(summary)
    else:
        print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_mc(args, parser) -> int:
    client = Client(args.server)
    sub = args.mc_command
    if sub == "anticoncentration":
        k, elements = _load_set(args, parser)
        payload = {"k": k, "elements": elements,
                   "I": [int(x) for x in _parse_elements(args.I)],
                   "x": args.x, "trials": args.trials, "seed": _seed(args)}
        code, body = client.post("/tools/mc/anticoncentration", payload)
    elif sub == "acceptability":
        k, elements = _load_set(args, parser)
        payload = {"k": k, "elements": elements, "trials": args.trials,
                   "seed": _seed(args), "K": args.K, "R": args.R}
        code, body = client.post("/tools/mc/acceptability", payload)
    elif sub == "permissible-density":
        if args.modulus is None:
            parser.error("permissible-density needs --modulus")
        payload = {"k": args.modulus, "left": _parse_elements(args.left),
                   "right": _parse_elements(args.right), "K": args.K,
                   "trials": args.trials, "seed": _seed(args)}
        code, body = client.post("/tools/mc/permissible-density", payload)
    elif sub == "lll-budget":
        payload = {"p_hat": args.p_hat, "seed": _seed(args)}
        if args.degree is not None:
            payload["degree"] = args.degree
        else:
            if args.modulus is None or args.elements is None or args.t is None:
                parser.error("lll-budget needs --degree, or --modulus/--elements/--t")
            payload.update({"k": args.modulus,
                            "elements": _parse_elements(args.elements),
                            "t": args.t, "R": args.R, "K": args.K})
        code, body = client.post("/tools/mc/lll-budget", payload)
    elif sub == "union-bound":
        payload = {"a_size": args.a_size, "R": args.R, "type_i": args.type_i,
                   "type_ii": args.type_ii, "seed": _seed(args)}
        code, body = client.post("/tools/mc/union-bound", payload)
    else:
        parser.error(f"unknown mc subcommand {sub!r}")
        return EXIT_USAGE
    if code != 200:
        return _usage_from(code, body)
    return _emit_report(body, args.out)


def _add_set_flags(p, with_set=True):
    p.add_argument("--modulus", type=int, default=None, help="k of Z_k")
    p.add_argument("--elements", type=str, default=None,
                   help="comma-separated residues")
    if with_set:
        p.add_argument("--set", type=str, default=None,
                       help="JSON file with {k, elements}")


def _add_common(p):
    p.add_argument("--seed", type=int, default=None,
                   help="seed (default: SEQ_SEED env, else 0)")
    p.add_argument("--out", type=str, default=None, help="output file")
    p.add_argument("--server", type=str, default=None,
                   help="remote service URL (default: in-process)")


def build_parser() -> _Parser:
    parser = _Parser(prog="zkseq",
                     description="construct and verify sequencings of subsets of Z_k")
    subs = parser.add_subparsers(dest="command", required=True)

    ps = subs.add_parser("sequence", help="construct an ordering")
    _add_set_flags(ps)
    ps.add_argument("--mode", choices=["auto", "classical", "tweak"], default="auto")
    ps.add_argument("--t", type=int, default=None)
    ps.add_argument("--c1", type=float, default=1.0)
    ps.add_argument("--c2", type=float, default=1.0)
    ps.add_argument("--K", type=int, default=None)
    ps.add_argument("--R", type=int, default=None)
    ps.add_argument("--max-resamples", type=int, default=None, dest="max_resamples")
    ps.add_argument("--max-retries", type=int, default=1000, dest="max_retries")
    ps.add_argument("--no-oracle-fallback", action="store_true",
                    dest="no_oracle_fallback")
    _add_common(ps)
    ps.set_defaults(func=cmd_sequence)

    pv = subs.add_parser("verify", help="verify an ordering file")
    pv.add_argument("--ordering", type=str, required=True,
                    help="JSON file with {k, ordering}")
    pv.add_argument("--goal", choices=["valid", "sequencing", "tweak"],
                    default="sequencing")
    pv.add_argument("--t", type=int, default=None)
    _add_common(pv)
    pv.set_defaults(func=cmd_verify)

    pt = subs.add_parser("tools", help="library tools")
    tsubs = pt.add_subparsers(dest="tool", required=True)

    td = tsubs.add_parser("dissociate", help="dissociation checks")
    _add_set_flags(td)
    td.add_argument("--dimension", action="store_true")
    td.add_argument("--greedy", action="store_true")
    td.add_argument("--target-size", type=int, default=None, dest="target_size")
    _add_common(td)
    td.set_defaults(func=cmd_dissociate)

    tr = tsubs.add_parser("rectify", help="find a rectifying dilation")
    _add_set_flags(tr)
    tr.add_argument("--target", type=float, default=None)
    _add_common(tr)
    tr.set_defaults(func=cmd_rectify)

    tc = tsubs.add_parser("decompose", help="structure decomposition")
    _add_set_flags(tc)
    tc.add_argument("--R", type=int, default=None)
    tc.add_argument("--c1", type=float, default=1.0)
    tc.add_argument("--tolerance", type=float, default=2.0)
    tc.add_argument("--retries", type=int, default=64)
    tc.add_argument("--pipeline-mode", choices=["classical", "tweak"],
                    default="tweak", dest="pipeline_mode")
    _add_common(tc)
    tc.set_defaults(func=cmd_decompose)

    to = tsubs.add_parser("oracle", help="brute-force search")
    _add_set_flags(to)
    to.add_argument("--goal", choices=["valid", "sequencing", "tweak"],
                    default="sequencing")
    to.add_argument("--t", type=int, default=None)
    to.add_argument("--max-size", type=int, default=None, dest="max_size",
                    help="census all subsets up to this size instead")
    _add_common(to)
    to.set_defaults(func=cmd_oracle)

    tn = tsubs.add_parser("census", help="achievability census over all subsets")
    tn.add_argument("--modulus", type=int, default=None)
    tn.add_argument("--max-size", type=int, default=None, dest="max_size")
    tn.add_argument("--goal", choices=["valid", "sequencing", "tweak"],
                    default="sequencing")
    tn.add_argument("--t", type=int, default=None)
    _add_common(tn)
    tn.set_defaults(func=cmd_census)

    tm = tsubs.add_parser("mc", help="Monte Carlo estimators")
    msubs = tm.add_subparsers(dest="mc_command", required=True)

    ma = msubs.add_parser("anticoncentration")
    _add_set_flags(ma)
    ma.add_argument("--I", type=str, default="1", help="quarters, e.g. 1,2")
    ma.add_argument("--x", type=int, required=True)
    ma.add_argument("--trials", type=int, default=100_000)
    _add_common(ma)
    ma.set_defaults(func=cmd_mc)

    mb = msubs.add_parser("acceptability")
    _add_set_flags(mb)
    mb.add_argument("--K", type=int, default=None)
    mb.add_argument("--R", type=int, default=None)
    mb.add_argument("--trials", type=int, default=10_000)
    _add_common(mb)
    mb.set_defaults(func=cmd_mc)

    mp = msubs.add_parser("permissible-density")
    mp.add_argument("--modulus", type=int, default=None)
    mp.add_argument("--left", type=str, required=True)
    mp.add_argument("--right", type=str, required=True)
    mp.add_argument("--K", type=int, required=True)
    mp.add_argument("--trials", type=int, default=10_000)
    _add_common(mp)
    mp.set_defaults(func=cmd_mc)

    ml = msubs.add_parser("lll-budget")
    ml.add_argument("--p-hat", type=float, required=True, dest="p_hat")
    ml.add_argument("--degree", type=int, default=None)
    _add_set_flags(ml, with_set=False)
    ml.add_argument("--t", type=int, default=None)
    ml.add_argument("--R", type=int, default=None)
    ml.add_argument("--K", type=int, default=None)
    _add_common(ml)
    ml.set_defaults(func=cmd_mc)

    mu = msubs.add_parser("union-bound")
    mu.add_argument("--a-size", type=int, required=True, dest="a_size")
    mu.add_argument("--R", type=int, required=True)
    mu.add_argument("--type-i", type=float, default=0.0, dest="type_i")
    mu.add_argument("--type-ii", type=float, default=0.0, dest="type_ii")
    _add_common(mu)
    mu.set_defaults(func=cmd_mc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ConnectionError as exc:
        print(f"could not reach server: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
