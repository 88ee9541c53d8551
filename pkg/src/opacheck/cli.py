"""Command-line front end.

Exit codes: 0 opaque, 1 not opaque, 2 usage or input error. Verdicts come
straight from the library; there is no shell-layer logic.
"""

from __future__ import annotations

import argparse
import sys

from . import transforms
from .automata import DEFAULT_CAP, parse_step_bound
from .bench import bench_des, rows_to_csv
from .counter import build_counter
from .desfile import parse, serialize
from .errors import OpacheckError
from .oracle import OracleConfig, oracle_kso, sufficient_max_len
from .randgen import RandomSpec, gen_random
from .verify import verify_kso
from .automata import DES


def _load(path: str) -> DES:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def _print_verdict(verdict) -> int:
    if verdict.opaque:
        print("OPAQUE")
        return 0
    print("NOT-OPAQUE")
    if verdict.witness is not None:
        print("s_obs: " + " ".join(verdict.witness.s_obs))
        print("t_obs: " + " ".join(verdict.witness.t_obs))
    return 1


_TRANSFORM_MODES = {
    "cso-to-kso": lambda d, k: transforms.cso_to_kso(d),
    "cso-to-kso-single": lambda d, k: transforms.cso_to_kso_single_event(d),
    "cso-to-kso-two-events": lambda d, k: transforms.cso_to_kso_two_events(d),
    "inso-to-cso": lambda d, k: transforms.inso_to_cso(d),
    "kso-to-cso": lambda d, k: transforms.kso_to_cso(d, _need_k(k)),
    "kso-to-cso-neutral": lambda d, k: transforms.kso_to_cso_neutral(d, _need_k(k)),
    "kso-to-cso-single": lambda d, k: transforms.kso_to_cso_single_event(d, _need_k(k)),
    "encode-events": lambda d, k: transforms.encode_events(
        d, [e.name for e in d.automaton.events if e.observable]
    ),
    "determinize": lambda d, k: transforms.determinize_preserving(d),
}


def _need_k(k):
    if k is None:
        raise OpacheckError("this mode requires --k")
    return k


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="opacheck")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("verify", help="decide K-step opacity of a system file")
    p.add_argument("file")
    p.add_argument("--k", required=True, help="step bound: decimal digits or 'inf'")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--backend", choices=["pure", "compiled"], default=None)

    p = sub.add_parser("oracle", help="decide by exhaustive string search")
    p.add_argument("file")
    p.add_argument("--k", required=True)
    p.add_argument("--max-len", type=int, default=None,
                   help="string length budget (default: the conclusive bound)")

    p = sub.add_parser("transform", help="rewrite between opacity notions")
    p.add_argument("file")
    p.add_argument("--mode", required=True, choices=sorted(_TRANSFORM_MODES))
    p.add_argument("--k", default=None)

    p = sub.add_parser("counter", help="emit the step-counter automaton")
    p.add_argument("--k", required=True)

    p = sub.add_parser("gen", help="emit a seeded random system")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--events", type=int, required=True)
    p.add_argument("--unobs", type=int, default=0)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--secret-frac", type=float, default=0.25)
    p.add_argument("--nonsecret-frac", type=float, default=0.5)

    p = sub.add_parser("bench", help="search effort per step bound, as CSV")
    p.add_argument("file")
    p.add_argument("--k-list", required=True, help="comma-separated bounds")
    p.add_argument("--backend", choices=["pure", "compiled"], default=None)
    p.add_argument("--repeat", type=int, default=1)

    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    try:
        return _dispatch(args)
    except (OpacheckError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.cmd == "verify":
        d = _load(args.file)
        k = parse_step_bound(args.k)
        return _print_verdict(verify_kso(d, k, cap=args.cap, backend=args.backend))

    if args.cmd == "oracle":
        d = _load(args.file)
        k = parse_step_bound(args.k)
        max_len = args.max_len
        if max_len is None:
            max_len = sufficient_max_len(d.n, k)
        return _print_verdict(oracle_kso(d, OracleConfig(max_len=max_len, k=k)))

    if args.cmd == "transform":
        d = _load(args.file)
        k = parse_step_bound(args.k) if args.k is not None else None
        res = _TRANSFORM_MODES[args.mode](d, k)
        sys.stdout.write(serialize(res.output))
        print(f"# claim: {res.claim.describe()}")
        return 0

    if args.cmd == "counter":
        k = parse_step_bound(args.k)
        if k == float("inf"):
            raise OpacheckError("counter requires a finite bound")
        ca = build_counter(k)
        d = DES(ca.automaton, frozenset(), frozenset(), name="counter")
        sys.stdout.write(serialize(d))
        return 0

    if args.cmd == "gen":
        spec = RandomSpec(
            n_states=args.states,
            n_events=args.events,
            n_unobservable=args.unobs,
            transition_density=args.density,
            secret_fraction=args.secret_frac,
            nonsecret_fraction=args.nonsecret_frac,
            seed=args.seed,
        )
        sys.stdout.write(serialize(gen_random(spec)))
        return 0

    if args.cmd == "bench":
        d = _load(args.file)
        ks = [parse_step_bound(tok) for tok in args.k_list.split(",") if tok]
        rows = bench_des(d, ks, backend=args.backend, repeat=args.repeat)
        sys.stdout.write(rows_to_csv(rows))
        return 0

    raise AssertionError(f"unhandled command {args.cmd}")


if __name__ == "__main__":
    raise SystemExit(main())
