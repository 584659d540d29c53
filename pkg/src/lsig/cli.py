"""Command-line front end: ``lsig keygen|aggregate|sign|verify|forklab|bench``.

Set LSIG_SEED to make every command reproducible. Each command then draws
from a generator seeded by the seed, the command name and its output file
name, so two keygens into different files still get different keys.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
import time
from pathlib import Path

from . import fileformat as ff
from .algebra.group import InvalidGroupParams, load_group_params
from .algebra.ring import InvalidRingParams
from .forklab import ADVERSARIES, CSV_HEADER, lab_row
from .harness import run_protocol, generate_keypairs
from .idcore import DecodeError, SchemeMismatch
from .multisig import SignerSet, key_aggregate, verify
from .presets import PRESETS, preset
from .rlwe import load_rlwe_params
from .schnorr import SchnorrScheme

SCHEME_ALIASES = {"schnorr": "schnorr-2048", "rlwe": "rlwe-desk"}


class CliError(Exception):
    pass


def command_rng(command: str, *labels: str) -> random.Random:
    seed = os.environ.get("LSIG_SEED")
    if seed is None:
        return random.SystemRandom()
    return random.Random(":".join((seed, command) + labels))


def _derived_seed(rng):
    return None if isinstance(rng, random.SystemRandom) else rng.getrandbits(256)


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, data: bytes):
    Path(path).write_bytes(data)


def resolve_scheme(name: str | None, params_file: str | None):
    if params_file:
        text = _read(params_file).decode()
        keys = {line.split("=", 1)[0].strip() for line in text.splitlines() if "=" in line}
        if "a" in keys:
            return load_rlwe_params(text)
        return SchnorrScheme(load_group_params(text))
    return preset(SCHEME_ALIASES.get(name or "schnorr", name or "schnorr"))


# -- commands ------------------------------------------------------------------

def cmd_keygen(args):
    scheme = resolve_scheme(args.scheme, args.params_file)
    rng = command_rng("keygen", Path(args.out).name)
    sk, pk = scheme.keygen(rng)
    _write(f"{args.out}.pub", ff.dump_public_key(scheme, pk))
    _write(f"{args.out}.key", ff.dump_secret_key(scheme, sk, pk))
    print(f"wrote {args.out}.pub and {args.out}.key")
    return 0


def _load_pks(paths):
    scheme, pks = None, []
    for path in paths:
        data = _read(path)
        try:
            scheme, pk = ff.load_public_key(data, scheme)
        except DecodeError:
            # a secret key file also carries the public key
            scheme, _, pk = ff.load_secret_key(data, scheme)
        pks.append(pk)
    return scheme, pks


def cmd_aggregate(args):
    scheme, pks = _load_pks(args.keys)
    agg = key_aggregate(SignerSet(scheme, pks))
    _write(args.out, ff.dump_aggregated_key(agg))
    print(f"aggregated {agg.t} keys into {args.out}")
    return 0


def cmd_sign(args):
    scheme, pairs = None, []
    for path in args.keys_with_secrets:
        scheme, sk, pk = ff.load_secret_key(_read(path), scheme)
        pairs.append((sk, pk))
    message = _read(args.message_file)
    rng = command_rng("sign", Path(args.out_sig).name)
    report = run_protocol(scheme, pairs, message, seed=_derived_seed(rng))
    if report.signature is None:
        reasons = sorted({r for r in report.reasons if r})
        raise CliError("signing session ended without a signature: " + "; ".join(reasons))
    _write(args.out_sig, ff.dump_signature(scheme, report.signature))
    print(f"{len(pairs)} signers produced {args.out_sig}")
    return 0


def cmd_verify(args):
    agg = ff.load_aggregated_key(_read(args.agg_key))
    _, sig = ff.load_signature(_read(args.sig), agg.scheme)
    ok = verify(agg, _read(args.message_file), sig)
    print("accept" if ok else "reject")
    return 0 if ok else 1


def cmd_forklab(args):
    seed = args.seed if args.seed is not None else os.environ.get("LSIG_SEED")
    rng = random.SystemRandom() if seed is None else random.Random(f"{seed}:forklab")
    print(CSV_HEADER)
    for name in args.adversary.split(","):
        try:
            print(lab_row(name, args.q, args.N, args.trials, rng))
        except (KeyError, ValueError) as exc:
            raise CliError(str(exc).strip("'\"")) from None
    return 0


def bench_rows(scheme_name: str, t_list, trials: int, rng):
    scheme = resolve_scheme(scheme_name, None)
    message = b"benchmark message"
    rows = []
    for t in t_list:
        pairs = generate_keypairs(scheme, t, rng)
        sign_s, verify_s, done, aborts = 0.0, 0.0, 0, 0
        sig_bytes = agg_bytes = 0
        for _ in range(trials):
            start = time.perf_counter()
            report = run_protocol(scheme, pairs, message, seed=_derived_seed(rng))
            sign_s += time.perf_counter() - start
            if report.signature is None:
                aborts += 1
                continue
            start = time.perf_counter()
            verify(report.agg_key, message, report.signature)
            verify_s += time.perf_counter() - start
            done += 1
            sig_bytes = len(scheme.encode_cmt(report.signature.cmt_bar)) + len(
                scheme.encode_rsp(report.signature.rsp_bar))
            agg_bytes = len(scheme.encode_pk(report.agg_key.pk_bar))
        rows.append({
            "scheme": scheme_name,
            "t": t,
            "sign_ms": 1000 * sign_s / trials,
            "verify_ms": 1000 * verify_s / max(done, 1),
            "sig_bytes": sig_bytes,
            "aggkey_bytes": agg_bytes,
            "aborts": aborts,
        })
    return rows


def cmd_bench(args):
    try:
        t_list = [int(x) for x in args.t_list.split(",")]
    except ValueError:
        raise CliError("--t-list takes comma-separated integers") from None
    if any(t < 1 for t in t_list) or args.trials < 1:
        raise CliError("t values and --trials must be positive")
    rng = command_rng("bench", args.scheme)
    print(f"{'scheme':<14}{'t':>4}{'sign_ms':>12}{'verify_ms':>12}{'sig_bytes':>11}{'aggkey_bytes':>14}{'aborts':>8}")
    for r in bench_rows(args.scheme, t_list, args.trials, rng):
        print(f"{r['scheme']:<14}{r['t']:>4}{r['sign_ms']:>12.2f}{r['verify_ms']:>12.2f}"
              f"{r['sig_bytes']:>11}{r['aggkey_bytes']:>14}{r['aborts']:>8}")
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lsig", description="Compact multi-signatures from linear ID schemes.")
    sub = p.add_subparsers(dest="command", required=True)
    scheme_names = sorted(set(PRESETS) | set(SCHEME_ALIASES))

    k = sub.add_parser("keygen", help="generate a key pair")
    k.add_argument("--scheme", choices=scheme_names, default="schnorr")
    k.add_argument("--params-file", help="group or ring parameter file (overrides --scheme)")
    k.add_argument("--out", required=True, help="output prefix; writes PREFIX.pub and PREFIX.key")
    k.set_defaults(func=cmd_keygen)

    a = sub.add_parser("aggregate", help="aggregate public keys")
    a.add_argument("--keys", nargs="+", required=True)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_aggregate)

    s = sub.add_parser("sign", help="run a local signing session among the given signers")
    s.add_argument("--keys-with-secrets", nargs="+", required=True)
    s.add_argument("--message-file", required=True)
    s.add_argument("--out-sig", required=True)
    s.set_defaults(func=cmd_sign)

    v = sub.add_parser("verify", help="verify a signature against an aggregated key")
    v.add_argument("--agg-key", required=True)
    v.add_argument("--message-file", required=True)
    v.add_argument("--sig", required=True)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("forklab", help="estimate acc and frk for a synthetic adversary")
    f.add_argument("--adversary", default="always", help=f"one or more of {', '.join(ADVERSARIES)}, comma-separated")
    f.add_argument("--q", type=int, default=2)
    f.add_argument("--N", type=int, default=2 ** 16)
    f.add_argument("--trials", type=int, default=10_000)
    f.add_argument("--seed")
    f.set_defaults(func=cmd_forklab)

    b = sub.add_parser("bench", help="signing and verification cost per signer count")
    b.add_argument("--scheme", choices=scheme_names, default="schnorr")
    b.add_argument("--t-list", default="2,4,8,16")
    b.add_argument("--trials", type=int, default=5)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, DecodeError, SchemeMismatch, InvalidGroupParams, InvalidRingParams, ValueError) as exc:
        print(f"lsig: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
