"""Command-line front end.

Artifacts live as text files in a working directory: pp.txt and msk.txt
from setup, sk-<label>.txt from keygen, ct-<label>.txt from encrypt.  Every
command that samples takes --seed for bit-reproducible output.  Exit codes:
0 success, 2 usage or malformed input, 3 I/O failure, 4 decryption refused
because the policy rejects the attributes.

--track-bounds (or ABE_TRACK_BOUNDS=1) reruns the command's group
arithmetic through the size-budget backend and reports the worst budget
utilization per level on stderr; values and output files are unchanged.
"""

from __future__ import annotations

import argparse
import os
import random
import re
import sys

from . import circuit as circ_mod
from . import kpabe, mlmap, reduction, sizebound

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NOT_SATISFIED = 4

_LABEL_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


class _UsageError(Exception):
    pass


def _rng(seed):
    return random.Random(seed) if seed is not None else random.Random()


def _read(path: str) -> str:
    with open(path, "r", encoding="ascii") as f:
        return f.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="ascii", newline="") as f:
        f.write(text)


def _label(value: str) -> str:
    if not _LABEL_RE.match(value):
        raise _UsageError(f"label {value!r} may only contain [A-Za-z0-9_.-]")
    return value


def _parse_bits(value: str) -> tuple:
    if not value or any(ch not in "01" for ch in value):
        raise _UsageError(f"expected a bitstring like 1011, got {value!r}")
    return tuple(int(ch) for ch in value)


def _tracking(args) -> bool:
    return bool(getattr(args, "track_bounds", False)) or os.environ.get(
        "ABE_TRACK_BOUNDS"
    ) == "1"


def _bounded(gd) -> sizebound.BoundedBackend:
    return sizebound.BoundedBackend(mlmap.ExponentBackend(gd), sizebound.default_profile())


def _report(be: sizebound.BoundedBackend) -> None:
    for level, (seen, budget) in be.utilization().items():
        pct = 100.0 * float(seen) / float(budget)
        print(f"bounds: level {level}: {seen}/{budget} ({pct:.1f}%)", file=sys.stderr)


# Role-derived bounds for artifacts loaded from disk; these are the bounds
# the in-memory bounded pipeline produces for the same components.

def _annotate_pp(pp, be):
    prof = be.profile
    return kpabe.PublicParams(
        n=pp.n,
        g_alpha=be.wrap(pp.g_alpha, sizebound.level_budget(prof, be.k - 1), be.k),
        h=tuple(be.wrap(e, prof.k, 1) for e in pp.h),
        backend=be,
    )


def _annotate_msk(msk, be):
    return kpabe.MasterSecret(
        g_alpha=be.wrap(msk.g_alpha, sizebound.level_budget(be.profile, be.k - 1), be.k)
    )


def _annotate_ct(ct, be):
    prof = be.profile
    attr_bound = 2 * prof.k + sizebound.product_slack(prof, 1, 1)
    return kpabe.Ciphertext(
        x=ct.x,
        c_msg=be.wrap(ct.c_msg, sizebound.level_budget(prof, be.k), be.k + 1),
        c_s=be.wrap(ct.c_s, prof.k, 1),
        c_attr={i: be.wrap(e, attr_bound, 2) for i, e in ct.c_attr.items()},
    )


def _annotate_sk(sk, be):
    prof = be.profile
    d = circ_mod.depths(sk.circuit)
    small = prof.k
    wires = {}
    for w, comp in sk.wires.items():
        wide = sizebound.level_budget(prof, d[w])
        if isinstance(comp, kpabe.InputKey):
            wires[w] = kpabe.InputKey(
                k1=be.wrap(comp.k1, wide, 2), k2=be.wrap(comp.k2, small, 1)
            )
        elif isinstance(comp, kpabe.OrKey):
            wires[w] = kpabe.OrKey(
                k1=be.wrap(comp.k1, small, 1),
                k2=be.wrap(comp.k2, small, 1),
                k3=be.wrap(comp.k3, wide, d[w] + 1),
                k4=be.wrap(comp.k4, wide, d[w] + 1),
            )
        else:
            wires[w] = kpabe.AndKey(
                k1=be.wrap(comp.k1, small, 1),
                k2=be.wrap(comp.k2, small, 1),
                k3=be.wrap(comp.k3, wide, d[w] + 1),
            )
    return kpabe.SecretKey(
        circuit=sk.circuit,
        k_header=be.wrap(sk.k_header, sizebound.level_budget(prof, be.k - 1), be.k),
        wires=wires,
    )


def _load_pp(dirname: str) -> kpabe.PublicParams:
    return kpabe.pp_from_text(_read(os.path.join(dirname, "pp.txt")))


def _cmd_setup(args) -> int:
    if args.n < 1:
        raise _UsageError("--n must be >= 1")
    if args.depth < 1:
        raise _UsageError("--depth must be >= 1")
    if args.bits < 0:
        raise _UsageError("--bits must be >= 0")
    rng = _rng(args.seed)
    be = None
    if _tracking(args):
        be = _bounded(mlmap.group_setup(args.bits, args.depth + 1, rng))
        pp, msk = kpabe.setup(args.bits, args.n, args.depth, rng, backend=be)
    else:
        pp, msk = kpabe.setup(args.bits, args.n, args.depth, rng)
    os.makedirs(args.out_dir, exist_ok=True)
    _write(os.path.join(args.out_dir, "pp.txt"), kpabe.pp_to_text(pp))
    _write(os.path.join(args.out_dir, "msk.txt"), kpabe.msk_to_text(msk, pp.gd))
    if be is not None:
        _report(be)
    return EXIT_OK


def _cmd_keygen(args) -> int:
    label = _label(args.label)
    rng = _rng(args.seed)
    pp = _load_pp(args.dir)
    msk, msk_gd = kpabe.msk_from_text(_read(os.path.join(args.dir, "msk.txt")))
    if msk_gd != pp.gd:
        raise _UsageError("pp.txt and msk.txt disagree on the group")
    c = circ_mod.parse(_read(args.circuit))
    if not c.is_monotone():
        raise _UsageError(
            "policy contains NOT gates; rewrite it first with 'circuit demorgan'"
        )
    if args.pad:
        c = circ_mod.layer_and_pad(c, pp.gd.k - 1)
    be = None
    if _tracking(args):
        be = _bounded(pp.gd)
        pp = _annotate_pp(pp, be)
        msk = _annotate_msk(msk, be)
    sk = kpabe.keygen(msk, pp, c, rng)
    _write(os.path.join(args.dir, f"sk-{label}.txt"), kpabe.sk_to_text(sk, msk_gd))
    if be is not None:
        _report(be)
    return EXIT_OK


def _cmd_encrypt(args) -> int:
    label = _label(args.label)
    rng = _rng(args.seed)
    pp = _load_pp(args.dir)
    x = _parse_bits(args.input)
    if len(x) != pp.n:
        raise _UsageError(f"--input has {len(x)} bits, parameters expect {pp.n}")
    be = None
    if _tracking(args):
        be = _bounded(pp.gd)
        pp = _annotate_pp(pp, be)
    ct = kpabe.encrypt(pp, x, args.message, rng)
    _write(os.path.join(args.dir, f"ct-{label}.txt"), kpabe.ct_to_text(ct, pp.gd))
    if be is not None:
        _report(be)
    return EXIT_OK


def _cmd_decrypt(args) -> int:
    sk, sk_gd = kpabe.sk_from_text(
        _read(os.path.join(args.dir, f"sk-{_label(args.key)}.txt"))
    )
    ct, ct_gd = kpabe.ct_from_text(
        _read(os.path.join(args.dir, f"ct-{_label(args.ct)}.txt"))
    )
    if sk_gd != ct_gd:
        raise _UsageError("key and ciphertext belong to different groups")
    be = None
    if _tracking(args):
        be = _bounded(sk_gd)
        sk = _annotate_sk(sk, be)
        ct = _annotate_ct(ct, be)
    bit = kpabe.decrypt(sk, ct)
    print(bit)
    if be is not None:
        _report(be)
    return EXIT_OK


def _cmd_circuit(args) -> int:
    c = circ_mod.parse(_read(args.path))
    if args.subcommand == "check":
        errs = circ_mod.validate(c)
        if errs:
            for e in errs:
                print(e)
            return EXIT_USAGE
        print("ok")
        return EXIT_OK
    if args.subcommand == "eval":
        bit, vals = circ_mod.evaluate(c, _parse_bits(args.input))
        print(bit)
        print("wires=" + "".join(str(v) for v in vals))
        return EXIT_OK
    if args.subcommand == "demorgan":
        m, _ = circ_mod.demorganize(c)
        print(
            f"literal inputs: 1..{c.n} carry x_i, {c.n + 1}..{2 * c.n} carry NOT x_i",
            file=sys.stderr,
        )
        text = circ_mod.render(m)
    else:  # layer
        if args.depth < 1:
            raise _UsageError("--depth must be >= 1")
        text = circ_mod.render(circ_mod.layer_and_pad(c, args.depth))
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _demo_policy(n: int, depth: int) -> tuple:
    """A rejecting policy plus a matching x*: when depth is 1 the policy is
    the bare last input wire, otherwise a pass-through chain over input 1."""
    if depth == 1:
        return circ_mod.Circuit(n=n, gates=()), n
    gates = [circ_mod.Gate(circ_mod.OR, 1, 1)]
    for _ in range(depth - 2):
        w = n + len(gates)
        gates.append(circ_mod.Gate(circ_mod.OR, w, w))
    return circ_mod.Circuit(n=n, gates=tuple(gates)), 1


def _cmd_game(args) -> int:
    if args.n < 1:
        raise _UsageError("--n must be >= 1")
    if args.depth < 1:
        raise _UsageError("--depth must be >= 1")
    rng = _rng(args.seed)
    gd = mlmap.group_setup(args.bits, args.depth + 1, rng)
    policy, zero_at = _demo_policy(args.n, args.depth)
    x_star = tuple(
        0 if i == zero_at else rng.randrange(2) for i in range(1, args.n + 1)
    )

    def adversary(pp, ct, keygen_oracle):
        keygen_oracle(policy)
        return reduction.omniscient_adversary(pp, ct, keygen_oracle)

    for label, real in (("real", True), ("random", False)):
        print(f"game ({label} instance)")
        reduction.run_game(gd, x_star, adversary, real, rng, log=lambda m: print("  " + m))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="circuitabe",
        description="Circuit-policy ABE toolbox over an insecure reference backend.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("setup", help="create pp.txt and msk.txt")
    sp.add_argument("--n", type=int, required=True, help="number of attributes")
    sp.add_argument("--depth", type=int, required=True, help="policy circuit depth")
    sp.add_argument("--bits", type=int, default=256, help="prime size floor (default 256)")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--track-bounds", action="store_true")
    sp.set_defaults(fn=_cmd_setup)

    kg = sub.add_parser("keygen", help="issue sk-<label>.txt for a policy circuit")
    kg.add_argument("--circuit", required=True, help="policy .circ file")
    kg.add_argument("--label", required=True)
    kg.add_argument("--pad", action="store_true", help="layer/pad the policy to the parameter depth")
    kg.add_argument("--dir", default=".")
    kg.add_argument("--seed", type=int, default=None)
    kg.add_argument("--track-bounds", action="store_true")
    kg.set_defaults(fn=_cmd_keygen)

    en = sub.add_parser("encrypt", help="encrypt one bit to an attribute vector")
    en.add_argument("--input", required=True, help="attribute bitstring, e.g. 1011")
    en.add_argument("--message", type=int, choices=(0, 1), required=True)
    en.add_argument("--label", required=True)
    en.add_argument("--dir", default=".")
    en.add_argument("--seed", type=int, default=None)
    en.add_argument("--track-bounds", action="store_true")
    en.set_defaults(fn=_cmd_encrypt)

    de = sub.add_parser("decrypt", help="print the bit, or NOT-SATISFIED")
    de.add_argument("--key", required=True, help="key label")
    de.add_argument("--ct", required=True, help="ciphertext label")
    de.add_argument("--dir", default=".")
    de.add_argument("--track-bounds", action="store_true")
    de.set_defaults(fn=_cmd_decrypt)

    ci = sub.add_parser("circuit", help="inspect and transform circuit files")
    cis = ci.add_subparsers(dest="subcommand", required=True)
    chk = cis.add_parser("check", help="validate against the monotone layered contract")
    chk.add_argument("path")
    ev = cis.add_parser("eval", help="evaluate on an input bitstring")
    ev.add_argument("path")
    ev.add_argument("input")
    dm = cis.add_parser("demorgan", help="rewrite NOT gates into 2n-literal monotone form")
    dm.add_argument("path")
    dm.add_argument("-o", "--out", default=None)
    ly = cis.add_parser("layer", help="lift to a layered circuit of exact depth")
    ly.add_argument("path")
    ly.add_argument("--depth", type=int, required=True)
    ly.add_argument("-o", "--out", default=None)
    for sc in (chk, ev, dm, ly):
        sc.set_defaults(fn=_cmd_circuit)

    gm = sub.add_parser("game", help="security-game demonstrations")
    gms = gm.add_subparsers(dest="subcommand", required=True)
    demo = gms.add_parser("demo", help="one real and one random instance, with transcripts")
    demo.add_argument("--n", type=int, default=2)
    demo.add_argument("--depth", type=int, default=2)
    demo.add_argument("--bits", type=int, default=64)
    demo.add_argument("--seed", type=int, default=None)
    demo.set_defaults(fn=_cmd_game)

    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else EXIT_OK
    try:
        return args.fn(args)
    except kpabe.NotSatisfied:
        print("NOT-SATISFIED")
        return EXIT_NOT_SATISFIED
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (circ_mod.ParseError, kpabe.FormatError, sizebound.BudgetExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
