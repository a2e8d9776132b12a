"""Key-policy ABE for layered monotone boolean circuits.

Keys embed a circuit policy f, ciphertexts carry an attribute bit vector x
and hide a one-bit message; decryption succeeds exactly when f(x) = 1.  The
construction climbs one group level per circuit layer: holding the derived
wire value E_w = g_{j+1}^{s*r_w} for a satisfied wire at depth j, the gate
components let the decryptor move one level up to the parent wire but never
back down, which is what blocks backtracking mix-and-match attacks.

Built entirely on the mlmap element API; with the insecure reference
backend this is a correctness/analysis artifact, not a cryptosystem.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from . import circuit as circ_mod
from . import mlmap
from .circuit import AND, OR, Circuit

__all__ = [
    "NotSatisfied",
    "PublicParams",
    "MasterSecret",
    "Ciphertext",
    "InputKey",
    "OrKey",
    "AndKey",
    "SecretKey",
    "setup",
    "encrypt",
    "keygen",
    "decrypt",
    "derive_wire",
    "FormatError",
    "pp_to_text",
    "pp_from_text",
    "msk_to_text",
    "msk_from_text",
    "ct_to_text",
    "ct_from_text",
    "sk_to_text",
    "sk_from_text",
]


class NotSatisfied(Exception):
    """The policy rejects this attribute vector (or this wire is 0 under it)."""

    def __init__(self, message: str, wire: int | None = None):
        super().__init__(message)
        self.wire = wire


@dataclass(frozen=True)
class PublicParams:
    """n attribute slots, g_k^alpha, and one level-1 h element per attribute."""

    n: int
    g_alpha: object
    h: tuple
    backend: object = field(compare=False, repr=False)

    @property
    def gd(self) -> mlmap.GroupDescriptor:
        return self.backend.gd


@dataclass(frozen=True)
class MasterSecret:
    """g_{k-1}^alpha; one level short of the top on purpose."""

    g_alpha: object


@dataclass(frozen=True)
class Ciphertext:
    x: tuple
    c_msg: object
    c_s: object
    c_attr: dict


@dataclass(frozen=True)
class InputKey:
    k1: object
    k2: object


@dataclass(frozen=True)
class OrKey:
    k1: object
    k2: object
    k3: object
    k4: object


@dataclass(frozen=True)
class AndKey:
    k1: object
    k2: object
    k3: object


@dataclass(frozen=True)
class SecretKey:
    circuit: Circuit
    k_header: object
    wires: dict


def setup(security_bits: int, n: int, depth: int, rng: random.Random, backend=None):
    """Creates (PublicParams, MasterSecret) for n attributes and circuits of
    the given depth.  The group degree is depth+1: one pairing per layer plus
    the final header pairing.  A pre-built backend (e.g. a size-tracking one)
    may be supplied; its degree must already be depth+1."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"need n >= 1 attributes, got {n!r}")
    if not isinstance(depth, int) or depth < 1:
        raise ValueError(f"need depth >= 1, got {depth!r}")
    if backend is None:
        backend = mlmap.ExponentBackend(mlmap.group_setup(security_bits, depth + 1, rng))
    elif backend.k != depth + 1:
        raise ValueError(f"backend degree {backend.k} != depth+1 = {depth + 1}")
    k = backend.k
    alpha = backend.rand_wire(k - 1, rng)
    h = tuple(backend.encode(backend.rand_small(rng), 1) for _ in range(n))
    pp = PublicParams(n=n, g_alpha=backend.encode(alpha, k), h=h, backend=backend)
    msk = MasterSecret(g_alpha=backend.encode(alpha, k - 1))
    return pp, msk


def encrypt(pp: PublicParams, x, message: int, rng: random.Random) -> Ciphertext:
    """Encrypts one bit to an attribute vector.

    message=1 publishes (g_k^alpha)^s against the session element g^s and
    h_i^s for each set attribute; message=0 replaces the top component with
    a fresh random top-level element, so an authorized decryptor sees a
    mismatch (up to the 1/p collision chance).
    """
    be = pp.backend
    xs = tuple(x)
    if len(xs) != pp.n:
        raise ValueError(f"attribute vector length {len(xs)} != n={pp.n}")
    if any(b not in (0, 1) for b in xs):
        raise ValueError("attribute vector entries must be bits")
    if message not in (0, 1):
        raise ValueError(f"message must be the bit 0 or 1, got {message!r}")
    s = be.rand_small(rng)
    c_s = be.encode(s, 1)
    c_attr = {i + 1: pp.h[i].pow(s) for i in range(pp.n) if xs[i] == 1}
    if message == 1:
        c_msg = pp.g_alpha.pow(s)
    else:
        c_msg = be.rand_element(be.k, rng)
    return Ciphertext(x=xs, c_msg=c_msg, c_s=c_s, c_attr=c_attr)


def _require_policy(pp_n: int, k: int, c: Circuit) -> dict[int, int]:
    errs = circ_mod.validate(c)
    if errs:
        raise ValueError("policy circuit invalid: " + "; ".join(str(e) for e in errs))
    if c.n != pp_n:
        raise ValueError(f"policy reads {c.n} attributes, parameters have {pp_n}")
    d = circ_mod.depths(c)
    if d[c.output_wire] != k - 1:
        raise ValueError(
            f"policy depth {d[c.output_wire]} != {k - 1} required by these parameters"
        )
    return d


def _input_components(be, h_w, r, z) -> InputKey:
    # K1 = g^r * h_w^z, K2 = g^(-z)
    return InputKey(k1=be.encode(r, 1).mul(h_w.pow(z)), k2=be.encode(z, 1).inv())


def _or_components(be, j, r, a, b, r_a, r_b) -> OrKey:
    # K3 = g_j^(r - a*r_A), K4 = g_j^(r - b*r_B)
    return OrKey(
        k1=be.encode(a, 1),
        k2=be.encode(b, 1),
        k3=be.encode(be.s_sub(r, be.s_mul(a, r_a)), j),
        k4=be.encode(be.s_sub(r, be.s_mul(b, r_b)), j),
    )


def _and_components(be, j, r, a, b, r_a, r_b) -> AndKey:
    # K3 = g_j^(r - a*r_A - b*r_B)
    return AndKey(
        k1=be.encode(a, 1),
        k2=be.encode(b, 1),
        k3=be.encode(be.s_sub(be.s_sub(r, be.s_mul(a, r_a)), be.s_mul(b, r_b)), j),
    )


def keygen(msk: MasterSecret, pp: PublicParams, c: Circuit, rng: random.Random) -> SecretKey:
    """Issues a key for a valid layered monotone circuit of exactly the
    parameter depth.  Every wire w gets blinding randomness r_w at its own
    level; the header ties r of the output wire back to alpha."""
    be = pp.backend
    d = _require_policy(pp.n, be.k, c)
    wires = list(range(1, c.output_wire + 1))
    r = {w: be.rand_wire(d[w], rng) for w in wires}
    k_header = msk.g_alpha.mul(be.encode(r[c.output_wire], be.k - 1).inv())
    comps: dict[int, object] = {}
    for w in wires:
        if w <= c.n:
            z = be.rand_small(rng)
            comps[w] = _input_components(be, pp.h[w - 1], r[w], z)
        else:
            g = c.gate(w)
            a = be.rand_small(rng)
            b = be.rand_small(rng)
            if g.kind == OR:
                comps[w] = _or_components(be, d[w], r[w], a, b, r[g.in1], r[g.in2])
            else:
                comps[w] = _and_components(be, d[w], r[w], a, b, r[g.in1], r[g.in2])
    return SecretKey(circuit=c, k_header=k_header, wires=comps)


def _derived_wires(sk: SecretKey, ct: Ciphertext, vals) -> dict:
    """E_w = g_{depth(w)+1}^(s*r_w) for every satisfied wire, bottom-up.

    Input wires pair their two components against g^s and h_w^s; a
    satisfied OR uses whichever branch is alive (K1/K3 for the first
    operand, K2/K4 for the second); AND needs both operands, pulling each
    one level up before recentering with K3.  Unsatisfied wires are
    skipped: no derivation route exists for them.
    """
    c = sk.circuit
    e: dict[int, object] = {}
    for w in range(1, c.output_wire + 1):
        if vals[w - 1] != 1:
            continue
        comp = sk.wires[w]
        if w <= c.n:
            e[w] = comp.k1.pair(ct.c_s).mul(comp.k2.pair(ct.c_attr[w]))
        else:
            g = c.gate(w)
            if g.kind == OR:
                if vals[g.in1 - 1] == 1:
                    e[w] = e[g.in1].pair(comp.k1).mul(comp.k3.pair(ct.c_s))
                else:
                    e[w] = e[g.in2].pair(comp.k2).mul(comp.k4.pair(ct.c_s))
            else:
                e[w] = (
                    e[g.in1]
                    .pair(comp.k1)
                    .mul(e[g.in2].pair(comp.k2))
                    .mul(comp.k3.pair(ct.c_s))
                )
    return e


def _check_pair(sk: SecretKey, ct: Ciphertext) -> tuple[int, tuple]:
    if len(ct.x) != sk.circuit.n:
        raise ValueError(
            f"ciphertext has {len(ct.x)} attributes, key policy reads {sk.circuit.n}"
        )
    return circ_mod.evaluate(sk.circuit, ct.x)


def decrypt(sk: SecretKey, ct: Ciphertext) -> int:
    """Returns the message bit; raises NotSatisfied when the policy rejects
    the ciphertext's attributes."""
    bit, vals = _check_pair(sk, ct)
    if bit != 1:
        raise NotSatisfied("policy evaluates to 0 on this attribute vector")
    e = _derived_wires(sk, ct, vals)
    e_header = sk.k_header.pair(ct.c_s)
    return 1 if e_header.mul(e[sk.circuit.output_wire]) == ct.c_msg else 0


def derive_wire(sk: SecretKey, ct: Ciphertext, wire: int):
    """Exposes the per-wire derived value E_wire (for analysis and tests).

    Raises NotSatisfied when that wire evaluates to 0 under the
    ciphertext's attributes: its value is not derivable by design.
    """
    c = sk.circuit
    if not 1 <= wire <= c.output_wire:
        raise ValueError(f"unknown wire {wire}")
    _, vals = _check_pair(sk, ct)
    if vals[wire - 1] != 1:
        raise NotSatisfied(f"wire {wire} evaluates to 0", wire=wire)
    return _derived_wires(sk, ct, vals)[wire]


# --- text formats ---------------------------------------------------------
#
# All four artifacts share one shape: a type header line, the GROUP line,
# then name=value entries (elements as L<level>:<exponent>).  Secret keys
# embed their policy circuit verbatim between BEGIN/END CIRCUIT fences.
# Writers emit a canonical ordering so byte-exact round-trips hold.

_FENCE_BEGIN = "-----BEGIN CIRCUIT-----"
_FENCE_END = "-----END CIRCUIT-----"


class FormatError(Exception):
    """Malformed artifact text."""


def _kv(line: str, lineno: int) -> tuple[str, str]:
    eq = line.find("=")
    if eq <= 0:
        raise FormatError(f"line {lineno}: expected name=value, got {line!r}")
    return line[:eq], line[eq + 1 :]


def _parse_header(text: str, kind: str):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != f"{kind} v1":
        raise FormatError(f"expected header '{kind} v1'")
    if len(lines) < 2:
        raise FormatError("missing GROUP line")
    try:
        gd = mlmap.parse_group_line(lines[1])
    except ValueError as e:
        raise FormatError(str(e)) from None
    return gd, lines[2:]


def _element(gd, value: str, lineno: int) -> mlmap.LevelledElement:
    try:
        return mlmap.parse_element_line(gd, value)
    except (ValueError, mlmap.MapError) as e:
        raise FormatError(f"line {lineno}: {e}") from None


def _bits(value: str, lineno: int) -> tuple[int, ...]:
    if not value or any(ch not in "01" for ch in value):
        raise FormatError(f"line {lineno}: expected a bitstring, got {value!r}")
    return tuple(int(ch) for ch in value)


def pp_to_text(pp: PublicParams) -> str:
    out = ["PP v1", mlmap.group_line(pp.gd), f"n={pp.n}", f"H={mlmap.element_line(pp.g_alpha)}"]
    out.extend(f"h{i + 1}={mlmap.element_line(e)}" for i, e in enumerate(pp.h))
    return "\n".join(out) + "\n"


def pp_from_text(text: str) -> PublicParams:
    gd, rest = _parse_header(text, "PP")
    if not rest or not rest[0].startswith("n="):
        raise FormatError("expected n=<int> after the GROUP line")
    try:
        n = int(rest[0][2:])
    except ValueError:
        raise FormatError(f"bad attribute count {rest[0]!r}") from None
    if n < 1:
        raise FormatError(f"bad attribute count {n}")
    if len(rest) != 2 + n:
        raise FormatError(f"expected H and {n} h entries, found {len(rest) - 1} lines")
    name, value = _kv(rest[1], 4)
    if name != "H":
        raise FormatError(f"expected H=..., got {name!r}")
    g_alpha = _element(gd, value, 4)
    h = []
    for i in range(n):
        name, value = _kv(rest[2 + i], 5 + i)
        if name != f"h{i + 1}":
            raise FormatError(f"expected h{i + 1}=..., got {name!r}")
        h.append(_element(gd, value, 5 + i))
    return PublicParams(n=n, g_alpha=g_alpha, h=tuple(h), backend=mlmap.ExponentBackend(gd))


def msk_to_text(msk: MasterSecret, gd: mlmap.GroupDescriptor) -> str:
    return "\n".join(
        ["MSK v1", mlmap.group_line(gd), f"K={mlmap.element_line(msk.g_alpha)}"]
    ) + "\n"


def msk_from_text(text: str) -> tuple[MasterSecret, mlmap.GroupDescriptor]:
    gd, rest = _parse_header(text, "MSK")
    if len(rest) != 1:
        raise FormatError("expected exactly one K entry")
    name, value = _kv(rest[0], 3)
    if name != "K":
        raise FormatError(f"expected K=..., got {name!r}")
    return MasterSecret(g_alpha=_element(gd, value, 3)), gd


def ct_to_text(ct: Ciphertext, gd: mlmap.GroupDescriptor) -> str:
    out = [
        "CT v1",
        mlmap.group_line(gd),
        "x=" + "".join(str(b) for b in ct.x),
        f"CM={mlmap.element_line(ct.c_msg)}",
        f"Cs={mlmap.element_line(ct.c_s)}",
    ]
    out.extend(f"C{i}={mlmap.element_line(ct.c_attr[i])}" for i in sorted(ct.c_attr))
    return "\n".join(out) + "\n"


def ct_from_text(text: str) -> tuple[Ciphertext, mlmap.GroupDescriptor]:
    gd, rest = _parse_header(text, "CT")
    if len(rest) < 3:
        raise FormatError("truncated ciphertext")
    name, value = _kv(rest[0], 3)
    if name != "x":
        raise FormatError(f"expected x=..., got {name!r}")
    x = _bits(value, 3)
    name, value = _kv(rest[1], 4)
    if name != "CM":
        raise FormatError(f"expected CM=..., got {name!r}")
    c_msg = _element(gd, value, 4)
    name, value = _kv(rest[2], 5)
    if name != "Cs":
        raise FormatError(f"expected Cs=..., got {name!r}")
    c_s = _element(gd, value, 5)
    ones = [i + 1 for i, b in enumerate(x) if b == 1]
    if len(rest) != 3 + len(ones):
        raise FormatError(f"expected {len(ones)} C entries for x, found {len(rest) - 3}")
    c_attr = {}
    for j, i in enumerate(ones):
        name, value = _kv(rest[3 + j], 6 + j)
        if name != f"C{i}":
            raise FormatError(f"expected C{i}=..., got {name!r}")
        c_attr[i] = _element(gd, value, 6 + j)
    return Ciphertext(x=x, c_msg=c_msg, c_s=c_s, c_attr=c_attr), gd


_WIRE_KEY_RE = re.compile(r"^w(\d+)\.K([1-4])$")


def sk_to_text(sk: SecretKey, gd: mlmap.GroupDescriptor) -> str:
    out = [
        "SK v1",
        mlmap.group_line(gd),
        f"KH={mlmap.element_line(sk.k_header)}",
        _FENCE_BEGIN,
        circ_mod.render(sk.circuit).rstrip("\n"),
        _FENCE_END,
    ]
    for w in sorted(sk.wires):
        comp = sk.wires[w]
        fields = ("k1", "k2", "k3", "k4") if isinstance(comp, OrKey) else (
            ("k1", "k2", "k3") if isinstance(comp, AndKey) else ("k1", "k2")
        )
        for i, f in enumerate(fields, start=1):
            out.append(f"w{w}.K{i}={mlmap.element_line(getattr(comp, f))}")
    return "\n".join(out) + "\n"


def sk_from_text(text: str) -> tuple[SecretKey, mlmap.GroupDescriptor]:
    gd, rest = _parse_header(text, "SK")
    if not rest:
        raise FormatError("truncated key")
    name, value = _kv(rest[0], 3)
    if name != "KH":
        raise FormatError(f"expected KH=..., got {name!r}")
    k_header = _element(gd, value, 3)
    if len(rest) < 3 or rest[1] != _FENCE_BEGIN:
        raise FormatError("expected the policy circuit fence")
    try:
        end = rest.index(_FENCE_END)
    except ValueError:
        raise FormatError("unterminated circuit fence") from None
    try:
        c = circ_mod.parse("\n".join(rest[2:end]) + "\n")
    except circ_mod.ParseError as e:
        raise FormatError(f"embedded circuit: {e}") from None
    entries: dict[int, dict[int, mlmap.LevelledElement]] = {}
    for off, line in enumerate(rest[end + 1 :]):
        lineno = 4 + end + off
        name, value = _kv(line, lineno)
        m = _WIRE_KEY_RE.match(name)
        if m is None:
            raise FormatError(f"line {lineno}: unexpected entry {name!r}")
        w, i = int(m.group(1)), int(m.group(2))
        entries.setdefault(w, {})
        if i in entries[w]:
            raise FormatError(f"line {lineno}: duplicate w{w}.K{i}")
        entries[w][i] = _element(gd, value, lineno)
    comps: dict[int, object] = {}
    for w in range(1, c.output_wire + 1):
        got = entries.pop(w, None)
        if got is None:
            raise FormatError(f"missing components for wire {w}")
        if w <= c.n:
            want, make = 2, InputKey
        elif c.gate(w).kind == OR:
            want, make = 4, OrKey
        else:
            want, make = 3, AndKey
        if sorted(got) != list(range(1, want + 1)):
            raise FormatError(f"wire {w} needs K1..K{want}, got {sorted(got)}")
        comps[w] = make(*(got[i] for i in range(1, want + 1)))
    if entries:
        raise FormatError(f"components for unknown wires: {sorted(entries)}")
    return SecretKey(circuit=c, k_header=k_header, wires=comps), gd
