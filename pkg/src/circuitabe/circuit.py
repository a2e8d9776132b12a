"""Boolean circuit IR, validation, evaluation, rewrites, and a text DSL.

Wires are numbered 1..n+q: inputs are 1..n, gates claim n+1..n+q in
ascending order, and wire n+q is the output.  The strict monotone contract
(checked by validate) additionally demands AND/OR gates only, operand order
w > in2 >= in1, and layering: a gate at depth j reads two wires at depth
j-1.  Pass-through padding gates are written OR(w, w), which is why equal
operands are allowed.

The same dataclass also carries NOT gates for general (non-monotone)
circuits; those satisfy only the shape contract (validate_general) and are
meant to be fed to demorganize.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "AND",
    "OR",
    "NOT",
    "Gate",
    "Circuit",
    "Violation",
    "ParseError",
    "validate",
    "validate_general",
    "depths",
    "depth",
    "evaluate",
    "literal_assignment",
    "demorganize",
    "layer_and_pad",
    "parse",
    "render",
]

AND = "AND"
OR = "OR"
NOT = "NOT"

_KINDS = frozenset({AND, OR, NOT})


@dataclass(frozen=True)
class Gate:
    kind: str
    in1: int
    in2: int | None = None


@dataclass(frozen=True)
class Circuit:
    """n input wires followed by len(gates) gate wires; the last wire is the output."""

    n: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"need at least one input wire, got n={self.n!r}")

    @property
    def q(self) -> int:
        return len(self.gates)

    @property
    def output_wire(self) -> int:
        return self.n + len(self.gates)

    def gate(self, wire: int) -> Gate:
        if not self.n < wire <= self.output_wire:
            raise ValueError(f"wire {wire} is not a gate wire")
        return self.gates[wire - self.n - 1]

    def is_monotone(self) -> bool:
        return all(g.kind != NOT for g in self.gates)


@dataclass(frozen=True)
class Violation:
    """One broken rule, attributed to the wire that breaks it."""

    wire: int
    rule: str
    message: str

    def __str__(self):
        return f"wire {self.wire}: {self.rule}: {self.message}"


def validate_general(c: Circuit) -> list[Violation]:
    """Shape checks for possibly non-monotone circuits: known kinds, arity,
    and operands strictly below the gate (which forces acyclicity)."""
    out = []
    for idx, g in enumerate(c.gates):
        w = c.n + 1 + idx
        if g.kind not in _KINDS:
            out.append(Violation(w, "kind", f"unknown gate type {g.kind!r}"))
            continue
        ins = (g.in1,) if g.kind == NOT else (g.in1, g.in2)
        if g.kind == NOT and g.in2 is not None:
            out.append(Violation(w, "arity", "NOT takes exactly one operand"))
        if g.kind != NOT and g.in2 is None:
            out.append(Violation(w, "arity", f"{g.kind} takes two operands"))
            ins = (g.in1,)
        for v in ins:
            if not isinstance(v, int) or not 1 <= v < w:
                out.append(
                    Violation(w, "order", f"operand {v!r} must be a wire in [1, {w - 1}]")
                )
    return out


def validate(c: Circuit, *, layered: bool = True) -> list[Violation]:
    """Full monotone-contract check; returns violations instead of raising.

    With layered=False the layering rule is skipped (useful before
    layer_and_pad); everything else still applies.
    """
    out = list(validate_general(c))
    bad_wires = {v.wire for v in out}
    for idx, g in enumerate(c.gates):
        w = c.n + 1 + idx
        if g.kind == NOT:
            out.append(Violation(w, "kind", "NOT gates are not allowed here"))
        elif w not in bad_wires and g.in2 < g.in1:
            out.append(
                Violation(w, "order", f"operands must satisfy in1 <= in2, got ({g.in1}, {g.in2})")
            )
    if not layered:
        return out
    bad_wires = {v.wire for v in out}
    d: dict[int, int] = {i: 1 for i in range(1, c.n + 1)}
    for idx, g in enumerate(c.gates):
        w = c.n + 1 + idx
        if w in bad_wires or g.in1 not in d or g.in2 not in d:
            continue
        d[w] = 1 + min(d[g.in1], d[g.in2])
        if d[g.in1] != d[w] - 1 or d[g.in2] != d[w] - 1:
            out.append(
                Violation(
                    w,
                    "layered",
                    f"depth-{d[w]} gate must read two depth-{d[w] - 1} wires, "
                    f"got depths ({d[g.in1]}, {d[g.in2]})",
                )
            )
    return out


def depths(c: Circuit) -> dict[int, int]:
    """Depth of every wire: inputs sit at 1, AND/OR gates one above their
    shallower operand, NOT gates at their operand's depth (the monotone
    rewrite splices them into plain wire aliases)."""
    d: dict[int, int] = {i: 1 for i in range(1, c.n + 1)}
    for idx, g in enumerate(c.gates):
        w = c.n + 1 + idx
        try:
            d[w] = d[g.in1] if g.kind == NOT else 1 + min(d[g.in1], d[g.in2])
        except KeyError as e:
            raise ValueError(f"wire {w} reads unknown wire {e.args[0]}") from None
    return d


def depth(c: Circuit, wire: int | None = None) -> int:
    """Depth of one wire (default: the output wire)."""
    if wire is None:
        wire = c.output_wire
    d = depths(c)
    if wire not in d:
        raise ValueError(f"unknown wire {wire}")
    return d[wire]


def _check_assignment(c: Circuit, x) -> tuple[int, ...]:
    xs = tuple(x)
    if len(xs) != c.n:
        raise ValueError(f"assignment length {len(xs)} != n={c.n}")
    if any(b not in (0, 1) for b in xs):
        raise ValueError("assignment entries must be bits")
    return xs


def evaluate(c: Circuit, x) -> tuple[int, tuple[int, ...]]:
    """Returns (output bit, value of every wire in wire order)."""
    xs = _check_assignment(c, x)
    vals = list(xs)
    for g in c.gates:
        if g.kind == NOT:
            vals.append(1 - vals[g.in1 - 1])
        elif g.kind == AND:
            vals.append(vals[g.in1 - 1] & vals[g.in2 - 1])
        else:
            vals.append(vals[g.in1 - 1] | vals[g.in2 - 1])
    return vals[-1], tuple(vals)


def literal_assignment(x) -> tuple[int, ...]:
    """Doubles an n-bit assignment into the 2n literal inputs
    (x_1..x_n, NOT x_1..NOT x_n) used by demorganized circuits."""
    xs = tuple(x)
    return xs + tuple(1 - b for b in xs)


def demorganize(c: Circuit):
    """Rewrites a circuit with NOT gates into a monotone one over 2n literal
    inputs, computing the same function under literal_assignment.

    Each source wire is shadowed by a positive and a negated twin; AND/OR
    gates dualize (AND <-> OR) on the negated side and NOT gates collapse to
    aliases into the twin circuit.  Only twins reachable from the positive
    output are emitted, so a monotone input comes back with the same gate
    count.  Returns (monotone circuit, input mapping function).
    """
    errs = validate_general(c)
    if errs:
        raise ValueError("invalid circuit: " + "; ".join(str(e) for e in errs))
    n = c.n
    gates_out: list[Gate] = []
    memo: dict[tuple[int, bool], int] = {}

    def build(w: int, positive: bool) -> int:
        key = (w, positive)
        if key in memo:
            return memo[key]
        if w <= n:
            res = w if positive else n + w
        else:
            g = c.gate(w)
            if g.kind == NOT:
                res = build(g.in1, not positive)
            else:
                kind = g.kind if positive else (OR if g.kind == AND else AND)
                i1 = build(g.in1, positive)
                i2 = build(g.in2, positive)
                gates_out.append(Gate(kind, min(i1, i2), max(i1, i2)))
                res = 2 * n + len(gates_out)
        memo[key] = res
        return res

    out = build(c.output_wire, True)
    if out <= 2 * n:
        # The whole circuit reduced to a single literal; the output wire must
        # still be a gate, so select the literal through a pass-through.
        gates_out.append(Gate(OR, out, out))
    return Circuit(n=2 * n, gates=tuple(gates_out)), literal_assignment


def _longest_depths(c: Circuit) -> dict[int, int]:
    d: dict[int, int] = {i: 1 for i in range(1, c.n + 1)}
    for idx, g in enumerate(c.gates):
        w = c.n + 1 + idx
        d[w] = 1 + max(d[g.in1], d[g.in2])
    return d


def layer_and_pad(c: Circuit, target_depth: int) -> Circuit:
    """Rebuilds a monotone circuit into a layered one of exactly the target
    depth, inserting OR(w, w) pass-throughs to lift shallow operands and to
    pad the output.  Semantics are preserved; an already-layered circuit of
    the right depth keeps its gate count.

    Gates whose layer would exceed the target are dropped: such gates can
    never feed the output (a contributing gate always sits strictly below
    it), so removing them changes nothing the circuit computes.
    """
    errs = validate(c, layered=False)
    if errs:
        raise ValueError("invalid circuit: " + "; ".join(str(e) for e in errs))
    if not isinstance(target_depth, int) or target_depth < 1:
        raise ValueError(f"target depth must be an integer >= 1, got {target_depth!r}")
    want = _longest_depths(c)
    have = want[c.output_wire]
    if have > target_depth:
        raise ValueError(f"circuit depth {have} exceeds target {target_depth}")

    # Phase 1: symbolic nodes with layers; lifts are memoized so a wire
    # needed at several layers shares one pass-through chain.
    nodes: list[tuple] = []  # ("input", i) | ("gate", kind, a_idx, b_idx) | ("pass", idx)
    layer: list[int] = []

    def add(node, lv) -> int:
        nodes.append(node)
        layer.append(lv)
        return len(nodes) - 1

    base: dict[int, int] = {}
    for i in range(1, c.n + 1):
        base[i] = add(("input", i), 1)

    lifted: dict[tuple[int, int], int] = {}

    def lift(idx: int, to_layer: int) -> int:
        cur = layer[idx]
        while cur < to_layer:
            key = (idx, cur + 1)
            if key in lifted:
                idx = lifted[key]
            else:
                up = add(("pass", idx), cur + 1)
                lifted[key] = up
                idx = up
            cur += 1
        return idx

    for idx, g in enumerate(c.gates):
        w = c.n + 1 + idx
        lv = want[w]
        if lv > target_depth:
            continue  # cannot contribute to the output; see docstring
        a = lift(base[g.in1], lv - 1)
        b = lift(base[g.in2], lv - 1)
        base[w] = add(("gate", g.kind, a, b), lv)

    out_idx = lift(base[c.output_wire], target_depth)

    # Phase 2: number nodes by (layer, creation order), forcing the output
    # node to take the top wire id.
    order = sorted(
        (i for i in range(len(nodes)) if nodes[i][0] != "input"),
        key=lambda i: (layer[i], i == out_idx, i),
    )
    wire_of: dict[int, int] = {base[i]: i for i in range(1, c.n + 1)}
    for pos, i in enumerate(order):
        wire_of[i] = c.n + 1 + pos
    gates = []
    for i in order:
        node = nodes[i]
        if node[0] == "pass":
            v = wire_of[node[1]]
            gates.append(Gate(OR, v, v))
        else:
            a, b = wire_of[node[2]], wire_of[node[3]]
            gates.append(Gate(node[1], min(a, b), max(a, b)))
    return Circuit(n=c.n, gates=tuple(gates))


class ParseError(Exception):
    """DSL syntax error with 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


_HEADER_RE = re.compile(r"^circuit n=(\d+) q=(\d+)$")


def _tokens(text_line: str):
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", text_line)]


def parse(text: str) -> Circuit:
    """Parses the circuit DSL.

    Canonical form: a 'circuit n=<n> q=<q>' header followed by exactly q
    'gate <wire> <AND|OR|NOT> <in1> [<in2>]' lines with ascending contiguous
    wire ids.  Blank lines and full-line # comments are tolerated on input;
    render() emits none.  Ordering/layering semantics are left to validate.
    """
    lines = text.split("\n")
    rows = []
    for ln, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rows.append((ln, raw))
    if not rows:
        raise ParseError("empty input", 1, 1)

    ln, raw = rows[0]
    m = _HEADER_RE.match(raw.strip())
    if m is None:
        raise ParseError("expected header 'circuit n=<int> q=<int>'", ln, 1)
    n, q = int(m.group(1)), int(m.group(2))
    if n < 1:
        raise ParseError("n must be >= 1", ln, 1)

    if len(rows) - 1 != q:
        ln_last = rows[-1][0] if len(rows) > 1 else ln
        raise ParseError(f"header promises {q} gates, found {len(rows) - 1}", ln_last, 1)

    gates = []
    for offset, (ln, raw) in enumerate(rows[1:]):
        toks = _tokens(raw)
        if toks[0][1] != "gate":
            raise ParseError(f"expected 'gate', got {toks[0][1]!r}", ln, toks[0][0])
        if len(toks) < 2:
            raise ParseError("missing wire id", ln, len(raw) + 1)

        def intat(i, what):
            col, tok = toks[i]
            if not tok.isdigit():
                raise ParseError(f"{what} must be a positive integer, got {tok!r}", ln, col)
            return int(tok)

        wire = intat(1, "wire id")
        expected = n + 1 + offset
        if wire != expected:
            raise ParseError(f"gate wire {wire} out of sequence, expected {expected}", ln, toks[1][0])
        if len(toks) < 3:
            raise ParseError("missing gate type", ln, len(raw) + 1)
        col, kind = toks[2]
        if kind not in _KINDS:
            raise ParseError(f"unknown gate type {kind!r}", ln, col)
        arity = 1 if kind == NOT else 2
        if len(toks) != 3 + arity:
            raise ParseError(
                f"{kind} takes {arity} operand{'s' if arity == 2 else ''}, "
                f"got {len(toks) - 3}",
                ln,
                toks[min(len(toks) - 1, 3 + arity)][0] if len(toks) > 3 else len(raw) + 1,
            )
        ins = [intat(3 + i, "operand") for i in range(arity)]
        for i, v in enumerate(ins):
            if v > n + q:
                raise ParseError(f"operand {v} beyond last wire {n + q}", ln, toks[3 + i][0])
        gates.append(Gate(kind, ins[0], ins[1] if arity == 2 else None))
    return Circuit(n=n, gates=tuple(gates))


def render(c: Circuit) -> str:
    """Canonical DSL text; parse(render(c)) == c."""
    out = [f"circuit n={c.n} q={c.q}"]
    for idx, g in enumerate(c.gates):
        w = c.n + 1 + idx
        if g.kind == NOT:
            out.append(f"gate {w} NOT {g.in1}")
        else:
            out.append(f"gate {w} {g.kind} {g.in1} {g.in2}")
    return "\n".join(out) + "\n"
