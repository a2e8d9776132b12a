"""Shared test helpers: scripted/recording randomness, independent circuit
evaluation oracles, and random circuit generators.

The generators and the recursive evaluator here are deliberately written
against the library's *documented* contracts only, so they can serve as
independent cross-checks of the implementation.
"""

from __future__ import annotations

import random

from circuitabe import circuit as cm


class StubRng:
    """Randomness source that replays a scripted list of values."""

    def __init__(self, values):
        self.values = list(values)

    def randrange(self, *args):
        if not self.values:
            raise AssertionError("stub rng exhausted")
        return self.values.pop(0)


class RecordingRng(random.Random):
    """Real PRNG that remembers every randrange draw, in order."""

    def __init__(self, seed):
        super().__init__(seed)
        self.draws = []

    def randrange(self, *args, **kwargs):
        value = super().randrange(*args, **kwargs)
        self.draws.append(value)
        return value


def independent_eval(c: cm.Circuit, x) -> int:
    """Top-down memoized evaluator, written independently of cm.evaluate.

    NOT gates negate their single operand; the output is the value of the
    highest-numbered wire.
    """
    x = tuple(x)
    assert len(x) == c.n
    memo = {}

    def value(w: int) -> int:
        if w in memo:
            return memo[w]
        if w <= c.n:
            v = x[w - 1]
        else:
            g = c.gate(w)
            if g.kind == cm.NOT:
                v = 1 - value(g.in1)
            elif g.kind == cm.AND:
                v = value(g.in1) & value(g.in2)
            else:
                v = value(g.in1) | value(g.in2)
        memo[w] = v
        return v

    return value(c.output_wire)


def random_layered_circuit(
    rng: random.Random,
    *,
    n_range=(1, 12),
    depth_range=(1, 6),
    q_max=40,
    max_width=6,
) -> cm.Circuit:
    """Random monotone circuit in which every depth-j gate reads two
    depth-(j-1) wires; the single output gate sits at the requested depth."""
    n = rng.randint(*n_range)
    depth = rng.randint(*depth_range)
    if depth == 1:
        return cm.Circuit(n=n, gates=())
    gates = []
    prev_layer = list(range(1, n + 1))
    next_wire = n + 1
    budget = q_max - (depth - 1)  # keep room for one gate per remaining layer
    for layer in range(2, depth + 1):
        if layer == depth:
            width = 1
        else:
            width = rng.randint(1, max(1, min(max_width, budget)))
            budget -= width - 1
        this_layer = []
        for _ in range(width):
            lo = rng.choice(prev_layer)
            hi = rng.choice(prev_layer)
            in1, in2 = min(lo, hi), max(lo, hi)
            kind = rng.choice((cm.AND, cm.OR))
            if in1 == in2:
                kind = cm.OR  # canonical pass-through shape
            gates.append(cm.Gate(kind, in1, in2))
            this_layer.append(next_wire)
            next_wire += 1
        prev_layer = this_layer
    return cm.Circuit(n=n, gates=tuple(gates))


def random_dag_circuit(
    rng: random.Random,
    *,
    n_range=(1, 10),
    q_range=(1, 12),
    kinds=(cm.AND, cm.OR),
) -> cm.Circuit:
    """Random (not necessarily layered) circuit; each gate reads any two
    earlier wires.  With NOT in kinds, one-input negation gates appear."""
    n = rng.randint(*n_range)
    q = rng.randint(*q_range)
    gates = []
    for idx in range(q):
        w = n + 1 + idx
        kind = rng.choice(kinds)
        if kind == cm.NOT:
            gates.append(cm.Gate(cm.NOT, rng.randint(1, w - 1)))
        else:
            a = rng.randint(1, w - 1)
            b = rng.randint(1, w - 1)
            gates.append(cm.Gate(kind, min(a, b), max(a, b)))
    return cm.Circuit(n=n, gates=tuple(gates))


def satisfying_input(c: cm.Circuit, rng: random.Random, tries: int = 32):
    """Random x with c(x) = 1; falls back to all-ones (monotone circuits
    always accept it)."""
    for _ in range(tries):
        x = tuple(rng.randint(0, 1) for _ in range(c.n))
        if cm.evaluate(c, x)[0] == 1:
            return x
    return (1,) * c.n


def rejecting_input(c: cm.Circuit, rng: random.Random, tries: int = 32):
    """Random x with c(x) = 0; falls back to all-zeros."""
    for _ in range(tries):
        x = tuple(rng.randint(0, 1) for _ in range(c.n))
        if cm.evaluate(c, x)[0] == 0:
            return x
    return (0,) * c.n
