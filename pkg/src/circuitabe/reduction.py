"""Executable selective-security reduction for the circuit ABE scheme.

Decisional instance: given g, g^s, g^(c_1)..g^(c_k) at level 1, decide
whether a top-level element T equals g_k^(s * c_1*...*c_k) or is uniform.
The simulator answers the selective ABE game for a committed attribute
vector x* without ever holding alpha: it implicitly sets
alpha = xi + c_1*...*c_k and keeps, for every wire of every queried policy
(all of which must reject x*), the invariant

    f_w(x*) = 0  at depth j   =>   r_w = c_1*...*c_(j+1) + eta_w
    f_w(x*) = 1               =>   r_w honestly sampled,

so the output wire's product form cancels against alpha in the header and
the adversary's view is exactly the real scheme's.  Everything here runs on
the reference backend; per-wire bookkeeping is retained so tests can verify
each simulated component against the scheme's defining equations through
the exponent oracle.

Witness discipline: instance generation can retain (s, c, realness) for
checker code, but every simulator entry point strips the witness first and
the suite exercises the simulators on witness-free instances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from . import circuit as circ_mod
from . import kpabe, mlmap
from .circuit import OR, Circuit

__all__ = [
    "GameAbort",
    "Witness",
    "MddhInstance",
    "WireTrace",
    "SimulatorState",
    "gen_instance",
    "sim_setup",
    "sim_challenge",
    "sim_keygen",
    "run_game",
    "omniscient_adversary",
    "null_adversary",
]


class GameAbort(Exception):
    """The game's rules were broken (e.g. a key query satisfied by x*)."""


@dataclass(frozen=True)
class Witness:
    """Checker-only view of how an instance was built."""

    s: int
    c: tuple
    real: bool


@dataclass(frozen=True)
class MddhInstance:
    g: mlmap.LevelledElement
    g_s: mlmap.LevelledElement
    g_c: tuple
    t: mlmap.LevelledElement
    witness: Witness | None = None

    @property
    def gd(self) -> mlmap.GroupDescriptor:
        return self.g.gd

    def public(self) -> "MddhInstance":
        return replace(self, witness=None) if self.witness is not None else self


def gen_instance(
    gd: mlmap.GroupDescriptor, real: bool, rng: random.Random, with_witness: bool = True
) -> MddhInstance:
    """Samples a decisional instance; T is g_k^(s*prod c) when real, uniform
    at the top level otherwise."""
    be = mlmap.ExponentBackend(gd)
    s = rng.randrange(gd.p)
    c = tuple(rng.randrange(gd.p) for _ in range(gd.k))
    if real:
        t_exp = s
        for ci in c:
            t_exp = t_exp * ci % gd.p
        t = be.encode(t_exp, gd.k)
    else:
        t = be.rand_element(gd.k, rng)
    return MddhInstance(
        g=be.generator(1),
        g_s=be.encode(s, 1),
        g_c=tuple(be.encode(ci, 1) for ci in c),
        t=t,
        witness=Witness(s=s, c=c, real=real) if with_witness else None,
    )


@dataclass(frozen=True)
class WireTrace:
    """What the simulator chose for one wire of one key.

    Satisfied wires record honest scalars (r, and z or a/b).  Unsatisfied
    wires record the randomizers of the shifted form: r = c_1..c_(j+1) + eta
    at depth j; input wires use z = -c_2 + nu; gate multipliers carry the
    extra c_(j+1) as a = c_(j+1) + psi (and b = c_(j+1) + phi on an OR; on
    an AND, `shifted` names which operand's multiplier took it, the other
    being the plain phi).
    """

    kind: str
    depth: int
    satisfied: bool
    r: int | None = None
    z: int | None = None
    a: int | None = None
    b: int | None = None
    eta: int | None = None
    nu: int | None = None
    psi: int | None = None
    phi: int | None = None
    shifted: str | None = None


@dataclass
class SimulatorState:
    """Single-owner working state of one simulated game."""

    x_star: tuple
    y: tuple
    xi: int
    pp: kpabe.PublicParams
    key_traces: list = field(default_factory=list)


def sim_setup(inst: MddhInstance, x_star, rng: random.Random):
    """Builds public parameters around the instance: h_i = g^(y_i) for set
    attributes of x*, g^(y_i + c_1) for unset ones, and
    H = g_k^(xi + c_1*...*c_k) assembled by pairing the instance elements up
    the ladder.  Never touches the witness."""
    inst = inst.public()
    gd = inst.gd
    be = mlmap.ExponentBackend(gd)
    xs = tuple(x_star)
    if any(b not in (0, 1) for b in xs):
        raise ValueError("x* entries must be bits")
    if not xs:
        raise ValueError("x* must be non-empty")
    y = tuple(rng.randrange(gd.p) for _ in xs)
    xi = rng.randrange(gd.p)
    h = tuple(
        be.encode(yi, 1) if bit == 1 else be.encode(yi, 1).mul(inst.g_c[0])
        for yi, bit in zip(y, xs)
    )
    top = inst.g_c[0]
    for ci in inst.g_c[1:]:
        top = top.pair(ci)
    g_alpha = top.mul(be.encode(xi, gd.k))
    pp = kpabe.PublicParams(n=len(xs), g_alpha=g_alpha, h=h, backend=be)
    return pp, SimulatorState(x_star=xs, y=y, xi=xi, pp=pp)


def sim_challenge(inst: MddhInstance, state: SimulatorState, x_star=None) -> kpabe.Ciphertext:
    """Challenge ciphertext: (T shifted by (g_k^s)^xi, g^s, (g^s)^(y_i) for
    set i).  The shift compensates for the xi term folded into the public
    key exponent and is computed publicly by lifting g^s up the ladder, so
    when T is real the result is exactly encrypt(pp, x*, 1) with session
    exponent s; when T is uniform the first component stays uniform and the
    ciphertext is an encryption of 0."""
    inst = inst.public()
    gd = inst.gd
    be = state.pp.backend
    if x_star is not None and tuple(x_star) != state.x_star:
        raise ValueError("x* does not match the committed vector")
    c_attr = {
        i + 1: inst.g_s.pow(state.y[i])
        for i in range(len(state.x_star))
        if state.x_star[i] == 1
    }
    c_msg = inst.t.mul(_lift(inst.g_s, be, gd.k).pow(state.xi))
    return kpabe.Ciphertext(x=state.x_star, c_msg=c_msg, c_s=inst.g_s, c_attr=c_attr)


def _lift(element: mlmap.LevelledElement, be: mlmap.ExponentBackend, level: int):
    """Raises a level-1 element to the given level by pairing with a generator."""
    return element if level == 1 else element.pair(be.generator(level - 1))


def sim_keygen(
    inst: MddhInstance, state: SimulatorState, c: Circuit, rng: random.Random
) -> kpabe.SecretKey:
    """Answers a key query for a policy with c(x*) = 0.

    Wires satisfied by x* are sampled honestly (same scalar draws and
    component equations as keygen).  Unsatisfied wires get the shifted form,
    built only from the instance elements: products c_1..c_j live at level j
    via the pairing ladder, and the single extra factor c_(j+1) rides in the
    level-1 multiplier components.  Appends the per-wire trace to the state.
    """
    inst = inst.public()
    pp = state.pp
    be = pp.backend
    p = be.p
    d = kpabe._require_policy(pp.n, be.k, c)
    bit, vals = circ_mod.evaluate(c, state.x_star)
    if bit != 0:
        raise GameAbort("key query satisfied by x*; the game forbids it")

    # g_j^(c_1*...*c_j) for each layer, shared across wires of this key.
    cprod: dict[int, mlmap.LevelledElement] = {1: inst.g_c[0]}
    for j in range(2, be.k):
        cprod[j] = cprod[j - 1].pair(inst.g_c[j - 1])

    trace: dict[int, WireTrace] = {}
    comps: dict[int, object] = {}

    def r_at(w: int, level: int) -> mlmap.LevelledElement:
        """g_level^(r_w), whichever form r_w currently has."""
        t = trace[w]
        if t.satisfied:
            return be.encode(t.r, level)
        return cprod[level].mul(be.encode(t.eta, level))

    for w in range(1, c.output_wire + 1):
        j = d[w]
        sat = vals[w - 1] == 1
        if w <= c.n:
            if sat:
                r = be.rand_wire(1, rng)
                z = be.rand_small(rng)
                comps[w] = kpabe._input_components(be, pp.h[w - 1], r, z)
                trace[w] = WireTrace("input", 1, True, r=r, z=z)
            else:
                eta = rng.randrange(p)
                nu = rng.randrange(p)
                y_w = state.y[w - 1]
                # r = c1*c2 + eta, z = -c2 + nu, h_w = g^(y_w + c1):
                # K1 = g^(eta + y_w*nu) * (g^c2)^(-y_w) * (g^c1)^nu
                # K2 = g^(-z) = g^c2 * g^(-nu)
                k1 = (
                    be.encode((eta + y_w * nu) % p, 1)
                    .mul(inst.g_c[1].pow(-y_w % p))
                    .mul(inst.g_c[0].pow(nu))
                )
                k2 = inst.g_c[1].mul(be.encode(nu, 1).inv())
                comps[w] = kpabe.InputKey(k1=k1, k2=k2)
                trace[w] = WireTrace("input", 1, False, eta=eta, nu=nu)
            continue

        g = c.gate(w)
        kind = "or" if g.kind == OR else "and"
        if sat:
            r = be.rand_wire(j, rng)
            a = be.rand_small(rng)
            b = be.rand_small(rng)
            r_a = r_at(g.in1, j)
            r_b = r_at(g.in2, j)
            k3 = be.encode(r, j).mul(r_a.pow(a).inv())
            if g.kind == OR:
                k4 = be.encode(r, j).mul(r_b.pow(b).inv())
                comps[w] = kpabe.OrKey(
                    k1=be.encode(a, 1), k2=be.encode(b, 1), k3=k3, k4=k4
                )
            else:
                comps[w] = kpabe.AndKey(
                    k1=be.encode(a, 1), k2=be.encode(b, 1), k3=k3.mul(r_b.pow(b).inv())
                )
            trace[w] = WireTrace(kind, j, True, r=r, a=a, b=b)
            continue

        eta = rng.randrange(p)
        psi = rng.randrange(p)
        phi = rng.randrange(p)
        g_cj1 = inst.g_c[j]          # g^(c_(j+1)), level 1
        cj1_up = _lift(inst.g_c[j], be, j)
        shift_k = g_cj1.mul(be.encode(psi, 1))   # g^(c_(j+1) + psi)
        if g.kind == OR:
            # both operands are unsatisfied; a = c_(j+1)+psi, b = c_(j+1)+phi
            eta_a = trace[g.in1].eta
            eta_b = trace[g.in2].eta
            k3 = (
                be.encode((eta - psi * eta_a) % p, j)
                .mul(cj1_up.pow(eta_a).inv())
                .mul(cprod[j].pow(psi).inv())
            )
            k4 = (
                be.encode((eta - phi * eta_b) % p, j)
                .mul(cj1_up.pow(eta_b).inv())
                .mul(cprod[j].pow(phi).inv())
            )
            comps[w] = kpabe.OrKey(
                k1=shift_k, k2=g_cj1.mul(be.encode(phi, 1)), k3=k3, k4=k4
            )
            trace[w] = WireTrace(kind, j, False, eta=eta, psi=psi, phi=phi)
        else:
            # one unsatisfied operand is enough; its multiplier takes the
            # c_(j+1) shift, the other multiplier stays plain phi.
            if vals[g.in1 - 1] == 0:
                shifted, dead, live = "a", g.in1, g.in2
            else:
                shifted, dead, live = "b", g.in2, g.in1
            eta_dead = trace[dead].eta
            k3 = (
                be.encode((eta - psi * eta_dead) % p, j)
                .mul(cprod[j].pow(psi).inv())
                .mul(cj1_up.pow(eta_dead).inv())
                .mul(r_at(live, j).pow(phi).inv())
            )
            plain_k = be.encode(phi, 1)
            comps[w] = kpabe.AndKey(
                k1=shift_k if shifted == "a" else plain_k,
                k2=plain_k if shifted == "a" else shift_k,
                k3=k3,
            )
            trace[w] = WireTrace(
                kind, j, False, eta=eta, psi=psi, phi=phi, shifted=shifted
            )

    out = c.output_wire
    k_header = be.encode((state.xi - trace[out].eta) % p, be.k - 1)
    state.key_traces.append({"circuit": c, "wires": trace})
    return kpabe.SecretKey(circuit=c, k_header=k_header, wires=comps)


def omniscient_adversary(pp, ct, keygen_oracle) -> int:
    """Best possible distinguisher on the reference backend: reads exponents
    through the test oracle and checks C_M == g_k^(alpha*s).
    Stands in for 'some adversary with non-trivial advantage'."""
    p = pp.gd.p
    alpha = mlmap.oracle_exponent(pp.g_alpha)
    s = mlmap.oracle_exponent(ct.c_s)
    return 1 if mlmap.oracle_exponent(ct.c_msg) == alpha * s % p else 0


def null_adversary(pp, ct, keygen_oracle) -> int:
    """Learns nothing, always answers 0; its guess is uncorrelated with T."""
    return 0


def run_game(
    gd: mlmap.GroupDescriptor,
    x_star,
    adversary,
    real: bool,
    rng: random.Random,
    log=None,
) -> bool:
    """Plays one selective game: commit to x*, simulate setup and the
    challenge from a fresh instance, let the adversary query keys for
    rejecting policies, and translate its message guess into a realness
    guess (real iff it answers 1).  Returns that guess."""

    def say(msg):
        if log is not None:
            log(msg)

    inst = gen_instance(gd, real, rng, with_witness=False)
    say(f"instance drawn (p={gd.p}, degree {gd.k})")
    say("committed x* = " + "".join(str(b) for b in x_star))
    pp, state = sim_setup(inst, x_star, rng)
    say("setup: public parameters simulated")
    ct = sim_challenge(inst, state)
    say("challenge: ciphertext issued")

    def keygen_oracle(c: Circuit) -> kpabe.SecretKey:
        sk = sim_keygen(inst, state, c, rng)
        say(f"keygen: rejecting policy answered ({c.q} gates, depth {gd.k - 1})")
        return sk

    m_prime = adversary(pp, ct, keygen_oracle)
    say(f"adversary output: {m_prime}")
    guess = m_prime == 1
    say("guess: real" if guess else "guess: random")
    return guess
