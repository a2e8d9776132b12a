"""Security-game simulator: instance generation, simulated setup/challenge/
keys, the per-wire symbolic invariant, and the end-to-end game.

Ground truth comes from the instance witness plus the simulator's recorded
randomizers; every expected exponent is recomputed with plain integer
arithmetic and compared through the exponent oracle.
"""

import random

import pytest

from circuitabe import circuit as cm
from circuitabe import kpabe, mlmap, reduction
from conftest import RecordingRng, StubRng, random_layered_circuit

oe = mlmap.oracle_exponent

GD = mlmap.GroupDescriptor(p=101, k=4)  # depth-3 policies

# OR(1,2) and AND(1,2) at depth 2, AND of both at depth 3: rejects x*=(1,0)
POLICY = cm.Circuit(
    n=2, gates=(cm.Gate(cm.OR, 1, 2), cm.Gate(cm.AND, 1, 2), cm.Gate(cm.AND, 3, 4))
)
X_STAR = (1, 0)

# all-OR tower of the same shape: accepts (1,0)
FRIENDLY = cm.Circuit(
    n=2, gates=(cm.Gate(cm.OR, 1, 2), cm.Gate(cm.OR, 1, 2), cm.Gate(cm.OR, 3, 4))
)


def prefix_product(c_values, count, p):
    out = 1
    for ci in c_values[:count]:
        out = out * ci % p
    return out


def make_game(seed=11, real=True, x_star=X_STAR, gd=GD):
    rng = random.Random(seed)
    inst = reduction.gen_instance(gd, real, rng)
    pp, state = reduction.sim_setup(inst, x_star, rng)
    return inst, pp, state, rng


# --------------------------------------------------------------- gen_instance


def test_gen_instance_real_product():
    rng = random.Random(0)
    inst = reduction.gen_instance(GD, True, rng)
    w = inst.witness
    assert w.real is True
    assert oe(inst.g_s) == w.s
    assert [oe(e) for e in inst.g_c] == list(w.c)
    assert inst.t.level == GD.k
    assert oe(inst.t) == w.s * prefix_product(w.c, GD.k, GD.p) % GD.p


def test_gen_instance_random_t_independent():
    rng = random.Random(1)
    hits = 0
    trials = 400
    for _ in range(trials):
        inst = reduction.gen_instance(GD, False, rng)
        w = inst.witness
        if oe(inst.t) == w.s * prefix_product(w.c, GD.k, GD.p) % GD.p:
            hits += 1
    assert hits / trials <= 0.05  # expected 1/101


def test_gen_instance_degenerate_degree_one():
    gd = mlmap.GroupDescriptor(p=101, k=1)
    inst = reduction.gen_instance(gd, True, random.Random(2))
    w = inst.witness
    assert inst.t.level == 1
    assert oe(inst.t) == w.s * w.c[0] % gd.p


def test_public_strips_witness():
    inst = reduction.gen_instance(GD, True, random.Random(3))
    assert inst.witness is not None
    pub = inst.public()
    assert pub.witness is None
    assert pub.g_s == inst.g_s and pub.t == inst.t


# ------------------------------------------------------------------ sim_setup


def test_sim_setup_attribute_elements():
    inst, pp, state, _ = make_game()
    w = inst.witness
    for i, bit in enumerate(X_STAR):
        want = state.y[i] if bit == 1 else (state.y[i] + w.c[0]) % GD.p
        assert oe(pp.h[i]) == want


def test_sim_setup_public_key_exponent():
    inst, pp, state, _ = make_game()
    w = inst.witness
    want = (state.xi + prefix_product(w.c, GD.k, GD.p)) % GD.p
    assert oe(pp.g_alpha) == want
    assert pp.g_alpha.level == GD.k


def test_sim_setup_validates_x_star():
    inst = reduction.gen_instance(GD, True, random.Random(4))
    with pytest.raises(ValueError):
        reduction.sim_setup(inst, (0, 2), random.Random(5))
    with pytest.raises(ValueError):
        reduction.sim_setup(inst, (), random.Random(5))


def test_sim_setup_works_without_witness():
    inst = reduction.gen_instance(GD, True, random.Random(6), with_witness=False)
    pp, state = reduction.sim_setup(inst, X_STAR, random.Random(7))
    assert pp.n == 2


# -------------------------------------------------------------- sim_challenge


def test_sim_challenge_real_equals_honest_encrypt():
    inst, pp, state, _ = make_game(real=True)
    ct = reduction.sim_challenge(inst, state)
    honest = kpabe.encrypt(pp, X_STAR, 1, StubRng([inst.witness.s]))
    assert ct.c_msg == honest.c_msg
    assert ct.c_s == honest.c_s
    assert ct.c_attr == honest.c_attr
    assert ct.x == tuple(X_STAR)


def test_sim_challenge_random_t_differs_only_in_header():
    inst, pp, state, _ = make_game(seed=21, real=False)
    ct = reduction.sim_challenge(inst, state)
    honest = kpabe.encrypt(pp, X_STAR, 1, StubRng([inst.witness.s]))
    assert ct.c_s == honest.c_s
    assert ct.c_attr == honest.c_attr
    assert ct.c_msg != honest.c_msg  # w.h.p.; seed chosen to avoid the 1/p fluke


def test_sim_challenge_all_ones_covers_every_attribute():
    inst, pp, state, _ = make_game(seed=31, x_star=(1, 1))
    ct = reduction.sim_challenge(inst, state)
    assert set(ct.c_attr) == {1, 2}


def test_sim_challenge_rejects_mismatched_x_star():
    inst, pp, state, _ = make_game()
    with pytest.raises(ValueError):
        reduction.sim_challenge(inst, state, (0, 0))


# ----------------------------------------------------------------- sim_keygen


def recover_key_scalars(pp, sk):
    """Bottom-up oracle recovery of every r_w from the key components alone."""
    p = pp.gd.p
    c = sk.circuit
    d = cm.depths(c)
    recovered = {}
    for w in range(1, c.output_wire + 1):
        comp = sk.wires[w]
        if w <= c.n:
            z = -oe(comp.k2) % p
            recovered[w] = (oe(comp.k1) - oe(pp.h[w - 1]) * z) % p
        else:
            g = c.gate(w)
            a = oe(comp.k1)
            b = oe(comp.k2)
            if isinstance(comp, kpabe.OrKey):
                recovered[w] = (oe(comp.k3) + a * recovered[g.in1]) % p
                # cross-check through the other branch
                assert (oe(comp.k4) + b * recovered[g.in2]) % p == recovered[w]
            else:
                recovered[w] = (
                    oe(comp.k3) + a * recovered[g.in1] + b * recovered[g.in2]
                ) % p
    return recovered


def assert_simulated_key_valid(inst, pp, state, sk):
    """The simulated key must satisfy keygen's defining equations for
    alpha = xi + prod(c), and unsatisfied wires must carry the product form."""
    w = inst.witness
    p = pp.gd.p
    c = sk.circuit
    d = cm.depths(c)
    trace = state.key_traces[-1]["wires"]
    _, vals = cm.evaluate(c, state.x_star)
    recovered = recover_key_scalars(pp, sk)
    for wire in range(1, c.output_wire + 1):
        t = trace[wire]
        assert t.satisfied == (vals[wire - 1] == 1)
        if t.satisfied:
            assert recovered[wire] == t.r
        else:
            j = d[wire]
            want = (prefix_product(w.c, j + 1, p) + t.eta) % p
            assert recovered[wire] == want
        comp = sk.wires[wire]
        if wire <= c.n:
            want_z = t.z if t.satisfied else (-w.c[1] + t.nu) % p
            assert oe(comp.k2) == -want_z % p
            assert oe(comp.k1) == (recovered[wire] + oe(pp.h[wire - 1]) * want_z) % p
        else:
            g = c.gate(wire)
            want_a, want_b = expected_multipliers(t, w, d[wire], p)
            assert oe(comp.k1) == want_a
            assert oe(comp.k2) == want_b
            assert comp.k3.level == d[wire]
    out = c.output_wire
    alpha = (state.xi + prefix_product(w.c, GD.k, p)) % p
    assert oe(sk.k_header) == (alpha - recovered[out]) % p
    t_out = trace[out]
    assert oe(sk.k_header) == (state.xi - t_out.eta) % p


def expected_multipliers(t, witness, j, p):
    if t.satisfied:
        return t.a, t.b
    cj1 = witness.c[j]  # c_(j+1), 0-indexed tuple
    if t.kind == "or":
        return (cj1 + t.psi) % p, (cj1 + t.phi) % p
    if t.shifted == "a":
        return (cj1 + t.psi) % p, t.phi
    return t.phi, (cj1 + t.psi) % p


def test_sim_keygen_identities_fixed_policy():
    inst, pp, state, rng = make_game()
    sk = reduction.sim_keygen(inst, state, POLICY, rng)
    assert_simulated_key_valid(inst, pp, state, sk)


def test_sim_keygen_identities_random_policies():
    outer = random.Random(99)
    for _ in range(15):
        c = random_layered_circuit(outer, n_range=(2, 6), depth_range=(1, 5), q_max=14)
        depth = cm.depth(c)
        gd = mlmap.GroupDescriptor(p=101, k=depth + 1)
        x_star = pick_rejecting_x(c, outer)
        rng = random.Random(outer.random())
        inst = reduction.gen_instance(gd, outer.random() < 0.5, rng)
        pp, state = reduction.sim_setup(inst, x_star, rng)
        sk = reduction.sim_keygen(inst, state, c, rng)
        # local helper mirrors assert_simulated_key_valid but at this gd
        w = inst.witness
        p = gd.p
        trace = state.key_traces[-1]["wires"]
        _, vals = cm.evaluate(c, x_star)
        recovered = recover_key_scalars(pp, sk)
        d = cm.depths(c)
        for wire in range(1, c.output_wire + 1):
            t = trace[wire]
            assert t.satisfied == (vals[wire - 1] == 1)
            if not t.satisfied:
                want = (prefix_product(w.c, d[wire] + 1, p) + t.eta) % p
                assert recovered[wire] == want
            else:
                assert recovered[wire] == t.r
        alpha = (state.xi + prefix_product(w.c, gd.k, p)) % p
        assert oe(sk.k_header) == (alpha - recovered[c.output_wire]) % p


def pick_rejecting_x(c, rng, tries=64):
    for _ in range(tries):
        x = tuple(rng.randint(0, 1) for _ in range(c.n))
        if cm.evaluate(c, x)[0] == 0:
            return x
    return (0,) * c.n


def test_sim_keygen_rejects_satisfied_policy():
    inst, pp, state, rng = make_game()
    with pytest.raises(reduction.GameAbort):
        reduction.sim_keygen(inst, state, FRIENDLY, rng)


def test_sim_keygen_works_without_witness():
    rng = random.Random(41)
    inst = reduction.gen_instance(GD, True, rng, with_witness=False)
    pp, state = reduction.sim_setup(inst, X_STAR, rng)
    sk = reduction.sim_keygen(inst, state, POLICY, rng)
    assert set(sk.wires) == set(range(1, POLICY.output_wire + 1))


def test_sim_keygen_satisfied_wires_sample_like_keygen():
    """Per satisfied wire the simulator draws the same scalars in the same
    order as honest keygen (r from the wire class, then the blinders), and
    the recorded trace equals those draws verbatim."""
    rng = random.Random(51)
    inst = reduction.gen_instance(GD, True, rng)
    pp, state = reduction.sim_setup(inst, X_STAR, rng)
    rec = RecordingRng(52)
    reduction.sim_keygen(inst, state, POLICY, rec)
    trace = state.key_traces[-1]["wires"]
    it = iter(rec.draws)
    for w in range(1, POLICY.output_wire + 1):
        t = trace[w]
        if t.kind == "input":
            first, second = next(it), next(it)
            if t.satisfied:
                assert (t.r, t.z) == (first, second)
            else:
                assert (t.eta, t.nu) == (first, second)
        else:
            first, second, third = next(it), next(it), next(it)
            if t.satisfied:
                assert (t.r, t.a, t.b) == (first, second, third)
            else:
                assert (t.eta, t.psi, t.phi) == (first, second, third)
    assert list(it) == []


def test_randomizer_to_wire_scalar_map_is_bijective():
    """For a fixed witness product P at depth j, eta -> P + eta runs over
    all of Z_p: the shifted form is a re-parameterization, not a skew."""
    p = 101
    inst = reduction.gen_instance(
        mlmap.GroupDescriptor(p=p, k=3), True, random.Random(61)
    )
    prod = prefix_product(inst.witness.c, 2, p)
    image = {(prod + eta) % p for eta in range(p)}
    assert image == set(range(p))


# ------------------------------------------------- witness-derived MSK checks


def witness_msk(inst, state, pp):
    p = pp.gd.p
    alpha = (state.xi + prefix_product(inst.witness.c, pp.gd.k, p)) % p
    return kpabe.MasterSecret(g_alpha=pp.backend.encode(alpha, pp.gd.k - 1))


def test_witness_msk_decrypts_fresh_encryptions():
    inst, pp, state, rng = make_game()
    msk = witness_msk(inst, state, pp)
    sk = kpabe.keygen(msk, pp, FRIENDLY, rng)
    assert kpabe.decrypt(sk, kpabe.encrypt(pp, X_STAR, 1, rng)) == 1
    assert kpabe.decrypt(sk, kpabe.encrypt(pp, X_STAR, 0, rng)) == 0


def test_witness_msk_decrypts_challenge_iff_real():
    for seed, real in ((71, True), (72, False)):
        inst, pp, state, rng = make_game(seed=seed, real=real)
        ct = reduction.sim_challenge(inst, state)
        msk = witness_msk(inst, state, pp)
        sk = kpabe.keygen(msk, pp, FRIENDLY, rng)
        assert kpabe.decrypt(sk, ct) == (1 if real else 0)


# ------------------------------------------------------------------- run_game


def test_run_game_omniscient_adversary():
    rng = random.Random(81)
    assert reduction.run_game(GD, X_STAR, reduction.omniscient_adversary, True, rng)
    assert not reduction.run_game(GD, X_STAR, reduction.omniscient_adversary, False, rng)


def test_run_game_null_adversary():
    rng = random.Random(82)
    assert not reduction.run_game(GD, X_STAR, reduction.null_adversary, True, rng)
    assert not reduction.run_game(GD, X_STAR, reduction.null_adversary, False, rng)


def test_run_game_aborts_on_satisfied_query():
    def cheater(pp, ct, keygen_oracle):
        keygen_oracle(FRIENDLY)  # satisfied by x*; the oracle must refuse
        return 0

    with pytest.raises(reduction.GameAbort):
        reduction.run_game(GD, X_STAR, cheater, True, random.Random(83))


def test_run_game_adversary_with_key_query():
    def querying(pp, ct, keygen_oracle):
        sk = keygen_oracle(POLICY)
        with pytest.raises(kpabe.NotSatisfied):
            kpabe.decrypt(sk, ct)  # the key it got cannot open the challenge
        return reduction.omniscient_adversary(pp, ct, keygen_oracle)

    rng = random.Random(84)
    assert reduction.run_game(GD, X_STAR, querying, True, rng)


def test_run_game_log_transcript():
    lines = []
    reduction.run_game(
        GD, X_STAR, reduction.omniscient_adversary, True, random.Random(85), log=lines.append
    )
    assert any("guess: real" in line for line in lines)
    text = "\n".join(lines)
    assert "challenge" in text and "setup" in text
