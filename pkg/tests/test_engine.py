import random

from qubitcp.core import Status
from qubitcp.engine import (
    AbsEqOne,
    AbsLeOne,
    AllDifferent,
    AllowedPairs,
    GatePersistence,
    Involution,
    Limits,
    MovementFlag,
    Store,
    SumAtMost,
    bits,
    mask_of,
    solve,
)
from qubitcp.instances import InstanceSpec
from qubitcp.model import build_model

FULL4 = mask_of(range(1, 5))


def run(domains, *props):
    store = Store(domains)
    for p in props:
        store.add(p)
    ok = store.fixpoint()
    return ok, [sorted(bits(d)) for d in store.doms]


def test_bits_and_masks():
    assert sorted(bits(mask_of([1, 3, 4]))) == [1, 3, 4]


def test_alldifferent_removes_fixed_values():
    ok, doms = run([mask_of([1]), FULL4, FULL4], AllDifferent((0, 1, 2)))
    assert ok and doms[1] == [2, 3, 4]


def test_alldifferent_pigeonhole_failure():
    ok, _ = run([mask_of([1, 2])] * 3, AllDifferent((0, 1, 2)))
    assert not ok


def test_alldifferent_hidden_single():
    # value 4 fits only variable 2 in a permutation of 1..4
    doms = [mask_of([1, 2, 3])] * 2 + [FULL4, mask_of([1, 2, 3])]
    ok, out = run(doms, AllDifferent((0, 1, 2, 3), strong=True))
    assert ok and out[2] == [4]


def test_allowed_pairs_support():
    ok, doms = run([FULL4, mask_of([1])], AllowedPairs(0, 1, [(2, 1), (1, 2), (3, 4)]))
    assert ok and doms[0] == [2]


def test_abs_eq_one():
    ok, doms = run([mask_of([1]), FULL4], AbsEqOne(0, 1))
    assert ok and doms[1] == [2]


def test_abs_le_one():
    ok, doms = run([mask_of([3]), FULL4], AbsLeOne(0, 1))
    assert ok and doms[1] == [2, 3, 4]


def test_movement_flag_zero_freezes_positions():
    doms = [1, mask_of([1, 2]), FULL4]
    ok, out = run(doms, MovementFlag(0, (1,), (2,)))
    assert ok and out[2] == [1, 2]


def test_movement_flag_forced_on_by_disjoint_domains():
    ok, out = run([3, mask_of([1]), mask_of([2])], MovementFlag(0, (1,), (2,)))
    assert ok and out[0] == [1]


def test_gate_persistence_stay_or_swap():
    # p on 1, q on 2: afterwards each sits on 1 or 2 only
    doms = [mask_of([1]), mask_of([2]), FULL4, FULL4]
    ok, out = run(doms, GatePersistence(0, 1, 2, 3))
    assert ok and out[2] == [1, 2] and out[3] == [1, 2]
    doms = [mask_of([1]), mask_of([2]), mask_of([2]), FULL4]
    ok, out = run(doms, GatePersistence(0, 1, 2, 3))
    assert ok and out[3] == [1]


def test_involution_rejects_rotation():
    before = [mask_of([v]) for v in (1, 2, 3)]
    after = [mask_of([v]) for v in (2, 3, 1)]
    ok, _ = run(before + after, Involution((0, 1, 2), (3, 4, 5)))
    assert not ok


def test_sum_at_most_clears_remaining_flags():
    ok, out = run([2, 3, 3], SumAtMost((0, 1, 2), 1))
    assert ok and out[1] == [0] and out[2] == [0]


def test_undo_restores_exact_state():
    model = build_model(InstanceSpec(5, 3, "linear", 2).problem())
    store = model.new_store()
    assert store.fixpoint()
    before = list(store.doms)
    checksum = store.checksum()
    rng = random.Random(0)
    for _ in range(20):
        mark = store.mark()
        var = rng.choice([v for v, d in enumerate(store.doms) if d & (d - 1)])
        value = rng.choice(list(bits(store.doms[var])))
        store.set(var, 1 << value)
        store.fixpoint()
        store.undo(mark)
        store.queue.clear()
        store.queued = [False] * len(store.queued)
        assert store.doms == before and store.checksum() == checksum


def test_solve_strategies_agree():
    for seed in range(4):
        model = build_model(InstanceSpec(5, 4, "linear", seed).problem())
        a = solve(model, "ascent")
        b = solve(model, "bnb")
        assert a.status is b.status is Status.OPTIMAL
        assert a.best.objective == b.best.objective


def test_solve_is_deterministic():
    model = build_model(InstanceSpec(5, 5, "linear", 1).problem())
    a = solve(model)
    b = solve(model)
    assert a.best == b.best and a.stats.nodes == b.stats.nodes


def test_state_cache_preserves_optimum():
    for seed in range(3):
        model = build_model(InstanceSpec(5, 4, "lattice", seed, 1, 5).problem(variant="general"))
        assert solve(model, state_cache=False).best.objective == solve(model).best.objective


def test_node_limit_reports_unknown_or_feasible():
    model = build_model(InstanceSpec(7, 7, "linear", 0).problem())
    out = solve(model, "ascent", Limits(node_limit=50))
    assert out.status is Status.UNKNOWN and out.best is None
    out = solve(model, "bnb", Limits(node_limit=2000))
    assert out.status in (Status.FEASIBLE, Status.UNKNOWN)
    if out.best is not None:
        assert out.lower_bound <= out.best.objective
