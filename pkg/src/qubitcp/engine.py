"""A small finite-domain constraint engine.

Domains are Python ints used as bitsets: bit ``v`` set means value ``v`` is
still possible. Propagators run from a FIFO queue to a fixpoint; search is a
depth-first, chronologically backtracking walk over a static variable order.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Optional, Sequence

from .core import CompiledCircuit, SearchStats, SolveOutcome, Status

if TYPE_CHECKING:
    from .model import CPModel

LOG = logging.getLogger(__name__)


def bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(values) -> int:
    m = 0
    for v in values:
        m |= 1 << v
    return m


def is_fixed(mask: int) -> bool:
    return mask != 0 and mask & (mask - 1) == 0


def value_of(mask: int) -> int:
    return mask.bit_length() - 1


class Store:
    """Variable domains with a trail for exact restoration on backtrack."""

    def __init__(self, domains: Sequence[int]):
        self.doms = list(domains)
        self.trail: list[tuple[int, int]] = []
        self.watchers: list[list[int]] = [[] for _ in self.doms]
        self.fix_watchers: list[list[int]] = [[] for _ in self.doms]
        self.propagators: list[Propagator] = []
        self.queue: deque[int] = deque()
        self.queued: list[bool] = []
        self.running = -1
        self.propagations = 0
        self.budget: Optional[int] = None

    def add(self, prop: "Propagator") -> None:
        index = len(self.propagators)
        self.propagators.append(prop)
        self.queued.append(True)
        self.queue.append(index)
        lists = self.fix_watchers if prop.on_fix else self.watchers
        for var in set(prop.scope):
            lists[var].append(index)

    def set(self, var: int, mask: int) -> bool:
        old = self.doms[var]
        if mask == old:
            return True
        if not mask:
            return False
        self.trail.append((var, old))
        self.doms[var] = mask
        queued = self.queued
        running = self.running
        for p in self.watchers[var]:
            if not queued[p] and p != running:
                queued[p] = True
                self.queue.append(p)
        if mask & (mask - 1) == 0:
            for p in self.fix_watchers[var]:
                if not queued[p] and p != running:
                    queued[p] = True
                    self.queue.append(p)
        return True

    def restrict(self, var: int, mask: int) -> bool:
        return self.set(var, self.doms[var] & mask)

    def fixpoint(self) -> bool:
        queue, queued, props = self.queue, self.queued, self.propagators
        while queue:
            p = queue.popleft()
            queued[p] = False
            self.running = p
            self.propagations += 1
            ok = props[p].propagate(self)
            self.running = -1
            if not ok:
                for q in queue:
                    queued[q] = False
                queue.clear()
                return False
        return True

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        trail, doms = self.trail, self.doms
        while len(trail) > mark:
            var, old = trail.pop()
            doms[var] = old

    def checksum(self) -> int:
        return hash(tuple(self.doms))


class Propagator:
    """Filtering for one constraint. ``propagate`` returns False on failure.

    Every propagator here is idempotent, so the store never re-queues the one
    currently running.
    """

    scope: tuple[int, ...] = ()
    on_fix = False  # wake only when a scope variable becomes fixed

    def propagate(self, store: Store) -> bool:
        raise NotImplementedError


class AllDifferent(Propagator):
    """Fixed-value elimination plus a pigeonhole check on the domain union.

    With ``strong`` set, a constraint whose variables exactly cover the union
    of their domains is treated as a permutation: a value left in a single
    domain is assigned there.
    """

    def __init__(self, scope: Sequence[int], strong: bool = False):
        self.scope = tuple(scope)
        self.strong = strong
        self.on_fix = not strong

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        scope = self.scope
        size = len(scope)
        done = 0
        while True:
            fixed = 0
            for v in scope:
                d = doms[v]
                if d & (d - 1) == 0:
                    if fixed & d:
                        return False
                    fixed |= d
            if fixed != done:
                fresh = fixed & ~done
                for v in scope:
                    d = doms[v]
                    if d & (d - 1) and d & fresh:
                        if not store.set(v, d & ~fresh):
                            return False
                done = fixed
                continue
            once = twice = 0
            for v in scope:
                d = doms[v]
                twice |= once & d
                once |= d
            count = once.bit_count()
            if count < size:
                return False
            if not self.strong or count != size:
                return True
            singles = once & ~twice & ~fixed
            if not singles:
                return True
            for v in scope:
                d = doms[v]
                hit = d & singles
                if hit:
                    if hit & (hit - 1):
                        return False
                    if not store.set(v, hit):
                        return False


class AllowedPairs(Propagator):
    """Generalized arc consistency for a binary table constraint."""

    def __init__(self, a: int, b: int, tuples):
        self.scope = (a, b)
        self.a, self.b = a, b
        sup_a: dict[int, int] = {}
        sup_b: dict[int, int] = {}
        for va, vb in tuples:
            sup_a[va] = sup_a.get(va, 0) | (1 << vb)
            sup_b[vb] = sup_b.get(vb, 0) | (1 << va)
        if not sup_a:
            raise ValueError("allowed-pairs needs at least one tuple")
        self.sup_a, self.sup_b = sup_a, sup_b

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        db = doms[self.b]
        keep = 0
        sup_a = self.sup_a
        for v in bits(doms[self.a]):
            if sup_a.get(v, 0) & db:
                keep |= 1 << v
        if not store.set(self.a, keep):
            return False
        keep_b = 0
        sup_b = self.sup_b
        for w in bits(db):
            if sup_b.get(w, 0) & keep:
                keep_b |= 1 << w
        return store.set(self.b, keep_b)


class AbsEqOne(Propagator):
    """|a - b| = 1."""

    def __init__(self, a: int, b: int):
        self.scope = (a, b)
        self.a, self.b = a, b

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        a, b = self.a, self.b
        da, db = doms[a], doms[b]
        na = da & ((db << 1) | (db >> 1))
        if na != da and not store.set(a, na):
            return False
        nb = db & ((na << 1) | (na >> 1))
        return nb == db or store.set(b, nb)


class AbsLeOne(Propagator):
    """|a - b| <= 1."""

    def __init__(self, a: int, b: int):
        self.scope = (a, b)
        self.a, self.b = a, b

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        a, b = self.a, self.b
        da, db = doms[a], doms[b]
        na = da & (db | (db << 1) | (db >> 1))
        if na != da and not store.set(a, na):
            return False
        nb = db & (na | (na << 1) | (na >> 1))
        return nb == db or store.set(b, nb)


class Equal(Propagator):
    def __init__(self, a: int, b: int):
        self.scope = (a, b)
        self.a, self.b = a, b

    def propagate(self, store: Store) -> bool:
        m = store.doms[self.a] & store.doms[self.b]
        return store.set(self.a, m) and store.set(self.b, m)


class MovementFlag(Propagator):
    """z = 1 iff some position differs between two consecutive layers."""

    def __init__(self, z: int, before: Sequence[int], after: Sequence[int]):
        self.z = z
        self.pairs = tuple(zip(before, after))
        self.scope = (z, *before, *after)

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        dz = doms[self.z]
        if dz == 1:  # z = 0: nobody moves
            for x, y in self.pairs:
                m = doms[x] & doms[y]
                if not (store.set(x, m) and store.set(y, m)):
                    return False
            return True
        if dz == 2:
            return True
        all_still = True
        for x, y in self.pairs:
            dx, dy = doms[x], doms[y]
            common = dx & dy
            if not common:
                return store.set(self.z, 2)
            if all_still and not (dx == dy and dx & (dx - 1) == 0):
                all_still = False
        if all_still:
            return store.set(self.z, 1)
        return True


class GatePersistence(Propagator):
    """Across a gate transition the pair either both stays or swaps places."""

    def __init__(self, p: int, q: int, p_next: int, q_next: int):
        self.scope = (p, q, p_next, q_next)
        self.vars = self.scope

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        while True:
            before = [doms[v] for v in self.vars]
            if not self._narrow(store):
                return False
            if before == [doms[v] for v in self.vars]:
                return True

    def _narrow(self, store: Store) -> bool:
        p, q, pn, qn = self.vars
        doms = store.doms
        dp, dq, dpn, dqn = doms[p], doms[q], doms[pn], doms[qn]
        stay = (dp & dpn) and (dq & dqn)
        swap = (dp & dqn) and (dq & dpn)
        if stay and swap:
            return (
                store.set(p, dp & (dpn | dqn))
                and store.set(q, dq & (dpn | dqn))
                and store.set(pn, dpn & (dp | dq))
                and store.set(qn, dqn & (dp | dq))
            )
        if stay:
            a, b = dp & dpn, dq & dqn
            return store.set(p, a) and store.set(pn, a) and store.set(q, b) and store.set(qn, b)
        if swap:
            a, b = dp & dqn, dq & dpn
            return store.set(p, a) and store.set(qn, a) and store.set(q, b) and store.set(pn, b)
        return False


class Involution(Propagator):
    """Movement between two layers is a product of disjoint transpositions.

    Prunes only once the earlier layer's occupant of a node is known: a
    qubit may move from i to j only if j's occupant can move to i.
    """

    def __init__(self, before: Sequence[int], after: Sequence[int]):
        self.before = tuple(before)
        self.after = tuple(after)
        self.scope = (*before, *after)
        self.on_fix = True

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        occupant: dict[int, int] = {}
        for k, x in enumerate(self.before):
            d = doms[x]
            if d & (d - 1) == 0:
                occupant[d.bit_length() - 1] = k
        changed = True
        while changed:
            changed = False
            for k, x in enumerate(self.before):
                d = doms[x]
                if d & (d - 1):
                    continue
                i = d.bit_length() - 1
                dn = doms[self.after[k]]
                keep = dn
                for j in bits(dn):
                    if j == i:
                        continue
                    other = occupant.get(j)
                    if other is not None and not (doms[self.after[other]] >> i) & 1:
                        keep &= ~(1 << j)
                if keep != dn:
                    if not store.set(self.after[k], keep):
                        return False
                    changed = True
        return True


class LookaheadBound(Propagator):
    """Enough SWAP rounds must precede every later gate layer.

    Each round or merged transition moves a qubit at most one edge, so a
    pair at distance d that must be adjacent at a later gate layer needs at
    least ceil((d - 1 - merged) / 2) active flags in between, where ``merged``
    counts gate transitions on the way that may move either qubit. Acts as
    soon as both qubits of a pair are fixed in this layer; the global flag
    budget is read from ``store.budget`` when set.
    """

    def __init__(self, xs, targets, all_flags, dist):
        self.xs = tuple(xs)
        # targets: (flags_between, ((p, q, merged), ...)) with 0-based qubits
        self.targets = tuple((tuple(f), tuple(g)) for f, g in targets)
        self.all_flags = tuple(all_flags)
        self.dist = dist
        self.scope = self.xs
        self.on_fix = True

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        xs = self.xs
        dist = self.dist
        budget = store.budget
        ones = -1
        for flags, gates in self.targets:
            need = 0
            for p, q, merged in gates:
                dp, dq = doms[xs[p]], doms[xs[q]]
                if dp & (dp - 1) or dq & (dq - 1):
                    continue
                rounds = (dist[dp.bit_length() - 1][dq.bit_length() - 1] - merged) // 2
                if rounds > need:
                    need = rounds
            if need <= 0:
                continue
            open_flags = [z for z in flags if doms[z] != 1]
            if len(open_flags) < need:
                return False
            if budget is not None:
                if ones < 0:
                    ones = sum(1 for z in self.all_flags if doms[z] == 2)
                inside = sum(1 for z in flags if doms[z] == 2)
                if need > budget - (ones - inside):
                    return False
            if len(open_flags) == need:
                for z in open_flags:
                    if doms[z] == 3 and not store.set(z, 2):
                        return False
        return True


class AtLeast(Propagator):
    """Binary flags with a >= b."""

    on_fix = True

    def __init__(self, a: int, b: int):
        self.scope = (a, b)
        self.a, self.b = a, b

    def propagate(self, store: Store) -> bool:
        if store.doms[self.b] == 2 and not store.set(self.a, store.doms[self.a] & 2):
            return False
        if store.doms[self.a] == 1:
            return store.set(self.b, store.doms[self.b] & 1)
        return True


class SumAtMost(Propagator):
    """Sum of binary flags <= bound."""

    on_fix = True

    def __init__(self, flags: Sequence[int], bound: int):
        self.scope = tuple(flags)
        self.bound = bound

    def propagate(self, store: Store) -> bool:
        doms = store.doms
        ones = sum(1 for z in self.scope if doms[z] == 2)
        if ones > self.bound:
            return False
        if ones == self.bound:
            for z in self.scope:
                if doms[z] == 3 and not store.set(z, 1):
                    return False
        return True


PROPAGATORS: dict[str, Callable[..., Propagator]] = {
    "alldifferent": AllDifferent,
    "allowed_pairs": AllowedPairs,
    "abs_eq_one": AbsEqOne,
    "abs_le_one": AbsLeOne,
    "equal": Equal,
    "movement_flag": MovementFlag,
    "gate_persistence": GatePersistence,
    "involution": Involution,
    "at_least": AtLeast,
    "lookahead_bound": LookaheadBound,
}


def post(store: Store, kind: str, *args) -> Propagator:
    prop = PROPAGATORS[kind](*args)
    store.add(prop)
    return prop


# Search --------------------------------------------------------------------


@dataclass(frozen=True)
class Limits:
    time_limit: Optional[float] = None  # seconds
    node_limit: Optional[int] = None


@dataclass
class SearchConfig:
    strategy: str = "ascent"  # "ascent" or "bnb"
    state_cache: bool = True
    strong_alldiff: bool = True


class _Abort(Exception):
    pass


@dataclass
class _Run:
    model: "CPModel"
    limits: Limits
    config: SearchConfig
    stats: SearchStats
    started: float
    cache: dict = field(default_factory=dict)


class Search:
    """Depth-first search over one model, reusable across objective bounds."""

    def __init__(self, model: "CPModel", limits: Limits, config: SearchConfig):
        self.model = model
        self.limits = limits
        self.config = config
        self.stats = SearchStats()
        self.started = time.perf_counter()
        self.cache: dict[tuple, int] = {}
        order = []
        prev_of = {}
        # layer ell becomes a cache boundary once order[:ready[ell]] is fixed
        ready = []
        for ell, (xs, z) in enumerate(model.layer_vars):
            for k, x in enumerate(xs):
                order.append(x)
                if ell:
                    prev_of[x] = model.layer_vars[ell - 1][0][k]
            ready.append(len(order))
            if z is not None:
                order.append(z)
        self.order = order
        self.prev_of = prev_of
        self.boundary_at = []
        ell = -1
        for k in range(len(order) + 1):
            while ell + 1 < len(ready) and ready[ell + 1] <= k:
                ell += 1
            self.boundary_at.append(ell)
        # at a gate layer a merged SWAP can flip any gate pair for free, so
        # placements differing only in pair orientation share a cache entry
        self.pairs_at = {
            ell: tuple((p - 1, q - 1) for p, q in pairs)
            for ell, pairs in model.gate_pairs().items()
        }
        flags = [z for _, z in model.layer_vars]
        self.flags_before = [[z for z in flags[:ell] if z is not None] for ell in range(len(flags))]

    def _check_limits(self) -> None:
        stats = self.stats
        if self.limits.node_limit is not None and stats.nodes >= self.limits.node_limit:
            raise _Abort
        if self.limits.time_limit is not None and stats.nodes % 256 == 0:
            if time.perf_counter() - self.started > self.limits.time_limit:
                raise _Abort

    def feasible(self, bound: int) -> Optional[list[int]]:
        """Solve with sum of flags <= bound. None when proven infeasible."""
        model = self.model
        store = model.new_store(self.config.strong_alldiff)
        store.budget = bound
        store.add(SumAtMost(model.flag_vars, bound))
        self.store = store
        self.bound = bound
        try:
            if not store.fixpoint():
                return None
            return self._dfs(0, -1)
        finally:
            self.stats.propagations += store.propagations

    def _dfs(self, k: int, boundary: int) -> Optional[list[int]]:
        store = self.store
        doms = store.doms
        order = self.order
        n = len(order)
        while k < n and doms[order[k]] & (doms[order[k]] - 1) == 0:
            k += 1
        if k == n:
            return [value_of(d) for d in doms]
        key = None
        if self.config.state_cache:
            ell = self.boundary_at[k]
            if ell > boundary:
                boundary = ell
                xs, z = self.model.layer_vars[ell]
                used = sum(1 for f in self.flags_before[ell] if doms[f] == 2)
                remaining = self.bound - used
                placement = [doms[x] for x in xs]
                for a, b in self.pairs_at.get(ell, ()):
                    if placement[a] > placement[b]:
                        placement[a], placement[b] = placement[b], placement[a]
                key = (ell, tuple(placement), None if z is None else doms[z])
                if self.cache.get(key, -1) >= remaining:
                    self.stats.failures += 1
                    return None
        var = order[k]
        dom = doms[var]
        values = list(bits(dom))
        prev = self.prev_of.get(var)
        if prev is not None:
            pd = doms[prev]
            if pd & dom and pd & (pd - 1) == 0:
                stay = value_of(pd)
                values.remove(stay)
                values.insert(0, stay)
        for v in values:
            self.stats.nodes += 1
            self._check_limits()
            mark = store.mark()
            if store.set(var, 1 << v) and store.fixpoint():
                found = self._dfs(k + 1, boundary)
                if found is not None:
                    return found
            else:
                self.stats.failures += 1
            store.undo(mark)
        if key is not None:
            self.cache[key] = max(self.cache.get(key, -1), remaining)
        return None


def solve(
    model: "CPModel",
    strategy: str = "ascent",
    limits: Limits = Limits(),
    state_cache: bool = True,
) -> SolveOutcome:
    """Minimize the number of active flags.

    ``ascent`` proves optimality bottom-up by solving feasibility for bounds
    0, 1, 2, ...; ``bnb`` tightens an incumbent until the bound is infeasible.
    """
    if strategy not in ("ascent", "bnb"):
        raise ValueError(f"unknown strategy {strategy!r}")
    search = Search(model, limits, SearchConfig(strategy, state_cache))
    max_bound = len(model.flag_vars)
    best: Optional[CompiledCircuit] = None
    lower = 0
    status = Status.UNKNOWN
    try:
        if strategy == "ascent":
            for bound in range(max_bound + 1):
                lower = bound
                found = search.feasible(bound)
                if found is not None:
                    best = model.decode(found)
                    status = Status.OPTIMAL
                    break
            else:
                status = Status.INFEASIBLE
        else:
            bound = max_bound
            while bound >= 0:
                found = search.feasible(bound)
                if found is None:
                    break
                best = model.decode(found)
                bound = best.objective - 1
            if best is None:
                status = Status.INFEASIBLE
            else:
                status = Status.OPTIMAL
                lower = best.objective
    except _Abort:
        status = Status.FEASIBLE if best is not None else Status.UNKNOWN
        if strategy == "bnb":
            lower = 0
    search.stats.wall_time = time.perf_counter() - search.started
    LOG.debug("solve %s: %s lb=%d stats=%s", strategy, status.value, lower, search.stats)
    return SolveOutcome(status, best, lower, search.stats)
