"""Reference strategies: full materialization, bounded-heap top-k, and
sort-before-join with early termination, plus the two SQL encodings.

``materialize_and_sort`` is the oracle everything else is tested against. It
evaluates the join as a bag (duplicate input rows stay distinct derivations)
and sorts with the library-wide deterministic tie-break, so direct access,
selection, and the baselines are comparable tuple-for-tuple at every rank.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .analysis import effective_order
from .errors import (
    MultiplePositionsWithOffsetDialect,
    NotApplicable,
    OutOfRange,
    ResultTooLarge,
)
from .model import LEX, AnswerTuple, Instance, OrderSpec, Query, bound_atoms, value_key

FULL_SORT = "FullSort"
TOPK_HEAP = "TopKHeap"
SORT_BEFORE_JOIN = "SortBeforeJoin"

OFFSET_LIMIT = "offset"
CTE_ROW_NUMBER = "cte"


def _join_plan(q: Query, db: Instance):
    """Greedy connected join order with per-atom probe buckets."""
    bound = bound_atoms(q, db)
    acc_vars = list(bound[0].vars)
    rest = set(range(1, len(bound)))
    steps = []
    while rest:
        nxt = next(
            (i for i in sorted(rest) if set(bound[i].vars) & set(acc_vars)),
            min(rest, default=None),
        )
        rest.discard(nxt)
        b = bound[nxt]
        shared = [v for v in b.vars if v in acc_vars]
        acc_idx = tuple(acc_vars.index(v) for v in shared)
        row_shared_idx = tuple(b.vars.index(v) for v in shared)
        new_idx = tuple(i for i, v in enumerate(b.vars) if v not in acc_vars)
        bucket: dict[tuple, list] = {}
        for r in b.rows:
            bucket.setdefault(tuple(r[i] for i in row_shared_idx), []).append(
                tuple(r[i] for i in new_idx)
            )
        steps.append((acc_idx, bucket))
        acc_vars.extend(b.vars[i] for i in new_idx)
    head_idx = tuple(acc_vars.index(v) for v in q.head)
    return bound[0].rows, steps, head_idx


def stream_answers(q: Query, db: Instance):
    """Yield the answer bag as head-order value tuples, depth first."""
    first_rows, steps, head_idx = _join_plan(q, db)
    depth = len(steps)

    def walk(level, acc):
        if level == depth:
            yield tuple(acc[i] for i in head_idx)
            return
        acc_idx, bucket = steps[level]
        for ext in bucket.get(tuple(acc[i] for i in acc_idx), ()):
            yield from walk(level + 1, acc + ext)

    for r in first_rows:
        yield from walk(0, r)


def sort_key_fn(q: Query, o: OrderSpec):
    """Total sort key under the order plus the deterministic tie-break."""
    eff = effective_order(q, o)
    perm = tuple(q.head.index(v) for v in eff)
    if o.kind == LEX:
        return lambda t: tuple(value_key(t[p]) for p in perm)
    wpos = tuple(q.head.index(v) for v in o.vars)
    return lambda t: (
        sum(t[p] for p in wpos),
        tuple(value_key(t[p]) for p in perm),
    )


def materialize_and_sort(q: Query, db: Instance, o: OrderSpec, cap: int = 10**8):
    """Produce and sort the full answer bag; THE oracle for every other path."""
    out = []
    for t in stream_answers(q, db):
        out.append(t)
        if len(out) > cap:
            raise ResultTooLarge(cap)
    out.sort(key=sort_key_fn(q, o))
    return [AnswerTuple(q.head, t) for t in out]


@dataclass(frozen=True)
class StrategyLog:
    requested: str
    ran: str
    reason: str
    answers: int
    k: int

    @property
    def switched(self) -> bool:
        return self.ran != self.requested

    def as_dict(self) -> dict:
        return {
            "requested": self.requested,
            "ran": self.ran,
            "reason": self.reason,
            "answers": self.answers,
            "k": self.k,
        }


class _RevKey:
    """Reversed comparison so heapq keeps the k+1 smallest with pops at the max."""

    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key

    def __lt__(self, other):
        return other.key < self.key


def topk_heap_access(q: Query, db: Instance, o: OrderSpec, k: int, cap: int = 10**8):
    """Bounded-heap access, with the planner's switch to a full sort once
    k ≥ |J|/2; the exact count comes from a pre-pass (we control both sides).
    Returns (answer, StrategyLog)."""
    count = sum(1 for _ in stream_answers(q, db))
    if k < 0 or k >= count:
        raise OutOfRange(k, count)
    if 2 * k >= count:
        log = StrategyLog(TOPK_HEAP, FULL_SORT, "k >= |J|/2", count, k)
        return materialize_and_sort(q, db, o, cap)[k], log
    keyf = sort_key_fn(q, o)
    heap = []
    for t in stream_answers(q, db):
        heapq.heappush(heap, (_RevKey(keyf(t)), t))
        if len(heap) > k + 1:
            heapq.heappop(heap)
    log = StrategyLog(TOPK_HEAP, TOPK_HEAP, "k < |J|/2", count, k)
    return AnswerTuple(q.head, heap[0][1]), log


def _path_chain(q: Query):
    """Variable chain v0..vm of a path-shaped query, or None."""
    pairs = []
    for a in q.atoms:
        vs = tuple(dict.fromkeys(a.vars))
        if len(vs) != 2:
            return None
        pairs.append(frozenset(vs))
    if len(set(pairs)) != len(pairs):
        return None  # repeated edge
    adj: dict[str, list[str]] = {}
    for p in pairs:
        x, y = sorted(p)
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)
    if len(adj) != len(pairs) + 1:
        return None
    ends = sorted(v for v, ns in adj.items() if len(ns) == 1)
    if len(ends) != 2 or any(len(ns) > 2 for ns in adj.values()):
        return None
    chain = [ends[0]]
    prev = None
    while True:
        nxt = [v for v in adj[chain[-1]] if v != prev]
        if not nxt:
            break
        prev = chain[-1]
        chain.append(nxt[0])
    return chain if len(chain) == len(adj) else None


@dataclass(frozen=True)
class EarlyStopLog:
    emitted: int
    block_size: int

    def as_dict(self) -> dict:
        return {"emitted": self.emitted, "block_size": self.block_size}


def sort_before_join_access(q: Query, db: Instance, o: OrderSpec, k: int):
    """Sorted streaming plan for a single-attribute order on a path join.

    Joins the atoms up to the order attribute's position, sorts that
    intermediate once in attribute order, then streams it through per-tuple
    probes of the remaining relations ("nested loop" row-at-a-time), stopping
    as soon as the block containing position k is complete. Ties beyond the
    attribute are re-ranked inside that one block with the deterministic
    tie-break. Returns (answer, EarlyStopLog)."""
    if o.kind != LEX or len(o.vars) != 1:
        raise NotApplicable("sort-before-join needs a single-attribute lex order")
    chain = _path_chain(q)
    if chain is None:
        raise NotApplicable("sort-before-join needs a path-shaped join")
    b = o.vars[0]
    bound = bound_atoms(q, db)
    by_edge = {frozenset(a.vars): i for i, a in enumerate(bound)}
    chain_atoms = [by_edge[frozenset((chain[i], chain[i + 1]))] for i in range(len(chain) - 1)]
    j = chain.index(b)

    split = max(j, 1)
    acc_vars = list(chain[: split + 1])
    inter = None
    for step, ai in enumerate(chain_atoms[:split]):
        a = bound[ai]
        left, right = chain[step], chain[step + 1]
        li, ri = a.vars.index(left), a.vars.index(right)
        if inter is None:
            inter = [(r[li], r[ri]) for r in a.rows]
            continue
        bucket: dict = {}
        for r in a.rows:
            bucket.setdefault(r[li], []).append(r[ri])
        inter = [p + (nv,) for p in inter for nv in bucket.get(p[-1], ())]
    bpos = acc_vars.index(b)
    inter.sort(key=lambda t: value_key(t[bpos]))  # the one sort this plan inserts

    probes = []
    for step, ai in enumerate(chain_atoms[split:], start=split):
        a = bound[ai]
        left, right = chain[step], chain[step + 1]
        li, ri = a.vars.index(left), a.vars.index(right)
        bucket = {}
        for r in a.rows:
            bucket.setdefault(r[li], []).append(r[ri])
        probes.append(bucket)

    head_idx = tuple((acc_vars + chain[split + 1:]).index(v) for v in q.head)

    def walk(level, acc):
        if level == len(probes):
            yield tuple(acc[i] for i in head_idx)
            return
        for nv in probes[level].get(acc[-1], ()):
            yield from walk(level + 1, acc + (nv,))

    hb = q.head.index(b)
    emitted = 0
    block: list[tuple] = []
    block_start = 0
    for row in inter:
        for ans in walk(0, row):
            if block and value_key(ans[hb]) != value_key(block[-1][hb]):
                if emitted > k:
                    break
                block_start = emitted
                block = []
            block.append(ans)
            emitted += 1
        else:
            continue
        break
    if emitted <= k:
        raise OutOfRange(k, emitted)
    block.sort(key=sort_key_fn(q, o))
    log = EarlyStopLog(emitted=emitted, block_size=len(block))
    return AnswerTuple(q.head, block[k - block_start]), log


def emit_sql(q: Query, o: OrderSpec, positions, dialect: str) -> str:
    """Canonical SQL for ranked positions: OFFSET/LIMIT for one position, or
    a ROW_NUMBER CTE for several (row_idx is one-based; positions are not).

    Column names follow the query's variable binding; tie-break columns are
    appended to ORDER BY so external engines reproduce the same total order.
    """
    if dialect not in (OFFSET_LIMIT, CTE_ROW_NUMBER):
        raise ValueError(f"unknown dialect {dialect!r}")
    positions = list(positions)
    if dialect == OFFSET_LIMIT and len(positions) != 1:
        raise MultiplePositionsWithOffsetDialect()

    seen: dict[str, int] = {}
    aliases = []
    for a in q.atoms:
        seen[a.relation] = seen.get(a.relation, 0) + 1
        aliases.append(a.relation if seen[a.relation] == 1 else f"{a.relation}_{seen[a.relation]}")

    owner: dict[str, str] = {}
    parts = []
    for i, a in enumerate(q.atoms):
        table = a.relation if aliases[i] == a.relation else f"{a.relation} AS {aliases[i]}"
        if i == 0:
            parts.append(table)
        else:
            conds = [
                f"{owner[v]}.{v}={aliases[i]}.{v}"
                for v in dict.fromkeys(a.vars)
                if v in owner
            ]
            parts.append(f"JOIN {table} ON " + (" AND ".join(conds) if conds else "TRUE"))
        for v in a.vars:
            owner.setdefault(v, aliases[i])
    from_clause = "FROM " + " ".join(parts)

    full = q.head_set == q.variables
    cols = "*" if full else ", ".join(f"{owner[v]}.{v}" for v in q.head)
    eff = effective_order(q, o)
    order_list = ",".join(eff) if o.kind == LEX else ",".join(["+".join(o.vars), *eff])

    if dialect == OFFSET_LIMIT:
        return (
            f"SELECT {cols}\n"
            f"{from_clause}\n"
            f"ORDER BY {order_list}\n"
            f"OFFSET {positions[0]}\n"
            f"LIMIT 1\n"
        )
    ks = ", ".join(str(k + 1) for k in positions)
    return (
        "WITH ordered_result AS (\n"
        f"  SELECT {cols},\n"
        f"    ROW_NUMBER() OVER (ORDER BY {order_list}) AS row_idx\n"
        f"  {from_clause})\n"
        "SELECT * FROM ordered_result\n"
        f"WHERE row_idx IN ({ks})\n"
    )
