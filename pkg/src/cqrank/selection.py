"""One-off selection: the k-th answer from scratch, no index, no sorting.

Each access fixes the order's variables one at a time: count the answers per
candidate value of the next variable (linear message passing on the join
tree), then weighted-quickselect the residual rank into a value block. The
variable sequence is the same deterministic tie-break order the direct-access
engine uses, so both produce identical tuples wherever both are routed.
"""

from __future__ import annotations

import random

from .analysis import SINGLE_LEX, SINGLE_SUM, JoinTree, analyze, gyo_join_tree
from .errors import KOutOfRange, NotRouted, OutOfRange
from .instrument import SelectStats
from .model import (
    AnswerTuple,
    Instance,
    OrderSpec,
    Query,
    bound_atoms,
    tuple_key,
    value_key,
)


def _filtered_tables(bound, fixed, stats: SelectStats | None):
    tables = []
    for b in bound:
        if stats is not None:
            stats.rows_touched += len(b.rows)
        fpos = [(i, fixed[v]) for i, v in enumerate(b.vars) if v in fixed]
        t: dict[tuple, int] = {}
        if fpos:
            for r in b.rows:
                if all(r[i] == val for i, val in fpos):
                    t[r] = t.get(r, 0) + 1
        else:
            for r in b.rows:
                t[r] = t.get(r, 0) + 1
        tables.append(t)
    return tables


def _sep_vars(bound, tree, u):
    # canonical separator sequence: the child atom's own variable order
    sep = tree.separator(u)
    return tuple(v for v in bound[u].vars if v in sep)


def _messages_to_root(bound, tables, tree, root, stats: SelectStats | None):
    """Bottom-up extension counts per row, toward the chosen root atom."""
    tree = tree.rerooted(root)
    children = tree.children()
    msg: list[dict[tuple, int] | None] = [None] * len(bound)
    for u in tree.postorder():
        if u == root:
            continue
        sidx = tuple(bound[u].vars.index(v) for v in _sep_vars(bound, tree, u))
        kidinfo = [
            (tuple(bound[u].vars.index(v) for v in _sep_vars(bound, tree, c)), msg[c])
            for c in children[u]
        ]
        if stats is not None:
            stats.rows_touched += len(tables[u])
        out: dict[tuple, int] = {}
        for row, cnt in tables[u].items():
            w = cnt
            for cidx, m in kidinfo:
                w *= m.get(tuple(row[i] for i in cidx), 0)
                if not w:
                    break
            if w:
                key = tuple(row[i] for i in sidx)
                out[key] = out.get(key, 0) + w
        msg[u] = out
    root_children = [
        (tuple(bound[root].vars.index(v) for v in _sep_vars(bound, tree, c)), msg[c])
        for c in children[root]
    ]
    return root_children


def conditional_value_counts(
    q: Query,
    db: Instance,
    fixed: dict,
    x: str,
    stats: SelectStats | None = None,
    _bound=None,
) -> list[tuple]:
    """(value, answer count) per candidate value of ``x`` consistent with
    ``fixed``, in first-occurrence order of the rooted atom. O(n) per call."""
    bound = _bound if _bound is not None else bound_atoms(q, db)
    tables = _filtered_tables(bound, fixed, stats)
    tree = gyo_join_tree([b.vars for b in bound])
    assert isinstance(tree, JoinTree), "counting requires an acyclic query"
    root = next(i for i, b in enumerate(bound) if x in b.vars)
    kidinfo = _messages_to_root(bound, tables, tree, root, stats)
    xpos = bound[root].vars.index(x)
    if stats is not None:
        stats.rows_touched += len(tables[root])
    counts: dict = {}
    for row, cnt in tables[root].items():
        w = cnt
        for cidx, m in kidinfo:
            w *= m.get(tuple(row[i] for i in cidx), 0)
            if not w:
                break
        if w:
            v = row[xpos]
            counts[v] = counts.get(v, 0) + w
    return list(counts.items())


def weighted_select(items, k: int, rng=None, key=None):
    """Value whose block (ordering items by value) contains rank k, plus the
    offset of k inside that block. Random-pivot partitioning, no sorting."""
    total = sum(w for _, w in items)
    if k < 0 or k >= total:
        raise KOutOfRange(k, total)
    if rng is None:
        rng = random.Random()
    keyf = key if key is not None else value_key
    work = list(items)
    while True:
        pivot = work[rng.randrange(len(work))][0]
        pk = keyf(pivot)
        lt, gt = [], []
        wlt = weq = 0
        for v, w in work:
            kv = keyf(v)
            if kv < pk:
                lt.append((v, w))
                wlt += w
            elif kv > pk:
                gt.append((v, w))
            else:
                weq += w
        if k < wlt:
            work = lt
        elif k < wlt + weq:
            return pivot, k - wlt
        else:
            k -= wlt + weq
            work = gt


def select_lex(
    q: Query,
    db: Instance,
    order: OrderSpec,
    k: int,
    seed=None,
    stats: SelectStats | None = None,
    report=None,
) -> AnswerTuple:
    """k-th answer under a lexicographic order, expected O(f·n) per call.

    Works for any free-connex query and any lex order, disruptive trios
    included; partial orders follow the deterministic completion.
    """
    if report is None:
        report = analyze(q, order)
    verdict = report.routing[SINGLE_LEX]
    if not verdict.ok:
        raise NotRouted(SINGLE_LEX, verdict.reasons)
    rng = random.Random(seed)
    bound = bound_atoms(q, db)
    fixed: dict = {}
    kp = k
    for i, x in enumerate(report.tie_break_order):
        items = conditional_value_counts(q, db, fixed, x, stats=stats, _bound=bound)
        if i == 0:
            total = sum(w for _, w in items)
            if k < 0 or k >= total:
                raise OutOfRange(k, total)
        v, kp = weighted_select(items, kp, rng=rng)
        fixed[x] = v
    return AnswerTuple(q.head, tuple(fixed[v] for v in q.head))


def select_sum(
    q: Query,
    db: Instance,
    order: OrderSpec,
    k: int,
    seed=None,
    stats: SelectStats | None = None,
    report=None,
) -> AnswerTuple:
    """k-th answer under a single-atom sum order, expected O(n) per call."""
    if report is None:
        report = analyze(q, order)
    verdict = report.routing[SINGLE_SUM]
    if not verdict.ok:
        raise NotRouted(SINGLE_SUM, verdict.reasons)
    rng = random.Random(seed)
    bound = bound_atoms(q, db)
    anchor = report.sum_anchor
    prefix = tuple(v for v in q.head if v in q.atoms[anchor].var_set)

    # extension count per distinct head projection of the anchor atom
    tables = _filtered_tables(bound, {}, stats)
    tree = gyo_join_tree([b.vars for b in bound])
    assert isinstance(tree, JoinTree)
    kidinfo = _messages_to_root(bound, tables, tree, anchor, stats)
    ppos = tuple(bound[anchor].vars.index(v) for v in prefix)
    wpos = tuple(prefix.index(v) for v in order.vars)
    if stats is not None:
        stats.rows_touched += len(tables[anchor])
    blocks: dict[tuple, int] = {}
    for row, cnt in tables[anchor].items():
        w = cnt
        for cidx, m in kidinfo:
            w *= m.get(tuple(row[i] for i in cidx), 0)
            if not w:
                break
        if w:
            proj = tuple(row[i] for i in ppos)
            blocks[proj] = blocks.get(proj, 0) + w
    items = [
        ((sum(proj[p] for p in wpos), tuple_key(proj), proj), w)
        for proj, w in blocks.items()
    ]
    total = sum(w for _, w in items)
    if k < 0 or k >= total:
        raise OutOfRange(k, total)

    chosen, kp = weighted_select(items, k, rng=rng, key=lambda v: (v[0], v[1]))
    fixed = dict(zip(prefix, chosen[2]))
    for x in report.tie_break_order[len(prefix):]:
        items = conditional_value_counts(q, db, fixed, x, stats=stats, _bound=bound)
        v, kp = weighted_select(items, kp, rng=rng)
        fixed[x] = v
    return AnswerTuple(q.head, tuple(fixed[v] for v in q.head))
