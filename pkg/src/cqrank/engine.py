"""Direct access: quasilinear preprocessing, logarithmic ranked access.

The index simulates the sorted array of answers without materializing it.
Construction happens in three steps:

1. *Full reduction* — classic semi-join passes (up, then down) over a join
   tree of the atoms, so every surviving row takes part in at least one
   answer. Duplicate input rows are collapsed into per-row counts first;
   answers are a bag, so those counts flow through everything below.

2. *Existential elimination* — counting messages toward the head on a join
   tree extended with a virtual head node. Atoms adjacent to the head node
   become weighted relations over their head variables (weight = number of
   ways to extend a projected row downward); deeper atoms keep weight 1 and
   only constrain. The weighted natural join of these reduced relations
   reproduces the answer bag exactly.

3. *Candidate tables* — for a trio-free order w, each variable's preceding
   neighbors form a clique covered by some atom, so the candidates for w_i
   given an assignment of those neighbors are a slice of that anchor atom.
   Bottom-up we tabulate g(ν, v) = (weights of atoms settled at w_i) ×
   (child subtree totals) and prefix-sum each candidate list.

Access walks w maintaining the residual rank k' and the multiplier M of the
still-pending subtrees: the block of answers with w_i = v has width M·g(ν,v),
so one counting binary search per variable pins the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import (
    DIRECT_LEX,
    DIRECT_SUM,
    JoinTree,
    TractabilityReport,
    VariableTree,
    analyze,
    build_variable_tree,
    gyo_join_tree,
)
from .errors import NotRouted, OutOfRange
from .instrument import AccessStats, PreprocessStats, bisect_gt, sorted_counted
from .model import AnswerTuple, Instance, Query, bound_atoms, tuple_key, value_key


@dataclass(frozen=True)
class ReducedAtom:
    """Weighted relation over one atom's head variables (head order)."""

    vars: tuple[str, ...]
    rows: dict[tuple, int]


@dataclass(frozen=True)
class ReducedDB:
    atoms: tuple[ReducedAtom, ...]

    @property
    def empty(self) -> bool:
        return any(not a.rows for a in self.atoms)


def _proj(vars_: tuple[str, ...], wanted) -> tuple[int, ...]:
    return tuple(vars_.index(v) for v in wanted)


def build_reduced_db(q: Query, db: Instance) -> ReducedDB:
    """Stages 1 and 2: fully reduced, head-projected weighted relations."""
    bound = bound_atoms(q, db)
    tables: list[dict[tuple, int]] = []
    for b in bound:
        t: dict[tuple, int] = {}
        for r in b.rows:
            t[r] = t.get(r, 0) + 1
        tables.append(t)

    # stage 1: full semi-join reduction over the atom join tree
    tree = gyo_join_tree([b.vars for b in bound])
    assert isinstance(tree, JoinTree), "reduction requires an acyclic query"
    post = tree.postorder()
    for u in post:
        p = tree.parent[u]
        if p is None:
            continue
        sep = sorted(tree.separator(u))
        if not sep:
            if not tables[u]:
                tables[p] = {}
            continue
        uidx = _proj(bound[u].vars, sep)
        keys = {tuple(r[i] for i in uidx) for r in tables[u]}
        pidx = _proj(bound[p].vars, sep)
        tables[p] = {r: c for r, c in tables[p].items() if tuple(r[i] for i in pidx) in keys}
    for u in reversed(post):
        p = tree.parent[u]
        if p is None:
            continue
        sep = sorted(tree.separator(u))
        if not sep:
            if not tables[p]:
                tables[u] = {}
            continue
        pidx = _proj(bound[p].vars, sep)
        keys = {tuple(r[i] for i in pidx) for r in tables[p]}
        uidx = _proj(bound[u].vars, sep)
        tables[u] = {r: c for r, c in tables[u].items() if tuple(r[i] for i in uidx) in keys}

    # stage 2: counting messages toward the virtual head node
    tplus = gyo_join_tree([b.vars for b in bound] + [tuple(q.head)])
    assert isinstance(tplus, JoinTree), "head-extended hypergraph must stay acyclic"
    F = len(bound)
    tplus = tplus.rerooted(F)
    children = tplus.children()
    msg: list[dict[tuple, int] | None] = [None] * len(bound)
    for u in tplus.postorder():
        if u == F:
            continue
        sep = tplus.separator(u)
        sepv = (
            tuple(v for v in q.head if v in sep)
            if tplus.parent[u] == F
            else tuple(sorted(sep))
        )
        uvars = bound[u].vars
        sidx = _proj(uvars, sepv)
        kidinfo = []
        for c in children[u]:
            csepv = tuple(sorted(tplus.separator(c)))
            kidinfo.append((_proj(uvars, csepv), msg[c]))
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

    reduced = []
    for u, b in enumerate(bound):
        hv = tuple(v for v in q.head if v in set(b.vars))
        if tplus.parent[u] == F:
            rows = msg[u]
        else:
            hidx = _proj(b.vars, hv)
            rows = {tuple(r[i] for i in hidx): 1 for r in tables[u]}
        reduced.append(ReducedAtom(hv, rows))
    return ReducedDB(tuple(reduced))


class _Group:
    """Sorted candidate values for one (variable, neighbor-assignment) pair."""

    __slots__ = ("values", "cums")

    def __init__(self):
        self.values: list = []
        self.cums: list[int] = []


def _sort_pairs(pairs, stats: PreprocessStats | None):
    def key(p):
        return (tuple_key(p[0]), value_key(p[1]))

    if stats is not None and stats.counted:
        return sorted_counted(pairs, key=key, stats=stats)
    for nu, v in pairs:
        if not isinstance(v, int) or any(not isinstance(x, int) for x in nu):
            return sorted(pairs, key=key)
    return sorted(pairs)  # all-int fast path: plain tuple comparison


def _build_tables(q: Query, db: Instance, order, stats: PreprocessStats | None):
    rdb = build_reduced_db(q, db)
    vt = build_variable_tree(q, order)
    f = len(order)
    children = vt.children()
    groups: list[dict[tuple, _Group]] = [None] * f
    totals: list[dict[tuple, int]] = [None] * f

    for i in reversed(range(f)):
        anchor = rdb.atoms[vt.anchor[i]]
        nvars = vt.nsets[i]
        aidx = _proj(anchor.vars, nvars)
        widx = anchor.vars.index(vt.order[i])
        pairs = {(tuple(r[j] for j in aidx), r[widx]) for r in anchor.rows}

        vecpos = {v: j for j, v in enumerate(nvars + (vt.order[i],))}
        atom_lk = [
            (tuple(vecpos[v] for v in rdb.atoms[ai].vars), rdb.atoms[ai].rows)
            for ai in vt.assigned[i]
        ]
        child_lk = [
            (tuple(vecpos[v] for v in vt.nsets[c]), totals[c]) for c in children[i]
        ]

        gmap: dict[tuple, _Group] = {}
        for nu, v in _sort_pairs(pairs, stats):
            vec = nu + (v,)
            g = 1
            for idxs, rows in atom_lk:
                g *= rows.get(tuple(vec[j] for j in idxs), 0)
                if not g:
                    break
            if g:
                for idxs, tot in child_lk:
                    g *= tot.get(tuple(vec[j] for j in idxs), 0)
                    if not g:
                        break
            if not g:
                continue  # candidate never joins; unreachable after full reduction
            grp = gmap.get(nu)
            if grp is None:
                grp = gmap[nu] = _Group()
            grp.values.append(v)
            grp.cums.append((grp.cums[-1] if grp.cums else 0) + g)
        groups[i] = gmap
        totals[i] = {nu: grp.cums[-1] for nu, grp in gmap.items()}

    global_mult = 1
    for ai in vt.scalar_atoms:
        global_mult *= rdb.atoms[ai].rows.get((), 0)
    count = global_mult
    for r in vt.roots():
        count *= totals[r].get((), 0)
    return rdb, vt, groups, totals, count, global_mult


def _find_value(values, v, stats: AccessStats | None):
    key = value_key(v)
    lo, hi = 0, len(values)
    while lo < hi:
        if stats is not None:
            stats.probes += 1
        mid = (lo + hi) // 2
        if value_key(values[mid]) < key:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo < len(values) and values[lo] == v else -1


@dataclass
class AccessIndex:
    """Immutable after construction; ``access``/``count`` are read-only and
    safe for concurrent callers (per-call stats objects, no shared state)."""

    query: Query
    order: tuple[str, ...]
    vtree: VariableTree
    groups: list[dict[tuple, _Group]]
    totals: list[dict[tuple, int]]
    count: int
    global_mult: int
    build_stats: PreprocessStats
    _npos: list[tuple[int, ...]] = field(default_factory=list)
    _head_pick: tuple[int, ...] = ()

    def __post_init__(self):
        pos = {v: i for i, v in enumerate(self.order)}
        self._npos = [tuple(pos[v] for v in ns) for ns in self.vtree.nsets]
        self._head_pick = tuple(pos[v] for v in self.query.head)

    @property
    def max_group_size(self) -> int:
        return max(
            (len(g.values) for gm in self.groups for g in gm.values()), default=0
        )

    def _descend(self, vals, C, kp, start, stats):
        for i in range(start, len(self.order)):
            nu = tuple(vals[j] for j in self._npos[i])
            grp = self.groups[i][nu]
            M = C // grp.cums[-1]
            idx = bisect_gt(grp.cums, kp // M, stats)
            before = grp.cums[idx - 1] if idx else 0
            kp -= M * before
            C = M * (grp.cums[idx] - before)
            vals[i] = grp.values[idx]
        return AnswerTuple(self.query.head, tuple(vals[j] for j in self._head_pick))

    def access(self, k: int, stats: AccessStats | None = None) -> AnswerTuple:
        if k < 0 or k >= self.count:
            raise OutOfRange(k, self.count)
        return self._descend([None] * len(self.order), self.count, k, 0, stats)

    def count_for(self, prefix_vals: list) -> int:
        """Answers extending the given values of order[0:len(prefix_vals)]."""
        C = self.count
        vals = list(prefix_vals) + [None] * (len(self.order) - len(prefix_vals))
        for i, v in enumerate(prefix_vals):
            nu = tuple(vals[j] for j in self._npos[i])
            grp = self.groups[i].get(nu)
            if grp is None:
                return 0
            idx = _find_value(grp.values, v, None)
            if idx < 0:
                return 0
            M = C // grp.cums[-1]
            C = M * (grp.cums[idx] - (grp.cums[idx - 1] if idx else 0))
        return C


def preprocess_lex(
    q: Query,
    db: Instance,
    report: TractabilityReport | None = None,
    *,
    count_comparisons: bool = False,
) -> AccessIndex:
    """Build the ranked-access index for a routed lexicographic order."""
    if report is None:
        raise ValueError("preprocess_lex needs the analyzer report")
    verdict = report.routing[DIRECT_LEX]
    if not verdict.ok:
        raise NotRouted(DIRECT_LEX, verdict.reasons)
    stats = PreprocessStats(counted=count_comparisons)
    order = report.completed_order
    _, vt, groups, totals, count, gm = _build_tables(q, db, order, stats)
    return AccessIndex(q, order, vt, groups, totals, count, gm, stats)


def direct_access(ix: AccessIndex, k: int, stats: AccessStats | None = None) -> AnswerTuple:
    return ix.access(k, stats)


def answer_count(ix) -> int:
    """Total number of answers, O(1) off the root totals."""
    return ix.count


@dataclass
class SumAccessIndex:
    """Anchor rows ordered by (weight sum, anchor values); ranked completion
    of the remaining variables rides the nested lexicographic index."""

    inner: AccessIndex
    anchor_vals: list[tuple]
    cums: list[int]
    prefix_len: int
    count: int
    build_stats: PreprocessStats

    def access(self, k: int, stats: AccessStats | None = None) -> AnswerTuple:
        if k < 0 or k >= self.count:
            raise OutOfRange(k, self.count)
        j = bisect_gt(self.cums, k, stats)
        before = self.cums[j - 1] if j else 0
        vals = list(self.anchor_vals[j]) + [None] * (len(self.inner.order) - self.prefix_len)
        return self.inner._descend(vals, self.cums[j] - before, k - before, self.prefix_len, stats)


def preprocess_sum(
    q: Query,
    db: Instance,
    report: TractabilityReport | None = None,
    *,
    count_comparisons: bool = False,
) -> SumAccessIndex:
    """Build the ranked-access index for a routed single-atom sum order."""
    if report is None:
        raise ValueError("preprocess_sum needs the analyzer report")
    verdict = report.routing[DIRECT_SUM]
    if not verdict.ok:
        raise NotRouted(DIRECT_SUM, verdict.reasons)
    stats = PreprocessStats(counted=count_comparisons)
    order = report.completed_order
    rdb, vt, groups, totals, count, gm = _build_tables(q, db, order, stats)
    inner = AccessIndex(q, order, vt, groups, totals, count, gm, stats)

    anchor = rdb.atoms[report.sum_anchor]
    prefix_len = len(anchor.vars)
    assert order[:prefix_len] == anchor.vars, "sum order must start with the anchor atom"
    wpos = [anchor.vars.index(v) for v in report.order.vars]

    items = []
    for rvals in anchor.rows:
        ext = inner.count_for(list(rvals))
        assert ext > 0, "reduced anchor rows must extend to answers"
        items.append(((sum(rvals[p] for p in wpos), tuple_key(rvals)), rvals, ext))
    items = sorted_counted(items, key=lambda it: it[0], stats=stats) if count_comparisons \
        else sorted(items, key=lambda it: it[0])

    cums, anchor_vals = [], []
    running = 0
    for _, rvals, ext in items:
        running += ext
        cums.append(running)
        anchor_vals.append(rvals)
    assert running == count, "anchor extension counts must add up to the answer count"
    return SumAccessIndex(inner, anchor_vals, cums, prefix_len, count, stats)


def direct_access_sum(ix: SumAccessIndex, k: int, stats: AccessStats | None = None) -> AnswerTuple:
    return ix.access(k, stats)


def build_index(q: Query, db: Instance, o, *, count_comparisons: bool = False):
    """Convenience: analyze and build whichever index the order kind needs."""
    report = analyze(q, o)
    if o.kind == "lex":
        return preprocess_lex(q, db, report, count_comparisons=count_comparisons)
    return preprocess_sum(q, db, report, count_comparisons=count_comparisons)
