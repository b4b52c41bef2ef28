"""Unit-cost tree edit distance between move-labelled trees.

Two variants:

* unordered (default): the minimum number of node insertions, deletions and
  relabelings, where sibling order is irrelevant.  Solved exactly as a 0/1
  program over node mappings with HiGHS (via ``scipy.optimize.milp``).  Trees
  of height <= 2, which is what two-ply expansions produce, use a much
  smaller aggregated model.
* ordered: Zhang & Shasha's dynamic program on the canonical (sorted) child
  order.

Roots carry the same sentinel and are always aligned with each other.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .tree_core import GameTree, height, node_count


def tree_edit_distance(t1: GameTree, t2: GameTree, ordered: bool = False) -> int:
    if ordered:
        return zhang_shasha(t1, t2)
    if t1 == t2:
        return 0
    n1, n2 = node_count(t1), node_count(t2)
    if n1 == 0 or n2 == 0:
        return n1 + n2
    if n1 + n2 <= SMALL_PAIR:
        return _forest_dist(_canon(t1.children), _canon(t2.children))
    if height(t1) <= 2 and height(t2) <= 2:
        return _unordered_shallow(t1, t2)
    return _unordered_general(t1, t2)


# pairs up to this many moves in total go through the memoised recursion
SMALL_PAIR = 14

Forest = tuple  # sorted tuple of (label, Forest)


def _canon(children) -> Forest:
    return tuple(sorted((c.label, _canon(c.children)) for c in children))


@lru_cache(maxsize=None)
def _fsize(f: Forest) -> int:
    return sum(1 + _fsize(sub) for _, sub in f)


def _merge(a: Forest, b: Forest) -> Forest:
    return tuple(sorted(a + b))


@lru_cache(maxsize=1 << 18)
def _forest_dist(f: Forest, g: Forest) -> int:
    """Unordered forest distance by case analysis on the first tree of ``f``.

    Its root ``v`` is either deleted, or mapped to the root ``u`` of some tree
    of ``g`` (which splits the problem in two), or mapped below some root
    ``u`` of ``g``, in which case ``u`` itself is unmapped and can be removed.
    """
    if not f:
        return _fsize(g)
    if not g:
        return _fsize(f)
    (v, fv), rest = f[0], f[1:]
    best = 1 + _forest_dist(_merge(fv, rest), g)
    for k, tree in enumerate(g):
        if k and tree == g[k - 1]:
            continue
        u, gu = tree
        grest = g[:k] + g[k + 1 :]
        best = min(
            best,
            (v != u) + _forest_dist(fv, gu) + _forest_dist(rest, grest),
            1 + _forest_dist(f, _merge(gu, grest)),
        )
    return best


def _solve(gain: np.ndarray, rows, cols, vals, lo, hi, integrality) -> float:
    a = coo_matrix((vals, (rows, cols)), shape=(len(lo), len(gain))).tocsr()
    cons = LinearConstraint(a, np.asarray(lo, float), np.asarray(hi, float))
    integrality = np.asarray(integrality)

    def run(integ):
        res = milp(-gain, constraints=cons, integrality=integ, bounds=Bounds(0, np.inf))
        if res.status != 0:
            raise RuntimeError(f"edit-distance program failed: {res.message}")
        return res

    # the relaxation usually has an integral optimal vertex; when it does, that
    # vertex is optimal for the 0/1 program too and branch-and-bound is skipped
    res = run(np.zeros_like(integrality))
    xi = res.x[integrality > 0]
    if np.all(np.abs(xi - np.round(xi)) <= 1e-9):
        return -res.fun
    return -run(integrality).fun


def _unordered_general(t1: GameTree, t2: GameTree) -> int:
    # x[u, v] = 1 iff move u of t1 is kept as move v of t2; each kept pair saves
    # 2 edits (one fewer delete and insert) minus 1 if it needs a relabel
    a_lab, a_desc = _flatten(t1)
    b_lab, b_desc = _flatten(t2)
    n, m = len(a_lab), len(b_lab)
    var = np.arange(n * m).reshape(n, m)
    gain = np.array([2.0 - (a_lab[i] != b_lab[j]) for i in range(n) for j in range(m)])
    rows: list[int] = []
    cols: list[int] = []
    lo: list[float] = []
    hi: list[float] = []
    r = 0

    def add(idx) -> None:
        nonlocal r
        rows.extend([r] * len(idx))
        cols.extend(idx)
        lo.append(-np.inf)
        hi.append(1.0)
        r += 1

    for i in range(n):
        add(var[i, :].tolist())
    for j in range(m):
        add(var[:, j].tolist())
    # ancestry: if u -> v then descendants of u land inside v's subtree and
    # descendants of v come from inside u's subtree
    for i in range(n):
        for j in range(m):
            outside_b = [k for k in range(m) if k not in b_desc[j] and k != j]
            outside_a = [k for k in range(n) if k not in a_desc[i] and k != i]
            for di in a_desc[i]:
                if outside_b:
                    add([var[i, j]] + var[di, outside_b].tolist())
            for dj in b_desc[j]:
                if outside_a:
                    add([var[i, j]] + var[outside_a, dj].tolist())
    vals = np.ones(len(rows))
    kept = _solve(gain, rows, cols, vals, lo, hi, np.ones(n * m))
    return int(round(n + m - kept))


def _flatten(t: GameTree) -> tuple[list[str], list[set[int]]]:
    labels: list[str] = []
    desc: list[set[int]] = []

    def walk(node: GameTree) -> set[int]:
        mine: set[int] = set()
        for c in node.children:
            idx = len(labels)
            labels.append(c.label)
            desc.append(set())
            below = walk(c)
            desc[idx] = below
            mine |= below | {idx}
        return mine

    walk(t)
    return labels, desc


def _unordered_shallow(t1: GameTree, t2: GameTree) -> int:
    """Exact unordered distance for trees of height <= 2.

    Every first-level move either pairs with a first-level move of the other
    tree (then only their replies can pair up), or is set loose: it joins a
    common pool either by itself (its replies deleted) or through its replies
    (itself deleted).  Pool members pair freely, so the pool's best saving
    depends only on label counts: ``shared + min(|pool1|, |pool2|)``.
    """
    us, vs = t1.children, t2.children
    p, q = len(us), len(vs)
    labels = sorted(
        {u.label for u in us}
        | {v.label for v in vs}
        | {c.label for u in us for c in u.children}
        | {c.label for v in vs for c in v.children}
    )
    lid = {lab: k for k, lab in enumerate(labels)}
    nl = len(labels)
    nx = p * q
    ob1, oc1 = nx, nx + p
    ob2, oc2 = nx + 2 * p, nx + 2 * p + q
    osh, om = nx + 2 * p + 2 * q, nx + 2 * p + 2 * q + nl
    nvar = om + 1

    gain = np.zeros(nvar)
    kids1 = [{c.label for c in u.children} for u in us]
    kids2 = [{c.label for c in v.children} for v in vs]
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            shared = len(kids1[i] & kids2[j])
            gain[i * q + j] = (2 - (u.label != v.label)) + shared + min(len(kids1[i]), len(kids2[j]))
    gain[osh:om] = 1.0
    gain[om] = 1.0

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    lo: list[float] = []
    hi: list[float] = []
    r = 0
    for i in range(p):
        idx = [i * q + j for j in range(q)] + [ob1 + i, oc1 + i]
        rows += [r] * len(idx)
        cols += idx
        vals += [1.0] * len(idx)
        lo.append(1.0)
        hi.append(1.0)
        r += 1
    for j in range(q):
        idx = [i * q + j for i in range(p)] + [ob2 + j, oc2 + j]
        rows += [r] * len(idx)
        cols += idx
        vals += [1.0] * len(idx)
        lo.append(1.0)
        hi.append(1.0)
        r += 1
    for nodes, ob, oc in ((us, ob1, oc1), (vs, ob2, oc2)):
        # shared[label] <= pool count of label on this side
        for k in range(nl):
            rows.append(r + k)
            cols.append(osh + k)
            vals.append(1.0)
        for i, u in enumerate(nodes):
            rows.append(r + lid[u.label])
            cols.append(ob + i)
            vals.append(-1.0)
            for c in u.children:
                rows.append(r + lid[c.label])
                cols.append(oc + i)
                vals.append(-1.0)
        r += nl
        lo += [-np.inf] * nl
        hi += [0.0] * nl
        # pairs formed in the pool <= pool size on this side
        rows.append(r)
        cols.append(om)
        vals.append(1.0)
        for i, u in enumerate(nodes):
            rows += [r, r]
            cols += [ob + i, oc + i]
            vals += [-1.0, -float(len(u.children))]
        lo.append(-np.inf)
        hi.append(0.0)
        r += 1
    integrality = np.zeros(nvar)
    integrality[:osh] = 1
    kept = _solve(gain, rows, cols, np.asarray(vals), lo, hi, integrality)
    return int(round(node_count(t1) + node_count(t2) - kept))


# ---------------------------------------------------------------------------
# ordered


def _postorder(t: GameTree, ids: dict) -> tuple[list[int], list[int], list[int]]:
    labels: list[int] = []
    lml: list[int] = []
    stack = [[t, 0, -1]]  # node, next child, leftmost leaf seen so far
    while stack:
        top = stack[-1]
        node, k = top[0], top[1]
        if k < len(node.children):
            top[1] += 1
            stack.append([node.children[k], 0, -1])
            continue
        stack.pop()
        idx = len(labels)
        labels.append(ids.setdefault(node.label, len(ids)))
        leftmost = idx if top[2] < 0 else top[2]
        lml.append(leftmost)
        if stack and stack[-1][2] < 0:
            stack[-1][2] = leftmost
    keyroots = sorted({l: i for i, l in enumerate(lml)}.values())
    return labels, lml, keyroots


def zhang_shasha(t1: GameTree, t2: GameTree) -> int:
    ids: dict = {None: 0}
    lab1, l1, kr1 = _postorder(t1, ids)
    lab2, l2, kr2 = _postorder(t2, ids)
    n1, n2 = len(lab1), len(lab2)
    td = [[0] * n2 for _ in range(n1)]
    for a in kr1:
        li = l1[a]
        m = a - li + 2
        for b in kr2:
            lj = l2[b]
            n = b - lj + 2
            fd = [[0] * n for _ in range(m)]
            for x in range(1, m):
                fd[x][0] = x
            for y in range(1, n):
                fd[0][y] = y
            for x in range(1, m):
                i = li + x - 1
                for y in range(1, n):
                    j = lj + y - 1
                    best = min(fd[x - 1][y], fd[x][y - 1]) + 1
                    if l1[i] == li and l2[j] == lj:
                        best = min(best, fd[x - 1][y - 1] + (lab1[i] != lab2[j]))
                        fd[x][y] = best
                        td[i][j] = best
                    else:
                        fd[x][y] = min(best, fd[l1[i] - li][l2[j] - lj] + td[i][j])
    return td[n1 - 1][n2 - 1]
