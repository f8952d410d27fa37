"""CDCL search kernels.

All solver state lives in flat arrays owned by the caller so a search can be
suspended (conflict budget, array growth) and resumed.  The functions stick to
the numba-compatible subset of Python; without numba they run on Python lists.

Literal code: ``2 * var + sign`` with 0-based ``var`` and sign 1 for negative.
Clause ``ci`` owns watch nodes ``2 * ci`` and ``2 * ci + 1``, which watch its
literals at offsets 0 and 1; ``wfirst[lit]``/``wnext[node]`` chain the nodes
watching ``lit``.
"""
import numpy as np

from .._accel import kernel

# scalar slots in ``st``
N_VARS = 0
N_CLAUSES = 1
N_LITS = 2
TRAIL_LEN = 3
QHEAD = 4
DLEVEL = 5
HEAP_SIZE = 6
CONFLICTS = 7
N_LEARNTS = 8
MAX_LEARNTS = 9
NEXT_RESTART = 10
LUBY_INDEX = 11
DECISIONS = 12
PROPAGATIONS = 13
CAP_LITS = 14
CAP_CLAUSES = 15
N_ORIG = 16
N_ST = 17

# slots in ``fs``
VAR_INC = 0
CLA_INC = 1

FLAG_LEARNT = 1
FLAG_DELETED = 2

UNKNOWN = 0
SAT = 1
UNSAT = 2
GROW = 3

RESTART_BASE = 100


@kernel
def lit_value(assign, lit):
    a = assign[lit >> 1]
    if a < 0:
        return -1
    return a ^ (lit & 1)


@kernel
def heap_up(heap, hpos, act, i):
    v = heap[i]
    while i > 0:
        parent = (i - 1) >> 1
        u = heap[parent]
        if act[u] > act[v] or (act[u] == act[v] and u < v):
            break
        heap[i] = u
        hpos[u] = i
        i = parent
    heap[i] = v
    hpos[v] = i


@kernel
def heap_down(heap, hpos, act, i, size):
    v = heap[i]
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        right = child + 1
        if right < size:
            a = heap[child]
            b = heap[right]
            if act[b] > act[a] or (act[b] == act[a] and b < a):
                child = right
        u = heap[child]
        if act[v] > act[u] or (act[v] == act[u] and v < u):
            break
        heap[i] = u
        hpos[u] = i
        i = child
    heap[i] = v
    hpos[v] = i


@kernel
def heap_insert(heap, hpos, act, st, v):
    if hpos[v] >= 0:
        return
    i = st[HEAP_SIZE]
    st[HEAP_SIZE] = i + 1
    heap[i] = v
    hpos[v] = i
    heap_up(heap, hpos, act, i)


@kernel
def heap_pop(heap, hpos, act, st):
    size = st[HEAP_SIZE]
    v = heap[0]
    hpos[v] = -1
    size -= 1
    st[HEAP_SIZE] = size
    if size > 0:
        last = heap[size]
        heap[0] = last
        hpos[last] = 0
        heap_down(heap, hpos, act, 0, size)
    return v


@kernel
def bump_var(heap, hpos, act, fs, v):
    act[v] += fs[VAR_INC]
    if act[v] > 1e100:
        for u in range(len(act)):
            act[u] *= 1e-100
        fs[VAR_INC] *= 1e-100
    if hpos[v] >= 0:
        heap_up(heap, hpos, act, hpos[v])


@kernel
def enqueue(assign, level, reason, trail, st, lit, ci):
    v = lit >> 1
    assign[v] = 1 - (lit & 1)
    level[v] = st[DLEVEL]
    reason[v] = ci
    trail[st[TRAIL_LEN]] = lit
    st[TRAIL_LEN] += 1


@kernel
def link_watches(lits, cstart, csize, wfirst, wnext, first, last):
    """Watch literals 0 and 1 of clauses first..last-1 (size >= 2)."""
    for ci in range(first, last):
        if csize[ci] < 2:
            continue
        s = cstart[ci]
        for k in range(2):
            node = 2 * ci + k
            lit = lits[s + k]
            wnext[node] = wfirst[lit]
            wfirst[lit] = node


@kernel
def propagate(lits, cstart, csize, cflag, wfirst, wnext, assign, level, reason, trail, st):
    """Unit propagation to fixpoint; returns a falsified clause index or -1."""
    while st[QHEAD] < st[TRAIL_LEN]:
        p = trail[st[QHEAD]]
        st[QHEAD] += 1
        st[PROPAGATIONS] += 1
        false_lit = p ^ 1
        prev = -1
        node = wfirst[false_lit]
        while node != -1:
            nxt = wnext[node]
            ci = node >> 1
            k = node & 1
            if cflag[ci] & FLAG_DELETED:
                if prev == -1:
                    wfirst[false_lit] = nxt
                else:
                    wnext[prev] = nxt
                node = nxt
                continue
            s = cstart[ci]
            other = lits[s + 1 - k]
            ov = lit_value(assign, other)
            if ov == 1:
                prev = node
                node = nxt
                continue
            moved = False
            for idx in range(s + 2, s + csize[ci]):
                lit = lits[idx]
                if lit_value(assign, lit) != 0:
                    lits[idx] = lits[s + k]
                    lits[s + k] = lit
                    if prev == -1:
                        wfirst[false_lit] = nxt
                    else:
                        wnext[prev] = nxt
                    wnext[node] = wfirst[lit]
                    wfirst[lit] = node
                    moved = True
                    break
            if moved:
                node = nxt
                continue
            if ov == 0:
                st[QHEAD] = st[TRAIL_LEN]
                return ci
            enqueue(assign, level, reason, trail, st, other, ci)
            prev = node
            node = nxt
    return -1


@kernel
def backtrack(assign, reason, trail, trail_lim, polar, heap, hpos, act, st, lvl):
    if st[DLEVEL] <= lvl:
        return
    stop = trail_lim[lvl]
    for i in range(st[TRAIL_LEN] - 1, stop - 1, -1):
        v = trail[i] >> 1
        polar[v] = assign[v]
        assign[v] = -1
        reason[v] = -1
        heap_insert(heap, hpos, act, st, v)
    st[TRAIL_LEN] = stop
    st[QHEAD] = stop
    st[DLEVEL] = lvl


@kernel
def new_level(trail_lim, st):
    trail_lim[st[DLEVEL]] = st[TRAIL_LEN]
    st[DLEVEL] += 1


@kernel
def luby(i):
    # i-th element (0-based) of the Luby sequence 1 1 2 1 1 2 4 ...
    size = 1
    seq = 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    x = i
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    r = 1
    for _ in range(seq):
        r *= 2
    return r


@kernel
def analyze(lits, cstart, csize, cflag, cact, assign, level, reason, trail, heap, hpos, act, seen, learnt, st, fs, confl):
    """First-UIP learning.  Fills ``learnt`` and returns (length, backjump level)."""
    dl = st[DLEVEL]
    path = 0
    p = -1
    n = 1
    idx = st[TRAIL_LEN] - 1
    ci = confl
    while True:
        if cflag[ci] & FLAG_LEARNT:
            cact[ci] += fs[CLA_INC]
            if cact[ci] > 1e20:
                for j in range(st[N_CLAUSES]):
                    cact[j] *= 1e-20
                fs[CLA_INC] *= 1e-20
        s = cstart[ci]
        for j in range(s, s + csize[ci]):
            q = lits[j]
            v = q >> 1
            if p != -1 and v == (p >> 1):
                continue
            if seen[v] == 0 and level[v] > 0:
                bump_var(heap, hpos, act, fs, v)
                seen[v] = 1
                if level[v] >= dl:
                    path += 1
                else:
                    learnt[n] = q
                    n += 1
        while seen[trail[idx] >> 1] == 0:
            idx -= 1
        p = trail[idx]
        idx -= 1
        ci = reason[p >> 1]
        seen[p >> 1] = 0
        path -= 1
        if path <= 0:
            break
    learnt[0] = p ^ 1

    # drop literals implied by the rest of the clause (local minimization)
    for i in range(1, n):
        v = learnt[i] >> 1
        r = reason[v]
        if r == -1:
            continue
        redundant = True
        rs = cstart[r]
        for j in range(rs, rs + csize[r]):
            u = lits[j] >> 1
            if u != v and seen[u] == 0 and level[u] > 0:
                redundant = False
                break
        if redundant:
            seen[v] = 2
    m = 1
    for i in range(1, n):
        q = learnt[i]
        keep = seen[q >> 1] == 1
        seen[q >> 1] = 0
        if keep:
            learnt[m] = q
            m += 1
    n = m

    bt = 0
    if n > 1:
        best = 1
        for i in range(2, n):
            if level[learnt[i] >> 1] > level[learnt[best] >> 1]:
                best = i
        tmp = learnt[1]
        learnt[1] = learnt[best]
        learnt[best] = tmp
        bt = level[learnt[1] >> 1]
    return n, bt


@kernel
def reduce_db(lits, cstart, csize, cflag, cact, assign, reason, st):
    n = st[N_CLAUSES]
    count = 0
    for ci in range(st[N_ORIG], n):
        if cflag[ci] == FLAG_LEARNT and csize[ci] > 2:
            count += 1
    cand = np.empty(count, dtype=np.int64)
    keys = np.empty(count, dtype=np.float64)
    count = 0
    for ci in range(st[N_ORIG], n):
        if cflag[ci] == FLAG_LEARNT and csize[ci] > 2:
            cand[count] = ci
            keys[count] = cact[ci]
            count += 1
    order = np.argsort(keys, kind="mergesort")
    removed = 0
    for oi in range(count // 2):
        ci = cand[order[oi]]
        # a clause that is the reason of a current assignment stays
        v0 = lits[cstart[ci]] >> 1
        v1 = lits[cstart[ci] + 1] >> 1
        if (assign[v0] >= 0 and reason[v0] == ci) or (assign[v1] >= 0 and reason[v1] == ci):
            continue
        cflag[ci] = FLAG_LEARNT | FLAG_DELETED
        removed += 1
    st[N_LEARNTS] -= removed


@kernel
def search(lits, cstart, csize, cflag, cact, wfirst, wnext, assign, level, reason, trail, trail_lim,
           polar, heap, hpos, act, seen, learnt, st, fs, budget):
    """Run CDCL until SAT, UNSAT, ``budget`` conflicts, or arrays need growing."""
    nv = st[N_VARS]
    start_conflicts = st[CONFLICTS]
    while True:
        if st[CAP_LITS] - st[N_LITS] < nv + 1 or st[CAP_CLAUSES] - st[N_CLAUSES] < 1:
            return GROW
        confl = propagate(lits, cstart, csize, cflag, wfirst, wnext, assign, level, reason, trail, st)
        if confl != -1:
            st[CONFLICTS] += 1
            if st[DLEVEL] == 0:
                return UNSAT
            n, bt = analyze(lits, cstart, csize, cflag, cact, assign, level, reason, trail,
                            heap, hpos, act, seen, learnt, st, fs, confl)
            backtrack(assign, reason, trail, trail_lim, polar, heap, hpos, act, st, bt)
            if n == 1:
                enqueue(assign, level, reason, trail, st, learnt[0], -1)
            else:
                ci = st[N_CLAUSES]
                s = st[N_LITS]
                for i in range(n):
                    lits[s + i] = learnt[i]
                cstart[ci] = s
                csize[ci] = n
                cflag[ci] = FLAG_LEARNT
                cact[ci] = fs[CLA_INC]
                st[N_LITS] = s + n
                st[N_CLAUSES] = ci + 1
                st[N_LEARNTS] += 1
                link_watches(lits, cstart, csize, wfirst, wnext, ci, ci + 1)
                enqueue(assign, level, reason, trail, st, learnt[0], ci)
            fs[VAR_INC] /= 0.95
            fs[CLA_INC] /= 0.999
            continue
        if st[CONFLICTS] - start_conflicts >= budget:
            return UNKNOWN
        if st[CONFLICTS] >= st[NEXT_RESTART]:
            backtrack(assign, reason, trail, trail_lim, polar, heap, hpos, act, st, 0)
            st[LUBY_INDEX] += 1
            st[NEXT_RESTART] = st[CONFLICTS] + RESTART_BASE * luby(st[LUBY_INDEX])
            st[MAX_LEARNTS] += st[MAX_LEARNTS] // 10
        if st[N_LEARNTS] - st[TRAIL_LEN] >= st[MAX_LEARNTS]:
            reduce_db(lits, cstart, csize, cflag, cact, assign, reason, st)
        v = -1
        while st[HEAP_SIZE] > 0:
            u = heap_pop(heap, hpos, act, st)
            if assign[u] < 0:
                v = u
                break
        if v == -1:
            if st[TRAIL_LEN] < nv:
                # variables dropped from the heap while assigned at level 0
                for u in range(nv):
                    if assign[u] < 0:
                        v = u
                        break
            if v == -1:
                return SAT
        st[DECISIONS] += 1
        new_level(trail_lim, st)
        lit = 2 * v + (1 if polar[v] != 1 else 0)
        enqueue(assign, level, reason, trail, st, lit, -1)
