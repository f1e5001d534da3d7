# cython: language_level=3, boundscheck=False, wraparound=False
# distutils: language = c++
"""Compiled saturation kernel.

Statement-for-statement twin of _saturate_py.py: packed-integer facts,
insertion-order worklist, single producing record per fact.  Fact codes are
held in C unsigned 64-bit integers, so the solver only dispatches here when
the fact space fits; the pure twin covers the rest.
"""

from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

from ..errors import BudgetError

KERNEL_NAME = "cy"
MAX_FACT_SPACE = 2 ** 62

cdef enum:
    MAX_DIGITS = 64

ctypedef unsigned long long u64


cdef class _Kernel:
    cdef vector[u64] codes
    cdef unordered_set[u64] seen
    cdef vector[u64] nt_base
    cdef vector[int] arities
    cdef long radix, nl
    cdef object t5rules, stores, store_occs
    cdef object closure, justs
    cdef bint record_just, hit, has_target
    cdef u64 target_code
    cdef long inserted, pruned, budget

    cdef int insert(self, int nt, long* dig, int k2, object just) except -2:
        cdef u64 code
        cdef int j
        cdef int sv, su
        cdef object row
        if self.closure is not None:
            for j in range(1, k2 - 1, 2):
                # v of pair j//2 must plainly reach u of the next pair
                row = self.closure[dig[j]]
                if not (row >> dig[j + 1]) & 1:
                    self.pruned += 1
                    return 0
        code = 0
        for j in range(k2 - 1, -1, -1):
            code = code * <u64> self.radix + <u64> dig[j]
        code += self.nt_base[nt]
        if not self.seen.insert(code).second:
            return 0
        self.codes.push_back(code)
        if self.record_just:
            self.justs.append(just)
        self.inserted += 1
        if self.inserted > self.budget:
            raise BudgetError(f"fact budget of {self.budget} exceeded")
        if self.has_target and code == self.target_code:
            self.hit = True
        # index the new fact for every multi-predicate T5 rule it can feed
        so = self.store_occs[nt]
        if not so:
            return 1
        cdef long idx = <long> self.codes.size() - 1
        digits = tuple([dig[j] for j in range(k2)])
        for rid, pos in so:
            rule = self.t5rules[rid]
            ok = True
            for sv, su in rule.internal[pos]:
                if dig[2 * sv + 1] != dig[2 * su]:
                    ok = False
                    break
            if not ok:
                continue
            key = tuple([dig[d] for d in rule.keydigits[pos]])
            bucket = self.stores[rid][pos].get(key)
            if bucket is None:
                self.stores[rid][pos][key] = bucket = []
            bucket.append((idx, digits))
        return 1

    def insert_list(self, int nt, digits, object just):
        cdef long nd[MAX_DIGITS]
        cdef int j
        for j in range(len(digits)):
            nd[j] = digits[j]
        return self.insert(nt, nd, len(digits), just)


def saturate(prog, gd, prune, target_code, budget, record_just):
    """Run the worklist to fixpoint (or until target_code is derived).

    Returns (codes, justs, stats, hit_target).
    """
    cdef _Kernel K = _Kernel()
    cdef int i, j, k, k2, nt, slot, pos, lbl, lhs, tag, rid, a
    cdef int fp, fs, lp, ls, sv, su, npred, other
    cdef long u, v, u2, v2, cursor, parent
    cdef u64 code, rem
    cdef long dig[MAX_DIGITS]
    cdef long nd[MAX_DIGITS]
    cdef bint ok

    if gd.fact_space > MAX_FACT_SPACE:
        raise ValueError(
            "fact space exceeds the compiled kernel's 64-bit packing; "
            "use the pure-Python kernel"
        )

    K.radix = gd.radix
    for b in gd.nt_base:
        K.nt_base.push_back(<u64> b)
    for b in prog.arities:
        K.arities.push_back(<int> b)
    K.nl = len(prog.labels)
    K.t5rules = prog.t5rules
    K.closure = gd.closure if prune else None
    K.record_just = record_just
    K.justs = [] if record_just else None
    K.has_target = target_code >= 0
    K.target_code = <u64> target_code if target_code >= 0 else 0
    K.budget = budget
    K.inserted = 0
    K.pruned = 0
    K.hit = False

    occs = prog.occs
    t5rules = prog.t5rules
    in_by = gd.in_by
    out_by = gd.out_by
    eps_in = gd.eps_in
    eps_out = gd.eps_out
    by_label = gd.edges_by_label
    cdef long nl = K.nl

    K.stores = [
        tuple({} for _ in r.rhs_nts) if len(r.rhs_nts) > 1 else None
        for r in t5rules
    ]
    K.store_occs = tuple(
        tuple(
            (occ[1], occ[2])
            for occ in nt_occs
            if occ[0] == 5 and len(t5rules[occ[1]].rhs_nts) > 1
        )
        for nt_occs in occs
    )

    # initialization: every T1 rule against every matching edge
    for lbl, nt in prog.t1:
        for u, v in by_label[lbl]:
            nd[0] = u
            nd[1] = v
            K.insert(nt, nd, 2, (0, lbl, u, v))
            if K.hit:
                return _result(K, 0)

    cursor = 0
    cdef int n_nt = <int> K.nt_base.size()
    while cursor < <long> K.codes.size():
        code = K.codes[cursor]
        nt = 0
        for i in range(n_nt - 1, -1, -1):
            if code >= K.nt_base[i]:
                nt = i
                break
        rem = code - K.nt_base[nt]
        k = K.arities[nt]
        k2 = 2 * k
        for j in range(k2):
            dig[j] = <long> (rem % <u64> K.radix)
            rem = rem // <u64> K.radix
        parent = cursor
        cursor += 1

        # epsilon expansion: stretch any pair along a single epsilon edge
        for slot in range(k):
            u = dig[2 * slot]
            v = dig[2 * slot + 1]
            for u2 in eps_in[u]:
                if u2 != u:
                    for j in range(k2):
                        nd[j] = dig[j]
                    nd[2 * slot] = u2
                    K.insert(nt, nd, k2, (1, parent, slot, u2))
            for v2 in eps_out[v]:
                if v2 != v:
                    for j in range(k2):
                        nd[j] = dig[j]
                    nd[2 * slot + 1] = v2
                    K.insert(nt, nd, k2, (2, parent, slot, v2))
        if K.hit:
            break

        for occ in occs[nt]:
            tag = occ[0]
            if tag == 2:
                lhs = occ[1]
                slot = occ[2]
                lbl = occ[3]
                hits = in_by.get(dig[2 * slot] * nl + lbl)
                if hits is not None:
                    for u2 in hits:
                        for j in range(k2):
                            nd[j] = dig[j]
                        nd[2 * slot] = u2
                        K.insert(lhs, nd, k2, (3, parent, slot, lbl, u2))
            elif tag == 3:
                lhs = occ[1]
                slot = occ[2]
                lbl = occ[3]
                hits = out_by.get(dig[2 * slot + 1] * nl + lbl)
                if hits is not None:
                    for v2 in hits:
                        for j in range(k2):
                            nd[j] = dig[j]
                        nd[2 * slot + 1] = v2
                        K.insert(lhs, nd, k2, (4, parent, slot, lbl, v2))
            elif tag == 4:
                lhs = occ[1]
                pos = occ[2]
                lbl = occ[3]
                for u, v in by_label[lbl]:
                    for j in range(2 * pos):
                        nd[j] = dig[j]
                    nd[2 * pos] = u
                    nd[2 * pos + 1] = v
                    for j in range(2 * pos, k2):
                        nd[j + 2] = dig[j]
                    K.insert(lhs, nd, k2 + 2, (5, parent, pos, lbl, u, v))
            else:
                rid = occ[1]
                pos = occ[2]
                rule = t5rules[rid]
                ok = True
                for sv, su in rule.internal[pos]:
                    if dig[2 * sv + 1] != dig[2 * su]:
                        ok = False
                        break
                if not ok:
                    continue
                npred = len(rule.rhs_nts)
                if npred == 1:
                    ends = rule.ends
                    for a, (fp, fs, lp, ls) in enumerate(ends):
                        nd[2 * a] = dig[2 * fs]
                        nd[2 * a + 1] = dig[2 * ls + 1]
                    K.insert(
                        rule.lhs_nt, nd, 2 * len(ends), (6, rid, (parent,))
                    )
                elif npred == 2:
                    other = 1 - pos
                    key = tuple([dig[d] for d in rule.keydigits[pos]])
                    bucket = K.stores[rid][other].get(key)
                    if not bucket:
                        continue
                    ends = rule.ends
                    lhs = rule.lhs_nt
                    digits = tuple([dig[j] for j in range(k2)])
                    for oidx, odig in bucket:
                        if pos == 0:
                            facts = (digits, odig)
                            children = (parent, oidx)
                        else:
                            facts = (odig, digits)
                            children = (oidx, parent)
                        for a, (fp, fs, lp, ls) in enumerate(ends):
                            nd[2 * a] = facts[fp][2 * fs]
                            nd[2 * a + 1] = facts[lp][2 * ls + 1]
                        K.insert(lhs, nd, 2 * len(ends), (6, rid, children))
                else:
                    digits_list = [dig[j] for j in range(k2)]
                    _join_wide(K, rule, rid, pos, parent, digits_list)
            if K.hit:
                break
        if K.hit:
            break

    return _result(K, cursor)


def _join_wide(K, rule, rid, pos, parent, digits):
    """Rank > 2 join: nested enumeration over the other positions with full
    constraint checks.  Rare in practice; kept simple."""
    npred = len(rule.rhs_nts)
    assignment = [None] * npred
    children = [None] * npred
    assignment[pos] = tuple(digits)
    children[pos] = parent
    order = [q for q in range(npred) if q != pos]

    def ok_so_far():
        for pa, sa, pb, sb in rule.cross:
            fa, fb = assignment[pa], assignment[pb]
            if fa is None or fb is None:
                continue
            if fa[2 * sa + 1] != fb[2 * sb]:
                return False
        return True

    def rec(level):
        if level == len(order):
            nd = [0] * (2 * len(rule.ends))
            for a, (fp, fs, lp, ls) in enumerate(rule.ends):
                nd[2 * a] = assignment[fp][2 * fs]
                nd[2 * a + 1] = assignment[lp][2 * ls + 1]
            K.insert_list(rule.lhs_nt, nd, (6, rid, tuple(children)))
            return
        q = order[level]
        for bucket in K.stores[rid][q].values():
            for oidx, odig in bucket:
                assignment[q] = odig
                children[q] = oidx
                if ok_so_far():
                    rec(level + 1)
        assignment[q] = None
        children[q] = None

    rec(0)


cdef _result(_Kernel K, long extracted):
    codes = [K.codes[i] for i in range(K.codes.size())]
    stats = {
        "facts_inserted": K.inserted,
        "facts_extracted": extracted,
        "facts_pruned": K.pruned,
    }
    return codes, K.justs, stats, K.hit
