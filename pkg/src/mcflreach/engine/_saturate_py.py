"""Pure-Python saturation kernel.

Facts are packed integers (see program.py); the worklist is the insertion
order itself, so extraction is a cursor over the fact list.  A fact is
inserted at most once; justification records reference parents by index,
and parents are always inserted strictly earlier.

The compiled twin (_saturate_cy.pyx) mirrors this file statement for
statement; behavioral changes must be made in both.
"""

from __future__ import annotations

from ..errors import BudgetError

KERNEL_NAME = "py"


def saturate(prog, gd, prune, target_code, budget, record_just):
    """Run the worklist to fixpoint (or until target_code is derived).

    Returns (codes, justs, stats, hit_target).
    """
    radix = gd.radix
    nt_base = gd.nt_base
    arities = prog.arities
    occs = prog.occs
    t5rules = prog.t5rules
    in_by = gd.in_by
    out_by = gd.out_by
    eps_in = gd.eps_in
    eps_out = gd.eps_out
    by_label = gd.edges_by_label
    closure = gd.closure if prune else None
    nl = len(prog.labels)

    codes: list[int] = []
    justs: list = [] if record_just else None
    seen: set[int] = set()
    # per T5 rule, per position: key -> list of (fact index, digits)
    stores = [
        tuple({} for _ in r.rhs_nts) if len(r.rhs_nts) > 1 else None
        for r in t5rules
    ]
    # per nonterminal, the multi-predicate T5 positions it feeds
    store_occs = tuple(
        tuple(
            (occ[1], occ[2])
            for occ in nt_occs
            if occ[0] == 5 and len(t5rules[occ[1]].rhs_nts) > 1
        )
        for nt_occs in occs
    )

    inserted = 0
    pruned = 0
    hit = False

    def insert(nt, digits, just):
        nonlocal inserted, pruned, hit
        if closure is not None:
            k2 = len(digits)
            for j in range(1, k2 - 1, 2):
                # v of pair j//2 must plainly reach u of the next pair
                if not (closure[digits[j]] >> digits[j + 1]) & 1:
                    pruned += 1
                    return False
        code = 0
        for d in reversed(digits):
            code = code * radix + d
        code += nt_base[nt]
        if code in seen:
            return False
        seen.add(code)
        codes.append(code)
        if record_just:
            justs.append(just)
        inserted += 1
        if inserted > budget:
            raise BudgetError(f"fact budget of {budget} exceeded")
        if code == target_code:
            hit = True
        # index the new fact for every multi-predicate T5 rule it can feed
        idx = len(codes) - 1
        for rid, pos in store_occs[nt]:
            rule = t5rules[rid]
            ok = True
            for sv, su in rule.internal[pos]:
                if digits[2 * sv + 1] != digits[2 * su]:
                    ok = False
                    break
            if not ok:
                continue
            key = tuple(digits[d] for d in rule.keydigits[pos])
            stores[rid][pos].setdefault(key, []).append((idx, tuple(digits)))
        return True

    # initialization: every T1 rule against every matching edge
    for lbl, nt in prog.t1:
        for u, v in by_label[lbl]:
            insert(nt, (u, v), (0, lbl, u, v))
            if hit:
                return codes, justs, _stats(inserted, 0, pruned), True

    cursor = 0
    while cursor < len(codes):
        code = codes[cursor]
        # decode
        nt = 0
        for i in range(len(nt_base) - 1, -1, -1):
            if code >= nt_base[i]:
                nt = i
                break
        rem = code - nt_base[nt]
        k = arities[nt]
        digits = []
        for _ in range(2 * k):
            rem, d = divmod(rem, radix)
            digits.append(d)
        parent = cursor
        cursor += 1

        # epsilon expansion: stretch any pair along a single epsilon edge
        for slot in range(k):
            u = digits[2 * slot]
            v = digits[2 * slot + 1]
            for u2 in eps_in[u]:
                if u2 != u:
                    nd = list(digits)
                    nd[2 * slot] = u2
                    insert(nt, nd, (1, parent, slot, u2))
            for v2 in eps_out[v]:
                if v2 != v:
                    nd = list(digits)
                    nd[2 * slot + 1] = v2
                    insert(nt, nd, (2, parent, slot, v2))
        if hit:
            break

        for occ in occs[nt]:
            tag = occ[0]
            if tag == 2:
                _, lhs, slot, lbl = occ
                for u2 in in_by.get(digits[2 * slot] * nl + lbl, ()):
                    nd = list(digits)
                    nd[2 * slot] = u2
                    insert(lhs, nd, (3, parent, slot, lbl, u2))
            elif tag == 3:
                _, lhs, slot, lbl = occ
                for v2 in out_by.get(digits[2 * slot + 1] * nl + lbl, ()):
                    nd = list(digits)
                    nd[2 * slot + 1] = v2
                    insert(lhs, nd, (4, parent, slot, lbl, v2))
            elif tag == 4:
                _, lhs, pos, lbl = occ
                for u, v in by_label[lbl]:
                    nd = digits[: 2 * pos] + [u, v] + digits[2 * pos :]
                    insert(lhs, nd, (5, parent, pos, lbl, u, v))
            else:
                _, rid, pos = occ
                rule = t5rules[rid]
                ok = True
                for sv, su in rule.internal[pos]:
                    if digits[2 * sv + 1] != digits[2 * su]:
                        ok = False
                        break
                if not ok:
                    continue
                npred = len(rule.rhs_nts)
                if npred == 1:
                    nd = [0] * (2 * len(rule.ends))
                    for a, (fp, fs, lp, ls) in enumerate(rule.ends):
                        nd[2 * a] = digits[2 * fs]
                        nd[2 * a + 1] = digits[2 * ls + 1]
                    insert(rule.lhs_nt, nd, (6, rid, (parent,)))
                elif npred == 2:
                    other = 1 - pos
                    key = tuple(digits[d] for d in rule.keydigits[pos])
                    bucket = stores[rid][other].get(key)
                    if not bucket:
                        continue
                    ends = rule.ends
                    lhs = rule.lhs_nt
                    for oidx, odig in bucket:
                        facts = (digits, odig) if pos == 0 else (odig, digits)
                        children = (
                            (parent, oidx) if pos == 0 else (oidx, parent)
                        )
                        nd = [0] * (2 * len(ends))
                        for a, (fp, fs, lp, ls) in enumerate(ends):
                            nd[2 * a] = facts[fp][2 * fs]
                            nd[2 * a + 1] = facts[lp][2 * ls + 1]
                        insert(lhs, nd, (6, rid, children))
                else:
                    _join_wide(
                        rule, rid, pos, parent, digits, stores, insert
                    )
            if hit:
                break
        if hit:
            break

    return codes, justs, _stats(inserted, cursor, pruned), hit


def _join_wide(rule, rid, pos, parent, digits, stores, insert):
    """Rank > 2 join: nested enumeration over the other positions with full
    constraint checks.  Rare in practice; kept simple."""
    npred = len(rule.rhs_nts)
    assignment: list = [None] * npred
    children: list = [None] * npred
    assignment[pos] = tuple(digits)
    children[pos] = parent

    def ok_so_far() -> bool:
        for pa, sa, pb, sb in rule.cross:
            fa, fb = assignment[pa], assignment[pb]
            if fa is None or fb is None:
                continue
            if fa[2 * sa + 1] != fb[2 * sb]:
                return False
        return True

    order = [q for q in range(npred) if q != pos]

    def rec(level: int):
        if level == len(order):
            nd = [0] * (2 * len(rule.ends))
            for a, (fp, fs, lp, ls) in enumerate(rule.ends):
                nd[2 * a] = assignment[fp][2 * fs]
                nd[2 * a + 1] = assignment[lp][2 * ls + 1]
            insert(rule.lhs_nt, nd, (6, rid, tuple(children)))
            return
        q = order[level]
        for bucket in stores[rid][q].values():
            for oidx, odig in bucket:
                assignment[q] = odig
                children[q] = oidx
                if ok_so_far():
                    rec(level + 1)
        assignment[q] = None
        children[q] = None

    rec(0)


def _stats(inserted: int, extracted: int, pruned: int) -> dict:
    return {
        "facts_inserted": inserted,
        "facts_extracted": extracted,
        "facts_pruned": pruned,
    }
