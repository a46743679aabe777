"""Pure-Python kernels; the fallback when the compiled extension is absent.

Signatures and, crucially, *operation order* match `_speedups.pyx` exactly:
every float multiplication happens over the same values in the same
sequence, and all randomness is drawn by the caller, so a run transcribes
identically on either backend.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def keep_pass(k_dst, k_cdst, k_src, k_csrc, live, coloured, act_over_l, m, keep_out, t_out):
    """One linear scan over entries sorted by (dst, cdst, src).

    For each live (dst, cdst) of an uncoloured dst: t_out accumulates the
    number of live first-components at each uncoloured neighbour src, and
    keep_out multiplies in the per-neighbour survival factor
    (1 - act_over_l * count).  A non-positive factor (possible at desk
    scale) is clamped to 0, which then absorbs the whole product — the
    caller flags keep == 0 as a clamping event.  Runs with count 0 skip
    the multiply (a *1.0 no-op either way, but both backends skip
    identically).
    """
    n_entries = k_dst.shape[0]
    i = 0
    while i < n_entries:
        d = k_dst[i]
        cd = k_cdst[i]
        s = k_src[i]
        j = i
        count = 0
        while j < n_entries and k_dst[j] == d and k_cdst[j] == cd and k_src[j] == s:
            if coloured[s] == 0 and live[s * m + k_csrc[j]] != 0:
                count += 1
            j += 1
        if count > 0 and coloured[d] == 0 and live[d * m + cd] != 0:
            key = d * m + cd
            t_out[key] += count
            factor = 1.0 - act_over_l * count
            if factor < 0.0:
                factor = 0.0
            keep_out[key] *= factor
        i = j


def apply_removals(removal_off, r_dst, r_cdst, assigned, start_unc, live_before, live, m):
    """Apply every removal fired by this iteration's assignments.

    assigned[s] is the drawn colour index for activated s, else -1.  An
    entry fires when its target vertex started the iteration uncoloured
    and the target colour was live when the phase began (live_before);
    firing entries are all logged — duplicates per (dst, cdst) with
    different sources included, they are distinct removal causes — and the
    colour is cleared in `live`.

    Returns (ev_dst, ev_cdst, ev_src) int32 arrays.
    """
    ev_d: list[int] = []
    ev_c: list[int] = []
    ev_s: list[int] = []
    n = assigned.shape[0]
    for s in range(n):
        a = assigned[s]
        if a < 0:
            continue
        lo = removal_off[s * m + a]
        hi = removal_off[s * m + a + 1]
        for e in range(lo, hi):
            d = r_dst[e]
            cd = r_cdst[e]
            if start_unc[d] != 0 and live_before[d * m + cd] != 0:
                ev_d.append(int(d))
                ev_c.append(int(cd))
                ev_s.append(int(s))
                live[d * m + cd] = 0
    return (
        np.asarray(ev_d, dtype=np.int32),
        np.asarray(ev_c, dtype=np.int32),
        np.asarray(ev_s, dtype=np.int32),
    )


def brute_force_search(cand_off, cand_cols, grp_off, g_u, g_cu, g_cv, n):
    """Lexicographically-first proper assignment by depth-first search.

    Vertices are assigned in index order, candidate colours in the order
    given (callers pass them sorted).  grp arrays hold, per vertex v, the
    constraints towards already-assigned vertices u < v as (u, c_u, c_v)
    triples; a candidate colour c at v is pruned when some chosen[u] == c_u
    and c == c_v.  Returns an int64 colour array or None.
    """
    choice = np.full(n, -1, dtype=np.int64)
    pos = np.zeros(n, dtype=np.int64)
    v = 0
    while True:
        if v == n:
            return choice.copy()
        lo = cand_off[v]
        hi = cand_off[v + 1]
        placed = False
        p = pos[v]
        while p < hi - lo:
            c = cand_cols[lo + p]
            ok = True
            for e in range(grp_off[v], grp_off[v + 1]):
                if choice[g_u[e]] == g_cu[e] and c == g_cv[e]:
                    ok = False
                    break
            if ok:
                choice[v] = c
                pos[v] = p + 1
                placed = True
                break
            p += 1
        if placed:
            v += 1
            if v < n:
                pos[v] = 0
        else:
            choice[v] = -1
            pos[v] = 0
            v -= 1
            if v < 0:
                return None
