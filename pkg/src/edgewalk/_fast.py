"""Numba streaming kernels for the hot loops.

Every kernel draws its ±1 steps from the same counter-based SplitMix64 stream
as :mod:`edgewalk.rng` (bit ``b`` of word ``k`` is step ``64*k + b``), so a
kernel run and a numpy-side ``StepGenerator.steps`` run over the same
``(master_seed, stream_index)`` see the identical path.

Site-indexed arrays are dense over ``[-span, span]`` with offset ``span + 1``;
kernels return a nonzero status when the walk leaves that window and the
Python wrappers simply retry with a doubled span (the stream is counter-based,
so the rerun reproduces the same path).

Favorite sets are maintained with the O(1) streaming rule: a counter that
exceeds the current max resets the argmax set to a singleton; a counter that
ties the max appends (it cannot already be a member, having just been
incremented from max-1).

The per-step crossing-identity checks in ``identity_audit`` test, at the one
edge touched by the step, the up/down-crossing difference identity and all
three local-time decompositions.  Both sides of each identity change only at
that edge, and all hold trivially at n=0, so by induction the per-step check
at the touched edge certifies them at every (x, n) pair; a full-range sweep
runs periodically as a belt-and-suspenders cross-check.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_GOLD = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_ONE = U64(1)

STATUS_OK = 0
STATUS_SPAN = 1
STATUS_EVCAP = 2


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _word(base, k):
    return _mix(base + _GOLD * U64(k + 1))


@njit(cache=True)
def identity_audit(base, n_steps, full_every, span):
    """Stream n_steps, checking the crossing identities and the favorite-edge
    / favorite-downcross-site coupling at every step.

    Returns (status, viol_updown, viol_sum, viol_twice_up, viol_twice_down,
    viol_prop24, viol_full_sweep).
    """
    off = span + 1
    size = 2 * span + 3
    up = np.zeros(size, np.int64)
    down = np.zeros(size, np.int64)
    edge = np.zeros(size, np.int64)

    kcap = 64
    kset = np.empty(kcap, np.int64)
    ksize = 0
    max_edge = 0
    max_down = 0
    # visited range of S_0..S_{n-1} (sites the walk has already left)
    lo = 0
    hi = 0

    pos = 0
    v_updown = 0
    v_sum = 0
    v_2up = 0
    v_2down = 0
    v_prop24 = 0
    v_full = 0

    widx = 0
    buf = U64(0)
    nbits = 0

    for n in range(1, n_steps + 1):
        if nbits == 0:
            buf = _word(base, widx)
            widx += 1
            nbits = 64
        bit = buf & _ONE
        buf >>= _ONE
        nbits -= 1

        prev = pos
        if prev < lo:
            lo = prev
        elif prev > hi:
            hi = prev
        if bit == _ONE:
            pos = prev + 1
            e = pos
            up[pos + off] += 1
        else:
            pos = prev - 1
            e = prev
            down[pos + off] += 1
            d = down[pos + off]
            if d > max_down:
                max_down = d
            elif d < max_down:
                pass
        if pos >= span or pos <= -span:
            return (STATUS_SPAN, 0, 0, 0, 0, 0, 0)

        edge[e + off] += 1
        c = edge[e + off]
        if c > max_edge:
            max_edge = c
            kset[0] = e
            ksize = 1
        elif c == max_edge:
            if ksize == kcap:
                bigger = np.empty(kcap * 2, np.int64)
                bigger[:kcap] = kset
                kset = bigger
                kcap *= 2
            kset[ksize] = e
            ksize += 1

        # identities at the touched edge x* = e
        ind = 0
        if 0 < e <= pos:
            ind = 1
        elif pos < e <= 0:
            ind = -1
        a = up[e + off]
        b = down[e - 1 + off]
        lt = edge[e + off]
        if a - b != ind:
            v_updown += 1
        if lt != a + b:
            v_sum += 1
        if lt != 2 * a - ind:
            v_2up += 1
        if lt != 2 * b + ind:
            v_2down += 1

        # favorite-edge left neighbors must be favorite downcrossing sites
        for i in range(ksize):
            y = kset[i] - 1
            if max_down == 0:
                if y < lo or y > hi:
                    v_prop24 += 1
            else:
                if down[y + off] != max_down:
                    v_prop24 += 1

        if n % full_every == 0 or n == n_steps:
            for x in range(lo - 1, hi + 3):
                ind = 0
                if 0 < x <= pos:
                    ind = 1
                elif pos < x <= 0:
                    ind = -1
                a = up[x + off]
                b = down[x - 1 + off]
                lt = edge[x + off]
                if a - b != ind or lt != a + b or lt != 2 * a - ind or lt != 2 * b + ind:
                    v_full += 1

    return (STATUS_OK, v_updown, v_sum, v_2up, v_2down, v_prop24, v_full)


@njit(cache=True)
def probe_run(base, probes, span):
    """Snapshot favorite-set statistics at the given sorted probe times.

    Per probe: position, max edge local time, #K, min|x| over K (Utilde),
    max downcross count, #U, min|x| over U (U), prop24 ok flag (1/0).
    """
    np_probes = probes.shape[0]
    out_pos = np.zeros(np_probes, np.int64)
    out_maxL = np.zeros(np_probes, np.int64)
    out_ksize = np.zeros(np_probes, np.int64)
    out_utilde = np.zeros(np_probes, np.int64)
    out_maxD = np.zeros(np_probes, np.int64)
    out_usize = np.zeros(np_probes, np.int64)
    out_u = np.zeros(np_probes, np.int64)
    out_p24 = np.zeros(np_probes, np.int64)

    off = span + 1
    size = 2 * span + 3
    down = np.zeros(size, np.int64)
    edge = np.zeros(size, np.int64)

    kcap = 64
    kset = np.empty(kcap, np.int64)
    ksize = 0
    ucap = 64
    uset = np.empty(ucap, np.int64)
    usize = 0
    max_edge = 0
    max_down = 0
    lo = 0
    hi = 0
    pos = 0

    widx = 0
    buf = U64(0)
    nbits = 0
    ptr = 0
    n_last = probes[np_probes - 1]

    for n in range(1, n_last + 1):
        if nbits == 0:
            buf = _word(base, widx)
            widx += 1
            nbits = 64
        bit = buf & _ONE
        buf >>= _ONE
        nbits -= 1

        prev = pos
        if prev < lo:
            lo = prev
        elif prev > hi:
            hi = prev
        if bit == _ONE:
            pos = prev + 1
            e = pos
        else:
            pos = prev - 1
            e = prev
            down[pos + off] += 1
            d = down[pos + off]
            if d > max_down:
                max_down = d
                uset[0] = pos
                usize = 1
            elif d == max_down:
                if usize == ucap:
                    bigger = np.empty(ucap * 2, np.int64)
                    bigger[:ucap] = uset
                    uset = bigger
                    ucap *= 2
                uset[usize] = pos
                usize += 1
        if pos >= span or pos <= -span:
            out_pos[0] = -1
            return (STATUS_SPAN, out_pos, out_maxL, out_ksize, out_utilde,
                    out_maxD, out_usize, out_u, out_p24)

        edge[e + off] += 1
        c = edge[e + off]
        if c > max_edge:
            max_edge = c
            kset[0] = e
            ksize = 1
        elif c == max_edge:
            if ksize == kcap:
                bigger = np.empty(kcap * 2, np.int64)
                bigger[:kcap] = kset
                kset = bigger
                kcap *= 2
            kset[ksize] = e
            ksize += 1

        if n == probes[ptr]:
            out_pos[ptr] = pos
            out_maxL[ptr] = max_edge
            out_ksize[ptr] = ksize
            ut = abs(kset[0])
            p24 = 1
            for i in range(ksize):
                ax = abs(kset[i])
                if ax < ut:
                    ut = ax
                y = kset[i] - 1
                if max_down == 0:
                    if y < lo or y > hi:
                        p24 = 0
                else:
                    if down[y + off] != max_down:
                        p24 = 0
            out_utilde[ptr] = ut
            out_maxD[ptr] = max_down
            if max_down == 0:
                out_usize[ptr] = hi - lo + 1
                out_u[ptr] = 0
            else:
                out_usize[ptr] = usize
                um = abs(uset[0])
                for i in range(usize):
                    ax = abs(uset[i])
                    if ax < um:
                        um = ax
                out_u[ptr] = um
            out_p24[ptr] = p24
            ptr += 1
            if ptr == np_probes:
                break

    return (STATUS_OK, out_pos, out_maxL, out_ksize, out_utilde,
            out_maxD, out_usize, out_u, out_p24)


@njit(cache=True)
def event_run(base, big_h, max_steps, span, ev_cap):
    """Run until the max edge local time exceeds 2*big_h, recording every
    crossing step at which the favorite-edge set is exactly {x, x+1, x+2}
    with an even shared local time.

    Up events fire at steps x-2 -> x-1 (inverse upcrossing times); the
    recorded k is the new upcrossing count minus one.  Down events fire at
    steps x -> x-1 (inverse downcrossing times); the recorded h is the new
    downcrossing count, which the even shared local time must equal twice.

    Also tallies, per step up to the stop time, how many steps had exactly
    r favorite edges (r = 1,2,3,>=4) and the same restricted to steps whose
    crossed edge is itself a favorite.

    Returns (status, stop_time, n_events, ev_kind, ev_x, ev_h, ev_k, ev_time,
    f_counts, ftilde_counts).  kind 0 = up event, 1 = down event.
    stop_time = -1 if max_steps was exhausted first.
    """
    off = span + 1
    size = 2 * span + 3
    up = np.zeros(size, np.int64)
    down = np.zeros(size, np.int64)
    edge = np.zeros(size, np.int64)

    kcap = 64
    kset = np.empty(kcap, np.int64)
    ksize = 0
    max_edge = 0
    pos = 0

    ev_kind = np.zeros(ev_cap, np.int8)
    ev_x = np.zeros(ev_cap, np.int64)
    ev_h = np.zeros(ev_cap, np.int64)
    ev_k = np.zeros(ev_cap, np.int64)
    ev_time = np.zeros(ev_cap, np.int64)
    n_ev = 0

    f_counts = np.zeros(4, np.int64)
    ft_counts = np.zeros(4, np.int64)

    widx = 0
    buf = U64(0)
    nbits = 0
    limit = 2 * big_h
    stop_time = -1

    for n in range(1, max_steps + 1):
        if nbits == 0:
            buf = _word(base, widx)
            widx += 1
            nbits = 64
        bit = buf & _ONE
        buf >>= _ONE
        nbits -= 1

        prev = pos
        went_up = bit == _ONE
        if went_up:
            pos = prev + 1
            e = pos
            up[pos + off] += 1
        else:
            pos = prev - 1
            e = prev
            down[pos + off] += 1
        if pos >= span or pos <= -span:
            return (STATUS_SPAN, -1, 0, ev_kind, ev_x, ev_h, ev_k, ev_time,
                    f_counts, ft_counts)

        edge[e + off] += 1
        c = edge[e + off]
        fav = False
        if c > max_edge:
            max_edge = c
            kset[0] = e
            ksize = 1
            fav = True
        elif c == max_edge:
            if ksize == kcap:
                bigger = np.empty(kcap * 2, np.int64)
                bigger[:kcap] = kset
                kset = bigger
                kcap *= 2
            kset[ksize] = e
            ksize += 1
            fav = True

        r = ksize if ksize < 4 else 4
        f_counts[r - 1] += 1
        if fav:
            ft_counts[r - 1] += 1

        if ksize == 3:
            x = pos + 1 if went_up else prev
            if x >= 2:
                have = 0
                for i in range(3):
                    m = kset[i]
                    if m == x or m == x + 1 or m == x + 2:
                        have += 1
                if have == 3 and max_edge % 2 == 0:
                    h = max_edge // 2
                    if n_ev == ev_cap:
                        return (STATUS_EVCAP, -1, n_ev, ev_kind, ev_x, ev_h,
                                ev_k, ev_time, f_counts, ft_counts)
                    if went_up:
                        ev_kind[n_ev] = 0
                        ev_k[n_ev] = up[pos + off] - 1
                        ev_x[n_ev] = x
                        ev_h[n_ev] = h
                        ev_time[n_ev] = n
                        n_ev += 1
                    else:
                        if down[pos + off] == h:
                            ev_kind[n_ev] = 1
                            ev_k[n_ev] = -1
                            ev_x[n_ev] = x
                            ev_h[n_ev] = h
                            ev_time[n_ev] = n
                            n_ev += 1

        if max_edge > limit:
            stop_time = n
            break

    return (STATUS_OK, stop_time, n_ev, ev_kind, ev_x, ev_h, ev_k, ev_time,
            f_counts, ft_counts)


@njit(cache=True)
def down_tally_run(base, horizon, span):
    """Tallies of #U(n) in {1,2,3,>=4} over n = 1..horizon."""
    off = span + 1
    size = 2 * span + 3
    down = np.zeros(size, np.int64)
    max_down = 0
    usize = 0
    lo = 0
    hi = 0
    pos = 0
    tallies = np.zeros(4, np.int64)

    widx = 0
    buf = U64(0)
    nbits = 0

    for n in range(1, horizon + 1):
        if nbits == 0:
            buf = _word(base, widx)
            widx += 1
            nbits = 64
        bit = buf & _ONE
        buf >>= _ONE
        nbits -= 1

        prev = pos
        if prev < lo:
            lo = prev
        elif prev > hi:
            hi = prev
        if bit == _ONE:
            pos = prev + 1
        else:
            pos = prev - 1
            down[pos + off] += 1
            d = down[pos + off]
            if d > max_down:
                max_down = d
                usize = 1
            elif d == max_down:
                usize += 1
        if pos >= span or pos <= -span:
            tallies[0] = -1
            return (STATUS_SPAN, tallies)

        sz = usize if max_down > 0 else hi - lo + 1
        r = sz if sz < 4 else 4
        tallies[r - 1] += 1

    return (STATUS_OK, tallies)


@njit(cache=True)
def stopped_run_kernel(base, target_site, target_count, kind_up, win_lo,
                       win_hi, cap, span):
    """Run to the inverse crossing time of (target_site, target_count) and
    return the downcrossing profile over [win_lo, win_hi] at that time.

    Returns (status, stop_time, profile); stop_time = -1 when censored at cap.
    """
    off = span + 1
    size = 2 * span + 3
    down = np.zeros(size, np.int64)
    width = win_hi - win_lo + 1
    profile = np.zeros(width, np.int64)

    pos = 0
    hits = 0
    widx = 0
    buf = U64(0)
    nbits = 0
    stop_time = -1

    for n in range(1, cap + 1):
        if nbits == 0:
            buf = _word(base, widx)
            widx += 1
            nbits = 64
        bit = buf & _ONE
        buf >>= _ONE
        nbits -= 1

        prev = pos
        if bit == _ONE:
            pos = prev + 1
            if kind_up == 1 and pos == target_site:
                hits += 1
        else:
            pos = prev - 1
            down[pos + off] += 1
            if kind_up == 0 and pos == target_site:
                hits += 1
        if pos >= span or pos <= -span:
            return (STATUS_SPAN, -1, profile)
        if hits == target_count:
            stop_time = n
            break

    if stop_time >= 0:
        for y in range(win_lo, win_hi + 1):
            profile[y - win_lo] = down[y + off]
    return (STATUS_OK, stop_time, profile)


@njit(cache=True)
def stopped_profile_batch(master_mixed, stream0, n_rep, target_site,
                          target_count, kind_up, win_lo, win_hi, cap, span0):
    """Batch of stopped runs over streams stream0..stream0+n_rep-1.

    Per-replica span doubling on overflow; the counter-based stream makes the
    retry reproduce the same path.  Returns (stop_times, profiles).
    """
    width = win_hi - win_lo + 1
    profiles = np.zeros((n_rep, width), np.int64)
    stop_times = np.empty(n_rep, np.int64)
    for r in range(n_rep):
        base = _mix(master_mixed + _GOLD * U64(stream0 + r))
        span = span0
        while True:
            status, st, prof = stopped_run_kernel(
                base, target_site, target_count, kind_up, win_lo, win_hi,
                cap, span)
            if status == STATUS_OK:
                stop_times[r] = st
                profiles[r] = prof
                break
            span *= 2
    return stop_times, profiles


@njit(cache=True)
def block_run(base, mode, cap):
    """Downcrossing-block statistics at the origin.

    mode 0: number of 2->1 downcrossings before the first 1->0 downcrossing.
    mode 1: number of 1->0 downcrossings strictly between the first and the
            second 2->1 downcrossings.

    Returns (value, censored_flag).
    """
    pos = 0
    widx = 0
    buf = U64(0)
    nbits = 0
    count = 0
    upper_hits = 0
    for _ in range(cap):
        if nbits == 0:
            buf = _word(base, widx)
            widx += 1
            nbits = 64
        bit = buf & _ONE
        buf >>= _ONE
        nbits -= 1
        prev = pos
        pos = prev + 1 if bit == _ONE else prev - 1
        if pos == prev - 1:
            if mode == 0:
                if pos == 1:
                    count += 1
                elif pos == 0 and prev == 1:
                    return (count, 0)
            else:
                if pos == 1 and prev == 2:
                    upper_hits += 1
                    if upper_hits == 2:
                        return (count, 0)
                elif pos == 0 and prev == 1 and upper_hits == 1:
                    count += 1
    return (count, 1)


@njit(cache=True)
def block_batch(master_mixed, stream0, n_rep, mode, cap):
    values = np.empty(n_rep, np.int64)
    censored = np.empty(n_rep, np.int8)
    for r in range(n_rep):
        base = _mix(master_mixed + _GOLD * U64(stream0 + r))
        v, c = block_run(base, mode, cap)
        values[r] = v
        censored[r] = c
    return values, censored


@njit(cache=True)
def neighbor_gap_run(base, probes, span):
    """Per probe: sup_x |xi_D(x+1,n) - xi_D(x,n)|, the (1,0) gap, the max
    downcross count, and the max site local time."""
    npr = probes.shape[0]
    out_sup = np.zeros(npr, np.int64)
    out_gap01 = np.zeros(npr, np.int64)
    out_maxd = np.zeros(npr, np.int64)
    out_maxvisit = np.zeros(npr, np.int64)

    off = span + 1
    size = 2 * span + 3
    down = np.zeros(size, np.int64)
    visits = np.zeros(size, np.int64)
    max_visit = 0
    max_down = 0
    lo = 0
    hi = 0
    pos = 0

    widx = 0
    buf = U64(0)
    nbits = 0
    ptr = 0
    n_last = probes[npr - 1]

    for n in range(1, n_last + 1):
        if nbits == 0:
            buf = _word(base, widx)
            widx += 1
            nbits = 64
        bit = buf & _ONE
        buf >>= _ONE
        nbits -= 1

        prev = pos
        if bit == _ONE:
            pos = prev + 1
        else:
            pos = prev - 1
            down[pos + off] += 1
            if down[pos + off] > max_down:
                max_down = down[pos + off]
        if pos >= span or pos <= -span:
            out_sup[0] = -1
            return (STATUS_SPAN, out_sup, out_gap01, out_maxd, out_maxvisit)
        visits[pos + off] += 1
        if visits[pos + off] > max_visit:
            max_visit = visits[pos + off]
        if pos < lo:
            lo = pos
        elif pos > hi:
            hi = pos

        if n == probes[ptr]:
            sup = 0
            for x in range(lo - 1, hi + 1):
                g = down[x + 1 + off] - down[x + off]
                if g < 0:
                    g = -g
                if g > sup:
                    sup = g
            out_sup[ptr] = sup
            g01 = down[1 + off] - down[off]
            out_gap01[ptr] = g01 if g01 >= 0 else -g01
            out_maxd[ptr] = max_down
            out_maxvisit[ptr] = max_visit
            ptr += 1
            if ptr == npr:
                break

    return (STATUS_OK, out_sup, out_gap01, out_maxd, out_maxvisit)


@njit(cache=True)
def embed_run(base, m, probes, fine_span):
    """Fine-walk Wiener proxy with unit-increment exit times.

    The fine walk takes ±1 steps on the integer lattice (spatial resolution
    1/m, time resolution 1/m²).  Exit k occurs when the fine position first
    differs by m from its value at exit k-1; the embedded walk records the
    exit value / m.  Occupation counts per fine level estimate the one-side
    local time as occ/(2m) at level m*x.

    At each probe n (sorted) the kernel records
      - d_tau(n)  = sup_x |xi_D_emb(x, n) - occ(m x, tau_n)/(2m)|
      - d_time(n) = sup_x |xi_D_emb(x, n) - occ(m x, n m^2)/(2m)|
    where xi_D_emb is the embedded walk's downcrossing count frozen at its
    own n-th step.  The n-th exit and fine time n*m^2 do not coincide, so
    whichever trigger fires first parks a snapshot for the other.

    Returns (status, emb_steps, tau_fine, d_tau, d_time, occ_center,
    fine_lo, fine_hi) with occ_center = final occupation counts over fine
    levels [-8m-1, 8m+1].
    """
    npr = probes.shape[0]
    n_target = probes[npr - 1]

    off = fine_span + 1
    occ = np.zeros(2 * fine_span + 3, np.int64)
    site_span = fine_span // m + 2
    soff = site_span + 1
    swidth = 2 * site_span + 3
    xi_d = np.zeros(swidth, np.int64)

    emb_steps = np.zeros(n_target, np.int8)
    tau_fine = np.zeros(n_target, np.int64)
    d_tau = np.full(npr, -1.0)
    d_time = np.full(npr, -1.0)
    occ_center = np.zeros(16 * m + 3, np.int64)

    # parked per-probe snapshots, filled by whichever trigger fires first
    xi_snap = np.zeros((npr, swidth), np.int64)
    occ_snap = np.zeros((npr, swidth), np.float64)
    exit_done = np.zeros(npr, np.int8)
    time_done = np.zeros(npr, np.int8)

    f = 0
    anchor = 0
    site = 0
    flo = 0
    fhi = 0
    slo = 0
    shi = 0
    n_coarse = 0

    widx = 0
    buf = U64(0)
    nbits = 0
    t = 0
    m2 = m * m
    inv2m = 1.0 / (2.0 * m)
    time_ptr = 0

    while True:
        if nbits == 0:
            buf = _word(base, widx)
            widx += 1
            nbits = 64
        bit = buf & _ONE
        buf >>= _ONE
        nbits -= 1
        t += 1

        if bit == _ONE:
            f += 1
        else:
            f -= 1
        if f >= fine_span or f <= -fine_span:
            return (STATUS_SPAN, emb_steps, tau_fine, d_tau, d_time,
                    occ_center, flo, fhi)
        occ[f + off] += 1
        if f < flo:
            flo = f
        elif f > fhi:
            fhi = f

        if n_coarse < n_target and (f - anchor == m or anchor - f == m):
            stp = 1 if f > anchor else -1
            anchor = f
            emb_steps[n_coarse] = stp
            tau_fine[n_coarse] = t
            n_coarse += 1
            site += stp
            if stp < 0:
                xi_d[site + soff] += 1
            if site < slo:
                slo = site
            elif site > shi:
                shi = site

            for p in range(npr):
                if probes[p] == n_coarse:
                    xlo = flo // m - 1
                    xhi = fhi // m + 2
                    sup = 0.0
                    for x in range(xlo, xhi + 1):
                        dv = xi_d[x + soff] - occ[m * x + off] * inv2m
                        if dv < 0.0:
                            dv = -dv
                        if dv > sup:
                            sup = dv
                    d_tau[p] = sup
                    if time_done[p] == 1:
                        sup = 0.0
                        for x in range(xlo, xhi + 1):
                            dv = xi_d[x + soff] - occ_snap[p, x + soff]
                            if dv < 0.0:
                                dv = -dv
                            if dv > sup:
                                sup = dv
                        d_time[p] = sup
                    else:
                        xi_snap[p] = xi_d
                    exit_done[p] = 1
                    break

        if time_ptr < npr and t == probes[time_ptr] * m2:
            p = time_ptr
            xlo = flo // m - 1
            xhi = fhi // m + 2
            if exit_done[p] == 1:
                sup = 0.0
                for x in range(xlo, xhi + 1):
                    dv = xi_snap[p, x + soff] - occ[m * x + off] * inv2m
                    if dv < 0.0:
                        dv = -dv
                    if dv > sup:
                        sup = dv
                d_time[p] = sup
            else:
                for x in range(xlo, xhi + 1):
                    occ_snap[p, x + soff] = occ[m * x + off] * inv2m
            time_done[p] = 1
            time_ptr += 1

        if n_coarse >= n_target and time_ptr >= npr:
            done = True
            for p in range(npr):
                if d_time[p] < 0.0:
                    done = False
                    break
            if done:
                break

    c_lo = -8 * m - 1
    for i in range(16 * m + 3):
        lvl = c_lo + i
        if -fine_span <= lvl <= fine_span:
            occ_center[i] = occ[lvl + off]
    return (STATUS_OK, emb_steps, tau_fine, d_tau, d_time, occ_center,
            flo, fhi)
