"""Hot inner loops.

Every function here is wrapped by :func:`rdslab._jit.kernel`: compiled with
numba when enabled, plain Python otherwise. Two rules keep the backends
bit-identical and the pure variant faithful:

* randomness comes only from ``u``, a caller-supplied buffer of uniform
  [0, 1) doubles; kernels never construct generators, and
* kernels are self-contained (no kernel-to-kernel calls), so ``py_func``
  of a compiled kernel is the complete pure implementation.

Loop-style kernels return a status so wrappers can refill the uniform
buffer and resume: 0 = buffer exhausted (call again), nonzero = finished.
Each kernel documents its worst-case uniform consumption per unit of work;
wrappers size buffers against those bounds, so a kernel never reads past
the reserve it checks for.
"""

import numpy as np

from ._jit import kernel

# Worst-case uniforms consumed per unit of work, used to size buffers.
KOSKK_DRAWS_PER_STEP = 8
TUNE_DRAWS_PER_ITER = 3
RDS_DRAWS_PER_UNIT = 40


@kernel
def koskk_evolve_chunk(nbr, wgt, deg, u, step, total_steps, p_r, p_d, p_delta, delta, w0):
    """Advance the weighted-network evolution while uniforms remain.

    ``nbr``/``wgt`` are (n, cap) adjacency rows with live entries in
    ``[0, deg[i])``; they are reallocated (doubled) when a row fills, so the
    possibly-new arrays are returned. One step = local attachment, global
    attachment, node deletion. Consumes at most 8 uniforms per step.

    Returns ``(step_reached, nbr, wgt)``.
    """
    n = deg.shape[0]
    cap = nbr.shape[1]
    pos = 0
    limit = u.shape[0] - KOSKK_DRAWS_PER_STEP
    while step < total_steps and pos <= limit:
        i = int(u[pos] * n)
        pos += 1

        # Local attachment: weighted walk i -> j -> k, triad closure at k.
        di = deg[i]
        if di > 0:
            tot = 0.0
            for c in range(di):
                tot += wgt[i, c]
            r = u[pos] * tot
            pos += 1
            jc = di - 1
            acc = 0.0
            for c in range(di):
                acc += wgt[i, c]
                if r < acc:
                    jc = c
                    break
            j = nbr[i, jc]
            dj = deg[j]
            if dj > 1:
                denom = 0.0
                for c in range(dj):
                    if nbr[j, c] != i:
                        denom += wgt[j, c]
                r = u[pos] * denom
                pos += 1
                kc = -1
                acc = 0.0
                for c in range(dj):
                    if nbr[j, c] != i:
                        acc += wgt[j, c]
                        if r < acc:
                            kc = c
                            break
                if kc < 0:
                    for c in range(dj - 1, -1, -1):
                        if nbr[j, c] != i:
                            kc = c
                            break
                k = nbr[j, kc]
                ikc = -1
                dik = deg[i]
                for c in range(dik):
                    if nbr[i, c] == k:
                        ikc = c
                        break
                if ikc < 0:
                    # No i-k edge: close the triad with probability p_delta.
                    create = u[pos] < p_delta
                    pos += 1
                    if create:
                        if deg[i] >= cap or deg[k] >= cap:
                            newcap = cap * 2
                            nn = np.zeros((n, newcap), dtype=np.int64)
                            ww = np.zeros((n, newcap), dtype=np.float64)
                            for a in range(n):
                                da = deg[a]
                                for c in range(da):
                                    nn[a, c] = nbr[a, c]
                                    ww[a, c] = wgt[a, c]
                            nbr = nn
                            wgt = ww
                            cap = newcap
                        nbr[i, deg[i]] = k
                        wgt[i, deg[i]] = w0
                        deg[i] += 1
                        nbr[k, deg[k]] = i
                        wgt[k, deg[k]] = w0
                        deg[k] += 1
                else:
                    # Pre-existing closure edge is reinforced.
                    wgt[i, ikc] += delta
                    for c in range(deg[k]):
                        if nbr[k, c] == i:
                            wgt[k, c] += delta
                            break
                # Traversed links are reinforced in both stored directions.
                wgt[i, jc] += delta
                for c in range(deg[j]):
                    if nbr[j, c] == i:
                        wgt[j, c] += delta
                        break
                wgt[j, kc] += delta
                for c in range(deg[k]):
                    if nbr[k, c] == j:
                        wgt[k, c] += delta
                        break

        # Global attachment: certain for isolated nodes, else prob p_r.
        attach = False
        if deg[i] == 0:
            attach = True
        else:
            attach = u[pos] < p_r
            pos += 1
        if attach and n > 1:
            l = int(u[pos] * (n - 1))
            pos += 1
            if l >= i:
                l += 1
            exists = False
            for c in range(deg[i]):
                if nbr[i, c] == l:
                    exists = True
                    break
            if not exists:
                if deg[i] >= cap or deg[l] >= cap:
                    newcap = cap * 2
                    nn = np.zeros((n, newcap), dtype=np.int64)
                    ww = np.zeros((n, newcap), dtype=np.float64)
                    for a in range(n):
                        da = deg[a]
                        for c in range(da):
                            nn[a, c] = nbr[a, c]
                            ww[a, c] = wgt[a, c]
                    nbr = nn
                    wgt = ww
                    cap = newcap
                nbr[i, deg[i]] = l
                wgt[i, deg[i]] = w0
                deg[i] += 1
                nbr[l, deg[l]] = i
                wgt[l, deg[l]] = w0
                deg[l] += 1

        # Node deletion: strip all edges of one uniform victim.
        drop = u[pos] < p_d
        pos += 1
        if drop:
            v = int(u[pos] * n)
            pos += 1
            dv = deg[v]
            for c in range(dv):
                x = nbr[v, c]
                dx = deg[x]
                for cc in range(dx):
                    if nbr[x, cc] == v:
                        nbr[x, cc] = nbr[x, dx - 1]
                        wgt[x, cc] = wgt[x, dx - 1]
                        deg[x] = dx - 1
                        break
            deg[v] = 0

        step += 1
    return step, nbr, wgt


@kernel
def swap_labels_chunk(codes, degrees, list_a, list_b, sum_a, sum_b, target, tol, u, iters, max_iters):
    """Label swaps steering the A/B mean-degree ratio toward ``target``.

    Each iteration draws one node per group and swaps their labels only when
    the swap moves the ratio the right way (guarded by a degree comparison);
    rejected draws still count against ``max_iters``. Degree sums are kept
    as integers so the ratio is exact. Consumes 2 uniforms per iteration.

    Returns ``(status, iters, sum_a, sum_b, best_w)`` with status 1 when the
    target is within ``tol``, 2 when the budget is exhausted, 0 when the
    uniform buffer ran out.
    """
    na = list_a.shape[0]
    nb = list_b.shape[0]
    pos = 0
    limit = u.shape[0] - TUNE_DRAWS_PER_ITER
    best_w = (sum_a / na) / (sum_b / nb)
    best_gap = abs(best_w - target)
    while True:
        w = (sum_a / na) / (sum_b / nb)
        gap = abs(w - target)
        if gap < best_gap:
            best_gap = gap
            best_w = w
        if gap <= tol:
            return 1, iters, sum_a, sum_b, best_w
        if iters >= max_iters:
            return 2, iters, sum_a, sum_b, best_w
        if pos > limit:
            return 0, iters, sum_a, sum_b, best_w
        ai = int(u[pos] * na)
        pos += 1
        bi = int(u[pos] * nb)
        pos += 1
        iters += 1
        i = list_a[ai]
        j = list_b[bi]
        di = degrees[i]
        dj = degrees[j]
        if (w > target and di > dj) or (w < target and di < dj):
            list_a[ai] = j
            list_b[bi] = i
            codes[i] = 1
            codes[j] = 0
            sum_a += dj - di
            sum_b += di - dj


@kernel
def rewire_edges_chunk(
    nbr,
    deg,
    eu,
    ev,
    idx_aa,
    idx_bb,
    idx_x,
    n_aa,
    n_bb,
    n_x,
    slot,
    sum_deg_a,
    p_b,
    target,
    tol,
    u,
    iters,
    max_iters,
):
    """Degree-preserving double-edge swaps steering homophily to ``target``.

    Homophily is ``1 - (n_x / sum_deg_a) / p_b`` where ``n_x`` counts cross
    edges. Too high: a within-A and a within-B edge become two cross edges
    (pairing chosen by coin). Too low: two cross edges become one within-A
    and one within-B edge (pairing forced by group). Draws that would create
    a duplicate edge or a self loop are rejected but still count against
    ``max_iters``. Consumes at most 3 uniforms per iteration.

    ``eu``/``ev`` are per-edge endpoints, ``idx_*`` the per-type edge-id
    lists with live lengths ``n_*``, ``slot`` each edge's position in its
    list. ``nbr``/``deg`` are fixed-capacity adjacency rows used only for
    duplicate checks. All are updated in place.

    Returns ``(status, iters, n_aa, n_bb, n_x, best_h)`` with the same
    status codes as ``swap_labels_chunk``.
    """
    pos = 0
    limit = u.shape[0] - TUNE_DRAWS_PER_ITER
    best_h = 1.0 - (n_x / sum_deg_a) / p_b
    best_gap = abs(best_h - target)
    while True:
        h = 1.0 - (n_x / sum_deg_a) / p_b
        gap = abs(h - target)
        if gap < best_gap:
            best_gap = gap
            best_h = h
        if gap <= tol:
            return 1, iters, n_aa, n_bb, n_x, best_h
        if iters >= max_iters:
            return 2, iters, n_aa, n_bb, n_x, best_h
        if pos > limit:
            return 0, iters, n_aa, n_bb, n_x, best_h
        iters += 1
        if h > target:
            # Need more cross edges: AA + BB -> two cross.
            if n_aa == 0 or n_bb == 0:
                continue
            e1 = idx_aa[int(u[pos] * n_aa)]
            pos += 1
            e2 = idx_bb[int(u[pos] * n_bb)]
            pos += 1
            flip = u[pos] < 0.5
            pos += 1
            a1 = eu[e1]
            a2 = ev[e1]
            b1 = eu[e2]
            b2 = ev[e2]
            if flip:
                b1, b2 = b2, b1
            # New pairs a1-b1 and a2-b2 must not already exist.
            dup = False
            for c in range(deg[a1]):
                if nbr[a1, c] == b1:
                    dup = True
                    break
            if not dup:
                for c in range(deg[a2]):
                    if nbr[a2, c] == b2:
                        dup = True
                        break
            if dup:
                continue
            # Rewire adjacency rows in place.
            for c in range(deg[a1]):
                if nbr[a1, c] == a2:
                    nbr[a1, c] = b1
                    break
            for c in range(deg[a2]):
                if nbr[a2, c] == a1:
                    nbr[a2, c] = b2
                    break
            for c in range(deg[b1]):
                if nbr[b1, c] == b2:
                    nbr[b1, c] = a1
                    break
            for c in range(deg[b2]):
                if nbr[b2, c] == b1:
                    nbr[b2, c] = a2
                    break
            eu[e1] = a1
            ev[e1] = b1
            eu[e2] = a2
            ev[e2] = b2
            # e1 leaves AA, e2 leaves BB, both join the cross list.
            s = slot[e1]
            moved = idx_aa[n_aa - 1]
            idx_aa[s] = moved
            slot[moved] = s
            n_aa -= 1
            s = slot[e2]
            moved = idx_bb[n_bb - 1]
            idx_bb[s] = moved
            slot[moved] = s
            n_bb -= 1
            idx_x[n_x] = e1
            slot[e1] = n_x
            n_x += 1
            idx_x[n_x] = e2
            slot[e2] = n_x
            n_x += 1
        else:
            # Need fewer cross edges: two cross -> AA + BB.
            if n_x < 2:
                continue
            c1 = int(u[pos] * n_x)
            pos += 1
            c2 = int(u[pos] * n_x)
            pos += 1
            if c1 == c2:
                continue
            e1 = idx_x[c1]
            e2 = idx_x[c2]
            # Orient both edges A-end first; the pairing is then forced.
            a1 = eu[e1]
            b1 = ev[e1]
            a2 = eu[e2]
            b2 = ev[e2]
            if a1 == a2 or b1 == b2:
                continue
            dup = False
            for c in range(deg[a1]):
                if nbr[a1, c] == a2:
                    dup = True
                    break
            if not dup:
                for c in range(deg[b1]):
                    if nbr[b1, c] == b2:
                        dup = True
                        break
            if dup:
                continue
            for c in range(deg[a1]):
                if nbr[a1, c] == b1:
                    nbr[a1, c] = a2
                    break
            for c in range(deg[a2]):
                if nbr[a2, c] == b2:
                    nbr[a2, c] = a1
                    break
            for c in range(deg[b1]):
                if nbr[b1, c] == a1:
                    nbr[b1, c] = b2
                    break
            for c in range(deg[b2]):
                if nbr[b2, c] == a2:
                    nbr[b2, c] = b1
                    break
            eu[e1] = a1
            ev[e1] = a2
            eu[e2] = b1
            ev[e2] = b2
            # Remove both from the cross list (higher slot first).
            s1 = slot[e1]
            s2 = slot[e2]
            if s1 < s2:
                s1, s2 = s2, s1
                efirst = e2
                esecond = e1
            else:
                efirst = e1
                esecond = e2
            moved = idx_x[n_x - 1]
            idx_x[s1] = moved
            slot[moved] = s1
            n_x -= 1
            s2 = slot[esecond]
            moved = idx_x[n_x - 1]
            idx_x[s2] = moved
            slot[moved] = s2
            n_x -= 1
            idx_aa[n_aa] = e1
            slot[e1] = n_aa
            n_aa += 1
            idx_bb[n_bb] = e2
            slot[e2] = n_bb
            n_bb += 1


@kernel
def rds_chunk(
    indptr,
    indices,
    codes,
    coupons,
    target,
    weight_a,
    with_replacement,
    reseed_on_dieout,
    seed_degprop,
    cum_deg,
    sampled,
    out_node,
    out_wave,
    out_recpos,
    picked_buf,
    u,
    head,
    filled,
):
    """Coupon-driven recruitment over a fixed network, resumable.

    Respondents are processed in recruitment order. Each hands out up to
    ``coupons`` coupons; every coupon goes to one eligible neighbor drawn
    with weight ``weight_a`` for group-A neighbors and 1 for group-B.
    Without replacement, sampled nodes are ineligible forever; with
    replacement only within-respondent duplicates are blocked. An empty
    queue draws a fresh seed when ``reseed_on_dieout`` (degree-proportional
    when ``seed_degprop``, else uniform among eligibles). Recruitment stops
    exactly at ``target`` rows. Consumes at most ``coupons + 40`` uniforms
    per processed unit.

    Returns ``(status, head, filled)``: 1 target reached, 2 died out or
    population exhausted, 0 uniform buffer exhausted.
    """
    n = indptr.shape[0] - 1
    pos = 0
    reserve = coupons + RDS_DRAWS_PER_UNIT
    while True:
        if filled >= target:
            return 1, head, filled
        if pos + reserve > u.shape[0]:
            return 0, head, filled
        if head >= filled:
            if not reseed_on_dieout:
                return 2, head, filled
            node = -1
            for _ in range(32):
                if seed_degprop:
                    r = u[pos] * cum_deg[n]
                    pos += 1
                    lo = 0
                    hi = n
                    while hi - lo > 1:
                        mid = (lo + hi) // 2
                        if cum_deg[mid] <= r:
                            lo = mid
                        else:
                            hi = mid
                    cand = lo
                else:
                    cand = int(u[pos] * n)
                    pos += 1
                if with_replacement or sampled[cand] == 0:
                    node = cand
                    break
            if node < 0:
                # Rejection stalled: one weighted draw over the eligibles.
                tot = 0.0
                for v in range(n):
                    if sampled[v] == 0:
                        if seed_degprop:
                            tot += indptr[v + 1] - indptr[v]
                        else:
                            tot += 1.0
                if tot <= 0.0:
                    return 2, head, filled
                r = u[pos] * tot
                pos += 1
                acc = 0.0
                for v in range(n):
                    if sampled[v] == 0:
                        if seed_degprop:
                            acc += indptr[v + 1] - indptr[v]
                        else:
                            acc += 1.0
                        if r < acc:
                            node = v
                            break
                if node < 0:
                    for v in range(n - 1, -1, -1):
                        if sampled[v] == 0:
                            node = v
                            break
            if not with_replacement:
                sampled[node] = 1
            out_node[filled] = node
            out_wave[filled] = 0
            out_recpos[filled] = -1
            filled += 1
            continue

        v = out_node[head]
        wave = out_wave[head]
        start = indptr[v]
        dv = indptr[v + 1] - start
        npicked = 0
        for _ in range(coupons):
            if filled >= target:
                break
            tot = 0.0
            for t in range(dv):
                nb = indices[start + t]
                if with_replacement:
                    dup = False
                    for q in range(npicked):
                        if picked_buf[q] == nb:
                            dup = True
                            break
                    if dup:
                        continue
                elif sampled[nb] == 1:
                    continue
                if codes[nb] == 0:
                    tot += weight_a
                else:
                    tot += 1.0
            if tot <= 0.0:
                break
            r = u[pos] * tot
            pos += 1
            chosen = -1
            acc = 0.0
            for t in range(dv):
                nb = indices[start + t]
                if with_replacement:
                    dup = False
                    for q in range(npicked):
                        if picked_buf[q] == nb:
                            dup = True
                            break
                    if dup:
                        continue
                elif sampled[nb] == 1:
                    continue
                if codes[nb] == 0:
                    acc += weight_a
                else:
                    acc += 1.0
                if r < acc:
                    chosen = nb
                    break
            if chosen < 0:
                for t in range(dv - 1, -1, -1):
                    nb = indices[start + t]
                    if with_replacement:
                        dup = False
                        for q in range(npicked):
                            if picked_buf[q] == nb:
                                dup = True
                                break
                        if dup:
                            continue
                    elif sampled[nb] == 1:
                        continue
                    chosen = nb
                    break
            if not with_replacement:
                sampled[chosen] = 1
            picked_buf[npicked] = chosen
            npicked += 1
            out_node[filled] = chosen
            out_wave[filled] = wave + 1
            out_recpos[filled] = head
            filled += 1
        head += 1


@kernel
def report_errors_block(node_ids, rec_codes, indptr, indices, codes, p_miss_a, p_miss_b, p_err_ab, p_err_ba, u, out_deg, out_na, out_nb):
    """Two-stage reporting error for a block of respondents.

    Stage one drops each alter independently (miss rate by alter group);
    an all-miss outcome is floored to a single alter, taken as the
    recruiter's group, or for seeds (``rec_codes`` 255) a uniform true
    alter. Stage two misclassifies each surviving alter independently.
    Reported degree counts survivors; reported group tallies reflect the
    misclassification. Consumes at most ``2 * true_degree + 2`` uniforms
    per respondent. Returns the number of uniforms consumed.
    """
    pos = 0
    for row in range(node_ids.shape[0]):
        v = node_ids[row]
        start = indptr[v]
        dv = indptr[v + 1] - start
        surv_a = 0
        surv_b = 0
        for t in range(dv):
            g = codes[indices[start + t]]
            if g == 0:
                miss = u[pos] < p_miss_a
            else:
                miss = u[pos] < p_miss_b
            pos += 1
            if not miss:
                if g == 0:
                    surv_a += 1
                else:
                    surv_b += 1
        if surv_a + surv_b == 0:
            rg = rec_codes[row]
            if rg > 1:
                if dv > 0:
                    rg = codes[indices[start + int(u[pos] * dv)]]
                    pos += 1
                else:
                    rg = codes[v]
            if rg == 0:
                surv_a = 1
            else:
                surv_b = 1
        a_to_b = 0
        for _ in range(surv_a):
            if u[pos] < p_err_ab:
                a_to_b += 1
            pos += 1
        b_to_a = 0
        for _ in range(surv_b):
            if u[pos] < p_err_ba:
                b_to_a += 1
            pos += 1
        out_deg[row] = surv_a + surv_b
        out_na[row] = surv_a - a_to_b + b_to_a
        out_nb[row] = surv_b - b_to_a + a_to_b
    return pos


@kernel
def bs_origin_replicate(codes, degrees, a_rec, b_rec, u):
    """One recruiter-partition chain resample, estimated like ``rdsi``.

    A synthetic chain of the original length starts uniformly and then draws
    each next member from the set of respondents whose recruiter was in the
    current member's group; an empty set falls back to a uniform draw over
    everyone (counted). Recruitment proportions come from the synthetic
    chain's own transitions, mean degrees are harmonic means over synthetic
    members. Consumes ``n`` uniforms. Returns ``(estimate, fallbacks)``
    with NaN when the estimate is undefined.
    """
    n = codes.shape[0]
    na_rec = a_rec.shape[0]
    nb_rec = b_rec.shape[0]
    pos = 0
    fallbacks = 0
    cur = int(u[pos] * n)
    pos += 1
    c_ab = 0
    c_ba = 0
    row_a = 0
    row_b = 0
    n_a = 0
    n_b = 0
    inv_a = 0.0
    inv_b = 0.0
    g = codes[cur]
    if g == 0:
        n_a += 1
        inv_a += 1.0 / degrees[cur]
    else:
        n_b += 1
        inv_b += 1.0 / degrees[cur]
    for _ in range(n - 1):
        if g == 0:
            if na_rec > 0:
                nxt = a_rec[int(u[pos] * na_rec)]
            else:
                nxt = int(u[pos] * n)
                fallbacks += 1
        else:
            if nb_rec > 0:
                nxt = b_rec[int(u[pos] * nb_rec)]
            else:
                nxt = int(u[pos] * n)
                fallbacks += 1
        pos += 1
        g2 = codes[nxt]
        if g == 0:
            row_a += 1
            if g2 == 1:
                c_ab += 1
        else:
            row_b += 1
            if g2 == 0:
                c_ba += 1
        if g2 == 0:
            n_a += 1
            inv_a += 1.0 / degrees[nxt]
        else:
            n_b += 1
            inv_b += 1.0 / degrees[nxt]
        cur = nxt
        g = g2
    if n_b == 0:
        return 1.0, fallbacks
    if n_a == 0:
        return 0.0, fallbacks
    if row_a == 0 or row_b == 0:
        return np.nan, fallbacks
    s_ab = c_ab / row_a
    s_ba = c_ba / row_b
    d_a = n_a / inv_a
    d_b = n_b / inv_b
    den = s_ab * d_a + s_ba * d_b
    if den == 0.0:
        return np.nan, fallbacks
    return (s_ba * d_b) / den, fallbacks


@kernel
def bs_ego1_replicate(codes, degrees, rep_na, rep_nb, a_rec, b_rec, u):
    """Recruiter-partition chain resample estimated with ego-report rows.

    Same synthetic chain as ``bs_origin_replicate``; the cross proportions
    are the means of reported cross-alter shares among synthetic members
    and mean degrees are harmonic. Consumes ``n`` uniforms. Returns
    ``(estimate, fallbacks)`` with NaN when undefined.
    """
    n = codes.shape[0]
    na_rec = a_rec.shape[0]
    nb_rec = b_rec.shape[0]
    pos = 0
    fallbacks = 0
    cur = int(u[pos] * n)
    pos += 1
    n_a = 0
    n_b = 0
    inv_a = 0.0
    inv_b = 0.0
    sum_ab = 0.0
    sum_ba = 0.0
    g = codes[cur]
    for _ in range(n):
        d = degrees[cur]
        if g == 0:
            n_a += 1
            inv_a += 1.0 / d
            sum_ab += rep_nb[cur] / d
        else:
            n_b += 1
            inv_b += 1.0 / d
            sum_ba += rep_na[cur] / d
        if n_a + n_b == n:
            break
        if g == 0:
            if na_rec > 0:
                nxt = a_rec[int(u[pos] * na_rec)]
            else:
                nxt = int(u[pos] * n)
                fallbacks += 1
        else:
            if nb_rec > 0:
                nxt = b_rec[int(u[pos] * nb_rec)]
            else:
                nxt = int(u[pos] * n)
                fallbacks += 1
        pos += 1
        cur = nxt
        g = codes[cur]
    if n_b == 0:
        return 1.0, fallbacks
    if n_a == 0:
        return 0.0, fallbacks
    s_ab = sum_ab / n_a
    s_ba = sum_ba / n_b
    d_a = n_a / inv_a
    d_b = n_b / inv_b
    den = s_ab * d_a + s_ba * d_b
    if den == 0.0:
        return np.nan, fallbacks
    return (s_ba * d_b) / den, fallbacks


@kernel
def bs_ego2_replicate(codes, degrees, rep_na, rep_nb, a_set, b_set, s_ab0, s_ba0, u):
    """Own-group-partition chain resample estimated with ego-report rows.

    The synthetic chain hops between the group-A and group-B member sets:
    from a group-X member the next member is drawn from the other group's
    set with the original sample's ego cross proportion, else from X's set;
    an empty needed set falls back to a uniform draw over everyone
    (counted). Estimation matches ``bs_ego1_replicate``. Consumes
    ``2n`` uniforms. Returns ``(estimate, fallbacks)``.
    """
    n = codes.shape[0]
    na_set = a_set.shape[0]
    nb_set = b_set.shape[0]
    pos = 0
    fallbacks = 0
    cur = int(u[pos] * n)
    pos += 1
    n_a = 0
    n_b = 0
    inv_a = 0.0
    inv_b = 0.0
    sum_ab = 0.0
    sum_ba = 0.0
    g = codes[cur]
    for _ in range(n):
        d = degrees[cur]
        if g == 0:
            n_a += 1
            inv_a += 1.0 / d
            sum_ab += rep_nb[cur] / d
        else:
            n_b += 1
            inv_b += 1.0 / d
            sum_ba += rep_na[cur] / d
        if n_a + n_b == n:
            break
        if g == 0:
            cross = u[pos] < s_ab0
            pos += 1
        else:
            cross = u[pos] < s_ba0
            pos += 1
        if g == 0:
            want_b = cross
        else:
            want_b = not cross
        if want_b:
            if nb_set > 0:
                nxt = b_set[int(u[pos] * nb_set)]
            else:
                nxt = int(u[pos] * n)
                fallbacks += 1
        else:
            if na_set > 0:
                nxt = a_set[int(u[pos] * na_set)]
            else:
                nxt = int(u[pos] * n)
                fallbacks += 1
        pos += 1
        cur = nxt
        g = codes[cur]
    if n_b == 0:
        return 1.0, fallbacks
    if n_a == 0:
        return 0.0, fallbacks
    s_ab = sum_ab / n_a
    s_ba = sum_ba / n_b
    d_a = n_a / inv_a
    d_b = n_b / inv_b
    den = s_ab * d_a + s_ba * d_b
    if den == 0.0:
        return np.nan, fallbacks
    return (s_ba * d_b) / den, fallbacks
