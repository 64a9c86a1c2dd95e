"""Pure-Python split-search kernels.

Reference semantics for the compiled core in ``_core.pyx``: both must produce
bit-identical (gain, value) results, so the gain expressions here and there
share the exact same structure and operation order in IEEE doubles.
"""


def numeric_best(svals, slabs, miss_s, miss_u, tot_s, tot_u):
    """Best ``(value >= v)`` split on one numeric column at one node.

    svals: non-missing values among the node's rows, sorted ascending.
    slabs: labels aligned with svals (1 = successful).
    miss_s/miss_u: label counts of the node's missing-valued rows.
    tot_s/tot_u: label counts over all node rows.

    Returns (gain, threshold); gain 0.0 means no candidate improves.
    """
    vals = svals.tolist()
    labs = slabs.tolist()
    n = tot_s + tot_u
    ps = tot_s / n
    pu = tot_u / n
    g_parent = 1.0 - ps * ps - pu * pu

    best_gain = 0.0
    best_thr = 0.0
    pre_s = 0
    pre_u = 0
    k = len(vals)
    i = 0
    while i < k:
        v = vals[i]
        # threshold v: true side is value >= v, false side is value < v
        # plus every missing-valued row
        nf_s = pre_s + miss_s
        nf_u = pre_u + miss_u
        nt_s = tot_s - nf_s
        nt_u = tot_u - nf_u
        nt = nt_s + nt_u
        nf = nf_s + nf_u
        if nt > 0 and nf > 0:
            pts = nt_s / nt
            ptu = nt_u / nt
            g_t = 1.0 - pts * pts - ptu * ptu
            pfs = nf_s / nf
            pfu = nf_u / nf
            g_f = 1.0 - pfs * pfs - pfu * pfu
            gain = g_parent - (nt / n) * g_t - (nf / n) * g_f
            if gain > best_gain:
                best_gain = gain
                best_thr = v
        while i < k and vals[i] == v:
            if labs[i]:
                pre_s += 1
            else:
                pre_u += 1
            i += 1
    return best_gain, best_thr


def categorical_best(codes, labs, cnt_s, cnt_u, order, tot_s, tot_u):
    """Best ``(token == t)`` split on one categorical column at one node.

    codes/labs: the node's rows in their given order. Candidates are the
    distinct codes in first-appearance order. The scratch arguments exist for
    the compiled kernel's benefit and are unused here.

    Returns (gain, code); gain 0.0 means no candidate improves.
    """
    cl = codes.tolist()
    ll = labs.tolist()
    counts = {}
    appearance = []
    for c, l in zip(cl, ll):
        e = counts.get(c)
        if e is None:
            e = counts[c] = [0, 0]
            appearance.append(c)
        e[l] += 1

    n = tot_s + tot_u
    ps = tot_s / n
    pu = tot_u / n
    g_parent = 1.0 - ps * ps - pu * pu

    best_gain = 0.0
    best_code = -1
    for c in appearance:
        nt_u, nt_s = counts[c]
        nf_s = tot_s - nt_s
        nf_u = tot_u - nt_u
        nt = nt_s + nt_u
        nf = nf_s + nf_u
        if nt > 0 and nf > 0:
            pts = nt_s / nt
            ptu = nt_u / nt
            g_t = 1.0 - pts * pts - ptu * ptu
            pfs = nf_s / nf
            pfu = nf_u / nf
            g_f = 1.0 - pfs * pfs - pfu * pfu
            gain = g_parent - (nt / n) * g_t - (nf / n) * g_f
            if gain > best_gain:
                best_gain = gain
                best_code = c
    return best_gain, best_code
