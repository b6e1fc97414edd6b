"""JIT-compiled training inner loops.

These kernels own the per-position SGD updates and release the GIL, so
worker threads run them concurrently over disjoint corpus ranges (lock-free
on the shared embedding matrices; lost row updates are tolerated, the usual
asynchronous-SGD regime for this model family).

Weight-parameter gradients are only accumulated here; the Python side
applies them between chunk calls. Random draws (negatives, dynamic windows)
come from an inline xorshift64* stream threaded through each call, which
keeps single-worker runs bit-reproducible.
"""

import math

import numpy as np
from numba import njit

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(inline="always")
def _uniform(state):
    # xorshift64* step; state must stay nonzero
    state ^= state >> np.uint64(12)
    state ^= state << np.uint64(25)
    state ^= state >> np.uint64(27)
    out = state * np.uint64(0x2545F4914F6CDD1D)
    return state, (out >> np.uint64(11)) * _INV_2_53


@njit(inline="always")
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@njit(inline="always")
def _softplus(x):
    # log(1 + e^x), overflow-safe
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


@njit(inline="always")
def _draw_negative(state, accept, alias, nv, exclude):
    target = exclude
    while target == exclude:
        state, u1 = _uniform(state)
        state, u2 = _uniform(state)
        slot = int(u1 * nv)
        if u2 < accept[slot]:
            target = slot
        else:
            target = alias[slot]
    return state, target


@njit(nogil=True, fastmath=True, cache=True, error_model="numpy")
def cbow_chunk(
    ids,
    start,
    end,
    syn0,
    syn1,
    lam,
    dlam,
    window,
    dynamic,
    neg_k,
    accept,
    alias,
    lr0,
    lr_floor,
    progress_base,
    progress_scale,
    total_tokens,
    state,
    accumulate,
    pgrads_out,
    stats_out,
):
    """Train center-word prediction over positions [start, end).

    ``lam`` holds the context weight per signed offset, indexed by
    offset + window (float32, length 2*window+1, center slot unused);
    ``dlam`` holds the matching per-parameter weight partials (float64,
    shape (P, 2*window+1), P may be 0). With all-ones weights and
    accumulate=False this is plain unweighted training.

    stats_out receives [loss_sum, centers_trained, context_words_touched];
    pgrads_out accumulates d(loss)/d(param) sums. Returns the RNG state.
    """
    n = ids.shape[0]
    dim = syn0.shape[1]
    nv = accept.shape[0]
    n_par = pgrads_out.shape[0]

    neu1 = np.zeros(dim, dtype=np.float32)
    neu1e = np.zeros(dim, dtype=np.float32)
    ctx_id = np.empty(2 * window, dtype=np.int64)
    ctx_w = np.empty(2 * window, dtype=np.float32)
    ctx_slot = np.empty(2 * window, dtype=np.int64)
    pg = np.zeros(n_par, dtype=np.float64)

    loss = 0.0
    centers = 0.0
    touched = 0.0

    for t in range(start, end):
        center = ids[t]
        rw = window
        if dynamic:
            state, u = _uniform(state)
            rw = 1 + int(u * window)
        lo = t - rw
        if lo < 0:
            lo = 0
        hi = t + rw
        if hi > n - 1:
            hi = n - 1

        # forward: normalized weighted context sum
        m = 0
        z = np.float32(0.0)
        for ii in range(dim):
            neu1[ii] = np.float32(0.0)
        for j in range(lo, hi + 1):
            if j == t:
                continue
            slot = j - t + window
            w = lam[slot]
            cid = ids[j]
            ctx_id[m] = cid
            ctx_w[m] = w
            ctx_slot[m] = slot
            m += 1
            z += w
            row = syn0[cid]
            for ii in range(dim):
                neu1[ii] += w * row[ii]
        if m == 0:
            continue
        invz = np.float32(1.0) / z
        for ii in range(dim):
            neu1[ii] *= invz

        done = progress_base + (t - start) * progress_scale
        lr = lr0 * (1.0 - done / total_tokens)
        if lr < lr_floor:
            lr = lr_floor

        # output layer: the center word plus neg_k noise words
        for ii in range(dim):
            neu1e[ii] = np.float32(0.0)
        for s in range(neg_k + 1):
            if s == 0:
                target = int(center)
                label = 1.0
            else:
                state, target = _draw_negative(state, accept, alias, nv, int(center))
                label = 0.0
            row = syn1[target]
            f = np.float32(0.0)
            for ii in range(dim):
                f += row[ii] * neu1[ii]
            fx = float(f)
            if label == 1.0:
                loss += _softplus(-fx)
            else:
                loss += _softplus(fx)
            g = np.float32((label - _sigmoid(fx)) * lr)
            for ii in range(dim):
                neu1e[ii] += g * row[ii]
            for ii in range(dim):
                row[ii] += g * neu1[ii]
        centers += 1.0
        touched += m

        # backprop to context rows; optionally fold in parameter gradients
        if accumulate and n_par > 0:
            sc = np.float32(0.0)
            for ii in range(dim):
                sc += neu1e[ii] * neu1[ii]
            for p in range(n_par):
                pg[p] = 0.0
            for idx in range(m):
                coef = ctx_w[idx] * invz
                slot = ctx_slot[idx]
                row = syn0[ctx_id[idx]]
                dj = np.float32(0.0)
                for ii in range(dim):
                    v = row[ii]
                    e = neu1e[ii]
                    dj += v * e
                    row[ii] = v + coef * e
                diff = float(dj) - float(sc)
                for p in range(n_par):
                    pg[p] += dlam[p, slot] * diff
            scale = -float(invz) / lr
            for p in range(n_par):
                pgrads_out[p] += pg[p] * scale
        else:
            for idx in range(m):
                coef = ctx_w[idx] * invz
                row = syn0[ctx_id[idx]]
                for ii in range(dim):
                    row[ii] += coef * neu1e[ii]

    stats_out[0] = loss
    stats_out[1] = centers
    stats_out[2] = touched
    return state


@njit(nogil=True, fastmath=True, cache=True, error_model="numpy")
def skipgram_chunk(
    ids,
    start,
    end,
    syn0,
    syn1,
    window,
    dynamic,
    neg_k,
    accept,
    alias,
    lr0,
    lr_floor,
    progress_base,
    progress_scale,
    total_tokens,
    state,
    stats_out,
):
    """Train context-word prediction from each center over [start, end).

    Every context word within the effective window becomes one positive
    pair; dynamic=True redraws the window per center uniformly from
    {1, ..., window}. stats_out receives [loss_sum, pairs, pairs].
    Returns the RNG state.
    """
    n = ids.shape[0]
    dim = syn0.shape[1]
    nv = accept.shape[0]

    neu1e = np.zeros(dim, dtype=np.float32)
    loss = 0.0
    pairs = 0.0

    for t in range(start, end):
        center = ids[t]
        rw = window
        if dynamic:
            state, u = _uniform(state)
            rw = 1 + int(u * window)
        lo = t - rw
        if lo < 0:
            lo = 0
        hi = t + rw
        if hi > n - 1:
            hi = n - 1

        done = progress_base + (t - start) * progress_scale
        lr = lr0 * (1.0 - done / total_tokens)
        if lr < lr_floor:
            lr = lr_floor

        vrow = syn0[center]
        for j in range(lo, hi + 1):
            if j == t:
                continue
            ctx = int(ids[j])
            for ii in range(dim):
                neu1e[ii] = np.float32(0.0)
            for s in range(neg_k + 1):
                if s == 0:
                    target = ctx
                    label = 1.0
                else:
                    state, target = _draw_negative(state, accept, alias, nv, ctx)
                    label = 0.0
                row = syn1[target]
                f = np.float32(0.0)
                for ii in range(dim):
                    f += row[ii] * vrow[ii]
                fx = float(f)
                if label == 1.0:
                    loss += _softplus(-fx)
                else:
                    loss += _softplus(fx)
                g = np.float32((label - _sigmoid(fx)) * lr)
                for ii in range(dim):
                    neu1e[ii] += g * row[ii]
                for ii in range(dim):
                    row[ii] += g * vrow[ii]
            for ii in range(dim):
                vrow[ii] += neu1e[ii]
            pairs += 1.0

    stats_out[0] = loss
    stats_out[1] = pairs
    stats_out[2] = pairs
    return state
