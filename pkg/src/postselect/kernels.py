"""Hot numeric kernels: the bipartite classification sweep and CNF model counting.

Every kernel has a numba implementation and a vectorised numpy one. The public
wrappers pick according to :mod:`postselect._accel` unless ``use_numba`` is
passed explicitly, which the benchmark and the cross-check tests do.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit

# bipartite assignment index i = 8x + 4y + 2u + v = 4*setting + outcome
_IDX = np.arange(16)
_X = (_IDX >> 3) & 1
_Y = (_IDX >> 2) & 1
_U = (_IDX >> 1) & 1
_V = _IDX & 1


def _facet_wins():
    """Win masks (8, 16) of the CHSH family x.y ^ a.x ^ b.y ^ g = u ^ v; row 0 is the plain game."""
    rows = []
    for a in (0, 1):
        for b in (0, 1):
            for g in (0, 1):
                rows.append(((_X & _Y) ^ (a * _X) ^ (b * _Y) ^ g) == (_U ^ _V))
    order = [0] + [k for k in range(8) if k != 0]
    return np.array(rows, dtype=np.float64)[order]


FACET_WINS = _facet_wins()


def _resolve(use_numba):
    if use_numba is None:
        return HAVE_NUMBA
    if use_numba and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but unavailable or disabled")
    return use_numba


# --------------------------------------------------------------------------
# classification sweep


@njit(cache=True)
def _h_nb(p):
    s = 0.0
    for k in range(p.size):
        if p[k] > 0.0:
            s -= p[k] * np.log2(p[k])
    return s


@njit(cache=True)
def _sweep_nb(tables, wins):
    nf = tables.size
    eta = np.empty(nf)
    i_ab = np.empty(nf)
    i_ba = np.empty(nf)
    full = np.empty(nf, dtype=np.bool_)
    chsh = np.empty(nf)
    chsh_sym = np.empty(nf)
    box = np.empty(16)
    joint = np.empty(16)
    px = np.empty(2)
    py = np.empty(2)
    pyv = np.empty(4)
    pxu = np.empty(4)
    pxyv = np.empty(8)
    pxyu = np.empty(8)
    for k in range(nf):
        t = tables[k]
        zeros = 0
        ndef = 0
        for s in range(4):
            cnt = 0
            for o in range(4):
                if (t >> (4 * s + o)) & 1 == 0:
                    cnt += 1
            zeros += cnt
            for o in range(4):
                if cnt > 0 and (t >> (4 * s + o)) & 1 == 0:
                    box[4 * s + o] = 1.0 / cnt
                else:
                    box[4 * s + o] = 0.0
            if cnt > 0:
                ndef += 1
        eta[k] = zeros / 16.0
        full[k] = ndef == 4
        if ndef == 0:
            i_ab[k] = np.nan
            i_ba[k] = np.nan
            chsh[k] = np.nan
            chsh_sym[k] = np.nan
            continue
        for i in range(16):
            joint[i] = box[i] / ndef
        px[:] = 0.0
        py[:] = 0.0
        pyv[:] = 0.0
        pxu[:] = 0.0
        pxyv[:] = 0.0
        pxyu[:] = 0.0
        for i in range(16):
            x = (i >> 3) & 1
            y = (i >> 2) & 1
            u = (i >> 1) & 1
            v = i & 1
            p = joint[i]
            px[x] += p
            py[y] += p
            pyv[2 * y + v] += p
            pxu[2 * x + u] += p
            pxyv[4 * x + 2 * y + v] += p
            pxyu[4 * x + 2 * y + u] += p
        i_ab[k] = _h_nb(px) + _h_nb(pyv) - _h_nb(pxyv)
        i_ba[k] = _h_nb(py) + _h_nb(pxu) - _h_nb(pxyu)
        if ndef == 4:
            best = -1.0
            for r in range(wins.shape[0]):
                val = 0.0
                for i in range(16):
                    val += box[i] * wins[r, i]
                val *= 0.25
                if r == 0:
                    chsh[k] = val
                if val > best:
                    best = val
            chsh_sym[k] = best
        else:
            chsh[k] = np.nan
            chsh_sym[k] = np.nan
    return eta, i_ab, i_ba, full, chsh, chsh_sym


def _h_np(p, axis):
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=axis)


def _sweep_np(tables, wins):
    bits = ((tables[:, None] >> _IDX[None, :]) & 1).astype(bool)
    accept = (~bits).reshape(-1, 4, 4).astype(np.float64)
    cnt = accept.sum(axis=2)
    defined = cnt > 0
    ndef = defined.sum(axis=1)
    box = np.divide(accept, cnt[:, :, None], out=np.zeros_like(accept), where=defined[:, :, None])
    box = box.reshape(-1, 16)
    eta = cnt.sum(axis=1) / 16.0
    scale = np.divide(1.0, ndef, out=np.zeros(ndef.shape), where=ndef > 0)
    joint = (box * scale[:, None]).reshape(-1, 2, 2, 2, 2)  # axes x, y, u, v
    px = joint.sum(axis=(2, 3, 4))
    py = joint.sum(axis=(1, 3, 4))
    pyv = joint.sum(axis=(1, 3)).reshape(-1, 4)
    pxu = joint.sum(axis=(2, 4)).reshape(-1, 4)
    pxyv = joint.sum(axis=3).reshape(-1, 8)
    pxyu = joint.sum(axis=4).reshape(-1, 8)
    i_ab = _h_np(px, 1) + _h_np(pyv, 1) - _h_np(pxyv, 1)
    i_ba = _h_np(py, 1) + _h_np(pxu, 1) - _h_np(pxyu, 1)
    i_ab[ndef == 0] = np.nan
    i_ba[ndef == 0] = np.nan
    full = ndef == 4
    vals = 0.25 * box @ wins.T
    chsh = np.where(full, vals[:, 0], np.nan)
    chsh_sym = np.where(full, vals.max(axis=1), np.nan)
    return eta, i_ab, i_ba, full, chsh, chsh_sym


def sweep_bipartite(tables, use_numba=None):
    """Classify bipartite truth tables through their white-noise f-boxes.

    Returns ``(eta, i_ab, i_ba, full, chsh, chsh_sym)`` arrays aligned with
    ``tables``. Mutual information is taken under a uniform prior over the
    settings where the f-box is defined; CHSH values are NaN for partial boxes
    and everything but ``eta`` is NaN for a table that rejects every event.
    """
    tables = np.ascontiguousarray(tables, dtype=np.int64)
    if _resolve(use_numba):
        return _sweep_nb(tables, FACET_WINS)
    return _sweep_np(tables, FACET_WINS)


# --------------------------------------------------------------------------
# CNF evaluation


@njit(cache=True)
def _satisfies_one(lits, a):
    for c in range(lits.shape[0]):
        ok = False
        for j in range(lits.shape[1]):
            lit = lits[c, j]
            if lit == 0:
                continue
            bit = (a >> (abs(lit) - 1)) & 1
            if (lit > 0 and bit == 1) or (lit < 0 and bit == 0):
                ok = True
                break
        if not ok:
            return False
    return True


@njit(cache=True)
def _count_nb(lits, lo, hi):
    total = 0
    for a in range(lo, hi):
        if _satisfies_one(lits, a):
            total += 1
    return total


@njit(cache=True)
def _satisfies_batch_nb(lits, assignments):
    out = np.empty(assignments.size, dtype=np.bool_)
    for k in range(assignments.size):
        out[k] = _satisfies_one(lits, assignments[k])
    return out


def _satisfies_batch_np(lits, assignments):
    sat = np.ones(assignments.size, dtype=bool)
    for clause in lits:
        clause = clause[clause != 0]
        hit = np.zeros(assignments.size, dtype=bool)
        for lit in clause:
            bit = (assignments >> (abs(int(lit)) - 1)) & 1
            hit |= bit == (1 if lit > 0 else 0)
        sat &= hit
    return sat


_CHUNK = 1 << 20


def _as_lits(lits):
    lits = np.asarray(lits, dtype=np.int64)
    if lits.ndim != 2 or lits.shape[1] == 0:
        lits = lits.reshape(len(lits), -1) if lits.size else np.zeros((len(lits), 1), dtype=np.int64)
    return np.ascontiguousarray(lits)


def satisfies_batch(lits, assignments, use_numba=None):
    """Boolean mask of which integer-encoded assignments satisfy every clause.

    Bit ``k`` of an assignment is the value of variable ``k + 1``.
    """
    lits = _as_lits(lits)
    assignments = np.ascontiguousarray(assignments, dtype=np.int64)
    if _resolve(use_numba):
        return _satisfies_batch_nb(lits, assignments)
    return _satisfies_batch_np(lits, assignments)


def count_assignments(lits, num_vars, use_numba=None):
    """Number of the ``2**num_vars`` assignments satisfying all clauses."""
    lits = _as_lits(lits)
    space = 1 << num_vars
    if _resolve(use_numba):
        return int(_count_nb(lits, 0, space))
    total = 0
    for lo in range(0, space, _CHUNK):
        block = np.arange(lo, min(lo + _CHUNK, space), dtype=np.int64)
        total += int(_satisfies_batch_np(lits, block).sum())
    return total
