"""Pure-python jet-product kernel, API-compatible with the compiled one.

Uses a padded gather: the pair table is regrouped by output index into
rectangular index arrays so a whole product is two fancy-indexing reads and
one masked row sum.  Grouped tables are cached per pair-table identity.
"""

import numpy as np

BACKEND = "python"

_grouped_cache: dict = {}


def _grouped(ti, tj, tk, ncoeff):
    key = (id(ti), id(tj), id(tk), ncoeff)
    hit = _grouped_cache.get(key)
    if hit is not None:
        return hit
    rows = [[] for _ in range(ncoeff)]
    for t in range(len(tk)):
        rows[tk[t]].append((ti[t], tj[t]))
    width = max(len(r) for r in rows)
    ii = np.zeros((ncoeff, width), dtype=np.intp)
    jj = np.zeros((ncoeff, width), dtype=np.intp)
    mask = np.zeros((ncoeff, width))
    for k, r in enumerate(rows):
        for c, (i, j) in enumerate(r):
            ii[k, c] = i
            jj[k, c] = j
            mask[k, c] = 1.0
    _grouped_cache[key] = (ii, jj, mask)
    return ii, jj, mask


def mul_into(a, b, out, ti, tj, tk):
    ii, jj, mask = _grouped(ti, tj, tk, out.shape[0])
    np.einsum("kw,kw,kw->k", a[ii], b[jj], mask, out=out)


def mul_many(a, b, out, ti, tj, tk):
    ii, jj, mask = _grouped(ti, tj, tk, out.shape[1])
    out += np.einsum("rkw,rkw,kw->rk", a[:, ii], b[:, jj], mask)
