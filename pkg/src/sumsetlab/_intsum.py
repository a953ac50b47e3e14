"""Minkowski sums of sets of non-negative integers.

A set is held as an ``int64`` array of shape ``(k, n)``: ``k`` limbs of
62 bits each, least significant row first, columns sorted ascending and
unique.  Almost every set seen in practice has ``k == 1``; wider values
(64-bit numerators over a common denominator, for instance) carry into a
second or third limb without ever leaving numpy.

Two strategies for ``X + Y``:

* dense: indicator vectors convolved by FFT, when the value range is small
  compared with ``|X| * |Y|``;
* sparse: explicit outer sum, then sort and deduplicate.

Both produce identical output; ``tests/test_intsum.py`` cross-checks them.
"""

from __future__ import annotations

import numpy as np

from .errors import SizeCapExceeded

LIMB_BITS = 62
LIMB_MASK = (1 << LIMB_BITS) - 1

# Largest value range handled by the FFT path (indicator length).
DENSE_LIMIT = 1 << 24
# Dense is chosen when range * DENSE_FACTOR < |X| * |Y|.
DENSE_FACTOR = 4

_EMPTY = np.zeros((1, 0), dtype=np.int64)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def limbs_needed(value: int) -> int:
    return max(1, -(-value.bit_length() // LIMB_BITS))


def from_ints(values) -> np.ndarray:
    """Sorted unique limb array from an iterable of non-negative ints."""
    vals = sorted(set(int(v) for v in values))
    if not vals:
        return _freeze(_EMPTY.copy())
    if vals[0] < 0:
        raise ValueError("negative value in non-negative integer set")
    k = limbs_needed(vals[-1])
    if k == 1:
        return _freeze(np.array(vals, dtype=np.int64).reshape(1, -1))
    out = np.empty((k, len(vals)), dtype=np.int64)
    for j in range(k):
        shift = LIMB_BITS * j
        out[j] = [(v >> shift) & LIMB_MASK for v in vals]
    return _freeze(out)


def size(x: np.ndarray) -> int:
    return x.shape[1]


def value_at(x: np.ndarray, i: int) -> int:
    if x.shape[0] == 1:
        return int(x[0, i])
    return sum(int(x[j, i]) << (LIMB_BITS * j) for j in range(x.shape[0]))


def to_ints(x: np.ndarray) -> list[int]:
    if x.shape[0] == 1:
        return x[0].tolist()
    rows = [r.tolist() for r in x]
    out = rows[0]
    for j in range(1, len(rows)):
        shift = LIMB_BITS * j
        out = [lo + (hi << shift) for lo, hi in zip(out, rows[j])]
    return out


def max_value(x: np.ndarray) -> int:
    return value_at(x, x.shape[1] - 1) if x.shape[1] else 0


def _widen(x: np.ndarray, k: int) -> np.ndarray:
    if x.shape[0] >= k:
        return x
    pad = np.zeros((k - x.shape[0], x.shape[1]), dtype=np.int64)
    return np.vstack([x, pad])


def _dense_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    length = int(a[-1]) + int(b[-1]) + 1
    nfft = 1 << (length - 1).bit_length()
    ia = np.zeros(nfft, dtype=np.float64)
    ib = np.zeros(nfft, dtype=np.float64)
    ia[a] = 1.0
    ib[b] = 1.0
    conv = np.fft.irfft(np.fft.rfft(ia) * np.fft.rfft(ib), nfft)[:length]
    # Representation counts are integers <= min(|a|, |b|); 0.5 separates
    # zero from one with a wide margin at these lengths.
    return np.flatnonzero(conv > 0.5).astype(np.int64)


def _sparse_narrow(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.unique(np.add.outer(a, b).ravel())


def _sparse_wide(x: np.ndarray, y: np.ndarray, k: int) -> np.ndarray:
    x = _widen(x, k)
    y = _widen(y, k)
    n = x.shape[1] * y.shape[1]
    limbs = np.empty((k, n), dtype=np.int64)
    carry = np.zeros(n, dtype=np.int64)
    for j in range(k):
        s = np.add.outer(x[j], y[j]).ravel()
        s += carry
        carry = s >> LIMB_BITS
        limbs[j] = s & LIMB_MASK
    order = _two_limb_order(limbs) if k == 2 else np.lexsort(tuple(limbs))
    limbs = limbs[:, order]
    keep = np.ones(n, dtype=bool)
    if n > 1:
        keep[1:] = np.any(limbs[:, 1:] != limbs[:, :-1], axis=0)
    return limbs[:, keep]


def _two_limb_order(limbs: np.ndarray) -> np.ndarray:
    """Sorting permutation for two-limb values.

    Sorts on the float64 image ``hi * 2^62 + lo`` first.  Rounding is
    monotone, so only runs of equal float keys can be out of order; those
    runs are re-sorted exactly.  Much faster than a two-key lexsort.
    """
    lo, hi = limbs
    key = hi.astype(np.float64) * float(1 << LIMB_BITS) + lo.astype(np.float64)
    order = np.argsort(key)
    skey = key[order]
    tie = skey[1:] == skey[:-1]
    if tie.any():
        involved = np.zeros(skey.shape[0], dtype=bool)
        involved[1:] |= tie
        involved[:-1] |= tie
        pos = np.flatnonzero(involved)
        sub = order[pos]
        sub = sub[np.lexsort((lo[sub], hi[sub], skey[pos]))]
        order[pos] = sub
    return order


def pair_sum(x: np.ndarray, y: np.ndarray, cap: int) -> np.ndarray:
    """``{a + b : a in x, b in y}``; refuses if ``|x| * |y| > cap``."""
    nx, ny = x.shape[1], y.shape[1]
    if nx == 0 or ny == 0:
        return _freeze(_EMPTY.copy())
    pairs = nx * ny
    if pairs > cap:
        raise SizeCapExceeded(pairs, cap)
    top = max_value(x) + max_value(y)
    k = limbs_needed(top)
    if k == 1:
        a, b = x[0], y[0]
        if top < DENSE_LIMIT and top * DENSE_FACTOR < pairs:
            out = _dense_sum(a, b)
        else:
            out = _sparse_narrow(a, b)
        return _freeze(out.reshape(1, -1))
    return _freeze(_sparse_wide(x, y, k))


def multiple(x: np.ndarray, count: int, cap: int) -> np.ndarray | None:
    """``count``-fold sum of ``x`` by repeated doubling; ``None`` for 0."""
    result = None
    power = x
    while count:
        if count & 1:
            result = power if result is None else pair_sum(result, power, cap)
        count >>= 1
        if count:
            power = pair_sum(power, power, cap)
    return result


def searchsorted(x: np.ndarray, value: int, side: str = "left") -> int:
    """Index at which ``value`` would be inserted to keep ``x`` sorted."""
    n = x.shape[1]
    if value < 0:
        return 0
    if x.shape[0] == 1:
        if value >= 1 << 63:
            return n
        return int(np.searchsorted(x[0], value, side=side))
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi) // 2
        v = value_at(x, mid)
        if v < value or (side == "right" and v == value):
            lo = mid + 1
        else:
            hi = mid
    return lo
