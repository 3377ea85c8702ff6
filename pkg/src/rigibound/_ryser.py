"""Ryser permanent for 0/1 matrices with repeated rows, Gray-code order.

The kernel runs in int64 modulo primes below 2**31 and the exact value is
rebuilt by CRT.  The caller supplies an upper bound on the permanent which
fixes how many primes are needed.
"""

from __future__ import annotations

import time

import numpy as np
from numba import njit

PRIMES = (
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
    2147483549, 2147483543, 2147483497, 2147483489, 2147483477,
    2147483423, 2147483399, 2147483353, 2147483323, 2147483269,
    2147483249, 2147483237, 2147483179, 2147483171, 2147483137,
)

CHUNK = 1 << 20
MAX_COLUMNS = 62


class TimeLimitExceeded(RuntimeError):
    """A counting method ran past its deadline."""


@njit(cache=True)
def _ryser_chunk(col_rows, pw, n_rows, start, stop, primes):
    """Signed sums of prod_r rowsum_r(S)^mult_r over Gray codes start..stop-1.

    One residue per prime; ``pw[q, r, s]`` is s**mult_r mod primes[q].
    """
    n_cols = col_rows.shape[0]
    n_primes = primes.shape[0]
    sums = np.zeros(n_rows, dtype=np.int64)
    acc = np.zeros(n_primes, dtype=np.int64)
    s = start ^ (start >> 1)
    parity = 0
    for j in range(n_cols):
        if (s >> j) & 1:
            parity ^= 1
            for t in range(2):
                r = col_rows[j, t]
                if r >= 0:
                    sums[r] += 1
    for idx in range(start, stop):
        if idx != start:
            # gray(idx-1) and gray(idx) differ in the lowest set bit of idx
            j = 0
            x = idx
            while (x & 1) == 0:
                x >>= 1
                j += 1
            bit = (s >> j) & 1
            s ^= 1 << j
            delta = -1 if bit else 1
            parity ^= 1
            for t in range(2):
                r = col_rows[j, t]
                if r >= 0:
                    sums[r] += delta
        zero = False
        for r in range(n_rows):
            if sums[r] == 0 and pw[0, r, 0] == 0:
                zero = True
                break
        if zero:
            continue
        for q in range(n_primes):
            p = primes[q]
            term = 1
            for r in range(n_rows):
                term = (term * pw[q, r, sums[r]]) % p
            if parity:
                acc[q] = (acc[q] - term) % p
            else:
                acc[q] = (acc[q] + term) % p
    return acc


def ryser_repeated(columns: list[tuple[int, ...]], n_rows: int, mult: list[int],
                   bound: int, deadline: float | None = None) -> int:
    """Permanent of the matrix with ``mult[r]`` copies of row ``r``.

    ``columns[j]`` lists the (at most two) distinct rows holding a 1 in column
    ``j``.  ``bound`` must be >= the permanent.
    """
    n_cols = len(columns)
    if sum(mult) != n_cols:
        raise ValueError(f"matrix is not square: {sum(mult)} rows, {n_cols} columns")
    if n_cols == 0:
        return 1
    if n_cols > MAX_COLUMNS:
        raise ValueError(f"matrix side {n_cols} exceeds the kernel limit {MAX_COLUMNS}")
    col_rows = np.full((n_cols, 2), -1, dtype=np.int64)
    for j, rows in enumerate(columns):
        if len(rows) > 2:
            raise ValueError("columns may hold at most two ones")
        for t, r in enumerate(rows):
            col_rows[j, t] = r
    chosen, modulus = [], 1
    for p in PRIMES:
        if modulus > bound:
            break
        chosen.append(p)
        modulus *= p
    if modulus <= bound:
        raise ValueError("permanent bound too large for the available primes")
    primes = np.array(chosen, dtype=np.int64)
    pw = np.zeros((len(chosen), n_rows, n_cols + 1), dtype=np.int64)
    for q, p in enumerate(chosen):
        for r in range(n_rows):
            for s in range(n_cols + 1):
                pw[q, r, s] = pow(s, mult[r], p)
    total = np.zeros(len(chosen), dtype=object)
    for start in range(0, 1 << n_cols, CHUNK):
        if deadline is not None and time.monotonic() > deadline:
            raise TimeLimitExceeded("permanent")
        stop = min(start + CHUNK, 1 << n_cols)
        part = _ryser_chunk(col_rows, pw, n_rows, start, stop, primes)
        total = [(int(a) + int(b)) % p for a, b, p in zip(total, part, chosen)]
    sign = -1 if n_cols % 2 else 1
    return _crt([((sign * int(t)) % p, p) for t, p in zip(total, chosen)])


def _crt(residues: list[tuple[int, int]]) -> int:
    x, m = 0, 1
    for r, p in residues:
        t = ((r - x) * pow(m, -1, p)) % p
        x += m * t
        m *= p
    return x
