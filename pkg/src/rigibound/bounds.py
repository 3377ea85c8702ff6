"""Closed-form bounds: the alpha_d/beta_d optimiser and the classic bounds.

Closed forms run in log space on binary64; rational cases go through
:class:`fractions.Fraction` so that integral results come out exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, log
from typing import Iterable, Sequence


class IntegrityError(RuntimeError):
    """Component data contradicts the edge counts of a minimally rigid graph."""


def _check_dim(d: int) -> None:
    if d < 2:
        raise ValueError(f"invalid dimension d={d} (need d >= 2)")


def search_window(d: int) -> range:
    return range(d, 4 * d + 61)


def log_alpha_at(p: int, d: int) -> float:
    """ln of (2^(p-d) * C(p,d)^(2d-3))^(1/(2p-3))."""
    return ((p - d) * log(2) + (2 * d - 3) * log(comb(p, d))) / (2 * p - 3)


def log_beta_at(p: int, d: int) -> float:
    return (log(2) - 2 * log(comb(p, d))) / (2 * p - 3)


def log_w(p: int, d: int) -> float:
    """ln W(p); W(p) < 1 exactly where alpha_d(p) < alpha_d(p + 1)."""
    return -log(2) + 2 * log(comb(p, d)) + (2 * p - 3) * math.log1p(-d / (p + 1))


def sign_changes(values: Sequence[float]) -> int:
    signs = [v > 0 for v in values]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


@dataclass(frozen=True)
class AlphaBeta:
    d: int
    alpha: float
    beta: float
    p_star: int
    log_alpha: float
    log_beta: float

    @property
    def base(self) -> float:
        """Power basis ``2 * alpha`` of the embedding bound."""
        return 2 * self.alpha


@lru_cache(maxsize=None)
def alpha_beta(d: int) -> AlphaBeta:
    """Maximise alpha_d(p) over the search window and read off beta_d there."""
    _check_dim(d)
    window = search_window(d)
    logs = [log_alpha_at(p, d) for p in window]
    p_star = window[max(range(len(logs)), key=logs.__getitem__)]
    lw = [log_w(p, d) for p in window]
    if sign_changes(lw) != 1 or lw[0] >= 0:
        raise ArithmeticError(f"ln W(p) is not unimodal on the window for d={d}")
    # the maximiser is the first p with W(p) >= 1
    p_w = next(p for p, v in zip(window, lw) if v >= 0)
    if p_w != p_star:
        raise ArithmeticError(f"argmax p={p_star} disagrees with W sign change p={p_w}")
    # correctly rounded roots of the exact integer identities
    with localcontext() as ctx:
        ctx.prec = 60
        e = 2 * p_star - 3
        la = Decimal(2 ** (p_star - d) * comb(p_star, d) ** (2 * d - 3)).ln() / e
        lb = (Decimal(2) / Decimal(comb(p_star, d) ** 2)).ln() / e
        alpha, beta = float(la.exp()), float(lb.exp())
    return AlphaBeta(d, alpha, beta, p_star, float(la), float(lb))


def c_factor(p: int, h: int, d: int, ab: AlphaBeta | None = None) -> float:
    """C(p-h, d-h) * alpha^-1 * beta^(p-h-d): growth factor of one vertex step."""
    ab = ab or alpha_beta(d)
    return math.exp(log(comb(p - h, d - h)) - ab.log_alpha + (p - h - d) * ab.log_beta)


def bezout_bound(n: int, d: int) -> int:
    if n < d:
        raise ValueError("bezout_bound needs n >= d")
    return (2 ** d) ** (n - d)


def borcea_streinu_bound(n: int, d: int) -> Fraction:
    if n < d + 1:
        raise ValueError(f"borcea_streinu_bound needs n >= d+1, got n={n}, d={d}")
    value = Fraction(2)
    for m in range(n - d - 1):
        value *= Fraction(comb(n - 1 + m, n - d - 1 - m), comb(2 * m + 1, m))
    return value


def _exact_power(base: Fraction, num: int, den: int) -> Fraction | None:
    """``base ** (num/den)`` if it is rational, else None."""
    if den < 0:
        num, den = -num, -den
    g = math.gcd(num, den)
    num, den = num // g, den // g
    root = []
    for part in (base.numerator, base.denominator):
        r = round(part ** (1 / den)) if part else 0
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** den == part:
                root.append(cand)
                break
        else:
            return None
    return Fraction(root[0], root[1]) ** num


def bregman_minc(n: int, k: int, d: int) -> Fraction | float:
    """Bregman-Minc bound on orientations of a pseudograph with n vertices, k hanging edges.

    Equals (d!)^(k/d) * ((2d)!)^((dn-k)/(2d)) * (d!)^(-n); for d = 2 this is
    (2!)^(k/2) (4!)^((2n-k)/4) 2^(-n).  Exact when the exponents are integers.
    """
    if n < 1 or k < 0:
        raise ValueError("bregman_minc needs n >= 1 and k >= 0")
    fd, f2d = factorial(d), factorial(2 * d)
    if k % d == 0 and (d * n - k) % (2 * d) == 0:
        return Fraction(fd) ** (k // d) * Fraction(f2d) ** ((d * n - k) // (2 * d)) / Fraction(fd) ** n
    return math.exp(k / d * log(fd) + (d * n - k) / (2 * d) * log(f2d) - n * log(fd))


def bm_basis(d: int) -> float:
    return 2 * math.sqrt(comb(2 * d, d))


@dataclass(frozen=True)
class ClosedBound:
    d: int
    n: int
    literal: float | Fraction  # beta^(3d-2) (2 alpha)^e; the planar formula when d = 2
    variant: float | Fraction  # beta^(3d-4) (2 alpha)^e
    exponent: int  # e, the exponent of 2*alpha
    certified: float | Fraction  # max(variant, 2^e)


def new_closed_bound(n: int, d: int, has_clique: bool = True) -> ClosedBound:
    """Closed-form embedding bound for a minimally rigid graph on ``n`` vertices.

    For d = 2 both formula fields hold 18^(-2/5) (4 (3/4)^(1/5))^(n-2), exact
    when rational.  For d >= 3 ``literal`` uses beta^(3d-2) and ``variant``
    beta^(3d-4).  Without a d-clique the exponent e of 2*alpha becomes n-2.

    ``certified`` also covers pseudographs whose components all have at most
    ``component_threshold(d)`` vertices: those have a single orientation and
    the bound is 2^e (the triangle gives 2).
    """
    _check_dim(d)
    if n < d:
        raise ValueError("new_closed_bound needs n >= d")
    exponent = n - d if has_clique or d == 2 else n - 2
    if d == 2:
        # value^5 = 768^e / 324
        value = _exact_power(Fraction(768) ** exponent / 324, 1, 5)
        if value is None:
            value = math.exp((exponent * log(768) - log(324)) / 5)
        literal = variant = value
    else:
        ab = alpha_beta(d)
        lb2a = log(2) + ab.log_alpha
        literal = math.exp((3 * d - 2) * ab.log_beta + exponent * lb2a)
        variant = math.exp((3 * d - 4) * ab.log_beta + exponent * lb2a)
    trivial = 2 ** exponent
    return ClosedBound(d, n, literal, variant, exponent, variant if variant >= trivial else Fraction(trivial))


def component_threshold(d: int) -> int:
    """Components up to this many vertices have at most one orientation and are skipped."""
    return 1 if d == 2 else 2


def corollary_bound(components: Iterable[tuple[int, int]], d: int, check: bool = True) -> float:
    """alpha^n * beta^(k' - c') over the components of a pseudograph.

    ``components`` holds ``(n_i, k_i)`` per connected component; ``n`` is the
    total vertex count, ``k'`` and ``c'`` range over components with more than
    ``component_threshold(d)`` vertices.
    """
    comps = list(components)
    ab = alpha_beta(d)
    n = sum(ni for ni, _ in comps)
    big = [(ni, ki) for ni, ki in comps if ni > component_threshold(d)]
    if check:
        need = comb(d + 1, 2)
        for ni, ki in comps:
            if ni >= max(2, d) and ki < need:
                raise IntegrityError(
                    f"component with {ni} vertices has {ki} < {need} hanging edges"
                )
    if not big:
        return 1.0
    k_prime = sum(ki for _, ki in big)
    return math.exp(n * ab.log_alpha + (k_prime - len(big)) * ab.log_beta)


@dataclass(frozen=True)
class Table1Row:
    d: int
    this: float
    bm: float
    bezout: int


def table1(d_range: Iterable[int] = range(2, 10)) -> list[Table1Row]:
    return [Table1Row(d, alpha_beta(d).base, bm_basis(d), 2 ** d) for d in d_range]


def sig5(x: float) -> str:
    return f"{x:#.5g}".rstrip(".")


def format_table1(rows: list[Table1Row], fmt: str = "text") -> str:
    if fmt == "csv":
        lines = ["d,this,bm,bezout"]
        lines += [f"{r.d},{sig5(r.this)},{sig5(r.bm)},{r.bezout}" for r in rows]
        return "\n".join(lines) + "\n"
    cols = [["d"] + [str(r.d) for r in rows],
            ["this"] + [sig5(r.this) for r in rows],
            ["B-M"] + [sig5(r.bm) for r in rows],
            ["Bez."] + [str(r.bezout) for r in rows]]
    width = max(len(c) for row in cols for c in row)
    return "\n".join("  ".join(c.rjust(width) for c in row) for row in cols) + "\n"


def bm_comparison(max_n: int = 39, d: int = 2) -> list[tuple[int, int, float, float, bool]]:
    """Rows (n, k, alpha^n beta^(k-1), Bregman-Minc value, formula <= BM) for 1 <= k <= n+1."""
    ab = alpha_beta(d)
    rows = []
    for n in range(1, max_n + 1):
        for k in range(1, n + 2):
            f = math.exp(n * ab.log_alpha + (k - 1) * ab.log_beta)
            bm = float(bregman_minc(n, k, d))
            rows.append((n, k, f, bm, f <= bm))
    return rows
