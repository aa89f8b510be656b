"""Certified real arithmetic.

Every real quantity that takes part in a decision is a :class:`CertReal`: a
midpoint with an explicit error radius, evaluated at a stated working
precision.  The heavy lifting is done by Arb ball arithmetic (python-flint);
this module fixes the precision discipline and the comparison semantics.

Working precision in python-flint is a process-global setting, so all
evaluation goes through :func:`working_precision`.  Parallel work is done with
processes, never threads.
"""

from __future__ import annotations

import enum
import math
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, TypeVar

import numpy as np
from flint import arb, ctx, fmpq, fmpz

DEFAULT_PREC = 64
MAX_PREC = 1024

# residues tables above this size are built per call instead of cached
_TABLE_CACHE_LIMIT = 1 << 22

T = TypeVar("T")


class Undecided(Exception):
    """A certified decision could not be reached at the current precision."""


class PrecisionExhausted(ArithmeticError):
    """Raised when escalation reaches the precision ceiling still undecided."""


class Order(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    UNDECIDED = "undecided"

    def swapped(self) -> "Order":
        if self is Order.LESS:
            return Order.GREATER
        if self is Order.GREATER:
            return Order.LESS
        return self


@contextmanager
def working_precision(prec: int):
    old = ctx.prec
    ctx.prec = prec
    try:
        yield
    finally:
        ctx.prec = old


def _exact_fmpq(x: arb) -> fmpq:
    """The exact value of an arb with zero radius (a midpoint or radius)."""
    man, exp = x.man_exp()
    return fmpq(man) * fmpq(2) ** exp if exp >= 0 else fmpq(man, fmpz(2) ** -exp)


def _as_arb(x) -> arb:
    if isinstance(x, CertReal):
        return x.ball
    if isinstance(x, arb):
        return x
    if isinstance(x, (int, fmpz)):
        return arb(fmpz(x))
    if isinstance(x, fmpq):
        return arb(x)
    if isinstance(x, float):
        # floats are exact binary values
        return arb(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to a certified real")


@dataclass(frozen=True, eq=False)
class CertReal:
    """A real number known to lie in ``[mid - rad, mid + rad]``."""

    ball: arb
    prec: int = DEFAULT_PREC

    # construction ---------------------------------------------------------

    @classmethod
    def exact(cls, value, prec: int = DEFAULT_PREC) -> "CertReal":
        with working_precision(prec):
            return cls(+_as_arb(value) if isinstance(value, fmpq) else _as_arb(value), prec)

    @classmethod
    def from_mid_rad(cls, mid, rad, prec: int = DEFAULT_PREC) -> "CertReal":
        if rad < 0:
            raise ValueError("radius must be nonnegative")
        with working_precision(prec):
            return cls(arb(_as_arb(mid)) + arb(0, _as_arb(rad)), prec)

    @classmethod
    def hull(cls, lo, hi, prec: int = DEFAULT_PREC) -> "CertReal":
        with working_precision(prec):
            return cls(_as_arb(lo).union(_as_arb(hi)), prec)

    # views ----------------------------------------------------------------

    @property
    def mid(self) -> arb:
        return self.ball.mid()

    @property
    def rad(self) -> arb:
        return self.ball.rad()

    def lower(self) -> arb:
        return self.ball.lower()

    def upper(self) -> arb:
        return self.ball.upper()

    def is_exact(self) -> bool:
        return self.ball.is_exact()

    def contains(self, value) -> bool:
        if isinstance(value, float):
            value = arb(value)
        if isinstance(value, fmpq):
            # exact rational test; converting value to a ball would round it
            mid, rad = _exact_fmpq(self.ball.mid()), _exact_fmpq(self.ball.rad())
            return mid - rad <= value <= mid + rad
        return self.ball.contains(_as_arb(value))

    def overlaps(self, other: "CertReal") -> bool:
        return self.ball.overlaps(_as_arb(other))

    def __float__(self) -> float:
        return float(self.ball.mid())

    def rad_float(self) -> float:
        """Radius rounded up to a float."""
        r = self.ball.rad()
        f = float(r)
        return f if f >= r else math.nextafter(f, math.inf)

    def format(self, digits: int = 20) -> str:
        return self.ball.mid().str(digits, radius=False)

    def __repr__(self) -> str:
        return f"CertReal({self.ball.str(20)}, prec={self.prec})"

    # arithmetic -----------------------------------------------------------

    def _binary(self, other, op) -> "CertReal":
        prec = max(self.prec, other.prec) if isinstance(other, CertReal) else self.prec
        with working_precision(prec):
            return CertReal(op(self.ball, _as_arb(other)), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return CertReal(-self.ball, self.prec)

    def __pow__(self, k):
        with working_precision(self.prec):
            if isinstance(k, int):
                return CertReal(self.ball ** k, self.prec)
            return CertReal(self.ball ** _as_arb(k), self.prec)

    def _unary(self, fn) -> "CertReal":
        with working_precision(self.prec):
            return CertReal(fn(self.ball), self.prec)

    def sqrt(self):
        return self._unary(lambda b: b.sqrt())

    def log(self):
        return self._unary(lambda b: b.log())

    def exp(self):
        return self._unary(lambda b: b.exp())

    def __abs__(self):
        return self._unary(abs)

    def max(self, other) -> "CertReal":
        return self._binary(other, lambda a, b: a.max(b))

    def min(self, other) -> "CertReal":
        return self._binary(other, lambda a, b: a.min(b))

    def ceil_int(self) -> int:
        """Smallest integer that is certainly >= every member of the ball."""
        with working_precision(self.prec):
            up = self.ball.upper()
            c = up.ceil()
            if not c.is_exact():
                # midpoint too large for the working precision
                c = (up + 1).ceil().upper()
            return int(c.unique_fmpz())

    # serialization --------------------------------------------------------

    def mid_rad_hex(self) -> tuple[str, str]:
        return _arb_hex(self.ball.mid()), _arb_hex(self.ball.rad())

    @classmethod
    def from_hex(cls, mid_hex: str, rad_hex: str, prec: int) -> "CertReal":
        mid = _hex_arb(mid_hex)
        rad = _hex_arb(rad_hex)
        bits = int(mid.man_exp()[0]).bit_length() + 16
        with working_precision(max(prec, bits)):
            return cls(_ball_with_radius(mid, rad), prec)


def _ball_with_radius(mid: arb, rad: arb) -> arb:
    """Ball with exactly the given midpoint and radius where possible.

    Arb rounds a radius up by one unit of its 30-bit magnitude type on
    conversion, so the radius is pre-decremented by that unit; the result is
    checked and never narrower than requested.
    """
    if rad.is_zero():
        return arb(mid)
    man, exp = (int(v) for v in rad.man_exp())
    shift = 30 - man.bit_length()
    man, exp = man << shift, exp - shift
    below = (1 << 30) - 1 if man == 1 << 29 else man - 1
    below_exp = exp - 1 if man == 1 << 29 else exp
    for m, e in ((below, below_exp), (man, exp)):
        ball = arb(mid, arb(fmpz(m)) * arb(2) ** e)
        if ball.rad() >= rad:
            return ball
    return arb(mid, rad)


def _arb_hex(x: arb) -> str:
    man, exp = x.man_exp()
    man, exp = int(man), int(exp)
    sign = "-" if man < 0 else ""
    return f"{sign}0x{abs(man):x}p{exp}"


def _hex_arb(s: str) -> arb:
    s = s.strip()
    sign = -1 if s.startswith("-") else 1
    body = s.lstrip("+-")
    if not body.startswith("0x") or "p" not in body:
        raise ValueError(f"malformed hex real: {s!r}")
    man_s, exp_s = body[2:].split("p")
    man = sign * int(man_s, 16)
    exp = int(exp_s)
    # enough precision to hold the mantissa exactly
    with working_precision(max(64, abs(man).bit_length() + 8)):
        if exp >= 0:
            return arb(fmpz(man) * fmpz(2) ** exp)
        return arb(fmpz(man)) / arb(fmpz(2) ** (-exp))


def cert_compare(x: CertReal, y: CertReal) -> Order:
    """Certified three-way comparison; ``UNDECIDED`` when the balls overlap."""
    a, b = _as_arb(x), _as_arb(y)
    if a.is_exact() and b.is_exact() and a == b:
        return Order.EQUAL
    if a < b:
        return Order.LESS
    if a > b:
        return Order.GREATER
    return Order.UNDECIDED


def certainly_less(x, y) -> bool:
    """True iff x < y is certified; raises :class:`Undecided` on overlap."""
    order = cert_compare(_cert(x), _cert(y))
    if order is Order.UNDECIDED:
        raise Undecided(f"{x!r} vs {y!r}")
    return order is Order.LESS


def certainly_le(x, y) -> bool:
    """True iff x <= y is certified; raises :class:`Undecided` on overlap."""
    order = cert_compare(_cert(x), _cert(y))
    if order is Order.UNDECIDED:
        raise Undecided(f"{x!r} vs {y!r}")
    return order is not Order.GREATER


def _cert(x) -> CertReal:
    return x if isinstance(x, CertReal) else CertReal(_as_arb(x))


def escalate(fn: Callable[[int], T], prec: int = DEFAULT_PREC,
             max_prec: int = MAX_PREC) -> T:
    """Call ``fn(prec)``, doubling the precision while it raises ``Undecided``."""
    last = None
    while prec <= max_prec:
        try:
            return fn(prec)
        except Undecided as exc:
            last = exc
            prec *= 2
    raise PrecisionExhausted(f"undecided at {max_prec} bits: {last}")


# constructors for the quantities used throughout ---------------------------

def cert_e_fraction(b: int, q: int, prec: int = DEFAULT_PREC) -> tuple[CertReal, CertReal]:
    """(cos 2*pi*b/q, sin 2*pi*b/q) with exact reduction of the angle."""
    if q < 1:
        raise ValueError("q must be positive")
    b %= q
    with working_precision(prec):
        s, c = arb.sin_cos_pi_fmpq(fmpq(2 * b, q))
    return CertReal(c, prec), CertReal(s, prec)


def _exact_root(q: int, num: int, den: int) -> fmpq | None:
    """q**(num/den) when it is rational, else None."""
    g = math.gcd(abs(num), den)
    num, den = num // g, den // g
    r = _iroot_exact(q, den)
    if r is None:
        return None
    return fmpq(r) ** num


def _iroot_exact(q: int, k: int) -> int | None:
    if k == 1:
        return q
    r = int(round(q ** (1.0 / k))) if q < 2 ** 1000 else _iroot_floor(q, k)
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** k == q:
            return c
    return None


def _iroot_floor(q: int, k: int) -> int:
    lo, hi = 0, 1 << (q.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** k <= q:
            lo = mid
        else:
            hi = mid - 1
    return lo


def cert_root_power(q: int, num: int, den: int, prec: int = DEFAULT_PREC) -> CertReal:
    """Enclosure of q**(num/den); exact when the value is rational."""
    if q < 1 or den < 1:
        raise ValueError("need q >= 1 and den >= 1")
    exact = _exact_root(q, num, den)
    with working_precision(prec):
        if exact is not None:
            return CertReal(arb(exact), prec)
        # q**(num/den) = exp(num * log(q) / den)
        return CertReal((arb(fmpz(q)).log() * num / den).exp(), prec)


def cert_log(q: int, prec: int = DEFAULT_PREC) -> CertReal:
    with working_precision(prec):
        return CertReal(arb(fmpz(q)).log(), prec)


def cert_pi(prec: int = DEFAULT_PREC) -> CertReal:
    with working_precision(prec):
        return CertReal(arb.pi(), prec)


def cert_hypot(re: CertReal, im: CertReal) -> CertReal:
    """|re + i im|, kept nonnegative."""
    prec = max(re.prec, im.prec)
    with working_precision(prec):
        sq = re.ball * re.ball + im.ball * im.ball
        sq = sq.nonnegative_part()
        return CertReal(sq.sqrt(), prec)


def cert_sum(values: Iterable[CertReal], prec: int = DEFAULT_PREC) -> CertReal:
    with working_precision(prec):
        acc = arb(0)
        for v in values:
            acc += _as_arb(v)
        return CertReal(acc, prec)


# exponential sums over residues ---------------------------------------------

_FLOAT_EPS = 2.0 ** -52


@lru_cache(maxsize=32)
def _full_table(q: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Float64 table of (cos, sin)(2 pi k/q), k < q, with a per-entry error bound."""
    cos = np.empty(q, dtype=np.float64)
    sin = np.empty(q, dtype=np.float64)
    worst = arb(0)
    with working_precision(DEFAULT_PREC):
        for k in range(q // 2 + 1):
            s, c = arb.sin_cos_pi_fmpq(fmpq(2 * k, q))
            cf, sf = float(c), float(s)
            cos[k], sin[k] = cf, sf
            # e(-k/q) is the conjugate of e(k/q)
            cos[(-k) % q] = cf
            sin[(-k) % q] = -sf
            worst = worst.max(c.rad()).max(s.rad())
    bound = float(worst.upper()) * 2 + _FLOAT_EPS
    return cos, sin, bound


def _sparse_table(q: int, residues: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    uniq, inverse = np.unique(residues, return_inverse=True)
    cos = np.empty(len(uniq), dtype=np.float64)
    sin = np.empty(len(uniq), dtype=np.float64)
    worst = arb(0)
    with working_precision(DEFAULT_PREC):
        for i, v in enumerate(uniq.tolist()):
            s, c = arb.sin_cos_pi_fmpq(fmpq(2 * v, q))
            cos[i], sin[i] = float(c), float(s)
            worst = worst.max(c.rad()).max(s.rad())
    bound = float(worst.upper()) * 2 + _FLOAT_EPS
    return cos[inverse], sin[inverse], bound


def trig_sum(q: int, residues: np.ndarray, weights: np.ndarray | None = None,
             prec: int = DEFAULT_PREC, table: str = "auto") -> tuple[CertReal, CertReal]:
    """Certified ``sum_j w_j e(r_j / q)`` as (real, imaginary).

    At the default precision the terms come from a float64 table with a
    per-entry error bound and are added with ``math.fsum`` (correctly
    rounded), so the returned radius is a rigorous bound.  Above the default
    precision the terms are Arb balls summed in ball arithmetic.
    """
    residues = np.asarray(residues, dtype=np.int64) % q
    if weights is not None:
        weights = np.asarray(weights, dtype=np.int64)
    if prec > DEFAULT_PREC:
        return _trig_sum_arb(q, residues, weights, prec)
    use_full = table == "full" or (table == "auto" and q <= _TABLE_CACHE_LIMIT
                                   and len(residues) >= q // 4)
    if use_full:
        cos_t, sin_t, eps = _full_table(q)
        cos, sin = cos_t[residues], sin_t[residues]
    else:
        cos, sin, eps = _sparse_table(q, residues)
    if weights is None:
        total_w = len(residues)
        re, im = math.fsum(cos.tolist()), math.fsum(sin.tolist())
        product_err = 0.0
    else:
        total_w = int(weights.sum())
        wf = weights.astype(np.float64)
        re, im = math.fsum((wf * cos).tolist()), math.fsum((wf * sin).tolist())
        # each product w*c is rounded once
        product_err = 1.0
    with working_precision(DEFAULT_PREC):
        unit = arb(2) ** -53
        per = arb(eps) + unit * (1 + arb(eps)) * product_err
        err_base = arb(total_w) * per
        out = []
        for val in (re, im):
            err = err_base + unit * abs(arb(val))
            out.append(CertReal(arb(val) + arb(0, err.upper()), DEFAULT_PREC))
    return out[0], out[1]


def _trig_sum_arb(q, residues, weights, prec):
    if weights is None:
        uniq, counts = np.unique(residues, return_counts=True)
    else:
        agg: dict[int, int] = {}
        for r, w in zip(residues.tolist(), weights.tolist()):
            agg[r] = agg.get(r, 0) + w
        uniq = np.array(sorted(agg), dtype=np.int64)
        counts = np.array([agg[r] for r in uniq.tolist()], dtype=np.int64)
    with working_precision(prec):
        re = arb(0)
        im = arb(0)
        for r, c in zip(uniq.tolist(), counts.tolist()):
            s, co = arb.sin_cos_pi_fmpq(fmpq(2 * r, q))
            re += c * co
            im += c * s
    return CertReal(re, prec), CertReal(im, prec)


def trig_column_sums(q: int, matrix: np.ndarray,
                     prec: int = DEFAULT_PREC) -> list[tuple[CertReal, CertReal]]:
    """Certified ``sum_i e(M[i, j] / q)`` for every column j of an int matrix."""
    matrix = np.asarray(matrix, dtype=np.int64) % q
    if prec > DEFAULT_PREC or q > _TABLE_CACHE_LIMIT:
        return [trig_sum(q, matrix[:, j], prec=prec) for j in range(matrix.shape[1])]
    cos_t, sin_t, eps = _full_table(q)
    rows = matrix.shape[0]
    cos_cols = cos_t[matrix].T.tolist()
    sin_cols = sin_t[matrix].T.tolist()
    out = []
    with working_precision(DEFAULT_PREC):
        unit = arb(2) ** -53
        err_base = arb(rows) * arb(eps)
        for cc, ss in zip(cos_cols, sin_cols):
            pair = []
            for val in (math.fsum(cc), math.fsum(ss)):
                err = err_base + unit * abs(arb(val))
                pair.append(CertReal(arb(val) + arb(0, err.upper()), DEFAULT_PREC))
            out.append((pair[0], pair[1]))
    return out
