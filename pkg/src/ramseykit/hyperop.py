"""Symbolic up-arrow arithmetic over the naturals.

Expressions are built from arbitrary-precision naturals, products, powers,
iterated-arrow towers a ^^...^ b, and the cube-lemma recurrence value
f(l, k).  The module provides three things:

* ``eval_exact`` -- exact evaluation under a bit budget.  Every intermediate
  value of the defining recursion must fit the budget, otherwise the result
  is an overflow (a normal outcome, not an error).
* ``compare`` -- a sound, deliberately incomplete comparator.  It never
  reports an order unless that order is provable, either by exact
  evaluation or by a small calculus of tower bounds; ``UNKNOWN`` is a
  legitimate answer.
* the internal proof helpers (``proves_lt`` / ``proves_le``) used by the
  certificate rule checkers in :mod:`ramseykit.certificates`.

The bound calculus represents sound over/under-estimates of a value as a
"capped tower": either an exact machine integer or ``2^^h`` where the
height ``h`` is again a capped tower.  Absorption facts like
``c * 2^^m <= 2^^(m+1)`` (for ``c <= 2^^m``) keep the representation closed
under the arithmetic we need while staying exact at the integer level,
which is where the paper-scale chains are actually decided.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Union

DEFAULT_BIT_BUDGET = 1 << 20

# ---------------------------------------------------------------------------
# Expression AST


@dataclass(frozen=True)
class Nat:
    value: int

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("naturals only: %r" % (self.value,))


@dataclass(frozen=True)
class Mul:
    left: "TowerExpr"
    right: "TowerExpr"


@dataclass(frozen=True)
class Pow:
    base: "TowerExpr"
    exp: "TowerExpr"


@dataclass(frozen=True)
class Arrow:
    """``Arrow(a, m, b)`` denotes a ^(m arrows) b; Arrow(a, 1, b) == a**b."""

    base: "TowerExpr"
    arrows: int
    height: "TowerExpr"

    def __post_init__(self) -> None:
        if self.arrows < 1:
            raise ValueError("arrow count must be >= 1")
        if not provably_at_least(self.base, 2):
            raise ValueError("arrow base must be provably >= 2: %r" % (self.base,))
        if not provably_at_least(self.height, 1):
            raise ValueError("arrow height must be provably >= 1: %r" % (self.height,))


@dataclass(frozen=True)
class FRec:
    """The cube-lemma recurrence value f(l, k):

    f(1, k) = k + 1,   f(l, k) = k ** (f(l-1, k) ** (2l - 2)) + 1.
    """

    level: "TowerExpr"
    arg: "TowerExpr"

    def __post_init__(self) -> None:
        if not provably_at_least(self.level, 1):
            raise ValueError("f level must be provably >= 1")
        if not provably_at_least(self.arg, 1):
            raise ValueError("f argument must be provably >= 1")


TowerExpr = Union[Nat, Mul, Pow, Arrow, FRec]


def provably_at_least(e: TowerExpr, t: int) -> bool:
    """Cheap structural lower bound: True implies value(e) >= t (t in 1, 2)."""
    match e:
        case Nat(v):
            return v >= t
        case Arrow():
            return True  # base >= 2, height >= 1 force value >= 2
        case FRec():
            return True  # f(l, k) >= k + 1 >= 2 given k >= 1
        case Mul(a, b):
            if t <= 1:
                return provably_at_least(a, 1) and provably_at_least(b, 1)
            return (provably_at_least(a, 2) and provably_at_least(b, 1)) or (
                provably_at_least(a, 1) and provably_at_least(b, 2)
            )
        case Pow(a, b):
            if b == Nat(0):
                return t <= 1
            if t <= 1:
                return provably_at_least(a, 1)
            return provably_at_least(a, 2) and provably_at_least(b, 1)
    return False


# ---------------------------------------------------------------------------
# S-expression round-trip.  Grammar: (nat N) (mul A B) (pow A B)
# (arrow A M B) (f L K); M is a positive integer literal.


def to_sexpr(e: TowerExpr) -> str:
    match e:
        case Nat(v):
            return "(nat %d)" % v
        case Mul(a, b):
            return "(mul %s %s)" % (to_sexpr(a), to_sexpr(b))
        case Pow(a, b):
            return "(pow %s %s)" % (to_sexpr(a), to_sexpr(b))
        case Arrow(a, m, b):
            return "(arrow %s %d %s)" % (to_sexpr(a), m, to_sexpr(b))
        case FRec(l, k):
            return "(f %s %s)" % (to_sexpr(l), to_sexpr(k))
    raise TypeError("not a TowerExpr: %r" % (e,))


class SexprError(ValueError):
    pass


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse_tokens(tokens: list[str], pos: int) -> tuple[TowerExpr, int]:
    if pos >= len(tokens):
        raise SexprError("unexpected end of input")
    if tokens[pos] != "(":
        raise SexprError("expected '(' at token %d, got %r" % (pos, tokens[pos]))
    head = tokens[pos + 1]
    pos += 2
    if head == "nat":
        value = int(tokens[pos])
        pos += 1
        expr: TowerExpr = Nat(value)
    elif head in ("mul", "pow"):
        a, pos = _parse_tokens(tokens, pos)
        b, pos = _parse_tokens(tokens, pos)
        expr = Mul(a, b) if head == "mul" else Pow(a, b)
    elif head == "arrow":
        a, pos = _parse_tokens(tokens, pos)
        m = int(tokens[pos])
        pos += 1
        b, pos = _parse_tokens(tokens, pos)
        expr = Arrow(a, m, b)
    elif head == "f":
        l, pos = _parse_tokens(tokens, pos)
        k, pos = _parse_tokens(tokens, pos)
        expr = FRec(l, k)
    else:
        raise SexprError("unknown constructor %r" % head)
    if pos >= len(tokens) or tokens[pos] != ")":
        raise SexprError("expected ')' after %s" % head)
    return expr, pos + 1


def parse_sexpr(text: str) -> TowerExpr:
    tokens = _tokenize(text)
    expr, pos = _parse_tokens(tokens, 0)
    if pos != len(tokens):
        raise SexprError("trailing tokens: %r" % (tokens[pos:],))
    return expr


def parse_sexpr_prefix(tokens: list[str], pos: int) -> tuple[TowerExpr, int]:
    """Parse one s-expression from a token list (for embedding in files)."""
    return _parse_tokens(tokens, pos)


# ---------------------------------------------------------------------------
# Exact evaluation under a bit budget


def _bits(v: int) -> int:
    return v.bit_length()


def _mul_b(a: int, b: int, budget: int) -> Optional[int]:
    if a and b and _bits(a) + _bits(b) - 1 > budget:
        return None
    v = a * b
    return v if _bits(v) <= budget else None


def _pow_b(a: int, b: int, budget: int) -> Optional[int]:
    if a <= 1 or b <= 1:
        v = a**b if b >= 0 else 1
        return v if _bits(v) <= budget else None
    # a >= 2: a**b has at least (bits(a)-1)*b + 1 bits; refuse before computing
    if (_bits(a) - 1) * b + 1 > budget:
        return None
    v = a**b
    return v if _bits(v) <= budget else None


def _arrow_b(a: int, m: int, b: int, budget: int) -> Optional[int]:
    # defining recursion a^^(m)b = a^^(m-1)(a^^(m)(b-1)); iterate the height
    if m == 1:
        return _pow_b(a, b, budget)
    if b == 0:
        return 1
    acc = a
    for _ in range(b - 1):
        acc = _arrow_b(a, m - 1, acc, budget)
        if acc is None:
            return None
    return acc


def _frec_b(l: int, k: int, budget: int) -> Optional[int]:
    if k == 0:
        return 1  # 0+1 at the base; 0**e + 1 = 1 above it
    if k == 1:
        return 2  # 1**e + 1 = 2 at every level
    f = k + 1
    if _bits(f) > budget:
        return None
    for i in range(2, l + 1):
        e = _pow_b(f, 2 * i - 2, budget)
        if e is None:
            return None
        p = _pow_b(k, e, budget)
        if p is None:
            return None
        f = p + 1
        if _bits(f) > budget:
            return None
    return f


@lru_cache(maxsize=1 << 16)
def eval_exact(e: TowerExpr, bit_budget: int = DEFAULT_BIT_BUDGET) -> Optional[int]:
    """Exact value of ``e``, or None (overflow) if any intermediate value of
    the defining recursion exceeds ``bit_budget`` bits."""
    if bit_budget < 64:
        raise ValueError("bit budget must be >= 64")
    match e:
        case Nat(v):
            return v if _bits(v) <= bit_budget else None
        case Mul(a, b):
            va = eval_exact(a, bit_budget)
            vb = eval_exact(b, bit_budget)
            if va is None or vb is None:
                return None
            return _mul_b(va, vb, bit_budget)
        case Pow(a, b):
            va = eval_exact(a, bit_budget)
            vb = eval_exact(b, bit_budget)
            if va is None or vb is None:
                return None
            return _pow_b(va, vb, bit_budget)
        case Arrow(a, m, b):
            va = eval_exact(a, bit_budget)
            vb = eval_exact(b, bit_budget)
            if va is None or vb is None:
                return None
            return _arrow_b(va, m, vb, bit_budget)
        case FRec(l, k):
            vl = eval_exact(l, bit_budget)
            vk = eval_exact(k, bit_budget)
            if vl is None or vk is None:
                return None
            return _frec_b(vl, vk, bit_budget)
    raise TypeError("not a TowerExpr: %r" % (e,))


# ---------------------------------------------------------------------------
# Normalization: collapse evaluable subterms, remove degenerate arrows and
# expand short higher-arrow towers so that e.g. 2^^^5 exposes its ^^ shape.

_EXPAND_HEIGHT_LIMIT = 64


@lru_cache(maxsize=1 << 16)
def normalize(e: TowerExpr, budget: int = DEFAULT_BIT_BUDGET) -> TowerExpr:
    match e:
        case Nat():
            return e
        case Mul(a, b):
            a, b = normalize(a, budget), normalize(b, budget)
            if a == Nat(1):
                return b
            if b == Nat(1):
                return a
            if Nat(0) in (a, b):
                return Nat(0)
            e = Mul(a, b)
        case Pow(a, b):
            a, b = normalize(a, budget), normalize(b, budget)
            if b == Nat(0):
                return Nat(1)
            if b == Nat(1):
                return a
            if a == Nat(1):
                return Nat(1)
            e = Pow(a, b)
        case Arrow(a, m, b):
            a, b = normalize(a, budget), normalize(b, budget)
            if b == Nat(1):
                return a
            if m == 1:
                return normalize(Pow(a, b), budget)
            if isinstance(b, Nat) and b.value <= _EXPAND_HEIGHT_LIMIT:
                if m >= 3:
                    inner = normalize(Arrow(a, m, Nat(b.value - 1)), budget)
                    return normalize(Arrow(a, m - 1, inner), budget)
                if b.value == 2:  # a^^2 == a**a
                    return normalize(Pow(a, a), budget)
            e = Arrow(a, m, b)
        case FRec(l, k):
            e = FRec(normalize(l, budget), normalize(k, budget))
    v = eval_exact(e, budget)
    return Nat(v) if v is not None else e


# ---------------------------------------------------------------------------
# Capped-tower bounds.  A bound denotes a natural number: THInt(n) denotes n,
# THTow(h) denotes 2^^den(h) with den(h) >= 1.


@dataclass(frozen=True)
class THInt:
    n: int


@dataclass(frozen=True)
class THTow:
    h: "TH"


TH = Union[THInt, THTow]

_MATERIALIZE_HEIGHT = 5  # 2^^5 has 65537 bits; 2^^6 is never materialized


def tower_floor_height(n: int) -> int:
    """Largest m >= 0 with 2^^m <= n (n >= 1).  Equals the iterated log count."""
    if n < 1:
        raise ValueError("positive integers only")
    m = 0
    while n >= 2:
        n = n.bit_length() - 1  # floor(log2(n))
        m += 1
    return m


def tower_ceil_height(n: int) -> int:
    """Smallest m >= 0 with n <= 2^^m (n >= 1)."""
    t = tower_floor_height(n)
    return t if _tow2(t) == n else t + 1


def _tow2(m: int) -> Optional[int]:
    """2^^m as an int when materializable (m <= 5), else None."""
    if m > _MATERIALIZE_HEIGHT:
        return None
    v = 1
    for _ in range(m):
        v = 1 << v
    return v


def _th_cmp(a: TH, b: TH) -> Optional[int]:
    """Exact comparison of denotations: -1, 0, 1, or None when undecided."""
    match a, b:
        case THInt(x), THInt(y):
            return (x > y) - (x < y)
        case THTow(x), THTow(y):
            return _th_cmp(x, y)  # 2^^h strictly monotone in h
        case THInt(x), THTow(y):
            r = _th_cmp_int_tow(x, y)
            return None if r is None else r
        case THTow(x), THInt(y):
            r = _th_cmp_int_tow(y, x)
            return None if r is None else -r
    return None


def _th_cmp_int_tow(n: int, h: TH) -> Optional[int]:
    """Compare the integer n against 2^^den(h)."""
    if n < 1:
        return -1
    t = tower_floor_height(n)  # 2^^t <= n < 2^^(t+1)
    side = _th_cmp(h, THInt(t))
    if side is None:
        return None
    if side > 0:
        return -1  # den(h) >= t+1 so 2^^den(h) > n
    if side < 0:
        return 1  # den(h) <= t-1 so 2^^den(h) < 2^^t <= n
    # den(h) == t: exact boundary, 2^^t is materializable because 2^^t <= n
    v = _tow2(t)
    assert v is not None
    return (n > v) - (n < v)


def _th_max_u(a: TH, b: TH) -> TH:
    c = _th_cmp(a, b)
    if c is None:
        # fall back to a bound dominating both: bump the tower-shaped one
        if isinstance(a, THTow):
            return _th_succ_u(a) if _th_cmp(_th_succ_u(a), b) in (0, 1) else _th_succ_u(b)
        return _th_succ_u(b)
    return a if c >= 0 else b


def _th_succ_u(t: TH) -> TH:
    """A bound >= den(t) + 1."""
    match t:
        case THInt(n):
            return THInt(n + 1)
        case THTow(h):
            return THTow(_th_succ_u(h))  # 2^^(h+1) >= 2^^h + 1
    raise TypeError


def _th_dbl_u(t: TH) -> TH:
    """A bound >= 2 * den(t)."""
    match t:
        case THInt(n):
            return THInt(2 * n)
        case THTow(h):
            return THTow(_th_succ_u(h))  # 2^^(h+1) = 2^(2^^h) >= 2*2^^h
    raise TypeError


def _th_add_u(a: TH, b: TH) -> TH:
    match a, b:
        case THInt(x), THInt(y):
            return THInt(x + y)
    return _th_dbl_u(_th_max_u(a, b))


def _th_log2_u(t: TH) -> TH:
    """A bound >= log2(den(t)) (den(t) >= 1)."""
    match t:
        case THInt(n):
            return THInt((max(n, 1) - 1).bit_length())  # ceil(log2 n)
        case THTow(h):
            # log2(2^^h) = 2^^(h-1) <= 2^^h; predecessor is exact on ints
            match h:
                case THInt(m):
                    return THTow(THInt(m - 1)) if m >= 2 else THInt(1)
                case _:
                    return THTow(h)
    raise TypeError


def _th_exp2_u(t: TH) -> TH:
    """A bound >= 2 ** den(t)."""
    match t:
        case THInt(n):
            if n <= 4096:
                return THInt(1 << n)
            return THTow(THInt(tower_ceil_height(n) + 1))  # 2^n <= 2^^(tc+1)
        case THTow(h):
            return THTow(_th_succ_u(h))  # 2^(2^^h) = 2^^(h+1)
    raise TypeError


def _th_exp2_l(t: TH) -> TH:
    """A bound <= 2 ** den(t)."""
    match t:
        case THInt(n):
            if n <= 4096:
                return THInt(1 << n)
            return THTow(THInt(tower_floor_height(n) + 1))  # 2^n >= 2^^(tf+1)
        case THTow(h):
            match h:
                case THInt(m):
                    return THTow(THInt(m + 1))
                case _:
                    return THTow(h)  # sound: 2^^h <= 2^(2^^h)
    raise TypeError


def _th_mul_u(a: TH, b: TH, budget: int) -> TH:
    match a, b:
        case THInt(x), THInt(y):
            if _bits(x) + _bits(y) <= budget:
                return THInt(x * y)
    if _th_cmp(a, THInt(0)) == 0 or _th_cmp(b, THInt(0)) == 0:
        return THInt(0)
    return _th_exp2_u(_th_add_u(_th_log2_u(a), _th_log2_u(b)))


def _th_tower_height_u(t: TH) -> TH:
    """A bound H with den(t) <= 2^^den(H)."""
    match t:
        case THInt(n):
            return THInt(tower_ceil_height(max(n, 1)))
        case THTow(h):
            return h  # exact
    raise TypeError


def th_upper(e: TowerExpr, budget: int) -> Optional[TH]:
    """Sound upper bound on value(e), or None when no tower form applies."""
    v = eval_exact(e, budget)
    if v is not None:
        return THInt(v)
    match e:
        case Nat(v):
            return THInt(v)
        case Mul(a, b):
            ua, ub = th_upper(a, budget), th_upper(b, budget)
            if ua is None or ub is None:
                return None
            return _th_mul_u(ua, ub, budget)
        case Pow(a, b):
            ua, ub = th_upper(a, budget), th_upper(b, budget)
            if ua is None or ub is None:
                return None
            if _th_cmp(ua, THInt(1)) in (-1, 0):
                return THInt(1)  # 0**b <= 1, 1**b == 1
            return _th_exp2_u(_th_mul_u(_th_log2_u(ua), ub, budget))
        case Arrow(a, 2, h):
            uh = th_upper(h, budget)
            if uh is None:
                return None
            if a == Nat(2):
                return THTow(uh)
            ua = th_upper(a, budget)
            if ua is None:
                return None
            # a <= 2^s with s <= 2^^hs  ==>  a^^h <= 2^^(2h + hs - 1)
            hs = _th_tower_height_u(_th_log2_u(ua))
            return THTow(_th_add_u(_th_dbl_u(uh), hs))
        case Arrow():
            return None  # higher arrows only after normalize() expansion
        case FRec(l, k):
            # f(l, k) < k^^(2l) whenever 2l < k; established separately,
            # so here only budget-evaluable instances (handled above) count.
            return None
    return None


def th_lower(e: TowerExpr, budget: int) -> TH:
    """Sound lower bound on value(e); THInt(0) is the trivial fallback."""
    v = eval_exact(e, budget)
    if v is not None:
        return THInt(v)
    match e:
        case Nat(v):
            return THInt(v)
        case Mul(a, b):
            la, lb = th_lower(a, budget), th_lower(b, budget)
            if isinstance(la, THInt) and isinstance(lb, THInt):
                return THInt(la.n * lb.n)
            # keep the dominant factor; the other is >= 1 when provable
            big, small_e = (la, b) if isinstance(la, THTow) else (lb, a)
            return big if provably_at_least(small_e, 1) else THInt(0)
        case Pow(a, b):
            if not provably_at_least(a, 2):
                return THInt(1) if provably_at_least(a, 1) else THInt(0)
            return _th_exp2_l(th_lower(b, budget))  # a**b >= 2**b
        case Arrow(a, m, h):
            return THTow(_th_lower_pos(th_lower(h, budget)))  # a^(m)h >= 2^^h
        case FRec(l, k):
            return _th_lower_pos(th_lower(k, budget))  # f(l, k) >= k + 1
    return THInt(0)


def _th_lower_pos(t: TH) -> TH:
    if isinstance(t, THInt) and t.n < 1:
        return THInt(1)
    return t


# ---------------------------------------------------------------------------
# Sound order proofs


class Ordering(Enum):
    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"
    UNKNOWN = "Unknown"


_MAX_DEPTH = 48


def exact_log2_expr(e: TowerExpr) -> Optional[TowerExpr]:
    """An expression L with value(e) == 2 ** value(L), when one exists."""
    match e:
        case Nat(v) if v >= 1 and v & (v - 1) == 0:
            return Nat(v.bit_length() - 1)
        case Pow(Nat(b), x) if b >= 2 and b & (b - 1) == 0:
            t = b.bit_length() - 1
            return x if t == 1 else Mul(Nat(t), x)
        case Arrow(Nat(2), 2, Nat(h)):
            return Nat(1) if h == 1 else Arrow(Nat(2), 2, Nat(h - 1))
        case Mul(a, b) if a == b:
            la = exact_log2_expr(a)
            return Mul(Nat(2), la) if la is not None else None
        case Pow(a, b):
            la = exact_log2_expr(a)
            return Mul(la, b) if la is not None else None
    return None


def tower_height_upper_expr(e: TowerExpr) -> Optional[TowerExpr]:
    """An expression H with value(e) <= 2^^value(H), favouring exactness."""
    match e:
        case Arrow(Nat(2), 2, h):
            return h
        case Nat(v) if v >= 1:
            return Nat(tower_ceil_height(v))
        case Pow(Nat(2), x):
            hx = tower_height_upper_expr(x)
            if isinstance(hx, Nat):
                return Nat(hx.value + 1)  # 2^x <= 2^^(hx+1)
    return None


def _flatten_mul(e: TowerExpr, budget: int) -> tuple[int, tuple[TowerExpr, ...]]:
    """Split a product into (integer coefficient, sorted symbolic factors)."""
    coef = 1
    factors: list[TowerExpr] = []
    stack = [e]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Mul):
            stack.append(cur.left)
            stack.append(cur.right)
            continue
        v = eval_exact(cur, budget)
        if v is not None and _bits(coef) + _bits(v) <= budget:
            coef *= v
        else:
            factors.append(cur)
    factors.sort(key=to_sexpr)
    return coef, tuple(factors)


def proves_lt(a: TowerExpr, b: TowerExpr, budget: int = DEFAULT_BIT_BUDGET, depth: int = 0) -> bool:
    """True only when value(a) < value(b) is provable."""
    return _prove(a, b, True, budget, depth)


def proves_le(a: TowerExpr, b: TowerExpr, budget: int = DEFAULT_BIT_BUDGET, depth: int = 0) -> bool:
    """True only when value(a) <= value(b) is provable."""
    return _prove(a, b, False, budget, depth)


def _prove(a: TowerExpr, b: TowerExpr, strict: bool, budget: int, depth: int) -> bool:
    if depth > _MAX_DEPTH:
        return False
    if depth == 0:
        a = normalize(a, budget)
        b = normalize(b, budget)
    if not strict and a == b:
        return True

    va = eval_exact(a, budget)
    vb = eval_exact(b, budget)
    if va is not None and vb is not None:
        return va < vb if strict else va <= vb

    d = depth + 1
    if _prove_eval_vs_bound(a, b, va, vb, strict, budget):
        return True
    if _prove_structural(a, b, strict, budget, d):
        return True
    if _prove_mul_flatten(a, b, strict, budget, d):
        return True
    if _prove_frec(a, b, strict, budget, d):
        return True
    if _prove_tower_absorb(a, b, strict, budget, d):
        return True

    la, lb = exact_log2_expr(a), exact_log2_expr(b)
    if la is not None and lb is not None:
        if _prove(normalize(la, budget), normalize(lb, budget), strict, budget, d):
            return True

    ua = th_upper(a, budget)
    if ua is not None:
        c = _th_cmp(ua, th_lower(b, budget))
        if c == -1 or (c == 0 and not strict):
            return True
    return False


def _prove_eval_vs_bound(
    a: TowerExpr, b: TowerExpr, va: Optional[int], vb: Optional[int], strict: bool, budget: int
) -> bool:
    if va is not None:
        c = _th_cmp(THInt(va), th_lower(b, budget))
        if c == -1 or (c == 0 and not strict):
            return True
    if vb is not None:
        ua = th_upper(a, budget)
        if ua is not None:
            c = _th_cmp(ua, THInt(vb))
            if c == -1 or (c == 0 and not strict):
                return True
    return False


def _prove_structural(a: TowerExpr, b: TowerExpr, strict: bool, budget: int, d: int) -> bool:
    match a, b:
        case Arrow(ba, ma, ha), Arrow(bb, mb, hb) if ma == mb:
            le_base = _prove(ba, bb, False, budget, d)
            le_h = _prove(ha, hb, False, budget, d)
            if not (le_base and le_h):
                return False
            if not strict:
                return True
            # strict in either argument (base >= 2 and height >= 1 hold by
            # construction) keeps the whole tower strict
            return _prove(ba, bb, True, budget, d) or _prove(ha, hb, True, budget, d)
        case Pow(ba, ea), Pow(bb, eb):
            if not (_prove(ba, bb, False, budget, d) and _prove(ea, eb, False, budget, d)):
                return False
            if not strict:
                return True
            if _prove(ba, bb, True, budget, d) and provably_at_least(ea, 1):
                return True
            return _prove(ea, eb, True, budget, d) and provably_at_least(ba, 2)
    return False


def _prove_mul_flatten(a: TowerExpr, b: TowerExpr, strict: bool, budget: int, d: int) -> bool:
    if not (isinstance(a, Mul) or isinstance(b, Mul)):
        return False
    ca, fa = _flatten_mul(a, budget)
    cb, fb = _flatten_mul(b, budget)
    if fa == fb:
        if ca < cb:
            return all(provably_at_least(f, 1) for f in fa) if strict else True
        return ca == cb and not strict
    # lhs factors a sub-multiset of rhs factors: extras are each >= 2 or >= 1
    rest = list(fb)
    for f in fa:
        if f in rest:
            rest.remove(f)
        else:
            return False
    extra_min = 1
    for f in rest:
        if not provably_at_least(f, 1):
            return False
        extra_min *= 2 if provably_at_least(f, 2) else 1
        extra_min = min(extra_min, 1 << 62)
    if ca < cb * extra_min:
        return all(provably_at_least(f, 1) for f in fa) if strict else True
    return ca <= cb * extra_min and not strict and extra_min == 1


def _prove_frec(a: TowerExpr, b: TowerExpr, strict: bool, budget: int, d: int) -> bool:
    # f(l, k) < k^^(2l) whenever 2l < k; and f(l, k) > k always.
    if isinstance(a, FRec):
        twol = normalize(Mul(Nat(2), a.level), budget)
        if _prove(twol, a.arg, True, budget, d):
            cap = Arrow(a.arg, 2, twol)
            if _prove(cap, b, False, budget, d):
                return True  # a < cap <= b, strict either way
    if isinstance(b, FRec):
        # a <= k  ==>  a < k + 1 <= f(l, k)
        if _prove(a, b.arg, False, budget, d):
            return True
    return False


def _prove_tower_absorb(a: TowerExpr, b: TowerExpr, strict: bool, budget: int, d: int) -> bool:
    if not (isinstance(b, Arrow) and b.base == Nat(2) and b.arrows == 2):
        return False
    big_h = b.height
    match a:
        case Arrow(base, 2, h):
            s = tower_height_upper_expr(base)
            if s is not None:
                # a <= (2^^s)^^h < 2^^(s*h + 1); s*h < H closes it strictly
                prod = normalize(Mul(s, h), budget)
                if _prove(prod, big_h, True, budget, d):
                    return True
        case Mul():
            # c * 2^^m <= 2^^(m+1) <= 2^^H when c <= 2^^m and m+1 <= H;
            # strict when c < 2^^m.  The multiplier may itself be symbolic.
            ca, fa = _flatten_mul(a, budget)
            for i, inner in enumerate(fa):
                if not (isinstance(inner, Arrow) and inner.base == Nat(2) and inner.arrows == 2):
                    continue
                mult: TowerExpr = Nat(ca)
                for j, other in enumerate(fa):
                    if j != i:
                        mult = Mul(mult, other)
                mult = normalize(mult, budget)
                if _prove(mult, inner, strict, budget, d):
                    if _prove(inner.height, big_h, True, budget, d):
                        return True
    return False


def compare(a: TowerExpr, b: TowerExpr, bit_budget: int = DEFAULT_BIT_BUDGET) -> Ordering:
    """Sound three-way comparison; UNKNOWN when no proof is found."""
    na = normalize(a, bit_budget)
    nb = normalize(b, bit_budget)
    va = eval_exact(na, bit_budget)
    vb = eval_exact(nb, bit_budget)
    if va is not None and vb is not None:
        if va < vb:
            return Ordering.LESS
        if va > vb:
            return Ordering.GREATER
        return Ordering.EQUAL
    if na == nb:
        return Ordering.EQUAL
    if proves_lt(na, nb, bit_budget):
        return Ordering.LESS
    if proves_lt(nb, na, bit_budget):
        return Ordering.GREATER
    if proves_le(na, nb, bit_budget) and proves_le(nb, na, bit_budget):
        return Ordering.EQUAL
    return Ordering.UNKNOWN
