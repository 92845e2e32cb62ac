"""
Exact admissibility predicates for Bessel potential space pairs
Every inequality is decided in rational arithmetic; infinity is a symbol, never a float
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Dict, Optional, Tuple

from utils import DomainError, ValueParser

SATISFIED_STRICT = "satisfied-strict"
SATISFIED_EQUALITY = "satisfied-equality"
VIOLATED = "violated"

DUAL_EXPONENT = "dual-exponent"
U_WINDOW = "u-window"
V_WINDOW = "v-window"
SUM_CONDITION = "sum-condition"

_parser = ValueParser()


def format_rational(value):
    """Render a Fraction as "num/den" """
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text, allow_decimal=False):
    """Parse "num/den" or an integer exactly; decimals only when allowed"""
    return _parser.parse_rational(text, allow_decimal=allow_decimal)


def _exact(value, name):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"{name} must be rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise DomainError(f"{name} must be an exact rational, got {value!r}")


@total_ordering
@dataclass(frozen=True)
class Exponent:
    """Lebesgue exponent: a rational >= 1, or infinity when value is None"""

    value: Optional[Fraction] = None

    def __post_init__(self):
        if self.value is None:
            return
        value = _exact(self.value, "exponent")
        if value < 1:
            raise DomainError(f"exponent must be >= 1, got {format_rational(value)}")
        object.__setattr__(self, "value", value)

    @classmethod
    def infinity(cls):
        return cls(None)

    @classmethod
    def parse(cls, text):
        """Parse "inf", an integer or "num/den"; decimals are rejected"""
        if _parser.is_infinity(text):
            return cls.infinity()
        return cls(parse_rational(text))

    @classmethod
    def of(cls, value):
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, float):
            if math.isinf(value) and value > 0:
                return cls.infinity()
            raise DomainError(f"exponent must be exact, got float {value!r}")
        return cls(value)

    @property
    def is_infinite(self):
        return self.value is None

    @property
    def reciprocal(self):
        """1/p, with 1/inf = 0"""
        return Fraction(0) if self.value is None else 1 / self.value

    def conjugate(self):
        """Hölder conjugate p' with 1/p + 1/p' = 1"""
        if self.value is None:
            return Exponent(Fraction(1))
        if self.value == 1:
            return Exponent.infinity()
        return Exponent(self.value / (self.value - 1))

    def is_interior(self):
        """True for p in the open range (1, inf)"""
        return self.value is not None and self.value > 1

    def __float__(self):
        return math.inf if self.value is None else float(self.value)

    def __str__(self):
        return "inf" if self.value is None else format_rational(self.value)

    def __lt__(self, other):
        if not isinstance(other, Exponent):
            return NotImplemented
        return self.reciprocal > other.reciprocal


INF = Exponent.infinity()
ONE = Exponent(Fraction(1))


def holder_conjugate(p):
    return Exponent.of(p).conjugate()


@dataclass(frozen=True)
class PairQuery:
    """Parameters (d, u, p, v, q, s) for H^{u,p} paired with H^{v,q} under K_s"""

    d: int
    u: Fraction
    p: Exponent
    v: Fraction
    q: Exponent
    s: Fraction

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        for name in ("u", "v", "s"):
            value = _exact(getattr(self, name), name)
            if value <= 0:
                raise DomainError(f"{name} must be positive, got {format_rational(value)}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "p", Exponent.of(self.p))
        object.__setattr__(self, "q", Exponent.of(self.q))

    def swapped(self):
        return PairQuery(self.d, self.v, self.q, self.u, self.p, self.s)

    def to_dict(self):
        return {
            "d": self.d,
            "u": format_rational(self.u),
            "p": str(self.p),
            "v": format_rational(self.v),
            "q": str(self.q),
            "s": format_rational(self.s),
        }


@dataclass(frozen=True)
class ConditionResult:
    """One evaluated inequality of a verdict"""

    condition: str
    status: str
    expression: str
    terms: Dict[str, Fraction] = field(default_factory=dict)
    strict_required: bool = False
    detail: str = ""

    @property
    def satisfied(self):
        if self.status == VIOLATED:
            return False
        return not (self.status == SATISFIED_EQUALITY and self.strict_required)

    def to_dict(self):
        return {
            "id": self.condition,
            "status": self.status,
            "satisfied": self.satisfied,
            "strict_required": self.strict_required,
            "expression": self.expression,
            "terms": {name: format_rational(value) for name, value in self.terms.items()},
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            condition=data["id"],
            status=data["status"],
            expression=data["expression"],
            terms={name: parse_rational(value) for name, value in data["terms"].items()},
            strict_required=data["strict_required"],
            detail=data.get("detail", ""),
        )


@dataclass(frozen=True)
class Verdict:
    """All conditions of a check and the resulting decision"""

    admissible: bool
    conditions: Tuple[ConditionResult, ...]
    parameters: Dict[str, object] = field(default_factory=dict)
    endpoint_case: bool = False

    @property
    def failed(self):
        return [c.condition for c in self.conditions if not c.satisfied]

    def condition(self, condition_id):
        for result in self.conditions:
            if result.condition == condition_id:
                return result
        raise KeyError(condition_id)

    def to_dict(self):
        return {
            "admissible": self.admissible,
            "endpoint_case": self.endpoint_case,
            "failed": self.failed,
            "parameters": dict(self.parameters),
            "conditions": [c.to_dict() for c in self.conditions],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            admissible=data["admissible"],
            conditions=tuple(ConditionResult.from_dict(c) for c in data["conditions"]),
            parameters=dict(data["parameters"]),
            endpoint_case=data["endpoint_case"],
        )


def _verdict(conditions, parameters, endpoint_case=False):
    conditions = tuple(conditions)
    return Verdict(
        admissible=all(c.satisfied for c in conditions),
        conditions=conditions,
        parameters=parameters,
        endpoint_case=endpoint_case,
    )


def _at_least(lhs, rhs):
    if lhs > rhs:
        return SATISFIED_STRICT
    if lhs == rhs:
        return SATISFIED_EQUALITY
    return VIOLATED


def _dual_condition(rp, rq, label="1/p + 1/q"):
    lhs = rp + rq
    return ConditionResult(
        condition=DUAL_EXPONENT,
        status=_at_least(lhs, Fraction(1)),
        expression=f"{label} = {format_rational(lhs)} >= 1",
        terms={"lhs": lhs, "rhs": Fraction(1)},
    )


def _window_condition(condition_id, name, value, d, r_exponent, s):
    """d/p < value < 2s - d/p'"""
    lower = d * r_exponent
    upper = 2 * s - d * (1 - r_exponent)
    if value < lower or value > upper:
        status = VIOLATED
    elif value == lower or value == upper:
        status = SATISFIED_EQUALITY
    else:
        status = SATISFIED_STRICT

    detail = ""
    if value <= lower:
        detail = f"{name} must exceed d/p = {format_rational(lower)}"
    elif value >= upper:
        detail = f"{name} must stay below 2s - d/p' = {format_rational(upper)}"
    return ConditionResult(
        condition=condition_id,
        status=status,
        expression=(f"{format_rational(lower)} < {name} = {format_rational(value)}"
                    f" < {format_rational(upper)}"),
        terms={"lower": lower, "value": value, "upper": upper},
        strict_required=True,
        detail=detail,
    )


def _sum_condition(lhs, rhs, strict_required, label):
    status = _at_least(lhs, rhs)
    detail = ""
    if status == SATISFIED_EQUALITY and strict_required:
        detail = "equality holds but strictness is required since min(p,q) = 1 and max(p,q) < inf"
    elif status == VIOLATED:
        detail = f"{format_rational(lhs)} < {format_rational(rhs)}"
    return ConditionResult(
        condition=SUM_CONDITION,
        status=status,
        expression=f"{label} = {format_rational(lhs)} >= {format_rational(rhs)}",
        terms={"lhs": lhs, "rhs": rhs},
        strict_required=strict_required,
        detail=detail,
    )


def _strict_sum_required(p, q):
    return min(p, q) == ONE and not max(p, q).is_infinite


def _as_query(query, u, p, v, q, s):
    if isinstance(query, PairQuery):
        return query
    return PairQuery(query, u, p, v, q, s)


def rkbs_pair_check(query, u=None, p=None, v=None, q=None, s=None):
    """
    Decide whether H^{u,p} and H^{v,q} form an RKBS pair with kernel K_s

    Args:
        query (PairQuery or int): A query, or the dimension d followed by u, p, v, q, s

    Returns:
        Verdict: Four conditions, always all of them
    """
    query = _as_query(query, u, p, v, q, s)
    d, rp, rq = query.d, query.p.reciprocal, query.q.reciprocal
    conditions = [
        _dual_condition(rp, rq),
        _window_condition(U_WINDOW, "u", query.u, d, rp, query.s),
        _window_condition(V_WINDOW, "v", query.v, d, rq, query.s),
        _sum_condition(query.u + query.v, 2 * query.s + d * (rp + rq - 1),
                       _strict_sum_required(query.p, query.q), "u + v"),
    ]
    endpoint = query.p.is_infinite or query.q.is_infinite
    return _verdict(conditions, query.to_dict(), endpoint_case=endpoint)


def rkbs_space_check(d, s, p):
    """H^{s,p}(R^d) is an RKBS iff s > d/p"""
    return _exact(s, "s") > int(d) * Exponent.of(p).reciprocal


def integrability_check(d, s, p):
    """G_s lies in L^{p'}(R^d) iff s > d/p"""
    return _exact(s, "s") > int(d) * Exponent.of(p).reciprocal


@dataclass(frozen=True)
class KernelInterval:
    """Admissible kernel orders: lower < s <= upper (s < upper when upper_strict)"""

    lower: Fraction
    upper: Fraction
    upper_strict: bool
    empty: bool
    reasons: Tuple[str, ...] = ()

    def contains(self, s):
        s = _exact(s, "s")
        if self.empty or s <= self.lower:
            return False
        return s < self.upper or (s == self.upper and not self.upper_strict)

    def to_dict(self):
        return {
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "lower_strict": True,
            "upper_strict": self.upper_strict,
            "empty": self.empty,
            "reasons": list(self.reasons),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            lower=parse_rational(data["lower"]),
            upper=parse_rational(data["upper"]),
            upper_strict=data["upper_strict"],
            empty=data["empty"],
            reasons=tuple(data.get("reasons", ())),
        )

    def __str__(self):
        if self.empty:
            return "empty"
        closing = ")" if self.upper_strict else "]"
        return f"({format_rational(self.lower)}, {format_rational(self.upper)}{closing}"


def kernel_interval(d, u, v, p, q):
    """
    The orders s for which (H^{u,p}, H^{v,q}) is an RKBS pair with kernel K_s

    The interval is marked empty as well when an s-independent condition
    fails, so membership always agrees with rkbs_pair_check.

    Args:
        d (int): Dimension
        u, v (Fraction): Smoothness of the two spaces
        p, q (Exponent): Integrability of the two spaces

    Returns:
        KernelInterval: Bounds, strictness and the reasons for emptiness
    """
    u, v = _exact(u, "u"), _exact(v, "v")
    p, q = Exponent.of(p), Exponent.of(q)
    d = int(d)
    rp, rq = p.reciprocal, q.reciprocal

    lower = max(u + d * (1 - rp), v + d * (1 - rq)) / 2
    upper = (u + v - d * (rp + rq - 1)) / 2
    upper_strict = _strict_sum_required(p, q)

    reasons = []
    if rp + rq < 1:
        reasons.append("1/p + 1/q < 1")
    if u <= d * rp:
        reasons.append("u <= d/p")
    if v <= d * rq:
        reasons.append("v <= d/q")
    if lower >= upper:
        reasons.append("lower >= upper")
    return KernelInterval(lower, upper, upper_strict, bool(reasons), tuple(reasons))


def self_pair_check(d, u, p, s):
    """
    Decide whether H^{u,p} forms an RKBS pair with itself under K_s

    Returns:
        Verdict: p <= 2, the u-window, and 2u >= 2s + d(2/p - 1) (strict for p = 1)
    """
    d = int(d)
    u, s = _exact(u, "u"), _exact(s, "s")
    p = Exponent.of(p)
    rp = p.reciprocal
    conditions = [
        _dual_condition(rp, rp, label="2/p"),
        _window_condition(U_WINDOW, "u", u, d, rp, s),
        _sum_condition(2 * u, 2 * s + d * (2 * rp - 1), p == ONE, "2u"),
    ]
    parameters = {"d": d, "u": format_rational(u), "p": str(p), "s": format_rational(s)}
    return _verdict(conditions, parameters)


def self_pair_interval(d, u, p):
    """u/2 + d/(2p') < s <= u - d(1/p - 1/2), upper strict for p = 1"""
    return kernel_interval(d, u, u, p, p)


def norming_check(d, u, v, s, p, q):
    """
    Norming pair test: p = q', u + v = 2s and the pair is admissible

    Returns:
        bool or None: None when p or q lies outside (1, inf)
    """
    p, q = Exponent.of(p), Exponent.of(q)
    if not (p.is_interior() and q.is_interior()):
        return None
    u, v, s = _exact(u, "u"), _exact(v, "v"), _exact(s, "s")
    if q != p.conjugate() or u + v != 2 * s:
        return False
    return rkbs_pair_check(d, u, p, v, q, s).admissible


def norming_partner(d, u, p, s):
    """
    Complete (u, p, s) to the unique norming pair (v, q) = (2s - u, p')

    Returns:
        tuple or None: (v, q), or None when no admissible partner exists
    """
    p = Exponent.of(p)
    if not p.is_interior():
        return None
    u, s = _exact(u, "u"), _exact(s, "s")
    v = 2 * s - u
    if v <= 0:
        return None
    q = p.conjugate()
    if not rkbs_pair_check(d, u, p, v, q, s).admissible:
        return None
    return v, q


def norming_kernel(d, u, p, v, q):
    """
    The unique s = (u + v)/2 making (H^{u,p}, H^{v,q}) a norming pair

    Returns:
        Fraction or None: None when q != p' or the pair is not admissible
    """
    p, q = Exponent.of(p), Exponent.of(q)
    if not (p.is_interior() and q.is_interior()) or q != p.conjugate():
        return None
    u, v = _exact(u, "u"), _exact(v, "v")
    s = (u + v) / 2
    if not rkbs_pair_check(d, u, p, v, q, s).admissible:
        return None
    return s


def embedding_check(d, u, v, p, q):
    """
    H^{u,p} embeds continuously in H^{v,q} iff p <= q and u - d/p >= v - d/q

    Returns:
        bool or None: None for endpoint exponents
    """
    p, q = Exponent.of(p), Exponent.of(q)
    if not (p.is_interior() and q.is_interior()):
        return None
    d = int(d)
    u, v = _exact(u, "u"), _exact(v, "v")
    return p <= q and u - d * p.reciprocal >= v - d * q.reciprocal


def sequence_pair_check(p, q):
    """ℓ^p and ℓ^q form an RKBS pair with kernel K_N iff 1/p + 1/q >= 1"""
    return Exponent.of(p).reciprocal + Exponent.of(q).reciprocal >= 1


def sequence_norming_check(p, q):
    return Exponent.of(q) == Exponent.of(p).conjugate()


def sequence_self_pair_check(p):
    return Exponent.of(p) <= Exponent(2)


@dataclass(frozen=True)
class SpaceParams:
    """A single Bessel potential space H^{s,p}(R^d)"""

    d: int
    s: Fraction
    p: Exponent

    def __post_init__(self):
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "s", _exact(self.s, "s"))
        object.__setattr__(self, "p", Exponent.of(self.p))

    def is_rkbs(self):
        return self.s > self.d * self.p.reciprocal

    def dual(self):
        """(H^{s,p})* = H^{-s,p'}; None for p = inf"""
        if self.p.is_infinite:
            return None
        return SpaceParams(self.d, -self.s, self.p.conjugate())

    def to_dict(self):
        return {"d": self.d, "s": format_rational(self.s), "p": str(self.p)}


def random_query(rng, max_dimension=3, max_denominator=4, max_value=6):
    """
    Draw a PairQuery with small rational entries

    Args:
        rng: A random.Random or numpy Generator exposing integers/randint
        max_dimension (int): Largest dimension drawn
        max_denominator (int): Largest denominator of u, v, s and exponents
        max_value (int): Upper bound for u, v, s

    Returns:
        PairQuery: The query
    """
    def draw(low, high):
        if hasattr(rng, "integers"):
            return int(rng.integers(low, high + 1))
        return rng.randint(low, high)

    def positive_rational():
        denominator = draw(1, max_denominator)
        return Fraction(draw(1, max_value * denominator), denominator)

    def exponent():
        if draw(0, 5) == 0:
            return INF
        denominator = draw(1, max_denominator)
        return Exponent(Fraction(draw(denominator, 4 * denominator), denominator))

    return PairQuery(draw(1, max_dimension), positive_rational(), exponent(),
                     positive_rational(), exponent(), positive_rational())


def condition_table(verdict):
    """Rows (id, status, expression) for human display"""
    rows = []
    for result in verdict.conditions:
        status = result.status
        if not result.satisfied and status == SATISFIED_EQUALITY:
            status += " (strict required)"
        rows.append((result.condition, status, result.expression))
    return rows


def parse_query(values):
    """
    Build a PairQuery from text values

    Args:
        values (dict): Text keyed d, u, p, v, q, s

    Returns:
        PairQuery: The parsed query
    """
    return PairQuery(
        parse_rational(values["d"]),
        parse_rational(values["u"]),
        Exponent.parse(values["p"]),
        parse_rational(values["v"]),
        Exponent.parse(values["q"]),
        parse_rational(values["s"]),
    )
