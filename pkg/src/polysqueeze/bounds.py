"""Interval bounds for the polydisk squeezing function T and ball squeezing function S.

Each known result is a *rule*: given a domain and a point it either produces an
interval for T or S, or declines. :func:`evaluate` intersects every applicable
rule, then runs the two comparison transfers (T >= S/sqrt(n), S >= T/sqrt(n))
to a fixed point. The resulting :class:`BoundInterval` records which rules
pinned its endpoints.

Rule catalogue (``RuleId`` -> statement):

================  ==============================================================
EXACT_POLYDISK    T = 1 and S = 1/sqrt(n) on any polydisk
EXACT_BALL        T = 1/sqrt(n) and S = 1 on the ball (and CartanI(1, s))
PUNCTURED_BALL_T  T(z) = |z| on the punctured ball when |z| <= 1/sqrt(n)
PUNCTURED_BALL_S  S(z) = |z| on the punctured ball
LEMMA_RELATE_A    T >= S / sqrt(n)
LEMMA_RELATE_B    S >= T / sqrt(n)
ALEXANDER_UPPER   T <= 1/sqrt(n) for the ball minus finitely many points
EXTENSION_UPPER   T(z) <= tanh(K(z, A) / 2) when finitely many points A are removed
CARTAN_T          1/sqrt(n m) <= T <= 1/sqrt(m) on a Cartan domain with m directions
CARTAN_S          S = 1/sqrt(m) on a Cartan domain
PRODUCT_S_LOWER   S >= (sum_i S_i^-2)^(-1/2) on a product
PRODUCT_T_LOWER   T >= min_i T_i on a product
CARTAN_PRODUCT    S = s(D) := (sum_i s(R_i)^-2)^(-1/2), s(D)/sqrt(n) <= T <= s(D)
TRIVIAL_RANGE     0 <= T, S <= 1
================  ==============================================================

Punctured-ball rules accept a single puncture anywhere in the ball; the value
|z| is then read as |phi_p(z)|, with phi_p the automorphism swapping p and 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Literal

import numpy as np

from . import domains as dm
from . import metrics
from .domains import Ball, Domain, Polydisk, Product, Puncture
from .errors import ContractViolation, InconsistencyError
from .maps import ball_automorphism

Quantity = Literal["T", "S"]

# Slack allowed when deciding two endpoints are in conflict.
INTERSECT_TOL = 1e-12
# Fixed-point iteration stops once no endpoint moves by more than this.
FIXED_POINT_TOL = 1e-15
MAX_PASSES = 4


class RuleId(str, enum.Enum):
    EXACT_POLYDISK = "EXACT_POLYDISK"
    EXACT_BALL = "EXACT_BALL"
    PUNCTURED_BALL_T = "PUNCTURED_BALL_T"
    PUNCTURED_BALL_S = "PUNCTURED_BALL_S"
    LEMMA_RELATE_A = "LEMMA_RELATE_A"
    LEMMA_RELATE_B = "LEMMA_RELATE_B"
    ALEXANDER_UPPER = "ALEXANDER_UPPER"
    EXTENSION_UPPER = "EXTENSION_UPPER"
    CARTAN_T = "CARTAN_T"
    CARTAN_S = "CARTAN_S"
    PRODUCT_S_LOWER = "PRODUCT_S_LOWER"
    PRODUCT_T_LOWER = "PRODUCT_T_LOWER"
    CARTAN_PRODUCT = "CARTAN_PRODUCT"
    TRIVIAL_RANGE = "TRIVIAL_RANGE"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BoundInterval:
    lower: float
    upper: float
    provenance: tuple[RuleId, ...]

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(f"invalid bound interval [{self.lower}, {self.upper}]")
        if not self.provenance:
            raise ValueError("a bound interval needs at least one rule in its provenance")

    @property
    def exact(self) -> bool:
        return self.upper == self.lower

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact,
                "provenance": [str(r) for r in self.provenance]}


def _iv(lo: float, hi: float, rule: RuleId) -> BoundInterval:
    return BoundInterval(min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0), (rule,))


def inv_sqrt(n: float) -> float:
    return 1.0 / math.sqrt(n)


def intersect(intervals: Iterable[BoundInterval]) -> BoundInterval:
    """[max lower, min upper]; provenance lists every interval touching a final endpoint."""
    ivs = list(intervals)
    if not ivs:
        raise ContractViolation("intersect needs at least one interval")
    lo = max(iv.lower for iv in ivs)
    hi = min(iv.upper for iv in ivs)
    if lo > hi + INTERSECT_TOL:
        lows = [str(r) for iv in ivs if iv.lower == lo for r in iv.provenance]
        highs = [str(r) for iv in ivs if iv.upper == hi for r in iv.provenance]
        raise InconsistencyError(f"lower bound {lo!r} from {lows} exceeds upper bound {hi!r} from {highs}")
    if abs(hi - lo) <= INTERSECT_TOL:
        # The two endpoints are the same number up to rounding.
        hi = lo
    prov: list[RuleId] = []
    for pinned in ([iv for iv in ivs if abs(iv.lower - lo) <= INTERSECT_TOL],
                   [iv for iv in ivs if abs(iv.upper - hi) <= INTERSECT_TOL]):
        # The trivial range only counts when nothing else pins the endpoint.
        real = [iv for iv in pinned if iv.provenance != (RuleId.TRIVIAL_RANGE,)] or pinned
        for iv in real:
            for r in iv.provenance:
                if r not in prov:
                    prov.append(r)
    return BoundInterval(lo, hi, tuple(prov))


# -- individual rules ---------------------------------------------------------


def _single_puncture_radius(d: Domain, z: np.ndarray) -> float | None:
    """|phi_p(z)| for a ball with one puncture p, else None."""
    if not (isinstance(d, Puncture) and isinstance(d.ambient, Ball) and len(d.points) == 1):
        return None
    p = d.point_array()[0]
    if not np.any(p):
        return float(np.linalg.norm(z))
    return float(np.linalg.norm(ball_automorphism(p).forward(z)))


def _exact_region(rho: float, n: int) -> bool:
    # Closed region; the boundary |z| = 1/sqrt(n) counts as exact.
    return rho <= inv_sqrt(n) * (1.0 + 4 * np.finfo(float).eps)


def _cartan_s(d: Domain) -> float | None:
    """Ball squeezing constant s(R) of an irreducible factor, or None if unknown."""
    if isinstance(d, Ball):
        return 1.0
    if isinstance(d, dm.CARTAN_TYPES):
        m = dm.polydisk_direction_count(d)
        if m > dm.dimension(d):
            return None
        return inv_sqrt(m)
    return None


def _flat_factors(d: Product) -> list[Domain]:
    out: list[Domain] = []
    for f in d.factors:
        out.extend(_flat_factors(f) if isinstance(f, Product) else [f])
    return out


def _rule_exact_polydisk(d, z, q, other):
    if not isinstance(d, Polydisk):
        return None
    v = 1.0 if q == "T" else inv_sqrt(d.n)
    return _iv(v, v, RuleId.EXACT_POLYDISK)


def _rule_exact_ball(d, z, q, other):
    if not dm.is_ball_like(d):
        return None
    v = inv_sqrt(dm.dimension(d)) if q == "T" else 1.0
    return _iv(v, v, RuleId.EXACT_BALL)


def _rule_punctured_t(d, z, q, other):
    if q != "T":
        return None
    rho = _single_puncture_radius(d, z)
    if rho is None or not _exact_region(rho, dm.dimension(d)):
        return None
    return _iv(rho, rho, RuleId.PUNCTURED_BALL_T)


def _rule_punctured_s(d, z, q, other):
    if q != "S":
        return None
    rho = _single_puncture_radius(d, z)
    if rho is None:
        return None
    return _iv(rho, rho, RuleId.PUNCTURED_BALL_S)


def _rule_relate_a(d, z, q, other):
    if q != "T" or other is None or other.lower == 0.0:
        return None
    return _iv(other.lower * inv_sqrt(dm.dimension(d)), 1.0, RuleId.LEMMA_RELATE_A)


def _rule_relate_b(d, z, q, other):
    if q != "S" or other is None or other.lower == 0.0:
        return None
    return _iv(other.lower * inv_sqrt(dm.dimension(d)), 1.0, RuleId.LEMMA_RELATE_B)


def _rule_alexander(d, z, q, other):
    if q != "T" or not (isinstance(d, Puncture) and isinstance(d.ambient, Ball)):
        return None
    return _iv(0.0, inv_sqrt(d.ambient.n), RuleId.ALEXANDER_UPPER)


def _rule_extension(d, z, q, other):
    if q != "T" or not isinstance(d, Puncture) or not metrics.is_supported(d.ambient):
        return None
    k = metrics.kobayashi_to_set(d.ambient, z, list(d.point_array()))
    return _iv(0.0, metrics.sigma_inv(k), RuleId.EXTENSION_UPPER)


def _rule_cartan_t(d, z, q, other):
    if q != "T" or not isinstance(d, dm.CARTAN_TYPES):
        return None
    n, m = dm.dimension(d), dm.polydisk_direction_count(d)
    if m > n:
        return None
    return _iv(1.0 / (math.sqrt(n) * math.sqrt(m)), inv_sqrt(m), RuleId.CARTAN_T)


def _rule_cartan_s(d, z, q, other):
    if q != "S" or not isinstance(d, dm.CARTAN_TYPES):
        return None
    s = _cartan_s(d)
    return None if s is None else _iv(s, s, RuleId.CARTAN_S)


def _rule_product_s(d, z, q, other):
    if q != "S" or not isinstance(d, Product):
        return None
    lows = [evaluate_S(f, b).lower for f, b in zip(d.factors, dm.split(d, z))]
    if min(lows) == 0.0:
        return _iv(0.0, 1.0, RuleId.PRODUCT_S_LOWER)
    return _iv(sum(s ** -2 for s in lows) ** -0.5, 1.0, RuleId.PRODUCT_S_LOWER)


def _rule_product_t(d, z, q, other):
    if q != "T" or not isinstance(d, Product):
        return None
    lows = [evaluate_T(f, b).lower for f, b in zip(d.factors, dm.split(d, z))]
    return _iv(min(lows), 1.0, RuleId.PRODUCT_T_LOWER)


def _rule_cartan_product(d, z, q, other):
    if not isinstance(d, Product):
        return None
    svals = [_cartan_s(f) for f in _flat_factors(d)]
    if any(s is None for s in svals):
        return None
    s_d = sum(s ** -2 for s in svals) ** -0.5
    if q == "S":
        return _iv(s_d, s_d, RuleId.CARTAN_PRODUCT)
    return _iv(s_d * inv_sqrt(dm.dimension(d)), s_d, RuleId.CARTAN_PRODUCT)


def _rule_trivial(d, z, q, other):
    return _iv(0.0, 1.0, RuleId.TRIVIAL_RANGE)


RuleFn = Callable[[Domain, np.ndarray, Quantity, "BoundInterval | None"], "BoundInterval | None"]

RULES: dict[RuleId, RuleFn] = {
    RuleId.TRIVIAL_RANGE: _rule_trivial,
    RuleId.EXACT_POLYDISK: _rule_exact_polydisk,
    RuleId.EXACT_BALL: _rule_exact_ball,
    RuleId.PUNCTURED_BALL_T: _rule_punctured_t,
    RuleId.PUNCTURED_BALL_S: _rule_punctured_s,
    RuleId.ALEXANDER_UPPER: _rule_alexander,
    RuleId.EXTENSION_UPPER: _rule_extension,
    RuleId.CARTAN_T: _rule_cartan_t,
    RuleId.CARTAN_S: _rule_cartan_s,
    RuleId.PRODUCT_S_LOWER: _rule_product_s,
    RuleId.PRODUCT_T_LOWER: _rule_product_t,
    RuleId.CARTAN_PRODUCT: _rule_cartan_product,
    # Transfers last: they read the other quantity's current interval.
    RuleId.LEMMA_RELATE_A: _rule_relate_a,
    RuleId.LEMMA_RELATE_B: _rule_relate_b,
}
TRANSFERS = (RuleId.LEMMA_RELATE_A, RuleId.LEMMA_RELATE_B)


def apply_rule(rule: RuleId, d: Domain, z, quantity: Quantity = "T",
               other: BoundInterval | None = None) -> BoundInterval | None:
    """Interval for ``quantity`` produced by ``rule``, or None when it does not apply.

    ``other`` is the current interval of the opposite quantity; only the two
    transfer rules read it.
    """
    z = dm.as_point(d, z)
    return RULES[RuleId(rule)](d, z, quantity, other)


@dataclass(frozen=True)
class Evaluation:
    T: BoundInterval
    S: BoundInterval
    passes: int


def _optional(iv: BoundInterval | None) -> list[BoundInterval]:
    return [] if iv is None else [iv]


def evaluate(d: Domain, z) -> Evaluation:
    z = dm.as_point(d, z)
    if not dm.contains(d, z):
        raise ContractViolation("point is not in the domain")
    direct: dict[str, list[BoundInterval]] = {"T": [], "S": []}
    for rule, fn in RULES.items():
        if rule in TRANSFERS:
            continue
        for q in ("T", "S"):
            iv = fn(d, z, q, None)
            if iv is not None:
                direct[q].append(iv)
    t_iv, s_iv = intersect(direct["T"]), intersect(direct["S"])
    for passes in range(1, MAX_PASSES + 1):
        t_new = intersect(direct["T"] + _optional(_rule_relate_a(d, z, "T", s_iv)))
        s_new = intersect(direct["S"] + _optional(_rule_relate_b(d, z, "S", t_iv)))
        moved = max(abs(t_new.lower - t_iv.lower), abs(t_new.upper - t_iv.upper),
                    abs(s_new.lower - s_iv.lower), abs(s_new.upper - s_iv.upper))
        t_iv, s_iv = t_new, s_new
        if moved <= FIXED_POINT_TOL:
            return Evaluation(t_iv, s_iv, passes)
    raise InconsistencyError(f"transfer rules did not settle within {MAX_PASSES} passes")


def evaluate_T(d: Domain, z) -> BoundInterval:
    return evaluate(d, z).T


def evaluate_S(d: Domain, z) -> BoundInterval:
    return evaluate(d, z).S


@dataclass(frozen=True)
class EqualityFlags:
    applicable: bool
    relateA_equality: bool | None = None
    relateB_equality: bool | None = None

    def to_dict(self) -> dict:
        return {"applicable": self.applicable, "relateA_equality": self.relateA_equality,
                "relateB_equality": self.relateB_equality}


def equality_flags(d: Domain, z, evaluation: Evaluation | None = None, tol: float = 1e-12) -> EqualityFlags:
    """Which comparison inequality is attained: T = S/sqrt(n) (A) and/or S = T/sqrt(n) (B).

    Only meaningful when both T and S are known exactly; otherwise
    ``applicable`` is False.
    """
    ev = evaluation if evaluation is not None else evaluate(d, z)
    if not (ev.T.exact and ev.S.exact):
        return EqualityFlags(False)
    root_n = math.sqrt(dm.dimension(d))
    t, s = ev.T.lower, ev.S.lower
    return EqualityFlags(True, abs(t - s / root_n) <= tol, abs(s - t / root_n) <= tol)
