"""Kobayashi distances on the disk, polydisk, ball and their products.

Normalisation: K_D(0, x) = sigma(x) = log((1 + x) / (1 - x)), i.e. twice the
usual hyperbolic distance, so that ``sigma_inv(K)`` is again a radius.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import domains as dm
from .domains import Ball, Domain, Polydisk, Product
from .errors import ContractViolation, RangeError, UnsupportedDomainError
from .maps import ball_automorphism

_BELOW_ONE = math.nextafter(1.0, 0.0)


def sigma(x: float) -> float:
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise RangeError(f"sigma is defined on [0, 1), got {x}")
    if x < 0.5:
        return 2.0 * math.atanh(x)
    return math.log((1.0 + x) / (1.0 - x))


def sigma_inv(y: float) -> float:
    y = float(y)
    if not y >= 0.0:
        raise RangeError(f"sigma_inv is defined on [0, inf), got {y}")
    # tanh rounds to 1.0 for y/2 > ~19; stay inside [0, 1).
    return min(math.tanh(0.5 * y), _BELOW_ONE)


def _sigma_parts(t: float, q: float) -> float:
    """sigma(t) given t and q = 1 - t^2 computed independently.

    Near the boundary 1 - t loses all precision, while q (a ratio of products)
    does not; log((1+t)/(1-t)) = 2 log(1+t) - log(q).
    """
    if t < 0.5:
        return sigma(t)
    return 2.0 * math.log1p(t) - math.log(q)


def _disk(a: complex, b: complex) -> float:
    if a == 0 or b == 0:
        return sigma(min(abs(a + b), _BELOW_ONE))
    den = 1.0 - a.conjugate() * b
    t = min(abs(a - b) / abs(den), _BELOW_ONE)
    q = (1.0 - abs(a) ** 2) * (1.0 - abs(b) ** 2) / abs(den) ** 2
    return _sigma_parts(t, q)


def _ball(a: np.ndarray, b: np.ndarray) -> float:
    t = min(float(np.linalg.norm(ball_automorphism(a).forward(b))), _BELOW_ONE)
    if t < 0.5:
        return sigma(t)
    # 1 - |phi_a(b)|^2 = (1 - |a|^2)(1 - |b|^2) / |1 - <a, b>|^2, symmetric in a and b.
    ab = np.vdot(a, b)
    q = (1.0 - np.vdot(a, a).real) * (1.0 - np.vdot(b, b).real) / abs(1.0 - ab) ** 2
    t = math.sqrt(max(0.0, 1.0 - q))
    return 2.0 * math.log1p(t) - math.log(q)


def _kobayashi(d: Domain, a: np.ndarray, b: np.ndarray) -> float:
    if isinstance(d, Polydisk):
        rad = d.radius_array()
        return max(_disk(complex(x), complex(y)) for x, y in zip(a / rad, b / rad))
    if isinstance(d, Ball):
        return _ball(a, b)
    if isinstance(d, Product):
        return max(_kobayashi(f, x, y) for f, x, y in zip(d.factors, dm.split(d, a), dm.split(d, b)))
    raise UnsupportedDomainError(f"Kobayashi distance is not implemented for {type(d).__name__}")


def is_supported(d: Domain) -> bool:
    if isinstance(d, (Ball, Polydisk)):
        return True
    if isinstance(d, Product):
        return all(is_supported(f) for f in d.factors)
    return False


def kobayashi(d: Domain, a, b) -> float:
    """Kobayashi distance between two points of a ball, polydisk or product of those."""
    if not is_supported(d):
        raise UnsupportedDomainError(f"Kobayashi distance is not implemented for {d!r}")
    a = dm.as_point(d, a)
    b = dm.as_point(d, b)
    if not (dm.contains(d, a) and dm.contains(d, b)):
        raise ContractViolation("kobayashi needs both points inside the domain")
    if np.array_equal(a, b):
        return 0.0
    return _kobayashi(d, a, b)


def kobayashi_to_set(ambient: Domain, z, points: Sequence) -> float:
    """min over the finite set ``points`` of kobayashi(ambient, z, p)."""
    pts = list(points)
    if not pts:
        raise ContractViolation("kobayashi_to_set needs a nonempty point set")
    return min(kobayashi(ambient, z, p) for p in pts)
