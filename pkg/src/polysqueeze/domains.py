"""Domain algebra: balls, polydisks, the four Cartan families, punctures and products.

Points are complex vectors (1-D ``numpy`` arrays of dtype complex128). Every
membership routine also accepts a stack of points of shape ``(..., n)`` and then
returns a boolean array, which is what the certification sampler relies on.

Cartan domains of type II and III are indexed by packed triangles so that the
vector length equals the complex dimension:

* type II (symmetric ``p x p``): row-major upper triangle including the diagonal,
* type III (skew-symmetric ``q x q``): row-major strict upper triangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .errors import ContractViolation, MalformedInputError, UnsupportedDomainError

# Positive-definiteness margin; eigenvalues at or below it count as "outside".
TAU_PD = 1e-10
# Points closer than this to a puncture are treated as the puncture itself.
TAU_PUNCTURE = 1e-12
# Tolerance for the symmetry / skew-symmetry check when packing a matrix.
TAU_SYMMETRY = 1e-12


def _positive_int(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise MalformedInputError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class Ball:
    n: int

    def __post_init__(self):
        _positive_int("n", self.n)


@dataclass(frozen=True)
class Polydisk:
    n: int
    radii: tuple[float, ...] | None = None

    def __post_init__(self):
        _positive_int("n", self.n)
        if self.radii is not None:
            radii = tuple(float(r) for r in self.radii)
            if len(radii) != self.n or not all(math.isfinite(r) and r > 0 for r in radii):
                raise MalformedInputError(f"radii must be {self.n} positive reals, got {self.radii!r}")
            object.__setattr__(self, "radii", radii)

    def radius_array(self) -> np.ndarray:
        return np.ones(self.n) if self.radii is None else np.asarray(self.radii)


@dataclass(frozen=True)
class CartanI:
    r: int
    s: int

    def __post_init__(self):
        _positive_int("r", self.r)
        _positive_int("s", self.s)
        if self.r > self.s:
            raise MalformedInputError(f"CartanI requires r <= s, got r={self.r}, s={self.s}")


@dataclass(frozen=True)
class CartanII:
    p: int

    def __post_init__(self):
        _positive_int("p", self.p)


@dataclass(frozen=True)
class CartanIII:
    q: int

    def __post_init__(self):
        _positive_int("q", self.q)
        if self.q < 2:
            raise MalformedInputError(f"CartanIII requires q >= 2, got q={self.q}")


@dataclass(frozen=True)
class CartanIV:
    n: int

    def __post_init__(self):
        _positive_int("n", self.n)


@dataclass(frozen=True)
class Puncture:
    """``ambient`` with finitely many points removed."""

    ambient: "Domain"
    points: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        if isinstance(self.ambient, Puncture):
            raise MalformedInputError("nested punctures are not supported; list all points on one Puncture")
        n = dimension(self.ambient)
        pts = tuple(tuple(complex(c) for c in p) for p in self.points)
        if not pts:
            raise MalformedInputError("Puncture needs at least one point")
        for p in pts:
            if len(p) != n:
                raise MalformedInputError(f"puncture point {p} has length {len(p)}, expected {n}")
            if not contains(self.ambient, np.asarray(p)):
                raise MalformedInputError(f"puncture point {p} is not in the ambient domain")
        if len(set(pts)) != len(pts):
            raise MalformedInputError("puncture points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    def point_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)


@dataclass(frozen=True)
class Product:
    factors: tuple["Domain", ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if len(factors) < 2:
            raise MalformedInputError("Product requires at least 2 factors")
        object.__setattr__(self, "factors", factors)


Domain = Union[Ball, Polydisk, CartanI, CartanII, CartanIII, CartanIV, Puncture, Product]
CARTAN_TYPES = (CartanI, CartanII, CartanIII, CartanIV)


def dimension(d: Domain) -> int:
    """Complex dimension of ``d``."""
    if isinstance(d, (Ball, Polydisk, CartanIV)):
        return d.n
    if isinstance(d, CartanI):
        return d.r * d.s
    if isinstance(d, CartanII):
        return d.p * (d.p + 1) // 2
    if isinstance(d, CartanIII):
        return d.q * (d.q - 1) // 2
    if isinstance(d, Puncture):
        return dimension(d.ambient)
    if isinstance(d, Product):
        return sum(dimension(f) for f in d.factors)
    raise UnsupportedDomainError(f"unknown domain {d!r}")


def split(d: Product, z: np.ndarray) -> list[np.ndarray]:
    """Split the last axis of ``z`` into the blocks belonging to each factor."""
    cuts = np.cumsum([dimension(f) for f in d.factors])[:-1]
    return np.split(z, cuts, axis=-1)


def polydisk_direction_count(d: Domain) -> int:
    """Number of coordinate unit disks through the origin with boundary circles in the boundary."""
    if isinstance(d, CartanI):
        return d.r
    if isinstance(d, CartanII):
        return d.p
    if isinstance(d, CartanIII):
        return d.q // 2
    if isinstance(d, CartanIV):
        return 2
    raise UnsupportedDomainError(f"polydisk_direction_count is defined for Cartan domains only, got {d!r}")


def is_homogeneous(d: Domain) -> bool:
    if isinstance(d, Puncture):
        return False
    if isinstance(d, Product):
        return all(is_homogeneous(f) for f in d.factors)
    return True


def is_ball_like(d: Domain) -> bool:
    """Ball(n), or CartanI(1, s) which is literally the unit ball of C^s."""
    return isinstance(d, Ball) or (isinstance(d, CartanI) and d.r == 1)


# -- Cartan matrix layout -----------------------------------------------------


def cartan_matrix(d: Domain, z: np.ndarray) -> np.ndarray:
    """Unpack coordinate vector(s) ``z`` into the Cartan matrix layout."""
    z = np.asarray(z, dtype=complex)
    lead = z.shape[:-1]
    if isinstance(d, CartanI):
        return z.reshape(lead + (d.r, d.s))
    if isinstance(d, CartanII):
        iu = np.triu_indices(d.p)
        m = np.zeros(lead + (d.p, d.p), dtype=complex)
        m[..., iu[0], iu[1]] = z
        m[..., iu[1], iu[0]] = z
        return m
    if isinstance(d, CartanIII):
        iu = np.triu_indices(d.q, k=1)
        m = np.zeros(lead + (d.q, d.q), dtype=complex)
        m[..., iu[0], iu[1]] = z
        m[..., iu[1], iu[0]] = -z
        return m
    raise UnsupportedDomainError(f"{d!r} has no matrix layout")


def pack_cartan_matrix(d: Domain, m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`cartan_matrix` for a single matrix, validating its symmetry type."""
    m = np.asarray(m, dtype=complex)
    if isinstance(d, CartanI):
        if m.shape != (d.r, d.s):
            raise MalformedInputError(f"expected a {d.r}x{d.s} matrix, got shape {m.shape}")
        return m.reshape(-1)
    if isinstance(d, CartanII):
        if m.shape != (d.p, d.p):
            raise MalformedInputError(f"expected a {d.p}x{d.p} matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.T), initial=0.0) > TAU_SYMMETRY:
            raise MalformedInputError("CartanII matrix is not symmetric")
        return m[np.triu_indices(d.p)]
    if isinstance(d, CartanIII):
        if m.shape != (d.q, d.q):
            raise MalformedInputError(f"expected a {d.q}x{d.q} matrix, got shape {m.shape}")
        if np.max(np.abs(m + m.T), initial=0.0) > TAU_SYMMETRY:
            raise MalformedInputError("CartanIII matrix is not skew-symmetric")
        return m[np.triu_indices(d.q, k=1)]
    raise UnsupportedDomainError(f"{d!r} has no matrix layout")


def is_positive_definite(h: np.ndarray, tol: float = TAU_PD) -> np.ndarray | bool:
    """Smallest-eigenvalue test on Hermitian matrices (stacked along leading axes)."""
    h = np.asarray(h)
    h = 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))
    result = np.linalg.eigvalsh(h)[..., 0] > tol
    return bool(result) if result.ndim == 0 else result


# -- membership ---------------------------------------------------------------


def contains(d: Domain, z: np.ndarray) -> np.ndarray | bool:
    """Vectorised open-domain membership over the last axis of ``z``.

    Performs no dimension checking; :func:`membership` is the checked entry point.
    """
    z = np.asarray(z, dtype=complex)
    if isinstance(d, Ball):
        out = np.sum(np.abs(z) ** 2, axis=-1) < 1.0
    elif isinstance(d, Polydisk):
        out = np.all(np.abs(z) < d.radius_array(), axis=-1)
    elif isinstance(d, (CartanI, CartanII, CartanIII)):
        m = cartan_matrix(d, z)
        rows = m.shape[-2]
        h = np.eye(rows) - m @ np.conj(np.swapaxes(m, -1, -2))
        out = is_positive_definite(h)
    elif isinstance(d, CartanIV):
        u = np.sum(z * z, axis=-1)
        v = np.sum(np.abs(z) ** 2, axis=-1)
        au = np.abs(u)
        out = (1.0 + au**2 - 2.0 * v > 0.0) & (1.0 - au > 0.0)
    elif isinstance(d, Puncture):
        out = np.asarray(contains(d.ambient, z))
        for p in d.point_array():
            out = out & (np.linalg.norm(z - p, axis=-1) > TAU_PUNCTURE)
    elif isinstance(d, Product):
        out = np.ones(z.shape[:-1], dtype=bool)
        for factor, block in zip(d.factors, split(d, z)):
            out = out & contains(factor, block)
    else:
        raise UnsupportedDomainError(f"unknown domain {d!r}")
    out = np.asarray(out)
    return bool(out) if out.ndim == 0 else out


def as_point(d: Domain, z: Any) -> np.ndarray:
    """Coerce ``z`` to a complex vector of the right length for ``d``.

    Cartan I-III also accept the matrix itself, which is packed (and checked for
    symmetry) first.
    """
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 2 and isinstance(d, (CartanI, CartanII, CartanIII)):
        arr = pack_cartan_matrix(d, arr)
    n = dimension(d)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ContractViolation(f"point has shape {arr.shape}, domain dimension is {n}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation("point has non-finite coordinates")
    return arr


def membership(d: Domain, z: Any) -> bool:
    """True iff the single point ``z`` lies in the open domain ``d``."""
    return bool(contains(d, as_point(d, z)))


# -- JSON encoding --------------------------------------------------------------

# A complex coordinate: a real number or an [re, im] pair.
_COMPLEX = {"anyOf": [{"type": "number"},
                      {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_POSINT = {"type": "integer", "minimum": 1}

_VARIANTS: dict[str, tuple[dict, list[str]]] = {
    "ball": ({"n": _POSINT}, ["n"]),
    "polydisk": ({"n": _POSINT, "radii": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}}},
                 ["n"]),
    "cartan1": ({"r": _POSINT, "s": _POSINT}, ["r", "s"]),
    "cartan2": ({"p": _POSINT}, ["p"]),
    "cartan3": ({"q": {"type": "integer", "minimum": 2}}, ["q"]),
    "cartan4": ({"n": _POSINT}, ["n"]),
    "puncture": ({"ambient": {"$ref": "#/$defs/domain"},
                  "points": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _COMPLEX}}},
                 ["ambient", "points"]),
    "product": ({"factors": {"type": "array", "minItems": 2, "items": {"$ref": "#/$defs/domain"}}},
                ["factors"]),
}

# One if/then branch per variant so validation errors name the offending field.
DOMAIN_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$ref": "#/$defs/domain",
    "$defs": {
        "domain": {
            "type": "object",
            "required": ["type"],
            "properties": {"type": {"enum": sorted(_VARIANTS)}},
            "allOf": [
                {"if": {"properties": {"type": {"const": kind}}},
                 "then": {"properties": {"type": True, **props}, "required": req,
                          "additionalProperties": False}}
                for kind, (props, req) in _VARIANTS.items()
            ],
        }
    },
}


def complex_from_json(pair: Any) -> complex:
    if isinstance(pair, (int, float)) and not isinstance(pair, bool):
        return complex(pair)
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise MalformedInputError(f"complex numbers are encoded as [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def complex_to_json(c: complex) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


def vector_to_json(z: np.ndarray) -> list[list[float]]:
    return [complex_to_json(c) for c in np.asarray(z).ravel()]


def domain_from_dict(obj: dict) -> Domain:
    """Build a domain from its JSON object form (schema-validated first)."""
    import jsonschema

    error = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(DOMAIN_SCHEMA).iter_errors(obj))
    if error is not None:
        where = "/".join(str(p) for p in error.absolute_path) or "<root>"
        raise MalformedInputError(f"invalid domain at {where}: {error.message}")
    return _build(obj)


def _build(obj: dict) -> Domain:
    kind = obj["type"]
    if kind == "ball":
        return Ball(obj["n"])
    if kind == "polydisk":
        radii = obj.get("radii")
        return Polydisk(obj["n"], tuple(radii) if radii is not None else None)
    if kind == "cartan1":
        return CartanI(obj["r"], obj["s"])
    if kind == "cartan2":
        return CartanII(obj["p"])
    if kind == "cartan3":
        return CartanIII(obj["q"])
    if kind == "cartan4":
        return CartanIV(obj["n"])
    if kind == "puncture":
        pts = tuple(tuple(complex_from_json(c) for c in p) for p in obj["points"])
        return Puncture(_build(obj["ambient"]), pts)
    if kind == "product":
        return Product(tuple(_build(f) for f in obj["factors"]))
    raise MalformedInputError(f"unknown domain type {kind!r}")


def domain_to_dict(d: Domain) -> dict:
    if isinstance(d, Ball):
        return {"type": "ball", "n": d.n}
    if isinstance(d, Polydisk):
        out: dict = {"type": "polydisk", "n": d.n}
        if d.radii is not None:
            out["radii"] = list(d.radii)
        return out
    if isinstance(d, CartanI):
        return {"type": "cartan1", "r": d.r, "s": d.s}
    if isinstance(d, CartanII):
        return {"type": "cartan2", "p": d.p}
    if isinstance(d, CartanIII):
        return {"type": "cartan3", "q": d.q}
    if isinstance(d, CartanIV):
        return {"type": "cartan4", "n": d.n}
    if isinstance(d, Puncture):
        return {"type": "puncture", "ambient": domain_to_dict(d.ambient),
                "points": [[complex_to_json(c) for c in p] for p in d.points]}
    if isinstance(d, Product):
        return {"type": "product", "factors": [domain_to_dict(f) for f in d.factors]}
    raise UnsupportedDomainError(f"unknown domain {d!r}")
