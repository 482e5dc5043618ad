"""Holomorphic embeddings as composable values.

A :class:`HoloMap` evaluates on stacks of points (shape ``(..., n)``). Besides
forward and inverse it can carry ``holes``: target-space images, under the
holomorphic extension of the map, of points removed from the source. A hole is
an interior point of the target that the image misses, which random sampling
would never find on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import domains as dm
from .domains import Ball, Domain, Polydisk, Product, Puncture
from .errors import ContractViolation, RangeError, UnsupportedDomainError, UnsupportedMapError

PointFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class HoloMap:
    source: Domain
    target: Domain
    forward: PointFn
    inverse: PointFn | None = None
    descriptor: str = "map"
    holes: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=complex))

    @property
    def dim(self) -> int:
        return dm.dimension(self.target)

    def __call__(self, z) -> np.ndarray:
        return self.forward(np.asarray(z, dtype=complex))

    def invert(self, w) -> np.ndarray:
        if self.inverse is None:
            raise UnsupportedMapError(f"{self.descriptor} has no inverse")
        return self.inverse(np.asarray(w, dtype=complex))


def _fmt(z) -> str:
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    return "[" + ", ".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in arr) + "]"


def _no_holes(n: int) -> np.ndarray:
    return np.zeros((0, n), dtype=complex)


def identity(d: Domain) -> HoloMap:
    n = dm.dimension(d)
    target = d if isinstance(d, (Ball, Polydisk)) else Polydisk(n)
    return HoloMap(d, target, lambda z: z, lambda w: w, "identity", _no_holes(n))


def mobius_disk(a: complex) -> HoloMap:
    """Disk automorphism z -> (z - a) / (1 - conj(a) z) on the unit disk."""
    a = complex(a)
    if not abs(a) < 1:
        raise RangeError(f"mobius_disk needs |a| < 1, got {a}")
    ca = a.conjugate()
    return HoloMap(
        Polydisk(1), Polydisk(1),
        lambda z: (z - a) / (1 - ca * z),
        lambda w: (w + a) / (1 + ca * w),
        f"mobius({a:.6g})", _no_holes(1),
    )


def polydisk_automorphism(a, radii: Sequence[float] | None = None) -> HoloMap:
    """Coordinatewise Mobius maps sending ``a`` to 0; source is the (scaled) polydisk, target the unit one."""
    a = np.asarray(a, dtype=complex).ravel()
    source = Polydisk(a.size, None if radii is None else tuple(radii))
    rad = source.radius_array()
    b = a / rad
    if not np.all(np.abs(b) < 1):
        raise RangeError(f"polydisk_automorphism needs a inside the polydisk, got {_fmt(a)}")
    cb = np.conj(b)

    def fwd(z):
        u = z / rad
        return (u - b) / (1 - cb * u)

    def inv(w):
        return rad * (w + b) / (1 + cb * w)

    return HoloMap(source, Polydisk(a.size), fwd, inv, f"polydisk_aut(a={_fmt(a)})", _no_holes(a.size))


def _ball_involution(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    aa = float(np.vdot(a, a).real)
    ip = w @ np.conj(a)  # <w, a>
    pw = ip[..., None] * a / aa
    s = math.sqrt(1.0 - aa)
    return (a - pw - s * (w - pw)) / (1.0 - ip)[..., None]


def ball_automorphism(a) -> HoloMap:
    """Involutive ball automorphism exchanging ``a`` and 0.

    For ``a = 0`` the identity is returned (the general formula would give ``-w``).
    """
    a = np.asarray(a, dtype=complex).ravel()
    n = a.size
    norm2 = float(np.vdot(a, a).real)
    if not norm2 < 1:
        raise RangeError(f"ball_automorphism needs |a| < 1, got |a| = {math.sqrt(norm2)}")
    if norm2 == 0.0:
        f: PointFn = lambda w: w  # noqa: E731
    else:
        f = lambda w: _ball_involution(a, w)  # noqa: E731
    return HoloMap(Ball(n), Ball(n), f, f, f"ball_aut(a={_fmt(a)})", _no_holes(n))


def unitary_map(u: np.ndarray) -> HoloMap:
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n) or not np.allclose(u @ u.conj().T, np.eye(n), atol=1e-12):
        raise ContractViolation("unitary_map needs a unitary matrix")
    uh = u.conj().T
    return HoloMap(Ball(n), Ball(n), lambda z: z @ u.T, lambda w: w @ uh.T, "unitary", _no_holes(n))


def rotation_to_axis(v) -> np.ndarray:
    """A unitary ``U`` with ``U v = |v| e_1``."""
    v = np.asarray(v, dtype=complex).ravel()
    n = v.size
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return np.eye(n, dtype=complex)
    x1 = v[0]
    phase = x1 / abs(x1) if x1 != 0 else 1.0
    e1 = np.zeros(n, dtype=complex)
    e1[0] = 1.0
    h_vec = v + phase * norm * e1
    h = np.eye(n, dtype=complex) - 2.0 * np.outer(h_vec, h_vec.conj()) / np.vdot(h_vec, h_vec).real
    # h v = -phase |v| e_1; fix the first row's phase.
    d = np.ones(n, dtype=complex)
    d[0] = -np.conj(phase)
    return d[:, None] * h


def scale_map(n: int, c: float, source: Domain | None = None, target: Domain | None = None) -> HoloMap:
    c = float(c)
    if not c > 0:
        raise RangeError(f"scale factor must be positive, got {c}")
    src = Ball(n) if source is None else source
    if target is None:
        target = Polydisk(n) if isinstance(src, Polydisk) else Ball(n)
    return HoloMap(src, target, lambda z: c * z, lambda w: w / c, f"scale({c:.6g})", _no_holes(n))


def compose(f: HoloMap, g: HoloMap) -> HoloMap:
    """``f o g``: apply ``g`` first."""
    if g.dim != f.dim:
        raise ContractViolation(f"cannot compose maps of dimensions {f.dim} and {g.dim}")
    inv = None
    if f.inverse is not None and g.inverse is not None:
        fi, gi = f.inverse, g.inverse
        inv = lambda w: gi(fi(w))  # noqa: E731
    ff, gf = f.forward, g.forward
    holes = ff(g.holes) if len(g.holes) else _no_holes(f.dim)
    return HoloMap(g.source, f.target, lambda z: ff(gf(z)), inv,
                   f"{f.descriptor} o {g.descriptor}", holes)


def restrict(f: HoloMap, source: Puncture) -> HoloMap:
    """Restrict a map defined on ``source.ambient`` to the punctured domain, recording holes."""
    holes = f.forward(source.point_array())
    return replace(f, source=source, holes=np.atleast_2d(holes), descriptor=f"{f.descriptor}|punctured")


def recenter(f: HoloMap, w, eps: float) -> HoloMap:
    """z -> (f(z) - f(w)) / (1 + eps); requires every |f_j(w)| < eps."""
    eps = float(eps)
    if not eps > 0:
        raise RangeError(f"eps must be positive, got {eps}")
    fw = f.forward(np.asarray(w, dtype=complex))
    if not np.all(np.abs(fw) < eps):
        raise ContractViolation(f"recenter needs |f_j(w)| < eps={eps}, got max {np.max(np.abs(fw))}")
    k = 1.0 + eps
    ff = f.forward
    inv = None
    if f.inverse is not None:
        fi = f.inverse
        inv = lambda u: fi(u * k + fw)  # noqa: E731
    holes = (f.holes - fw) / k if len(f.holes) else f.holes
    return HoloMap(f.source, Polydisk(f.dim), lambda z: (ff(z) - fw) / k, inv,
                   f"recenter({f.descriptor}, eps={eps:.3g})", holes)


def polydisk_weights(radii: Sequence[float]) -> list[float]:
    """w_i = r_i / max_j r_j (use r_i = 1 / T_i)."""
    top = max(radii)
    return [r / top for r in radii]


def ball_weights(radii: Sequence[float]) -> list[float]:
    """w_i = r_i / sqrt(sum_j r_j^2) (use r_i = 1 / S_i)."""
    total = math.sqrt(sum(r * r for r in radii))
    return [r / total for r in radii]


def product_map(maps: Sequence[HoloMap], weights: Sequence[float]) -> HoloMap:
    """Block-diagonal map (z_1, ..., z_k) -> (w_1 f_1(z_1), ..., w_k f_k(z_k))."""
    maps = list(maps)
    weights = [float(w) for w in weights]
    if len(maps) != len(weights) or not maps:
        raise ContractViolation("product_map needs one weight per map")
    if not all(0 < w <= 1 for w in weights):
        raise RangeError(f"weights must lie in (0, 1], got {weights}")
    if len(maps) == 1 and weights[0] == 1.0:
        return maps[0]
    if any(m.inverse is None for m in maps):
        raise ContractViolation("product_map needs invertible factors")
    dims = [m.dim for m in maps]
    if any(dm.dimension(m.source) != k for m, k in zip(maps, dims)):
        raise ContractViolation("factor source and target dimensions differ")
    cuts = np.cumsum(dims)[:-1]
    n = sum(dims)
    source = maps[0].source if len(maps) == 1 else Product(tuple(m.source for m in maps))
    if all(isinstance(m.target, Ball) for m in maps) and sum(w * w for w in weights) <= 1.0:
        target: Domain = Ball(n)
    else:
        target = Polydisk(n)

    def fwd(z):
        blocks = np.split(z, cuts, axis=-1)
        return np.concatenate([w * m.forward(b) for m, w, b in zip(maps, weights, blocks)], axis=-1)

    def inv(u):
        blocks = np.split(u, cuts, axis=-1)
        return np.concatenate([m.inverse(b / w) for m, w, b in zip(maps, weights, blocks)], axis=-1)

    hole_rows = []
    for i, (m, w) in enumerate(zip(maps, weights)):
        for h in m.holes:
            row = np.zeros(n, dtype=complex)
            start = sum(dims[:i])
            row[start:start + dims[i]] = w * h
            hole_rows.append(row)
    holes = np.array(hole_rows, dtype=complex).reshape(-1, n)
    desc = "product(" + ", ".join(f"{w:.6g}*{m.descriptor}" for m, w in zip(maps, weights)) + ")"
    return HoloMap(source, target, fwd, inv, desc, holes)


def _as_polydisk_target(f: HoloMap) -> HoloMap:
    """View a map into the unit ball as a map into the unit polydisk (the ball sits inside)."""
    return replace(f, target=Polydisk(f.dim), descriptor=f"include({f.descriptor})")


def candidate_embedding(d: Domain, z) -> HoloMap:
    """Explicit embedding of ``d`` into the unit polydisk sending ``z`` to 0.

    Supported: polydisks, balls (and CartanI(1, s)), punctured balls and
    polydisks, and products of supported domains.
    """
    z = dm.as_point(d, z)
    if not dm.contains(d, z):
        raise ContractViolation("candidate_embedding needs z inside the domain")
    if isinstance(d, Polydisk):
        return polydisk_automorphism(z, d.radii)
    if dm.is_ball_like(d):
        return replace(_as_polydisk_target(ball_automorphism(z)), source=d)
    if isinstance(d, Puncture):
        amb = d.ambient
        if isinstance(amb, Polydisk):
            return restrict(polydisk_automorphism(z, amb.radii), d)
        if dm.is_ball_like(amb):
            pts = d.point_array()
            if len(pts) == 1:
                # Move the puncture to 0, then z' to 0, then rotate the hole onto an axis.
                to_origin = ball_automorphism(pts[0])
                z1 = to_origin.forward(z)
                f = compose(ball_automorphism(z1), to_origin)
                f = compose(unitary_map(rotation_to_axis(z1)), f)
            else:
                f = ball_automorphism(z)
            f = replace(f, source=amb)
            return restrict(_as_polydisk_target(f), d)
        raise UnsupportedDomainError(f"no candidate embedding for punctured {amb!r}")
    if isinstance(d, Product):
        from .bounds import evaluate_T

        blocks = dm.split(d, z)
        parts = [candidate_embedding(f, b) for f, b in zip(d.factors, blocks)]
        lows = [evaluate_T(f, b).lower for f, b in zip(d.factors, blocks)]
        if min(lows) <= 0:
            raise UnsupportedDomainError("a product factor has no positive lower bound to weight by")
        out = product_map(parts, polydisk_weights([1.0 / t for t in lows]))
        return replace(out, source=d)
    raise UnsupportedDomainError(f"no candidate embedding for {d!r}")
