"""Sampled estimates of the largest centred polydisk inside an embedding's image.

The estimate bisects on the polyradius r. A trial radius is accepted when
every sample point of the closed polydisk of radius r (scaled from a fixed set
of unit "rays") pulls back into the source domain. Rays come in three groups:

* the distinguished boundary torus, on a Kronecker (golden-ratio) lattice,
* each face {|w_j| = r, |w_i| <= r}, seeded uniform,
* the interior, seeded uniform.

Known holes of the image (images of removed points) are tested exactly in
addition, since no sampler will land on an isolated missing point.

These are sampling certificates, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import domains as dm
from .bounds import evaluate_T
from .domains import Domain, Polydisk
from .errors import ContractViolation, RangeError, UnsupportedMapError
from .maps import (
    HoloMap,
    ball_automorphism,
    candidate_embedding,
    compose,
    recenter,
    restrict,
    scale_map,
    unitary_map,
)

SAMPLED_OK = "SAMPLED_OK"
WITNESS_FOUND = "WITNESS_FOUND"


@dataclass(frozen=True)
class CertifyConfig:
    boundary_samples: int = 20000
    interior_samples: int = 5000
    bisection_tol: float = 1e-3
    max_bisections: int = 40
    rng_seed: int = 0

    def __post_init__(self):
        if self.boundary_samples < 100 or self.interior_samples < 100:
            raise RangeError("sample counts must be at least 100")
        if not self.bisection_tol > 0:
            raise RangeError("bisection_tol must be positive")
        if self.max_bisections < 1:
            raise RangeError("max_bisections must be positive")
        if self.rng_seed < 0:
            raise RangeError("rng_seed must be a nonnegative integer")


@dataclass(frozen=True)
class CertificateReport:
    radius_estimate: float
    status: str
    witness: np.ndarray | None
    samples_used: int
    construction: str
    seed: int
    bracket: tuple[float, float]
    tolerance_met: bool
    bound_lower: float | None = None
    bound_upper: float | None = None
    params: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        out = {
            "radius_estimate": self.radius_estimate,
            "status": self.status,
            "witness": None if self.witness is None else dm.vector_to_json(self.witness),
            "samples_used": self.samples_used,
            "construction": self.construction,
            "seed": self.seed,
            "bracket": list(self.bracket),
            "tolerance_met": self.tolerance_met,
        }
        if self.bound_lower is not None:
            out["bound_lower"] = self.bound_lower
            out["bound_upper"] = self.bound_upper
        if self.params:
            out["params"] = list(self.params)
        return out


def image_contains(f: HoloMap, w) -> np.ndarray | bool:
    """Whether ``w`` (one point or a stack) lies in f(source), via the inverse."""
    if f.inverse is None:
        raise UnsupportedMapError(f"{f.descriptor} has no inverse")
    w = np.asarray(w, dtype=complex)
    with np.errstate(all="ignore"):
        pre = f.inverse(w)
    ok = np.all(np.isfinite(pre), axis=-1) & np.asarray(dm.contains(f.source, np.nan_to_num(pre)))
    return bool(ok) if np.ndim(ok) == 0 else ok


def _kronecker_angles(count: int, n: int, shift: np.ndarray) -> np.ndarray:
    """Angles in [0, 2pi)^n from the additive recurrence with generalised golden ratios."""
    phi = 2.0
    for _ in range(50):
        phi = (1.0 + phi) ** (1.0 / (n + 1))
    alpha = (1.0 / phi) ** np.arange(1, n + 1)
    k = np.arange(1, count + 1)[:, None]
    return 2.0 * np.pi * np.mod(shift + k * alpha, 1.0)


def _uniform_disk(rng: np.random.Generator, shape) -> np.ndarray:
    rad = np.sqrt(rng.random(shape))
    return rad * np.exp(2j * np.pi * rng.random(shape))


def sample_rays(n: int, cfg: CertifyConfig) -> np.ndarray:
    """Unit-polyradius sample directions; the trial set at radius r is ``r * rays``."""
    rng = np.random.default_rng(cfg.rng_seed)
    torus = np.exp(1j * _kronecker_angles(cfg.boundary_samples, n, rng.random(n)))
    per_face = max(1, cfg.boundary_samples // n)
    faces = []
    for j in range(n):
        face = _uniform_disk(rng, (per_face, n))
        face[:, j] = np.exp(2j * np.pi * rng.random(per_face))
        faces.append(face)
    interior = _uniform_disk(rng, (cfg.interior_samples, n))
    return np.concatenate([torus, *faces, interior])


def inscribed_radius(f: HoloMap, cfg: CertifyConfig = CertifyConfig()) -> CertificateReport:
    """Largest sampled-valid r with the polydisk of radius r inside the image of ``f``."""
    if f.inverse is None:
        raise UnsupportedMapError(f"{f.descriptor} has no inverse")
    n = f.dim
    rays = sample_rays(n, cfg)
    holes = np.asarray(f.holes, dtype=complex).reshape(-1, n)
    hole_radius = np.max(np.abs(holes), axis=1) if len(holes) else np.zeros(0)

    def failure(r: float) -> np.ndarray | None:
        # Holes first: an exact obstruction beats a sampled one.
        inside = holes[hole_radius < r]
        if len(inside):
            bad = ~np.atleast_1d(image_contains(f, inside))
            if bad.any():
                return inside[np.argmax(bad)]
        pts = r * rays
        bad = ~np.atleast_1d(image_contains(f, pts))
        if bad.any():
            return pts[np.argmax(bad)]
        return None

    lo, hi = 0.0, 1.0
    witness = failure(hi)
    steps = 0
    if witness is not None:
        while hi - lo > cfg.bisection_tol and steps < cfg.max_bisections:
            mid = 0.5 * (lo + hi)
            bad = failure(mid)
            if bad is None:
                lo = mid
            else:
                hi, witness = mid, bad
            steps += 1
    else:
        lo = hi
    return CertificateReport(
        radius_estimate=lo,
        status=SAMPLED_OK if witness is None else WITNESS_FOUND,
        witness=witness,
        samples_used=(steps + 1) * (len(rays) + len(holes)),
        construction=f.descriptor,
        seed=cfg.rng_seed,
        bracket=(lo, hi),
        tolerance_met=hi - lo <= cfg.bisection_tol,
    )


def certify_construction(d: Domain, z, cfg: CertifyConfig = CertifyConfig()) -> CertificateReport:
    """Build the explicit embedding for (d, z) and estimate its inscribed polyradius."""
    z = dm.as_point(d, z)
    f = candidate_embedding(d, z)
    rep = inscribed_radius(f, cfg)
    bound = evaluate_T(d, z)
    return _with_bounds(rep, bound.lower, bound.upper)


def _with_bounds(rep: CertificateReport, lo: float, hi: float, params=()) -> CertificateReport:
    return replace(rep, bound_lower=lo, bound_upper=hi, params=tuple(params))


# -- parametric families and search -------------------------------------------


@dataclass(frozen=True)
class MapFamily:
    """``build(params)`` returns an embedding of ``domain``; params live in the box [lower, upper]."""

    name: str
    domain: Domain
    build: Callable[[np.ndarray], HoloMap]
    x0: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @property
    def size(self) -> int:
        return len(self.x0)


def singleton_family(f: HoloMap, name: str = "singleton") -> MapFamily:
    return MapFamily(name, f.source, lambda p: f, (), (), ())


def _real_to_complex(p: np.ndarray) -> np.ndarray:
    return p[0::2] + 1j * p[1::2]


def ball_family(n: int, z, max_shift: float = 0.5) -> MapFamily:
    """scale(c) o phi_a o phi_z on Ball(n); params = (Re a_1, Im a_1, ..., c)."""
    z = np.asarray(z, dtype=complex)
    base = ball_automorphism(z)

    def build(p):
        a = _real_to_complex(np.asarray(p[:-1]))
        if np.linalg.norm(a) >= 1:
            a = a / (np.linalg.norm(a) * (1 + 1e-9))
        f = compose(scale_map(n, p[-1]), compose(ball_automorphism(a), base))
        return _as_polydisk(f)

    k = 2 * n
    return MapFamily("ball_aut_scale", dm.Ball(n), build,
                     (0.0,) * k + (1.0,), (-max_shift,) * k + (0.25,), (max_shift,) * k + (1.0,))


def _cayley_unitary(p: np.ndarray, n: int) -> np.ndarray:
    """Unitary (I + iH)(I - iH)^-1 from the n^2 real entries of a Hermitian H."""
    h = np.zeros((n, n), dtype=complex)
    it = iter(p)
    for i in range(n):
        h[i, i] = next(it)
        for j in range(i + 1, n):
            c = next(it) + 1j * next(it)
            h[i, j], h[j, i] = c, np.conj(c)
    eye = np.eye(n)
    return (eye + 1j * h) @ np.linalg.inv(eye - 1j * h)


def punctured_ball_family(d: dm.Puncture, z) -> MapFamily:
    """phi_{Uz} o U on the ball punctured at the origin; params parametrise U."""
    if not (isinstance(d.ambient, dm.Ball) and len(d.points) == 1 and not np.any(d.point_array())):
        raise ContractViolation("punctured_ball_family needs the ball punctured at the origin")
    n = d.ambient.n
    z = np.asarray(z, dtype=complex)

    def build(p):
        u = _cayley_unitary(np.asarray(p), n)
        f = compose(ball_automorphism(u @ z), unitary_map(u))
        return restrict(_as_polydisk(f), d)

    k = n * n
    return MapFamily("ball_aut_unitary", d, build, (0.0,) * k, (-2.0,) * k, (2.0,) * k)


def _as_polydisk(f: HoloMap) -> HoloMap:
    return replace(f, target=Polydisk(f.dim))


def _centred(f: HoloMap, z: np.ndarray) -> HoloMap:
    fz = f.forward(z)
    gap = float(np.max(np.abs(fz)))
    if gap <= 1e-12:
        return f
    return recenter(f, z, gap * (1 + 1e-9) + 1e-12)


def search_family(d: Domain, z, family: MapFamily, cfg: CertifyConfig = CertifyConfig(),
                  budget: int = 50, starts: int = 3, min_step: float = 1e-3) -> CertificateReport:
    """Multi-start coordinate search maximising the sampled inscribed radius.

    ``budget`` caps the number of inscribed-radius evaluations. The result is a
    lower-bound witness for T(z), never a claim about the supremum.
    """
    if budget < 1:
        raise RangeError("budget must be at least 1")
    z = dm.as_point(d, z)
    cache: dict[tuple, CertificateReport] = {}

    def score(p: np.ndarray) -> CertificateReport:
        key = tuple(np.round(p, 12))
        if key not in cache:
            f = _centred(family.build(p), z)
            cache[key] = inscribed_radius(f, cfg)
        return cache[key]

    x0 = np.asarray(family.x0, dtype=float)
    best_p, best = x0, score(x0)
    if family.size == 0:
        return _finish(d, z, best, best_p)
    lo, hi = np.asarray(family.lower), np.asarray(family.upper)
    rng = np.random.default_rng(cfg.rng_seed)
    points = [x0] + [lo + (hi - lo) * rng.random(family.size) for _ in range(starts - 1)]
    for start in points:
        p, cur = start.copy(), score(start)
        step = 0.25 * (hi - lo)
        while len(cache) < budget and np.max(step) >= min_step:
            improved = False
            for i in range(family.size):
                for sign in (1.0, -1.0):
                    if len(cache) >= budget:
                        break
                    trial = p.copy()
                    trial[i] = np.clip(trial[i] + sign * step[i], lo[i], hi[i])
                    rep = score(trial)
                    if rep.radius_estimate > cur.radius_estimate:
                        p, cur, improved = trial, rep, True
            if not improved:
                step = step / 2
        if cur.radius_estimate > best.radius_estimate:
            best_p, best = p, cur
        if len(cache) >= budget:
            break
    return _finish(d, z, best, best_p)


def _finish(d, z, rep: CertificateReport, params) -> CertificateReport:
    b = evaluate_T(d, z)
    return _with_bounds(rep, b.lower, b.upper, [float(x) for x in params])


FAMILIES = {
    "ball_aut_scale": lambda d, z: ball_family(dm.dimension(d), z),
    "ball_aut_unitary": punctured_ball_family,
    "candidate": lambda d, z: singleton_family(candidate_embedding(d, z), "candidate"),
}


def make_family(name: str, d: Domain, z) -> MapFamily:
    try:
        factory = FAMILIES[name]
    except KeyError:
        raise ContractViolation(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return factory(d, dm.as_point(d, z))
