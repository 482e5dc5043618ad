"""Polydisk and ball squeezing functions: rule-based bounds and sampled embedding certificates."""

from .bounds import BoundInterval, RuleId, equality_flags, evaluate, evaluate_S, evaluate_T
from .certify import CertifyConfig, CertificateReport, certify_construction, inscribed_radius, search_family
from .domains import (
    Ball,
    CartanI,
    CartanII,
    CartanIII,
    CartanIV,
    Polydisk,
    Product,
    Puncture,
    dimension,
    membership,
)
from .maps import HoloMap, candidate_embedding

__all__ = [
    "Ball", "Polydisk", "CartanI", "CartanII", "CartanIII", "CartanIV", "Puncture", "Product",
    "dimension", "membership", "BoundInterval", "RuleId", "evaluate", "evaluate_T", "evaluate_S",
    "equality_flags", "HoloMap", "candidate_embedding", "CertifyConfig", "CertificateReport",
    "inscribed_radius", "certify_construction", "search_family",
]
