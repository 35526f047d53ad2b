"""Qubitized phase estimation bookkeeping.

The walk operator built from a block encoding of H/lambda has eigenphases
phi = arccos(E/lambda). Reading an energy to precision delta_E needs
m = ceil(log2(sqrt(2) pi lambda / (2 delta_E))) control qubits and the
controlled powers W, W^2, ..., W^(2^(m-1)), i.e. 2^m - 1 walk queries.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from endoqre.errors import DomainError

# Resolves log2 values that land on an integer up to rounding.
_LOG_SLACK = 1e-12

DEFAULT_DELTA_E = 1e-3  # Hartree
CHEMICAL_ACCURACY = 1.6e-3  # Hartree


def eigenphase(energy: float, lam: float) -> float:
    """Walk-operator eigenphase in [0, pi] for eigenvalue ``energy``."""
    if not lam > 0:
        raise DomainError(f"normalization must be positive, got {lam}")
    if abs(energy) > lam:
        raise DomainError(
            f"|E| = {abs(energy)} exceeds lambda = {lam}: the block encoding is under-normalized"
        )
    return math.acos(energy / lam)


def energy_from_phase(phi: float, lam: float) -> float:
    if not lam > 0:
        raise DomainError(f"normalization must be positive, got {lam}")
    if not 0.0 <= phi <= math.pi:
        raise DomainError(f"phase {phi} outside [0, pi]")
    return lam * math.cos(phi)


def precision_qubits(lam: float, delta_e: float) -> int:
    if not (lam > 0 and delta_e > 0):
        raise DomainError("lambda and delta_E must both be positive")
    arg = math.sqrt(2.0) * math.pi * lam / (2.0 * delta_e)
    return max(0, math.ceil(math.log2(arg) - _LOG_SLACK))


def walk_queries(m: int) -> int:
    return 2**m - 1


def shot_count_exact(overlap: float, failure: float) -> float:
    """ln(1/delta) / ln(1/(1 - gamma^2)) before rounding up."""
    if not 0.0 < overlap <= 1.0:
        raise DomainError(
            "overlap must lie in (0, 1]; with zero overlap phase estimation cannot succeed"
        )
    if not 0.0 < failure < 1.0:
        raise DomainError(f"failure probability must lie in (0, 1), got {failure}")
    p = overlap * overlap
    if p >= 1.0:
        return 1.0
    return math.log(1.0 / failure) / -math.log1p(-p)


def shot_count(overlap: float, failure: float) -> int:
    return max(1, math.ceil(shot_count_exact(overlap, failure) - _LOG_SLACK))


@dataclass(frozen=True)
class QPEPlan:
    lam: float
    delta_e: float
    m: int
    walk_queries: int
    overlap: float
    failure: float
    shots: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


def qpe_plan(lam: float, delta_e: float = DEFAULT_DELTA_E, overlap: float = 1.0,
             failure: float = 0.01) -> QPEPlan:
    m = precision_qubits(lam, delta_e)
    return QPEPlan(
        lam=lam,
        delta_e=delta_e,
        m=m,
        walk_queries=walk_queries(m),
        overlap=overlap,
        failure=failure,
        shots=shot_count(overlap, failure),
    )
