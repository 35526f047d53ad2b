"""Double factorization of the two-electron integrals and its QPE cost.

The Coulomb tensor (ij|kl) is viewed as an N^2 x N^2 matrix A (the ERI
matrix), diagonalized as A = sum_l lambda_l vec(v_l) vec(v_l)^T, and each
v_l reshaped to an N x N symmetric matrix. The Hamiltonian is then

    H = sum_ij T_ij E_ij + 1/2 sum_l lambda_l (sum_ij [v_l]_ij E_ij)^2

with E_ij the spin-summed excitation operator and T the one-body matrix
corrected for operator reordering.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from endoqre.errors import ConfigurationError, DomainError, EndoqreError
from endoqre.io_formats import IntegralSet
from endoqre.qpe import precision_qubits
from endoqre.resources import LogicalResources

__all__ = [
    "NotPositiveSemidefiniteError",
    "DFFactorization",
    "DFCostModel",
    "build_eri_matrix",
    "double_factorize",
    "effective_one_body",
    "df_lambda",
    "rotation_t_cost",
    "df_logical_cost",
    "factorization_summary",
]

PSD_TOLERANCE = 1e-10
# eigenvalues below this fraction of lambda_max are round-off, kept out even at threshold 0
NOISE_FLOOR = 1e-13
DEFAULT_THRESHOLD = 1e-8


class NotPositiveSemidefiniteError(EndoqreError, ValueError):
    """ERI not positive semi-definite; the integrals are probably corrupted."""


@dataclass(frozen=True)
class DFFactorization:
    rank: int
    eigenvalues: np.ndarray  # lambda_l, descending
    eigenvectors: np.ndarray  # shape (rank, n, n), symmetric slices
    truncation_threshold: float
    discarded_weight: float  # Frobenius norm of the dropped spectrum
    lambda_one_body: float | None = None
    lambda_two_body: float | None = None

    def reconstruct(self) -> np.ndarray:
        """Sum_l lambda_l vec(v_l) vec(v_l)^T."""
        n = self.eigenvectors.shape[1]
        vecs = self.eigenvectors.reshape(self.rank, n * n)
        return (vecs.T * self.eigenvalues) @ vecs


def build_eri_matrix(integrals: IntegralSet) -> np.ndarray:
    """A[(i n + j), (k n + l)] = (ij|kl)."""
    n = integrals.n_orbitals
    return np.array(integrals.two_body).reshape(n * n, n * n)


def double_factorize(eri: np.ndarray, threshold: float = DEFAULT_THRESHOLD) -> DFFactorization:
    """Eigendecompose the ERI matrix and keep eigenpairs above ``threshold * lambda_max``."""
    eri = np.asarray(eri, dtype=float)
    if eri.ndim != 2 or eri.shape[0] != eri.shape[1]:
        raise DomainError("ERI matrix must be square")
    n = int(round(math.sqrt(eri.shape[0])))
    if n * n != eri.shape[0]:
        raise DomainError("ERI matrix dimension must be a perfect square")
    if not 0.0 <= threshold < 1.0:
        raise DomainError(f"threshold must lie in [0, 1), got {threshold}")
    scale = max(1.0, float(np.max(np.abs(eri), initial=0.0)))
    if not np.allclose(eri, eri.T, rtol=0, atol=1e-12 * scale):
        raise DomainError("ERI matrix is not symmetric")

    w, v = np.linalg.eigh(0.5 * (eri + eri.T))
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    lam_max = float(w[0]) if len(w) else 0.0
    if lam_max <= 0.0:
        if len(w) and w[-1] < -PSD_TOLERANCE * scale:
            raise NotPositiveSemidefiniteError("ERI not positive semi-definite")
        return DFFactorization(0, np.zeros(0), np.zeros((0, n, n)), threshold,
                               float(np.linalg.norm(w)))
    if w[-1] < -PSD_TOLERANCE * lam_max:
        raise NotPositiveSemidefiniteError(
            f"ERI not positive semi-definite (eigenvalue {w[-1]:.3e}, lambda_max {lam_max:.3e})"
        )
    keep = w > max(threshold, NOISE_FLOOR) * lam_max
    rank = int(np.count_nonzero(keep))
    vecs = v[:, keep].T.reshape(rank, n, n)
    # Retained vectors lie in the range of A, which is invariant under i<->j.
    vecs = 0.5 * (vecs + vecs.transpose(0, 2, 1))
    return DFFactorization(
        rank=rank,
        eigenvalues=w[keep].copy(),
        eigenvectors=vecs,
        truncation_threshold=threshold,
        discarded_weight=float(np.linalg.norm(w[~keep])),
    )


def effective_one_body(integrals: IntegralSet) -> np.ndarray:
    """One-body matrix whose eigenvalues enter the normalization.

    T_ij = h_ij - 1/2 sum_k (ik|kj) + sum_k (ij|kk)

    The second term comes from normal-ordering a+_i a+_k a_l a_j into
    E_ij E_kl; the third from the symmetric (Majorana) form of the squared
    one-body operators used by the double-factorized walk.
    """
    h1 = np.asarray(integrals.one_body)
    h2 = np.asarray(integrals.two_body)
    return h1 - 0.5 * np.einsum("ikkj->ij", h2) + np.einsum("ijkk->ij", h2)


def df_lambda(integrals: IntegralSet, fact: DFFactorization) -> tuple[float, float, float]:
    """(lambda_one_body, lambda_two_body, lambda_total) in Hartree.

    lambda_one_body = sum |eig(T)|
    lambda_two_body = 1/4 sum_l lambda_l (sum_k |eig(v_l)_k|)^2
    """
    lam1 = float(np.sum(np.abs(np.linalg.eigvalsh(effective_one_body(integrals)))))
    lam2 = 0.0
    for lam_l, v_l in zip(fact.eigenvalues, fact.eigenvectors):
        sigma = np.linalg.eigvalsh(v_l)
        lam2 += 0.25 * lam_l * float(np.sum(np.abs(sigma))) ** 2
    return lam1, lam2, lam1 + lam2


def rotation_t_cost(precision: float = 1e-10, slope: float = 3.0, offset: float = 1.0) -> float:
    """T gates per arbitrary rotation synthesized to ``precision``."""
    if not 0 < precision < 1:
        raise DomainError("rotation precision must lie in (0, 1)")
    return slope * math.log2(1.0 / precision) + offset


@dataclass(frozen=True)
class DFCostModel:
    """Calibrated power law for the double-factorized walk.

    t_count = c0 * N^a * L^b * (2^m)^c * R, with m the QPE precision
    qubits and R the T cost of one synthesized rotation. The logical qubit
    count is qubits_per_orbital * N plus the m control qubits, the
    ceil(log2 L) selection register and a fixed ancilla overhead.
    """

    qubits_per_orbital: float = 20.0
    ancilla_overhead: float | None = None
    c0: float | None = None
    exponent_orbitals: float = 2.0
    exponent_rank: float = 1.0
    exponent_queries: float = 1.0
    rotation_precision: float = 1e-10
    rotation_slope: float = 3.0
    rotation_offset: float = 1.0

    @property
    def calibrated(self) -> bool:
        return self.c0 is not None and self.ancilla_overhead is not None

    def check(self) -> None:
        if not self.calibrated:
            raise ConfigurationError("DF cost model is not calibrated (c0/ancilla_overhead unset)")
        positive = (self.qubits_per_orbital, self.c0, self.exponent_orbitals,
                    self.exponent_rank, self.exponent_queries, self.rotation_slope)
        if min(positive) <= 0 or self.ancilla_overhead < 0:
            raise ConfigurationError("DF cost-model constants must be positive")

    def with_updates(self, **kw) -> "DFCostModel":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)


def df_logical_cost(n_orbitals: int, fact, lambda_total: float, delta_e: float,
                    model: DFCostModel) -> LogicalResources:
    """``fact`` is a :class:`DFFactorization` or a bare rank L."""
    model.check()
    rank = fact.rank if isinstance(fact, DFFactorization) else int(fact)
    if n_orbitals < 1:
        raise DomainError("n_orbitals must be positive")
    if not delta_e > 0:
        raise DomainError("delta_E must be positive")
    m = precision_qubits(lambda_total, delta_e)
    ladder = 2.0**m
    rot = rotation_t_cost(model.rotation_precision, model.rotation_slope, model.rotation_offset)
    per_query = (model.c0 * n_orbitals**model.exponent_orbitals
                 * max(rank, 1) ** model.exponent_rank * rot)
    t_count = per_query * ladder**model.exponent_queries
    select_bits = math.ceil(math.log2(rank)) if rank > 1 else 0
    qubits = round(model.qubits_per_orbital * n_orbitals) + m + select_bits
    qubits += round(model.ancilla_overhead)
    return LogicalResources(
        logical_qubits=int(qubits),
        t_count=float(t_count),
        encoding="double-factorized",
        lambda_total=float(lambda_total),
        delta_e=float(delta_e),
        precision_qubits=m,
        walk_queries=2**m - 1,
        t_per_query=float(per_query),
        details={"n_orbitals": int(n_orbitals), "rank": int(rank),
                 "rotation_t_cost": rot},
    )


def factorization_summary(integrals: IntegralSet, fact: DFFactorization,
                          logical: LogicalResources | None = None) -> dict:
    lam1, lam2, lam = df_lambda(integrals, fact)
    record = {
        "n_orbitals": integrals.n_orbitals,
        "L": fact.rank,
        "lambda_one_body": lam1,
        "lambda_two_body": lam2,
        "lambda_total": lam,
    }
    if logical is not None:
        record["logical_qubits"] = logical.logical_qubits
        record["t_count"] = logical.t_count
    return record
