"""Logical and physical resource records passed between the cost models."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class LogicalResources:
    """Logical cost of one QPE shot.

    ``logical_depth`` counts sequential T-layers; when left at None it is
    taken equal to ``t_count`` (one T gate per logical time step).
    """

    logical_qubits: int
    t_count: float
    encoding: str = ""
    lambda_total: float | None = None
    delta_e: float | None = None
    precision_qubits: int | None = None
    walk_queries: int | None = None
    t_per_query: float | None = None
    logical_depth: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.logical_qubits < 0 or self.t_count < 0:
            raise ValueError("resource counts must be non-negative")

    @property
    def depth(self) -> float:
        return self.t_count if self.logical_depth is None else self.logical_depth

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PhysicalResources:
    code_distance: int
    physical_qubits: int
    t_factories: int
    physical_qubits_per_factory: int
    runtime: float  # seconds
    algorithm_qubits: int = 0
    factory_qubits: int = 0
    code_cycles: float = 0.0

    def __post_init__(self):
        if self.code_distance % 2 == 0:
            raise ValueError("code distance must be odd")
        if min(self.physical_qubits, self.t_factories, self.runtime) < 0:
            raise ValueError("physical resources must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)
