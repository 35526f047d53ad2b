"""Surface-code overhead: code distance, physical qubits, T factories, runtime.

Logical error per logical qubit per code cycle is modeled as
a * (p / p_th)^((d + 1) / 2). T gates are consumed sequentially, one per
logical time step of d code cycles, and supplied by a pool of identical
distillation factories treated as black boxes.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from endoqre.errors import ConfigurationError, DomainError
from endoqre.qpe import QPEPlan
from endoqre.resources import LogicalResources, PhysicalResources

__all__ = [
    "HardwareModel",
    "BUILTIN_PROFILES",
    "load_hardware_profile",
    "code_distance",
    "physical_resources",
    "runtime_report",
]

MAX_DISTANCE = 201


@dataclass(frozen=True)
class HardwareModel:
    gate_time: float = 50e-9
    measurement_time: float = 100e-9
    physical_error_rate: float = 1e-4
    error_budget: float = 0.01
    threshold: float = 0.01
    prefactor: float = 0.03
    # code cycle = (gate_time + measurement_time) * cycle_factor; 4 gate
    # layers plus 2 measurement rounds gives 400 ns / 150 ns.
    cycle_factor: float = 8.0 / 3.0
    # multiplier on 2(d+1)^2 per logical qubit for routing space
    routing_overhead: float = 1.0
    # factory footprint in units of logical-qubit patches
    factory_tiles: float = 16.0
    factory_states_per_run: float = 1.0
    # factory run duration in logical time steps (d code cycles each)
    factory_run_steps: float = 13.0
    min_distance: int = 3
    name: str = "qubit_gate_ns_e4"

    def __post_init__(self):
        if not 0 < self.physical_error_rate:
            raise DomainError("physical error rate must be positive")
        if self.physical_error_rate >= self.threshold:
            raise DomainError(
                f"physical error rate {self.physical_error_rate} is not below threshold "
                f"{self.threshold}: below threshold required"
            )
        if not 0 < self.error_budget < 1:
            raise DomainError("error budget must lie in (0, 1)")
        if self.min_distance < 1 or self.min_distance % 2 == 0:
            raise DomainError("minimum distance must be a positive odd integer")
        for name in ("gate_time", "measurement_time", "prefactor", "cycle_factor",
                     "routing_overhead", "factory_tiles", "factory_states_per_run",
                     "factory_run_steps"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"hardware constant {name} must be positive")

    @property
    def cycle_time(self) -> float:
        """Duration of one syndrome-extraction cycle, seconds."""
        return (self.gate_time + self.measurement_time) * self.cycle_factor

    @staticmethod
    def qubits_per_logical(d: int) -> int:
        return 2 * (d + 1) ** 2

    def logical_error_rate(self, d: int) -> float:
        return self.prefactor * (self.physical_error_rate / self.threshold) ** ((d + 1) / 2)

    def with_updates(self, **kw) -> "HardwareModel":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_dict(cls, data: dict) -> "HardwareModel":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown hardware fields: {sorted(unknown)}")
        return cls(**data)


BUILTIN_PROFILES = {"qubit_gate_ns_e4": HardwareModel()}


def load_hardware_profile(source=None) -> HardwareModel:
    """Load a profile by built-in name, JSON path or mapping.

    ``None`` and ``"calibrated"`` return the built-in profile with constants
    fitted to the published resource table.
    """
    if source is None or source == "calibrated":
        from endoqre.calibration import calibrated_hardware

        return calibrated_hardware()
    if isinstance(source, HardwareModel):
        return source
    if isinstance(source, dict):
        return HardwareModel.from_dict(source)
    if isinstance(source, str) and source in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[source]
    path = Path(source)
    if not path.exists():
        raise ConfigurationError(f"hardware profile {source!r} not found")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"hardware profile {path} is not valid JSON: {exc}") from None
    return HardwareModel.from_dict(data)


def _failure_probability(logical: LogicalResources, hw: HardwareModel, d: int) -> float:
    cycles = logical.depth * d
    return logical.logical_qubits * cycles * hw.logical_error_rate(d)


def code_distance(logical: LogicalResources, hw: HardwareModel) -> int:
    """Smallest odd d whose accumulated logical failure fits the error budget."""
    if hw.physical_error_rate >= hw.threshold:
        raise DomainError("below threshold required")
    d = hw.min_distance
    while _failure_probability(logical, hw, d) > hw.error_budget:
        d += 2
        if d > MAX_DISTANCE:
            raise DomainError(f"no code distance up to {MAX_DISTANCE} meets the error budget")
    return d


def factory_count(logical: LogicalResources, hw: HardwareModel) -> int:
    """Factories needed so distillation keeps pace with one T per logical step."""
    if logical.t_count <= 0:
        return 0
    return math.ceil(hw.factory_run_steps / hw.factory_states_per_run - 1e-9)


def physical_resources(logical: LogicalResources, hw: HardwareModel) -> PhysicalResources:
    d = code_distance(logical, hw)
    per_logical = hw.qubits_per_logical(d)
    algorithm = math.ceil(hw.routing_overhead * logical.logical_qubits * per_logical)
    n_factories = factory_count(logical, hw)
    per_factory = math.ceil(hw.factory_tiles * per_logical)
    factory_qubits = n_factories * per_factory
    cycles = logical.depth * d
    return PhysicalResources(
        code_distance=d,
        physical_qubits=algorithm + factory_qubits,
        t_factories=n_factories,
        physical_qubits_per_factory=per_factory if n_factories else 0,
        runtime=cycles * hw.cycle_time,
        algorithm_qubits=algorithm,
        factory_qubits=factory_qubits,
        code_cycles=cycles,
    )


def runtime_report(plan: QPEPlan, phys: PhysicalResources, n_energy_points: int = 1) -> float:
    """Campaign wall-clock seconds: single-shot runtime x shots x energy points."""
    if n_energy_points < 0:
        raise DomainError("number of energy points must be non-negative")
    return phys.runtime * plan.shots * n_energy_points
