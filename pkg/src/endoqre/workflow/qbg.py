"""Quantum benchmarking graph: a call graph annotated with resource costs.

Edges run from a node to the node that provides one of its requirements,
labelled with the requirement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import networkx as nx

from endoqre.errors import ValidationError
from endoqre.resources import LogicalResources, PhysicalResources

__all__ = [
    "QBGNode",
    "QBGGraph",
    "QBGTotals",
    "FreeVolume",
    "build_qbg",
    "aggregate",
    "free_radius",
    "GeometryError",
    "HL_POINTS_PER_PATHWAY",
]

KINDS = ("classical", "quantum")
LEVELS = ("workflow", "algorithm", "subroutine")
# high-level energies at s = -1, s_half, 0, +1
HL_POINTS_PER_PATHWAY = 4


@dataclass(frozen=True)
class QBGNode:
    id: str
    kind: str
    abstraction_level: str
    label: str = ""
    provides: tuple = ()
    requires: tuple = ()
    invocations: int = 1
    logical: LogicalResources | None = None
    physical: PhysicalResources | None = None
    shots: int = 1
    classical_cost: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "provides", tuple(self.provides))
        object.__setattr__(self, "requires", tuple(self.requires))
        if not self.id:
            raise ValidationError("node id must be non-empty")
        if self.kind not in KINDS:
            raise ValidationError(f"node kind must be one of {KINDS}, got {self.kind!r}")
        if self.abstraction_level not in LEVELS:
            raise ValidationError(f"abstraction level must be one of {LEVELS}")
        if self.invocations < 0 or self.shots < 1:
            raise ValidationError("invocations must be >= 0 and shots >= 1")

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "kind": self.kind,
            "abstraction_level": self.abstraction_level,
            "label": self.label or self.id,
            "provides": list(self.provides),
            "requires": list(self.requires),
            "invocations": self.invocations,
            "shots": self.shots,
        }
        if self.logical is not None:
            out["logical"] = self.logical.to_dict()
        if self.physical is not None:
            out["physical"] = self.physical.to_dict()
        if self.classical_cost:
            out["classical_cost"] = dict(self.classical_cost)
        return out


class QBGGraph:
    def __init__(self, nodes=()):
        self._g = nx.DiGraph()
        for node in nodes:
            self.add_node(node)

    def add_node(self, node: QBGNode) -> None:
        if node.id in self._g:
            raise ValidationError(f"duplicate node id {node.id!r}")
        self._g.add_node(node.id, node=node)

    def remove_node(self, node_id: str) -> None:
        self._g.remove_node(node_id)

    def add_edge(self, src: str, dst: str, label: str) -> None:
        """Explicit edge, for custom graphs that bypass requirement matching."""
        for n in (src, dst):
            if n not in self._g:
                raise ValidationError(f"unknown node {n!r}")
        labels = self._g.edges[src, dst]["labels"] if self._g.has_edge(src, dst) else []
        self._g.add_edge(src, dst, labels=sorted(set(labels) | {label}))

    @property
    def nodes(self) -> list[QBGNode]:
        return [self._g.nodes[n]["node"] for n in sorted(self._g.nodes)]

    def node(self, node_id: str) -> QBGNode:
        return self._g.nodes[node_id]["node"]

    def __contains__(self, node_id) -> bool:
        return node_id in self._g

    def __len__(self) -> int:
        return self._g.number_of_nodes()

    def resolve(self) -> nx.DiGraph:
        """Graph with requirement edges added; raises on unresolved requirements."""
        g = self._g.copy()
        providers: dict[str, list[str]] = {}
        for n in g.nodes:
            for label in g.nodes[n]["node"].provides:
                providers.setdefault(label, []).append(n)
        for n in sorted(g.nodes):
            for label in g.nodes[n]["node"].requires:
                found = providers.get(label)
                if not found:
                    raise ValidationError(f"node {n!r}: unresolved requirement {label!r}")
                for p in found:
                    labels = g.edges[n, p]["labels"] if g.has_edge(n, p) else []
                    g.add_edge(n, p, labels=sorted(set(labels) | {label}))
        return g

    def validate(self) -> nx.DiGraph:
        g = self.resolve()
        if not nx.is_directed_acyclic_graph(g):
            cycle = nx.find_cycle(g)
            raise ValidationError(f"QBG has a cycle: {cycle}")
        return g

    def to_json(self) -> str:
        g = self.validate()
        data = {
            "nodes": [self.node(n).to_dict() for n in sorted(g.nodes)],
            "edges": [{"source": u, "target": v, "labels": g.edges[u, v]["labels"]}
                      for u, v in sorted(g.edges)],
        }
        return json.dumps(data, indent=2, sort_keys=True)

    def to_dot(self) -> str:
        g = self.validate()

        def q(s):
            return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'

        lines = ["digraph QBG {", "  rankdir=TB;"]
        for level in LEVELS:
            members = [n for n in sorted(g.nodes) if self.node(n).abstraction_level == level]
            if not members:
                continue
            lines.append(f"  subgraph cluster_{level} {{")
            lines.append(f"    label={q(level)};")
            for n in members:
                node = self.node(n)
                colour = "plum" if node.kind == "quantum" else "palegreen"
                lines.append(f"    {q(n)} [label={q(node.label or n)}, style=filled, "
                             f"fillcolor={colour}];")
            lines.append("  }")
        for u, v in sorted(g.edges):
            lines.append(f"  {q(u)} -> {q(v)} [label={q(', '.join(g.edges[u, v]['labels']))}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class QBGTotals:
    t_count: float = 0.0
    logical_qubits_max: int = 0
    physical_qubits_max: int = 0
    quantum_invocations: int = 0
    quantum_runtime: float = 0.0  # seconds
    classical_invocations: dict = field(default_factory=dict)
    classical_wall_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "t_count": self.t_count,
            "logical_qubits_max": self.logical_qubits_max,
            "physical_qubits_max": self.physical_qubits_max,
            "quantum_invocations": self.quantum_invocations,
            "quantum_runtime_seconds": self.quantum_runtime,
            "classical_invocations": dict(sorted(self.classical_invocations.items())),
            "classical_wall_seconds": self.classical_wall_seconds,
        }


def aggregate(graph: QBGGraph) -> QBGTotals:
    """Sum T-counts and runtimes over invocations; take maxima of qubit counts."""
    if len(graph) == 0:
        return QBGTotals()
    graph.validate()
    t_total = runtime = wall = 0.0
    q_max = p_max = q_calls = 0
    classical = {}
    for node in graph.nodes:
        if node.kind == "quantum":
            if node.logical is None:
                continue
            calls = node.invocations * node.shots
            t_total += calls * node.logical.t_count
            q_calls += node.invocations
            q_max = max(q_max, node.logical.logical_qubits)
            if node.physical is not None:
                runtime += calls * node.physical.runtime
                p_max = max(p_max, node.physical.physical_qubits)
        else:
            classical[node.id] = classical.get(node.id, 0) + node.invocations
            wall += node.invocations * float(node.classical_cost.get("wall_seconds", 0.0))
    return QBGTotals(t_total, q_max, p_max, q_calls, runtime, classical, wall)


def build_qbg(n_geometries: int, n_targets: int, qpe_logical: LogicalResources | None = None,
              qpe_physical: PhysicalResources | None = None, shots: int = 1,
              encoding: str = "double-factorized") -> QBGGraph:
    """The ozone-isomerization graph for the nested campaign loops.

    Per geometry: one XTB/Langevin generation and three DFT jobs
    (relaxation, formation energy, forces). Per target: one CI-NEB path,
    four QPE energies with their initial states and three DFT Hessians.
    """
    if n_geometries < 1 or n_targets < 1:
        raise ValidationError("n_geometries and n_targets must be >= 1")
    pairs = n_geometries * n_targets
    qpe_calls = pairs * HL_POINTS_PER_PATHWAY
    per_query = None if qpe_logical is None else {"t_per_query": qpe_logical.t_per_query,
                                                   "lambda": qpe_logical.lambda_total}
    nodes = [
        QBGNode("evaluate_stability", "classical", "workflow", "Evaluate Stability",
                provides=("stability assessment",),
                requires=("rate constants", "energies and atomic forces"), invocations=1),
        QBGNode("vtst", "classical", "algorithm", "VTST", provides=("rate constants",),
                requires=("ground state energies", "reaction pathway", "vibrational frequencies"),
                invocations=pairs),
        QBGNode("qpe", "quantum", "algorithm", "QPE", provides=("ground state energies",),
                requires=("block encoding", "initial state", "molecular geometries"),
                invocations=qpe_calls, logical=qpe_logical, physical=qpe_physical, shots=shots),
        QBGNode("block_encoding", "quantum", "subroutine", f"Block encoding ({encoding})",
                provides=("block encoding",), requires=("molecular geometries",),
                invocations=0, classical_cost=per_query or {}),
        QBGNode("initial_state", "classical", "subroutine", "DMRG / Selected CI",
                provides=("initial state",), requires=("molecular geometries",),
                invocations=qpe_calls),
        QBGNode("ci_neb", "classical", "algorithm", "CI-NEB",
                provides=("reaction pathway", "molecular geometries"),
                requires=("energies and atomic forces",), invocations=pairs),
        QBGNode("tzvp_pbe", "classical", "subroutine", "TZVP-PBE",
                provides=("energies and atomic forces", "vibrational frequencies"),
                requires=("initial geometries",),
                invocations=3 * n_geometries + 3 * pairs),
        QBGNode("xtb_langevin", "classical", "subroutine", "XTB / Langevin",
                provides=("initial geometries",), invocations=n_geometries),
    ]
    graph = QBGGraph(nodes)
    graph.validate()
    return graph


class GeometryError(ValidationError):
    """Cage too small to hold anything."""


@dataclass(frozen=True)
class FreeVolume:
    cage_radius: float  # Angstrom
    vdw_radius: float
    free_radius: float


def free_radius(r0: float, r_vdw: float) -> FreeVolume:
    """R_free = R0 - R_vdW / 2 for a spherical cage."""
    if not (math.isfinite(r0) and math.isfinite(r_vdw)) or r_vdw < 0:
        raise ValidationError("radii must be finite and non-negative")
    r = r0 - r_vdw / 2.0
    if r <= 0:
        raise GeometryError(f"no free volume: R0 = {r0} <= R_vdW / 2 = {r_vdw / 2}")
    return FreeVolume(r0, r_vdw, r)
