"""Dual plane-wave Hamiltonian tables and linear-T encoding cost.

Grid points r_p = p * a0 with p in [0, M)^3 and momenta k = 2 pi nu / L
with each nu component in [-floor(M/2), ceil(M/2) - 1]. Every table is a
cosine sum over nu, so each is one FFT of a function on the momentum grid:

    T(d) = (1/N) sum_nu k^2 cos(k . r_d)
    V(d) = (2 pi / Omega) sum_{nu != 0} cos(k . r_d) / k^2
    U(p) = -(4 pi / Omega) sum_{j, nu != 0} zeta_j cos(k . (R_j - r_p)) / k^2

Internally everything is in atomic units (bohr, Hartree).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources as _res

import numpy as np

from endoqre.df_encoding import rotation_t_cost
from endoqre.errors import DomainError, ValidationError
from endoqre.io_formats import Atom, MolecularGeometry, parse_xyz
from endoqre.qpe import DEFAULT_DELTA_E, precision_qubits
from endoqre.reference_data import (DPW_CUTOFF_RY, DPW_O3_C60_T_COUNT,
                                    DPW_VACUUM_PADDING_ANGSTROM, TABLE3)
from endoqre.resources import LogicalResources
from endoqre.units import BOHR_ANGSTROM, RYDBERG_HARTREE

__all__ = [
    "UnsupportedGeometryError",
    "DPWGrid",
    "DPWHamiltonian",
    "grid_spacing_from_cutoff",
    "grid_points_for_cell",
    "build_dpw_hamiltonian",
    "dpw_lambda",
    "dpw_term_count",
    "dpw_logical_cost",
    "calibrate_dpw_constant",
    "tables_to_csv",
    "c60_cage",
    "ozone",
    "o3_at_c60",
]

KINETIC_CONVENTIONS = ("printed", "halved")


class UnsupportedGeometryError(ValidationError):
    """Raised for cells the dual plane-wave tables cannot describe."""


def grid_spacing_from_cutoff(e_cut: float, units: str = "Ry") -> float:
    """a0 = sqrt(2 pi^2 / E_cut) in bohr, returned in Angstrom."""
    if not (isinstance(e_cut, (int, float)) and math.isfinite(e_cut) and e_cut > 0):
        raise DomainError(f"plane-wave cutoff must be positive, got {e_cut}")
    u = units.lower()
    if u in ("ry", "rydberg"):
        e_ha = e_cut * RYDBERG_HARTREE
    elif u in ("ha", "hartree"):
        e_ha = float(e_cut)
    else:
        raise DomainError(f"unknown cutoff unit {units!r}")
    return math.sqrt(2.0 * math.pi**2 / e_ha) * BOHR_ANGSTROM


def grid_points_for_cell(edge: float, spacing: float) -> int:
    """Smallest M whose spacing edge/M does not exceed ``spacing`` (both Angstrom)."""
    if not (edge > 0 and spacing > 0):
        raise DomainError("cell edge and spacing must be positive")
    return max(2, math.ceil(edge / spacing - 1e-9))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DPWGrid:
    points_per_dim: int
    cell_edge: float  # Angstrom

    def __post_init__(self):
        if int(self.points_per_dim) != self.points_per_dim or self.points_per_dim < 2:
            raise DomainError("points per dimension must be an integer >= 2")
        if not self.cell_edge > 0:
            raise DomainError("cell edge must be positive")

    @property
    def n_points(self) -> int:
        return self.points_per_dim**3

    @property
    def spacing(self) -> float:
        return self.cell_edge / self.points_per_dim

    @property
    def volume(self) -> float:
        return self.cell_edge**3

    @property
    def edge_bohr(self) -> float:
        return self.cell_edge / BOHR_ANGSTROM

    @property
    def volume_bohr(self) -> float:
        return self.edge_bohr**3

    def nu_axis(self) -> np.ndarray:
        """Integer modes in FFT order; covers [-floor(M/2), ceil(M/2) - 1]."""
        m = self.points_per_dim
        return np.rint(np.fft.fftfreq(m, d=1.0 / m)).astype(int)

    def k_squared(self) -> np.ndarray:
        """|k|^2 on the (M, M, M) momentum grid, bohr^-2, FFT order."""
        k = 2.0 * np.pi * self.nu_axis() / self.edge_bohr
        return k[:, None, None] ** 2 + k[None, :, None] ** 2 + k[None, None, :] ** 2

    def momenta(self) -> np.ndarray:
        """(N, 3) k vectors in FFT order."""
        k = 2.0 * np.pi * self.nu_axis() / self.edge_bohr
        kx, ky, kz = np.meshgrid(k, k, k, indexing="ij")
        return np.stack([kx.ravel(), ky.ravel(), kz.ravel()], axis=1)

    def points(self) -> np.ndarray:
        """(N, 3) grid positions in bohr, C order over (px, py, pz)."""
        m = self.points_per_dim
        idx = np.arange(m)
        px, py, pz = np.meshgrid(idx, idx, idx, indexing="ij")
        return np.stack([px.ravel(), py.ravel(), pz.ravel()], axis=1) * (self.edge_bohr / m)

    def to_dict(self) -> dict:
        return {"points_per_dim": self.points_per_dim, "n_points": self.n_points,
                "cell_edge_angstrom": self.cell_edge, "spacing_angstrom": self.spacing,
                "volume_angstrom3": self.volume}


@dataclass(frozen=True)
class DPWHamiltonian:
    """Coefficient tables in Hartree.

    ``kinetic`` and ``coulomb`` are indexed by the displacement p - q taken
    modulo M along each axis; ``external`` by grid point p.
    """

    grid: DPWGrid
    kinetic: np.ndarray
    external: np.ndarray
    coulomb: np.ndarray
    kinetic_convention: str = "printed"
    lambda_components: tuple = field(default=None)

    def __post_init__(self):
        shape = (self.grid.points_per_dim,) * 3
        for name in ("kinetic", "external", "coulomb"):
            arr = _freeze(getattr(self, name))
            if arr.shape != shape:
                raise ValidationError(f"{name} table must have shape {shape}, got {arr.shape}")
            object.__setattr__(self, name, arr)
        if self.lambda_components is None:
            object.__setattr__(self, "lambda_components", dpw_lambda(self)[:3])

    @property
    def lambda_total(self) -> float:
        return float(sum(self.lambda_components))

    def summary(self) -> dict:
        lam_t, lam_u, lam_v = self.lambda_components
        return {
            "grid": self.grid.to_dict(),
            "kinetic_convention": self.kinetic_convention,
            "lambda_T": lam_t,
            "lambda_U": lam_u,
            "lambda_V": lam_v,
            "lambda_total": self.lambda_total,
            "n_terms": dpw_term_count(self.grid.n_points),
        }


def build_dpw_hamiltonian(geometry: MolecularGeometry, points_per_dim: int,
                          kinetic_convention: str = "printed") -> DPWHamiltonian:
    """Tabulate T, U and V for ``geometry`` on an M^3 grid.

    ``kinetic_convention="halved"`` divides the kinetic table by 2N instead of N.
    """
    if not geometry.is_cubic:
        raise UnsupportedGeometryError(f"dual plane-wave tables need a cubic cell, got {geometry.cell}")
    if kinetic_convention not in KINETIC_CONVENTIONS:
        raise DomainError(f"kinetic convention must be one of {KINETIC_CONVENTIONS}")
    geometry.validate()
    grid = DPWGrid(int(points_per_dim), geometry.cell[0])
    n = grid.n_points
    omega = grid.volume_bohr

    k2 = grid.k_squared()
    inv_k2 = np.zeros_like(k2)
    nonzero = k2 > 0
    inv_k2[nonzero] = 1.0 / k2[nonzero]

    kinetic = np.fft.ifftn(k2).real
    if kinetic_convention == "halved":
        kinetic = 0.5 * kinetic
    coulomb = (2.0 * np.pi / omega) * n * np.fft.ifftn(inv_k2).real

    zeta = geometry.atomic_numbers.astype(float)
    if len(zeta):
        pos = geometry.positions / BOHR_ANGSTROM
        phase = grid.momenta() @ pos.T  # (N, atoms)
        structure = (np.exp(1j * phase) @ zeta).reshape(k2.shape)
        external = -(4.0 * np.pi / omega) * np.fft.fftn(structure * inv_k2).real
    else:
        external = np.zeros(k2.shape)
    return DPWHamiltonian(grid, kinetic, external, coulomb, kinetic_convention)


def dpw_lambda(ham: DPWHamiltonian) -> tuple[float, float, float, float]:
    """(lambda_T, lambda_U, lambda_V, lambda_total) with both spins counted.

    lambda_T = sum_{p, q, sigma} |T(p - q)|, lambda_U = sum_{p, sigma} |U(p)|
    and lambda_V = sum over ordered spin-orbital pairs (p a) != (q b) of
    |V(p - q)|. Each displacement occurs N times among the (p, q) pairs; the
    same-site pair only couples opposite spins.
    """
    n = ham.grid.n_points
    abs_v = np.abs(ham.coulomb)
    lam_t = 2.0 * n * float(np.sum(np.abs(ham.kinetic)))
    lam_u = 2.0 * float(np.sum(np.abs(ham.external)))
    lam_v = 4.0 * n * float(np.sum(abs_v) - abs_v[0, 0, 0]) + 2.0 * n * float(abs_v[0, 0, 0])
    return lam_t, lam_u, lam_v, lam_t + lam_u + lam_v


def dpw_term_count(n_points: int) -> int:
    """Distinct spin-orbital terms: hopping, on-site potential and density pairs."""
    n_so = 2 * n_points
    return 2 * n_points**2 + n_so + n_so * (n_so - 1)


def dpw_logical_cost(ham: DPWHamiltonian, delta_e: float = DEFAULT_DELTA_E,
                     c_dpw: float = 1.0, rotation_precision: float = 1e-10) -> LogicalResources:
    """Linear-T walk: t_count = c_DPW * N * 2^m * R."""
    if not delta_e > 0:
        raise DomainError("delta_E must be positive")
    if not c_dpw > 0:
        raise DomainError("c_DPW must be positive")
    n = ham.grid.n_points
    lam = ham.lambda_total
    m = precision_qubits(lam, delta_e)
    rot = rotation_t_cost(rotation_precision)
    per_query = c_dpw * n * rot
    select_bits = math.ceil(math.log2(dpw_term_count(n)))
    return LogicalResources(
        logical_qubits=2 * n + select_bits + m,
        t_count=float(per_query * 2.0**m),
        encoding="dual-plane-wave",
        lambda_total=lam,
        delta_e=float(delta_e),
        precision_qubits=m,
        walk_queries=2**m - 1,
        t_per_query=float(per_query),
        details={"n_points": n, "points_per_dim": ham.grid.points_per_dim,
                 "select_qubits": select_bits, "rotation_t_cost": rot, "c_dpw": c_dpw},
    )


def calibrate_dpw_constant(ham: DPWHamiltonian, t_count: float = DPW_O3_C60_T_COUNT,
                           delta_e: float = DEFAULT_DELTA_E) -> float:
    """c_DPW that makes ``ham`` cost exactly ``t_count``."""
    if not t_count > 0:
        raise DomainError("reference T-count must be positive")
    return t_count / dpw_logical_cost(ham, delta_e, 1.0).t_count


def tables_to_csv(ham: DPWHamiltonian) -> str:
    """Displacement tables as CSV with columns dx, dy, dz, T, V (minimum-image indices)."""
    nu = ham.grid.nu_axis()
    m = ham.grid.points_per_dim
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dx", "dy", "dz", "T", "V"])
    for ix in range(m):
        for iy in range(m):
            for iz in range(m):
                w.writerow([nu[ix], nu[iy], nu[iz], repr(float(ham.kinetic[ix, iy, iz])),
                            repr(float(ham.coulomb[ix, iy, iz]))])
    return buf.getvalue()


# --------------------------------------------------------------------------
# Model endofullerene


def c60_cage(bond_scale: float = 0.7) -> np.ndarray:
    """Truncated-icosahedron vertices centred at the origin, Angstrom.

    The unit polyhedron has edge 2; ``bond_scale`` 0.7 gives 1.4 Angstrom bonds.
    """
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    seeds = [(0.0, 1.0, 3 * phi), (1.0, 2 + phi, 2 * phi), (phi, 2.0, 2 * phi + 1)]
    cyclic = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    pts = set()
    for seed in seeds:
        for perm in cyclic:
            base = [seed[i] for i in perm]
            for sx in (1, -1):
                for sy in (1, -1):
                    for sz in (1, -1):
                        v = (base[0] * sx, base[1] * sy, base[2] * sz)
                        pts.add(tuple(round(c, 12) + 0.0 for c in v))
    out = np.array(sorted(pts)) * bond_scale
    if len(out) != 60:  # pragma: no cover - geometric identity
        raise RuntimeError("C60 construction failed")
    return out


def ozone(bond: float | None = None, angle: float | None = None) -> np.ndarray:
    """Bent ozone centred on its centroid, in the xy plane, Angstrom."""
    r0, theta0 = TABLE3["exp"]["open"]
    bond = r0 if bond is None else bond
    theta = math.radians(theta0 if angle is None else angle)
    apex = np.array([0.0, 0.0, 0.0])
    left = bond * np.array([-math.sin(theta / 2), -math.cos(theta / 2), 0.0])
    right = bond * np.array([math.sin(theta / 2), -math.cos(theta / 2), 0.0])
    xyz = np.array([apex, left, right])
    return xyz - xyz.mean(axis=0)


def o3_at_c60(padding: float = DPW_VACUUM_PADDING_ANGSTROM) -> MolecularGeometry:
    """Model O3@C60 from the shipped XYZ file, boxed with ``padding`` of vacuum."""
    text = _res.files("endoqre").joinpath("data/o3_at_c60.xyz").read_text()
    return parse_xyz(text, vacuum_padding=padding)


def _o3_at_c60_xyz() -> str:
    atoms = [Atom("O", 8, tuple(p)) for p in ozone()]
    atoms += [Atom("C", 6, tuple(p)) for p in c60_cage()]
    lines = [str(len(atoms)), "O3@C60 model: bent ozone at the cage centre"]
    lines += [f"{a.symbol} {a.position[0]: .8f} {a.position[1]: .8f} {a.position[2]: .8f}"
              for a in atoms]
    return "\n".join(lines) + "\n"


DEFAULT_CUTOFF_RY = DPW_CUTOFF_RY
