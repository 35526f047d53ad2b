"""External chemistry tools behind a narrow interface, plus a fixture-backed mock."""

from __future__ import annotations

import json
import math
import threading
from abc import ABC, abstractmethod
from importlib import resources as _res

import numpy as np

from endoqre.errors import AdapterError, ValidationError
from endoqre.reference_data import TABLE2_EV
from endoqre.units import to_hartree
from endoqre.vtst import HESSIAN_WAVENUMBER, HessianInput

__all__ = ["ChemistryAdapters", "MockAdapters", "load_ozone_fixture", "build_ozone_fixture"]

FIXTURE_FILE = "data/ozone_mock.json"


class ChemistryAdapters(ABC):
    """What a campaign needs from the classical and quantum back ends.

    Energies are returned in Hartree. Implementations that are not safe to
    call from several threads set ``serial = True``.
    """

    serial: bool = False
    name: str = "abstract"

    @abstractmethod
    def generate_geometry(self, i: int) -> dict:
        """Relaxed endofullerene geometry for sample ``i`` (metadata only)."""

    @abstractmethod
    def low_level_path(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        """(s, V_LL) along the minimum energy path of target ``j``."""

    def half_point(self, i: int, j: int) -> float:
        """Auxiliary coordinate s_half on the reactant side."""
        return -0.5

    @abstractmethod
    def high_level_energies(self, i: int, j: int, s_points) -> list[float]:
        """High-level energies at the requested path coordinates."""

    @abstractmethod
    def hessian(self, i: int, j: int, s: float) -> HessianInput:
        """Low-level Hessian at one of s = -1, 0, +1."""


def build_ozone_fixture(s_half: float = -0.75, l_target: float = 0.3, n_path: int = 41) -> dict:
    """Synthetic cyclic-to-open ozone data anchored on the published energies.

    Energies are relative to cyclic ozone (the reactant, s = -1). The
    low-level path uses the CASSCF(18,12)/cc-pVTZ stationary points joined
    by sin^2 segments; the high-level anchors use extrapolated SHCI. The
    s_half energy is chosen so the SIL-1 condition is met at
    L = ``l_target``; it is not a published value.
    """
    ll = TABLE2_EV["CASSCF(18,12)/cc-pVTZ"]
    hl = TABLE2_EV["extrapolated SHCI/cc-pVTZ"]
    ts_ll, open_ll = ll[1] - ll[2], ll[0] - ll[2]
    ts_hl, open_hl = hl[1] - hl[2], hl[0] - hl[2]

    def v_ll(s):
        s = np.asarray(s, dtype=float)
        left = ts_ll * np.sin(np.pi * (s + 1) / 2) ** 2
        right = ts_ll + (open_ll - ts_ll) * np.sin(np.pi * s / 2) ** 2
        return np.where(s <= 0, left, right)

    s = np.round(np.linspace(-1.0, 1.0, n_path), 12)
    dv0 = ts_hl - ts_ll
    # symmetric correction: A = C = 0, B = 4 dV(0), s0 = 0
    x = s_half / l_target
    dv_half = 4 * dv0 / ((1 + math.exp(-x)) * (1 + math.exp(x)))
    v_hl_half = 2.0 * (float(v_ll(s_half)) + dv_half)
    return {
        "description": "mock ozone isomerization fixture (cyclic reactant, open product)",
        "units": "eV",
        "low_level": {"method": "CASSCF(18,12)/cc-pVTZ", "s": s.tolist(),
                      "V": [float(v) for v in v_ll(s)]},
        "high_level": {"method": "extrapolated SHCI/cc-pVTZ",
                       "s": [-1.0, s_half, 0.0, 1.0],
                       "V": [0.0, v_hl_half, ts_hl, open_hl]},
        # harmonic wavenumbers, cm^-1; negative entries are imaginary modes
        "frequencies": {"-1": [790.0, 790.0, 1120.0], "0": [-700.0, 520.0, 1150.0],
                        "1": [705.0, 1045.0, 1110.0]},
    }


def load_ozone_fixture() -> dict:
    text = _res.files("endoqre").joinpath(FIXTURE_FILE).read_text()
    return json.loads(text)


def _diagonal_hessian(wavenumbers) -> HessianInput:
    """Unit-mass, one-coordinate-per-mode Hessian with the given wavenumbers."""
    w = np.asarray(wavenumbers, dtype=float)
    diag = np.sign(w) * (w / HESSIAN_WAVENUMBER) ** 2
    return HessianInput(np.diag(diag), np.ones(len(w)))


class MockAdapters(ChemistryAdapters):
    """Fixture-backed adapters; every geometry and target returns the same data.

    ``fail_on`` holds (i, j) pairs, or bare j values, whose path request raises.
    """

    name = "mock"

    def __init__(self, fixture: dict | None = None, fail_on=(), serial: bool = False):
        self.fixture = fixture if fixture is not None else load_ozone_fixture()
        self.serial = serial
        self._fail = set()
        for item in fail_on:
            self._fail.add(tuple(item) if isinstance(item, (tuple, list)) else (None, int(item)))
        self._unit = self.fixture.get("units", "Ha")
        try:
            self._freq = {float(k): v for k, v in self.fixture["frequencies"].items()}
            self._ll = self.fixture["low_level"]
            self._hl = self.fixture["high_level"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed adapter fixture: {exc}") from None
        self._lock = threading.Lock()
        self.calls: dict[str, int] = {}

    def _count(self, what: str) -> None:
        with self._lock:
            self.calls[what] = self.calls.get(what, 0) + 1

    def _check(self, i: int, j: int, what: str) -> None:
        if (i, j) in self._fail or (None, j) in self._fail:
            raise AdapterError(f"mock {what} failed for geometry {i}, target {j}")

    def generate_geometry(self, i: int) -> dict:
        self._count("generate_geometry")
        return {"index": i, "source": "fixture"}

    def low_level_path(self, i, j):
        self._count("low_level_path")
        self._check(i, j, "CI-NEB")
        s = np.asarray(self._ll["s"], dtype=float)
        v = to_hartree(np.asarray(self._ll["V"], dtype=float), self._unit)
        return s, v

    def half_point(self, i, j):
        return float(self._hl["s"][1])

    def high_level_energies(self, i, j, s_points):
        self._count("high_level_energies")
        table = dict(zip((float(x) for x in self._hl["s"]), self._hl["V"]))
        out = []
        for s in s_points:
            if float(s) not in table:
                raise AdapterError(f"fixture has no high-level energy at s = {s}")
            out.append(to_hartree(float(table[float(s)]), self._unit))
        return out

    def hessian(self, i, j, s):
        self._count("hessian")
        key = float(s)
        if key not in self._freq:
            raise AdapterError(f"fixture has no frequencies at s = {s}")
        return _diagonal_hessian(self._freq[key])
