"""Readers and writers for FCIDUMP integrals, XYZ geometries and PES tables.

Orbital indices are 1-based in files and 0-based in memory; the conversion
happens here and nowhere else. Energies are converted to Hartree on input.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from endoqre.errors import FormatError, ValidationError
from endoqre.units import from_hartree, to_hartree

__all__ = [
    "Atom",
    "IntegralSet",
    "MolecularGeometry",
    "PESSamples",
    "ELEMENTS",
    "atomic_number",
    "parse_fcidump",
    "write_fcidump",
    "read_fcidump",
    "parse_xyz",
    "write_xyz",
    "read_xyz",
    "parse_cell",
    "parse_pes_table",
    "write_pes_table",
    "read_pes_table",
]

ELEMENTS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn "
    "Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba La Ce "
    "Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi Po At Rn "
    "Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl "
    "Mc Lv Ts Og"
).split()
_Z = {sym.lower(): z for z, sym in enumerate(ELEMENTS, start=1)}
# relative tolerance for repeated symmetry-equivalent entries
DUPLICATE_RTOL = 1e-10


def atomic_number(symbol: str) -> int:
    try:
        return _Z[symbol.strip().lower()]
    except KeyError:
        raise ValidationError(f"unknown element symbol {symbol!r}") from None


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _parse_float(token: str, line: int) -> float:
    try:
        value = float(token.replace("D", "E").replace("d", "e"))
    except ValueError:
        raise FormatError(f"non-numeric value {token!r}", line) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite value {token!r}", line)
    return value


def _parse_int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"expected an integer index, got {token!r}", line) from None


# --------------------------------------------------------------------------
# Integrals


@dataclass(frozen=True)
class IntegralSet:
    """Spatial-orbital integrals of a real, spin-restricted Hamiltonian.

    ``two_body[i, j, k, l]`` is the chemists'-notation integral (ij|kl).
    """

    n_orbitals: int
    n_electrons: int
    core_energy: float
    one_body: np.ndarray
    two_body: np.ndarray
    ms2: int = 0

    def __post_init__(self):
        object.__setattr__(self, "one_body", _frozen(self.one_body))
        object.__setattr__(self, "two_body", _frozen(self.two_body))
        self.validate()

    def validate(self, atol: float = 1e-12) -> None:
        n = self.n_orbitals
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValidationError(f"n_orbitals must be a positive integer, got {n!r}")
        if not 0 <= self.n_electrons <= 2 * n:
            raise ValidationError(
                f"n_electrons={self.n_electrons} incompatible with {n} spatial orbitals"
            )
        if not math.isfinite(self.core_energy):
            raise ValidationError("core energy is not finite")
        h1, h2 = self.one_body, self.two_body
        if h1.shape != (n, n) or h2.shape != (n, n, n, n):
            raise ValidationError("integral arrays have the wrong shape")
        if not (np.all(np.isfinite(h1)) and np.all(np.isfinite(h2))):
            raise ValidationError("integrals contain non-finite values")
        scale = atol * max(1.0, float(np.max(np.abs(h2), initial=0.0)))
        if not np.allclose(h1, h1.T, rtol=0, atol=atol * max(1.0, np.max(np.abs(h1)))):
            raise ValidationError("one-body integrals are not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(h2, h2.transpose(perm), rtol=0, atol=scale):
                raise ValidationError("two-body integrals lack 8-fold symmetry")

    def two_body_value(self, i, j, k, l):
        return float(self.two_body[i, j, k, l])


def _same(a: float, b: float) -> bool:
    # writers print symmetry partners from separately rounded doubles
    return abs(a - b) <= DUPLICATE_RTOL * max(abs(a), abs(b), 1.0)


def _expand_two_body(h2, i, j, k, l, value, line, filled):
    for p, q, r, s in {
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    }:
        if filled[p, q, r, s]:
            if not _same(h2[p, q, r, s], value):
                raise FormatError(
                    f"conflicting value for symmetry-equivalent integral "
                    f"({p + 1} {q + 1}|{r + 1} {s + 1})",
                    line,
                )
            continue
        h2[p, q, r, s] = value
        filled[p, q, r, s] = True


_HEADER_INT = re.compile(r"\b(NORB|NELEC|MS2|ISYM)\s*=\s*([-+]?\w+)", re.IGNORECASE)


def parse_fcidump(text: str | io.TextIOBase, units: str = "Ha") -> IntegralSet:
    """Parse a Molpro-style FCIDUMP document.

    Body lines are ``value i j k l``; ``i j 0 0`` is a one-body entry,
    ``0 0 0 0`` the core energy and four nonzero indices a two-body entry.
    Lines ``value i 0 0 0`` (orbital energies) are accepted and ignored.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()
    header_parts = []
    body_start = None
    for n, raw in enumerate(lines):
        stripped = raw.strip()
        if not header_parts and not stripped:
            continue
        header_parts.append(stripped)
        upper = stripped.upper()
        if "&END" in upper or upper == "/" or upper.endswith("/"):
            body_start = n + 1
            break
    if not header_parts or not header_parts[0].upper().startswith("&FCI"):
        raise FormatError("missing &FCI header", 1)
    if body_start is None:
        raise FormatError("unterminated &FCI header (no &END or '/')", len(lines))
    header = " ".join(header_parts)
    if re.search(r"\bUHF\s*=\s*\.?T", header, re.IGNORECASE):
        raise FormatError("unrestricted (UHF) FCIDUMP files are not supported", 1)
    keys = {}
    for key, val in _HEADER_INT.findall(header):
        try:
            keys[key.upper()] = int(val)
        except ValueError:
            raise FormatError(f"header field {key}={val!r} is not an integer", 1) from None
    for required in ("NORB", "NELEC"):
        if required not in keys:
            raise FormatError(f"header is missing {required}", 1)
    norb, nelec = keys["NORB"], keys["NELEC"]
    if norb < 1:
        raise FormatError(f"NORB must be positive, got {norb}", 1)
    if norb > 64:
        raise FormatError(f"NORB={norb} exceeds the dense-storage limit of 64", 1)
    if not 0 <= nelec <= 2 * norb:
        raise FormatError(f"NELEC={nelec} incompatible with NORB={norb}", 1)

    h1 = np.zeros((norb, norb))
    h1_filled = np.zeros((norb, norb), dtype=bool)
    h2 = np.zeros((norb,) * 4)
    h2_filled = np.zeros((norb,) * 4, dtype=bool)
    core = None
    for n in range(body_start, len(lines)):
        lineno = n + 1
        fields = lines[n].split()
        if not fields:
            continue
        if len(fields) != 5:
            raise FormatError(f"expected 5 fields, found {len(fields)}", lineno)
        value = to_hartree(_parse_float(fields[0], lineno), units)
        i, j, k, l = (_parse_int(t, lineno) for t in fields[1:])
        for idx in (i, j, k, l):
            if not 0 <= idx <= norb:
                raise FormatError(f"orbital index {idx} outside [0, {norb}]", lineno)
        if i and j and k and l:
            _expand_two_body(h2, i - 1, j - 1, k - 1, l - 1, value, lineno, h2_filled)
        elif i and j and not k and not l:
            for p, q in {(i - 1, j - 1), (j - 1, i - 1)}:
                if h1_filled[p, q]:
                    if not _same(h1[p, q], value):
                        raise FormatError(
                            f"conflicting value for one-body integral ({p + 1},{q + 1})", lineno
                        )
                    continue
                h1[p, q] = value
                h1_filled[p, q] = True
        elif not (i or j or k or l):
            if core is not None and not _same(core, value):
                raise FormatError("conflicting core energy", lineno)
            core = value
        elif i and not (j or k or l):
            continue
        else:
            raise FormatError(f"invalid index pattern {i} {j} {k} {l}", lineno)
    return IntegralSet(
        n_orbitals=norb,
        n_electrons=nelec,
        core_energy=0.0 if core is None else core,
        one_body=h1,
        two_body=h2,
        ms2=keys.get("MS2", 0),
    )


def read_fcidump(path, units: str = "Ha") -> IntegralSet:
    with open(path) as fh:
        return parse_fcidump(fh.read(), units=units)


def write_fcidump(integrals: IntegralSet, tol: float = 0.0) -> str:
    """Serialize to FCIDUMP text; floats are written with ``repr`` so they round-trip."""
    n = integrals.n_orbitals
    out = [
        f" &FCI NORB={n},NELEC={integrals.n_electrons},MS2={integrals.ms2},",
        "  ORBSYM=" + ",".join("1" * n) + ",",
        "  ISYM=1,",
        " &END",
    ]
    h1, h2 = integrals.one_body, integrals.two_body
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    v = h2[i, j, k, l]
                    if abs(v) > tol:
                        out.append(f"{float(v)!r} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            v = h1[i, j]
            if abs(v) > tol:
                out.append(f"{float(v)!r} {i + 1} {j + 1} 0 0")
    out.append(f"{float(integrals.core_energy)!r} 0 0 0 0")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# Geometry


@dataclass(frozen=True)
class Atom:
    symbol: str
    atomic_number: int
    position: tuple  # Angstrom


@dataclass(frozen=True)
class MolecularGeometry:
    """Atoms in an orthorhombic cell whose corner sits at the origin."""

    atoms: tuple
    cell: tuple  # edge lengths, Angstrom
    vacuum_padding: float = 0.0
    comment: str = ""

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "cell", tuple(float(c) for c in self.cell))
        self.validate()

    def validate(self, tol: float = 1e-9) -> None:
        if len(self.cell) != 3:
            raise ValidationError("cell must have three edge lengths")
        if not all(math.isfinite(c) and c > 0 for c in self.cell):
            raise ValidationError(f"cell edges must be positive, got {self.cell}")
        if not (math.isfinite(self.vacuum_padding) and self.vacuum_padding >= 0):
            raise ValidationError("vacuum padding must be non-negative")
        for atom in self.atoms:
            if atom.atomic_number < 1:
                raise ValidationError(f"atomic number must be >= 1, got {atom.atomic_number}")
            if len(atom.position) != 3 or not all(math.isfinite(x) for x in atom.position):
                raise ValidationError(f"atom {atom.symbol} has an invalid position")
            for x, edge in zip(atom.position, self.cell):
                if x < -tol or x > edge + tol:
                    raise ValidationError(
                        f"atom {atom.symbol} at {atom.position} lies outside the cell {self.cell}"
                    )

    @property
    def volume(self) -> float:
        a, b, c = self.cell
        return a * b * c

    @property
    def positions(self) -> np.ndarray:
        return np.array([a.position for a in self.atoms], dtype=float).reshape(-1, 3)

    @property
    def atomic_numbers(self) -> np.ndarray:
        return np.array([a.atomic_number for a in self.atoms], dtype=int)

    @property
    def is_cubic(self) -> bool:
        return max(self.cell) - min(self.cell) <= 1e-9 * max(self.cell)

    def translated(self, shift) -> "MolecularGeometry":
        shift = np.asarray(shift, dtype=float)
        atoms = [
            Atom(a.symbol, a.atomic_number, tuple(float(x) for x in np.add(a.position, shift)))
            for a in self.atoms
        ]
        return MolecularGeometry(atoms, self.cell, self.vacuum_padding, self.comment)

    def with_atomic_numbers_scaled(self, factor: int) -> "MolecularGeometry":
        atoms = [Atom(a.symbol, a.atomic_number * factor, a.position) for a in self.atoms]
        return MolecularGeometry(atoms, self.cell, self.vacuum_padding, self.comment)

    @classmethod
    def boxed(cls, atoms: Sequence[Atom], padding: float, cubic: bool = True,
              comment: str = "") -> "MolecularGeometry":
        """Centre ``atoms`` in a cell whose edge is the molecular extent plus ``padding``.

        ``padding`` is the vacuum gap separating periodic images.
        """
        if not (math.isfinite(padding) and padding > 0):
            raise ValidationError("vacuum padding must be positive")
        pos = np.array([a.position for a in atoms], dtype=float).reshape(-1, 3)
        if len(pos):
            lo, hi = pos.min(axis=0), pos.max(axis=0)
        else:
            lo = hi = np.zeros(3)
        extent = hi - lo
        edges = extent + padding
        if cubic:
            edges = np.full(3, edges.max())
        shift = edges / 2 - (lo + hi) / 2
        moved = [
            Atom(a.symbol, a.atomic_number, tuple(float(x) for x in p + shift))
            for a, p in zip(atoms, pos)
        ]
        return cls(moved, tuple(edges), padding, comment)


def parse_cell(cell) -> tuple:
    """Normalize a cell given as ``"a,b,c"``, three lengths or a 3x3 matrix."""
    if isinstance(cell, str):
        parts = [p for p in re.split(r"[,\s]+", cell.strip()) if p]
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ValidationError(f"cannot parse cell {cell!r}") from None
        cell = values
    arr = np.asarray(cell, dtype=float)
    if arr.shape == (3, 3):
        if np.any(np.abs(arr - np.diag(np.diag(arr))) > 1e-12):
            raise ValidationError("only orthorhombic cells are supported")
        arr = np.diag(arr)
    if arr.shape == (1,):
        arr = np.repeat(arr, 3)
    if arr.shape != (3,):
        raise ValidationError(f"cell must have 1, 3 or 3x3 entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValidationError(f"cell edges must be positive, got {arr.tolist()}")
    return tuple(float(x) for x in arr)


def parse_xyz(text: str | io.TextIOBase, cell=None, vacuum_padding: float | None = None
              ) -> MolecularGeometry:
    """Parse an XYZ document.

    With ``cell`` the coordinates are taken as-is and must fall inside it.
    Without ``cell`` the molecule is centred in a cubic box padded by
    ``vacuum_padding`` (default 10 Angstrom).
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("empty XYZ input", 1)
    try:
        count = int(lines[0].strip())
    except ValueError:
        raise FormatError(f"first line must be an atom count, got {lines[0]!r}", 1) from None
    if count < 0:
        raise FormatError("atom count must be non-negative", 1)
    comment = lines[1].strip() if len(lines) > 1 else ""
    body = lines[2:]
    if len(body) != count:
        raise FormatError(f"declared {count} atoms but found {len(body)} atom lines",
                          min(len(lines), 3 + count))
    atoms = []
    for n, raw in enumerate(body, start=3):
        fields = raw.split()
        if len(fields) < 4:
            raise FormatError("atom line needs a symbol and three coordinates", n)
        sym = fields[0]
        if sym.isdigit():
            z = int(sym)
            if not 1 <= z <= len(ELEMENTS):
                raise FormatError(f"unknown atomic number {sym}", n)
            sym = ELEMENTS[z - 1]
        else:
            try:
                z = atomic_number(sym)
            except ValidationError as exc:
                raise FormatError(str(exc), n) from None
            sym = ELEMENTS[z - 1]
        xyz = tuple(_parse_float(t, n) for t in fields[1:4])
        atoms.append(Atom(sym, z, xyz))
    if cell is not None:
        return MolecularGeometry(atoms, parse_cell(cell), vacuum_padding or 0.0, comment)
    return MolecularGeometry.boxed(atoms, 10.0 if vacuum_padding is None else vacuum_padding,
                                   comment=comment)


def read_xyz(path, cell=None, vacuum_padding=None) -> MolecularGeometry:
    with open(path) as fh:
        return parse_xyz(fh.read(), cell=cell, vacuum_padding=vacuum_padding)


def write_xyz(geometry: MolecularGeometry) -> str:
    out = [str(len(geometry.atoms)), geometry.comment]
    for a in geometry.atoms:
        out.append(f"{a.symbol} " + " ".join(repr(float(x)) for x in a.position))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# PES tables


@dataclass(frozen=True)
class PESSamples:
    """Low-level path energies plus the four high-level anchors.

    Coordinates run from the reactant (s = -1) through the saddle point
    (s = 0) to the product (s = +1).
    """

    s_low: np.ndarray
    v_low: np.ndarray
    s_high: np.ndarray
    v_high: np.ndarray
    s_half: float = field(init=False)

    def __post_init__(self):
        for name in ("s_low", "v_low", "s_high", "v_high"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        order = np.argsort(self.s_high)
        object.__setattr__(self, "s_high", _frozen(self.s_high[order]))
        object.__setattr__(self, "v_high", _frozen(self.v_high[order]))
        self.validate()
        object.__setattr__(self, "s_half", float(self.s_high[1]))

    def validate(self) -> None:
        s, v = self.s_low, self.v_low
        if s.ndim != 1 or s.shape != v.shape or len(s) < 2:
            raise ValidationError("low-level table needs at least two (s, V_LL) rows")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(v))):
            raise ValidationError("low-level table contains non-finite values")
        if np.any(np.diff(s) <= 0):
            raise ValidationError("low-level s values must be strictly increasing")
        if s[0] != -1.0 or s[-1] != 1.0:
            raise ValidationError("low-level path must start at s = -1 and end at s = +1")
        sh, vh = self.s_high, self.v_high
        if sh.shape != (4,) or vh.shape != (4,):
            raise ValidationError("exactly four high-level points are required")
        if not (np.all(np.isfinite(sh)) and np.all(np.isfinite(vh))):
            raise ValidationError("high-level table contains non-finite values")
        if np.any(np.diff(sh) <= 0):
            raise ValidationError("high-level s values must be distinct")
        if sh[0] != -1.0 or sh[-2] != 0.0 or sh[-1] != 1.0:
            raise ValidationError("high-level points must sit at s = -1, s_half, 0, +1")
        if not -1.0 < sh[1] < 0.0:
            raise ValidationError(f"s_half must lie in [-1, 0), got {sh[1]}")

    def v_low_at(self, s) -> np.ndarray | float:
        """Low-level energy, linearly interpolated between samples."""
        return np.interp(s, self.s_low, self.v_low)

    def v_high_at(self, s: float) -> float:
        hit = np.nonzero(self.s_high == s)[0]
        if not len(hit):
            raise KeyError(f"no high-level energy at s = {s}")
        return float(self.v_high[hit[0]])

    def delta_v(self, s: float) -> float:
        return self.v_high_at(s) - float(self.v_low_at(s))


def _pes_rows(lines: Iterable[tuple[int, str]], expect: str):
    rows = []
    for lineno, raw in lines:
        fields = [f.strip() for f in raw.split(",")]
        if len(fields) != 2:
            raise FormatError(f"expected 2 comma-separated fields ({expect})", lineno)
        rows.append((_parse_float(fields[0], lineno), _parse_float(fields[1], lineno), lineno))
    return rows


_UNITS_DIRECTIVE = re.compile(r"^#\s*units\s*[:=]\s*(\S+)\s*$", re.IGNORECASE)


def parse_pes_table(text: str | io.TextIOBase, units: str | None = None) -> PESSamples:
    """Parse the ``s,V_LL`` CSV with a trailing ``#HL`` block of four rows.

    A ``# units: eV`` comment (or the ``units`` argument) declares the
    energy unit; Hartree is assumed otherwise.
    """
    if not isinstance(text, str):
        text = text.read()
    low, high = [], []
    target = None
    header_seen = False
    declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _UNITS_DIRECTIVE.match(line)
            if m:
                declared = m.group(1)
            elif line[1:].strip().upper() == "HL":
                if target is high:
                    raise FormatError("duplicate #HL sentinel", lineno)
                if not header_seen:
                    raise FormatError("#HL block before the s,V_LL header", lineno)
                target = high
            continue
        compact = line.replace(" ", "").lower()
        if not header_seen:
            if compact != "s,v_ll":
                raise FormatError("first row must be the header 's,V_LL'", lineno)
            header_seen = True
            target = low
            continue
        if target is high and compact == "s,v_hl":
            continue
        target.append((lineno, line))
    if not header_seen:
        raise FormatError("missing 's,V_LL' header", 1)
    if target is not high:
        raise FormatError("missing #HL block", None)
    unit = units or declared or "Ha"
    try:
        to_hartree(1.0, unit)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    low_rows = _pes_rows(low, "s,V_LL")
    high_rows = _pes_rows(high, "s,V_HL")
    if len(high_rows) < 4:
        raise FormatError(f"high-level block needs 4 rows, found {len(high_rows)}",
                          high_rows[-1][2] if high_rows else None)
    if len(high_rows) > 4:
        raise FormatError("high-level block has more than 4 rows", high_rows[4][2])
    for s, _, lineno in low_rows + high_rows:
        if not -1.0 <= s <= 1.0:
            raise ValidationError(f"line {lineno}: s = {s} outside [-1, 1]")
    return PESSamples(
        s_low=[r[0] for r in low_rows],
        v_low=[to_hartree(r[1], unit) for r in low_rows],
        s_high=[r[0] for r in high_rows],
        v_high=[to_hartree(r[1], unit) for r in high_rows],
    )


def read_pes_table(path, units=None) -> PESSamples:
    with open(path) as fh:
        return parse_pes_table(fh.read(), units=units)


def write_pes_table(samples: PESSamples, units: str = "Ha") -> str:
    out = [f"# units: {units}", "s,V_LL"]
    out += [f"{float(s)!r},{from_hartree(float(v), units)!r}"
            for s, v in zip(samples.s_low, samples.v_low)]
    out += ["#HL", "s,V_HL"]
    out += [f"{float(s)!r},{from_hartree(float(v), units)!r}"
            for s, v in zip(samples.s_high, samples.v_high)]
    return "\n".join(out) + "\n"
