"""Dual-level variational transition state theory with an Eckart correction.

The difference between high- and low-level energies along the reaction
coordinate s is modeled as

    dV(s) = A y / (1 + y) + B y / (1 + y)^2 + C,   y = exp((s - s0) / L)

with A, B, C fixed by the anchors at s = -1, 0, +1 and L by one extra
high-level energy at s_half. Energies are Hartree throughout unless a
function takes an explicit ``units`` argument.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import bisect
from scipy.special import expit

from endoqre.errors import DomainError, ValidationError
from endoqre.io_formats import PESSamples
from endoqre.units import (AMU_KG, BOHR_ANGSTROM, HARTREE_J, KB_HARTREE, KB_J, PLANCK_J,
                           SPEED_OF_LIGHT_CM, WAVENUMBER_HARTREE, to_hartree)

__all__ = [
    "DegenerateFitError",
    "FitInfeasibleError",
    "RangeParameterError",
    "EckartFit",
    "fit_eckart",
    "eckart_value",
    "corrected_pes",
    "barrier_from_pes",
    "HessianInput",
    "Frequencies",
    "frequencies_from_hessian",
    "ho_partition",
    "log_ho_partition",
    "log_ho_partition_dT",
    "generalized_rate",
    "generalized_rate_dT",
    "eckart_transmission",
    "Transmission",
    "eckart_kappa",
    "RateResult",
    "vtst_rate",
    "rates_to_csv",
    "rate_profile_to_csv",
]

SIL1_VARIANTS = ("printed", "unhalved")
L_MIN, L_MAX, L_SCAN = 1e-6, 1e3, 64

# second radiation constant h c / k_B, cm K
C2_CM_K = PLANCK_J * SPEED_OF_LIGHT_CM / KB_J
# sqrt(Ha / (bohr^2 amu)) expressed in cm^-1
HESSIAN_WAVENUMBER = math.sqrt(HARTREE_J / ((BOHR_ANGSTROM * 1e-10) ** 2 * AMU_KG)) / (
    2.0 * math.pi * SPEED_OF_LIGHT_CM)


class DegenerateFitError(DomainError):
    """B - A = 0: the correction is flat and s0 is undefined."""


class FitInfeasibleError(DomainError):
    """No B branch gives an Eckart peak matching dV(0)."""


class RangeParameterError(DomainError):
    """The SIL-1 equation has no root for L in (1e-6, 1e3]."""


# --------------------------------------------------------------------------
# Eckart correction


@dataclass(frozen=True)
class EckartFit:
    A: float
    B: float
    C: float
    L: float
    s0: float
    branch: int  # +1 or -1, sign in front of the square root
    s_half: float | None = None
    sil1_variant: str = "printed"
    sil1_residual: float | None = None

    def __call__(self, s):
        return eckart_value(self, s)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _eckart(A, B, C, L, s0, s):
    x = (np.asarray(s, dtype=float) - s0) / L
    p = expit(x)  # y / (1 + y)
    return A * p + B * p * expit(-x) + C


def eckart_value(fit: EckartFit, s):
    """dV(s); scalar in, float out."""
    out = _eckart(fit.A, fit.B, fit.C, fit.L, fit.s0, s)
    return float(out) if np.ndim(out) == 0 else out


def _b_branches(A: float, C: float, dv0: float) -> list[tuple[int, float]]:
    d = dv0 - C
    radicand = d * (d - A)
    scale = max(abs(A), abs(C), abs(dv0), 1e-300)
    if radicand < 0:
        if radicand > -1e-14 * scale * scale:
            radicand = 0.0
        else:
            raise FitInfeasibleError(
                f"no real B: (dV(0) - C)(dV(0) - A - C) = {radicand:.3e} < 0")
    root = 2.0 * math.sqrt(radicand)
    base = 2.0 * dv0 - A - 2.0 * C
    return [(+1, base + root), (-1, base - root)]


def _select_branch(A: float, C: float, dv0: float) -> tuple[int, float, float]:
    """(branch, B, y0) with y0 = (A + B) / (B - A) > 0 and the peak matching dV(0)."""
    branches = _b_branches(A, C, dv0)
    scale = max(abs(A), abs(C), abs(dv0), 1e-300)
    valid = []
    degenerate = True
    for sign, B in branches:
        if abs(B - A) <= 1e-14 * scale:
            continue
        degenerate = False
        y0 = (A + B) / (B - A)
        if not (y0 > 0 and math.isfinite(y0)):
            continue
        peak = float(_eckart(A, B, C, 1.0, -math.log(y0), 0.0))
        if abs(peak - dv0) <= 1e-9 * scale:
            valid.append((sign, B, y0))
    if degenerate:
        raise DegenerateFitError("B - A = 0; the correction is the constant C")
    if not valid:
        raise FitInfeasibleError("no B branch reproduces dV(0) with (A + B)/(B - A) > 0")
    positive = [v for v in valid if v[1] > 0]
    return (positive or valid)[0]


def _sil1_target(samples: PESSamples, variant: str) -> float:
    diff = samples.v_high_at(samples.s_half) - samples.v_high_at(-1.0)
    return 0.5 * diff if variant == "printed" else diff


def fit_eckart(samples: PESSamples, sil1_variant: str = "printed") -> EckartFit:
    """Fit A, B, C from the anchors and L from the SIL-1 condition at s_half.

    ``sil1_variant="unhalved"`` drops the factor 1/2 on the right-hand side.
    """
    if sil1_variant not in SIL1_VARIANTS:
        raise DomainError(f"SIL-1 variant must be one of {SIL1_VARIANTS}")
    dm, d0, dp = samples.delta_v(-1.0), samples.delta_v(0.0), samples.delta_v(1.0)
    A = dp - dm
    C = dm
    branch, B, y0 = _select_branch(A, C, d0)
    log_y0 = math.log(y0)

    sh = samples.s_half
    rhs = _sil1_target(samples, sil1_variant)
    v_ll = float(samples.v_low_at(sh))

    def residual(L):
        # s0 = -L ln y0, so (s - s0)/L = s/L + ln y0
        return v_ll + float(_eckart(A, B, C, L, -L * log_y0, sh)) - rhs

    grid = np.geomspace(L_MIN, L_MAX, L_SCAN)
    values = [residual(L) for L in grid]
    root = None
    for i, val in enumerate(values):
        if val == 0.0:
            root = float(grid[i])
            break
        if i and values[i - 1] * val < 0:
            root = bisect(residual, grid[i - 1], grid[i], xtol=1e-300, rtol=4 * np.finfo(float).eps,
                          maxiter=2000)
            break
    if root is None:
        raise RangeParameterError(
            f"SIL-1 equation has no root for L in ({L_MIN:g}, {L_MAX:g}]; "
            f"residual spans [{min(values):.3e}, {max(values):.3e}]")
    return EckartFit(A=A, B=B, C=C, L=root, s0=-root * log_y0, branch=branch, s_half=sh,
                     sil1_variant=sil1_variant, sil1_residual=residual(root))


def corrected_pes(samples: PESSamples, fit: EckartFit) -> list[tuple[float, float]]:
    """V(s) = V_LL(s) + dV(s) at every low-level sample."""
    dv = _eckart(fit.A, fit.B, fit.C, fit.L, fit.s0, samples.s_low)
    return [(float(s), float(v)) for s, v in zip(samples.s_low, samples.v_low + dv)]


def barrier_from_pes(samples: PESSamples, fit: EckartFit) -> tuple[float, float, float]:
    """(V_f, V_r, s_peak) of the corrected path.

    The peak is measured against the high-level reactant and product
    energies; s = 0 is always included in the search.
    """
    path = corrected_pes(samples, fit)
    path.append((0.0, float(samples.v_low_at(0.0)) + eckart_value(fit, 0.0)))
    s_peak, v_peak = max(path, key=lambda p: (p[1], -abs(p[0])))
    return (v_peak - samples.v_high_at(-1.0), v_peak - samples.v_high_at(1.0), s_peak)


# --------------------------------------------------------------------------
# Frequencies and partition functions


@dataclass(frozen=True)
class HessianInput:
    """Cartesian Hessian (Hartree / bohr^2) and atomic masses (amu).

    ``positions`` (Angstrom) enable exact projection of rigid-body motion.
    """

    hessian: np.ndarray
    masses: np.ndarray
    positions: np.ndarray | None = None

    def __post_init__(self):
        h = np.array(self.hessian, dtype=float)
        m = np.array(self.masses, dtype=float).ravel()
        object.__setattr__(self, "hessian", h)
        object.__setattr__(self, "masses", m)
        if self.positions is not None:
            object.__setattr__(self, "positions", np.array(self.positions, dtype=float))
        self.validate()

    @property
    def dof_per_atom(self) -> int:
        return self.hessian.shape[0] // len(self.masses)

    def validate(self) -> None:
        h, m = self.hessian, self.masses
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValidationError("Hessian must be a square matrix")
        if len(m) == 0 or h.shape[0] % len(m) != 0 or h.shape[0] // len(m) not in (1, 2, 3):
            raise ValidationError("Hessian size must be 1, 2 or 3 times the number of atoms")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(m))):
            raise ValidationError("Hessian and masses must be finite")
        if np.any(m <= 0):
            raise ValidationError("masses must be positive")
        scale = max(1.0, float(np.max(np.abs(h))))
        if not np.allclose(h, h.T, rtol=0, atol=1e-10 * scale):
            raise ValidationError("Hessian is not symmetric")
        if self.positions is not None:
            if self.positions.shape != (len(m), 3) or self.dof_per_atom != 3:
                raise ValidationError("positions need shape (n_atoms, 3) with a 3N Hessian")


@dataclass(frozen=True)
class Frequencies:
    real: tuple  # cm^-1, ascending
    imaginary: tuple = ()  # magnitudes, cm^-1, descending

    @property
    def n_imaginary(self) -> int:
        return len(self.imaginary)

    def __iter__(self):
        yield list(self.real)
        yield self.n_imaginary


def _rigid_body_basis(positions_bohr: np.ndarray, masses: np.ndarray) -> np.ndarray:
    """Orthonormal mass-weighted translations and rotations, columns."""
    sqm = np.sqrt(masses)
    com = (masses[:, None] * positions_bohr).sum(0) / masses.sum()
    r = positions_bohr - com
    n = len(masses)
    vecs = []
    for axis in range(3):
        t = np.zeros((n, 3))
        t[:, axis] = sqm
        vecs.append(t.ravel())
    for axis in np.eye(3):
        vecs.append((np.cross(axis, r) * sqm[:, None]).ravel())
    u, s, _ = np.linalg.svd(np.array(vecs).T, full_matrices=False)
    return u[:, s > 1e-8 * s.max()]


def frequencies_from_hessian(inp: HessianInput, threshold: float = 1.0) -> Frequencies:
    """Harmonic wavenumbers from the mass-weighted Hessian.

    With positions, rigid-body motion is projected out exactly. Otherwise
    modes with |omega| < ``threshold`` cm^-1 are dropped as rigid-body modes.
    """
    inv_sqm = 1.0 / np.sqrt(np.repeat(inp.masses, inp.dof_per_atom))
    mw = inp.hessian * inv_sqm[:, None] * inv_sqm[None, :]
    mw = 0.5 * (mw + mw.T)
    if inp.positions is not None:
        rb = _rigid_body_basis(inp.positions / BOHR_ANGSTROM, inp.masses)
        full = np.linalg.svd(rb, full_matrices=True)[0]
        internal = full[:, rb.shape[1]:]
        eig = np.linalg.eigvalsh(internal.T @ mw @ internal)
        omega = np.sign(eig) * np.sqrt(np.abs(eig)) * HESSIAN_WAVENUMBER
    else:
        eig = np.linalg.eigvalsh(mw)
        omega = np.sign(eig) * np.sqrt(np.abs(eig)) * HESSIAN_WAVENUMBER
        omega = omega[np.abs(omega) >= threshold]
    real = tuple(sorted(float(w) for w in omega if w > 0))
    imag = tuple(sorted((float(-w) for w in omega if w < 0), reverse=True))
    if inp.positions is not None:
        # projected zero modes of a linear molecule or exact zeros
        real = tuple(w for w in real if w >= threshold)
    return Frequencies(real, imag)


def _check_modes(omegas, T):
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    w = np.asarray(list(omegas), dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise DomainError("partition functions need positive real frequencies")
    return w


def log_ho_partition(omegas: Iterable[float], T: float) -> float:
    """ln Q with Q = prod exp(-x/2) / (1 - exp(-x)), x = h c omega / k_B T."""
    x = _check_modes(omegas, T) * C2_CM_K / T
    return float(np.sum(-0.5 * x - np.log(-np.expm1(-x))))


def ho_partition(omegas: Iterable[float], T: float) -> float:
    """Harmonic vibrational partition function, zero point at the well bottom."""
    return math.exp(log_ho_partition(omegas, T))


def log_ho_partition_dT(omegas: Iterable[float], T: float) -> float:
    """d ln Q / dT."""
    x = _check_modes(omegas, T) * C2_CM_K / T
    return float(np.sum((x / T) * (0.5 + 1.0 / np.expm1(x))))


def generalized_rate(s: float, T: float, q_gt: float, q_r: float, v: float,
                     units: str = "Ha") -> float:
    """k(s, T) = (k_B T / h) (Q_GT / Q_R) exp(-V / k_B T), V relative to the reactant."""
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    if not (q_gt > 0 and q_r > 0):
        raise DomainError("partition functions must be positive")
    v_ha = to_hartree(v, units)
    return (KB_J * T / PLANCK_J) * (q_gt / q_r) * math.exp(-v_ha / (KB_HARTREE * T))


def generalized_rate_dT(T: float, v: float, dlnq_gt_dT: float = 0.0,
                        dlnq_r_dT: float = 0.0, k: float | None = None,
                        units: str = "Ha") -> float:
    """Analytic dk/dT; ``k`` is the rate at T (pass it to avoid recomputation)."""
    v_ha = to_hartree(v, units)
    if k is None:
        k = generalized_rate(0.0, T, 1.0, 1.0, v_ha)
    return k * (1.0 / T + v_ha / (KB_HARTREE * T * T) + dlnq_gt_dT - dlnq_r_dT)


# --------------------------------------------------------------------------
# Tunneling


def _log_sinh(x):
    if x < 20.0:
        return math.log(math.sinh(x))
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def _log_cosh(x):
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)


def _eckart_parameters(v_f: float, v_r: float, hbar_omega: float):
    """Scaled (a / sqrt(E), b / sqrt(E - dV), d) of the asymmetric Eckart barrier."""
    denom = hbar_omega * (1.0 / math.sqrt(v_f) + 1.0 / math.sqrt(v_r))
    d2 = 4.0 * v_f * v_r / hbar_omega**2 - 0.25
    return 4.0 * math.pi / denom, d2


def _log_transmission(e: float, v_f: float, v_r: float, hbar_omega: float) -> float:
    """ln P(E) for energy E measured from the reactant asymptote."""
    delta = v_f - v_r  # product asymptote relative to the reactant
    if e <= 0.0 or e - delta <= 0.0:
        return -math.inf
    coef, d2 = _eckart_parameters(v_f, v_r, hbar_omega)
    a = coef * math.sqrt(e)
    b = coef * math.sqrt(e - delta)
    # P = 2 sinh(a) sinh(b) / (cosh(a + b) + cosh(d))
    num = math.log(2.0) + _log_sinh(a) + _log_sinh(b)
    if d2 >= 0:
        den = np.logaddexp(_log_cosh(a + b), _log_cosh(2.0 * math.pi * math.sqrt(d2)))
    else:
        den = math.log(math.cosh(a + b) + math.cos(2.0 * math.pi * math.sqrt(-d2)))
    return float(min(0.0, num - den))


def eckart_transmission(e: float, v_f: float, v_r: float, imaginary_frequency: float,
                        units: str = "Ha") -> float:
    """Transmission probability P(E) through the Eckart barrier.

    Energies share ``units``; E is measured from the reactant asymptote and
    the imaginary frequency is given as its magnitude in cm^-1.
    """
    e, v_f, v_r = (to_hartree(x, units) for x in (e, v_f, v_r))
    if not (v_f > 0 and v_r > 0):
        raise DomainError("Eckart transmission needs positive forward and reverse barriers")
    hw = abs(imaginary_frequency) * WAVENUMBER_HARTREE
    if hw <= 0:
        raise DomainError("imaginary frequency must be nonzero")
    return math.exp(_log_transmission(e, v_f, v_r, hw))


class Transmission(float):
    """kappa as a float carrying a ``barrierless`` flag."""

    barrierless: bool

    def __new__(cls, value: float, barrierless: bool = False):
        obj = super().__new__(cls, value)
        obj.barrierless = barrierless
        return obj


def eckart_kappa(v_f: float, v_r: float, imaginary_frequency: float, T: float,
                 units: str = "Ha", epsrel: float = 1e-8) -> Transmission:
    """Thermal tunneling factor of the Eckart barrier.

    kappa = (1 / k_B T) int P(E) exp(-(E - V_f) / k_B T) dE, integrated from
    the higher of the two asymptotes. A nonpositive forward barrier
    returns exactly 1 flagged as barrierless.
    """
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    v_f, v_r = to_hartree(v_f, units), to_hartree(v_r, units)
    if v_f <= 0.0:
        return Transmission(1.0, barrierless=True)
    if v_r <= 0.0:
        raise DomainError("reverse barrier must be positive when the forward barrier is")
    hw = abs(imaginary_frequency) * WAVENUMBER_HARTREE
    if not hw > 0:
        raise DomainError("imaginary frequency must be nonzero")
    kt = KB_HARTREE * T
    e0 = max(0.0, v_f - v_r)

    def integrand(u):
        # u = (E - V_f) / kT
        e = v_f + u * kt
        return math.exp(_log_transmission(e, v_f, v_r, hw) - u)

    lower = (e0 - v_f) / kt
    # transmission is ~1 above the barrier; split there and at a few kT above
    pieces = [(lower, 0.0), (0.0, 50.0), (50.0, math.inf)]
    total = 0.0
    for lo, hi in pieces:
        if hi <= lo:
            continue
        val, _ = quad(integrand, lo, hi, epsabs=0.0, epsrel=epsrel, limit=500)
        total += val
    return Transmission(total)


# --------------------------------------------------------------------------
# Rate


@dataclass(frozen=True)
class RateResult:
    temperature: float
    kappa: float
    k_of_s: tuple  # ((s, k(s, T)), ...)
    s_star: float
    k_total: float
    barrierless: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"T": self.temperature, "kappa": float(self.kappa), "s_star": self.s_star,
                "k": self.k_total, "barrierless": self.barrierless,
                "k_of_s": [list(p) for p in self.k_of_s], **self.details}


def vtst_rate(pes: Sequence[tuple[float, float]], T: float,
              q_gt: Sequence[float] | Callable[[float], float] | None = None,
              q_r: float = 1.0, kappa: float = 1.0, units: str = "Ha") -> RateResult:
    """k(T) = kappa * min_s k(s, T) over the sampled path.

    ``pes`` holds (s, V) with V relative to the reactant. ``q_gt`` is a
    sequence aligned with ``pes``, a callable of s, or None for Q_GT = Q_R.
    """
    pes = [(float(s), float(v)) for s, v in pes]
    if not pes:
        raise ValidationError("empty PES")
    if not kappa >= 0:
        raise DomainError("kappa must be non-negative")
    if q_gt is None:
        qs = [q_r] * len(pes)
    elif callable(q_gt):
        qs = [q_gt(s) for s, _ in pes]
    else:
        qs = list(q_gt)
        if len(qs) != len(pes):
            raise ValidationError("q_gt must align with the PES samples")
    ks = [generalized_rate(s, T, q, q_r, v, units=units) for (s, v), q in zip(pes, qs)]
    k_min = min(ks)
    ties = [i for i, k in enumerate(ks) if k <= k_min * (1.0 + 1e-12)]
    star = min(ties, key=lambda i: (abs(pes[i][0]), pes[i][0]))
    return RateResult(
        temperature=float(T),
        kappa=float(kappa),
        k_of_s=tuple((s, k) for (s, _), k in zip(pes, ks)),
        s_star=pes[star][0],
        k_total=float(kappa) * ks[star],
        barrierless=bool(getattr(kappa, "barrierless", False)),
    )


def rates_to_csv(results: Iterable[RateResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "kappa", "s_star", "k"])
    for r in results:
        w.writerow([repr(r.temperature), repr(float(r.kappa)), repr(r.s_star), repr(r.k_total)])
    return buf.getvalue()


def rate_profile_to_csv(result: RateResult) -> str:
    """Per-s generalized rates for plotting."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "k_s"])
    for s, k in result.k_of_s:
        w.writerow([repr(s), repr(k)])
    return buf.getvalue()
