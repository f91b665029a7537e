"""Finite-temperature Lifshitz free energy and the PFA force jump.

Free energy per unit area between two thick slabs at separation d:

    F(T, d) = (kT / 8 pi d^2) * sum_l (1 - delta_l0/2) *
              int_{y_l}^inf y dy sum_pol log(1 - R_a R_b e^{-y})

in the scaled variable y = 2 d q_l, y_l = 2 d xi_l / (hbar c).  Slab "a" is
the sphere coating (always normal); slab "b" carries the normal or
superconducting phase.  The l = 0 limits are taken analytically: a Drude
metal loses its TE reflection while a superconductor keeps a plasma-like one
with effective wavenumber Omega sqrt(g(0+;T)) / (hbar c).

The force jump across the transition follows from the proximity force
approximation, Delta F = 2 pi R [F_normal - F_super], with error bound d/R.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .constants import CONST
from .errors import ConvergenceError, DomainError, PfaAccuracyWarning
from .materials import (
    GapModel,
    MaterialParams,
    default_gap,
    drude_eps,
    g_on_matsubara_grid,
    g_zero_limit,
)
from .quadrature import CompositeKronrod, NeumaierSum, adaptive_quad
from .sc_state import Phase


# ---------------------------------------------------------------------------
# configuration and result types


_KNOWN_SCHEMES = ("adaptive-gk15",)

# Beyond this many Matsubara terms the sum is evaluated in its midpoint
# Euler-Maclaurin integral form (only reached far below 1 K).
_MAX_EXACT_TERMS = 200_000

_Y_CUT = 45.0
_Y_SPLITS = (0.0, 0.5, 1.5, 4.0, 10.0, 22.0, _Y_CUT)


@dataclass(frozen=True)
class EngineConfig:
    rel_tol_quadrature: float = 1e-9
    rel_tol_series: float = 1e-9
    matsubara_cap_full: float = 15.0   # xi_max in units of c/d
    matsubara_cap_diff: float = 60.0   # xi_max in units of 2*Delta(0)
    quad_scheme: str = "adaptive-gk15"

    def __post_init__(self) -> None:
        for name in ("rel_tol_quadrature", "rel_tol_series"):
            tol = getattr(self, name)
            if not 0.0 < tol <= 1e-3:
                raise DomainError(f"{name} must lie in (0, 1e-3]")
        if self.matsubara_cap_full < 10.0:
            raise DomainError("matsubara_cap_full must be >= 10")
        if self.matsubara_cap_diff < 20.0:
            raise DomainError("matsubara_cap_diff must be >= 20 (a few tens)")
        if self.quad_scheme not in _KNOWN_SCHEMES:
            raise DomainError(f"unknown quadrature scheme {self.quad_scheme!r}")


@dataclass(frozen=True)
class ReflectionPair:
    r_te: float
    r_tm: float


@dataclass(frozen=True)
class FreeEnergyResult:
    value: float          # eV / nm^2
    terms_used: int
    error_estimate: float


@dataclass(frozen=True)
class DeltaForceResult:
    delta_f_fn: float     # fN
    diff_ev_nm2: float    # eV / nm^2
    pfa_bound: float      # d / R
    terms_used: int
    error_estimate: float


# ---------------------------------------------------------------------------
# elementary operations


def matsubara_xi(l: int, T: float) -> float:
    """xi_l = 2 pi l k_B T in eV."""
    if T <= 0.0:
        raise DomainError("matsubara_xi requires T > 0")
    if l < 0:
        raise DomainError("matsubara_xi requires l >= 0")
    return 2.0 * math.pi * l * CONST.k_b * T


def fresnel_te(eps: float, xi: float, k_perp: float) -> float:
    """TE reflection (q - s)/(q + s) on the imaginary axis."""
    kappa = xi / CONST.hbar_c
    q = math.sqrt(kappa * kappa + k_perp * k_perp)
    s = math.sqrt(eps * kappa * kappa + k_perp * k_perp)
    return (q - s) / (q + s)


def fresnel_tm(eps: float, xi: float, k_perp: float) -> float:
    """TM reflection (eps q - s)/(eps q + s) on the imaginary axis."""
    kappa = xi / CONST.hbar_c
    q = math.sqrt(kappa * kappa + k_perp * k_perp)
    s = math.sqrt(eps * kappa * kappa + k_perp * k_perp)
    return (eps * q - s) / (eps * q + s)


def zero_mode_reflections(material: MaterialParams, phase: Phase, T: float,
                          k_perp: float, gap: Optional[GapModel] = None) -> ReflectionPair:
    """Analytic l = 0 limits; never evaluated by plugging xi = 0 numerically.

    Drude metals: (0, 1).  Superconductors keep a plasma-like TE reflection
    built from the condensate weight g(0+; T).
    """
    if k_perp <= 0.0:
        raise DomainError("zero_mode_reflections requires k_perp > 0")
    if phase is Phase.SUPERCONDUCTING:
        if gap is None:
            gap = default_gap(material.tc)
        g0 = g_zero_limit(material, gap, T)
        ks = material.omega_p * math.sqrt(g0) / CONST.hbar_c
        root = math.sqrt(k_perp * k_perp + ks * ks)
        return ReflectionPair(r_te=(k_perp - root) / (k_perp + root), r_tm=1.0)
    return ReflectionPair(r_te=0.0, r_tm=1.0)


# ---------------------------------------------------------------------------
# slab models for the engine


@dataclass(frozen=True)
class _Slab:
    """Reflection model of one half-space in scaled variables."""

    eps_at: Optional[Callable[[int, float], float]]  # (l, xi_l) -> eps, or None for ideal
    zero_kind: str                                   # "drude" | "plasma" | "ideal"
    ks2d: float = 0.0                                # 2 d * Omega sqrt(g0)/hbar c


def _slab_reflections(slab: _Slab, l: int, xi: float, yl: float,
                      y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(r_te, r_tm) on the y grid for Matsubara index l."""
    if slab.eps_at is None:
        return -np.ones_like(y), np.ones_like(y)
    if l == 0:
        if slab.zero_kind == "plasma":
            w = np.sqrt(y * y + slab.ks2d * slab.ks2d)
            return (y - w) / (y + w), np.ones_like(y)
        return np.zeros_like(y), np.ones_like(y)
    eps = slab.eps_at(l, xi)
    w = np.sqrt(y * y + (eps - 1.0) * yl * yl)
    return (y - w) / (y + w), (eps * y - w) / (eps * y + w)


def _drude_slab(material: MaterialParams) -> _Slab:
    return _Slab(eps_at=lambda l, xi: drude_eps(material, xi), zero_kind="drude")


def _bcs_slab(material: MaterialParams, gap: GapModel, T: float,
              g_grid: "_GGrid") -> _Slab:
    om2 = material.omega_p ** 2
    gamma = material.gamma

    def eps_at(l: int, xi: float) -> float:
        g = g_grid.at(l)
        return 1.0 + (om2 / xi) * (1.0 / (xi + gamma) + g / xi)

    g0 = g_zero_limit(material, gap, T)
    return _Slab(eps_at=eps_at, zero_kind="plasma",
                 ks2d=material.omega_p * math.sqrt(g0) / CONST.hbar_c)


class _GGrid:
    """Lazily grown table of g(xi_l; T) on the Matsubara grid."""

    def __init__(self, material: MaterialParams, gap: GapModel, T: float,
                 initial: int):
        self._material = material
        self._gap = gap
        self._T = T
        self._values = g_on_matsubara_grid(material, gap, T, initial)

    def at(self, l: int) -> float:
        if l >= self._values.size:
            grow = max(2 * self._values.size, l + 64)
            self._values = g_on_matsubara_grid(self._material, self._gap,
                                               self._T, grow)
        return float(self._values[l])


# ---------------------------------------------------------------------------
# per-term wavevector integrals


_COMPOSITE = CompositeKronrod(_Y_SPLITS)


def _term_integral(pair_log: Callable[[np.ndarray], np.ndarray], yl: float,
                   rel_tol: float) -> tuple[float, float]:
    """int_{yl}^{yl+Y_CUT} y * pair_log(y) dy on the shifted grid z = y - yl.

    A fixed composite rule handles the (typical) smooth case in one
    vectorized pass; terms that miss the tolerance fall back to adaptive
    bisection on the same panel set.
    """
    val, err = _COMPOSITE.integrate(pair_log(yl + _COMPOSITE.nodes))
    if err <= rel_tol * abs(val) or err <= 1e-300:
        return val, err

    def f(z):
        return pair_log(yl + z)

    return adaptive_quad(f, 0.0, _Y_CUT, rel_tol=rel_tol, abs_tol=1e-300,
                         breakpoints=_Y_SPLITS[1:-1], max_panels=400)


def _full_pair_log(slab_a: _Slab, slab_b: _Slab, l: int, xi: float,
                   yl: float) -> Callable[[np.ndarray], np.ndarray]:
    def pair_log(y):
        rte_a, rtm_a = _slab_reflections(slab_a, l, xi, yl, y)
        rte_b, rtm_b = _slab_reflections(slab_b, l, xi, yl, y)
        damp = np.exp(-y)
        return y * (np.log1p(-rte_a * rte_b * damp)
                    + np.log1p(-rtm_a * rtm_b * damp))

    return pair_log


def _free_energy_engine(slab_a: _Slab, slab_b: _Slab, T: float, d: float,
                        cfg: EngineConfig,
                        force_terms: Optional[int] = None) -> FreeEnergyResult:
    h = 2.0 * math.pi * CONST.k_b * T
    kappa_scale = CONST.hbar_c / d           # energy scale c/d in eV
    xi_cap = cfg.matsubara_cap_full * kappa_scale
    l_cap = int(math.ceil(xi_cap / h))
    pref = CONST.k_b * T / (8.0 * math.pi * d * d)

    if force_terms is None and l_cap > _MAX_EXACT_TERMS:
        return _free_energy_low_t(slab_a, slab_b, T, d, cfg, l_cap)

    acc = NeumaierSum()
    err_acc = 0.0
    # l = 0 with half weight
    s0, e0 = _term_integral(_full_pair_log(slab_a, slab_b, 0, 0.0, 0.0),
                            0.0, cfg.rel_tol_quadrature)
    acc.add(0.5 * s0)
    err_acc += 0.5 * e0

    quiet = 0
    l = 0
    l_stop = force_terms if force_terms is not None else 10 * l_cap + 1000
    while l < l_stop:
        l += 1
        xi = h * l
        yl = 2.0 * d * xi / CONST.hbar_c
        sl, el = _term_integral(_full_pair_log(slab_a, slab_b, l, xi, yl),
                                yl, cfg.rel_tol_quadrature)
        acc.add(sl)
        err_acc += el
        if force_terms is not None:
            continue
        if abs(sl) <= cfg.rel_tol_series * abs(acc.value):
            quiet += 1
            if quiet >= 3 and l >= l_cap:
                break
        else:
            quiet = 0
    else:
        if force_terms is None:
            raise ConvergenceError(
                f"Matsubara series not converged after {l} terms "
                f"(last term {sl:.3e} against {acc.value:.3e})",
                error_estimate=abs(sl),
            )
    return FreeEnergyResult(value=pref * acc.value, terms_used=l + 1,
                            error_estimate=pref * (err_acc + abs(sl)))


def _free_energy_low_t(slab_a: _Slab, slab_b: _Slab, T: float, d: float,
                       cfg: EngineConfig, l_cap: int) -> FreeEnergyResult:
    """Midpoint Euler-Maclaurin form of the Matsubara sum for tiny T.

    sum_{l>=1} S(l h) = (1/h) int_{h/2}^inf S + O(h) corrections; used only
    when the exact ascending sum would exceed the term budget.
    """
    h = 2.0 * math.pi * CONST.k_b * T
    pref = CONST.k_b * T / (8.0 * math.pi * d * d)

    def s_of_xi(xi: float) -> float:
        yl = 2.0 * d * xi / CONST.hbar_c
        val, _ = _term_integral(_full_pair_log(slab_a, slab_b, 1, xi, yl),
                                yl, cfg.rel_tol_quadrature)
        return val

    s0, e0 = _term_integral(_full_pair_log(slab_a, slab_b, 0, 0.0, 0.0),
                            0.0, cfg.rel_tol_quadrature)
    xi_top = 2.0 * cfg.matsubara_cap_full * CONST.hbar_c / d
    pts = list(np.geomspace(h, xi_top / 2.0, 24))
    body, berr = adaptive_quad(
        lambda xs: np.array([s_of_xi(float(x)) for x in np.atleast_1d(xs)]),
        h / 2.0, xi_top, rel_tol=cfg.rel_tol_series,
        abs_tol=1e-300, breakpoints=pts, max_panels=4000,
    )
    step = h / 4.0
    sprime = (s_of_xi(h / 2.0 + step) - s_of_xi(h / 2.0 - step)) / (2.0 * step)
    series = body / h - (h / 24.0) * sprime
    value = pref * (0.5 * s0 + series)
    return FreeEnergyResult(value=value, terms_used=l_cap,
                            error_estimate=abs(pref) * (0.5 * e0 + berr / h))


# ---------------------------------------------------------------------------
# public free energies


def free_energy(material_a: MaterialParams, material_b: MaterialParams,
                phase_b: Phase, T: float, d: float, cfg: EngineConfig,
                gap_b: Optional[GapModel] = None,
                force_terms: Optional[int] = None) -> FreeEnergyResult:
    """Lifshitz free energy per unit area (eV/nm^2); negative for metals.

    Slab a is treated as a normal Drude metal; slab b in the requested phase.
    """
    if T <= 0.0 or d <= 0.0:
        raise DomainError("free_energy requires T > 0 and d > 0")
    slab_a = _drude_slab(material_a)
    if phase_b is Phase.SUPERCONDUCTING:
        if not material_b.is_superconductor():
            raise DomainError(f"{material_b.name} has no superconducting phase")
        if T >= material_b.tc:
            raise DomainError("superconducting phase requires T < tc")
        if gap_b is None:
            gap_b = default_gap(material_b.tc)
        grid = _GGrid(material_b, gap_b, T, _initial_grid_size(material_b, T, d, cfg))
        slab_b = _bcs_slab(material_b, gap_b, T, grid)
    else:
        slab_b = _drude_slab(material_b)
    return _free_energy_engine(slab_a, slab_b, T, d, cfg, force_terms=force_terms)


def _initial_grid_size(material_b: MaterialParams, T: float, d: float,
                       cfg: EngineConfig) -> int:
    h = 2.0 * math.pi * CONST.k_b * T
    l_cap = int(math.ceil(cfg.matsubara_cap_full * CONST.hbar_c / (d * h)))
    return min(l_cap + 64, _MAX_EXACT_TERMS)


def ideal_mirror_free_energy(T: float, d: float, cfg: EngineConfig) -> FreeEnergyResult:
    """Free energy with both reflections forced to unit magnitude.

    Approaches -pi^2 hbar c / (720 d^3) as T -> 0.
    """
    if T <= 0.0 or d <= 0.0:
        raise DomainError("ideal_mirror_free_energy requires T > 0 and d > 0")
    ideal = _Slab(eps_at=None, zero_kind="ideal")
    return _free_energy_engine(ideal, ideal, T, d, cfg)


def _diff_pair_log(slab_a: _Slab, eps_n_at: Callable, eps_s_at: Callable,
                   l: int, xi: float, yl: float) -> Callable[[np.ndarray], np.ndarray]:
    """Cancellation-free integrand of the (normal - superconducting) term."""

    def pair_log(y):
        rte_a, rtm_a = _slab_reflections(slab_a, l, xi, yl, y)
        eps_n = eps_n_at(l, xi)
        eps_s = eps_s_at(l, xi)
        d_eps = eps_s - eps_n
        yl2 = yl * yl
        w_n = np.sqrt(y * y + (eps_n - 1.0) * yl2)
        w_s = np.sqrt(y * y + (eps_s - 1.0) * yl2)
        dw = d_eps * yl2 / (w_s + w_n)
        rte_n = (y - w_n) / (y + w_n)
        rte_s = (y - w_s) / (y + w_s)
        rtm_s = (eps_s * y - w_s) / (eps_s * y + w_s)
        d_rte = 2.0 * y * dw / ((y + w_n) * (y + w_s))            # rte_n - rte_s
        d_rtm = (2.0 * y * d_eps * (eps_n * yl2 / (w_s + w_n) - w_n)
                 / ((eps_n * y + w_n) * (eps_s * y + w_s)))       # rtm_n - rtm_s
        damp = np.exp(-y)
        arg_te = rte_a * d_rte * damp / (1.0 - rte_a * rte_s * damp)
        arg_tm = rtm_a * d_rtm * damp / (1.0 - rtm_a * rtm_s * damp)
        return y * (np.log1p(-arg_te) + np.log1p(-arg_tm))

    return pair_log


def free_energy_difference(material_a: MaterialParams, material_b: MaterialParams,
                           T: float, d: float, cfg: EngineConfig,
                           gap_b: Optional[GapModel] = None) -> FreeEnergyResult:
    """F_normal - F_super computed term by term in one Matsubara loop.

    The l = 0 term vanishes identically for a Drude-modeled slab a: its TE
    zero-mode reflection is zero and both phases of slab b saturate the TM
    reflection at unity.
    """
    if T <= 0.0 or d <= 0.0:
        raise DomainError("free_energy_difference requires T > 0 and d > 0")
    if not material_b.is_superconductor():
        raise DomainError(f"{material_b.name} has no superconducting phase")
    if T >= material_b.tc:
        return FreeEnergyResult(value=0.0, terms_used=0, error_estimate=0.0)
    if gap_b is None:
        gap_b = default_gap(material_b.tc)

    h = 2.0 * math.pi * CONST.k_b * T
    two_delta0 = 2.0 * gap_b.delta0
    l_cap = int(math.ceil(cfg.matsubara_cap_diff * two_delta0 / h))
    pref = CONST.k_b * T / (8.0 * math.pi * d * d)

    slab_a = _drude_slab(material_a)
    grid = _GGrid(material_b, gap_b, T, l_cap + 64)
    om2 = material_b.omega_p ** 2
    gamma = material_b.gamma

    def eps_n_at(l, xi):
        return 1.0 + om2 / (xi * (xi + gamma))

    def eps_s_at(l, xi):
        return 1.0 + (om2 / xi) * (1.0 / (xi + gamma) + grid.at(l) / xi)

    acc = NeumaierSum()
    err_acc = 0.0
    quiet = 0
    l = 0
    sl = 0.0
    l_stop = 200 * l_cap + 10000
    while l < l_stop:
        l += 1
        xi = h * l
        yl = 2.0 * d * xi / CONST.hbar_c
        sl, el = _term_integral(
            _diff_pair_log(slab_a, eps_n_at, eps_s_at, l, xi, yl),
            yl, cfg.rel_tol_quadrature)
        acc.add(sl)
        err_acc += el
        if abs(sl) <= cfg.rel_tol_series * abs(acc.value):
            quiet += 1
            if quiet >= 3 and l >= l_cap:
                break
        else:
            quiet = 0
    else:
        raise ConvergenceError(
            f"difference series not converged after {l} terms",
            error_estimate=abs(sl),
        )
    return FreeEnergyResult(value=pref * acc.value, terms_used=l + 1,
                            error_estimate=pref * (err_acc + abs(sl)))


def delta_force_pfa(material_a: MaterialParams, material_b: MaterialParams,
                    R_um: float, T: float, d: float, cfg: EngineConfig,
                    gap_b: Optional[GapModel] = None) -> DeltaForceResult:
    """Sphere-plate force jump 2 pi R [F_n - F_s] in fN, with the d/R bound."""
    if R_um <= 0.0:
        raise DomainError("sphere radius must be positive")
    r_nm = R_um * 1000.0
    bound = d / r_nm
    if bound >= 1e-2:
        warnings.warn(
            f"d/R = {bound:.3e}: proximity-force error bound is larger than 1%",
            PfaAccuracyWarning,
        )
    diff = free_energy_difference(material_a, material_b, T, d, cfg, gap_b=gap_b)
    force_ev_nm = 2.0 * math.pi * r_nm * diff.value
    return DeltaForceResult(
        delta_f_fn=force_ev_nm * CONST.ev_per_nm_to_fn,
        diff_ev_nm2=diff.value,
        pfa_bound=bound,
        terms_used=diff.terms_used,
        error_estimate=diff.error_estimate * 2.0 * math.pi * r_nm * CONST.ev_per_nm_to_fn,
    )
