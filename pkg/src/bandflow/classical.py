"""Completely classical model on S^2 x S^2: orbit-space reduction, the
energy-momentum map image with its critical values, and the reduced-volume
profile in the momentum J_z = L_z + S_z.

The axial symmetry reduces the dynamics to the invariant polynomials
(S_z, L_z, tau, sigma) with tau = SxLx + SyLy and sigma = SxLy - SyLx,
subject to sigma^2 = (|S|^2 - S_z^2)(|L|^2 - L_z^2) - tau^2.  In these
variables H = 2 S_z (A + delta L_z + d L_z^2) + 2 Re(gamma) tau
- 2 Im(gamma) sigma, so every fixed (S_z, L_z) fiber traces a circle of
radius rho = sqrt((|S|^2 - S_z^2)(|L|^2 - L_z^2)) in the (tau, sigma) plane
and the slice energies extremize analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PhysParams

NORM_ATOL = 1e-12


@dataclass(frozen=True)
class ClassicalPoint:
    """A phase-space point: two angular-momentum vectors of fixed length."""

    svec: np.ndarray
    lvec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "svec", np.asarray(self.svec, dtype=float))
        object.__setattr__(self, "lvec", np.asarray(self.lvec, dtype=float))
        if self.svec.shape != (3,) or self.lvec.shape != (3,):
            raise ValueError("svec and lvec must be 3-vectors")


@dataclass(frozen=True)
class ReducedPoint:
    """Values of the axially invariant polynomials at a phase-space point."""

    sz: float
    lz: float
    tau: float
    sigma: float


def reduced_invariants(point: ClassicalPoint) -> ReducedPoint:
    sx, sy, sz = point.svec
    lx, ly, lz = point.lvec
    return ReducedPoint(sz=float(sz), lz=float(lz),
                        tau=float(sx * lx + sy * ly),
                        sigma=float(sx * ly - sy * lx))


def syzygy_residual(point: ClassicalPoint) -> float:
    """sigma^2 - [(|S|^2 - S_z^2)(|L|^2 - L_z^2) - tau^2]; zero on phase space."""
    inv = reduced_invariants(point)
    s2 = float(point.svec @ point.svec)
    l2 = float(point.lvec @ point.lvec)
    rhs = (s2 - inv.sz ** 2) * (l2 - inv.lz ** 2) - inv.tau ** 2
    return inv.sigma ** 2 - rhs


def h_classical(point: ClassicalPoint, params: PhysParams) -> float:
    """Energy at a classical point; radii are checked against (|S|, |L|) = (S, L)."""
    s_norm = float(np.linalg.norm(point.svec))
    l_norm = float(np.linalg.norm(point.lvec))
    scale = max(1.0, params.S, float(params.L))
    if abs(s_norm - params.S) > NORM_ATOL * scale or \
            abs(l_norm - params.L) > NORM_ATOL * scale:
        raise ValueError(
            f"point radii ({s_norm}, {l_norm}) do not match (|S|, |L|) = "
            f"({params.S}, {params.L})"
        )
    inv = reduced_invariants(point)
    f = params.A + params.delta * inv.lz + params.d * inv.lz ** 2
    return 2.0 * inv.sz * f + 2.0 * params.gamma.real * inv.tau \
        - 2.0 * params.gamma.imag * inv.sigma


def _slice_rho(sz, lz, s_norm, l_norm):
    return np.sqrt(np.maximum((s_norm ** 2 - sz ** 2) * (l_norm ** 2 - lz ** 2), 0.0))


def _slice_range(jz: float, params: PhysParams, scan_points: int):
    """Analytic (E_min, E_max) of one J_z slice by a dense scan over S_z."""
    s_norm, l_norm = params.S, float(params.L)
    sz_lo = max(-s_norm, jz - l_norm)
    sz_hi = min(s_norm, jz + l_norm)
    sz = np.linspace(sz_lo, sz_hi, scan_points)
    lz = jz - sz
    f = params.A + params.delta * lz + params.d * lz ** 2
    amp = 2.0 * abs(params.gamma) * _slice_rho(sz, lz, s_norm, l_norm)
    center = 2.0 * sz * f
    return float(np.min(center - amp)), float(np.max(center + amp))


@dataclass(frozen=True)
class CriticalValue:
    """An isolated critical value of (J_z, H) and where it sits in the image."""

    jz: float
    energy: float
    location: str  # "boundary" or "interior"


@dataclass(frozen=True)
class EMImage:
    """Per-slice energy range of the (J_z, H) image plus its critical values."""

    jz: np.ndarray
    e_min: np.ndarray
    e_max: np.ndarray
    critical_values: tuple[CriticalValue, ...]


def em_image(params: PhysParams, jz_samples, scan_points: int = 2001,
             interior_margin_rtol: float = 1e-6) -> EMImage:
    """Image of the energy-momentum map over the requested J_z slices.

    Critical values come from the four one-point orbits S_z = +-|S|,
    L_z = +-|L|; one is classified interior when it clears both slice
    boundaries by a margin of ``interior_margin_rtol`` times the slice span,
    and boundary otherwise.
    """
    if params.gamma == 0:
        raise ValueError("gamma must be nonzero, otherwise the image collapses")
    s_norm, l_norm = params.S, float(params.L)
    jz = np.asarray(jz_samples, dtype=float)
    support = l_norm + s_norm
    if np.any(np.abs(jz) > support):
        bad = jz[np.abs(jz) > support]
        raise ValueError(f"slices {bad} lie outside |J_z| <= |L|+|S| = {support}")

    e_min = np.empty_like(jz)
    e_max = np.empty_like(jz)
    for i, val in enumerate(jz):
        e_min[i], e_max[i] = _slice_range(float(val), params, scan_points)

    critical = []
    for sz in (s_norm, -s_norm):
        for lz in (l_norm, -l_norm):
            jz_star = sz + lz
            e_star = 2.0 * sz * (params.A + params.delta * lz + params.d * lz ** 2)
            lo, hi = _slice_range(jz_star, params, scan_points)
            margin = interior_margin_rtol * (hi - lo)
            interior = (lo + margin < e_star < hi - margin)
            critical.append(CriticalValue(jz=float(jz_star), energy=float(e_star),
                                          location="interior" if interior
                                          else "boundary"))
    critical.sort(key=lambda cv: (cv.jz, cv.energy))
    return EMImage(jz=jz, e_min=e_min, e_max=e_max, critical_values=tuple(critical))


@dataclass(frozen=True)
class ReducedVolumeProfile:
    """Length of the allowed S_z interval per J_z slice (normalization c = 1)."""

    jz: np.ndarray
    volume: np.ndarray

    @staticmethod
    def kinks(s_norm: float, l_norm: float) -> tuple[float, ...]:
        inner = abs(l_norm - s_norm)
        outer = l_norm + s_norm
        return (-outer, -inner, inner, outer)


def dh_volume(s_norm: float, l_norm: float, jz_samples) -> ReducedVolumeProfile:
    """Reduced phase-space volume as a function of J_z.

    Piecewise linear with kinks exactly at +-(|L|-|S|) and +-(|L|+|S|),
    vanishing at the support endpoints.
    """
    if s_norm <= 0 or l_norm <= 0:
        raise ValueError("radii must be positive")
    jz = np.asarray(jz_samples, dtype=float)
    upper = np.minimum(s_norm, jz + l_norm)
    lower = np.maximum(-s_norm, jz - l_norm)
    return ReducedVolumeProfile(jz=jz, volume=np.maximum(upper - lower, 0.0))


@dataclass(frozen=True)
class OrbitSpaceReport:
    n_points: int
    max_residual: float
    max_tau_excess: float
    ok: bool


def orbit_space_check(points, atol: float = 1e-10) -> OrbitSpaceReport:
    """Verify the syzygy and the tau bound on a sample of classical points."""
    max_res = 0.0
    max_excess = 0.0
    n = 0
    for point in points:
        n += 1
        max_res = max(max_res, abs(syzygy_residual(point)))
        inv = reduced_invariants(point)
        s2 = float(point.svec @ point.svec)
        l2 = float(point.lvec @ point.lvec)
        bound = (s2 - inv.sz ** 2) * (l2 - inv.lz ** 2)
        max_excess = max(max_excess, inv.tau ** 2 - bound)
    return OrbitSpaceReport(n_points=n, max_residual=max_res,
                            max_tau_excess=max_excess,
                            ok=max_res <= atol and max_excess <= atol)
