"""Joint-spectrum lattice and elementary-cell transport around defects.

The joint spectrum is a lattice of sites (jz, n) with n indexing ascending
energies inside the jz column.  An elementary cell is spanned by
u = one step up in the same column and v = one step to the next column
with an integer offset.  Transporting a cell around a closed loop and
re-expressing the final (u, v) in the initial basis yields an integer
matrix of determinant one; around a lattice defect it is a nontrivial
shear, which is the quantum fingerprint of Hamiltonian monodromy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spectrum import JointSpectrum

TIE_RTOL = 1e-9


class TransportError(RuntimeError):
    """Cell transport left the lattice support or the loop failed to close."""


class TransportAmbiguityError(TransportError):
    """Two candidate continuation sites are equally close; re-route the loop."""


@dataclass(frozen=True)
class QuantumLattice:
    """Columns of the joint spectrum: jz value -> ascending energy array."""

    jz: np.ndarray
    columns: tuple[np.ndarray, ...]

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    def column_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.columns)

    def nearest_column(self, jz_value: float) -> int:
        return int(np.argmin(np.abs(self.jz - jz_value)))


def build_lattice(spec: JointSpectrum) -> QuantumLattice:
    """Arrange the joint spectrum into jz columns with ascending energies."""
    by_jz: dict[float, list[float]] = {}
    for lv in spec.levels:
        by_jz.setdefault(lv.jz, []).append(lv.energy)
    jz_sorted = np.array(sorted(by_jz))
    columns = tuple(np.array(sorted(by_jz[j])) for j in jz_sorted)
    return QuantumLattice(jz=jz_sorted, columns=columns)


@dataclass(frozen=True)
class LatticeCell:
    """Elementary cell anchored at site (jz, n).

    The u edge points to (jz, n+1); the v edge points to site n + dn in the
    next column.  ``dn`` may be left None and is then resolved at the start
    of a transport by nearest energy.
    """

    jz: float
    n: int
    dn: Optional[int] = None


@dataclass(frozen=True)
class TransportResult:
    """Outcome of transporting a cell around a closed loop.

    ``matrix`` rows give the final basis vectors (u, v) as integer
    combinations of the initial ones; for this lattice u is preserved and v
    picks up an integer multiple of u, so the matrix is a lower unipotent
    shear with determinant one.
    """

    start: LatticeCell
    final: LatticeCell
    matrix: tuple[tuple[int, int], tuple[int, int]]
    trace: tuple[LatticeCell, ...]


def _nearest(values: np.ndarray, energy: float, tie_rtol: float,
             context: str) -> int:
    dist = np.abs(values - energy)
    order = np.argsort(dist, kind="stable")
    best = int(order[0])
    if len(order) > 1:
        spacing = float(np.median(np.diff(values))) if len(values) > 1 else np.inf
        if dist[order[1]] - dist[best] <= tie_rtol * spacing:
            raise TransportAmbiguityError(
                f"{context}: candidates {best} and {int(order[1])} are equally "
                f"close to E={energy:.6g}; re-route the loop"
            )
    return best


class _Transporter:
    def __init__(self, lattice: QuantumLattice, tie_rtol: float):
        self.lat = lattice
        self.tie_rtol = tie_rtol

    def col(self, idx: int) -> np.ndarray:
        if idx < 0 or idx >= self.lat.n_columns:
            raise TransportError(f"loop exits the lattice support at column {idx}")
        return self.lat.columns[idx]

    def check_corners(self, idx: int, n: int, dn: int) -> None:
        here = self.col(idx)
        there = self.col(idx + 1)
        m = n + dn
        if not (0 <= n and n + 1 < len(here) and 0 <= m and m + 1 < len(there)):
            raise TransportError(
                f"cell corners missing at column jz={self.lat.jz[idx]}: "
                f"n={n}, dn={dn} (column sizes {len(here)}, {len(there)})"
            )

    def edge_mid(self, idx: int, n: int) -> float:
        """Energy midpoint of the u edge starting at site n."""
        col = self.col(idx)
        if not 0 <= n < len(col) - 1:
            raise TransportError(
                f"no u edge at site n={n} of column jz={self.lat.jz[idx]} "
                f"(size {len(col)})"
            )
        return 0.5 * float(col[n] + col[n + 1])

    def edge_mids(self, idx: int) -> np.ndarray:
        col = self.col(idx)
        if len(col) < 2:
            raise TransportError(
                f"column jz={self.lat.jz[idx]} has no room for a cell "
                f"(size {len(col)}); the loop leaves the usable support"
            )
        return 0.5 * (col[:-1] + col[1:])

    def track_vertical(self, idx: int, n: int, dn: int, e_target: float) -> int:
        """Translate the cell along u so the origin is nearest to e_target."""
        here = self.col(idx)
        there = self.col(idx + 1)
        n_lo, n_hi = 0, len(here) - 2
        m_lo, m_hi = -dn, len(there) - 2 - dn
        lo, hi = max(n_lo, m_lo), min(n_hi, m_hi)
        if lo > hi:
            raise TransportError(
                f"no valid cell position in column jz={self.lat.jz[idx]} for dn={dn}"
            )
        window = here[lo:hi + 1]
        best = lo + int(np.argmin(np.abs(window - e_target)))
        return best

    def step(self, idx: int, n: int, dn: int, direction: int) -> tuple[int, int, int]:
        """One column step; returns (idx', n', dn').

        The cell is tracked through its u-edge midpoints: the new v edge is
        the u edge of the adjacent column whose midpoint best continues the
        current cell linearly in energy.  Midpoints, rather than single
        sites, keep the continuation stable where a column gains or loses a
        level (the midpoint shifts by half a spacing, the sites by a whole
        one)."""
        mid_here = self.edge_mid(idx, n)
        mid_there = self.edge_mid(idx + 1, n + dn)
        if direction == +1:
            new_idx = idx + 1
            new_n = n + dn
            predicted = 2.0 * mid_there - mid_here
            mids = self.edge_mids(new_idx + 1)
            m = _nearest(mids, predicted, self.tie_rtol,
                         f"continuation into column jz={self.lat.jz[new_idx + 1]}")
            new_dn = m - new_n
        else:
            new_idx = idx - 1
            predicted = 2.0 * mid_here - mid_there
            mids = self.edge_mids(new_idx)
            p = _nearest(mids, predicted, self.tie_rtol,
                         f"continuation into column jz={self.lat.jz[new_idx]}")
            new_n = p
            new_dn = n - p
        self.check_corners(new_idx, new_n, new_dn)
        return new_idx, new_n, new_dn


def _stations(lattice: QuantumLattice, loop) -> list[tuple[int, float]]:
    """Expand the waypoint polyline into one (column index, target E) per step."""
    waypoints = [(float(j), float(e)) for j, e in loop]
    if len(waypoints) < 2:
        raise TransportError("loop needs at least two waypoints")
    stations = []
    idx_prev = lattice.nearest_column(waypoints[0][0])
    e_prev = waypoints[0][1]
    stations.append((idx_prev, e_prev))
    for jz_w, e_w in waypoints[1:]:
        idx = lattice.nearest_column(jz_w)
        if idx == idx_prev:
            stations.append((idx, e_w))
        else:
            step = 1 if idx > idx_prev else -1
            jz_a = lattice.jz[idx_prev]
            jz_b = lattice.jz[idx]
            for k in range(idx_prev + step, idx + step, step):
                t = (lattice.jz[k] - jz_a) / (jz_b - jz_a)
                stations.append((k, e_prev + t * (e_w - e_prev)))
        idx_prev, e_prev = idx, e_w
    first, last = stations[0], stations[-1]
    if first[0] != last[0] or abs(first[1] - last[1]) > 1e-9 * max(1.0, abs(first[1])):
        raise TransportError("loop is not closed: first and last waypoints differ")
    return stations


def transport_cell(lattice: QuantumLattice, start: LatticeCell, loop,
                   tie_rtol: float = TIE_RTOL) -> TransportResult:
    """Carry an elementary cell around a closed (jz, E) polyline.

    Column-to-column steps update the v edge by nearest-energy linear
    continuation of the cell's u-edge midpoints; within a column the cell
    slides along u to follow the loop.  The loop must close and return the
    origin to its starting site; the monodromy matrix is then
    [[1, 0], [dn_final - dn_start, 1]] in the (u, v) basis (rows express
    the final u, v in the initial basis).
    """
    tr = _Transporter(lattice, tie_rtol)
    stations = _stations(lattice, loop)
    idx = lattice.nearest_column(start.jz)
    if idx != stations[0][0]:
        raise TransportError(
            f"start cell sits in column jz={lattice.jz[idx]} but the loop "
            f"begins at jz={lattice.jz[stations[0][0]]}"
        )
    n = start.n
    if not 0 <= n < len(tr.col(idx)) - 1:
        raise TransportError(f"start site n={n} leaves no room for the u edge "
                             f"in a column of size {len(tr.col(idx))}")
    if start.dn is None:
        m = _nearest(tr.edge_mids(idx + 1), tr.edge_mid(idx, n), tie_rtol,
                     "initial v edge")
        dn = m - n
    else:
        dn = int(start.dn)
    tr.check_corners(idx, n, dn)

    n = tr.track_vertical(idx, n, dn, stations[0][1])
    anchor = LatticeCell(jz=float(lattice.jz[idx]), n=n, dn=dn)
    trace = [anchor]

    for st_idx, st_energy in stations[1:]:
        if st_idx != idx:
            direction = 1 if st_idx > idx else -1
            idx, n, dn = tr.step(idx, n, dn, direction)
        n = tr.track_vertical(idx, n, dn, st_energy)
        trace.append(LatticeCell(jz=float(lattice.jz[idx]), n=n, dn=dn))

    final = trace[-1]
    if final.jz != anchor.jz or final.n != anchor.n:
        raise TransportError(
            f"transport did not return to its start: began at "
            f"(jz={anchor.jz}, n={anchor.n}), ended at (jz={final.jz}, n={final.n})"
        )
    shear = final.dn - anchor.dn
    matrix = ((1, 0), (shear, 1))
    det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    assert det == 1
    return TransportResult(start=anchor, final=final, matrix=matrix,
                           trace=tuple(trace))
