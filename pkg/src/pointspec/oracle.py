"""Finite-difference eigenvalue oracle for the boxed contact interaction.

The oracle never uses the sector reduction of :mod:`pointspec.spectrum`; it
discretizes ``-d^2/dx^2`` on both half boxes and closes the grid with the
full 2x2 boundary condition, so it checks the analytic solver independently.

Grid: ``x_j = j h`` for ``j = 1..n`` on the right, ``x_{-j} = -j h`` on the
left, ``h = L / (n + 1)``, Dirichlet values at ``x = +-L``. The ghost values
``Phi = (phi(0+), phi(0-))`` enter the 3-point Laplacian at ``x_{+-1}``. With
the second-order one-sided derivative

    Phi' ~ (-3 Phi + 4 Phi_1 - Phi_2) / (2h),

the boundary condition becomes the 2x2 linear system

    [(U - I) - (3 i L0 / 2h)(U + I)] Phi = -(i L0 / 2h)(U + I)(4 Phi_1 - Phi_2),

which eliminates the ghosts. The resulting operator is banded but not
symmetric; its lowest eigenvalues are found by shift-invert Arnoldi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .boundary import SIGMA_0, BoundaryMatrix, is_parity_invariant
from .errors import GridTooCoarse
from .spectrum import Branch, BoxSpec, Level, Parity, Spectrum, spectrum

#: grids used by :func:`convergence_report`
CONVERGENCE_GRIDS = (250, 500, 1000, 2000)
#: resolution limit on k h (or kappa h) for a requested level
MAX_KH = 0.5
_PROBE_SIDE = 64


@dataclass(frozen=True)
class GridSpec:
    n_per_side: int = 1000

    def __post_init__(self):
        if self.n_per_side < 16:
            raise ValueError(f"n_per_side must be >= 16, got {self.n_per_side}")

    def spacing(self, box: BoxSpec) -> float:
        return box.half_width / (self.n_per_side + 1)


def ghost_closure(u: BoundaryMatrix, h: float) -> np.ndarray:
    """Matrix ``C`` with ``Phi = C (4 Phi_1 - Phi_2)``."""
    m = u.matrix
    lhs = (m - SIGMA_0) - (1.5j * u.l0 / h) * (m + SIGMA_0)
    rhs = -(0.5j * u.l0 / h) * (m + SIGMA_0)
    if np.linalg.cond(lhs) > 1e12:
        raise GridTooCoarse(f"ghost elimination is singular at h={h:.3e}; change the grid")
    return np.linalg.solve(lhs, rhs)


def fd_hamiltonian(u: BoundaryMatrix, box: BoxSpec, grid: GridSpec) -> sp.csc_matrix:
    """Discrete Hamiltonian; unknowns ordered ``x_{-n}, ..., x_{-1}, x_1, ..., x_n``."""
    n = grid.n_per_side
    h = grid.spacing(box)
    c = ghost_closure(u, h)
    size = 2 * n
    main = np.full(size, 2.0, dtype=complex)
    off = np.full(size - 1, -1.0, dtype=complex)
    off[n - 1] = 0.0  # the halves couple only through the closure
    rows, cols, vals = [], [], []
    right, left = n, n - 1
    for row, coeff in ((right, c[0]), (left, c[1])):
        # -(ghost) term of the Laplacian row, ghost = coeff . (4 Phi_1 - Phi_2)
        for col, w in ((right, -4.0 * coeff[0]), (right + 1, coeff[0]),
                       (left, -4.0 * coeff[1]), (left - 1, coeff[1])):
            rows.append(row)
            cols.append(col)
            vals.append(w)
    closure = sp.coo_matrix((vals, (rows, cols)), shape=(size, size))
    lap = sp.diags([off, main, off], [-1, 0, 1], shape=(size, size), format="csc")
    return ((lap + closure) / h ** 2).tocsc()


def _shift_below(u: BoundaryMatrix, box: BoxSpec) -> float:
    # the spectrum is real and bounded below; a small dense solve locates its bottom
    coarse = fd_hamiltonian(u, box, GridSpec(_PROBE_SIDE)).toarray()
    lowest = float(np.min(scipy.linalg.eigvals(coarse).real))
    return lowest - max(1.0, 0.5 * abs(lowest))


def _parity_of(vec: np.ndarray, n: int, parity_invariant: bool) -> Parity:
    if not parity_invariant:
        return Parity.UNLABELED
    left = vec[:n][::-1]
    right = vec[n:]
    norm = np.vdot(vec, vec).real
    p = 2.0 * np.vdot(right, left).real / norm
    if p > 0.99:
        return Parity.EVEN
    if p < -0.99:
        return Parity.ODD
    return Parity.UNLABELED


def bound_scale(u: BoundaryMatrix) -> float:
    """Largest attractive ``tan(theta/2) / L0`` over the eigenphases of ``U``.

    A bound level decays at least this fast, so it is the grid's resolution
    requirement even when the level itself is missing from a coarse grid.
    The Dirichlet eigenvalue -1 decouples the halves and contributes nothing.
    """
    worst = 0.0
    for lam in np.linalg.eigvals(u.matrix):
        if abs(lam + 1.0) < 1e-12:
            continue
        worst = max(worst, lam.imag / (1.0 + lam.real))
    return worst / u.l0


def fd_eigenvalues(u: BoundaryMatrix, box: BoxSpec, grid: GridSpec, num_levels: int,
                   with_vectors: bool = False):
    """Lowest ``num_levels`` eigenvalues of the discrete Hamiltonian (real parts, sorted)."""
    n = grid.n_per_side
    if num_levels > n // 4:
        raise GridTooCoarse(f"{num_levels} levels requested on {n} points per side")
    if bound_scale(u) * grid.spacing(box) > MAX_KH:
        raise GridTooCoarse(f"bound level decays faster than the grid resolves (kappa h > {MAX_KH})")
    H = fd_hamiltonian(u, box, grid)
    sigma = _shift_below(u, box)
    extra = min(num_levels + 4, 2 * n - 2)
    w, vecs = spla.eigs(H, k=extra, sigma=sigma, which="LM")
    order = np.argsort(w.real)[:num_levels]
    w, vecs = w[order], vecs[:, order]
    scale = np.maximum(1.0, np.abs(w))
    if np.any(np.abs(w.imag) > 1e-9 * scale):
        raise ArithmeticError("discrete spectrum is not real; boundary closure is inadmissible")
    h = grid.spacing(box)
    if math.sqrt(abs(w.real).max()) * h > MAX_KH:
        raise GridTooCoarse(f"k h exceeds {MAX_KH} for the requested levels")
    if with_vectors:
        return w.real, vecs
    return w.real


def fd_spectrum(u: BoundaryMatrix, box: BoxSpec, grid: GridSpec, num_levels: int) -> Spectrum:
    """Finite-difference spectrum with levels labelled by the parity of their eigenvectors."""
    energies, vecs = fd_eigenvalues(u, box, grid, num_levels, with_vectors=True)
    pinv = is_parity_invariant(u)
    levels = []
    for i, e in enumerate(energies):
        parity = _parity_of(vecs[:, i], grid.n_per_side, pinv)
        if e < 0.0:
            levels.append(Level(i, parity, Branch.NEGATIVE, 0.0, math.sqrt(-e), float(e), math.nan))
        else:
            levels.append(Level(i, parity, Branch.POSITIVE, math.sqrt(e), 0.0, float(e), math.nan))
    return Spectrum(tuple(levels), box, u)


def momentum_scale_deviation(e_test, e_ref) -> np.ndarray:
    """``|dE| / (2 max(1, sqrt|E|))``: the momentum error away from E = 0, capped near it."""
    e_test = np.asarray(e_test, dtype=float)
    e_ref = np.asarray(e_ref, dtype=float)
    return np.abs(e_test - e_ref) / (2.0 * np.maximum(1.0, np.sqrt(np.abs(e_ref))))


def richardson(e_coarse, e_fine, h_coarse: float, h_fine: float, order: float = 2.0):
    """Extrapolate two grid values assuming error ``~ h^order``."""
    a, b = h_coarse ** order, h_fine ** order
    return (a * np.asarray(e_fine) - b * np.asarray(e_coarse)) / (a - b)


@dataclass
class ConvergenceReport:
    grids: tuple
    spacings: np.ndarray
    exact: np.ndarray
    fd: np.ndarray            # shape (len(grids), levels)
    orders: np.ndarray        # fitted order per level; nan where the grid error is at roundoff
    extrapolated: np.ndarray
    extrapolated_deviation: np.ndarray

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.fd - self.exact)

    def order_ok(self, target: float = 2.0, tol: float = 0.3) -> bool:
        o = self.orders[~np.isnan(self.orders)]
        return bool(np.all(np.abs(o - target) <= tol))

    def as_dict(self) -> dict:
        return {
            "grids": list(self.grids),
            "exact_energies": self.exact.tolist(),
            "fd_energies": self.fd.tolist(),
            "orders": [None if np.isnan(o) else float(o) for o in self.orders],
            "extrapolated_energies": self.extrapolated.tolist(),
            "max_extrapolated_deviation": float(np.max(self.extrapolated_deviation)),
        }


def convergence_report(u: BoundaryMatrix, box: BoxSpec, levels: int,
                       grids=CONVERGENCE_GRIDS) -> ConvergenceReport:
    """Compare FD levels on successively refined grids against the analytic solver.

    Levels whose coarsest-grid error already sits at the roundoff floor (the
    zero-energy mode is linear and hence exact on any grid) get order ``nan``.
    """
    exact = spectrum(u, box, levels).energies()
    hs = np.array([GridSpec(n).spacing(box) for n in grids])
    fd = np.array([fd_eigenvalues(u, box, GridSpec(n), levels) for n in grids])
    err = np.abs(fd - exact)
    orders = np.full(levels, np.nan)
    for q in range(levels):
        floor = 1e-9 * max(1.0, abs(exact[q]))
        if np.all(err[:, q] > floor):
            orders[q] = np.polyfit(np.log(hs), np.log(err[:, q]), 1)[0]
    extrap = richardson(fd[-2], fd[-1], hs[-2], hs[-1])
    return ConvergenceReport(
        grids=tuple(grids),
        spacings=hs,
        exact=exact,
        fd=fd,
        orders=orders,
        extrapolated=extrap,
        extrapolated_deviation=momentum_scale_deviation(extrap, exact),
    )
