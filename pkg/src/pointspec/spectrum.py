"""Box spectra of a contact interaction with Dirichlet walls at x = +-L.

Reduction to sector equations
-----------------------------
Any eigenfunction of ``-d^2/dx^2`` vanishing at both walls has the form

    phi(x) = A sin(k (L - x))   for x > 0,
    phi(x) = B sin(k (L + x))   for x < 0,

so with ``v = (A, B)`` the boundary vectors are ``Phi = sin(kL) v`` and
``Phi' = -k cos(kL) v``: both are proportional to the same vector. The
boundary condition ``(U - I) Phi + i L0 (U + I) Phi' = 0`` then reads

    [sin(kL) (U - I) - i k L0 cos(kL) (U + I)] v = 0,

which has a nonzero solution exactly when ``v`` is an eigenvector of ``U``
with eigenvalue ``e^{i theta}`` and

    sin(theta/2) sin(kL) - k L0 cos(theta/2) cos(kL) = 0,

i.e. ``k L0 cot(kL) = tan(theta/2)``. This holds for any unitary ``U``, so
the spectrum depends on ``U`` only through its two eigenphases. For parity
invariant ``U`` the eigenvectors are ``(1, 1)`` and ``(1, -1)`` and the two
eigenphases are ``theta_+`` and ``theta_-``.

On every branch ``kL in (n pi, (n + 1) pi)`` with ``n >= 1`` the left side
decreases monotonically from +inf to -inf, so there is exactly one root per
branch. On ``(0, pi)`` it decreases from ``L0/L``, so the lowest branch holds
a positive root only when ``tan(theta/2) < L0/L``. Above that threshold the
root continues to imaginary momentum ``k = i kappa``, where
``kappa L0 coth(kappa L) = tan(theta/2)`` has one solution and ``E = -kappa^2``.
At the threshold itself the level sits at ``E = 0`` with ``phi`` linear on
each half.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .boundary import (
    ANGLE_TOL,
    EVEN_VECTOR,
    ODD_VECTOR,
    SIGMA_0,
    BoundaryData,
    BoundaryMatrix,
    TorusPoint,
    angles_close,
    is_parity_invariant,
    reduce_angle,
    torus_from_u,
)
from .errors import LevelMismatch, NonpositiveScale

#: relative energy window within which two levels count as degenerate
DEGENERACY_TOL = 1e-11
#: relative tolerance on tan(theta/2) = L0/L for the zero-energy level
THRESHOLD_TOL = 1e-12


class Parity(enum.Enum):
    EVEN = "E"
    ODD = "O"
    UNLABELED = "U"


class Branch(enum.Enum):
    POSITIVE = "positive"
    ZERO = "zero"
    NEGATIVE = "negative"


_PARITY_RANK = {Parity.EVEN: 0, Parity.ODD: 1, Parity.UNLABELED: 2}


@dataclass(frozen=True)
class BoxSpec:
    half_width: float = 1.0

    def __post_init__(self):
        if not self.half_width > 0.0:
            raise NonpositiveScale(f"half_width must be positive, got {self.half_width}")


@dataclass(frozen=True)
class Level:
    index: int
    parity: Parity
    branch: Branch
    k: float
    kappa: float
    energy: float
    #: eigenphase of U whose sector equation this level solves
    theta: float

    @property
    def k_or_kappa(self) -> float:
        if self.branch is Branch.NEGATIVE:
            return self.kappa
        return self.k


@dataclass(frozen=True)
class Spectrum:
    levels: tuple
    box: BoxSpec
    source: object = None

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    def momenta(self) -> np.ndarray:
        return np.array([lv.k_or_kappa for lv in self.levels])

    def parities(self) -> list:
        return [lv.parity for lv in self.levels]

    def sector(self, parity: Parity) -> list:
        return [lv for lv in self.levels if lv.parity is parity]


@dataclass(frozen=True)
class SectorPhase:
    """One eigenphase of U with its parity label and unit eigenvector."""

    theta: float
    parity: Parity
    vector: np.ndarray


# --------------------------------------------------------------------------
# eigenphases

def sectors(u: BoundaryMatrix) -> tuple:
    """Eigenphases of ``u`` as :class:`SectorPhase` pairs.

    Parity invariant matrices use the fixed even/odd eigenvectors, which keeps
    the labels well defined even when the eigenphases coincide.
    """
    if is_parity_invariant(u):
        t = torus_from_u(u)
        return (
            SectorPhase(t.theta_plus, Parity.EVEN, EVEN_VECTOR),
            SectorPhase(t.theta_minus, Parity.ODD, ODD_VECTOR),
        )
    w, vecs = np.linalg.eig(u.matrix)
    phases = [reduce_angle(float(np.angle(z))) for z in w]
    order = sorted(range(2), key=lambda i: phases[i])
    return tuple(
        SectorPhase(phases[i], Parity.UNLABELED, vecs[:, i] / np.linalg.norm(vecs[:, i]))
        for i in order
    )


def eigenphases(u: BoundaryMatrix) -> tuple:
    """The two eigenphases of ``u`` in [0, 2 pi).

    For parity invariant ``u`` these are ``(theta_+, theta_-)`` in that order;
    otherwise they are sorted ascending.
    """
    a, b = sectors(u)
    return a.theta, b.theta


# --------------------------------------------------------------------------
# sector equation

def sector_value(theta: float, k: float, L: float, L0: float) -> float:
    """Pole-free secular function ``sin(theta/2) sin(kL) - k L0 cos(theta/2) cos(kL)``."""
    h = 0.5 * theta
    return math.sin(h) * math.sin(k * L) - k * L0 * math.cos(h) * math.cos(k * L)


def _half_angle_trig(theta: float) -> tuple:
    """``(sin, cos)`` of theta/2 for theta reduced to [0, 2 pi), snapped at the poles."""
    t = reduce_angle(theta)
    if angles_close(t, math.pi, ANGLE_TOL):
        return 1.0, 0.0
    if angles_close(t, 0.0, ANGLE_TOL):
        return 0.0, 1.0
    return math.sin(0.5 * t), math.cos(0.5 * t)


def _threshold_state(theta: float, L: float, L0: float) -> int:
    """-1 below threshold (positive root on the lowest branch), 0 at it, +1 above."""
    s, c = _half_angle_trig(theta)
    if c <= 0.0:
        # tan(theta/2) is negative or infinite
        return 1 if c == 0.0 else -1
    tau = s / c
    crit = L0 / L
    if abs(tau - crit) <= THRESHOLD_TOL * max(1.0, crit):
        return 0
    return 1 if tau > crit else -1


def _sinc(x: float) -> float:
    if abs(x) < 1e-4:
        return 1.0 - x * x / 6.0
    return math.sin(x) / x


def _reduced_secular(k: float, s: float, c: float, L: float, L0: float) -> float:
    # secular function divided by k, regular at k = 0
    return s * L * _sinc(k * L) - L0 * c * math.cos(k * L)


def _solve_bracket(f, a: float, b: float) -> float:
    return brentq(f, a, b, xtol=1e-300, rtol=1e-15, maxiter=500)


def sector_roots(theta: float, box: BoxSpec, L0: float, count: int) -> list:
    """The ``count`` smallest positive roots of the sector equation, ascending."""
    if count < 1:
        raise ValueError("count must be >= 1")
    L = box.half_width
    s, c = _half_angle_trig(theta)
    if c == 0.0:
        return [n * math.pi / L for n in range(1, count + 1)]

    def f(k):
        return _reduced_secular(k, s, c, L, L0)

    roots = []
    if _threshold_state(theta, L, L0) < 0:
        roots.append(_solve_bracket(f, 0.0, math.pi / L))
    n = 1
    while len(roots) < count:
        roots.append(_solve_bracket(f, n * math.pi / L, (n + 1) * math.pi / L))
        n += 1
    return roots


def _xcoth(x: float) -> float:
    if x < 1e-4:
        return 1.0 + x * x / 3.0 - x ** 4 / 45.0
    return x / math.tanh(x)


def negative_root(theta: float, box: BoxSpec, L0: float) -> Optional[float]:
    """Decay constant of the bound level below E = 0, if any.

    Returns ``kappa > 0`` solving ``kappa L0 coth(kappa L) = tan(theta/2)``,
    ``0.0`` for the zero-energy level at ``tan(theta/2) = L0/L``, and ``None``
    when neither exists (including ``theta = pi``, where kappa is infinite).
    """
    L = box.half_width
    state = _threshold_state(theta, L, L0)
    if state < 0:
        return None
    if state == 0:
        return 0.0
    s, c = _half_angle_trig(theta)
    if c == 0.0:
        return None
    tau = s / c

    def f(kappa):
        return (L0 / L) * _xcoth(kappa * L) - tau

    return _solve_bracket(f, 0.0, tau / L0 + 1.0 / L)


def sector_levels(theta: float, box: BoxSpec, L0: float, count: int,
                  parity: Parity = Parity.UNLABELED) -> list:
    """Lowest ``count`` levels of one sector (index fields set to -1)."""
    out = []
    kappa = negative_root(theta, box, L0)
    if kappa is not None:
        if kappa == 0.0:
            out.append(Level(-1, parity, Branch.ZERO, 0.0, 0.0, 0.0, theta))
        else:
            out.append(Level(-1, parity, Branch.NEGATIVE, 0.0, kappa, -kappa * kappa, theta))
    remaining = count - len(out)
    if remaining > 0:
        for k in sector_roots(theta, box, L0, remaining):
            out.append(Level(-1, parity, Branch.POSITIVE, k, 0.0, k * k, theta))
    return out[:count]


def merge_levels(groups: Sequence[Sequence[Level]], num_levels: int) -> tuple:
    """Sort levels by energy, order degenerate clusters Even before Odd, assign indices."""
    pool = sorted((lv for g in groups for lv in g), key=lambda lv: lv.energy)
    ordered = []
    i = 0
    while i < len(pool):
        j = i + 1
        while j < len(pool):
            e0 = pool[j - 1].energy
            if abs(pool[j].energy - e0) < DEGENERACY_TOL * max(1.0, abs(e0)):
                j += 1
            else:
                break
        ordered.extend(sorted(pool[i:j], key=lambda lv: _PARITY_RANK[lv.parity]))
        i = j
    ordered = ordered[:num_levels]
    return tuple(
        Level(idx, lv.parity, lv.branch, lv.k, lv.kappa, lv.energy, lv.theta)
        for idx, lv in enumerate(ordered)
    )


def spectrum(u: BoundaryMatrix, box: BoxSpec, num_levels: int) -> Spectrum:
    """Lowest ``num_levels`` levels of the boxed contact interaction ``u``."""
    if num_levels < 1:
        raise ValueError("num_levels must be >= 1")
    groups = [sector_levels(sp.theta, box, u.l0, num_levels, sp.parity) for sp in sectors(u)]
    return Spectrum(merge_levels(groups, num_levels), box, u)


def torus_spectrum(t: TorusPoint, box: BoxSpec, l0: float, num_levels: int) -> Spectrum:
    """Spectrum on the parity invariant torus, solved sector by sector."""
    groups = [
        sector_levels(t.theta_plus, box, l0, num_levels, Parity.EVEN),
        sector_levels(t.theta_minus, box, l0, num_levels, Parity.ODD),
    ]
    return Spectrum(merge_levels(groups, num_levels), box, t)


# --------------------------------------------------------------------------
# eigenfunctions

def _x_minus_sin(z: float) -> float:
    if abs(z) < 0.1:
        z2 = z * z
        return z * z2 * (1.0 / 6 - z2 * (1.0 / 120 - z2 * (1.0 / 5040 - z2 / 362880)))
    return z - math.sin(z)


def _sinh_minus_x(z: float) -> float:
    if abs(z) < 0.1:
        z2 = z * z
        return z * z2 * (1.0 / 6 + z2 * (1.0 / 120 + z2 * (1.0 / 5040 + z2 / 362880)))
    return math.sinh(z) - z


def _radial(level: Level, L: float):
    """Normalized profile ``f(y)`` and ``f'(y)`` of one half, ``y = L - |x|``."""
    if level.branch is Branch.ZERO:
        norm = math.sqrt(L ** 3 / 3.0)
        return (lambda y: y / norm), (lambda y: np.ones_like(y) / norm)
    if level.branch is Branch.POSITIVE:
        k = level.k
        norm = math.sqrt(_x_minus_sin(2 * k * L) / (4 * k))
        return (lambda y: np.sin(k * y) / norm), (lambda y: k * np.cos(k * y) / norm)
    kappa = level.kappa
    x = kappa * L
    if x > 20.0:
        # scaled by e^{-kappa L} to avoid overflow
        scaled = math.sqrt((1 - math.exp(-4 * x)) / (8 * kappa) - 0.5 * L * math.exp(-2 * x))

        def f(y):
            return np.exp(kappa * (y - L)) * (1 - np.exp(-2 * kappa * y)) / (2 * scaled)

        def fp(y):
            return kappa * np.exp(kappa * (y - L)) * (1 + np.exp(-2 * kappa * y)) / (2 * scaled)

        return f, fp
    norm = math.sqrt(_sinh_minus_x(2 * x) / (4 * kappa))
    return (lambda y: np.sinh(kappa * y) / norm), (lambda y: kappa * np.cosh(kappa * y) / norm)


def _amplitudes(u: BoundaryMatrix, level: Level, box: BoxSpec, tol: float = 1e-8):
    L = box.half_width
    f, fp = _radial(level, L)
    fL, fpL = float(f(np.float64(L))), float(fp(np.float64(L)))
    m = u.matrix
    system = fL * (m - SIGMA_0) - 1j * u.l0 * fpL * (m + SIGMA_0)
    scale = 2.0 * max(abs(fL), u.l0 * abs(fpL))
    _, sv, vh = np.linalg.svd(system)
    if sv[-1] > tol * scale:
        raise LevelMismatch(
            f"level {level.index} (E={level.energy:.6g}) violates the boundary condition "
            f"(smallest singular value {sv[-1]:.3e})"
        )
    if sv[0] <= tol * scale:
        # U proportional to I: every vector solves the system, pick the labelled one
        if level.parity is Parity.EVEN:
            v = EVEN_VECTOR.copy()
        elif level.parity is Parity.ODD:
            v = ODD_VECTOR.copy()
        else:
            v = np.array(sectors(u)[0].vector)
    else:
        v = vh[-1].conj()
    j = int(np.argmax(np.abs(v)))
    v = v * (abs(v[j]) / v[j])
    return v / np.linalg.norm(v), f, fp, fL, fpL


def level_boundary_data(u: BoundaryMatrix, level: Level, box: BoxSpec) -> BoundaryData:
    """Boundary vectors of the normalized eigenfunction of ``level``."""
    v, _, _, fL, fpL = _amplitudes(u, level, box)
    return BoundaryData(fL * v, -fpL * v)


def wavefunction(u: BoundaryMatrix, level: Level, box: BoxSpec,
                 xs: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    """Samples of the unit-norm eigenfunction of ``level`` at points ``xs``.

    Points must lie in ``[-L, L]`` and avoid the contact point ``x = 0``.
    """
    L = box.half_width
    xs = np.asarray(xs, dtype=float)
    if np.any(xs == 0.0) or np.any(np.abs(xs) > L):
        raise ValueError("sample points must lie in [-L, L] without x = 0")
    v, f, _, _, _ = _amplitudes(u, level, box)
    y = L - np.abs(xs)
    return np.where(xs > 0, v[0], v[1]) * f(y)
