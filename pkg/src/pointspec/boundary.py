"""U(2) boundary conditions for a contact interaction at x = 0.

A contact interaction on the punctured line is fixed by a 2x2 unitary ``U``
and a length scale ``L0`` through

    (U - I) Phi + i L0 (U + I) Phi' = 0,

where ``Phi = (phi(0+), phi(0-))`` and ``Phi' = (phi'(0+), -phi'(0-))``.
Parity invariant conditions (``sigma_1 U sigma_1 = U``) form a torus with
coordinates ``(theta_plus, theta_minus)``, the eigenphases of ``U`` on the
even vector ``(1, 1)`` and the odd vector ``(1, -1)``.

Units are hbar^2 / 2m = 1 throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstraintViolated,
    NonpositiveMomentum,
    NonpositiveScale,
    NotParityInvariant,
    NotUnitary,
    SingularSystem,
)

TWO_PI = 2.0 * math.pi

#: tolerance for structural predicates on inputs (unitarity, parity invariance)
STRUCTURAL_TOL = 1e-10
#: tolerance for modular angle comparisons and constructed outputs
ANGLE_TOL = 1e-12

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)

P_PLUS = 0.5 * (SIGMA_0 + SIGMA_1)
P_MINUS = 0.5 * (SIGMA_0 - SIGMA_1)

EVEN_VECTOR = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
ODD_VECTOR = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)

for _a in (SIGMA_0, SIGMA_1, SIGMA_2, SIGMA_3, P_PLUS, P_MINUS, EVEN_VECTOR, ODD_VECTOR):
    _a.flags.writeable = False


# --------------------------------------------------------------------------
# angles and extended reals

def reduce_angle(theta: float) -> float:
    """Reduce ``theta`` to the canonical range [0, 2 pi)."""
    r = math.fmod(float(theta), TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


def angle_distance(a: float, b: float) -> float:
    """Modular distance ``min(|d|, 2 pi - |d|)`` between two angles."""
    d = abs(reduce_angle(a) - reduce_angle(b))
    return min(d, TWO_PI - d)


def angles_close(a: float, b: float, tol: float = ANGLE_TOL) -> bool:
    return angle_distance(a, b) <= tol


def ext_inv(g: float) -> float:
    """Reciprocal on the extended reals: 1/0 = inf and 1/inf = 0."""
    if g == 0.0:
        return math.inf
    if math.isinf(g):
        return 0.0
    return 1.0 / g


def ext_neg_inv(g: float) -> float:
    """The coupling inversion map ``g -> -1/g`` on the extended reals."""
    return -ext_inv(g)


def ext_isclose(a: float, b: float, rtol: float = 1e-9, atol: float = 1e-12) -> bool:
    """Compare extended reals; the tangent pole is a single point, so any
    two infinities compare equal regardless of sign."""
    if math.isinf(a) or math.isinf(b):
        return math.isinf(a) and math.isinf(b)
    return math.isclose(a, b, rel_tol=rtol, abs_tol=atol)


def _max_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m)))


# --------------------------------------------------------------------------
# domain types

@dataclass(frozen=True, eq=False)
class BoundaryMatrix:
    """A unitary 2x2 matrix together with its length scale ``l0``."""

    entries: np.ndarray
    l0: float = 1.0

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex).reshape(2, 2)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "l0", float(self.l0))
        if not self.l0 > 0.0:
            raise NonpositiveScale(f"l0 must be positive, got {self.l0}")
        defect = unitarity_defect(m)
        if defect > STRUCTURAL_TOL:
            raise NotUnitary(f"U^dagger U deviates from I by {defect:.3e}")

    @property
    def matrix(self) -> np.ndarray:
        return self.entries

    def __eq__(self, other):
        if not isinstance(other, BoundaryMatrix):
            return NotImplemented
        return self.l0 == other.l0 and _max_norm(self.entries - other.entries) <= ANGLE_TOL

    __hash__ = None

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(f"{z:.6g}" for z in row) + "]" for row in self.entries)
        return f"BoundaryMatrix([{rows}], l0={self.l0:g})"


@dataclass(frozen=True)
class CharacteristicParams:
    """Standard parameters ``U = e^{i xi} [[a_R + i a_I, b_R + i b_I], [-b_R + i b_I, a_R - i a_I]]``."""

    xi: float
    alpha_r: float
    alpha_i: float
    beta_r: float
    beta_i: float

    def norm_defect(self) -> float:
        s = self.alpha_r ** 2 + self.alpha_i ** 2 + self.beta_r ** 2 + self.beta_i ** 2
        return abs(s - 1.0)


@dataclass(frozen=True, eq=False)
class TorusPoint:
    """A point ``(theta_plus, theta_minus)`` of the parity invariant torus."""

    theta_plus: float
    theta_minus: float

    def __post_init__(self):
        object.__setattr__(self, "theta_plus", reduce_angle(self.theta_plus))
        object.__setattr__(self, "theta_minus", reduce_angle(self.theta_minus))

    def __eq__(self, other):
        if not isinstance(other, TorusPoint):
            return NotImplemented
        return angles_close(self.theta_plus, other.theta_plus) and angles_close(
            self.theta_minus, other.theta_minus
        )

    __hash__ = None

    def swapped(self) -> "TorusPoint":
        return TorusPoint(self.theta_minus, self.theta_plus)

    def __iter__(self):
        yield self.theta_plus
        yield self.theta_minus


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Boundary values ``Phi = (phi(0+), phi(0-))`` and ``Phi' = (phi'(0+), -phi'(0-))``."""

    phi: np.ndarray
    phi_prime: np.ndarray

    def __post_init__(self):
        for name in ("phi", "phi_prime"):
            v = np.array(getattr(self, name), dtype=complex).reshape(2)
            v.flags.writeable = False
            object.__setattr__(self, name, v)

    @classmethod
    def from_one_sided(cls, value_right, value_left, deriv_right, deriv_left) -> "BoundaryData":
        """Build from the limits ``phi(0+), phi(0-), phi'(0+), phi'(0-)``."""
        return cls(np.array([value_right, value_left]), np.array([deriv_right, -deriv_left]))


@dataclass(frozen=True)
class CouplingPair:
    """Sector coupling strengths; poles are ``math.inf``."""

    g_plus: float
    g_minus: float

    def isclose(self, other: "CouplingPair", rtol: float = 1e-9, atol: float = 1e-12) -> bool:
        return ext_isclose(self.g_plus, other.g_plus, rtol, atol) and ext_isclose(
            self.g_minus, other.g_minus, rtol, atol
        )


@dataclass(frozen=True)
class SMatrix:
    """One-point scattering amplitudes at momentum ``k``."""

    k: float
    r_left: complex
    t_left: complex
    r_right: complex
    t_right: complex

    def matrix(self) -> np.ndarray:
        """Map from incoming (left, right) amplitudes to outgoing (left, right)."""
        return np.array([[self.r_left, self.t_right], [self.t_left, self.r_right]], dtype=complex)

    def unitarity_defect(self) -> float:
        return unitarity_defect(self.matrix())


class InteractionClass(enum.Enum):
    FREE = "Free"
    FREE_POINT_DUAL = "FreePointDual"
    SELF_DUAL = "SelfDual"
    DELTA_LINE = "DeltaLine"
    EPSILON_LINE = "EpsilonLine"
    GENERIC = "Generic"


class Transform(enum.Enum):
    PARITY = "Parity"
    HALF_REFLECTION = "HalfReflection"
    Q = "Q"


class Sector(enum.Enum):
    PLUS = "Plus"
    MINUS = "Minus"


_TRANSFORM_PAULI = {
    Transform.PARITY: SIGMA_1,
    Transform.HALF_REFLECTION: SIGMA_3,
    Transform.Q: SIGMA_2,
}


# --------------------------------------------------------------------------
# operations

def unitarity_defect(m: np.ndarray) -> float:
    """Max-entry norm of ``M^dagger M - I``."""
    m = np.asarray(m, dtype=complex)
    return _max_norm(m.conj().T @ m - np.eye(m.shape[0]))


def u_from_params(p: CharacteristicParams, l0: float = 1.0) -> BoundaryMatrix:
    if p.norm_defect() > STRUCTURAL_TOL:
        raise ConstraintViolated(
            f"alpha_r^2 + alpha_i^2 + beta_r^2 + beta_i^2 deviates from 1 by {p.norm_defect():.3e}"
        )
    if not l0 > 0.0:
        raise NonpositiveScale(f"l0 must be positive, got {l0}")
    a = complex(p.alpha_r, p.alpha_i)
    b = complex(p.beta_r, p.beta_i)
    m = np.exp(1j * p.xi) * np.array([[a, b], [-b.conjugate(), a.conjugate()]])
    return BoundaryMatrix(m, l0)


def params_from_u(u: BoundaryMatrix) -> CharacteristicParams:
    """Inverse of :func:`u_from_params` with ``xi`` chosen in [0, pi)."""
    m = u.matrix
    xi = math.fmod(0.5 * np.angle(np.linalg.det(m)), math.pi)
    if xi < 0.0:
        xi += math.pi
    if xi >= math.pi:
        xi = 0.0
    su = np.exp(-1j * xi) * m
    a, b = su[0, 0], su[0, 1]
    return CharacteristicParams(xi, a.real, a.imag, b.real, b.imag)


def u_from_torus(t: TorusPoint, l0: float = 1.0) -> BoundaryMatrix:
    """``U = e^{i theta_+} P_+ + e^{i theta_-} P_-``, which is parity invariant."""
    if not l0 > 0.0:
        raise NonpositiveScale(f"l0 must be positive, got {l0}")
    m = np.exp(1j * t.theta_plus) * P_PLUS + np.exp(1j * t.theta_minus) * P_MINUS
    return BoundaryMatrix(m, l0)


def is_parity_invariant(u: BoundaryMatrix, tol: float = STRUCTURAL_TOL) -> bool:
    m = u.matrix
    return _max_norm(SIGMA_1 @ m @ SIGMA_1 - m) <= tol


def torus_from_u(u: BoundaryMatrix) -> TorusPoint:
    """Eigenphases of ``U`` on the fixed even and odd vectors.

    This inverts :func:`u_from_torus` without the branch choice an
    arctangent formula would need.
    """
    if not is_parity_invariant(u):
        raise NotParityInvariant("sigma_1 U sigma_1 != U")
    m = u.matrix
    lam_plus = EVEN_VECTOR.conj() @ m @ EVEN_VECTOR
    lam_minus = ODD_VECTOR.conj() @ m @ ODD_VECTOR
    return TorusPoint(float(np.angle(lam_plus)), float(np.angle(lam_minus)))


def transform(u: BoundaryMatrix, which: Transform) -> BoundaryMatrix:
    """Conjugate ``U`` by the Pauli matrix representing ``which`` on (Phi, Phi')."""
    s = _TRANSFORM_PAULI[Transform(which)]
    return BoundaryMatrix(s @ u.matrix @ s, u.l0)


def _tan_half(theta: float) -> float:
    if angles_close(theta, math.pi):
        return math.inf
    if angles_close(theta, 0.0):
        return 0.0
    return math.tan(0.5 * reduce_angle(theta))


def _cot_half(theta: float) -> float:
    if angles_close(theta, 0.0):
        return math.inf
    if angles_close(theta, math.pi):
        return 0.0
    h = 0.5 * reduce_angle(theta)
    return math.cos(h) / math.sin(h)


def coupling_strengths(t: TorusPoint) -> CouplingPair:
    """``g_+ = tan(theta_+/2)`` and ``g_- = cot(theta_-/2)``; g = 0 means the sector is free."""
    return CouplingPair(_tan_half(t.theta_plus), _cot_half(t.theta_minus))


def inversion(t: TorusPoint, sector: Sector) -> TorusPoint:
    """Half-cycle shift of one torus angle, acting on that coupling as ``g -> -1/g``."""
    if Sector(sector) is Sector.PLUS:
        return TorusPoint(t.theta_plus + math.pi, t.theta_minus)
    return TorusPoint(t.theta_plus, t.theta_minus + math.pi)


def classify(t: TorusPoint, tol: float = ANGLE_TOL) -> InteractionClass:
    tp, tm = t.theta_plus, t.theta_minus
    if angles_close(tp, 0.0, tol) and angles_close(tm, math.pi, tol):
        return InteractionClass.FREE
    if angles_close(tp, math.pi, tol) and angles_close(tm, 0.0, tol):
        return InteractionClass.FREE_POINT_DUAL
    if angles_close(tp, tm, tol):
        return InteractionClass.SELF_DUAL
    if angles_close(tm, math.pi, tol):
        return InteractionClass.DELTA_LINE
    if angles_close(tp, 0.0, tol):
        return InteractionClass.EPSILON_LINE
    return InteractionClass.GENERIC


def boundary_residual(u: BoundaryMatrix, d: BoundaryData) -> np.ndarray:
    """``(U - I) Phi + i L0 (U + I) Phi'``; zero exactly when ``d`` obeys the condition."""
    m = u.matrix
    return (m - SIGMA_0) @ d.phi + 1j * u.l0 * ((m + SIGMA_0) @ d.phi_prime)


def current_mismatch(d: BoundaryData) -> float:
    """``|Phi'^dagger Phi - Phi^dagger Phi'|``, the jump of the probability current (up to a constant)."""
    return float(abs(np.vdot(d.phi_prime, d.phi) - np.vdot(d.phi, d.phi_prime)))


def s_matrix(u: BoundaryMatrix, k: float, cond_limit: float = 1e12) -> SMatrix:
    """Reflection and transmission amplitudes of the contact interaction at momentum ``k``.

    With incoming amplitudes ``a = (a_+, a_-)`` (from the right, from the
    left) and outgoing ``b``, the boundary values are ``Phi = a + b`` and
    ``Phi' = ik (b - a)``, so the condition becomes

        [(1 - k L0) U - (1 + k L0)] b = -[(1 + k L0) U - (1 - k L0)] a.

    The left-hand matrix is singular only for ``k = 0``.
    """
    if not k > 0.0:
        raise NonpositiveMomentum(f"k must be positive, got {k}")
    m = u.matrix
    a = k * u.l0
    lhs = (1.0 - a) * m - (1.0 + a) * SIGMA_0
    rhs = -((1.0 + a) * m - (1.0 - a) * SIGMA_0)
    if np.linalg.cond(lhs) > cond_limit:
        raise SingularSystem(f"scattering system is singular at k={k}")
    s = np.linalg.solve(lhs, rhs)
    # columns: incoming from the right (index 0), from the left (index 1)
    return SMatrix(
        k=float(k),
        r_left=complex(s[1, 1]),
        t_left=complex(s[0, 1]),
        r_right=complex(s[0, 0]),
        t_right=complex(s[1, 0]),
    )
