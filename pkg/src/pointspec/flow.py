"""Spectral flow along paths on the parity invariant torus.

Levels are continued between neighbouring path samples by nearest-energy
matching inside each parity sector. Distances are taken on the signed
momentum scale ``sign(E) sqrt|E|`` (monotone in E) from a linear prediction
off the previous two samples, which keeps a level escaping to E = -inf
matched on moderately sampled paths. Within one sector levels never cross
(each root of the sector equation moves monotonically with its angle), so
the matching is unambiguous once the path is sampled finely enough; a
non-injective match raises :class:`AmbiguousContinuation`.

Traversing a closed cycle returns the boundary condition, and hence the
spectrum, to itself, yet each continued level may end on a different level.
The net change of a level's position within its sector is the anholonomy
shift.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boundary import (
    ANGLE_TOL,
    TWO_PI,
    TorusPoint,
    Transform,
    angle_distance,
    coupling_strengths,
    transform,
    u_from_torus,
)
from .errors import AmbiguousContinuation, NotClosed
from .spectrum import (
    Branch,
    BoxSpec,
    Level,
    Parity,
    merge_levels,
    sector_levels,
    spectrum,
)

#: kappa L beyond which a level counts as escaped to E = -inf
DIVERGENCE_CAP = 30.0
DEFAULT_SAMPLES = 512


class PathKind(enum.Enum):
    LINE = "Line"
    FIG3_LINE = "Fig3Line"
    FIG4_CYCLE = "Fig4Cycle"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class FlowPath:
    """A sampled path on the torus.

    ``FIG3_LINE`` runs ``(t, pi - t)`` for ``t in [0, pi]``, from the free point
    to its dual through the self-dual point. ``FIG4_CYCLE`` runs
    ``(t, t + pi)`` for ``t in [0, 2 pi windings]``, passing through the free
    point; ``samples`` counts points per winding including both ends. ``LINE``
    interpolates its raw endpoint angles, so an endpoint offset by 2 pi gives
    a closed cycle. ``CUSTOM`` uses ``points`` as given.
    """

    kind: PathKind
    samples: int = DEFAULT_SAMPLES
    start: tuple = (0.0, math.pi)
    end: tuple = (math.pi, 0.0)
    points: tuple = ()
    windings: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", PathKind(self.kind))
        if self.kind is PathKind.CUSTOM:
            if len(self.points) < 2:
                raise ValueError("a custom path needs at least two points")
        elif self.samples < 2:
            raise ValueError("samples must be >= 2")
        if self.windings < 1:
            raise ValueError("windings must be >= 1")
        object.__setattr__(self, "start", tuple(float(a) for a in self.start))
        object.__setattr__(self, "end", tuple(float(a) for a in self.end))

    @classmethod
    def line(cls, start, end, samples: int = DEFAULT_SAMPLES) -> "FlowPath":
        return cls(PathKind.LINE, samples, start=tuple(start), end=tuple(end))

    @classmethod
    def fig3(cls, samples: int = DEFAULT_SAMPLES) -> "FlowPath":
        return cls(PathKind.FIG3_LINE, samples)

    @classmethod
    def fig4(cls, samples: int = DEFAULT_SAMPLES, windings: int = 1) -> "FlowPath":
        return cls(PathKind.FIG4_CYCLE, samples, windings=windings)

    @classmethod
    def custom(cls, points: Sequence) -> "FlowPath":
        pts = tuple(p if isinstance(p, TorusPoint) else TorusPoint(*p) for p in points)
        return cls(PathKind.CUSTOM, len(pts), points=pts)

    @property
    def closed(self) -> bool:
        if self.kind is PathKind.FIG4_CYCLE:
            return True
        if self.kind is PathKind.FIG3_LINE:
            return False
        pts = sample_path(self)
        return pts[0] == pts[-1]


def path_parameters(p: FlowPath) -> np.ndarray:
    """The parameter ``t`` at each sample of ``p``."""
    if p.kind is PathKind.FIG3_LINE:
        return np.linspace(0.0, math.pi, p.samples)
    if p.kind is PathKind.FIG4_CYCLE:
        return np.linspace(0.0, TWO_PI * p.windings, p.windings * (p.samples - 1) + 1)
    if p.kind is PathKind.LINE:
        return np.linspace(0.0, 1.0, p.samples)
    return np.arange(len(p.points), dtype=float)


def sample_path(p: FlowPath) -> list:
    ts = path_parameters(p)
    if p.kind is PathKind.FIG3_LINE:
        return [TorusPoint(t, math.pi - t) for t in ts]
    if p.kind is PathKind.FIG4_CYCLE:
        # the half-cycle shift is always taken as +pi
        return [TorusPoint(t, t + math.pi) for t in ts]
    if p.kind is PathKind.LINE:
        (a0, a1), (b0, b1) = p.start, p.end
        return [TorusPoint(a0 + t * (b0 - a0), a1 + t * (b1 - a1)) for t in ts]
    return list(p.points)


def concatenate(*paths: FlowPath) -> FlowPath:
    """Join paths end to start into one custom path."""
    pts = []
    for path in paths:
        seg = sample_path(path)
        if pts:
            if not pts[-1] == seg[0]:
                raise ValueError("paths do not join end to start")
            seg = seg[1:]
        pts.extend(seg)
    return FlowPath.custom(pts)


@dataclass(frozen=True)
class FlowSample:
    t: float
    theta_plus: float
    theta_minus: float
    energy: float
    k_or_kappa: float
    branch: Branch


@dataclass
class Trajectory:
    parity: Parity
    #: global index of the level in the starting spectrum
    initial_index: int
    #: position of the level within its sector at the start
    initial_ordinal: int
    samples: list = field(default_factory=list)
    final_ordinal: Optional[int] = None
    diverged_at: Optional[float] = None

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.samples])

    @property
    def params(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])


@dataclass
class FlowResult:
    path: FlowPath
    params: np.ndarray
    points: list
    trajectories: list
    shift_even: Optional[int] = None
    shift_odd: Optional[int] = None
    #: (parity, initial index, t) for every level that escaped to E = -inf
    diverged: list = field(default_factory=list)
    initial_energies: np.ndarray = None
    final_energies: np.ndarray = None


def _thread_count() -> int:
    raw = os.environ.get("POINTSPEC_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 0:
        raise ValueError("POINTSPEC_THREADS must be >= 0")
    if n == 0:
        return os.cpu_count() or 1
    return n


def _parallel_map(fn, items):
    workers = _thread_count()
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _touches_pole(a: float, b: float) -> bool:
    """Whether the short arc from angle ``a`` to ``b`` reaches theta = pi (tan(theta/2) pole)."""
    d = math.remainder(b - a, TWO_PI)
    if d >= 0.0:
        gap = math.fmod(math.pi - a + 2 * TWO_PI, TWO_PI)
        return 0.0 < gap <= d + ANGLE_TOL
    gap = math.fmod(a - math.pi + 2 * TWO_PI, TWO_PI)
    return 0.0 < gap <= -d + ANGLE_TOL


def _signed_momentum(energy: float) -> float:
    # order preserving and far less singular than E as a level escapes to -inf
    return math.copysign(math.sqrt(abs(energy)), energy)


def _predict(tr: Trajectory, L: float) -> float:
    """Linear extrapolation from the last two samples.

    A deeply bound level has kappa ~ 1/(pi - theta) near the pole, so once
    kappa L > 1 on both samples 1/kappa is extrapolated instead of kappa.
    """
    last = tr.samples[-1]
    q1 = _signed_momentum(last.energy)
    if len(tr.samples) < 2:
        return q1
    prev = tr.samples[-2]
    if (last.branch is Branch.NEGATIVE and prev.branch is Branch.NEGATIVE
            and min(last.k_or_kappa, prev.k_or_kappa) * L > 1.0):
        r = 2.0 / last.k_or_kappa - 1.0 / prev.k_or_kappa
        return -1.0 / r if r > 0.0 else -math.inf
    return 2.0 * q1 - _signed_momentum(prev.energy)


def _match(prev: Sequence[float], cand: Sequence[float], where: float) -> list:
    """Nearest candidate for each predicted value.

    ``prev`` must be ascending. Levels of one sector never cross, so the
    picks have to be injective and preserve that order.
    """
    if not len(cand):
        raise AmbiguousContinuation(f"no candidate levels at t={where:.6g}")
    cand = np.asarray(cand)
    picks = [int(np.argmin(np.abs(cand - e))) for e in prev]
    if len(set(picks)) != len(picks):
        raise AmbiguousContinuation(
            f"nearest-energy matching is not injective at t={where:.6g}; refine the samples"
        )
    if any(b <= a for a, b in zip(picks, picks[1:])):
        raise AmbiguousContinuation(
            f"nearest-energy matching reorders levels at t={where:.6g}; refine the samples"
        )
    return picks


def track(p: FlowPath, box: BoxSpec, l0: float = 1.0, num_levels: int = 10,
          cap: float = DIVERGENCE_CAP) -> FlowResult:
    """Continue the lowest ``num_levels`` levels of the first sample along ``p``."""
    pts = sample_path(p)
    ts = path_parameters(p)
    L = box.half_width

    start = merge_levels(
        [sector_levels(pts[0].theta_plus, box, l0, num_levels, Parity.EVEN),
         sector_levels(pts[0].theta_minus, box, l0, num_levels, Parity.ODD)],
        num_levels,
    )
    trajectories = []
    for parity in (Parity.EVEN, Parity.ODD):
        mine = [lv for lv in start if lv.parity is parity]
        for ordinal, lv in enumerate(mine):
            trajectories.append(Trajectory(parity, lv.index, ordinal))

    # enough candidates per sector that rising levels never leave the window
    variation = [
        sum(angle_distance(getattr(a, f), getattr(b, f)) for a, b in zip(pts, pts[1:]))
        for f in ("theta_plus", "theta_minus")
    ]
    counts = {
        Parity.EVEN: sum(1 for lv in start if lv.parity is Parity.EVEN) + 3 + math.ceil(variation[0] / TWO_PI),
        Parity.ODD: sum(1 for lv in start if lv.parity is Parity.ODD) + 3 + math.ceil(variation[1] / TWO_PI),
    }

    def solve(pt: TorusPoint):
        return {
            Parity.EVEN: sector_levels(pt.theta_plus, box, l0, counts[Parity.EVEN], Parity.EVEN),
            Parity.ODD: sector_levels(pt.theta_minus, box, l0, counts[Parity.ODD], Parity.ODD),
        }

    sampled = _parallel_map(solve, pts)

    def record(traj: Trajectory, i: int, lv: Level):
        traj.samples.append(FlowSample(float(ts[i]), pts[i].theta_plus, pts[i].theta_minus,
                                       lv.energy, lv.k_or_kappa, lv.branch))

    diverged = []
    for parity in (Parity.EVEN, Parity.ODD):
        alive = [tr for tr in trajectories if tr.parity is parity]
        levels0 = sampled[0][parity]
        for tr in alive:
            record(tr, 0, levels0[tr.initial_ordinal])
        last = {id(tr): tr.initial_ordinal for tr in alive}
        for i in range(1, len(pts)):
            if not alive:
                break
            cands = sampled[i][parity]
            field_name = "theta_plus" if parity is Parity.EVEN else "theta_minus"
            if _touches_pole(getattr(pts[i - 1], field_name), getattr(pts[i], field_name)):
                # kappa passes through infinity: the bound level leaves for good
                kept = []
                for tr in alive:
                    if tr.samples[-1].branch is Branch.NEGATIVE:
                        tr.diverged_at = float(ts[i])
                        diverged.append((parity, tr.initial_index, float(ts[i])))
                    else:
                        kept.append(tr)
                alive = kept
                if not alive:
                    break
            picks = _match([_predict(tr, L) for tr in alive],
                           [_signed_momentum(lv.energy) for lv in cands], ts[i])
            survivors = []
            for tr, j in zip(alive, picks):
                lv = cands[j]
                if lv.branch is Branch.NEGATIVE and lv.kappa * L > cap:
                    tr.diverged_at = float(ts[i])
                    diverged.append((parity, tr.initial_index, float(ts[i])))
                    continue
                record(tr, i, lv)
                last[id(tr)] = j
                survivors.append(tr)
            alive = survivors
        for tr in alive:
            tr.final_ordinal = last[id(tr)]

    result = FlowResult(p, ts, pts, trajectories, diverged=diverged)
    result.initial_energies = np.sort([lv.energy for g in sampled[0].values() for lv in g])
    result.final_energies = np.sort([lv.energy for g in sampled[-1].values() for lv in g])
    if p.closed:
        result.shift_even = _sector_shift(trajectories, Parity.EVEN)
        result.shift_odd = _sector_shift(trajectories, Parity.ODD)
    return result


def _sector_shift(trajectories, parity: Parity) -> Optional[int]:
    shifts = {tr.final_ordinal - tr.initial_ordinal
              for tr in trajectories if tr.parity is parity and tr.final_ordinal is not None}
    if not shifts:
        return None
    if len(shifts) > 1:
        raise AmbiguousContinuation(f"{parity.name} levels shift by different amounts: {sorted(shifts)}")
    return shifts.pop()


def anholonomy_shift(r: FlowResult) -> tuple:
    """``(shift_even, shift_odd)``: change of each continued level's position in its sector."""
    if not r.path.closed:
        raise NotClosed("anholonomy shifts need a closed path")
    return r.shift_even, r.shift_odd


# --------------------------------------------------------------------------
# duality checks

@dataclass
class DualityReport:
    point: TorusPoint
    max_multiset_dev: float
    labels_exchanged: bool
    tol: float
    energies: list
    dual_energies: list

    @property
    def passed(self) -> bool:
        return self.max_multiset_dev <= self.tol and self.labels_exchanged

    def as_dict(self) -> dict:
        return {
            "check": "half_reflection_duality",
            "theta_plus": self.point.theta_plus,
            "theta_minus": self.point.theta_minus,
            "max_multiset_dev": self.max_multiset_dev,
            "labels_exchanged": self.labels_exchanged,
            "tol": self.tol,
            "passed": self.passed,
        }


_SWAP = {Parity.EVEN: Parity.ODD, Parity.ODD: Parity.EVEN, Parity.UNLABELED: Parity.UNLABELED}


def _clusters(levels, tol=1e-9):
    groups, cur = [], [levels[0]]
    for lv in levels[1:]:
        if abs(lv.energy - cur[-1].energy) <= tol * max(1.0, abs(lv.energy)):
            cur.append(lv)
        else:
            groups.append(cur)
            cur = [lv]
    groups.append(cur)
    return groups


def verify_duality(t: TorusPoint, box: BoxSpec, l0: float = 1.0, num_levels: int = 10,
                   tol: float = 1e-9) -> DualityReport:
    """Compare the spectrum at ``t`` with that of its half-reflection image.

    The image is built as ``sigma_3 U sigma_3`` and solved through its own
    eigenphases, so the check covers the induced swap of torus angles too.
    """
    u = u_from_torus(t, l0)
    # one spare level so a degenerate pair is never split by truncation
    a = spectrum(u, box, num_levels + 1)
    b = spectrum(transform(u, Transform.HALF_REFLECTION), box, num_levels + 1)
    ea, eb = a.energies()[:num_levels], b.energies()[:num_levels]
    dev = float(np.max(np.abs(ea - eb)))
    exchanged = True
    # compare label multisets cluster by cluster; the spare level is trimmed afterwards
    ga, gb = _clusters(list(a)), _clusters(list(b))
    for ca, cb in zip(ga, gb):
        if ca[0].index >= num_levels:
            break
        if sorted(_SWAP[lv.parity].value for lv in ca) != sorted(lv.parity.value for lv in cb):
            exchanged = False
    return DualityReport(t, dev, exchanged, tol, ea.tolist(), eb.tolist())


@dataclass
class DeltaEpsilonReport:
    g: float
    delta_point: TorusPoint
    epsilon_point: TorusPoint
    delta_coupling: float
    epsilon_coupling: float
    #: energies of the first n even levels of the delta point
    delta_even: list
    #: energies of the first n odd levels of the epsilon point
    epsilon_odd: list
    max_dev: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_dev <= self.tol

    def as_dict(self) -> dict:
        return {
            "check": "delta_epsilon_duality",
            "g": self.g,
            "delta_g_plus": self.delta_coupling,
            "epsilon_g_minus": self.epsilon_coupling,
            "max_dev": self.max_dev,
            "tol": self.tol,
            "passed": self.passed,
        }


def delta_epsilon_duality(g: float, box: BoxSpec, l0: float = 1.0, n: int = 10,
                          tol: float = 1e-9) -> DeltaEpsilonReport:
    """Even levels of the delta point with strength ``g`` against odd levels of the
    epsilon point whose odd coupling is ``1/g``."""
    if g == 0.0 or not math.isfinite(g):
        raise ValueError("g must be finite and nonzero")
    angle = 2.0 * math.atan(g)
    delta = TorusPoint(angle, math.pi)
    eps = TorusPoint(0.0, angle)
    # each sector gets at least n levels among the lowest 2n + 2
    sd = spectrum(u_from_torus(delta, l0), box, 2 * n + 2)
    se = spectrum(u_from_torus(eps, l0), box, 2 * n + 2)
    ed = np.array([lv.energy for lv in sd.sector(Parity.EVEN)][:n])
    eo = np.array([lv.energy for lv in se.sector(Parity.ODD)][:n])
    dev = float(np.max(np.abs(ed - eo))) if len(ed) == len(eo) == n else math.inf
    return DeltaEpsilonReport(
        g, delta, eps,
        coupling_strengths(delta).g_plus,
        coupling_strengths(eps).g_minus,
        ed.tolist(), eo.tolist(), dev, tol,
    )
