"""Command line interface: ``pointspec <command> [options]``.

Exit status is 0 on success, 2 when a verification check fails and 1 on
usage errors.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .boundary import (
    BoundaryMatrix,
    CharacteristicParams,
    TorusPoint,
    s_matrix,
    u_from_params,
    u_from_torus,
)
from .errors import ConstraintViolated, NonpositiveScale, NotUnitary, PointSpecError
from .flow import FlowPath, delta_epsilon_duality, track, verify_duality
from .oracle import CONVERGENCE_GRIDS, convergence_report
from .serialize import (
    FLOW_COLUMNS,
    REPORT_COLUMNS,
    SCATTER_COLUMNS,
    SPECTRUM_COLUMNS,
    write_csv,
    write_json,
)
from .spectrum import BoxSpec, spectrum

COMMANDS = ("spectrum", "flow", "cycle", "duality", "scatter", "oracle")

ORACLE_ORDER = (2.0, 0.3)
ORACLE_EXTRAPOLATED_TOL = 1e-7

_ANGLE_RE = re.compile(
    r"^(?P<sign>[+-]?)(?P<num>\d+(?:\.\d*)?|\.\d+)?\*?pi(?:/(?P<den>\d+(?:\.\d*)?))?$"
)


class UsageError(Exception):
    pass


def parse_angle(text: str) -> float:
    """Parse radians given as a decimal or as a multiple of pi (``pi/2``, ``3pi/2``, ``-pi/4``)."""
    s = text.strip().replace(" ", "")
    m = _ANGLE_RE.match(s)
    if m:
        num = float(m.group("num")) if m.group("num") else 1.0
        den = float(m.group("den")) if m.group("den") else 1.0
        if den == 0.0:
            raise argparse.ArgumentTypeError(f"bad angle {text!r}")
        value = num * math.pi / den
        return -value if m.group("sign") == "-" else value
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


@dataclass
class RunConfig:
    command: str
    torus: Optional[TorusPoint] = None
    params: Optional[CharacteristicParams] = None
    L: float = 1.0
    L0: float = 1.0
    levels: int = 10
    samples: int = 512
    format: str = "csv"
    output: Optional[str] = None
    windings: int = 1
    tol: float = 1e-9
    g: Optional[float] = None
    k_min: float = 0.1
    k_max: float = 10.0
    k_count: int = 100

    def boundary(self) -> BoundaryMatrix:
        if self.params is not None:
            return u_from_params(self.params, self.L0)
        return u_from_torus(self.torus, self.L0)

    def describe(self) -> dict:
        out = {"L": self.L, "L0": self.L0}
        if self.torus is not None:
            out["theta_plus"] = self.torus.theta_plus
            out["theta_minus"] = self.torus.theta_minus
        if self.params is not None:
            p = self.params
            out.update(xi=p.xi, alpha_r=p.alpha_r, alpha_i=p.alpha_i, beta_r=p.beta_r, beta_i=p.beta_i)
        return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pointspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, boundary: bool, levels_default: int = 10):
        p.add_argument("--L", type=_positive_float, default=1.0, help="box half width")
        p.add_argument("--L0", type=_positive_float, default=1.0, help="boundary length scale")
        p.add_argument("--levels", type=_positive_int, default=levels_default)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-o", "--output", help="write here instead of standard output")
        if boundary:
            g = p.add_argument_group("boundary condition (torus angles or characteristic parameters)")
            g.add_argument("--theta-plus", type=parse_angle)
            g.add_argument("--theta-minus", type=parse_angle)
            for name in ("xi", "alpha-r", "alpha-i", "beta-r", "beta-i"):
                g.add_argument(f"--{name}", type=float)

    p = sub.add_parser("spectrum", help="box spectrum of one contact interaction")
    common(p, boundary=True)
    p = sub.add_parser("flow", help="momentum flow from the free point to its dual")
    common(p, boundary=False)
    p.add_argument("--samples", type=_positive_int, default=512)
    p = sub.add_parser("cycle", help="spectral flow along theta_- = theta_+ + pi and its shifts")
    common(p, boundary=False)
    p.add_argument("--samples", type=_positive_int, default=512)
    p.add_argument("--windings", type=_positive_int, default=1)
    p = sub.add_parser("duality", help="half-reflection (and optionally delta/epsilon) duality check")
    common(p, boundary=True)
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    p.add_argument("--g", type=float, help="also compare delta strength g with epsilon strength 1/g")
    p = sub.add_parser("scatter", help="reflection and transmission amplitudes over a k range")
    common(p, boundary=True)
    p.add_argument("--k-min", type=_positive_float, default=0.1)
    p.add_argument("--k-max", type=_positive_float, default=10.0)
    p.add_argument("--k-count", type=_positive_int, default=100)
    p = sub.add_parser("oracle", help="finite-difference convergence check of the spectrum")
    common(p, boundary=True, levels_default=5)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, L=ns.L, L0=ns.L0, levels=ns.levels,
                    format=ns.format, output=ns.output)
    for attr in ("samples", "windings", "tol", "g", "k_min", "k_max", "k_count"):
        if hasattr(ns, attr):
            setattr(cfg, attr, getattr(ns, attr))
    if hasattr(ns, "theta_plus"):
        angles = (ns.theta_plus, ns.theta_minus)
        chars = (ns.xi, ns.alpha_r, ns.alpha_i, ns.beta_r, ns.beta_i)
        have_angles = any(a is not None for a in angles)
        have_chars = any(c is not None for c in chars)
        if have_angles and have_chars:
            raise UsageError("give either torus angles or characteristic parameters, not both")
        if have_chars:
            if any(c is None for c in chars):
                raise UsageError("characteristic parameters need --xi --alpha-r --alpha-i --beta-r --beta-i")
            cfg.params = CharacteristicParams(*chars)
        else:
            if any(a is None for a in angles):
                raise UsageError("both --theta-plus and --theta-minus are required")
            cfg.torus = TorusPoint(*angles)
        if cfg.command == "duality" and cfg.torus is None:
            raise UsageError("duality needs torus angles")
    if cfg.command == "scatter" and cfg.k_min > cfg.k_max:
        raise UsageError("--k-min exceeds --k-max")
    return cfg


# --------------------------------------------------------------------------
# commands; each returns (text, exit status)

def _emit(cfg: RunConfig, columns, rows, comments, payload) -> str:
    if cfg.format == "json":
        return write_json(payload)
    return write_csv(columns, rows, comments)


def _level_row(lv) -> list:
    return [lv.index, lv.parity.value, lv.branch.value, lv.k_or_kappa, lv.energy]


def run_spectrum(cfg: RunConfig):
    spec = spectrum(cfg.boundary(), BoxSpec(cfg.L), cfg.levels)
    rows = [_level_row(lv) for lv in spec]
    payload = {
        "command": "spectrum",
        "params": cfg.describe(),
        "levels": [dict(zip(SPECTRUM_COLUMNS, r)) for r in rows],
    }
    return _emit(cfg, SPECTRUM_COLUMNS, rows, (), payload), 0


def _flow_rows(result) -> list:
    rows = []
    for tr in result.trajectories:
        for s in tr.samples:
            rows.append([s.t, s.theta_plus, s.theta_minus, tr.initial_index,
                         tr.parity.value, s.k_or_kappa, s.energy])
    rows.sort(key=lambda r: (r[0], r[3]))
    return rows


def _flow_payload(cfg, result, name):
    payload = {
        "command": name,
        "params": dict(cfg.describe(), samples=cfg.samples),
        "rows": [dict(zip(FLOW_COLUMNS, r)) for r in _flow_rows(result)],
        "diverged": [{"parity": p.value, "level": i, "t": t} for p, i, t in result.diverged],
    }
    return payload


def run_flow(cfg: RunConfig):
    result = track(FlowPath.fig3(cfg.samples), BoxSpec(cfg.L), cfg.L0, cfg.levels)
    comments = [f"diverged parity={p.value} level={i} t={t:.17g}" for p, i, t in result.diverged]
    return _emit(cfg, FLOW_COLUMNS, _flow_rows(result), comments,
                 _flow_payload(cfg, result, "flow")), 0


def run_cycle(cfg: RunConfig):
    result = track(FlowPath.fig4(cfg.samples, cfg.windings), BoxSpec(cfg.L), cfg.L0, cfg.levels)
    comments = [f"diverged parity={p.value} level={i} t={t:.17g}" for p, i, t in result.diverged]
    comments.append(f"shift_even={result.shift_even} shift_odd={result.shift_odd}")
    payload = _flow_payload(cfg, result, "cycle")
    payload["params"]["windings"] = cfg.windings
    payload["shift_even"] = result.shift_even
    payload["shift_odd"] = result.shift_odd
    return _emit(cfg, FLOW_COLUMNS, _flow_rows(result), comments, payload), 0


def run_duality(cfg: RunConfig):
    box = BoxSpec(cfg.L)
    reports = [verify_duality(cfg.torus, box, cfg.L0, cfg.levels, cfg.tol).as_dict()]
    if cfg.g is not None:
        reports.append(delta_epsilon_duality(cfg.g, box, cfg.L0, cfg.levels, cfg.tol).as_dict())
    passed = all(r["passed"] for r in reports)
    rows = []
    for r in reports:
        for key, value in r.items():
            if key != "check":
                rows.append([r["check"], key, value])
    comments = [f"passed={format(passed).lower()}"]
    payload = {"command": "duality", "params": dict(cfg.describe(), levels=cfg.levels),
               "checks": reports, "passed": passed}
    return _emit(cfg, REPORT_COLUMNS, rows, comments, payload), 0 if passed else 2


def run_scatter(cfg: RunConfig):
    u = cfg.boundary()
    rows = []
    for k in np.linspace(cfg.k_min, cfg.k_max, cfg.k_count):
        s = s_matrix(u, float(k))
        rows.append([float(k), s.r_left.real, s.r_left.imag, s.t_left.real, s.t_left.imag,
                     s.unitarity_defect()])
    payload = {"command": "scatter", "params": cfg.describe(),
               "rows": [dict(zip(SCATTER_COLUMNS, r)) for r in rows]}
    return _emit(cfg, SCATTER_COLUMNS, rows, (), payload), 0


def oracle_columns(grids=CONVERGENCE_GRIDS) -> tuple:
    return ("level", "exact_energy", *(f"fd_energy_n{n}" for n in grids),
            "order", "extrapolated_energy", "deviation")


def run_oracle(cfg: RunConfig):
    rep = convergence_report(cfg.boundary(), BoxSpec(cfg.L), cfg.levels)
    target, spread = ORACLE_ORDER
    max_dev = float(np.max(rep.extrapolated_deviation))
    passed = rep.order_ok(target, spread) and max_dev <= ORACLE_EXTRAPOLATED_TOL
    rows = []
    for q in range(cfg.levels):
        order = None if np.isnan(rep.orders[q]) else float(rep.orders[q])
        rows.append([q, rep.exact[q], *rep.fd[:, q], order, rep.extrapolated[q],
                     rep.extrapolated_deviation[q]])
    comments = [f"max_extrapolated_deviation={max_dev:.3e}", f"passed={format(passed).lower()}"]
    payload = {"command": "oracle", "params": dict(cfg.describe(), levels=cfg.levels),
               "report": rep.as_dict(), "passed": passed}
    return _emit(cfg, oracle_columns(rep.grids), rows, comments, payload), 0 if passed else 2


_RUNNERS = {
    "spectrum": run_spectrum,
    "flow": run_flow,
    "cycle": run_cycle,
    "duality": run_duality,
    "scatter": run_scatter,
    "oracle": run_oracle,
}


def failure_report(cfg: RunConfig, exc: PointSpecError) -> str:
    """Report for a run that stopped on a numerical failure."""
    message = f"{type(exc).__name__}: {exc}"
    payload = {"command": cfg.command, "params": cfg.describe(), "error": message, "passed": False}
    rows = [[cfg.command, "error", message.replace(",", ";").replace("\n", " ")]]
    return _emit(cfg, REPORT_COLUMNS, rows, ["passed=false"], payload)


def run(cfg: RunConfig):
    """Execute ``cfg``; returns the emitted text and the exit status."""
    return _RUNNERS[cfg.command](cfg)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pointspec: error: {exc}", file=sys.stderr)
        return 1
    try:
        text, status = run(cfg)
    except (ConstraintViolated, NonpositiveScale, NotUnitary) as exc:
        print(f"pointspec: error: {exc}", file=sys.stderr)
        return 1
    except PointSpecError as exc:
        print(f"pointspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        text, status = failure_report(cfg, exc), 2
    if cfg.output:
        with open(cfg.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
