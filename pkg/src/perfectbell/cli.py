"""Command-line front end.

    perfectbell classify --state builtin:phi_plus
    perfectbell maximize --state builtin:psi_minus --sign minus
    perfectbell lhv --outcomes=-1,0,1 --sign minus
    perfectbell sweep --family bell-mixture:N=11 --format csv --out sweep.csv

Exit codes: 0 success, 2 input error, 3 unsupported dimension,
4 no perfect direction for the requested sign.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .bell import (
    CHSH_DERIVED_BOUND,
    CLASSICAL_BOUND,
    QUANTUM_BOUND,
    BellEvaluation,
    MaximizationResult,
    eval_W,
    grid_search_max,
    maximize_over_c,
    maximize_W,
    optimal_a,
)
from .correlations import PERFECT_TOL, classify_perfect_directions, correlation_matrix
from .errors import (
    BadParameter,
    NoFeasibleR,
    NoPerfectDirection,
    NotSymmetricState,
    NotUnit,
    PerfectBellError,
    PreconditionViolated,
    UnsupportedDimension,
)
from .lhv import max_bell_lhv
from .observables import parse_direction
from .states import (
    DensityOperator,
    WernerParams,
    builtin_state,
    load_state,
    make_bell_state,
    make_werner,
    mixture,
    random_perfect_two_qubit,
    random_perfect_two_qutrit,
    validate_state,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIMENSION = 3
EXIT_NO_PERFECT = 4

AGREEMENT_TOL = 5e-3
SANITY_TOL = 1e-9

SWEEP_COLUMNS = [
    "state_id",
    "parameter",
    "sign",
    "case",
    "value_analytic",
    "value_grid",
    "resolution",
    "agreement_delta",
    "in_range",
    "status",
]


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    state: str | None = None
    sign: int | None = None
    tol: float = PERFECT_TOL
    resolution: int = 64
    fmt: str = "text"
    out: str | None = None
    seed: int = 0
    family: str | None = None
    outcomes: tuple[float, ...] = (-1.0, 1.0)
    r: np.ndarray | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise CliError(f"--tol must be positive, got {self.tol}", EXIT_INPUT)
        if self.resolution < 8:
            raise CliError(f"--resolution must be >= 8, got {self.resolution}", EXIT_INPUT)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _signs(config: RunConfig) -> list[int]:
    return [config.sign] if config.sign is not None else [1, -1]


def resolve_state(source: str | None) -> DensityOperator:
    if not source:
        raise CliError("--state is required", EXIT_INPUT)
    try:
        if source.startswith("builtin:"):
            rho = builtin_state(source[len("builtin:") :])
        else:
            rho = load_state(source)
    except FileNotFoundError as exc:
        raise CliError(f"state file not found: {source}", EXIT_INPUT) from exc
    except UnsupportedDimension as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    except (PerfectBellError, ValueError) as exc:
        raise CliError(f"invalid state {source!r}: {exc}", EXIT_INPUT) from exc
    report = validate_state(rho)
    failed = [c for c in report.checks if not c.passed]
    if failed:
        detail = ", ".join(f"{c.name} (residual {c.residual:.3e})" for c in failed)
        raise CliError(f"state {source!r} failed validation: {detail}", EXIT_INPUT)
    if rho.local_dim not in (2, 3):
        raise CliError(f"local dimension {rho.local_dim} is not supported (need 2 or 3)", EXIT_DIMENSION)
    return rho


def _correlations(rho: DensityOperator):
    try:
        return correlation_matrix(rho)
    except NotSymmetricState as exc:
        raise CliError(f"state is not swap-symmetric: {exc}", EXIT_INPUT) from exc
    except UnsupportedDimension as exc:
        raise CliError(str(exc), EXIT_DIMENSION) from exc


def cmd_classify(config: RunConfig) -> dict:
    rho = resolve_state(config.state)
    t = _correlations(rho)
    classes = [classify_perfect_directions(t, s, config.tol) for s in _signs(config)]
    return {
        "command": "classify",
        "inputs": {"state": config.state, "tol": config.tol},
        "local_dim": rho.local_dim,
        "matrix_kind": t.kind,
        "correlation_matrix": t.entries.tolist(),
        "eigenvalues": t.eigenvalues.tolist(),
        "eigenvectors": t.eigenvectors.T.tolist(),
        "classification": [
            dict(c.to_json(), description=c.describe(), status="ok" if c.case else "NoPerfectDirection")
            for c in classes
        ],
        "timestamp": _now(),
    }


def _fixed_r(t, r: np.ndarray, sign: int, config: RunConfig) -> MaximizationResult:
    # r given on the command line: optimize a and c only
    cls = classify_perfect_directions(t, sign, config.tol)
    try:
        c, _ = maximize_over_c(t, r, sign, config.tol)
    except PreconditionViolated as exc:
        raise CliError(f"--r is not a perfect direction for sign {sign:+d}: {exc}", EXIT_NO_PERFECT) from exc
    a, degenerate = optimal_a(t, r, c)
    best = BellEvaluation(sign, a, r, c, eval_W(t, a, r, c, sign), degenerate)
    return MaximizationResult(best, "analytic-fixed-r", cls, perfect_residual=abs(t.form(r, r) - sign))


def _maximize_one(t, sign: int, config: RunConfig) -> dict:
    grid = None
    if config.r is not None:
        analytic = _fixed_r(t, config.r, sign, config)
    else:
        analytic = maximize_W(t, sign, config.tol)
        try:
            grid = grid_search_max(t, sign, config.resolution)
        except NoFeasibleR:
            pass
    out = {
        "sign": sign,
        "classification": analytic.classification.to_json(),
        "analytic": analytic.to_json(),
        "grid": grid.to_json() if grid else None,
    }
    if grid is not None:
        delta = abs(analytic.value - grid.value)
        out["agreement_delta"] = delta
        out["agree"] = delta <= AGREEMENT_TOL
    out["bounds"] = {
        "classical": CLASSICAL_BOUND,
        "quantum": QUANTUM_BOUND,
        "chsh_derived": CHSH_DERIVED_BOUND,
        "within_quantum": analytic.value <= QUANTUM_BOUND + SANITY_TOL,
        "within_chsh_derived": analytic.value <= CHSH_DERIVED_BOUND + SANITY_TOL,
        "violates_classical": analytic.value > CLASSICAL_BOUND + SANITY_TOL,
    }
    return out


def cmd_maximize(config: RunConfig) -> dict:
    rho = resolve_state(config.state)
    t = _correlations(rho)
    results = []
    for sign in _signs(config):
        try:
            results.append(_maximize_one(t, sign, config))
        except (NoPerfectDirection, CliError) as exc:
            if isinstance(exc, CliError) and exc.code != EXIT_NO_PERFECT:
                raise
            if config.sign is not None:
                raise CliError(str(exc), EXIT_NO_PERFECT) from exc
            results.append({"sign": sign, "status": "NoPerfectDirection"})
    if all(r.get("status") == "NoPerfectDirection" for r in results):
        raise CliError("no perfect direction for either sign", EXIT_NO_PERFECT)
    return {
        "command": "maximize",
        "inputs": {
            "state": config.state,
            "tol": config.tol,
            "resolution": config.resolution,
            "r": None if config.r is None else config.r.tolist(),
        },
        "local_dim": rho.local_dim,
        "correlation_matrix": t.entries.tolist(),
        "results": results,
        "timestamp": _now(),
    }


def cmd_lhv(config: RunConfig) -> dict:
    rows = []
    for sign in _signs(config):
        for constrained in (True, False):
            value, witness = max_bell_lhv(config.outcomes, sign, constrained)
            rows.append(
                {
                    "sign": sign,
                    "constrained": constrained,
                    "value": value,
                    "witness": witness.to_json(sign),
                    "within_classical": value <= CLASSICAL_BOUND + SANITY_TOL,
                }
            )
    return {
        "command": "lhv",
        "inputs": {"outcomes": list(config.outcomes)},
        "results": rows,
        "timestamp": _now(),
    }


def _parse_family(spec: str | None) -> tuple[str, dict[str, str]]:
    if not spec:
        raise CliError("--family is required for sweep", EXIT_INPUT)
    name, _, args = spec.partition(":")
    kw = {}
    for part in filter(None, args.split(",")):
        if "=" not in part:
            raise CliError(f"bad family parameter {part!r} in {spec!r}", EXIT_INPUT)
        k, v = part.split("=", 1)
        kw[k.strip()] = v.strip()
    return name, kw


def family_members(spec: str, config: RunConfig) -> list[tuple[str, float | int, DensityOperator]]:
    """Expand a family spec into (state_id, parameter, state) triples."""
    name, kw = _parse_family(spec)
    try:
        if name == "bell-mixture":
            n = int(kw.get("N", 11))
            if n < 2:
                raise CliError("bell-mixture needs N >= 2", EXIT_INPUT)
            members = []
            phi_p, phi_m = make_bell_state("phi_plus"), make_bell_state("phi_minus")
            for i, p in enumerate(np.linspace(0.0, 1.0, n)):
                members.append((f"bell-mixture-{i}", float(p), mixture([p, 1 - p], [phi_p, phi_m])))
            return members
        if name == "werner":
            n = int(kw.get("N", 21))
            d = int(kw.get("d", 2))
            if n < 2:
                raise CliError("werner needs N >= 2", EXIT_INPUT)
            return [
                (f"werner-d{d}-{i}", float(phi), make_werner(WernerParams(d, float(phi))))
                for i, phi in enumerate(np.linspace(-1.0, 1.0, n))
            ]
        if name == "random-perfect":
            m = int(kw.get("M", 100))
            seed = int(kw.get("seed", config.seed))
            d = int(kw.get("d", 2))
            gen = {2: random_perfect_two_qubit, 3: random_perfect_two_qutrit}.get(d)
            if gen is None:
                raise CliError(f"random-perfect supports d in (2, 3), got {d}", EXIT_DIMENSION)
            members = []
            for i in range(m):
                sign = config.sign if config.sign is not None else (1 if i % 2 == 0 else -1)
                members.append((f"random-d{d}-{seed + i}", seed + i, gen(seed + i, sign)))
            return members
    except (ValueError, PerfectBellError) as exc:
        if isinstance(exc, CliError):
            raise
        raise CliError(f"bad family spec {spec!r}: {exc}", EXIT_INPUT) from exc
    raise CliError(f"unknown family {name!r}", EXIT_INPUT)


def cmd_sweep(config: RunConfig) -> dict:
    rows = []
    for state_id, param, rho in family_members(config.family, config):
        t = _correlations(rho)
        for sign in _signs(config):
            row = dict.fromkeys(SWEEP_COLUMNS, "")
            row.update(state_id=state_id, parameter=param, sign=sign, resolution=config.resolution)
            cls = classify_perfect_directions(t, sign, config.tol)
            row["case"] = cls.case
            if cls.case == 0:
                row["status"] = "NoPerfectDirection"
                rows.append(row)
                continue
            analytic = maximize_W(t, sign, config.tol).value
            row["value_analytic"] = analytic
            try:
                grid = grid_search_max(t, sign, config.resolution).value
                row["value_grid"] = grid
                row["agreement_delta"] = abs(analytic - grid)
            except NoFeasibleR:
                row["value_grid"] = ""
            row["in_range"] = CLASSICAL_BOUND - SANITY_TOL <= analytic <= QUANTUM_BOUND + SANITY_TOL
            row["status"] = "ok"
            rows.append(row)
    return {
        "command": "sweep",
        "inputs": {"family": config.family, "tol": config.tol, "resolution": config.resolution},
        "columns": SWEEP_COLUMNS,
        "rows": rows,
        "timestamp": _now(),
    }


# -- rendering ---------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, (float, np.floating)):
        return f"{x:.6f}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return str(x)


def _matrix_text(m) -> list[str]:
    return ["  " + "  ".join(f"{v: .6f}" for v in row) for row in m]


def render_text(report: dict) -> str:
    cmd = report["command"]
    lines: list[str] = []
    if cmd == "classify":
        lines.append(f"state: {report['inputs']['state']}  ({report['matrix_kind']})")
        lines += _matrix_text(report["correlation_matrix"])
        lines.append(f"eigenvalues: {_fmt(report['eigenvalues'])}")
        for c in report["classification"]:
            lines.append(f"sign {c['sign']:+d}: case {c['case']}  {c['description']}")
    elif cmd == "maximize":
        lines.append(f"state: {report['inputs']['state']}")
        lines += _matrix_text(report["correlation_matrix"])
        for r in report["results"]:
            if r.get("status") == "NoPerfectDirection":
                lines.append(f"sign {r['sign']:+d}: no perfect direction")
                continue
            a = r["analytic"]
            lines.append(f"sign {r['sign']:+d}: case {r['classification']['case']}  analytic W = {_fmt(a['value'])}")
            b = a["best"]
            lines.append(f"  a = {_fmt(b['a'])}  r = {_fmt(b['r'])}  c = {_fmt(b['c'])}")
            if r["grid"] is not None:
                flag = "" if r["agree"] else "  DISAGREE"
                lines.append(
                    f"  grid W = {_fmt(r['grid']['value'])} (resolution {r['grid']['grid_resolution']}, "
                    f"delta {_fmt(r['agreement_delta'])}){flag}"
                )
            bnd = r["bounds"]
            lines.append(
                f"  bounds: classical {_fmt(bnd['classical'])}, quantum {_fmt(bnd['quantum'])}, "
                f"CHSH-derived {_fmt(bnd['chsh_derived'])}"
            )
    elif cmd == "lhv":
        lines.append(f"outcomes: {_fmt(report['inputs']['outcomes'])}")
        for r in report["results"]:
            kind = "constrained  " if r["constrained"] else "unconstrained"
            w = r["witness"]
            lines.append(
                f"sign {r['sign']:+d} {kind} max = {_fmt(r['value'])}  witness "
                f"(f_a1, f_a2, f_b1, f_b2) = ({_fmt(w['f_a1'])}, {_fmt(w['f_a2'])}, {_fmt(w['f_b1'])}, {_fmt(w['f_b2'])})"
            )
    elif cmd == "sweep":
        cols = report["columns"]
        lines.append("  ".join(cols))
        for row in report["rows"]:
            lines.append("  ".join(_fmt(row[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _csv_rows(report: dict) -> tuple[list[str], list[dict]]:
    cmd = report["command"]
    if cmd == "sweep":
        return report["columns"], report["rows"]
    if cmd == "classify":
        cols = ["sign", "case", "lambda_1", "lambda_2", "lambda_3", "directions"]
        rows = []
        for c in report["classification"]:
            ev = c["eigenvalues"]
            rows.append(
                {"sign": c["sign"], "case": c["case"], "lambda_1": ev[0], "lambda_2": ev[1], "lambda_3": ev[2], "directions": c["description"]}
            )
        return cols, rows
    if cmd == "maximize":
        cols = ["state_id", "sign", "case", "value_analytic", "value_grid", "resolution", "agreement_delta"]
        rows = []
        for r in report["results"]:
            if r.get("status") == "NoPerfectDirection":
                rows.append({"state_id": report["inputs"]["state"], "sign": r["sign"], "case": 0})
                continue
            rows.append(
                {
                    "state_id": report["inputs"]["state"],
                    "sign": r["sign"],
                    "case": r["classification"]["case"],
                    "value_analytic": r["analytic"]["value"],
                    "value_grid": r["grid"]["value"] if r["grid"] else "",
                    "resolution": report["inputs"]["resolution"],
                    "agreement_delta": r.get("agreement_delta", ""),
                }
            )
        return cols, rows
    cols = ["sign", "constrained", "value", "f_a1", "f_a2", "f_b1", "f_b2"]
    rows = [
        {"sign": r["sign"], "constrained": r["constrained"], "value": r["value"], **{k: r["witness"][k] for k in ("f_a1", "f_a2", "f_b1", "f_b2")}}
        for r in report["results"]
    ]
    return cols, rows


def render_csv(report: dict) -> str:
    cols, rows = _csv_rows(report)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()})
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, default=_json_default) + "\n"
    if fmt == "csv":
        return render_csv(report)
    return render_text(report)


# -- argument parsing ----------------------------------------------------------


def _sign_arg(text: str) -> int:
    t = text.strip().lower()
    if t in ("plus", "+", "+1", "1"):
        return 1
    if t in ("minus", "-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be plus or minus, got {text!r}")


def _direction_arg(text: str) -> np.ndarray:
    try:
        return parse_direction(text)
    except (ValueError, PerfectBellError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _outcomes_arg(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad outcome list {text!r}") from exc
    if not vals or any(abs(v) > 1 for v in vals):
        raise argparse.ArgumentTypeError("outcomes must be a nonempty list of values in [-1, 1]")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sign", type=_sign_arg, default=None, help="plus or minus (default: both)")
    common.add_argument("--tol", type=float, default=PERFECT_TOL, help="unit-eigenvalue tolerance")
    common.add_argument("--resolution", type=int, default=64, help="grid resolution n (n^2 sphere points)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="perfectbell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="correlation matrix and perfect directions")
    p.add_argument("--state", required=True, help="path to state JSON or builtin:NAME[:k=v,...]")
    p = sub.add_parser("maximize", parents=[common], help="analytic and grid maximum of the Bell LHS")
    p.add_argument("--state", required=True)
    p.add_argument("--r", type=_direction_arg, default=None, help='fix the perfect direction, e.g. "0,0,1"')
    p = sub.add_parser("lhv", parents=[common], help="deterministic LHV maxima")
    p.add_argument("--outcomes", type=_outcomes_arg, default=(-1.0, 1.0), help="comma-separated outcome values")
    p = sub.add_parser("sweep", parents=[common], help="maximize over a family of states")
    p.add_argument(
        "--family",
        required=True,
        help="bell-mixture:N=11 | werner:d=2,N=21 | random-perfect:M=100,seed=7[,d=2]",
    )
    return parser


COMMANDS = {"classify": cmd_classify, "maximize": cmd_maximize, "lhv": cmd_lhv, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        config = RunConfig(
            command=args.command,
            state=getattr(args, "state", None),
            sign=args.sign,
            tol=args.tol,
            resolution=args.resolution,
            fmt=args.fmt,
            out=args.out,
            seed=args.seed,
            family=getattr(args, "family", None),
            outcomes=getattr(args, "outcomes", (-1.0, 1.0)),
            r=getattr(args, "r", None),
        )
        report = COMMANDS[args.command](config)
    except CliError as exc:
        print(f"perfectbell: error: {exc}", file=sys.stderr)
        return exc.code
    except (BadParameter, NotUnit) as exc:
        print(f"perfectbell: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = render(report, config.fmt)
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
