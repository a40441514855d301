"""Command-line front end.

Every report carries the resolved configuration and the library version,
so a JSON report fed back through ``--config`` reproduces itself exactly.

Output formats
--------------
json
    One object ``{"version", "config", "result"}``.  Floats are written in
    Python's shortest round-trip form; NaN becomes ``null`` and an infinite
    clone number is the string ``"inf"``.
csv
    ``# version: ...`` and ``# config: {...}`` comment lines, a header row,
    then data rows.  Floats use 17 significant digits.

Exit status: 0 on success, 2 on invalid input, 3 on an internal consistency
failure (including an oracle mismatch in ``verify``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__, asymptotic, frio, neumark, oracle, parametric
from .core import INFINITY, CloningProblem
from .errors import BracketError, ConsistencyError, DomainError

OUTPUT_DIR_ENV = "FFRCLONE_OUTPUT_DIR"
COMMANDS = ("solve", "curve", "frio", "asymptotic", "phase-scan", "simulate", "verify")
INFINITE_OK = ("frio", "asymptotic", "phase-scan")
VERIFY_TOL = 1e-6
VERIFY_CASES = {"default": 500, "quick": 50}

CURVE_COLUMNS = ("Q", "phi", "zeta_min", "fidelity", "q1", "q2", "s_prime", "regime")
FRIO_COLUMNS = ("Q", "p_tilde_s", "regime", "fidelity_ffr")
VERIFY_COLUMNS = ("s", "delta", "n", "Q", "zeta_param", "zeta_oracle", "abs_diff")

EXIT_OK, EXIT_DOMAIN, EXIT_CONSISTENCY = 0, 2, 3

_DEFAULT_N = {"asymptotic": INFINITY, "phase-scan": 4}


def parse_n(value) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("inf", "infinity"):
        return INFINITY
    try:
        x = float(text)
    except ValueError:
        raise DomainError(f"number of clones must be an integer or 'inf', got {value!r}") from None
    return int(x) if x.is_integer() else x


def _n_to_json(n):
    return "inf" if math.isinf(n) else n


@dataclass
class RunConfig:
    command: str
    s: float | None = None
    eta1: float | None = None
    delta: float | None = None
    m: int = 1
    n: float | None = None
    q: float | None = None
    points: int = 200
    step: float = 1e-3
    shots: int = 100_000
    seed: int | None = None
    shards: int = 1
    grid: str = "default"
    format: str = "json"
    output: str | None = None

    def resolved(self) -> "RunConfig":
        """Validate and fill command-dependent defaults."""
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        needs_problem = self.command != "verify"
        if needs_problem and self.s is None:
            raise DomainError("--s is required")
        if needs_problem and (self.eta1 is None) == (self.delta is None):
            raise DomainError("give exactly one of eta1 and delta")
        if self.eta1 is not None and self.delta is not None:
            raise DomainError("eta1 and delta are mutually exclusive")
        if self.format not in ("json", "csv"):
            raise DomainError(f"format must be json or csv, got {self.format!r}")
        n = _DEFAULT_N.get(self.command, 2) if self.n is None else parse_n(self.n)
        if math.isinf(n) and self.command not in INFINITE_OK:
            raise DomainError(f"n = inf is not available for {self.command!r}")
        if self.command == "asymptotic" and not math.isinf(n):
            raise DomainError("asymptotic works at n = inf only")
        seed = self.seed
        if self.command == "simulate" and seed is None:
            raise DomainError("simulate needs an explicit --seed")
        if self.command == "verify":
            if self.grid not in VERIFY_CASES:
                raise DomainError(f"grid must be one of {sorted(VERIFY_CASES)}, got {self.grid!r}")
            seed = 0 if seed is None else seed
        if self.command in ("solve", "simulate") and self.q is None:
            raise DomainError(f"{self.command} needs --q")
        if self.points < 2:
            raise DomainError("need at least two points")
        if self.shots < 1 or self.shards < 1:
            raise DomainError("shots and shards must be positive")
        return RunConfig(**{**asdict(self), "n": n, "seed": seed})

    def problem(self) -> CloningProblem | None:
        if self.s is None:
            return None
        n = parse_n(self.n) if self.n is not None else 2
        if self.delta is not None:
            return CloningProblem.from_delta(self.s, self.delta, n=n, m=self.m)
        return CloningProblem(s=self.s, eta1=self.eta1, n=n, m=self.m)

    def to_json(self) -> dict:
        d = asdict(self)
        if d["n"] is not None:
            d["n"] = _n_to_json(d["n"])
        return d

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        if "command" not in data:
            raise DomainError("config needs a 'command'")
        return cls(**data)


# -- serialization ------------------------------------------------------------


def _clean(x):
    """Make a value JSON-safe: numpy scalars to Python, NaN to None."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
    return x


def _fmt(x) -> str:
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def render_json(config: RunConfig, result: dict) -> str:
    doc = {"version": __version__, "config": config.to_json(), "result": result}
    return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"


def render_csv(config: RunConfig, columns, rows, extra: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"# version: {__version__}\n")
    buf.write(f"# config: {json.dumps(_clean(config.to_json()), sort_keys=True)}\n")
    for key, val in (extra or {}).items():
        buf.write(f"# {key}: {_fmt(val)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def _point_row(problem: CloningProblem, pt: parametric.SolutionPoint) -> dict:
    q1, q2 = problem.to_caller_labels(pt.q1_star, pt.q2_star)
    return {
        "Q": pt.Q, "phi": pt.phi, "zeta_min": pt.zeta_min, "fidelity": pt.fidelity,
        "q1": q1, "q2": q2, "s_prime": pt.s_prime, "regime": pt.regime,
    }


def _solve(cfg: RunConfig, problem: CloningProblem):
    row = _point_row(problem, parametric.solve_at_Q(problem, cfg.q))
    return row, CURVE_COLUMNS, [row], None


def _curve(cfg: RunConfig, problem: CloningProblem):
    curve = parametric.tradeoff_curve(problem, cfg.points)
    rows = [_point_row(problem, pt) for pt in curve.points]
    summary = {"q_pc": curve.q_pc, "q_ud": curve.q_ud}
    return {**summary, "points": rows}, CURVE_COLUMNS, rows, summary


def _frio_row(problem: CloningProblem, Q: float) -> dict:
    fq = frio.frio_success(problem, Q)
    if problem.is_infinite:
        f_ffr = asymptotic.asymptotic_fidelity(problem, fq.Q)
    else:
        f_ffr = parametric.solve_at_Q(problem, fq.Q).fidelity
    return {"Q": fq.Q, "p_tilde_s": fq.p_tilde_s, "regime": fq.regime.value, "fidelity_ffr": f_ffr}


def _frio(cfg: RunConfig, problem: CloningProblem):
    top = frio.q_ud(problem)
    qs = [cfg.q] if cfg.q is not None else np.linspace(0.0, top, cfg.points).tolist()
    rows = [_frio_row(problem, q) for q in qs]
    summary = {
        "q0": frio.q_zero(problem), "q1_bound": frio.q_one(problem),
        "q_th": frio.q_threshold(problem), "q_ud": top,
        "unbalanced": frio.is_unbalanced(problem),
    }
    return {**summary, "rows": rows}, FRIO_COLUMNS, rows, summary


def _asymptotic(cfg: RunConfig, problem: CloningProblem):
    top = frio.q_ud(problem)
    qs = [cfg.q] if cfg.q is not None else np.linspace(0.0, top, cfg.points).tolist()
    rows = asymptotic.asymptotic_profile(problem, qs, cfg.step)
    summary = {"q_th": frio.q_threshold(problem), "q_ud": top}
    return {**summary, "rows": rows}, asymptotic.PROFILE_COLUMNS, rows, summary


def _gap_dict(g: asymptotic.GapEstimate | None):
    if g is None:
        return None
    return {"gap": g.gap, "gap_half_step": g.gap_half_step, "noise": g.noise, "is_kink": g.is_kink}


def _phase_scan(cfg: RunConfig, problem: CloningProblem):
    finite_n = None if math.isinf(cfg.n) else cfg.n
    rep = asymptotic.phase_transition_scan(problem, cfg.step, finite_n=finite_n, profile_points=cfg.points)
    summary = {
        "q_th": rep.q_th, "q_ud": rep.q_ud, "interior": rep.interior, "step": rep.step,
        "transition_detected": rep.transition_detected,
        "finite_transition_detected": rep.finite_transition_detected,
    }
    result = {
        **summary,
        "infinite": _gap_dict(rep.infinite),
        "finite_n": None if rep.finite_n is None else _n_to_json(rep.finite_n),
        "finite": _gap_dict(rep.finite),
        "profile": rep.profile,
    }
    return result, asymptotic.PROFILE_COLUMNS, rep.profile, summary


def _simulate(cfg: RunConfig, problem: CloningProblem):
    pt = parametric.solve_at_Q(problem, cfg.q)
    real = neumark.build_realization(problem, pt)
    mc = neumark.monte_carlo(real, problem, cfg.shots, cfg.seed, cfg.shards).as_dict()
    q1, q2 = problem.to_caller_labels(mc["q1_hat"], mc["q2_hat"])
    se1, se2 = problem.to_caller_labels(mc["q1_hat_se"], mc["q2_hat_se"])
    mc.update(q1_hat=q1, q2_hat=q2, q1_hat_se=se1, q2_hat_se=se2)
    row = {
        **mc,
        "Q": pt.Q,
        "fidelity": pt.fidelity,
        "z_Q": (mc["observed_Q"] - pt.Q) / mc["observed_Q_se"] if mc["observed_Q_se"] > 0 else 0.0,
        "z_F": (mc["observed_F"] - pt.fidelity) / mc["observed_F_se"] if mc["observed_F_se"] > 0 else 0.0,
        "gram_error": real.gram_error(),
        "theta": real.theta, "theta_prime": real.theta_prime, "omega": real.omega,
    }
    result = {**row, "isometry": real.isometry.tolist()}
    return result, tuple(row), [row], None


def verify_cases(n_cases: int, seed: int) -> list[tuple[float, float, int, float]]:
    """Random (s, delta, n, Q) with Q strictly inside (0, Q_PC)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    cases = []
    while len(cases) < n_cases:
        s = float(rng.uniform(0.1, 0.95))
        d = float(rng.uniform(0.0, 0.9))
        n = int(rng.choice([2, 3, 5, 10]))
        q_pc = parametric.perfect_cloning_threshold(CloningProblem.from_delta(s, d, n))
        if q_pc <= 0.0:
            continue
        cases.append((s, d, n, float(rng.uniform(0.0, q_pc))))
    return cases


def _verify(cfg: RunConfig, problem: CloningProblem):
    rows = []
    for s, d, n, Q in verify_cases(VERIFY_CASES[cfg.grid], cfg.seed):
        p = CloningProblem.from_delta(s, d, n, cfg.m)
        zp = parametric.solve_at_Q(p, Q).zeta_min
        zo = oracle.brute_force_zeta_min(p, Q).zeta_min
        rows.append({"s": s, "delta": d, "n": n, "Q": Q, "zeta_param": zp, "zeta_oracle": zo,
                     "abs_diff": abs(zp - zo)})
    worst = max(r["abs_diff"] for r in rows)
    summary = {"cases": len(rows), "max_abs_diff": worst, "tolerance": VERIFY_TOL, "passed": worst <= VERIFY_TOL}
    return {**summary, "rows": rows}, VERIFY_COLUMNS, rows, summary


_DISPATCH = {
    "solve": _solve, "curve": _curve, "frio": _frio, "asymptotic": _asymptotic,
    "phase-scan": _phase_scan, "simulate": _simulate, "verify": _verify,
}


@dataclass
class RunOutcome:
    status: int
    report: str | None = None
    message: str | None = None


def run(config: RunConfig) -> RunOutcome:
    """Execute one command; the report is None when the command could not run."""
    try:
        cfg = config.resolved()
        problem = cfg.problem()
        result, columns, rows, summary = _DISPATCH[cfg.command](cfg, problem)
    except DomainError as exc:
        return RunOutcome(EXIT_DOMAIN, message=f"error: {exc}")
    except (ConsistencyError, BracketError) as exc:
        return RunOutcome(EXIT_CONSISTENCY, message=f"consistency failure: {exc}")
    if cfg.format == "json":
        text = render_json(cfg, result)
    else:
        text = render_csv(cfg, columns, rows, summary)
    if cfg.command == "verify" and not result["passed"]:
        msg = f"verify: max |zeta difference| {result['max_abs_diff']:.3e} exceeds {VERIFY_TOL:g}"
        return RunOutcome(EXIT_CONSISTENCY, text, msg)
    return RunOutcome(EXIT_OK, text)


# -- argument parsing ---------------------------------------------------------


def _add_problem_args(sp: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    sp.add_argument("--s", type=float, default=S, help="overlap of the two input states, 0 <= s < 1")
    prior = sp.add_mutually_exclusive_group()
    prior.add_argument("--eta1", type=float, default=S, help="prior of the first state")
    prior.add_argument("--delta", type=float, default=S, help="prior gap eta2 - eta1")
    sp.add_argument("--m", type=int, default=S, help="input copies (default 1)")
    sp.add_argument("--n", type=str, default=S, help="clones, integer or 'inf'")
    sp.add_argument("--format", choices=("json", "csv"), default=S)
    sp.add_argument("--output", type=str, default=S,
                    help=f"output file; relative paths resolve against ${OUTPUT_DIR_ENV} when set")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    ap = argparse.ArgumentParser(prog="ffrclone", description="Optimal cloning at a fixed failure rate.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", type=str, default=None,
                    help="JSON file with a 'config' block (e.g. a previous report); flags override it")
    sub = ap.add_subparsers(dest="command")

    sp = sub.add_parser("solve", help="optimal cloner at one failure rate")
    _add_problem_args(sp)
    sp.add_argument("--q", type=float, default=S)

    sp = sub.add_parser("curve", help="tradeoff curve F(Q) on [0, Q_UD]")
    _add_problem_args(sp)
    sp.add_argument("--points", type=int, default=S)

    sp = sub.add_parser("frio", help="FRIO success probability and FFR fidelity")
    _add_problem_args(sp)
    sp.add_argument("--q", type=float, default=S)
    sp.add_argument("--points", type=int, default=S)

    sp = sub.add_parser("asymptotic", help="n = inf fidelity profile")
    _add_problem_args(sp)
    sp.add_argument("--q", type=float, default=S)
    sp.add_argument("--points", type=int, default=S)
    sp.add_argument("--step", type=float, default=S)

    sp = sub.add_parser("phase-scan", help="second-derivative gap at Q_th")
    _add_problem_args(sp)
    sp.add_argument("--points", type=int, default=S)
    sp.add_argument("--step", type=float, default=S)

    sp = sub.add_parser("simulate", help="Monte Carlo run of the explicit realization")
    _add_problem_args(sp)
    sp.add_argument("--q", type=float, default=S)
    sp.add_argument("--shots", type=int, default=S)
    sp.add_argument("--seed", type=int, default=S)
    sp.add_argument("--shards", type=int, default=S)

    sp = sub.add_parser("verify", help="parametric solution against the brute-force oracle")
    _add_problem_args(sp)
    sp.add_argument("--grid", choices=tuple(VERIFY_CASES), default=S)
    sp.add_argument("--seed", type=int, default=S)
    return ap


def _load_config_block(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainError("config file must hold a JSON object")
    block = data.get("config", data)
    if not isinstance(block, dict):
        raise DomainError("'config' must be a JSON object")
    return dict(block)


def config_from_args(argv=None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    path = args.pop("config")
    data = _load_config_block(path) if path else {}
    command = args.pop("command")
    if command is not None:
        if data.get("command", command) != command:
            # switching command: drop settings that belong to the old one
            data = {k: v for k, v in data.items() if k in ("s", "eta1", "delta", "m", "format")}
        data["command"] = command
    if "eta1" in args:
        data.pop("delta", None)
    if "delta" in args:
        data.pop("eta1", None)
    data.update(args)
    if "command" not in data:
        raise DomainError("no command given")
    return RunConfig.from_json(data)


def _destination(cfg_output: str | None, command: str, fmt: str) -> Path | None:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if cfg_output is None:
        return Path(base) / f"{command}.{fmt}" if base else None
    out = Path(cfg_output)
    if base and not out.is_absolute():
        out = Path(base) / out
    return out


def main(argv=None) -> int:
    try:
        config = config_from_args(argv)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out = run(config)
    if out.report is not None:
        dest = _destination(config.output, config.command, config.format)
        if dest is None:
            sys.stdout.write(out.report)
        else:
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_text(out.report, encoding="utf-8")
    if out.message:
        print(out.message, file=sys.stderr)
    return out.status

if __name__ == "__main__":
    sys.exit(main())
