"""Command-line entry point for sweeps, checks and result persistence.

Every command writes ``OUT/<command>.csv``, ``OUT/<command>-summary.json``
and ``OUT/manifest.json``. The manifest stores the resolved settings, so
``qloss replay OUT/manifest.json --out DIR`` reproduces the CSV and summary
byte for byte. Sweep rows run in a process pool; row ``i`` uses seed
``seed + i`` for its optimizer, and the input-state sample always uses
``seed``, so the worker count never changes results.

Exit codes: 0 success, 1 check failure, 2 usage or IO error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .channels import LossParams
from .optimize import DEFAULT_MAX_EVALS, RESTARTS_POVM, RESTARTS_SMALL
from .states import BellFamily

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
SEED_ENV = "QLOSS_SEED"
CAPACITY_TOL = 1e-4


class UsageError(Exception):
    pass


# --- settings ---------------------------------------------------------------------


def parse_grid(text: str) -> list[float]:
    """``START:STOP:STEP`` inclusive of STOP, rounded to 12 decimals."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"grid {text!r} is not START:STOP:STEP") from None
    if step <= 0 or stop < start:
        raise UsageError(f"grid {text!r} must have STEP > 0 and STOP >= START")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text: str) -> list[str]:
    return [v.strip() for v in str(text).split(",") if v.strip()]


# key -> converter for config-file strings
CONVERTERS: dict[str, Callable[[str], Any]] = {
    "family": lambda v: BellFamily.parse(v).value,
    "seed": int,
    "n_states": int,
    "grid": str,
    "schemes": str,
    "jobs": int,
    "out": str,
    "restarts": int,
    "budget": int,
    "t_a": float,
    "t_b": float,
    "t_f": float,
    "regime": str,
    "deltas": str,
}

# settings that do not affect results and are not stored in the summary
VOLATILE = {"jobs", "out", "config"}

DEFAULTS: dict[str, dict[str, Any]] = {
    "teleport-box": dict(family="psi-plus", n_states=300, t_a=0.05, t_b=0.05, schemes="baseline,gains,povm"),
    "teleport-sweep": dict(
        family="psi-plus", n_states=300, regime="symmetric", grid="0:1:0.05", schemes="baseline,gains,povm"
    ),
    "superdense-sweep": dict(
        family="psi-plus", regime="symmetric", t_f=0.5, grid="0:1:0.05", schemes="baseline,nla,povm"
    ),
    "capacity": dict(grid="0:1:0.05"),
    "lemma-check": dict(grid="0.1:0.9:0.1", deltas="0.1,0.01,0.001"),
    "oracle-check": dict(),
}
COMMON_DEFAULTS = dict(seed=0, jobs=None, restarts=None, budget=DEFAULT_MAX_EVALS)


def read_config(path: str) -> dict[str, Any]:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys map to underscores."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in CONVERTERS:
            raise UsageError(f"{path}:{n}: unknown key {k!r}")
        try:
            out[k] = CONVERTERS[k](v)
        except ValueError as exc:
            raise UsageError(f"{path}:{n}: {exc}") from None
    return out


def resolve(command: str, flags: dict[str, Any], config: dict[str, Any], env: dict[str, str]) -> dict[str, Any]:
    """Merge settings with precedence flags > config > environment (seed only) > defaults."""
    base = dict(COMMON_DEFAULTS)
    base.update(DEFAULTS[command])
    if env.get(SEED_ENV):
        try:
            base["seed"] = int(env[SEED_ENV])
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    for src in (config, flags):
        for k, v in src.items():
            if v is not None and k in CONVERTERS:
                base[k] = v
    if base.get("family") is not None:
        base["family"] = BellFamily.parse(base["family"]).value
    return base


# --- output -----------------------------------------------------------------------


def fmt(v: Any) -> str:
    """CSV cell: floats at 17 significant digits, sequences joined by ';'."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(fmt(x) for x in np.ravel(np.asarray(v, dtype=object)))
    return str(v)


def csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        v = float(v)
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    return v


def json_text(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


@dataclass
class RunManifest:
    command: str
    argv: list
    seed: int
    settings: dict
    grid: Optional[list]
    version: str
    started: str
    finished: str = ""
    outputs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(
            command=self.command,
            argv=self.argv,
            seed=self.seed,
            settings=self.settings,
            grid=self.grid,
            version=self.version,
            started=self.started,
            finished=self.finished,
            outputs=self.outputs,
        )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write(out: Path, name: str, text: str) -> str:
    (out / name).write_bytes(text.encode())
    return name


# --- row workers (top level so they pickle) -------------------------------------


def run_rows(fn: Callable, tasks: Sequence[tuple], jobs: Optional[int]) -> list:
    """Evaluate ``fn(*task)`` for each task in order, in a pool of ``jobs`` workers."""
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, *zip(*tasks)))


def _loss(regime: str, t: float, t_f: float = 1.0) -> LossParams:
    regime = regime.replace("_", "-").lower()
    if regime == "symmetric":
        return LossParams(t, t, t_f)
    if regime in ("alice-lossless", "alicelossless"):
        return LossParams(1.0, t, t_f)
    if regime in ("bob-lossless", "boblossless"):
        return LossParams(t, 1.0, t_f)
    raise UsageError(f"unknown regime {regime!r}")


def _teleport_scheme(family, loss, n_states, seed, opt_seed, scheme, restarts, budget):
    from .teleport import (
        Scheme,
        TeleportConfig,
        baseline_state,
        gains_state,
        optimize_gains_teleport,
        optimize_povm_teleport,
        povm_state,
        state_fidelities,
    )
    from .filters import povm_from_params

    cfg = TeleportConfig(family, loss, n_states, seed)
    scheme = Scheme(scheme)
    if scheme is Scheme.BASELINE:
        return state_fidelities(cfg, baseline_state(cfg)), 1.0, {}, True
    if scheme is Scheme.GAINS:
        rep = optimize_gains_teleport(cfg, restarts or RESTARTS_SMALL, max_evals=budget, opt_seed=opt_seed)
        shared = gains_state(cfg, rep.params["g_a"], rep.params["g_b"])
        return state_fidelities(cfg, shared), rep.p_succ, dict(rep.params), rep.converged
    rep = optimize_povm_teleport(cfg, restarts or RESTARTS_POVM, max_evals=budget, opt_seed=opt_seed)
    x = np.array(rep.x)
    shared = povm_state(cfg, povm_from_params(x[:8]), povm_from_params(x[8:]))
    return state_fidelities(cfg, shared), rep.p_succ, dict(rep.extra), rep.converged


def _teleport_sweep_row(i, t, s):
    loss = _loss(s["regime"], t)
    out = []
    for scheme in _names(s["schemes"]):
        f, p, params, conv = _teleport_scheme(
            s["family"], loss, s["n_states"], s["seed"], s["seed"] + i, scheme, s["restarts"], s["budget"]
        )
        out.append([t, scheme, float(f.mean()), params.get("g_a"), params.get("g_b"), p, conv])
    return out


def _teleport_box_row(i, scheme, s):
    loss = LossParams(s["t_a"], s["t_b"])
    f, p, params, conv = _teleport_scheme(
        s["family"], loss, s["n_states"], s["seed"], s["seed"] + i, scheme, s["restarts"], s["budget"]
    )
    return scheme, f, p, params, conv


def _superdense_row(i, t, s):
    from .superdense import SDOptions, quantum_advantage

    loss = _loss(s["regime"], t, s["t_f"])
    opts = SDOptions(restarts=s["restarts"], seed=s["seed"] + i, max_evals=s["budget"])
    out = []
    for scheme in _names(s["schemes"]):
        r = quantum_advantage(s["family"], loss, scheme, opts)
        m_a = r.params.get("m_a")
        out.append(
            [
                t,
                scheme,
                r.i_ab,
                r.capacity,
                r.q,
                r.q_pct,
                r.params.get("p"),
                r.params.get("p_k"),
                r.params.get("g_a"),
                None if m_a is None else np.ravel(m_a).tolist(),
                r.p_succ,
                r.converged,
            ]
        )
    return out


def _capacity_row(i, t_f, s):
    from .superdense import classical_capacity, classical_capacity_grid

    bits, eta, pc = classical_capacity(t_f, s["restarts"] or 8, s["seed"] + i)
    oracle, _, _ = classical_capacity_grid(t_f)
    return [t_f, bits, eta, pc, oracle, bits - oracle]


def _lemma2_row(i, t, s):
    from .locc import lemma1_fidelity_at, lemma2_bound

    r = lemma2_bound(t, restarts=s["restarts"] or 8, seed=s["seed"] + i, max_evals=s["budget"])
    l1 = lemma1_fidelity_at(LossParams(t, t), 1e-4)
    return dict(
        t=t,
        sup_fidelity=r.fidelity,
        p_succ=r.p_succ,
        grid_fidelity=r.grid_fidelity,
        converged=r.converged,
        lemma1_fidelity=l1.fidelity,
        lemma1_delta=l1.delta,
        lemma1_p_succ=l1.p_succ,
        strictly_below=bool(r.fidelity < l1.fidelity),
    )


# --- commands -----------------------------------------------------------------------


def _check_grid(grid: list[float]) -> list[float]:
    if any(v < 0 or v > 1 for v in grid):
        raise UsageError("grid values must lie in [0, 1]")
    return grid


def cmd_teleport_box(s: dict) -> tuple[str, dict, int, None]:
    schemes = _names(s["schemes"])
    results = run_rows(_teleport_box_row, [(i, sc, s) for i, sc in enumerate(schemes)], s["jobs"])
    rows, summary = [], {}
    for scheme, f, p, params, conv in results:
        rows += [[scheme, k, v] for k, v in enumerate(f)]
        q = np.quantile(f, [0.0, 0.25, 0.5, 0.75, 1.0])
        summary[scheme] = dict(
            min=q[0], q25=q[1], median=q[2], q75=q[3], max=q[4], mean=float(f.mean()), p_succ=p, params=params,
            converged=conv,
        )
    return csv_text(["scheme", "state_index", "fidelity"], rows), summary, EXIT_OK, None


def cmd_teleport_sweep(s: dict):
    grid = _check_grid(parse_grid(s["grid"]))
    chunks = run_rows(_teleport_sweep_row, [(i, t, s) for i, t in enumerate(grid)], s["jobs"])
    rows = [r for c in chunks for r in c]
    summary = {}
    for scheme in _names(s["schemes"]):
        sel = [r for r in rows if r[1] == scheme]
        summary[scheme] = dict(min_avg_fidelity=min(r[2] for r in sel), all_converged=all(r[6] for r in sel))
    header = ["T", "scheme", "avg_fidelity", "g_a", "g_b", "p_succ", "converged"]
    return csv_text(header, rows), summary, EXIT_OK, grid


def crossing(ts: Sequence[float], qs: Sequence[float], q_tol: float = 1e-6) -> Optional[float]:
    """First upward crossing of ``q > q_tol`` along a sorted grid, linearly interpolated."""
    prev = None
    for t, q in zip(ts, qs):
        if q - q_tol > 0:
            if prev is None:
                return float(t)
            t0, q0 = prev
            return float(t0 + (t - t0) * (q_tol - q0) / (q - q0))
        prev = (t, q)
    return None


def cmd_superdense_sweep(s: dict):
    grid = _check_grid(parse_grid(s["grid"]))
    chunks = run_rows(_superdense_row, [(i, t, s) for i, t in enumerate(grid)], s["jobs"])
    rows = [r for c in chunks for r in c]
    summary = {}
    for scheme in _names(s["schemes"]):
        sel = [r for r in rows if r[1] == scheme]
        summary[scheme] = dict(
            break_even=crossing([r[0] for r in sel], [r[4] for r in sel]),
            max_q_pct=max(r[5] for r in sel),
            all_converged=all(r[11] for r in sel),
        )
    header = ["T", "scheme", "i_ab", "capacity", "q", "q_pct", "p", "p_k", "g_a", "m_a", "p_succ", "converged"]
    return csv_text(header, rows), summary, EXIT_OK, grid


def cmd_capacity(s: dict):
    grid = _check_grid(parse_grid(s["grid"]))
    rows = run_rows(_capacity_row, [(i, t, s) for i, t in enumerate(grid)], s["jobs"])
    worst = max(abs(r[5]) for r in rows)
    summary = dict(max_abs_delta=worst, tolerance=CAPACITY_TOL, passed=bool(worst <= CAPACITY_TOL))
    header = ["t_f", "capacity_bits", "eta_opt", "pc_opt", "oracle_bits", "delta"]
    code = EXIT_OK if summary["passed"] else EXIT_CHECK
    return csv_text(header, rows), summary, code, grid


def cmd_lemma_check(s: dict):
    from .locc import lemma1_verify

    grid = parse_grid(s["grid"])
    if any(v <= 0 or v > 1 for v in grid):
        raise UsageError("lemma grid values must lie in (0, 1]")
    deltas = _floats(s["deltas"])
    if any(not 0 < d <= 0.2 for d in deltas):
        raise UsageError("deltas must lie in (0, 0.2]")
    rows, lemma1 = [], []
    for t in grid:
        summ = lemma1_verify(LossParams(t, t), deltas)
        for r in summ.reports:
            rows.append(["lemma1", t, r.delta, r.fidelity, r.p_succ, r.bound_satisfied])
        lemma1.append(
            dict(
                t=t,
                slope=summ.slope,
                slope_ok=summ.slope_ok,
                reports=[dict(delta=r.delta, fidelity=r.fidelity, p_succ=r.p_succ, bound_satisfied=r.bound_satisfied,
                              support_residual=r.support_residual) for r in summ.reports],
            )
        )
    lemma2 = run_rows(_lemma2_row, [(i, t, s) for i, t in enumerate(grid)], s["jobs"])
    for r in lemma2:
        rows.append(["lemma2", r["t"], r["lemma1_delta"], r["sup_fidelity"], r["p_succ"], r["strictly_below"]])
    passed = all(l["slope_ok"] and all(x["bound_satisfied"] for x in l["reports"]) for l in lemma1) and all(
        r["strictly_below"] for r in lemma2
    )
    summary = dict(lemma1=lemma1, lemma2=lemma2, passed=passed)
    header = ["lemma", "t", "delta", "fidelity", "p_succ", "pass"]
    return csv_text(header, rows), summary, EXIT_OK if passed else EXIT_CHECK, grid


def cmd_oracle_check(s: dict):
    from .oracles import ORACLE_TOL, run_checks

    try:
        results = run_checks(corrupt=s.get("corrupt"))
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    passed = all(r.passed for r in results)
    rows = [[r.name, r.deviation, r.gating, r.passed] for r in results]
    summary = dict(tolerance=ORACLE_TOL, passed=passed, checks=[r.to_dict() for r in results])
    return (
        csv_text(["check", "max_abs_deviation", "gating", "passed"], rows),
        summary,
        EXIT_OK if passed else EXIT_CHECK,
        None,
    )


COMMANDS = {
    "teleport-box": cmd_teleport_box,
    "teleport-sweep": cmd_teleport_sweep,
    "superdense-sweep": cmd_superdense_sweep,
    "capacity": cmd_capacity,
    "lemma-check": cmd_lemma_check,
    "oracle-check": cmd_oracle_check,
}


# --- argument parsing -----------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--family", type=lambda v: BellFamily.parse(v).value, help="psi-plus or phi-plus")
    g.add_argument("--seed", type=int, help=f"base seed (fallback: ${SEED_ENV}, then 0)")
    g.add_argument("--n-states", type=int, help="input states per average (default 300)")
    g.add_argument("--grid", help="START:STOP:STEP, inclusive")
    g.add_argument("--schemes", help="comma-separated scheme names")
    g.add_argument("--jobs", type=int, help="worker processes (default: logical cores)")
    g.add_argument("--out", help="output directory")
    g.add_argument("--restarts", type=int, help="optimizer restarts per search")
    g.add_argument("--budget", type=int, help="max objective evaluations per restart")
    g.add_argument("--config", help="flat key=value settings file")

    p = argparse.ArgumentParser(prog="qloss", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    tb = sub.add_parser("teleport-box", parents=[common], help="per-state fidelity distribution")
    tb.add_argument("--t-a", type=float)
    tb.add_argument("--t-b", type=float)

    for name, helptext in (("teleport-sweep", "average fidelity over a loss grid"),
                           ("superdense-sweep", "quantum advantage over a loss grid")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--regime", choices=["symmetric", "alice-lossless", "bob-lossless"])
        if name == "superdense-sweep":
            sp.add_argument("--t-f", type=float, help="forward transmissivity")

    sub.add_parser("capacity", parents=[common], help="single-qubit capacity over a t_f grid")
    lc = sub.add_parser("lemma-check", parents=[common], help="recoverability lemma checks")
    lc.add_argument("--deltas", help="comma-separated filter strengths")
    oc = sub.add_parser("oracle-check", parents=[common], help="closed form vs construction checks")
    oc.add_argument("--corrupt", help=argparse.SUPPRESS)

    rp = sub.add_parser("replay", help="re-run a command from its manifest")
    rp.add_argument("manifest")
    rp.add_argument("--out", required=True)
    rp.add_argument("--jobs", type=int)
    return p


def execute(command: str, settings: dict, argv: list, out: Path) -> int:
    fn = COMMANDS[command]
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        print(f"qloss: cannot write to {out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest = RunManifest(command, argv, settings["seed"], {k: v for k, v in settings.items() if k not in VOLATILE},
                           None, __version__, _now())
    text, summary, code, grid = fn(settings)
    stable = {k: v for k, v in settings.items() if k not in VOLATILE}
    body = dict(command=command, version=__version__, settings=stable, results=summary)
    try:
        manifest.outputs.append(_write(out, f"{command}.csv", text))
        manifest.outputs.append(_write(out, f"{command}-summary.json", json_text(body)))
        manifest.grid = grid
        manifest.finished = _now()
        _write(out, "manifest.json", json_text(manifest.to_dict()))
    except OSError as exc:
        print(f"qloss: cannot write results: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status = "ok" if code == EXIT_OK else "CHECK FAILED"
    print(f"{command}: {status}; wrote {', '.join(manifest.outputs)} to {out}")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "replay":
            try:
                m = json.loads(Path(args.manifest).read_text())
                command, settings = m["command"], dict(m["settings"])
            except (OSError, ValueError, KeyError) as exc:
                raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
            if command not in COMMANDS:
                raise UsageError(f"manifest names unknown command {command!r}")
            settings["jobs"] = args.jobs
            return execute(command, settings, argv, Path(args.out))
        flags = {k: v for k, v in vars(args).items() if k != "command"}
        config = read_config(args.config) if args.config else {}
        settings = resolve(args.command, flags, config, dict(os.environ))
        if args.command == "oracle-check":
            settings["corrupt"] = flags.get("corrupt")
        out = Path(settings.get("out") or f"results/{args.command}")
        settings["out"] = str(out)
        return execute(args.command, settings, argv, out)
    except UsageError as exc:
        print(f"qloss: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
