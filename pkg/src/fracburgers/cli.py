"""Command-line front end: configuration, run loop, deterministic outputs.

A run samples the chosen initial profile on the grid, advances it with RK4
(fixed or automatic step), records every diagnostic at every step, stores
nodal snapshots at exact multiples of snapshot_every, and stops early when
the detection policy fires or a step goes non-finite. Outputs are plain CSV
plus a small report.txt, written so that identical configs produce
byte-identical files.

Exit codes: 0 completed, 2 blow-up detected, 3 resolution lost,
4 numeric failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import (
    BlowupReport,
    DetectionThresholds,
    DiagnosticsRecord,
    check_blowup,
    extrema,
    observe,
    predicted_blowup_time,
)
from .dynamics import InstabilityError, InvalidStateError, SimParams, rk4_step, stable_dt
from .oracles import InitialCondition
from .spectral import GridSpec, NodalField, make_grid

STATUSES = ("completed", "blowup_detected", "resolution_lost", "numeric_failure")

EXIT_CODES = {"completed": 0, "blowup_detected": 2, "resolution_lost": 3,
              "numeric_failure": 4}

_CAUSE_TO_STATUS = {"slope_threshold": "blowup_detected",
                    "resolution_loss": "resolution_lost",
                    "non_finite": "numeric_failure"}

_DEFAULTS = {
    "n": "256",
    "gamma": "0",
    "alpha": "1",
    "dt": "auto",
    "t_final": "1",
    "ic": "neg-sine",
    "dealias": "off",
    "snapshot_every": "0.1",
    "output": "out",
    "detect_blowup": "true",
    "slope_limit": "100",
    "tail_limit": "0.1",
    "linear_only": "false",
}


class UsageError(Exception):
    """Bad flag or config value; maps to exit code 64."""


@dataclass(frozen=True)
class RunConfig:
    n: int
    params: SimParams
    ic: InitialCondition
    snapshot_every: float
    output_dir: Path
    thresholds: DetectionThresholds
    detect_blowup: bool


@dataclass(frozen=True)
class RunResult:
    records: tuple[DiagnosticsRecord, ...]
    snapshots: tuple[tuple[float, NodalField], ...]
    report: BlowupReport
    status: str
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")


class _Parser(argparse.ArgumentParser):
    # argparse's default error handler exits with code 2; route everything
    # through UsageError so main() owns the exit code.
    def error(self, message: str):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="fracburgers",
                description="Pseudo-spectral fractional-Burgers simulator")
    p.add_argument("--n", help="grid size (even, >= 4)")
    p.add_argument("--gamma", help="dissipation strength, >= 0")
    p.add_argument("--alpha", help="fractional order in (0, 2]")
    p.add_argument("--dt", help='time step, a number or "auto"')
    p.add_argument("--t-final", help="end time, > 0")
    p.add_argument("--ic", help="neg-sine | scaled-neg-sine:a | gaussian:w | random:kmax:seed")
    p.add_argument("--dealias", help="off | two-thirds")
    p.add_argument("--snapshot-every", help="time between stored snapshots")
    p.add_argument("--output", help="output directory")
    p.add_argument("--detect-blowup", help="true | false")
    p.add_argument("--slope-limit", help="detection threshold on |min slope|")
    p.add_argument("--tail-limit", help="detection threshold on tail fraction")
    p.add_argument("--linear-only", action="store_const", const="true",
                   help="drop the nonlinear term (test mode)")
    p.add_argument("--config", help="key=value file; flags override it")
    return p


def _as_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"invalid value for {key}: {raw!r} is not an integer") from None


def _as_float(key: str, raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise UsageError(f"invalid value for {key}: {raw!r} is not a number") from None
    if v != v or v in (float("inf"), float("-inf")):
        raise UsageError(f"invalid value for {key}: {raw!r} is not finite")
    return v


def _as_bool(key: str, raw: str) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise UsageError(f"invalid value for {key}: expected true or false, got {raw!r}")


def _parse_ic(raw: str) -> InitialCondition:
    parts = raw.split(":")
    kind = parts[0]
    try:
        if kind == "neg-sine" and len(parts) == 1:
            return InitialCondition.neg_sine()
        if kind == "scaled-neg-sine" and len(parts) == 2:
            return InitialCondition.scaled_neg_sine(_as_float("ic", parts[1]))
        if kind == "gaussian" and len(parts) == 2:
            return InitialCondition.gaussian_bump(_as_float("ic", parts[1]))
        if kind == "random" and len(parts) == 3:
            return InitialCondition.random_band(_as_int("ic", parts[1]),
                                                _as_int("ic", parts[2]))
    except ValueError as err:
        raise UsageError(f"invalid value for ic: {err}") from None
    raise UsageError(
        f"invalid value for ic: {raw!r} (expected neg-sine, scaled-neg-sine:a, "
        "gaussian:w, or random:kmax:seed)"
    )


def _read_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read config file: {err}") from None
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        if key not in _DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def parse_config(argv: list[str]) -> RunConfig:
    """Resolve defaults, config file, and flags (in rising precedence)."""
    ns = _build_parser().parse_args(argv)
    merged = dict(_DEFAULTS)
    if ns.config is not None:
        merged.update(_read_config_file(ns.config))
    for key in _DEFAULTS:
        given = getattr(ns, key)
        if given is not None:
            merged[key] = given

    n = _as_int("n", merged["n"])
    if n % 2 or n < 4:
        raise UsageError(f"invalid value for n: must be even and >= 4, got {n}")
    gamma = _as_float("gamma", merged["gamma"])
    if gamma < 0.0:
        raise UsageError(f"invalid value for gamma: must be >= 0, got {gamma:g}")
    alpha = _as_float("alpha", merged["alpha"])
    if not 0.0 < alpha <= 2.0:
        raise UsageError(f"invalid value for alpha: must lie in (0, 2], got {alpha:g}")
    if merged["dt"] == "auto":
        dt: float | str = "auto"
    else:
        dt = _as_float("dt", merged["dt"])
        if dt <= 0.0:
            raise UsageError(f"invalid value for dt: must be > 0, got {dt:g}")
    t_final = _as_float("t_final", merged["t_final"])
    if t_final <= 0.0:
        raise UsageError(f"invalid value for t_final: must be > 0, got {t_final:g}")
    dealias = merged["dealias"]
    if dealias not in ("off", "two-thirds"):
        raise UsageError(f"invalid value for dealias: expected off or two-thirds, got {dealias!r}")
    snapshot_every = _as_float("snapshot_every", merged["snapshot_every"])
    if snapshot_every <= 0.0:
        raise UsageError(f"invalid value for snapshot_every: must be > 0, got {snapshot_every:g}")
    if snapshot_every > t_final:
        raise UsageError(
            f"invalid value for snapshot_every: {snapshot_every:g} exceeds t_final {t_final:g}"
        )
    slope_limit = _as_float("slope_limit", merged["slope_limit"])
    if slope_limit <= 0.0:
        raise UsageError(f"invalid value for slope_limit: must be > 0, got {slope_limit:g}")
    tail_limit = _as_float("tail_limit", merged["tail_limit"])
    if not 0.0 < tail_limit < 1.0:
        raise UsageError(f"invalid value for tail_limit: must lie in (0, 1), got {tail_limit:g}")

    params = SimParams(
        gamma=gamma,
        alpha=alpha,
        dt=dt,
        t_final=t_final,
        dealias_rule="two_thirds" if dealias == "two-thirds" else "off",
        linear_only=_as_bool("linear_only", merged["linear_only"]),
    )
    return RunConfig(
        n=n,
        params=params,
        ic=_parse_ic(merged["ic"]),
        snapshot_every=snapshot_every,
        output_dir=Path(merged["output"]),
        thresholds=DetectionThresholds(slope_limit=slope_limit, tail_limit=tail_limit),
        detect_blowup=_as_bool("detect_blowup", merged["detect_blowup"]),
    )


def run_simulation(cfg: RunConfig) -> RunResult:
    """Advance the configured run to t_final or to the first halting signal.

    Steps are clipped to land exactly on snapshot multiples and on t_final;
    on landing, the time stamp is assigned the target value, so snapshot
    times are exact float multiples of snapshot_every and no drift-induced
    micro-steps occur. One DiagnosticsRecord is appended per step, plus the
    initial record at t=0.
    """
    g = make_grid(cfg.n)
    p = cfg.params
    u = NodalField(cfg.ic(g.nodes), 0.0)

    warnings: list[str] = []
    max0, min0 = extrema(u)
    if not (max0 >= 0.0 and min0 <= 0.0):
        warnings.append(
            "maximum-principle hypotheses do not hold at t=0 "
            f"(need max u >= 0 >= min u, got max={max0:.6g}, min={min0:.6g}); "
            "the extrema bounds are monitored but not guaranteed"
        )
    predicted = predicted_blowup_time(u, g)

    rec, slope_norm = observe(u, g)
    records = [rec]
    snapshots = [(0.0, u)]
    status = "completed"
    fragment = BlowupReport()

    eps = 1e-12 * max(1.0, p.t_final)
    t = 0.0
    snap_idx = 1
    while t < p.t_final - eps:
        snap_t = snap_idx * cfg.snapshot_every
        target = min(snap_t, p.t_final)
        try:
            cap = p.dt if p.dt != "auto" else stable_dt(u, g, p)
            remaining = target - t
            if cap >= remaining - eps:
                dt_step, landed = remaining, True
            else:
                dt_step, landed = cap, False
            u = rk4_step(u, g, p, dt_step)
        except (InstabilityError, InvalidStateError):
            # Step blew up; the last appended record is the last valid state.
            status = "numeric_failure"
            fragment = BlowupReport(detected=True, detected_t=t,
                                    detection_cause="non_finite")
            break
        if landed:
            t = target
            u = NodalField(u.values, t)
        else:
            t = u.time
        rec, slope_norm = observe(u, g, prev_bkm=records[-1].bkm_integral,
                                  prev_slope_norm=slope_norm, dt=dt_step)
        records.append(rec)
        if landed and abs(snap_t - t) <= eps:
            snapshots.append((t, u))
            snap_idx += 1
        if cfg.detect_blowup:
            hit = check_blowup(rec, cfg.thresholds)
            if hit.detected:
                status = _CAUSE_TO_STATUS[hit.detection_cause]
                fragment = hit
                break

    report = BlowupReport(
        predicted_t_star=predicted,
        detected=fragment.detected,
        detected_t=fragment.detected_t,
        detection_cause=fragment.detection_cause,
    )
    return RunResult(records=tuple(records), snapshots=tuple(snapshots),
                     report=report, status=status, warnings=tuple(warnings))


def _fmt(v: float) -> str:
    v = float(v)
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return format(v, ".17g")


def write_outputs(result: RunResult, cfg: RunConfig) -> list[Path]:
    """Write diagnostics.csv, one snapshot_<t>.csv per snapshot, report.txt."""
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    lines = [",".join(DiagnosticsRecord.FIELDS)]
    lines += [",".join(_fmt(v) for v in rec.astuple()) for rec in result.records]
    path = out / "diagnostics.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(path)

    nodes = make_grid(cfg.n).nodes
    for t, field in result.snapshots:
        rows = ["x,u"]
        rows += [f"{_fmt(x)},{_fmt(v)}" for x, v in zip(nodes, field.values)]
        path = out / f"snapshot_{format(t, '.10g')}.csv"
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        written.append(path)

    rep = result.report
    label = " (inviscid prediction)" if cfg.params.gamma > 0.0 else ""
    report_lines = [
        f"status: {result.status}",
        f"ic: {cfg.ic.label()}",
        "rng: pcg64",
        f"seed: {'none' if cfg.ic.seed is None else cfg.ic.seed}",
        ("predicted_t_star: none" if rep.predicted_t_star is None
         else f"predicted_t_star: {_fmt(rep.predicted_t_star)}{label}"),
        f"detected: {'true' if rep.detected else 'false'}",
        f"detected_t: {'none' if rep.detected_t is None else _fmt(rep.detected_t)}",
        f"detection_cause: {rep.detection_cause}",
    ]
    report_lines += [f"warning: {w}" for w in result.warnings]
    path = out / "report.txt"
    path.write_text("\n".join(report_lines) + "\n", encoding="utf-8")
    written.append(path)
    return written


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else list(argv))
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 64
    result = run_simulation(cfg)
    try:
        written = write_outputs(result, cfg)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    steps = len(result.records) - 1
    print(f"{result.status} after {steps} steps (t = {result.records[-1].t:.6g}); "
          f"{len(written)} files in {cfg.output_dir}")
    return EXIT_CODES[result.status]
