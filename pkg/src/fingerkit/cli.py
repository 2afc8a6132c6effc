"""Command-line surface: analyses, sweeps, and deterministic data files.

Subcommands
    analyze    mobility, loop count, and loop coefficients
    sweep      joint-angle curves and fingertip trace over the input range
    workspace  fingertip cloud over input x orientation, opening width
    force      static tip force profile for a tendon variant
    grasp      feasibility report for a cylinder or flat object
    safety     contact-force, clearance, and stroke checks
    validate   closed-form vs numeric-oracle agreement
    registry   reference-registry consistency report

Exit codes: 0 success, 1 domain error (no closure, rule violation, ...),
2 configuration or I/O error.  All angles are degrees at this boundary;
emitted files are deterministic functions of the config (a content hash is
embedded, never a timestamp), and CSV numbers carry 9 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .config import FingerConfig, default_config_path, load_config
from .errors import ConfigError, FingerkitError, NoClosureError
from .finger import (
    CylinderObject,
    FlatObject,
    ForceContext,
    GraspReport,
    TendonModel,
    grasp_assess,
    static_tip_force,
    tendon_excursion,
    tip_trace,
    tip_velocity,
    workspace,
)
from .linkage import (
    compute_mobility,
    count_loops,
    loop_coefficients,
    solve_chain,
    sweep_chain,
    NUM_JOINTS,
    NUM_LINKS,
)
from .registry import ReferenceRegistry, default_registry, registry_verify
from .safety import clearance_check, iso_contact_check, stroke_check
from .svgplot import Series, render_svg


@dataclass
class RunConfig:
    """One CLI invocation, fully resolved."""

    command: str
    config_path: Path
    output_dir: Path | None = None
    format: str = "csv"
    samples: int = 100
    extra: dict = field(default_factory=dict)


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def _deg(value: float) -> float:
    return math.degrees(value)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _csv(header: list[str], rows: list[list[float]], sha256: str) -> str:
    lines = [f"# config_sha256={sha256}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _json_doc(payload: dict, sha256: str) -> str:
    doc = {"config_sha256": sha256}
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _theta1_grid(cfg: FingerConfig, samples: int) -> np.ndarray:
    lo, hi = cfg.geometry.theta1_range
    return np.linspace(lo, hi, samples)


def _resolve_tendon(cfg: FingerConfig, kind: str | None) -> TendonModel:
    tendon = cfg.require_tendon()
    if kind is None or kind == tendon.kind:
        return tendon
    if kind == "double":
        return tendon.as_double()
    raise ConfigError(
        "config ships a double-tendon model; a single-tendon variant needs "
        "spring parameters in the config"
    )


def _cmd_analyze(cfg: FingerConfig, run: RunConfig) -> int:
    mobility = compute_mobility(NUM_LINKS, NUM_JOINTS)
    loops = count_loops(NUM_JOINTS, NUM_LINKS)
    print(f"M={mobility}, loops={loops}")
    for loop in (1, 2):
        c = loop_coefficients(cfg.geometry, loop)
        print(
            f"loop{loop}: kappa1={_fmt(c.kappa1)} kappa2={_fmt(c.kappa2)} "
            f"kappa3={_fmt(c.kappa3)}"
        )
    lo, hi = cfg.geometry.theta1_range
    print(f"theta1 range: [{_fmt(_deg(lo))}, {_fmt(_deg(hi))}] deg")
    return 0


def _cmd_sweep(cfg: FingerConfig, run: RunConfig) -> int:
    if run.samples < 2:
        raise ConfigError("sweep requires --samples >= 2")
    if run.output_dir is None:
        raise ConfigError("sweep requires --out")
    finger = cfg.require_finger()
    psi = math.radians(run.extra.get("psi_deg", 0.0))
    grid = _theta1_grid(cfg, run.samples)
    sweep = sweep_chain(cfg.geometry, grid)
    trace = tip_trace(cfg.geometry, finger, grid, psi)

    angle_header = [
        "theta1_deg", "theta2_deg", "theta3_deg", "theta5_deg",
        "theta6_deg", "theta7_deg", "mcp_deg", "pip_deg", "dip_deg",
    ]
    angle_rows = [
        [
            _deg(sweep.theta1[i]), _deg(sweep.theta2[i]), _deg(sweep.theta3[i]),
            _deg(sweep.theta5[i]), _deg(sweep.theta6[i]), _deg(sweep.theta7[i]),
            _deg(sweep.theta_mcp[i]), _deg(sweep.theta_pip[i]),
            _deg(sweep.theta_dip[i]),
        ]
        for i in range(grid.size)
    ]
    trace_header = [
        "theta1_deg", "psi_deg", "tip_x_mm", "tip_y_mm", "grip_x_mm", "grip_y_mm",
    ]
    trace_rows = [
        [_deg(s.theta1), _deg(s.psi), s.tip_x, s.tip_y, s.grip_x, s.grip_y]
        for s in trace
    ]

    out = run.output_dir
    if run.format == "json":
        _write(out / "joint_angles.json", _json_doc(
            {"columns": angle_header, "rows": angle_rows}, cfg.sha256))
        _write(out / "tip_trace.json", _json_doc(
            {"columns": trace_header, "rows": trace_rows}, cfg.sha256))
        return 0
    _write(out / "joint_angles.csv", _csv(angle_header, angle_rows, cfg.sha256))
    _write(out / "tip_trace.csv", _csv(trace_header, trace_rows, cfg.sha256))
    if run.format == "svg":
        t1_deg = [_deg(x) for x in sweep.theta1]
        _write(out / "joint_angles.svg", render_svg(
            [
                Series("theta2", t1_deg, [_deg(x) for x in sweep.theta2]),
                Series("theta6", t1_deg, [_deg(x) for x in sweep.theta6]),
            ],
            x_label="theta1 (deg)",
            y_label="dependent angle (deg)",
            title="Joint angles vs input",
        ))
        _write(out / "tip_trace.svg", render_svg(
            [Series("fingertip", [s.tip_x for s in trace],
                    [s.tip_y for s in trace])],
            x_label="x (mm)",
            y_label="y (mm)",
            title="Fingertip trace",
        ))
    return 0


def _cmd_workspace(cfg: FingerConfig, run: RunConfig) -> int:
    if run.output_dir is None:
        raise ConfigError("workspace requires --out")
    psi_samples = run.extra.get("psi_samples", 25)
    if run.samples < 2 or psi_samples < 2:
        raise ConfigError("workspace requires --samples and --psi-samples >= 2")
    finger = cfg.require_finger()
    thumb = cfg.require_thumb_line()
    result = workspace(cfg.geometry, finger, run.samples, psi_samples, thumb)

    header = [
        "theta1_deg", "psi_deg", "tip_x_mm", "tip_y_mm", "grip_x_mm", "grip_y_mm",
    ]
    rows = [
        [_deg(s.theta1), _deg(s.psi), s.tip_x, s.tip_y, s.grip_x, s.grip_y]
        for s in result.samples
    ]
    out = run.output_dir
    metrics = {
        "max_opening_mm": result.max_opening_mm,
        "theta1_samples": run.samples,
        "psi_samples": psi_samples,
    }
    if run.format == "json":
        _write(out / "workspace.json", _json_doc(
            {"columns": header, "rows": rows}, cfg.sha256))
    else:
        _write(out / "workspace.csv", _csv(header, rows, cfg.sha256))
    _write(out / "workspace_metrics.json", _json_doc(metrics, cfg.sha256))
    if run.format == "svg":
        series = []
        for j in range(psi_samples):
            pts = result.samples[j::psi_samples]
            psi_deg = _deg(pts[0].psi)
            series.append(Series(
                f"psi {psi_deg:.0f} deg",
                [s.grip_x for s in pts],
                [s.grip_y for s in pts],
            ))
        # legend stays readable with at most 6 labelled orientations
        if len(series) > 6:
            step = (len(series) - 1) / 5.0
            series = [series[round(i * step)] for i in range(6)]
        _write(out / "workspace.svg", render_svg(
            series, x_label="x (mm)", y_label="y (mm)",
            title="Fingertip workspace",
        ))
    return 0


def _cmd_force(cfg: FingerConfig, run: RunConfig) -> int:
    if run.samples < 2:
        raise ConfigError("force requires --samples >= 2")
    if run.output_dir is None:
        raise ConfigError("force requires --out")
    finger = cfg.require_finger()
    tendon = _resolve_tendon(cfg, run.extra.get("tendon_kind"))
    tension = run.extra.get("tension_n")
    if tension is None:
        tension = tendon.max_tension
    grid = _theta1_grid(cfg, run.samples)

    header = [
        "theta1_deg", "excursion_mm", "dexcursion_mm_per_rad",
        "tip_speed_mm_per_rad", "force_n",
    ]
    rows = []
    for theta1 in grid:
        state = solve_chain(cfg.geometry, float(theta1))
        excursion, d_exc = tendon_excursion(tendon, cfg.geometry, state)
        vx, vy = tip_velocity(cfg.geometry, finger, state)
        force = static_tip_force(tendon, cfg.geometry, finger, float(theta1), tension)
        rows.append([_deg(theta1), excursion, d_exc, math.hypot(vx, vy), force])

    out = run.output_dir
    if run.format == "json":
        _write(out / "force_profile.json", _json_doc(
            {"columns": header, "rows": rows, "tendon": tendon.kind,
             "tension_n": tension}, cfg.sha256))
        return 0
    _write(out / "force_profile.csv", _csv(header, rows, cfg.sha256))
    if run.format == "svg":
        _write(out / "force_profile.svg", render_svg(
            [Series(f"{tendon.kind} tendon", [r[0] for r in rows],
                    [r[4] for r in rows])],
            x_label="theta1 (deg)",
            y_label="tip force (N)",
            title="Static tip force",
        ))
    return 0


def _report_dict(report: GraspReport) -> dict:
    return {
        "grasp_type": report.grasp_type,
        "feasible": report.feasible,
        "predicted_force_n": report.predicted_force,
        "margin": report.margin,
        "notes": report.notes,
    }


def _cmd_grasp(cfg: FingerConfig, run: RunConfig) -> int:
    finger = cfg.require_finger()
    tendon = _resolve_tendon(cfg, run.extra.get("tendon_kind"))
    tension = run.extra.get("tension_n")
    if tension is None:
        tension = tendon.max_tension
    theta1_deg = run.extra.get("theta1_deg")
    theta1 = (
        math.radians(theta1_deg)
        if theta1_deg is not None
        else cfg.geometry.theta1_range[0]
    )
    context = ForceContext(
        geometry=cfg.geometry, finger=finger, tendon=tendon,
        theta1=theta1, tension=tension,
    )
    diameter = run.extra.get("diameter_mm")
    thickness = run.extra.get("thickness_mm")
    obj = (
        CylinderObject(diameter_mm=diameter)
        if diameter is not None
        else FlatObject(thickness_mm=thickness)
    )
    report = grasp_assess(obj, default_registry(), context)
    print(json.dumps(_report_dict(report), indent=2, sort_keys=True))
    return 0


def _cmd_safety(cfg: FingerConfig, run: RunConfig) -> int:
    registry = default_registry()
    force = run.extra.get("force_n")
    if force is None:
        force = registry.value("pinch_force_max_n")
    iso = iso_contact_check(force, "thigh_knee", registry)
    clearance = clearance_check(
        registry.value("toilet_width_mm"),
        registry.value("shoulder_width_mm"),
        registry.value("secondary_arm_outer_diameter_mm"),
    )
    stroke = stroke_check(
        registry.value("trouser_raise_mm"),
        registry.value("secondary_extension_mm"),
    )
    doc = {
        "iso_contact": {
            "passed": iso.passed,
            "applied_limit_n": iso.applied_limit,
            "measured_n": iso.measured,
            "margin_ratio": iso.margin_ratio,
        },
        "clearance": {
            "per_side_clearance_mm": clearance.per_side_clearance,
            "fits": clearance.fits,
        },
        "stroke": {
            "passed": stroke.passed,
            "slack_mm": stroke.slack,
        },
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0 if (iso.passed and clearance.fits and stroke.passed) else 1


def _cmd_validate(cfg: FingerConfig, run: RunConfig) -> int:
    if run.samples < 2:
        raise ConfigError("validate requires --samples >= 2")
    geometry = cfg.geometry
    started = time.perf_counter()
    grid = _theta1_grid(cfg, run.samples)
    c1 = loop_coefficients(geometry, 1)
    c2 = loop_coefficients(geometry, 2)

    ok_c, theta2_c = _kernels.loop_solve_batch(
        c1.kappa1, c1.kappa2, c1.kappa3, grid, geometry.theta4_fixed, 1)
    ok_n, theta2_n = _kernels.loop_bisect_batch(
        c1.kappa1, c1.kappa2, c1.kappa3, grid, geometry.theta4_fixed, 1, 0.0, 4096)
    if not (ok_c.all() and ok_n.all()):
        bad = float(grid[int(np.argmin(ok_c & ok_n))])
        raise NoClosureError(
            f"loop 1 failed during validation at theta1={_fmt(bad)} rad",
            loop=1, theta_in=bad)

    theta5_c = theta2_c + geometry.sigma
    theta5_n = theta2_n + geometry.sigma
    ok_c2, theta6_c = _kernels.loop_solve_batch(
        c2.kappa1, c2.kappa2, c2.kappa3, theta5_c, geometry.theta8_fixed, 1)
    ok_n2, theta6_n = _kernels.loop_bisect_batch(
        c2.kappa1, c2.kappa2, c2.kappa3, theta5_n, geometry.theta8_fixed, 1, 0.0, 4096)
    if not (ok_c2.all() and ok_n2.all()):
        bad = float(grid[int(np.argmin(ok_c2 & ok_n2))])
        raise NoClosureError(
            f"loop 2 failed during validation at theta1={_fmt(bad)} rad",
            loop=2, theta_in=bad)

    dev2 = float(np.max(np.abs(theta2_c - theta2_n)))
    dev6 = float(np.max(np.abs(theta6_c - theta6_n)))
    elapsed = time.perf_counter() - started
    print(f"samples={run.samples}")
    print(f"max |theta2 closed - numeric| = {dev2:.3e} rad")
    print(f"max |theta6 closed - numeric| = {dev6:.3e} rad")
    print(f"max deviation = {max(dev2, dev6):.3e} rad")
    print(f"elapsed: {elapsed:.3f} s", file=sys.stderr)
    return 0


def _cmd_registry(cfg: FingerConfig, run: RunConfig) -> int:
    path = run.extra.get("registry_path")
    if path is None:
        registry = default_registry()
    else:
        registry = ReferenceRegistry.load(path, validate=False)
    report = registry_verify(registry)
    failures = 0
    for result in report:
        status = "PASS" if result.passed else "FAIL"
        if not result.passed:
            failures += 1
        print(f"{status} {result.rule_id}: {result.detail}")
    print(f"{len(report) - failures}/{len(report)} rules passed")
    return 0 if failures == 0 else 1


_COMMANDS = {
    "analyze": _cmd_analyze,
    "sweep": _cmd_sweep,
    "workspace": _cmd_workspace,
    "force": _cmd_force,
    "grasp": _cmd_grasp,
    "safety": _cmd_safety,
    "validate": _cmd_validate,
    "registry": _cmd_registry,
}


def run(config: RunConfig) -> int:
    """Execute one resolved invocation; raises domain/config errors."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        raise ConfigError(f"unknown command {config.command!r}")
    cfg = load_config(config.config_path)
    return handler(cfg, config)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fingerkit",
        description="Kinematics and static-force analyses of a tendon-driven "
                    "linkage finger gripper.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out: bool = False, samples: int | None = None):
        p.add_argument("--config", type=Path, default=default_config_path(),
                       help="finger config JSON (default: shipped demo finger)")
        if out:
            p.add_argument("--out", type=Path, required=True,
                           help="output directory for emitted files")
            p.add_argument("--format", choices=("csv", "json", "svg"),
                           default="csv",
                           help="csv (default), json, or svg (csv + plots)")
        if samples is not None:
            p.add_argument("--samples", type=int, default=samples,
                           help=f"sample count (default {samples})")

    common(sub.add_parser("analyze", help="mobility, loops, coefficients"))

    p = sub.add_parser("sweep", help="joint-angle curves and tip trace")
    common(p, out=True, samples=100)
    p.add_argument("--psi-deg", type=float, default=0.0,
                   help="finger orientation for the trace (default 0)")

    p = sub.add_parser("workspace", help="fingertip cloud and opening width")
    common(p, out=True, samples=100)
    p.add_argument("--psi-samples", type=int, default=25,
                   help="orientation sample count (default 25)")

    p = sub.add_parser("force", help="static tip-force profile")
    common(p, out=True, samples=100)
    p.add_argument("--tendon", choices=("single", "double"), default=None,
                   help="override the config's tendon variant")
    p.add_argument("--tension-n", type=float, default=None,
                   help="tendon tension (default: config max tension)")

    p = sub.add_parser("grasp", help="grasp feasibility report")
    common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--diameter-mm", type=float, help="cylindrical object")
    group.add_argument("--thickness-mm", type=float, help="flat object")
    p.add_argument("--tendon", choices=("single", "double"), default=None)
    p.add_argument("--tension-n", type=float, default=None)
    p.add_argument("--theta1-deg", type=float, default=None,
                   help="contact configuration (default: range start)")

    p = sub.add_parser("safety", help="contact/clearance/stroke checks")
    common(p)
    p.add_argument("--force-n", type=float, default=None,
                   help="contact force to check (default: registry pinch max)")

    p = sub.add_parser("validate", help="closed form vs numeric oracle")
    common(p, samples=1000)

    p = sub.add_parser("registry", help="registry consistency report")
    common(p)
    p.add_argument("--registry-path", type=Path, default=None,
                   help="verify a registry file instead of the shipped one")

    return parser


def _to_runconfig(args: argparse.Namespace) -> RunConfig:
    extra: dict = {}
    for key in ("psi_deg", "psi_samples", "tension_n", "diameter_mm",
                "thickness_mm", "theta1_deg", "force_n", "registry_path"):
        if getattr(args, key, None) is not None:
            extra[key] = getattr(args, key)
    if getattr(args, "tendon", None) is not None:
        extra["tendon_kind"] = args.tendon
    return RunConfig(
        command=args.command,
        config_path=args.config,
        output_dir=getattr(args, "out", None),
        format=getattr(args, "format", "csv"),
        samples=getattr(args, "samples", 100),
        extra=extra,
    )


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return run(_to_runconfig(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FingerkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
