"""Fingertip kinematics, tendon actuation, and grasp assessment.

Builds on the loop solvers in :mod:`fingerkit.linkage`: the solved
anatomical angles feed a three-segment serial forward kinematics, a pulley
tendon model with an equivalent torsional return spring, a virtual-work
static tip-force prediction, and feasibility checks for pinch and
cylindrical grasps against the reference registry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, OutOfRangeError
from .linkage import (
    ChainSweep,
    JointState,
    LinkageGeometry,
    chain_derivatives,
    solve_chain,
    sweep_chain,
)
from .registry import ReferenceRegistry

SINGLE = "single"
DOUBLE = "double"

# tip Jacobians below this magnitude (mm/rad) count as singular
_TIP_SPEED_MIN = 1e-9


@dataclass(frozen=True)
class FingerGeometry:
    """Phalanx lengths and mounting of the finger in the gripper frame.

    ``base_offset`` locates the MCP axis in the rotating finger plane;
    the whole plane swings about the gripper origin by the orientation
    angle psi, bounded by ``orientation_range``.
    """

    phalanx_lengths: tuple[float, float, float]
    base_offset: tuple[float, float] = (0.0, 0.0)
    orientation_range: tuple[float, float] = (-math.pi / 4.0, math.pi / 4.0)

    def __post_init__(self) -> None:
        if len(self.phalanx_lengths) != 3:
            raise ValueError("finger requires exactly three phalanx lengths")
        for i, length in enumerate(self.phalanx_lengths):
            if not (math.isfinite(length) and length > 0.0):
                raise ValueError(f"phalanx length {i} must be finite and > 0")
        lo, hi = self.orientation_range
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise ValueError("orientation_range must be a non-empty interval")

    def scaled(self, factor: float) -> "FingerGeometry":
        if factor <= 0.0:
            raise ValueError("scale factor must be > 0")
        return FingerGeometry(
            phalanx_lengths=tuple(factor * x for x in self.phalanx_lengths),
            base_offset=tuple(factor * x for x in self.base_offset),
            orientation_range=self.orientation_range,
        )


@dataclass(frozen=True)
class TendonModel:
    """Pulley-idealized tendon routing with constant per-joint moment arms.

    The single-tendon variant closes against extension springs lumped into
    one equivalent torsional return spring about the input angle; the
    double-tendon variant actively drives both directions and carries no
    spring terms.
    """

    kind: str
    moment_arms: tuple[float, float, float]
    spring_stiffness: float = 0.0
    spring_preload: float = 0.0
    max_tension: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (SINGLE, DOUBLE):
            raise ValueError(f"tendon kind must be 'single' or 'double', got {self.kind!r}")
        if len(self.moment_arms) != 3:
            raise ValueError("tendon requires three moment arms (MCP, PIP, DIP)")
        for arm in self.moment_arms:
            if not (math.isfinite(arm) and arm >= 0.0):
                raise ValueError("moment arms must be finite and >= 0")
        if self.kind == SINGLE and self.spring_stiffness <= 0.0:
            raise ValueError("single-tendon model requires spring_stiffness > 0")
        if self.kind == DOUBLE and (
            self.spring_stiffness != 0.0 or self.spring_preload != 0.0
        ):
            raise ValueError("double-tendon model must have zero spring terms")
        if not (math.isfinite(self.max_tension) and self.max_tension > 0.0):
            raise ValueError("max_tension must be finite and > 0")

    def as_double(self) -> "TendonModel":
        """Double-tendon variant of this routing (spring terms removed)."""
        return TendonModel(
            kind=DOUBLE,
            moment_arms=self.moment_arms,
            spring_stiffness=0.0,
            spring_preload=0.0,
            max_tension=self.max_tension,
        )


@dataclass(frozen=True)
class TipSample:
    """One fingertip location: planar finger-plane point plus its
    psi-rotated image in the gripper frame."""

    theta1: float
    psi: float
    tip_x: float
    tip_y: float
    grip_x: float
    grip_y: float


@dataclass(frozen=True)
class WorkspaceResult:
    samples: list[TipSample]
    max_opening_mm: float


@dataclass(frozen=True)
class GraspReport:
    """Outcome of a grasp feasibility assessment.

    ``margin`` is millimetres to the nearest diameter bound for
    cylindrical grasps and the dimensionless headroom below the pinch
    force cap for pinch grasps.
    """

    grasp_type: str
    feasible: bool
    predicted_force: float
    margin: float
    notes: str


@dataclass(frozen=True)
class CylinderObject:
    diameter_mm: float


@dataclass(frozen=True)
class FlatObject:
    thickness_mm: float


@dataclass(frozen=True)
class ForceContext:
    """Everything static_tip_force needs, bundled for grasp assessment."""

    geometry: LinkageGeometry
    finger: FingerGeometry
    tendon: TendonModel
    theta1: float
    tension: float


def _planar_tip(finger: FingerGeometry, state: JointState) -> tuple[float, float]:
    p1, p2, p3 = finger.phalanx_lengths
    a1 = state.theta_mcp
    a2 = a1 + state.theta_pip
    a3 = a2 + state.theta_dip
    x = finger.base_offset[0] + p1 * math.cos(a1) + p2 * math.cos(a2) + p3 * math.cos(a3)
    y = finger.base_offset[1] + p1 * math.sin(a1) + p2 * math.sin(a2) + p3 * math.sin(a3)
    return x, y


def tip_position(finger: FingerGeometry, state: JointState, psi: float) -> TipSample:
    """Fingertip of a solved configuration.

    The planar point accumulates the three phalanx vectors at cumulative
    anatomical angles; the gripper-frame point is that planar point
    rotated by psi about the orientation axis.
    """
    x, y = _planar_tip(finger, state)
    c, s = math.cos(psi), math.sin(psi)
    return TipSample(
        theta1=state.theta1,
        psi=psi,
        tip_x=x,
        tip_y=y,
        grip_x=c * x - s * y,
        grip_y=s * x + c * y,
    )


def _sweep_tips(
    finger: FingerGeometry, sweep: ChainSweep
) -> tuple[np.ndarray, np.ndarray]:
    p1, p2, p3 = finger.phalanx_lengths
    a1 = sweep.theta_mcp
    a2 = a1 + sweep.theta_pip
    a3 = a2 + sweep.theta_dip
    x = finger.base_offset[0] + p1 * np.cos(a1) + p2 * np.cos(a2) + p3 * np.cos(a3)
    y = finger.base_offset[1] + p1 * np.sin(a1) + p2 * np.sin(a2) + p3 * np.sin(a3)
    return x, y


def tip_trace(
    geometry: LinkageGeometry,
    finger: FingerGeometry,
    theta1_values: np.ndarray,
    psi: float,
) -> list[TipSample]:
    """Ordered fingertip trace over a monotone input sweep at fixed psi.

    Solves with the continuity branch policy; a sample that cannot close
    raises with the offending input angle rather than being dropped.
    """
    sweep = sweep_chain(geometry, theta1_values)
    x, y = _sweep_tips(finger, sweep)
    c, s = math.cos(psi), math.sin(psi)
    gx = c * x - s * y
    gy = s * x + c * y
    return [
        TipSample(
            theta1=float(sweep.theta1[i]),
            psi=psi,
            tip_x=float(x[i]),
            tip_y=float(y[i]),
            grip_x=float(gx[i]),
            grip_y=float(gy[i]),
        )
        for i in range(sweep.theta1.size)
    ]


def _segment_distance(
    px: np.ndarray, py: np.ndarray, seg: tuple[tuple[float, float], tuple[float, float]]
) -> np.ndarray:
    (x1, y1), (x2, y2) = seg
    dx, dy = x2 - x1, y2 - y1
    seg_len_sq = dx * dx + dy * dy
    if seg_len_sq == 0.0:
        return np.hypot(px - x1, py - y1)
    t = np.clip(((px - x1) * dx + (py - y1) * dy) / seg_len_sq, 0.0, 1.0)
    return np.hypot(px - (x1 + t * dx), py - (y1 + t * dy))


def workspace(
    geometry: LinkageGeometry,
    finger: FingerGeometry,
    theta1_samples: int,
    psi_samples: int,
    thumb_line: tuple[tuple[float, float], tuple[float, float]],
) -> WorkspaceResult:
    """Cartesian-product sweep of input angle and finger orientation.

    The cloud is ordered theta1-major then psi; the opening-width metric
    is the maximum distance from any gripper-frame tip to the fixed-thumb
    contact segment.
    """
    if theta1_samples < 2 or psi_samples < 2:
        raise ValueError("workspace requires at least 2 samples on each axis")
    t_lo, t_hi = geometry.theta1_range
    p_lo, p_hi = finger.orientation_range
    theta1_values = np.linspace(t_lo, t_hi, theta1_samples)
    psi_values = np.linspace(p_lo, p_hi, psi_samples)

    sweep = sweep_chain(geometry, theta1_values)
    x, y = _sweep_tips(finger, sweep)

    cos_p = np.cos(psi_values)
    sin_p = np.sin(psi_values)
    # (theta1, psi) grid, theta1-major
    gx = x[:, None] * cos_p[None, :] - y[:, None] * sin_p[None, :]
    gy = x[:, None] * sin_p[None, :] + y[:, None] * cos_p[None, :]

    samples = [
        TipSample(
            theta1=float(theta1_values[i]),
            psi=float(psi_values[j]),
            tip_x=float(x[i]),
            tip_y=float(y[i]),
            grip_x=float(gx[i, j]),
            grip_y=float(gy[i, j]),
        )
        for i in range(theta1_samples)
        for j in range(psi_samples)
    ]
    opening = float(np.max(_segment_distance(gx.ravel(), gy.ravel(), thumb_line)))
    return WorkspaceResult(samples=samples, max_opening_mm=opening)


def _range_start_state(geometry: LinkageGeometry) -> JointState:
    return solve_chain(geometry, geometry.theta1_range[0])


def tendon_excursion(
    tendon: TendonModel,
    geometry: LinkageGeometry,
    state: JointState,
) -> tuple[float, float]:
    """Tendon length drawn since the range-start configuration, and its
    derivative with respect to the input angle.

    Excursion is the moment-arm-weighted sum of anatomical joint angles;
    the derivative chains the implicit loop transmissions through both
    dependent angles.
    """
    start = _range_start_state(geometry)
    r_mcp, r_pip, r_dip = tendon.moment_arms
    excursion = (
        r_mcp * (state.theta_mcp - start.theta_mcp)
        + r_pip * (state.theta_pip - start.theta_pip)
        + r_dip * (state.theta_dip - start.theta_dip)
    )
    d21, d61 = chain_derivatives(geometry, state)
    d_excursion = r_mcp * d61 + r_pip * d21 + r_dip * 1.0
    return excursion, d_excursion


def tip_velocity(
    geometry: LinkageGeometry,
    finger: FingerGeometry,
    state: JointState,
) -> tuple[float, float]:
    """d(tip)/d(theta1) of the planar fingertip, mm/rad."""
    d21, d61 = chain_derivatives(geometry, state)
    p1, p2, p3 = finger.phalanx_lengths
    a1 = state.theta_mcp
    a2 = a1 + state.theta_pip
    a3 = a2 + state.theta_dip
    da1 = d61
    da2 = d61 + d21
    da3 = d61 + d21 + 1.0
    vx = -(p1 * math.sin(a1) * da1 + p2 * math.sin(a2) * da2 + p3 * math.sin(a3) * da3)
    vy = p1 * math.cos(a1) * da1 + p2 * math.cos(a2) * da2 + p3 * math.cos(a3) * da3
    return vx, vy


def static_tip_force(
    tendon: TendonModel,
    geometry: LinkageGeometry,
    finger: FingerGeometry,
    theta1: float,
    tension: float,
) -> float:
    """Contact-normal tip force magnitude predicted by virtual work.

    Tension working through the tendon excursion, less the return-spring
    torque, divided by the tip speed per unit input angle.  Contacts only
    push, so negative results clamp to zero.
    """
    if not (0.0 <= tension <= tendon.max_tension):
        raise OutOfRangeError(
            f"tension {tension:.9g} N outside [0, {tendon.max_tension:.9g}] N"
        )
    state = solve_chain(geometry, theta1)
    _, d_excursion = tendon_excursion(tendon, geometry, state)
    vx, vy = tip_velocity(geometry, finger, state)
    speed = math.hypot(vx, vy)
    if speed < _TIP_SPEED_MIN:
        raise DegenerateGeometryError(
            f"tip Jacobian magnitude {speed:.3e} mm/rad is singular"
        )
    spring_torque = tendon.spring_preload + tendon.spring_stiffness * (
        theta1 - geometry.theta1_range[0]
    )
    return max(0.0, (tension * d_excursion - spring_torque) / speed)


def grasp_assess(
    obj: CylinderObject | FlatObject,
    registry: ReferenceRegistry,
    force_context: ForceContext,
) -> GraspReport:
    """Feasibility verdict and predicted force for a candidate object.

    Cylinders are feasible inside the registry's closed diameter
    envelope; flat objects are treated as pinch grasps with the predicted
    force capped at the registry pinch maximum.
    """
    force = static_tip_force(
        force_context.tendon,
        force_context.geometry,
        force_context.finger,
        force_context.theta1,
        force_context.tension,
    )
    if isinstance(obj, CylinderObject):
        if obj.diameter_mm <= 0.0:
            raise ValueError("cylinder diameter must be > 0")
        lo = registry.value("grasp_diameter_min_mm")
        hi = registry.value("grasp_diameter_max_mm")
        feasible = lo <= obj.diameter_mm <= hi
        margin = min(obj.diameter_mm - lo, hi - obj.diameter_mm)
        if feasible:
            return GraspReport(
                grasp_type="cylindrical",
                feasible=True,
                predicted_force=force,
                margin=margin,
                notes=f"diameter inside [{lo:.9g}, {hi:.9g}] mm envelope",
            )
        return GraspReport(
            grasp_type="infeasible",
            feasible=False,
            predicted_force=0.0,
            margin=margin,
            notes=f"diameter outside [{lo:.9g}, {hi:.9g}] mm envelope",
        )
    if isinstance(obj, FlatObject):
        if obj.thickness_mm <= 0.0:
            raise ValueError("flat-object thickness must be > 0")
        cap = registry.value("pinch_force_max_n")
        capped = min(force, cap)
        notes = "pinch grasp"
        if force > cap:
            notes += f"; force capped at registry maximum {cap:.9g} N"
        return GraspReport(
            grasp_type="pinch",
            feasible=True,
            predicted_force=capped,
            margin=(cap - capped) / cap,
            notes=notes,
        )
    raise TypeError(f"unsupported grasp object: {type(obj).__name__}")
