"""Contact-force, clearance, and stroke checks for the dressing-assist task.

The numeric limits come from the reference registry; these functions only
encode the comparisons, so fuzz tests can re-derive every verdict with
inline arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .registry import ReferenceRegistry, default_registry

# body region -> registry key of the applicable quasi-static force limit
REGION_LIMIT_KEYS = {
    "thigh_knee": "iso_contact_force_limit_thigh_knee_n",
}


@dataclass(frozen=True)
class SafetyVerdict:
    passed: bool
    applied_limit: float
    measured: float
    margin_ratio: float


@dataclass(frozen=True)
class ClearanceResult:
    per_side_clearance: float
    fits: bool


@dataclass(frozen=True)
class StrokeResult:
    passed: bool
    slack: float


def iso_contact_check(
    force: float,
    region: str = "thigh_knee",
    registry: ReferenceRegistry | None = None,
) -> SafetyVerdict:
    """Quasi-static contact force check against the region's limit.

    The limit is inclusive: a force exactly at the limit passes.
    ``margin_ratio`` is limit/measured (infinite for zero force).
    """
    if force < 0.0:
        raise ValueError("force must be >= 0")
    key = REGION_LIMIT_KEYS.get(region)
    if key is None:
        raise ValueError(
            f"unknown body region {region!r}; known: {sorted(REGION_LIMIT_KEYS)}"
        )
    if registry is None:
        registry = default_registry()
    limit = registry.value(key)
    return SafetyVerdict(
        passed=force <= limit,
        applied_limit=limit,
        measured=force,
        margin_ratio=limit / force if force > 0.0 else math.inf,
    )


def clearance_check(
    space_width: float,
    body_width: float,
    device_width: float,
) -> ClearanceResult:
    """Per-side clearance left beside a centered body, and whether the
    device fits in it.

    A body wider than the space yields a negative clearance and fits=False.
    """
    if space_width <= 0.0 or body_width <= 0.0 or device_width <= 0.0:
        raise ValueError("widths must be > 0")
    per_side = (space_width - body_width) / 2.0
    return ClearanceResult(
        per_side_clearance=per_side,
        fits=device_width <= per_side,
    )


def stroke_check(required_travel: float, available_extension: float) -> StrokeResult:
    """Whether the available extension covers the required travel."""
    if required_travel < 0.0 or available_extension < 0.0:
        raise ValueError("travel values must be >= 0")
    return StrokeResult(
        passed=available_extension >= required_travel,
        slack=available_extension - required_travel,
    )
