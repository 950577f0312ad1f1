"""Node placement and separation distances."""

import math
from dataclasses import dataclass

from uav_coverage.core.exceptions import DegenerateGeometryError, DomainError

MICRO_BS_HEIGHT_M = 10.0
MACRO_BS_HEIGHT_M = 20.0
USER_HEIGHT_M = 1.5
MICRO_CELL_HALF_WIDTH_M = 100.0  # 200x200 m micro cell, user at the horizontal edge
MACRO_CELL_PITCH_M = 1000.0  # 1000x1000 m macro cell


@dataclass(frozen=True)
class Point3D:
    """Position in meters; z is the height above the ground plane."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"coordinate {name} must be finite, got {value!r}")
        if self.z < 0:
            raise DomainError(f"height must be non-negative, got z={self.z!r}")

    def translated(self, dx: float, dy: float, dz: float) -> "Point3D":
        return Point3D(self.x + dx, self.y + dy, self.z + dz)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.z]


@dataclass(frozen=True)
class NodeLayout:
    """Positions of the nodes entering the link budgets."""

    macro_bs: Point3D
    micro_bs: Point3D
    uav_or_irs: Point3D
    user: Point3D


def distance(a: Point3D, b: Point3D) -> float:
    """Euclidean separation between two nodes."""
    return math.hypot(a.x - b.x, a.y - b.y, a.z - b.z)


def cascade_distances(layout: NodeLayout) -> tuple[float, float]:
    """Return (BS->IRS, IRS->user) separations of the reflected path."""
    d1 = distance(layout.micro_bs, layout.uav_or_irs)
    d2 = distance(layout.uav_or_irs, layout.user)
    if d1 == 0:
        raise DegenerateGeometryError("micro_bs", "uav_or_irs")
    if d2 == 0:
        raise DegenerateGeometryError("uav_or_irs", "user")
    return d1, d2


def default_layout(
    uav_altitude_m: float,
    user_offset_m: float = MICRO_CELL_HALF_WIDTH_M,
    user_height_m: float = USER_HEIGHT_M,
) -> NodeLayout:
    """
    Layout used when a scenario gives no coordinates.

    The UAV (or the IRS it carries) hovers above the micro-cell center, the user stands
    at the horizontal cell edge and the macro BS sits one macro-cell pitch away from
    the user.
    """
    return NodeLayout(
        macro_bs=Point3D(user_offset_m - MACRO_CELL_PITCH_M, 0.0, MACRO_BS_HEIGHT_M),
        micro_bs=Point3D(0.0, 0.0, MICRO_BS_HEIGHT_M),
        uav_or_irs=Point3D(0.0, 0.0, float(uav_altitude_m)),
        user=Point3D(user_offset_m, 0.0, user_height_m),
    )
