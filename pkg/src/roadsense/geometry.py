"""Core geometric types: radar detections, point clouds and SE(3) poses.

Conventions used throughout the package:

* positions are float64 3-vectors in meters,
* quaternions are stored in (x, y, z, w) order and kept unit-norm,
* the map frame is a local planar east-north-up frame; its geodetic origin
  is carried as opaque metadata and never converted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.transform import Rotation

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class RadarPoint:
    """A single radar detection in the sensor frame.

    ``radial_velocity`` is signed, positive for targets moving away from
    the sensor.  ``rcs`` (dBsm) is optional because not every radar model
    reports it.
    """

    position: tuple[float, float, float]
    radial_velocity: float = 0.0
    timestamp_ns: int = 0
    rcs: float | None = None


@dataclass(frozen=True)
class PointCloud:
    """An ordered set of points sharing one coordinate frame.

    Stored as parallel arrays for speed; ``rcs`` is ``None`` when the
    source does not provide it (e.g. laser-scan points).
    """

    positions: FloatArray
    radial_velocities: FloatArray
    timestamps_ns: IntArray
    frame_id: str = "sensor"
    rcs: FloatArray | None = None

    def __post_init__(self) -> None:
        pos = np.ascontiguousarray(np.asarray(self.positions, dtype=np.float64))
        if pos.size == 0:
            pos = pos.reshape(0, 3)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError(f"positions must have shape (N, 3), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        vel = np.asarray(self.radial_velocities, dtype=np.float64).reshape(-1)
        ts = np.asarray(self.timestamps_ns, dtype=np.int64).reshape(-1)
        n = pos.shape[0]
        if vel.shape[0] != n or ts.shape[0] != n:
            raise ValueError("per-point arrays must all have length N")
        object.__setattr__(self, "positions", _frozen(pos))
        object.__setattr__(self, "radial_velocities", _frozen(vel))
        object.__setattr__(self, "timestamps_ns", _frozen(ts))
        if self.rcs is not None:
            rcs = np.asarray(self.rcs, dtype=np.float64).reshape(-1)
            if rcs.shape[0] != n:
                raise ValueError("rcs array must have length N")
            object.__setattr__(self, "rcs", _frozen(rcs))

    def __len__(self) -> int:
        return self.positions.shape[0]

    @classmethod
    def empty(cls, frame_id: str = "sensor") -> "PointCloud":
        return cls(np.zeros((0, 3)), np.zeros(0), np.zeros(0, dtype=np.int64), frame_id)

    @classmethod
    def from_xyz(cls, positions: np.ndarray, frame_id: str = "map") -> "PointCloud":
        """Cloud of bare 3-vectors (zero velocity and timestamp)."""
        pos = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
        n = pos.shape[0]
        return cls(pos, np.zeros(n), np.zeros(n, dtype=np.int64), frame_id)

    @classmethod
    def from_points(cls, points: list[RadarPoint], frame_id: str = "sensor") -> "PointCloud":
        if not points:
            return cls.empty(frame_id)
        pos = np.array([p.position for p in points], dtype=np.float64)
        vel = np.array([p.radial_velocity for p in points], dtype=np.float64)
        ts = np.array([p.timestamp_ns for p in points], dtype=np.int64)
        rcs = None
        if all(p.rcs is not None for p in points):
            rcs = np.array([p.rcs for p in points], dtype=np.float64)
        return cls(pos, vel, ts, frame_id, rcs)

    def point(self, i: int) -> RadarPoint:
        return RadarPoint(
            tuple(self.positions[i]),
            float(self.radial_velocities[i]),
            int(self.timestamps_ns[i]),
            float(self.rcs[i]) if self.rcs is not None else None,
        )

    def select(self, index: np.ndarray) -> "PointCloud":
        """Subset by boolean mask or integer index array (order preserving)."""
        return PointCloud(
            self.positions[index],
            self.radial_velocities[index],
            self.timestamps_ns[index],
            self.frame_id,
            self.rcs[index] if self.rcs is not None else None,
        )

    def with_positions(self, positions: np.ndarray, frame_id: str | None = None) -> "PointCloud":
        return PointCloud(
            positions,
            self.radial_velocities,
            self.timestamps_ns,
            self.frame_id if frame_id is None else frame_id,
            self.rcs,
        )


def concat_clouds(clouds: list[PointCloud], frame_id: str | None = None) -> PointCloud:
    if not clouds:
        return PointCloud.empty(frame_id or "sensor")
    fid = frame_id or clouds[0].frame_id
    rcs = None
    if all(c.rcs is not None for c in clouds):
        rcs = np.concatenate([c.rcs for c in clouds])
    return PointCloud(
        np.concatenate([c.positions for c in clouds]),
        np.concatenate([c.radial_velocities for c in clouds]),
        np.concatenate([c.timestamps_ns for c in clouds]),
        fid,
        rcs,
    )


# --- quaternion helpers (x, y, z, w order) ---------------------------------


def quat_normalize(q: np.ndarray) -> FloatArray:
    q = np.asarray(q, dtype=np.float64).reshape(4)
    n = float(np.linalg.norm(q))
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("quaternion norm must be positive and finite")
    return q / n


def quat_multiply(q1: np.ndarray, q2: np.ndarray) -> FloatArray:
    """Hamilton product q1 * q2 for (x, y, z, w) quaternions."""
    x1, y1, z1, w1 = q1
    x2, y2, z2, w2 = q2
    return np.array(
        [
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        ]
    )


def quat_conjugate(q: np.ndarray) -> FloatArray:
    return np.array([-q[0], -q[1], -q[2], q[3]])


def quat_from_yaw_deg(yaw_deg: float) -> FloatArray:
    half = np.deg2rad(yaw_deg) / 2.0
    return np.array([0.0, 0.0, np.sin(half), np.cos(half)])


def quat_angle_deg(q: np.ndarray) -> float:
    """Rotation angle of a unit quaternion, in degrees, in [0, 180]."""
    w = min(1.0, abs(float(q[3])))
    return float(np.degrees(2.0 * np.arccos(w)))


@dataclass(frozen=True)
class Pose:
    """Rigid transform in SE(3): ``p_out = R(quaternion) @ p_in + translation``."""

    translation: FloatArray
    quaternion: FloatArray  # (x, y, z, w), unit norm

    def __post_init__(self) -> None:
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if not np.all(np.isfinite(t)):
            raise ValueError("translation must be finite")
        q = quat_normalize(self.quaternion)
        object.__setattr__(self, "translation", _frozen(t))
        object.__setattr__(self, "quaternion", _frozen(q))

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]))

    @classmethod
    def from_parts(cls, x: float, y: float, z: float, qx: float, qy: float, qz: float, qw: float) -> "Pose":
        return cls(np.array([x, y, z]), np.array([qx, qy, qz, qw]))

    @classmethod
    def from_matrix(cls, rotation: np.ndarray, translation: np.ndarray) -> "Pose":
        q = Rotation.from_matrix(np.asarray(rotation, dtype=np.float64)).as_quat()
        return cls(np.asarray(translation, dtype=np.float64), q)

    @classmethod
    def from_xy_yaw(cls, x: float, y: float, z: float = 0.0, yaw_deg: float = 0.0) -> "Pose":
        return cls(np.array([x, y, z]), quat_from_yaw_deg(yaw_deg))

    @cached_property
    def rotation_matrix(self) -> FloatArray:
        return _frozen(Rotation.from_quat(self.quaternion).as_matrix())

    def as_vector(self) -> FloatArray:
        """7-vector [x, y, z, qx, qy, qz, qw]."""
        return np.concatenate([self.translation, self.quaternion])

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "Pose":
        v = np.asarray(v, dtype=np.float64).reshape(7)
        return cls(v[:3], v[3:])

    def yaw_deg(self) -> float:
        return float(Rotation.from_quat(self.quaternion).as_euler("ZYX", degrees=True)[0])


def compose(a: Pose, b: Pose) -> Pose:
    """Pose applying ``b`` first, then ``a``."""
    q = quat_normalize(quat_multiply(a.quaternion, b.quaternion))
    t = a.rotation_matrix @ b.translation + a.translation
    return Pose(t, q)


def invert(a: Pose) -> Pose:
    q_inv = quat_conjugate(a.quaternion)
    t_inv = -(a.rotation_matrix.T @ a.translation)
    return Pose(t_inv, q_inv)


def transform_points(pose: Pose, positions: np.ndarray) -> FloatArray:
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    return pos @ pose.rotation_matrix.T + pose.translation


def transform_cloud(pose: Pose, cloud: PointCloud, frame_id: str | None = None) -> PointCloud:
    """Apply a rigid transform to every position; velocities, timestamps and
    rcs are carried over unchanged."""
    return cloud.with_positions(transform_points(pose, cloud.positions), frame_id)


def pose_delta(a: Pose, b: Pose) -> tuple[float, float]:
    """(translation distance m, rotation angle deg) between two poses."""
    d = compose(invert(a), b)
    return float(np.linalg.norm(d.translation)), quat_angle_deg(d.quaternion)


# --- text file format -------------------------------------------------------
#
# One point per line: x,y,z,radial_velocity,timestamp_ns[,rcs]
# '#'-prefixed header lines carry metadata; floats are written with
# shortest-round-trip repr so a read-back is bit exact.


def _format_point_rows(cloud: PointCloud) -> list[str]:
    rows = []
    has_rcs = cloud.rcs is not None
    for i in range(len(cloud)):
        x, y, z = cloud.positions[i]
        row = f"{x!r},{y!r},{z!r},{cloud.radial_velocities[i]!r},{cloud.timestamps_ns[i]}"
        if has_rcs:
            row += f",{cloud.rcs[i]!r}"
        rows.append(row)
    return rows


def save_cloud(cloud: PointCloud, path: str | Path) -> None:
    lines = [f"# frame_id={cloud.frame_id}"]
    lines.extend(_format_point_rows(cloud))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_point_rows(rows: list[str], frame_id: str) -> PointCloud:
    if not rows:
        return PointCloud.empty(frame_id)
    pos = np.empty((len(rows), 3))
    vel = np.empty(len(rows))
    ts = np.empty(len(rows), dtype=np.int64)
    rcs_vals: list[float] = []
    for i, row in enumerate(rows):
        parts = row.split(",")
        pos[i] = (float(parts[0]), float(parts[1]), float(parts[2]))
        vel[i] = float(parts[3])
        ts[i] = int(parts[4])
        if len(parts) > 5:
            rcs_vals.append(float(parts[5]))
    rcs = np.array(rcs_vals) if len(rcs_vals) == len(rows) else None
    return PointCloud(pos, vel, ts, frame_id, rcs)


def load_cloud(path: str | Path) -> PointCloud:
    frame_id = "sensor"
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "frame_id=" in line:
                frame_id = line.split("frame_id=", 1)[1].strip()
            continue
        rows.append(line)
    return _parse_point_rows(rows, frame_id)


def save_frames(frames: list[PointCloud], path: str | Path) -> None:
    """Write a frame sequence (one sensor) as consecutive cloud blocks."""
    lines = []
    if frames:
        lines.append(f"# frame_id={frames[0].frame_id}")
    for k, frame in enumerate(frames):
        lines.append(f"# frame_index={k}")
        lines.extend(_format_point_rows(frame))
    Path(path).write_text("\n".join(lines) + "\n")


def load_frames(path: str | Path) -> list[PointCloud]:
    frame_id = "sensor"
    frames: list[PointCloud] = []
    rows: list[str] = []
    started = False
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "frame_id=" in line:
                frame_id = line.split("frame_id=", 1)[1].strip()
            elif "frame_index=" in line:
                if started:
                    frames.append(_parse_point_rows(rows, frame_id))
                rows = []
                started = True
            continue
        rows.append(line)
    if started:
        frames.append(_parse_point_rows(rows, frame_id))
    return frames
