"""CSV and JSON rendering of trajectories and drift summaries."""
from __future__ import annotations

import json
import math
from dataclasses import asdict
from typing import Any, Optional, Sequence

from .discrete import Trajectory, TrajectorySample

CSV_COLUMNS = ("n", "t", "x", "y", "r", "phi", "dt", "L_z", "E", "A_x", "A_y", "orbit_residual")
ESCAPE_MARKER = "# escape"


def fmt(x: Optional[float]) -> str:
    """17 significant digits: enough for every binary64 value to round-trip."""
    if x is None:
        return ""
    return f"{x:.17g}"


def sample_row(s: TrajectorySample) -> list[str]:
    return [
        str(s.n), fmt(s.t), fmt(s.r.x), fmt(s.r.y), fmt(s.radius), fmt(s.phi), fmt(s.dt),
        fmt(s.inv.L_z), fmt(s.inv.E), fmt(s.inv.A.x), fmt(s.inv.A.y), fmt(s.orbit_residual),
    ]


def drift_summary(samples: Sequence[TrajectorySample]) -> dict[str, float]:
    i0 = samples[0].inv
    L0 = abs(i0.L_z)
    return {
        "max_drift_L": max(abs(s.inv.L_z - i0.L_z) for s in samples) / L0,
        "max_drift_E": max(abs(s.inv.E - i0.E) for s in samples) / max(1.0, abs(i0.E)),
        "max_drift_A": max((s.inv.A - i0.A).norm() for s in samples) / max(1.0, i0.A.norm()),
        "max_orbit_residual": max(s.orbit_residual for s in samples),
    }


def trajectory_csv(traj: Trajectory) -> str:
    if not traj.samples:
        raise ValueError("cannot render an empty trajectory")
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(sample_row(s)) for s in traj.samples]
    if traj.escaped:
        lines.append(f"{ESCAPE_MARKER}: {traj.escape_reason}")
    return "\n".join(lines) + "\n"


def _finite_or_none(x: Any) -> Any:
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def trajectory_json(traj: Trajectory) -> str:
    if not traj.samples:
        raise ValueError("cannot render an empty trajectory")
    rows = [dict(zip(CSV_COLUMNS, _json_values(s))) for s in traj.samples]
    summary: dict[str, Any] = dict(drift_summary(traj.samples))
    summary["orbit_params"] = asdict(traj.orbit)
    summary["escaped"] = traj.escaped
    summary["escape_reason"] = traj.escape_reason
    return json.dumps({"samples": rows, "summary": summary}, indent=1) + "\n"


def _json_values(s: TrajectorySample) -> list[Any]:
    return [
        s.n, s.t, s.r.x, s.r.y, s.radius, s.phi, s.dt,
        s.inv.L_z, s.inv.E, s.inv.A.x, s.inv.A.y, s.orbit_residual,
    ]


def emit_report(traj: Trajectory, fmt_name: str = "csv") -> bytes:
    if fmt_name == "csv":
        return trajectory_csv(traj).encode("ascii")
    if fmt_name == "json":
        return trajectory_json(traj).encode("ascii")
    raise ValueError(f"unknown format {fmt_name!r}")


def table_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    out = [",".join(columns)]
    for row in rows:
        out.append(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(out) + "\n"


def table_json(columns: Sequence[str], rows: Sequence[Sequence[Any]], **extra: Any) -> str:
    body: dict[str, Any] = {"rows": [dict(zip(columns, map(_finite_or_none, r))) for r in rows]}
    body.update(extra)
    return json.dumps(body, indent=1) + "\n"
