from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence
import numpy as np
from .constants import FLOAT_FORMAT, MESH_HEADER, TRAJECTORY_HEADER
from .integrator import Trajectory
from .surfaces import SurfaceMesh


class IoUtils:

    @staticmethod
    def format_float(value: float) -> str:
        """Format a number with 17 significant digits

        :param value: number
        :return: text that parses back to the same double
        """

        return FLOAT_FORMAT.format(float(value))

    @staticmethod
    def format_cell(value: Any) -> str:
        if isinstance(value, enum.Enum):
            return value.name
        if isinstance(value, (bool, np.bool_)):
            return str(bool(value)).lower()
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return IoUtils.format_float(value)
        return str(value)

    @staticmethod
    def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Write a CSV file, formatting floats with 17 significant digits

        :param path: output file
        :param header: column names
        :param rows: rows of values
        :return: path written
        """

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        with path.open('w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([IoUtils.format_cell(value) for value in row])
        return path

    @staticmethod
    def json_default(value: Any) -> Any:
        if isinstance(value, enum.Enum):
            return value.name
        if isinstance(value, np.ndarray):
            return value.tolist()
        if isinstance(value, np.bool_):
            return bool(value)
        if isinstance(value, np.integer):
            return int(value)
        if isinstance(value, np.floating):
            return float(value)
        if isinstance(value, Path):
            return str(value)
        if hasattr(value, 'as_dict'):
            return value.as_dict()
        raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")

    @staticmethod
    def sanitize(value: Any) -> Any:
        """Replace non-finite floats with strings so that reports stay valid JSON"""

        if isinstance(value, dict):
            return {key: IoUtils.sanitize(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [IoUtils.sanitize(item) for item in value]
        if isinstance(value, (float, np.floating)) and not math.isfinite(value):
            return str(float(value))
        return value

    @staticmethod
    def write_json(path: str | Path, report: dict) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        with path.open('w', encoding='utf-8') as f:
            json.dump(IoUtils.sanitize(report), f, indent=2, sort_keys=True, default=IoUtils.json_default)
            f.write('\n')
        return path

    @staticmethod
    def trajectory_rows(traj: Trajectory) -> list[list[float]]:
        """Rows of the trajectory CSV: state, Cartesian position, integrals and relative drift

        :param traj: trajectory
        :return: rows matching TRAJECTORY_HEADER
        """

        reldrift = traj.relative_drift()
        rows = []

        for i, (t, y) in enumerate(zip(traj.times, traj.states)):
            r, theta = y[0], y[1]
            rows.append([t, *y, r * math.cos(theta), r * math.sin(theta), *traj.integral_history[i], reldrift[i]])
        return rows

    @staticmethod
    def mesh_rows(mesh: SurfaceMesh) -> list[list[Any]]:
        return [[r, theta, z, branch.name] for (r, theta, z), branch in zip(mesh.points(), mesh.branch)]

    @staticmethod
    def write_trajectory(path: str | Path, traj: Trajectory) -> Path:
        return IoUtils.write_csv(path, TRAJECTORY_HEADER, IoUtils.trajectory_rows(traj))

    @staticmethod
    def write_mesh(path: str | Path, mesh: SurfaceMesh) -> Path:
        return IoUtils.write_csv(path, MESH_HEADER, IoUtils.mesh_rows(mesh))

    @staticmethod
    def trajectory_script(data_file: str) -> str:
        """Gnuplot script drawing the 3D trajectory next to its Oxy projection

        :param data_file: trajectory CSV file name, relative to the script
        :return: script text
        """

        return '\n'.join([
            "set datafile separator ','",
            "set key autotitle columnhead",
            "set multiplot layout 1,2 title 'Trajectory and its Oxy projection'",
            "set xlabel 'x'",
            "set ylabel 'y'",
            "set zlabel 'z'",
            f"splot '{data_file}' using 7:8:4 with lines notitle",
            "set size ratio -1",
            f"plot '{data_file}' using 7:8 with lines notitle",
            "unset multiplot",
            "pause mouse close",
            '',
        ])

    @staticmethod
    def mesh_script(data_file: str) -> str:
        """Gnuplot script drawing a surface mesh as a point cloud"""

        return '\n'.join([
            "set datafile separator ','",
            "set xlabel 'x'",
            "set ylabel 'y'",
            "set zlabel 'z'",
            "set view equal xyz",
            f"splot '{data_file}' every ::1 using ($1*cos($2)):($1*sin($2)):3 with points pointtype 7 pointsize 0.3 notitle",
            "pause mouse close",
            '',
        ])

    @staticmethod
    def write_text(path: str | Path, text: str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        return path
