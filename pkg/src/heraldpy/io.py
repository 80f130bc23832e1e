"""CSV/JSON exports for density matrices, waveforms and purity curves.

Floats are written with 9 significant digits so repeated runs produce
byte-identical files. All writes go through a temp file and ``os.replace``.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import IngestionError
from .heralding import HeraldedDensityMatrix
from .numerics import FrequencyGrid
from .waveform import TemporalWaveform


def fmt(v: float) -> str:
    v = float(v)
    if v == 0.0:
        return "0"
    return f"{v:.9g}"


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _rows(header: list[str], columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def dumps_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# density matrices -----------------------------------------------------------


def density_to_csv(rho: HeraldedDensityMatrix) -> str:
    """Row-major ``re,im`` pairs, one matrix element per line."""
    flat = rho.elements.ravel(order="C")
    return _rows(["re", "im"], (flat.real, flat.imag))


def density_from_csv(path, grid: FrequencyGrid) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "re,im":
        raise IngestionError(f"{path}:1: expected header 're,im'")
    n = grid.n_points
    if len(lines) - 1 != n * n:
        raise IngestionError(f"{path}: expected {n * n} elements, got {len(lines) - 1}")
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    return (data[:, 0] + 1j * data[:, 1]).reshape(n, n)


def density_to_json(rho: HeraldedDensityMatrix) -> dict:
    return {
        "s": rho.s,
        "source": rho.source,
        "grid": rho.grid.to_dict(),
        "matrix": {
            "re": [[float(v) for v in row] for row in rho.elements.real],
            "im": [[float(v) for v in row] for row in rho.elements.imag],
        },
    }


# waveforms ------------------------------------------------------------------


def waveform_to_csv(wf: TemporalWaveform, bw_hz: float | None = None) -> str:
    u = wf.grid.points
    if bw_hz:
        return _rows(["t_s", "re", "im", "abs2"], (u / bw_hz, wf.amplitude.real, wf.amplitude.imag, wf.intensity()))
    return _rows(["u", "re", "im", "abs2"], (u, wf.amplitude.real, wf.amplitude.imag, wf.intensity()))


def waveform_to_json(wf: TemporalWaveform) -> dict:
    d = wf.describe()
    d["amplitude"] = {"re": [float(v) for v in wf.amplitude.real], "im": [float(v) for v in wf.amplitude.imag]}
    return d


# purity curves --------------------------------------------------------------


def curve_to_csv(s_values, gamma, bw_hz: float | None = None) -> str:
    s_values = np.asarray(s_values)
    if bw_hz:
        return _rows(["dt_s", "gamma"], (s_values / bw_hz, gamma))
    return _rows(["s", "gamma"], (s_values, gamma))
