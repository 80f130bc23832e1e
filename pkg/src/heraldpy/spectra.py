"""Joint spectral amplitudes of frequency-anti-correlated photon pairs.

A pair state is fully described by one complex function ``phi(x)`` of the
photon-1 detuning ``x`` (photon 2 sits at ``-x``), stored here in bandwidth
units with the normalization ``int |phi(x)|^2 dx = R`` (BW scaled to 1).

Each :class:`JointSpectrum` keeps the analytic shape it was built from so it
can be re-sampled on finer grids; the stored ``samples`` are on its working
grid and satisfy the rate normalization there exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ContractViolation, IngestionError, InvalidParameterError
from .numerics import FrequencyGrid, integrate

__all__ = [
    "JointSpectrum",
    "SpectralModulator",
    "MODELS",
    "make_rectangular",
    "make_gaussian",
    "make_lorentzian",
    "make_frequency_bin",
    "make_tabulated",
    "apply_modulator",
    "read_table_csv",
    "spectrum_from_csv",
]

RECTANGULAR = "rectangular"
GAUSSIAN = "gaussian"
LORENTZIAN = "lorentzian"
FREQUENCY_BIN = "frequency-bin"
TABULATED = "tabulated"
MODELS = (RECTANGULAR, GAUSSIAN, LORENTZIAN, FREQUENCY_BIN, TABULATED)

PHOTONS = ("photon1", "photon2")
ARMS = ("trigger", "signal")

DEFAULT_N = 2001
LN2 = np.log(2.0)


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    """Sampled joint spectral amplitude ``phi(x)`` and its generating shape.

    Attributes
    ----------
    model : str
        One of :data:`MODELS`.
    params : dict
        Model parameters, JSON-serializable.
    grid : FrequencyGrid
        Working grid; spans the model's support window.
    samples : ndarray of complex
        ``phi`` on ``grid``.
    rate : float
        Pair rate ``R``; a pure scale.
    center_frequencies : tuple of str
        Symbolic carrier labels, never sampled.
    """

    model: str
    params: dict
    grid: FrequencyGrid
    samples: np.ndarray
    rate: float = 1.0
    center_frequencies: tuple[str, str] = ("omega_10", "omega_20")
    shape: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    scale: float = 1.0

    @property
    def support(self) -> tuple[float, float]:
        return self.grid.x_min, self.grid.x_max

    def amplitude(self, x) -> np.ndarray:
        """``phi`` evaluated at arbitrary detunings, zero outside the support."""
        x = np.asarray(x, dtype=np.float64)
        if self.shape is None:
            re = np.interp(x, self.grid.points, self.samples.real, left=0.0, right=0.0)
            im = np.interp(x, self.grid.points, self.samples.imag, left=0.0, right=0.0)
            return re + 1j * im
        return self.scale * self.shape(x)

    def on_grid(self, grid: FrequencyGrid) -> "JointSpectrum":
        """Same spectrum sampled on ``grid`` and renormalized there.

        The renormalization keeps the ratio ``int |phi|^2 dx / R`` equal to
        its value on the original grid, so modulated spectra keep their
        efficiency.
        """
        phi = self.amplitude(grid.points)
        target = self.mass()
        got = integrate(np.abs(phi) ** 2, grid)
        if got <= 0.0:
            raise InvalidParameterError("spectrum vanishes on the requested grid")
        k = np.sqrt(target / got)
        return replace(self, grid=grid, samples=phi * k, scale=self.scale * k)

    def refined(self, n_points: int) -> "JointSpectrum":
        if n_points == self.grid.n_points:
            return self
        return self.on_grid(FrequencyGrid(n_points, self.grid.x_min, self.grid.x_max, self.grid.rule))

    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def mass(self) -> float:
        """``int |phi(x)|^2 dx``; equals ``R`` for an unmodulated spectrum."""
        return integrate(self.intensity(), self.grid)

    def describe(self) -> dict:
        return {
            "model": self.model,
            "params": self.params,
            "rate": self.rate,
            "grid": self.grid.to_dict(),
            "center_frequencies": list(self.center_frequencies),
        }


def _check_rate(rate: float) -> float:
    rate = float(rate)
    if not np.isfinite(rate) or rate <= 0.0:
        raise InvalidParameterError(f"pair rate R must be positive, got {rate}")
    return rate


def _build(model, params, grid, shape, rate, centers=("omega_10", "omega_20")) -> JointSpectrum:
    raw = np.asarray(shape(grid.points), dtype=np.complex128)
    mass = integrate(np.abs(raw) ** 2, grid)
    if not np.isfinite(mass) or mass <= 0.0:
        raise InvalidParameterError("spectrum has zero or non-finite norm; cannot normalize to R")
    scale = float(np.sqrt(rate / mass))
    return JointSpectrum(
        model=model,
        params=params,
        grid=grid,
        samples=raw * scale,
        rate=rate,
        center_frequencies=centers,
        shape=shape,
        scale=scale,
    )


def make_rectangular(rate: float = 1.0, n_points: int = DEFAULT_N) -> JointSpectrum:
    """Flat spectrum of unit width, ``phi = sqrt(R)`` on ``|x| <= 1/2``.

    The working grid ends exactly on the band edges.
    """
    rate = _check_rate(rate)

    def shape(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(np.abs(x) <= 0.5, 1.0 + 0.0j, 0.0j)

    return _build(RECTANGULAR, {}, FrequencyGrid.symmetric(0.5, n_points), shape, rate)


def make_gaussian(rate: float = 1.0, half_width: float = 4.0, n_points: int = DEFAULT_N) -> JointSpectrum:
    """Gaussian amplitude whose intensity has unit FWHM in ``x``."""
    rate = _check_rate(rate)

    def shape(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(np.abs(x) <= half_width, np.exp(-2.0 * LN2 * x * x), 0.0) + 0.0j

    return _build(
        GAUSSIAN, {"half_width": half_width}, FrequencyGrid.symmetric(half_width, n_points), shape, rate
    )


def make_lorentzian(
    rate: float = 1.0,
    direction: str = "photon1",
    half_width: float = 40.0,
    n_points: int = DEFAULT_N,
) -> JointSpectrum:
    """Complex Lorentzian amplitude with unit intensity FWHM.

    ``direction="photon1"`` gives ``phi ~ 1/(1/2 - i x)``, whose transform is
    ``exp(-pi u)`` for ``u > 0``: photon 1, heralded by photon 2, decays
    exponentially. ``"photon2"`` conjugates the imaginary part so the decay
    appears on photon 2 instead.

    The amplitude is truncated to ``|x| <= half_width`` and normalized on that
    window; the truncated function is the model.
    """
    rate = _check_rate(rate)
    if direction not in PHOTONS:
        raise InvalidParameterError(f"direction must be one of {PHOTONS}, got {direction!r}")
    sign = -1.0 if direction == "photon1" else 1.0

    def shape(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(np.abs(x) <= half_width, 1.0 / (0.5 + sign * 1j * x), 0.0j)

    return _build(
        LORENTZIAN,
        {"direction": direction, "half_width": half_width},
        FrequencyGrid.symmetric(half_width, n_points),
        shape,
        rate,
    )


def make_frequency_bin(
    delta: float,
    theta: float = 0.0,
    bin_width: float | None = None,
    rate: float = 1.0,
    n_points: int = DEFAULT_N,
) -> JointSpectrum:
    """Two narrow Gaussian bins at photon-1 detunings ``0`` and ``delta``.

    ``phi(x) = g(x - delta) + exp(i theta) g(x)`` where ``|g|^2`` is a
    Gaussian of standard deviation ``bin_width`` (default ``delta/20``).
    Photon 2's centre is relabelled ``omega_20'`` so both branches keep the
    anti-correlated form.
    """
    rate = _check_rate(rate)
    delta = float(delta)
    if not np.isfinite(delta) or delta <= 0.0:
        raise InvalidParameterError(f"bin separation delta must be positive, got {delta}")
    sigma = delta / 20.0 if bin_width is None else float(bin_width)
    if not sigma > 0.0 or sigma > delta / 10.0:
        raise InvalidParameterError(f"bin_width must satisfy 0 < bin_width <= delta/10, got {sigma}")
    phase = np.exp(1j * float(theta))
    lo, hi = -8.0 * sigma, delta + 8.0 * sigma

    def shape(x):
        x = np.asarray(x, dtype=np.float64)
        g0 = np.exp(-(x * x) / (4.0 * sigma * sigma))
        g1 = np.exp(-((x - delta) ** 2) / (4.0 * sigma * sigma))
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, g1 + phase * g0, 0.0j)

    params = {"delta": delta, "theta": float(theta), "bin_width": sigma}
    return _build(
        FREQUENCY_BIN, params, FrequencyGrid(n_points, lo, hi), shape, rate, ("omega_10", "omega_20'")
    )


def _validate_table(x, values, what: str) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    values = np.asarray(values)
    if x.ndim != 1 or values.shape != x.shape:
        raise InvalidParameterError(f"{what}: x and values must be 1-D arrays of equal length")
    if x.size < 3:
        raise InvalidParameterError(f"{what}: need at least 3 points, got {x.size}")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(values)):
        raise InvalidParameterError(f"{what}: table contains NaN or infinite entries")
    if not np.all(np.diff(x) > 0):
        raise InvalidParameterError(f"{what}: x must be strictly increasing")
    return x, values


def _interp_complex(xq, xt, vt):
    re = np.interp(xq, xt, vt.real, left=0.0, right=0.0)
    im = np.interp(xq, xt, vt.imag, left=0.0, right=0.0)
    return re + 1j * im


def make_tabulated(x, phi, rate: float = 1.0, n_points: int = DEFAULT_N) -> JointSpectrum:
    """User-supplied amplitude, linearly interpolated onto a uniform grid.

    The working grid spans ``[x[0], x[-1]]``; the result is renormalized to
    ``rate``.
    """
    rate = _check_rate(rate)
    xt, vt = _validate_table(x, phi, "tabulated spectrum")
    vt = vt.astype(np.complex128)

    def shape(xq):
        return _interp_complex(np.asarray(xq, dtype=np.float64), xt, vt)

    grid = FrequencyGrid(n_points, float(xt[0]), float(xt[-1]))
    return _build(TABULATED, {"n_table": int(xt.size)}, grid, shape, rate)


# ---------------------------------------------------------------------------
# modulators
# ---------------------------------------------------------------------------

MOD_KINDS = ("unity", "linear-phase", "quad-phase", "mask", "tabulated")


@dataclass(frozen=True, eq=False)
class SpectralModulator:
    """Passive transfer function ``M(y)`` on one photon path.

    ``y`` is the detuning of the photon the element sits on, in bandwidth
    units. ``arm`` is relative to the heralding setup: ``"trigger"`` is the
    detected photon's path, ``"signal"`` the heralded photon's.
    """

    kind: str
    arm: str = "trigger"
    delay: float = 0.0
    beta: float = 0.0
    table_x: np.ndarray | None = field(default=None, repr=False)
    table_m: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in MOD_KINDS:
            raise InvalidParameterError(f"unknown modulator kind {self.kind!r}")
        if self.arm not in ARMS:
            raise InvalidParameterError(f"arm must be one of {ARMS}, got {self.arm!r}")
        if self.table_m is not None and np.max(np.abs(self.table_m)) > 1.0 + 1e-12:
            raise InvalidParameterError("modulator must be passive: |M| <= 1")

    @classmethod
    def unity(cls, arm: str = "trigger") -> "SpectralModulator":
        return cls("unity", arm)

    @classmethod
    def linear_phase(cls, delay: float, arm: str = "trigger") -> "SpectralModulator":
        """Pure delay ``delay`` (in ``1/BW``) of the photon on ``arm``: ``M(y) = exp(2 pi i y T)``."""
        return cls("linear-phase", arm, delay=float(delay))

    @classmethod
    def quadratic_phase(cls, beta: float, arm: str = "trigger") -> "SpectralModulator":
        """Group-delay dispersion ``M(y) = exp(i beta y^2)``."""
        return cls("quad-phase", arm, beta=float(beta))

    @classmethod
    def amplitude_mask(cls, x, m, arm: str = "trigger") -> "SpectralModulator":
        xt, mt = _validate_table(x, m, "amplitude mask")
        if np.iscomplexobj(mt) or np.any(mt < 0):
            raise InvalidParameterError("amplitude mask must be real and non-negative")
        return cls("mask", arm, table_x=xt, table_m=mt.astype(np.float64))

    @classmethod
    def tabulated(cls, x, m, arm: str = "trigger") -> "SpectralModulator":
        xt, mt = _validate_table(x, m, "tabulated modulator")
        return cls("tabulated", arm, table_x=xt, table_m=mt.astype(np.complex128))

    @property
    def is_pure_phase(self) -> bool:
        return self.kind in ("unity", "linear-phase", "quad-phase")

    def transfer(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if self.kind == "unity":
            return np.ones(y.shape, dtype=np.complex128)
        if self.kind == "linear-phase":
            return np.exp(2j * np.pi * self.delay * y)
        if self.kind == "quad-phase":
            return np.exp(1j * self.beta * y * y)
        return _interp_complex(y, self.table_x, self.table_m.astype(np.complex128))

    def covers(self, y: np.ndarray) -> bool:
        if self.table_x is None:
            return True
        return bool(np.all((y >= self.table_x[0]) & (y <= self.table_x[-1])))

    def describe(self) -> dict:
        d = {"kind": self.kind, "arm": self.arm}
        if self.kind == "linear-phase":
            d["delay"] = self.delay
        elif self.kind == "quad-phase":
            d["beta"] = self.beta
        elif self.table_x is not None:
            d["n_table"] = int(self.table_x.size)
        return d


def modulator_sign(mod: SpectralModulator, heralded: str = "photon1") -> float:
    """+1 if ``mod`` sees photon-1 detuning ``x``, -1 if it sees ``-x``."""
    if heralded not in PHOTONS:
        raise InvalidParameterError(f"heralded photon must be one of {PHOTONS}, got {heralded!r}")
    on_photon1 = (mod.arm == "signal") == (heralded == "photon1")
    return 1.0 if on_photon1 else -1.0


def apply_modulator(
    spec: JointSpectrum, mod: SpectralModulator, heralded: str = "photon1"
) -> tuple[JointSpectrum, float]:
    """Multiply the joint spectrum by a modulator on one photon's path.

    With photon 1 heralded, a trigger-arm element acts on photon 2 and is
    evaluated at ``-x``; a signal-arm element is evaluated at ``+x``.

    Returns
    -------
    spectrum : JointSpectrum
        Modulated, not renormalized.
    efficiency : float
        Surviving fraction ``int |phi M|^2 / int |phi|^2``.
    """
    sign = modulator_sign(mod, heralded)
    x = spec.grid.points
    occupied = spec.intensity() > 1e-14 * spec.intensity().max()
    if not mod.covers(sign * x[occupied]):
        raise InvalidParameterError("modulator table does not cover the spectral support")
    new_samples = spec.samples * mod.transfer(sign * x)
    base_shape = spec.shape

    if base_shape is None:
        new_shape = None
    else:

        def new_shape(xq):
            xq = np.asarray(xq, dtype=np.float64)
            return base_shape(xq) * mod.transfer(sign * xq)

    params = dict(spec.params)
    params["modulators"] = list(spec.params.get("modulators", [])) + [
        dict(mod.describe(), heralded=heralded)
    ]
    out = replace(spec, samples=new_samples, shape=new_shape, params=params)
    eta = out.mass() / spec.mass()
    if mod.is_pure_phase:
        eta = min(eta, 1.0)
    return out, float(np.clip(eta, 0.0, 1.0))


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------


def read_table_csv(path, columns: tuple[tuple[str, ...], ...]) -> dict[str, np.ndarray]:
    """Read a header-tagged numeric CSV.

    ``columns`` lists the accepted header layouts, e.g.
    ``(("x", "re"), ("x", "re", "im"))``. Lines starting with ``#`` and blank
    lines are skipped. Errors name the file and line number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"{path}: cannot read ({exc.strerror})") from exc
    header = None
    rows: list[list[float]] = []
    for lineno, fields in enumerate(csv.reader(text.splitlines()), start=1):
        if not fields or not "".join(fields).strip() or fields[0].lstrip().startswith("#"):
            continue
        cells = [f.strip() for f in fields]
        if header is None:
            header = tuple(c.lower() for c in cells)
            if header not in columns:
                allowed = " or ".join(",".join(c) for c in columns)
                raise IngestionError(f"{path}:{lineno}: header {','.join(cells)!r} is not {allowed}")
            continue
        if len(cells) != len(header):
            raise IngestionError(f"{path}:{lineno}: expected {len(header)} columns, got {len(cells)}")
        try:
            row = [float(c) for c in cells]
        except ValueError:
            raise IngestionError(f"{path}:{lineno}: non-numeric value in {','.join(cells)!r}") from None
        if not all(np.isfinite(row)):
            raise IngestionError(f"{path}:{lineno}: non-finite value")
        rows.append(row)
    if header is None:
        raise IngestionError(f"{path}: no header line")
    if len(rows) < 3:
        raise IngestionError(f"{path}: need at least 3 data rows, got {len(rows)}")
    data = np.array(rows)
    return {name: data[:, k] for k, name in enumerate(header)}


def spectrum_from_csv(path, rate: float = 1.0, n_points: int = DEFAULT_N) -> JointSpectrum:
    cols = read_table_csv(path, (("x", "re"), ("x", "re", "im")))
    phi = cols["re"] + 1j * cols.get("im", np.zeros_like(cols["re"]))
    try:
        spec = make_tabulated(cols["x"], phi, rate=rate, n_points=n_points)
    except InvalidParameterError as exc:
        raise IngestionError(f"{path}: {exc}") from exc
    params = dict(spec.params, source=str(path))
    return replace(spec, params=params)


def check_samples(spec: JointSpectrum) -> None:
    if spec.samples.shape != (spec.grid.n_points,):
        raise ContractViolation("spectrum samples do not match its grid")
