"""Temporal wave functions of heralded photons.

Detecting photon 2 at ``u = 0`` leaves photon 1 in

    psi(u) = R^{-1/2} int dx phi(x) exp(-2 pi i x u)

times a carrier ``exp(-i omega_10 tau)`` that is recorded as a label only.
Swapping the trigger mirrors the envelope: the photon-2 wave function is
``psi(-u)`` with carrier ``omega_20``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.signal import correlate

from .errors import ContractViolation, InvalidParameterError, NoOscillationError
from .numerics import TimeGrid, fourier_at, integrate
from .spectra import FREQUENCY_BIN, PHOTONS, JointSpectrum, SpectralModulator, apply_modulator

__all__ = [
    "TemporalWaveform",
    "default_time_grid",
    "herald_waveform",
    "herald_waveform_modulated",
    "waveform_fidelity",
    "beat_note_analysis",
    "intensity_fwhm",
]


@dataclass(frozen=True, eq=False)
class TemporalWaveform:
    """Heralded envelope ``psi(u)`` sampled on a time grid.

    ``norm`` is the full-line ``int |psi|^2 du`` obtained from the spectrum
    by Parseval, so it does not depend on how much of a slowly decaying tail
    the sampling window holds; :meth:`window_norm` gives the in-window part.
    """

    grid: TimeGrid
    amplitude: np.ndarray
    norm: float
    heralded_arm: str
    carrier: str
    efficiency: float = 1.0
    source: str = ""

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def window_norm(self) -> float:
        return integrate(self.intensity(), self.grid)

    def describe(self) -> dict:
        return {
            "heralded_arm": self.heralded_arm,
            "carrier": self.carrier,
            "norm": self.norm,
            "efficiency": self.efficiency,
            "source": self.source,
            "grid": self.grid.to_dict(),
        }


def default_time_grid(spec: JointSpectrum) -> TimeGrid:
    """``u in [-8, 8]`` with 4001 points, widened for frequency-bin states.

    Frequency-bin windows hold at least ten beat periods and the bulk of the
    bin envelope, with at least 100 samples per period.
    """
    if spec.model != FREQUENCY_BIN:
        return TimeGrid.symmetric(8.0, 4001)
    delta = spec.params["delta"]
    sigma = spec.params["bin_width"]
    half = max(10.0 / delta, 6.0 / (4.0 * np.pi * sigma))
    n = max(4001, int(np.ceil(2.0 * half * delta * 100.0)) + 1)
    if n % 2 == 0:
        n += 1
    return TimeGrid.symmetric(half, n)


def _check_arm(arm: str) -> None:
    if arm not in PHOTONS:
        raise InvalidParameterError(f"heralded arm must be one of {PHOTONS}, got {arm!r}")


def herald_waveform(
    spec: JointSpectrum,
    arm: str = "photon1",
    tgrid: TimeGrid | None = None,
    method: str = "auto",
) -> TemporalWaveform:
    """Wave function of the photon on ``arm`` heralded by its partner at ``u = 0``.

    Raises
    ------
    AliasingError
        If the spectrum grid is too coarse for ``tgrid``.
    """
    _check_arm(arm)
    if tgrid is None:
        tgrid = default_time_grid(spec)
    u = tgrid.points if arm == "photon1" else -tgrid.points
    psi = fourier_at(spec.samples, spec.grid, u, method=method) / np.sqrt(spec.rate)
    carrier = spec.center_frequencies[0 if arm == "photon1" else 1]
    return TemporalWaveform(
        grid=tgrid,
        amplitude=psi,
        norm=spec.mass() / spec.rate,
        heralded_arm=arm,
        carrier=carrier,
        source=spec.model,
    )


def herald_waveform_modulated(
    spec: JointSpectrum,
    mod,
    arm: str = "photon1",
    tgrid: TimeGrid | None = None,
    renormalize: bool = False,
    method: str = "auto",
) -> tuple[TemporalWaveform, float]:
    """Heralded wave function after one or more spectral modulators.

    ``mod`` is a :class:`SpectralModulator` or a sequence of them, applied
    in order. Trigger/signal arms are resolved relative to ``arm``.

    Returns the waveform and the heralding efficiency. Without
    ``renormalize`` the waveform keeps norm equal to the efficiency.
    """
    _check_arm(arm)
    mods = [mod] if isinstance(mod, SpectralModulator) else list(mod)
    out = spec
    for m in mods:
        out, _ = apply_modulator(out, m, heralded=arm)
    eta = float(np.clip(out.mass() / spec.mass(), 0.0, 1.0))
    if all(m.is_pure_phase for m in mods):
        eta = 1.0 if abs(eta - 1.0) < 1e-12 else eta
    wf = herald_waveform(out, arm, tgrid, method=method)
    wf = replace(wf, efficiency=eta)
    if renormalize:
        if eta <= 0.0:
            raise InvalidParameterError("modulator blocks the whole spectrum; cannot renormalize")
        wf = replace(wf, amplitude=wf.amplitude / np.sqrt(wf.norm), norm=1.0)
    return wf, eta


def waveform_fidelity(a: TemporalWaveform, b: TemporalWaveform) -> float:
    """Global-phase-invariant overlap ``|<a|b>|`` of the normalized waveforms."""
    if a.grid != b.grid:
        raise ContractViolation("waveforms are sampled on different time grids")
    na = a.window_norm()
    nb = b.window_norm()
    if not (na > 0.0 and nb > 0.0):
        raise ContractViolation("waveform with zero norm")
    ov = integrate(np.conj(a.amplitude) * b.amplitude, a.grid)
    return float(abs(ov) / np.sqrt(na * nb))


def intensity_fwhm(wf: TemporalWaveform) -> float:
    """Full width at half maximum of ``|psi|^2``, linearly interpolated."""
    u = wf.grid.points
    y = wf.intensity()
    k = int(np.argmax(y))
    half = 0.5 * y[k]
    left = k
    while left > 0 and y[left] > half:
        left -= 1
    right = k
    while right < y.size - 1 and y[right] > half:
        right += 1
    if y[left] > half or y[right] > half:
        raise InvalidParameterError("intensity does not fall to half maximum inside the window")
    ul = u[left] + (half - y[left]) * (u[left + 1] - u[left]) / (y[left + 1] - y[left])
    ur = u[right - 1] + (half - y[right - 1]) * (u[right] - u[right - 1]) / (y[right] - y[right - 1])
    return float(ur - ul)


def _first_peak(c: np.ndarray, min_height: float) -> int | None:
    """Index of the first local maximum after the first local minimum of ``c``."""
    d = np.diff(c)
    i = 0
    while i < d.size and d[i] < 0:
        i += 1
    trough = c[i]
    while i < d.size and d[i] >= 0:
        i += 1
    if i >= d.size or c[i] < min_height or c[i] - trough < 0.05:
        return None
    return i


def _parabolic(c: np.ndarray, k: int) -> float:
    y0, y1, y2 = c[k - 1], c[k], c[k + 1]
    den = y0 - 2.0 * y1 + y2
    return k + (0.5 * (y0 - y2) / den if den != 0.0 else 0.0)


def beat_note_analysis(wf: TemporalWaveform) -> tuple[float, float]:
    """Beat period of ``|psi(u)|^2`` and fringe visibility near its envelope peak.

    The period comes from the first side peak of the intensity
    autocorrelation. A first pass on the mean-removed intensity gives a rough
    period; the intensity autocorrelation is then divided by that of the
    envelope (a moving average over the rough period), which removes the
    envelope's pull on the peak, and re-peaked with parabolic interpolation.

    Raises
    ------
    NoOscillationError
        If the autocorrelation has no clear side peak.
    """
    y = wf.intensity()
    du = wf.grid.spacing
    d = y - y.mean()
    c = correlate(d, d, mode="full")[y.size - 1 :]
    if c[0] <= 0.0:
        raise NoOscillationError("waveform intensity is constant")
    c = c / c[0]
    k0 = _first_peak(c, 0.2)
    if k0 is None:
        raise NoOscillationError("no periodic beat in the intensity autocorrelation")

    # A(L) ~ Ea(L) (1 + cos(2 pi L / P) / 2), Ea the envelope autocorrelation
    env = uniform_filter1d(y, size=max(3, 2 * (k0 // 2) + 1), mode="constant")
    a = correlate(y, y, mode="full")[y.size - 1 :]
    b = correlate(env, env, mode="full")[y.size - 1 :]
    hi = min(y.size - 2, int(1.3 * k0) + 1)
    lo = max(1, int(0.7 * k0))
    if b[hi + 1] <= 1e-6 * b[0]:
        raise NoOscillationError("envelope holds too few beat periods")
    ratio = a[: hi + 2] / b[: hi + 2]
    k = lo + int(np.argmax(ratio[lo : hi + 1]))
    period = _parabolic(ratio, k) * du

    centre = int(np.argmax(env))
    span = max(1, int(round(period / du)))
    win = y[max(0, centre - span) : centre + span + 1]
    vmax, vmin = float(win.max()), float(win.min())
    visibility = (vmax - vmin) / (vmax + vmin) if vmax + vmin > 0 else 0.0
    return float(period), float(visibility)
