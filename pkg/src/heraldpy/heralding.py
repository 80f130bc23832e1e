"""Heralded-photon density matrix and time-frequency purity.

The trigger detector is modelled as a uniform averaging window of length
``dt``. In bandwidth units its only parameter is ``s = BW * dt`` and the
decoherence kernel between detunings ``x`` and ``x'`` is
``sinc(pi s (x - x'))``.

Purity is available three ways:

* :func:`purity_direct` - brute-force 2-D quadrature of the ``sinc^2`` kernel
  on a grid refined with ``s`` (the reference route);
* :func:`purity_autocorr` - 1-D sum of the kernel against the intensity
  autocorrelation (the fast route used for curves);
* :func:`purity_from_matrix` - ``Tr(rho^2)`` of a discretized density matrix.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.signal import correlate

from . import _kernels
from .errors import AccuracyWarning, ContractViolation, InvalidParameterError, NumericalError
from .numerics import FrequencyGrid
from .spectra import JointSpectrum

__all__ = [
    "HeraldedDensityMatrix",
    "PurityCurve",
    "Autocorrelation",
    "density_matrix",
    "purity_direct",
    "purity_autocorr",
    "purity_from_matrix",
    "purity_curve",
    "mode_decomposition",
    "resolution_for",
]

TWO_PI = 2.0 * np.pi
DIRECT_MIN_POINTS = 801
DIRECT_MAX_POINTS = 12001
AUTOCORR_MAX_POINTS = 400001
# Largest s with a declared accuracy for purity_direct.
S_VALID_MAX = 100.0


def _check_s(s: float) -> float:
    s = float(s)
    if not np.isfinite(s) or s < 0.0:
        raise InvalidParameterError(f"s = BW*dt must be finite and >= 0, got {s}")
    return s


def _odd(n: int) -> int:
    return n if n % 2 else n + 1


def resolution_for(spec: JointSpectrum, s: float, n_min: int) -> int:
    """Odd point count keeping grid spacing below ``1/(8 s)`` on the spectrum's window."""
    lo, hi = spec.support
    need = math.ceil(8.0 * s * (hi - lo)) + 1 if s > 0 else 0
    return _odd(max(n_min, need))


@dataclass(frozen=True, eq=False)
class HeraldedDensityMatrix:
    """Discretized heralded-photon density matrix ``rho(x_i, x_j)``.

    Elements carry angular-frequency units, so the continuum trace is
    ``2 pi * sum_i w_i rho_ii``.
    """

    grid: FrequencyGrid
    elements: np.ndarray
    s: float
    source: str = ""
    params: dict = field(default_factory=dict)

    def trace(self) -> float:
        return float(TWO_PI * np.dot(self.grid.weights, np.real(np.diag(self.elements))))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.elements - self.elements.conj().T)))

    def weighted(self) -> np.ndarray:
        """Symmetrized kernel ``B = 2 pi sqrt(w_i) rho_ij sqrt(w_j)``.

        Eigenvalues of ``B`` approximate the continuum eigenvalues of the
        density operator.
        """
        r = np.sqrt(self.grid.weights)
        b = TWO_PI * (r[:, None] * self.elements * r[None, :])
        return 0.5 * (b + b.conj().T)

    def eigenvalues(self) -> np.ndarray:
        """All eigenvalues of :meth:`weighted`, descending."""
        return np.linalg.eigvalsh(self.weighted())[::-1]


@dataclass(frozen=True)
class PurityCurve:
    s_values: np.ndarray
    gamma: dict
    models: tuple

    def series(self, model: str) -> tuple[np.ndarray, np.ndarray]:
        return self.s_values, self.gamma[model]


def density_matrix(spec: JointSpectrum, s: float, n_points: int | None = None) -> HeraldedDensityMatrix:
    """Density matrix of the photon heralded with response window ``s = BW * dt``.

    ``rho_ij = sinc(pi s (x_i - x_j)) phi_i conj(phi_j) / (2 pi R)``, where
    ``R`` is the surviving rate ``int |phi|^2 dx`` (equal to the pair rate
    for an unmodulated spectrum).
    """
    s = _check_s(s)
    if n_points is not None:
        spec = spec.refined(n_points)
    mass = spec.mass()
    if mass <= 0.0:
        raise InvalidParameterError("spectrum has zero norm")
    elements = _kernels.density_fill(spec.grid.points, spec.samples, s, 1.0 / (TWO_PI * mass))
    elements = 0.5 * (elements + elements.conj().T)
    return HeraldedDensityMatrix(spec.grid, elements, s, spec.model, dict(spec.params))


def purity_direct(
    spec: JointSpectrum,
    s: float,
    n_points: int | None = None,
    max_points: int = DIRECT_MAX_POINTS,
) -> float:
    """Purity by tensor-product quadrature of the ``sinc^2`` kernel.

    The grid has at least 801 points and spacing at most ``1/(8 s)``, up to
    ``max_points``. An :class:`AccuracyWarning` is issued when that cap binds
    or ``s`` exceeds 100.
    """
    s = _check_s(s)
    n = n_points if n_points is not None else resolution_for(spec, s, DIRECT_MIN_POINTS)
    if n > max_points:
        warnings.warn(
            f"purity_direct: s={s:g} needs {n} points, capped at {max_points}; accuracy not guaranteed",
            AccuracyWarning,
            stacklevel=2,
        )
        n = max_points if max_points % 2 else max_points - 1
    elif s > S_VALID_MAX:
        warnings.warn(f"purity_direct: s={s:g} is beyond the validated range s <= 100", AccuracyWarning, stacklevel=2)
    fine = spec.refined(n)
    a = fine.grid.weights * fine.intensity()
    total = float(np.sum(a))
    return _kernels.sinc2_double_sum(fine.grid.points, a, s) / (total * total)


class Autocorrelation:
    """Weighted intensity autocorrelation of a spectrum on a uniform grid.

    ``gamma(s) = sum_k sinc^2(pi s k h) A_k / (sum_i a_i)^2`` with
    ``a_i = w_i |phi_i|^2`` and ``A_k = sum_i a_i a_{i+k}``.
    """

    def __init__(self, spec: JointSpectrum):
        a = spec.grid.weights * spec.intensity()
        self.spacing = spec.grid.spacing
        self.values = correlate(a, a, mode="full")
        n = a.size
        self.lags = np.arange(-(n - 1), n) * self.spacing
        total = float(np.sum(a))
        self.norm = total * total

    def gamma(self, s: float) -> float:
        s = _check_s(s)
        k = _kernels._sinc_np(np.pi * s * self.lags)
        return float(np.sum(k * k * self.values) / self.norm)


def _autocorr_for(spec: JointSpectrum, s_max: float) -> Autocorrelation:
    n = resolution_for(spec, s_max, spec.grid.n_points)
    if n > AUTOCORR_MAX_POINTS:
        warnings.warn(
            f"purity_autocorr: s={s_max:g} needs {n} points, capped at {AUTOCORR_MAX_POINTS}",
            AccuracyWarning,
            stacklevel=3,
        )
        n = AUTOCORR_MAX_POINTS
    return Autocorrelation(spec.refined(n))


def purity_autocorr(spec: JointSpectrum, s: float) -> float:
    """Purity from the 1-D autocorrelation reduction of the double integral."""
    s = _check_s(s)
    return _autocorr_for(spec, s).gamma(s)


def purity_from_matrix(rho: HeraldedDensityMatrix) -> float:
    """``Tr(rho^2) = (2 pi)^2 sum_ij w_i w_j |rho_ij|^2``."""
    e = rho.elements
    if e.ndim != 2 or e.shape != (rho.grid.n_points, rho.grid.n_points):
        raise ContractViolation("density matrix shape does not match its grid")
    scale = float(np.max(np.abs(e))) or 1.0
    if rho.hermiticity_error() > 1e-12 * scale:
        raise ContractViolation("density matrix is not Hermitian")
    w = rho.grid.weights
    return float(TWO_PI**2 * (w @ (np.abs(e) ** 2) @ w))


def purity_curve(
    models,
    s_range: tuple[float, float],
    n_points: int,
    labels=None,
    workers: int | None = None,
) -> PurityCurve:
    """Sweep purity over ``s`` for several spectra.

    ``s`` values are log-spaced, or linear when ``s_range[0] == 0``. Each
    point is computed independently, so results do not depend on
    ``workers``.
    """
    s_lo, s_hi = (float(v) for v in s_range)
    if not (np.isfinite(s_lo) and np.isfinite(s_hi)) or s_lo < 0.0 or not s_hi > s_lo:
        raise InvalidParameterError(f"s range must satisfy 0 <= s_lo < s_hi, got [{s_lo}, {s_hi}]")
    if int(n_points) != n_points or n_points < 2:
        raise InvalidParameterError(f"n_points must be an integer >= 2, got {n_points}")
    models = list(models)
    if not models:
        raise InvalidParameterError("no spectra given")
    if labels is None:
        labels = [m.model for m in models]
    labels = list(labels)
    if len(labels) != len(models) or len(set(labels)) != len(labels):
        raise InvalidParameterError("labels must be unique, one per spectrum")
    if s_lo == 0.0:
        s_values = np.linspace(0.0, s_hi, int(n_points))
    else:
        s_values = np.geomspace(s_lo, s_hi, int(n_points))

    gamma = {}
    for label, spec in zip(labels, models):
        ac = _autocorr_for(spec, s_hi)
        if workers is None or workers <= 1:
            vals = [ac.gamma(s) for s in s_values]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                vals = list(pool.map(ac.gamma, s_values))
        gamma[label] = np.array(vals)
    return PurityCurve(s_values, gamma, tuple(labels))


def mode_decomposition(rho: HeraldedDensityMatrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Leading ``k`` eigenpairs of the heralded density operator.

    Returns
    -------
    eigenvalues : ndarray, shape (k,)
        Descending.
    modes : ndarray, shape (k, n)
        Mode functions on the grid, orthonormal under the quadrature weights.
    """
    n = rho.grid.n_points
    if int(k) != k or not 1 <= k <= n:
        raise InvalidParameterError(f"k must be in [1, {n}], got {k}")
    b = rho.weighted()
    try:
        vals, vecs = scipy.linalg.eigh(b, subset_by_index=[n - k, n - 1])
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    modes = (vecs[:, order] / np.sqrt(rho.grid.weights)[:, None]).T
    return vals, modes
