"""Command-line front end.

Every subcommand writes its outputs plus ``manifest.json`` into the output
directory (``--out``, else ``$HERALDPY_OUTPUT_DIR``, else ``./heraldpy_out``).
``heraldpy --config manifest.json`` replays a previous run.

Exit codes: 0 success, 2 usage or parameter error, 3 numerical-accuracy
guard tripped. Errors are reported on stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _kernels
from . import heralding as hd
from . import io
from . import spectra as sp
from . import waveform as wv
from .errors import AccuracyWarning, AliasingError, HeraldError, NumericalError
from .numerics import TimeGrid

COMMANDS = ("purity-curve", "purity", "density", "waveform", "modulate", "modes")
OUTPUT_ENV = "HERALDPY_OUTPUT_DIR"
MANIFEST_NAME = "manifest.json"
SCHEMA_VERSION = 1

MODEL_ALIASES = {
    "rect": sp.RECTANGULAR,
    "rectangular": sp.RECTANGULAR,
    "gauss": sp.GAUSSIAN,
    "gaussian": sp.GAUSSIAN,
    "lorentz": sp.LORENTZIAN,
    "lorentzian": sp.LORENTZIAN,
    "freq-bin": sp.FREQUENCY_BIN,
    "frequency-bin": sp.FREQUENCY_BIN,
    "tabulated": sp.TABULATED,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Complete description of one CLI run; serialized into the manifest."""

    command: str = "purity"
    model: str = "rect"
    models: list = field(default_factory=lambda: ["rect", "gaussian"])
    rate: float = 1.0
    direction: str = "photon1"
    delta: float = 5.0
    theta: float = 0.0
    bin_width: float | None = None
    table: str | None = None
    n_grid: int | None = None
    half_width: float | None = None
    s: float = 1.0
    s_min: float = 0.01
    s_max: float = 10.0
    points: int = 60
    method: str = "autocorr"
    herald: str = "photon1"
    t_max: float | None = None
    t_points: int | None = None
    mods: list = field(default_factory=list)
    arms: list = field(default_factory=list)
    renormalize: bool = False
    k: int = 10
    workers: int = 1
    out: str | None = None
    format: str = "csv"
    bw_hz: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


def canonical_model(name: str) -> str:
    try:
        return MODEL_ALIASES[name.strip().lower()]
    except KeyError:
        raise UsageError(f"unknown model {name!r}; choose from {', '.join(sorted(MODEL_ALIASES))}") from None


def build_spectrum(cfg: RunConfig, name: str) -> sp.JointSpectrum:
    model = canonical_model(name)
    kw = {"rate": cfg.rate}
    if cfg.n_grid is not None:
        kw["n_points"] = cfg.n_grid
    if cfg.half_width is not None and model in (sp.GAUSSIAN, sp.LORENTZIAN):
        kw["half_width"] = cfg.half_width
    if model == sp.RECTANGULAR:
        return sp.make_rectangular(**kw)
    if model == sp.GAUSSIAN:
        return sp.make_gaussian(**kw)
    if model == sp.LORENTZIAN:
        return sp.make_lorentzian(direction=cfg.direction, **kw)
    if model == sp.FREQUENCY_BIN:
        return sp.make_frequency_bin(cfg.delta, cfg.theta, cfg.bin_width, **kw)
    if cfg.table is None:
        raise UsageError("model 'tabulated' needs --table FILE")
    return sp.spectrum_from_csv(cfg.table, **kw)


def parse_modulator(text: str, arm: str) -> sp.SpectralModulator:
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "unity":
        return sp.SpectralModulator.unity(arm)
    if not arg:
        raise UsageError(f"modulator {text!r} needs an argument, e.g. linear-phase:1.5")
    if kind in ("linear-phase", "quad-phase"):
        try:
            value = float(arg)
        except ValueError:
            raise UsageError(f"modulator {text!r}: {arg!r} is not a number") from None
        if kind == "linear-phase":
            return sp.SpectralModulator.linear_phase(value, arm)
        return sp.SpectralModulator.quadratic_phase(value, arm)
    if kind == "mask":
        cols = sp.read_table_csv(arg, (("x", "m"),))
        return sp.SpectralModulator.amplitude_mask(cols["x"], cols["m"], arm)
    if kind == "table":
        cols = sp.read_table_csv(arg, (("x", "re", "im"),))
        return sp.SpectralModulator.tabulated(cols["x"], cols["re"] + 1j * cols["im"], arm)
    raise UsageError(f"unknown modulator kind {kind!r}; use linear-phase:T, quad-phase:beta, mask:FILE, table:FILE or unity")


def modulators(cfg: RunConfig) -> list[sp.SpectralModulator]:
    if len(cfg.arms) > len(cfg.mods):
        raise UsageError("more --arm values than --mod values")
    arms = list(cfg.arms) + ["trigger"] * (len(cfg.mods) - len(cfg.arms))
    return [parse_modulator(m, a) for m, a in zip(cfg.mods, arms)]


def time_grid(cfg: RunConfig, spec: sp.JointSpectrum) -> TimeGrid:
    base = wv.default_time_grid(spec)
    half = cfg.t_max if cfg.t_max is not None else base.t_max
    n = cfg.t_points if cfg.t_points is not None else base.n_points
    return TimeGrid.symmetric(half, n)


def output_dir(cfg: RunConfig) -> Path:
    return Path(cfg.out or os.environ.get(OUTPUT_ENV) or "heraldpy_out")


class Run:
    """Collects output files and diagnostics for the manifest."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = output_dir(cfg)
        self.outputs: dict[str, str] = {}
        self.spectra: dict[str, dict] = {}
        self.results: dict = {}

    def write(self, name: str, text: str) -> Path:
        path = io.atomic_write_text(self.dir / name, text)
        self.outputs[name] = io.sha256_file(path)
        return path

    def write_data(self, stem: str, csv_text: str, json_payload) -> Path:
        if self.cfg.format == "json":
            return self.write(f"{stem}.json", io.dumps_json(json_payload))
        return self.write(f"{stem}.csv", csv_text)

    def manifest(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": "heraldpy",
            "tool_version": __version__,
            "command": self.cfg.command,
            "config": self.cfg.to_dict(),
            "spectra": self.spectra,
            "results": self.results,
            "outputs": dict(sorted(self.outputs.items())),
            "environment": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "kernel_backend": _kernels.backend(),
            },
        }

    def finish(self) -> None:
        io.atomic_write_text(self.dir / MANIFEST_NAME, io.dumps_json(self.manifest()))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def run_purity_curve(cfg: RunConfig) -> Run:
    run = Run(cfg)
    if not cfg.models:
        raise UsageError("--models is empty")
    specs = [build_spectrum(cfg, m) for m in cfg.models]
    labels = [canonical_model(m) for m in cfg.models]
    if len(set(labels)) != len(labels):
        raise UsageError("duplicate model in --models")
    curve = hd.purity_curve(specs, (cfg.s_min, cfg.s_max), cfg.points, labels=labels, workers=cfg.workers)
    for label, spec in zip(labels, specs):
        run.spectra[label] = spec.describe()
        gam = curve.gamma[label]
        run.write_data(
            f"purity_{label}",
            io.curve_to_csv(curve.s_values, gam, cfg.bw_hz),
            {"model": label, "s": curve.s_values.tolist(), "gamma": gam.tolist()},
        )
    return run


def run_purity(cfg: RunConfig) -> Run:
    run = Run(cfg)
    spec = build_spectrum(cfg, cfg.model)
    run.spectra[spec.model] = spec.describe()
    if cfg.method == "autocorr":
        gamma = hd.purity_autocorr(spec, cfg.s)
    elif cfg.method == "direct":
        gamma = hd.purity_direct(spec, cfg.s)
    elif cfg.method == "matrix":
        gamma = hd.purity_from_matrix(hd.density_matrix(spec, cfg.s))
    else:
        raise UsageError(f"unknown purity method {cfg.method!r}")
    run.results["gamma"] = gamma
    print(f"{gamma:.6f}")
    return run


def run_density(cfg: RunConfig) -> Run:
    run = Run(cfg)
    spec = build_spectrum(cfg, cfg.model)
    run.spectra[spec.model] = spec.describe()
    rho = hd.density_matrix(spec, cfg.s)
    lam = rho.eigenvalues()
    diag = {
        "trace": rho.trace(),
        "purity": hd.purity_from_matrix(rho),
        "min_eigenvalue": float(lam[-1]),
        "max_eigenvalue": float(lam[0]),
    }
    run.results.update(diag)
    run.write_data("density", io.density_to_csv(rho), io.density_to_json(rho))
    for key, val in diag.items():
        print(f"{key}: {val:.6f}" if key != "min_eigenvalue" else f"{key}: {val:.3e}")
    if lam[0] > 1.0 - 1e-6:
        print("rank-1: yes")
    return run


def _emit_waveform(run: Run, wf: wv.TemporalWaveform, stem: str) -> None:
    run.write_data(stem, io.waveform_to_csv(wf, run.cfg.bw_hz), io.waveform_to_json(wf))


def run_waveform(cfg: RunConfig) -> Run:
    run = Run(cfg)
    spec = build_spectrum(cfg, cfg.model)
    run.spectra[spec.model] = spec.describe()
    tg = time_grid(cfg, spec)
    wf = wv.herald_waveform(spec, cfg.herald, tg)
    _emit_waveform(run, wf, f"waveform_{cfg.herald}")
    run.results["norm"] = wf.norm
    print(f"norm: {wf.norm:.6f}")
    if spec.model == sp.FREQUENCY_BIN:
        period, vis = wv.beat_note_analysis(wf)
        run.results.update(beat_period=period, visibility=vis)
        print(f"beat_period: {period:.6f}")
        print(f"visibility: {vis:.6f}")
    return run


def run_modulate(cfg: RunConfig) -> Run:
    run = Run(cfg)
    spec = build_spectrum(cfg, cfg.model)
    run.spectra[spec.model] = spec.describe()
    mods = modulators(cfg)
    if not mods:
        raise UsageError("modulate needs at least one --mod")
    tg = time_grid(cfg, spec)
    ref = wv.herald_waveform(spec, cfg.herald, tg)
    wf, eta = wv.herald_waveform_modulated(spec, mods, cfg.herald, tg, renormalize=cfg.renormalize)
    fid = wv.waveform_fidelity(ref, wf)
    _emit_waveform(run, wf, f"modulated_{cfg.herald}")
    run.results.update(efficiency=eta, fidelity=fid, norm=wf.norm)
    print(f"efficiency: {eta:.6f}")
    print(f"fidelity: {fid:.6f}")
    return run


def run_modes(cfg: RunConfig) -> Run:
    run = Run(cfg)
    spec = build_spectrum(cfg, cfg.model)
    run.spectra[spec.model] = spec.describe()
    rho = hd.density_matrix(spec, cfg.s)
    k = min(cfg.k, rho.grid.n_points)
    lam, _ = hd.mode_decomposition(rho, k)
    gamma = hd.purity_from_matrix(rho)
    run.results.update(eigenvalues=lam.tolist(), purity=gamma, effective_modes=1.0 / gamma)
    idx = np.arange(1, k + 1)
    run.write_data("modes", io._rows(["index", "eigenvalue"], (idx, lam)), {"eigenvalues": lam.tolist()})
    print(f"purity: {gamma:.6f}")
    print(f"effective_modes: {1.0 / gamma:.6f}")
    return run


RUNNERS = {
    "purity-curve": run_purity_curve,
    "purity": run_purity,
    "density": run_density,
    "waveform": run_waveform,
    "modulate": run_modulate,
    "modes": run_modes,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one machine-parsable line on stderr; --help still prints usage
        _report("usage", message)
        raise SystemExit(2)


def _report(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": str(message)}) + "\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("spectrum")
    g.add_argument("--model", help="rect, gaussian, lorentzian, freq-bin or tabulated")
    g.add_argument("--rate", type=float, help="pair rate R (pure scale)")
    g.add_argument("--direction", choices=sp.PHOTONS, help="lorentzian: photon whose envelope decays")
    g.add_argument("--delta", type=float, help="freq-bin: bin separation in BW units")
    g.add_argument("--theta", type=float, help="freq-bin: relative phase (rad)")
    g.add_argument("--bin-width", type=float, help="freq-bin: bin rms width (default delta/20)")
    g.add_argument("--table", help="tabulated: CSV with columns x,re[,im]")
    g.add_argument("--n-grid", type=int, help="frequency grid points")
    g.add_argument("--half-width", type=float, help="frequency window half-width (gaussian/lorentzian)")
    o = p.add_argument_group("output")
    o.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./heraldpy_out)")
    o.add_argument("--format", choices=("csv", "json"))
    o.add_argument("--bw-hz", type=float, help="biphoton bandwidth in Hz; SI time columns in outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heraldpy", description="Purity and wave functions of heralded single photons.")
    parser.add_argument("--version", action="version", version=f"heraldpy {__version__}")
    parser.add_argument("--config", help="replay the run recorded in a manifest JSON")
    parser.add_argument("--out", dest="replay_out", help="output directory for a --config replay")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("purity-curve", help="purity versus s = BW*dt for several spectra")
    _add_common(p)
    p.add_argument("--models", help="comma-separated model list")
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("purity", help="purity at one s")
    _add_common(p)
    p.add_argument("--s", type=float)
    p.add_argument("--method", choices=("autocorr", "direct", "matrix"))

    p = sub.add_parser("density", help="density matrix dump and diagnostics")
    _add_common(p)
    p.add_argument("--s", type=float)

    p = sub.add_parser("modes", help="leading eigenvalues of the density matrix")
    _add_common(p)
    p.add_argument("--s", type=float)
    p.add_argument("--k", type=int)

    for name, helptext in (("waveform", "heralded temporal wave function"), ("modulate", "nonlocally modulated wave function")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        p.add_argument("--herald", choices=sp.PHOTONS, help="heralded photon")
        p.add_argument("--t-max", type=float, help="time window half-width in 1/BW")
        p.add_argument("--t-points", type=int)
        if name == "modulate":
            p.add_argument("--mod", action="append", dest="mods", help="linear-phase:T | quad-phase:beta | mask:FILE | table:FILE")
            p.add_argument("--arm", action="append", dest="arms", choices=sp.ARMS, help="arm for the matching --mod")
            p.add_argument("--renormalize", action="store_true", default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read manifest {args.config}: {exc}") from None
        cfg = RunConfig.from_dict(data.get("config", data))
    else:
        if not args.command:
            raise UsageError("no command given")
        cfg = RunConfig(command=args.command)
    values = vars(args)
    for f in fields(RunConfig):
        v = values.get(f.name)
        if f.name == "command" or v is None:
            continue
        if f.name == "models":
            v = [m.strip() for m in v.split(",") if m.strip()]
        setattr(cfg, f.name, v)
    if getattr(args, "replay_out", None) and not values.get("out"):
        cfg.out = args.replay_out
    if args.command and args.config and args.command != cfg.command:
        raise UsageError(f"manifest is for {cfg.command!r}, not {args.command!r}")
    if cfg.command not in COMMANDS:
        raise UsageError(f"unknown command {cfg.command!r}")
    return cfg


def execute(cfg: RunConfig) -> Run:
    with warnings.catch_warnings():
        warnings.simplefilter("error", AccuracyWarning)
        run = RUNNERS[cfg.command](cfg)
    run.finish()
    return run


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        execute(cfg)
    except UsageError as exc:
        _report("usage", exc)
        return 2
    except (AliasingError, NumericalError, AccuracyWarning) as exc:
        _report("accuracy", exc)
        return 3
    except HeraldError as exc:
        _report("parameter", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
