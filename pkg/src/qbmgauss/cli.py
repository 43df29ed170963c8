"""Command-line runner: figure presets, config files, sweeps and serialisation.

Settings are layered as built-in defaults < preset < config file < flags.
Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

import argparse
import itertools
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .channel import BathSpec, Convention, Source, delta, gamma
from .errors import InvalidArgumentError, NotFoundError, NumericalError, QBMError
from .metrics import Metric, MetricSeries, critical_time, metric_series
from .states import Family, StateSpec, make_state
from .symplectic import check_bona_fide

log = logging.getLogger("qbmgauss")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
COEFFICIENTS = "coefficients"
METRICS = (COEFFICIENTS,) + tuple(m.value for m in Metric)

DEFAULTS = {
    "preset": None,
    "metric": "fidelity",
    "state": "squeezed1",
    "r1": 2.0,
    "r2": 3.0,
    "nbar": 0.0,
    "nbar2": None,
    "alpha": 0.1,
    "temp": 50.0,
    "omega0": 7.0,
    "omega_c": 1.0,
    "kappa": 2.0,
    "tmax": 10.0,
    "steps": 400,
    "output": None,
    "format": "csv",
    "oracle": False,
    "convention": "uniform",
}

# two-mode presets use the halved multimode diffusion weight
PRESETS = {
    "fig1": {"metric": COEFFICIENTS, "alpha": 0.3, "temp": 50.0, "omega0": 7.0, "omega_c": 1.0, "tmax": 10.0},
    "fig2": {"metric": "fidelity", "state": "squeezed1", "r1": 2.0, "r2": 3.0, "alpha": 0.1, "temp": 50.0,
             "omega0": 7.0, "omega_c": 1.0, "tmax": 30.0},
    "fig3": {"metric": "fidelity", "state": "squeezed2", "r1": 2.0, "r2": 3.0, "alpha": 0.1, "temp": 50.0,
             "omega0": 7.0, "omega_c": 1.0, "tmax": 30.0, "convention": "paper"},
    "fig4": {"metric": "log_negativity", "state": "squeezed2", "r1": 2.0, "alpha": 0.1, "temp": 50.0,
             "omega0": 7.0, "omega_c": 1.0, "tmax": 30.0, "convention": "paper"},
    "fig5": {"metric": "petz_renyi", "state": "squeezed1", "r1": 2.0, "r2": 3.0, "kappa": 2.0, "alpha": 0.3,
             "temp": 50.0, "omega0": 7.0, "omega_c": 1.0, "tmax": 5.0},
    "fig6": {"metric": "petz_renyi", "state": "squeezed2", "r1": 2.0, "r2": 3.0, "kappa": 2.0, "alpha": 0.3,
             "temp": 50.0, "omega0": 7.0, "omega_c": 1.0, "tmax": 5.0, "convention": "paper"},
    "fig7-kappa3": {"metric": "petz_renyi", "state": "squeezed2", "r1": 2.0, "r2": 3.0, "kappa": 3.0,
                    "alpha": 0.3, "temp": 50.0, "omega0": 7.0, "omega_c": 1.0, "tmax": 5.0,
                    "convention": "paper"},
}

_FLOAT_KEYS = {"r1", "r2", "nbar", "nbar2", "alpha", "temp", "omega0", "omega_c", "kappa", "tmax"}


@dataclass(frozen=True)
class RunConfig:
    preset: Optional[str]
    metric: str
    state_a: Optional[StateSpec]
    state_b: Optional[StateSpec]
    bath: BathSpec
    kappa: float
    t_max: float
    steps: int
    output: Optional[Path] = None
    format: str = "csv"
    source: Source = Source.CLOSED_FORM
    convention: Convention = Convention.UNIFORM

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)

    def params(self) -> dict:
        out = {
            "preset": self.preset,
            "metric": self.metric,
            "alpha": self.bath.alpha,
            "temp": self.bath.T,
            "omega0": self.bath.omega0,
            "omega_c": self.bath.omega_c,
            "tmax": self.t_max,
            "steps": self.steps,
            "source": self.source.value,
            "convention": self.convention.value,
        }
        for tag, st in (("a", self.state_a), ("b", self.state_b)):
            if st is not None:
                out[f"state_{tag}"] = {"family": st.family.value, "r": st.r, "n_bar": st.n_bar}
        if self.metric == Metric.PETZ_RENYI.value:
            out["kappa"] = self.kappa
        return out


def _coerce(key: str, value):
    if value is None:
        return None
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key == "steps":
            v = float(value)
            if not v.is_integer():
                raise ValueError
            return int(v)
        if key == "oracle":
            if isinstance(value, bool):
                return value
            low = str(value).strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError
            return low in ("1", "true", "yes", "on")
    except ValueError:
        raise InvalidArgumentError(f"bad value for {key}: {value!r}") from None
    return str(value)


def _norm_key(key: str) -> str:
    key = key.strip().lstrip("-").replace("-", "_")
    aliases = {"omega_o": "omega0", "t_max": "tmax", "n_bar": "nbar", "temperature": "temp"}
    key = aliases.get(key, key)
    if key not in DEFAULTS:
        raise InvalidArgumentError(f"unknown setting {key!r}")
    return key


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, keys mirror the flags."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"{path}:{lineno}: expected key = value")
        k, v = line.split("=", 1)
        out[_norm_key(k)] = v.strip()
    return out


def resolve_settings(file_settings: Optional[dict] = None, flags: Optional[dict] = None) -> dict:
    """Layer defaults, preset, file and flags (later wins) into one flat dict."""
    file_settings = {_norm_key(k): v for k, v in (file_settings or {}).items()}
    flags = {_norm_key(k): v for k, v in (flags or {}).items() if v is not None}
    preset = flags.get("preset", file_settings.get("preset"))
    merged = dict(DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise InvalidArgumentError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        merged.update(PRESETS[preset])
        merged["preset"] = preset
    merged.update(file_settings)
    merged.update(flags)
    return {k: _coerce(k, v) for k, v in merged.items()}


def build_config(settings: dict) -> RunConfig:
    """Turn resolved settings into a RunConfig.  The kappa domain is left to validate()."""
    s = settings
    metric = s["metric"]
    if metric not in METRICS:
        raise InvalidArgumentError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    if s["format"] not in ("csv", "json"):
        raise InvalidArgumentError(f"format must be csv or json, got {s['format']!r}")
    if s["steps"] < 2:
        raise InvalidArgumentError(f"steps must be >= 2, got {s['steps']}")
    if not (math.isfinite(s["tmax"]) and s["tmax"] > 0):
        raise InvalidArgumentError(f"tmax must be positive, got {s['tmax']}")
    if not math.isfinite(s["kappa"]):
        raise InvalidArgumentError("kappa must be finite")
    try:
        convention = Convention(s["convention"])
    except ValueError:
        raise InvalidArgumentError(f"convention must be uniform or paper, got {s['convention']!r}") from None
    bath = BathSpec(s["alpha"], s["temp"], s["omega0"], s["omega_c"])
    state_a = state_b = None
    if metric != COEFFICIENTS:
        state_a = StateSpec(s["state"], r=s["r1"], n_bar=s["nbar"])
        if metric == Metric.LOG_NEGATIVITY.value:
            if state_a.n_modes < 2:
                raise InvalidArgumentError(f"log-negativity needs a multimode state, {state_a.family.value} has one mode")
        else:
            nbar2 = s["nbar"] if s["nbar2"] is None else s["nbar2"]
            state_b = StateSpec(s["state"], r=s["r2"], n_bar=nbar2)
    return RunConfig(
        preset=s["preset"],
        metric=metric,
        state_a=state_a,
        state_b=state_b,
        bath=bath,
        kappa=s["kappa"],
        t_max=s["tmax"],
        steps=s["steps"],
        output=None if s["output"] in (None, "", "-") else Path(s["output"]),
        format=s["format"],
        source=Source.QUADRATURE if s["oracle"] else Source.CLOSED_FORM,
        convention=convention,
    )


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    t_star: Optional[float] = None

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> list[str]:
        return (
            [f"error: {m}" for m in self.errors]
            + [f"warning: {m}" for m in self.warnings]
            + [f"note: {m}" for m in self.notes]
            + (["ok: configuration is valid"] if self.ok else [])
        )


def validate(config: RunConfig) -> ValidationReport:
    """Static checks on a configuration.  Never raises."""
    rep = ValidationReport()
    for tag, spec in (("first", config.state_a), ("second", config.state_b)):
        if spec is None:
            continue
        bf = check_bona_fide(make_state(spec))
        if not bf.valid:
            rep.errors.append(f"{tag} initial state is not bona fide (min eigenvalue {bf.min_eigenvalue:.3g})")
    if config.metric == Metric.PETZ_RENYI.value and not config.kappa > 1:
        rep.errors.append(f"kappa must lie in (1, inf), got {config.kappa}")
    h = config.t_max / config.steps / config.bath.omega_c
    if h < config.bath.t_min:
        rep.notes.append(
            f"grid spacing {h:.3g} is below the closed-form floor t_min = {config.bath.t_min:.3g}; "
            "the earliest points use quadrature"
        )
    if config.metric == Metric.PETZ_RENYI.value and rep.ok:
        try:
            rep.t_star = critical_time(
                make_state(config.state_a), make_state(config.state_b), config.bath, config.kappa,
                convention=config.convention, t_max=max(config.t_max, 5.0),
            )
        except NotFoundError:
            rep.warnings.append("the Petz-Renyi condition never holds on the scanned window")
        except QBMError as exc:
            rep.warnings.append(f"critical time could not be computed: {exc}")
        else:
            if config.t_max <= rep.t_star:
                rep.warnings.append(f"tmax = {config.t_max} does not exceed t* = {rep.t_star:.4f}; every entry is undefined")
            else:
                rep.notes.append(f"entropy is undefined before t* = {rep.t_star:.4f}; those cells are left empty")
    return rep


@dataclass
class CoefficientTable:
    t: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    params: dict


def run(config: RunConfig):
    """Compute the configured series.  Returns a MetricSeries or CoefficientTable."""
    t = config.grid
    if config.metric == COEFFICIENTS:
        wc = config.bath.omega_c
        d = np.array([delta(ti / wc, config.bath, config.source) for ti in t])
        g = np.array([gamma(ti / wc, config.bath, config.source) for ti in t])
        return CoefficientTable(t, d + g, d - g, config.params())
    a = make_state(config.state_a)
    b = make_state(config.state_b) if config.state_b is not None else None
    series = metric_series(
        Metric(config.metric), a, config.bath, t, b,
        kappa=config.kappa, convention=config.convention, source=config.source, params=config.params(),
    )
    if config.metric == Metric.PETZ_RENYI.value and series.t_star is not None:
        # entries are defined only after the onset of the domain condition
        series.values[series.t < series.t_star] = np.nan
    return series


def _num(x: float) -> str:
    return "" if not math.isfinite(x) else repr(float(x))


def _json_num(x: float):
    return float(x) if math.isfinite(x) else None


def render(result) -> str:
    """CSV text with a header row; undefined values are empty cells."""
    if isinstance(result, CoefficientTable):
        rows = ["t_omega_c,delta_plus_gamma,delta_minus_gamma"]
        rows += [f"{_num(t)},{_num(p)},{_num(m)}" for t, p, m in zip(result.t, result.plus, result.minus)]
    else:
        rows = ["t_omega_c,value"]
        rows += [f"{_num(t)},{_num(v)}" for t, v in zip(result.t, result.values)]
    return "\n".join(rows) + "\n"


def render_json(result) -> str:
    if isinstance(result, CoefficientTable):
        doc = {
            "params": result.params,
            "t_omega_c": [_json_num(x) for x in result.t],
            "delta_plus_gamma": [_json_num(x) for x in result.plus],
            "delta_minus_gamma": [_json_num(x) for x in result.minus],
        }
    else:
        doc = {
            "params": result.params,
            "t_star": result.t_star,
            "t_omega_c": [_json_num(x) for x in result.t],
            "value": [_json_num(x) for x in result.values],
        }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def sidecar(result: MetricSeries) -> str:
    doc = {"metric": result.metric.value, "params": result.params, "t_star": result.t_star}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def sidecar_path(output: Path) -> Path:
    return output.with_suffix(".meta.json")


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def execute(config: RunConfig, stdout=None) -> int:
    """Validate, run and write one configuration; returns the exit code."""
    stdout = stdout or sys.stdout
    rep = validate(config)
    for w in rep.warnings:
        log.warning(w)
    if not rep.ok:
        for e in rep.errors:
            log.error(e)
        return EXIT_CONFIG
    try:
        result = run(config)
    except InvalidArgumentError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except (NumericalError, NotFoundError, np.linalg.LinAlgError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    text = render(result) if config.format == "csv" else render_json(result)
    if config.output is None:
        stdout.write(text)
        if isinstance(result, MetricSeries) and result.t_star is not None and config.format == "csv":
            log.info("t_star = %r", result.t_star)
        return EXIT_OK
    written = []
    try:
        _atomic_write(config.output, text)
        written.append(config.output)
        if config.format == "csv" and isinstance(result, MetricSeries):
            _atomic_write(sidecar_path(config.output), sidecar(result))
    except OSError as exc:
        for p in written:
            p.unlink(missing_ok=True)
        log.error("cannot write output: %s", exc)
        return EXIT_CONFIG
    return EXIT_OK


def parse_sweep(items: list[str]) -> list[dict]:
    """``key=v1,v2`` items -> list of override dicts (cartesian product, first key slowest)."""
    axes = []
    for item in items:
        if "=" not in item:
            raise InvalidArgumentError(f"sweep item must look like key=v1,v2,...: {item!r}")
        k, vals = item.split("=", 1)
        k = _norm_key(k)
        values = [v.strip() for v in vals.split(",") if v.strip()]
        if not values:
            raise InvalidArgumentError(f"sweep over {k} has no values")
        axes.append([(k, v) for v in values])
    return [dict(combo) for combo in itertools.product(*axes)]


def sweep(base: dict, grid: list[dict], outdir: Path, fmt: str = "csv") -> int:
    """Run every grid point into ``outdir`` and write manifest.json in grid order."""
    if not grid:
        raise InvalidArgumentError("sweep grid is empty")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    entries, worst = [], EXIT_OK
    for i, delta_ in enumerate(grid):
        name = f"point_{i:03d}.{fmt}"
        entry = {"index": i, "overrides": delta_, "file": name}
        try:
            settings = resolve_settings(base, {**delta_, "output": str(outdir / name), "format": fmt})
            cfg = build_config(settings)
            entry["params"] = cfg.params()
            code = execute(cfg)
        except InvalidArgumentError as exc:
            log.error("sweep point %d: %s", i, exc)
            code = EXIT_CONFIG
        entry["status"] = "ok" if code == EXIT_OK else ("config_error" if code == EXIT_CONFIG else "numerical_error")
        if code != EXIT_OK:
            entry["file"] = None
        worst = max(worst, code)
        entries.append(entry)
    _atomic_write(outdir / "manifest.json", json.dumps({"points": entries}, indent=2, sort_keys=True) + "\n")
    return worst


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="qbmgauss",
        description="Evolve Gaussian states through the QBM channel and tabulate a metric.",
    )
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--state", choices=[f.value for f in Family])
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--nbar", type=float)
    p.add_argument("--nbar2", type=float, help="mean occupation of the second state (defaults to --nbar)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--temp", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--omega-c", dest="omega_c", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--metric", choices=METRICS)
    p.add_argument("--tmax", type=float, help="end of the grid in units of 1/omega_c")
    p.add_argument("--steps", type=int, help="number of grid intervals")
    p.add_argument("--output", help="output file (stdout when omitted); a directory with --sweep")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--convention", choices=[c.value for c in Convention])
    p.add_argument("--oracle", action="store_const", const=True, default=None,
                   help="use quadrature for the channel coefficients")
    p.add_argument("--validate-only", action="store_true")
    p.add_argument("--sweep", action="append", default=[], metavar="KEY=V1,V2",
                   help="sweep a setting; repeat for a cartesian grid")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except _ArgError as exc:
        print(f"qbmgauss: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "validate_only", "sweep", "verbose")}
    try:
        file_settings = read_config_file(args.config) if args.config else {}
        if args.sweep:
            grid = parse_sweep(args.sweep)
            base = {**file_settings, **{k: v for k, v in flags.items() if v is not None}}
            outdir = base.pop("output", None)
            if not outdir:
                raise InvalidArgumentError("--sweep needs --output naming a directory")
            fmt = _coerce("format", base.pop("format", "csv"))
            return sweep(base, grid, Path(outdir), fmt)
        config = build_config(resolve_settings(file_settings, flags))
    except InvalidArgumentError as exc:
        print(f"qbmgauss: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.validate_only:
        rep = validate(config)
        for line in rep.lines():
            print(line)
        return EXIT_OK if rep.ok else EXIT_CONFIG
    return execute(config)


if __name__ == "__main__":
    sys.exit(main())
