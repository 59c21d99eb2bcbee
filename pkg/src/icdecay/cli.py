"""Command-line front end: config ingestion, subcommands, deterministic output.

Configs are plain ``key = value`` text (``#`` starts a comment).  Unknown
keys are rejected with their line number; invariant violations abort before
any computation with a message naming the field.  Outputs are CSV (default)
or JSON-lines with fixed float formatting (17 significant digits), fixed row
order and LF line endings, so identical configs produce byte-identical
files; outputs are overwritten, never appended.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .intensity import (
    PANEL_FRACTIONS,
    AngularGrid,
    IntensityField,
    TimeGrid,
    intensity_map,
    raw_intensity_grid,
)
from .model import (
    DephasingScenario,
    InvalidParameters,
    ModelParams,
    ScenarioMode,
    rotation_period,
)
from .spectral import (
    ResonanceSpectrum,
    convergence_report,
    default_oracle_spectrum,
    resonance_sum_grid,
    transform_consistency,
)
from .wavepacket import fringe_spacing, fringe_visibility, route_deviation, washout_time

_PANEL_LETTERS = "abcdefghi"

_KEY_DOC = {
    "preset": "named parameter set; only 'c12_mg24' is defined",
    "phi_rad": "deflection angle (rad)",
    "d": "spin-window width (>= 1)",
    "I": "average total spin",
    "beta_mev": "spin dephasing width (MeV)",
    "hbar_omega_mev": "rotational quantum (MeV)",
    "gamma_mev": "total decay width (MeV)",
    "d_spacing_mev": "mean resonance level spacing (MeV)",
    "scenario": "coherent | rmt_limit | j_dependent_omega",
    "omega_dot_mev": "spin derivative of the rotational quantum (MeV per spin unit)",
    "theta_step_deg": "angular grid step (degrees, default 0.5)",
    "times": "comma list; entries like 'T/16', '5T/16', '0.5T' are period "
             "fractions, bare numbers are seconds",
    "oracle_spacing_mev": "resonance-fence spacing for verify (default beta/50)",
    "oracle_span_mev": "resonance-fence span for verify (default from invariants)",
    "output_dir": "output directory (default 'out')",
    "format": "csv | json-lines",
}
_MODEL_KEYS = ("phi_rad", "d", "I", "beta_mev", "hbar_omega_mev", "gamma_mev")


class ConfigError(ValueError):
    """Config file is malformed or violates a model invariant."""


@dataclass
class RunConfig:
    """Validated run description; seedless is informational (runs are
    deterministic by construction, there is no randomness to seed)."""

    model: ModelParams
    scenario: DephasingScenario
    theta_step_deg: float = 0.5
    time_tokens: tuple = tuple(f"{f}T" for f in PANEL_FRACTIONS)
    oracle_spacing_mev: float | None = None
    oracle_span_mev: float | None = None
    output_dir: str = "out"
    format: str = "csv"
    seedless: bool = True

    def times_seconds(self) -> np.ndarray:
        period = rotation_period(self.model)
        return np.array(sorted(_parse_time_token(tok, period) for tok in self.time_tokens))


def _parse_time_token(token: str, period_seconds: float) -> float:
    tok = token.strip()
    if not tok:
        raise ConfigError("empty entry in 'times'")
    if "T" in tok:
        head, _, denom = tok.partition("/")
        head = head.strip()
        mult = head[:-1].strip() if head.endswith("T") else None
        if mult is None:
            raise ConfigError(f"bad time token {token!r}")
        try:
            value = (float(mult) if mult else 1.0) * period_seconds
            if denom:
                value /= float(denom)
        except ValueError as exc:
            raise ConfigError(f"bad time token {token!r}") from exc
        return value
    try:
        return float(tok)
    except ValueError as exc:
        raise ConfigError(f"bad time token {token!r}") from exc


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a config; rejects unknown keys and violated
    invariants before any computation starts."""
    pairs: dict[str, str] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not eq or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in _KEY_DOC:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
        lines[key] = lineno

    def _float(key: str) -> float:
        try:
            return float(pairs[key])
        except ValueError as exc:
            raise ConfigError(f"line {lines[key]}: {key} must be a number "
                              f"(got {pairs[key]!r})") from exc

    model_kwargs: dict[str, float] = {}
    if "preset" in pairs:
        if pairs["preset"] != "c12_mg24":
            raise ConfigError(f"line {lines['preset']}: unknown preset {pairs['preset']!r}")
        preset = ModelParams.c12_mg24()
        model_kwargs = dict(phi=preset.phi, d=preset.d, i_avg=preset.i_avg,
                            beta=preset.beta, hbar_omega=preset.hbar_omega,
                            gamma=preset.gamma, d_spacing=preset.d_spacing)
    else:
        missing = [k for k in _MODEL_KEYS if k not in pairs]
        if missing:
            raise ConfigError("missing required keys (no preset given): "
                              + ", ".join(missing))
    rename = {"phi_rad": "phi", "d": "d", "I": "i_avg", "beta_mev": "beta",
              "hbar_omega_mev": "hbar_omega", "gamma_mev": "gamma",
              "d_spacing_mev": "d_spacing"}
    for key, attr in rename.items():
        if key in pairs:
            model_kwargs[attr] = _float(key)
    try:
        model = ModelParams(**model_kwargs)
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from exc

    mode = pairs.get("scenario", "coherent")
    try:
        scenario_mode = ScenarioMode(mode)
    except ValueError as exc:
        raise ConfigError(f"line {lines['scenario']}: unknown scenario {mode!r}") from exc
    omega_dot = float(pairs.get("omega_dot_mev", 0.0))
    try:
        scenario = DephasingScenario(scenario_mode, omega_dot)
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from exc

    cfg = RunConfig(model=model, scenario=scenario)
    if "theta_step_deg" in pairs:
        step = _float("theta_step_deg")
        if not 0.0 < step <= 90.0:
            raise ConfigError(f"line {lines['theta_step_deg']}: theta_step_deg "
                              f"must be in (0, 90] (got {step})")
        cfg.theta_step_deg = step
    if "times" in pairs:
        tokens = tuple(t for t in pairs["times"].split(","))
        period = rotation_period(model)
        for tok in tokens:
            _parse_time_token(tok, period)
        cfg.time_tokens = tokens
    if "oracle_spacing_mev" in pairs:
        cfg.oracle_spacing_mev = _float("oracle_spacing_mev")
    if "oracle_span_mev" in pairs:
        cfg.oracle_span_mev = _float("oracle_span_mev")
    if "output_dir" in pairs:
        cfg.output_dir = pairs["output_dir"]
    if "format" in pairs:
        if pairs["format"] not in ("csv", "json-lines"):
            raise ConfigError(f"line {lines['format']}: format must be csv or "
                              f"json-lines (got {pairs['format']!r})")
        cfg.format = pairs["format"]
    return cfg


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _write_table(path: Path, header: list[str], rows, fmt: str) -> Path:
    """Write one table as CSV or JSON-lines with deterministic formatting."""
    if fmt == "csv":
        out = path.with_suffix(".csv")
        with open(out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(x) for x in row) + "\n")
    else:
        out = path.with_suffix(".jsonl")
        with open(out, "w", newline="\n", encoding="utf-8") as fh:
            for row in rows:
                obj = {k: (v if isinstance(v, (int, str)) else float(v))
                       for k, v in zip(header, row)}
                fh.write(json.dumps(obj) + "\n")
    return out


def _field(cfg: RunConfig, times_s: np.ndarray | None = None) -> IntensityField:
    times = cfg.times_seconds() if times_s is None else np.asarray(times_s)
    return intensity_map(TimeGrid(times), AngularGrid.from_step_deg(cfg.theta_step_deg),
                         cfg.model, cfg.scenario)


def _write_manifest(cfg: RunConfig, outdir: Path, extra: dict | None = None) -> Path:
    period = rotation_period(cfg.model)
    manifest = {
        "T_seconds": period,
        "fringe_spacing_rad": fringe_spacing(cfg.model),
        "scenario": cfg.scenario.mode.value,
        "deterministic": cfg.seedless,
        "format": cfg.format,
    }
    if extra:
        manifest.update(extra)
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8", newline="\n")
    return path


def cmd_panels(cfg: RunConfig, outdir: Path) -> int:
    """One angular profile per snapshot time, plus a constants manifest."""
    period = rotation_period(cfg.model)
    panel_times = np.array(PANEL_FRACTIONS) * period
    fld = _field(cfg, panel_times)
    theta_deg = np.rad2deg(fld.angles)
    for letter, (frac, t) in zip(_PANEL_LETTERS, zip(PANEL_FRACTIONS, panel_times)):
        rows = [(th, v) for th, v in zip(theta_deg, fld.time_slice(t))]
        _write_table(outdir / f"panel_{letter}", ["theta_deg", "intensity_normalized"],
                     rows, cfg.format)
    _write_manifest(cfg, outdir, {"norm_a": fld.norm_a,
                                  "panel_fractions": list(PANEL_FRACTIONS)})
    return 0


def cmd_map(cfg: RunConfig, outdir: Path) -> int:
    """Full (time, angle) map as one flat table, time-major rows."""
    fld = _field(cfg)
    theta_deg = np.rad2deg(fld.angles)
    rows = [(t, th, fld.values[i, j])
            for i, t in enumerate(fld.times) for j, th in enumerate(theta_deg)]
    _write_table(outdir / "intensity_map",
                 ["t_seconds", "theta_deg", "intensity_normalized"], rows, cfg.format)
    _write_manifest(cfg, outdir, {"norm_a": fld.norm_a})
    return 0


_WINDOW_HALF_RAD = math.radians(30.0)


def cmd_fringes(cfg: RunConfig, outdir: Path) -> int:
    """Fringe metrics around the forward and backward directions per time."""
    fld = _field(cfg)
    rows = []
    for t in fld.times:
        for center in (0.0, math.pi):
            rep = fringe_visibility(fld, t, (center - _WINDOW_HALF_RAD,
                                             center + _WINDOW_HALF_RAD))
            rows.append((t, math.degrees(center), rep.visibility,
                         rep.fringe_spacing_rad, rep.peak_compensated,
                         rep.n_fringe_maxima, rep.diagnostic))
    _write_table(outdir / "fringe_report",
                 ["t_seconds", "window_center_deg", "visibility",
                  "fringe_spacing_rad", "peak_compensated", "n_fringe_maxima",
                  "diagnostic"], rows, cfg.format)
    _write_manifest(cfg, outdir)
    return 0


def cmd_verify(cfg: RunConfig, outdir: Path) -> int:
    """Machine-checkable verification gate; nonzero exit on any violation.

    Checks the resonance-sum oracle against the exact route (including the
    spacing convergence study), the packet route against the exact route,
    and the numerical transform of the autocorrelation against the exact
    route, each at its fixed tolerance.
    """
    p, s = cfg.model, cfg.scenario
    period = rotation_period(p)
    spectrum = default_oracle_spectrum(p, cfg.oracle_spacing_mev, cfg.oracle_span_mev)
    times = np.array(PANEL_FRACTIONS) * period
    thetas = np.deg2rad(np.arange(0.0, 360.0, 10.0))

    exact = raw_intensity_grid(times, thetas, p, s)
    oracle = resonance_sum_grid(times, thetas, spectrum, p, s)
    oracle_err = float(np.max(np.abs(oracle - exact)) / np.max(np.abs(exact)))

    d_seq = [p.beta / 10.0, p.beta / 25.0, p.beta / 50.0]
    conv = convergence_report(d_seq, p, times, thetas, s)
    conv_errs = [err for _, err in conv]
    conv_monotone = all(b < a for a, b in zip(conv_errs, conv_errs[1:]))

    route_err = route_deviation(p)

    ft_times = np.linspace(0.05, 1.0, 20) * period
    ft_thetas = (math.pi / 3.0, math.pi / 2.0, 2.0 * math.pi / 3.0, math.pi)
    ft_err = max(transform_consistency(th, p, ft_times, s) for th in ft_thetas)

    checks = [
        ("oracle_vs_exact_max_rel_err", oracle_err, 0.01, oracle_err <= 0.01),
        ("convergence_monotone", float(conv_monotone), 1.0, conv_monotone),
        ("convergence_final_rel_err", conv_errs[-1], 0.01, conv_errs[-1] <= 0.01),
        ("route_agreement_max_rel_err", route_err, 0.05, route_err <= 0.05),
        ("transform_consistency_max_rel_err", ft_err, 0.01, ft_err <= 0.01),
    ]
    _write_table(outdir / "verify_report", ["check", "value", "tolerance", "status"],
                 [(name, val, tol, "pass" if ok else "fail")
                  for name, val, tol, ok in checks], cfg.format)
    _write_table(outdir / "convergence", ["d_spacing_mev", "max_rel_error"],
                 conv, cfg.format)
    _write_manifest(cfg, outdir, {"oracle_spacing_mev": spectrum.spacing,
                                  "oracle_span_mev": spectrum.span})
    failed = [name for name, _, _, ok in checks if not ok]
    for name, val, tol, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {val:.6g} (tolerance {tol:g})")
    return 1 if failed else 0


_BETA_SCAN_MEV = (0.0, 0.01, 0.05, 0.2)
_OMEGA_DOT_FRACS = (0.05, 0.1, 0.2)


def cmd_scan(cfg: RunConfig, outdir: Path) -> int:
    """Dephasing sweeps: visibility vs beta at the backward overlap, and
    visibility just past the washout time vs omega_dot."""
    p = cfg.model
    period = rotation_period(p)
    rows_beta = []
    for beta in _BETA_SCAN_MEV:
        # beta = 0 is the strict no-dephasing limit; the invariant floor keeps
        # the parameter set valid while changing the physics negligibly.
        beta_eff = max(beta, 10.0 * p.d_spacing)
        pb = ModelParams(phi=p.phi, d=p.d, i_avg=p.i_avg, beta=beta_eff,
                         hbar_omega=p.hbar_omega, gamma=p.gamma,
                         d_spacing=p.d_spacing, j_min=p.j_min, j_max=p.j_max,
                         window_absorbs_degeneracy=p.window_absorbs_degeneracy)
        fld = intensity_map(TimeGrid(np.array([period / 2.0])),
                            AngularGrid.from_step_deg(cfg.theta_step_deg), pb)
        rep = fringe_visibility(fld, period / 2.0,
                                (math.pi - _WINDOW_HALF_RAD, math.pi + _WINDOW_HALF_RAD))
        rows_beta.append((beta, rep.visibility, rep.fringe_spacing_rad,
                          rep.peak_compensated))
    _write_table(outdir / "scan_beta",
                 ["beta_mev", "visibility", "fringe_spacing_rad", "peak_compensated"],
                 rows_beta, cfg.format)

    rows_wd = []
    for frac in _OMEGA_DOT_FRACS:
        omega_dot = frac * p.hbar_omega
        scen = DephasingScenario.j_dependent(omega_dot)
        t_wash = washout_time(p, scen)
        # First packet-overlap event at or after the washout time; the packets
        # rotate at the window-centre beat rate hbar_omega + omega_dot * I.
        beat = p.hbar_omega + omega_dot * p.i_avg
        half_turn = math.pi * (period * p.hbar_omega / (2.0 * math.pi)) / beat * 2.0
        m = max(1, math.ceil(t_wash / half_turn))
        t_eval = m * half_turn
        center = 0.0 if m % 2 == 0 else math.pi
        fld = intensity_map(TimeGrid(np.array([t_eval])),
                            AngularGrid.from_step_deg(cfg.theta_step_deg), p, scen)
        rep = fringe_visibility(fld, t_eval, (center - _WINDOW_HALF_RAD,
                                              center + _WINDOW_HALF_RAD))
        rows_wd.append((omega_dot, t_wash, t_eval, math.degrees(center),
                        rep.visibility))
    _write_table(outdir / "scan_omega_dot",
                 ["omega_dot_mev", "washout_time_seconds", "eval_time_seconds",
                  "window_center_deg", "visibility"], rows_wd, cfg.format)
    _write_manifest(cfg, outdir)
    return 0


_COMMANDS = {
    "panels": cmd_panels,
    "map": cmd_map,
    "fringes": cmd_fringes,
    "verify": cmd_verify,
    "scan": cmd_scan,
}


def _key_help() -> str:
    width = max(len(k) for k in _KEY_DOC)
    lines = ["config keys:"]
    lines += [f"  {k.ljust(width)}  {v}" for k, v in _KEY_DOC.items()]
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Time- and angle-resolved decay intensity of a rotating "
                    "highly excited intermediate complex.",
        epilog=_key_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("panels", "angular profile files at the default snapshot times"),
        ("map", "full (time, angle) intensity table"),
        ("fringes", "fringe visibility report around 0 and 180 degrees"),
        ("verify", "cross-route verification gate (nonzero exit on failure)"),
        ("scan", "dephasing parameter sweeps"),
    ):
        sp = sub.add_parser(name, help=doc, epilog=_key_help(),
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", required=True, help="path to key = value config")
        sp.add_argument("--output", default=None, help="output directory override")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    outdir = Path(args.output if args.output else cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](cfg, outdir)
    except (InvalidParameters, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
