"""Command-line front end.

Subcommands: ``steady``, ``spectrum``, ``figure``, ``geometry``,
``verify``, ``params``.  All numeric output is decimal with 17
significant digits, so identical invocations produce byte-identical
files.  Rates are plain numbers in a common unit; the bundled figure
presets use the normalization 5*kappa = 1 (kappa = 0.2).

Exit codes: 0 success, 2 configuration error, 3 above-threshold error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geometry as geo
from .errors import AboveThresholdError, DomainError, RingCavityError
from .model import RawParams, SystemParams, critical_couplings, derive_params, stability_margin
from .oracle import run_verification
from .spectra import optimize_theta, spectrum_scan
from .steady import CavityObservables, cavity_observables

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_THRESHOLD = 3
EXIT_VERIFY = 4

SWEEP_VARIABLES = ("alpha_k", "beta")

STEADY_COLUMNS = (
    "alpha_k,beta,n_R,Re coh_RL,Im coh_RL,gamma_RL,visibility,eta_RR,eta_RL,"
    "g2_RR,g2_LL,g2_RL,chi_RL,chi_11,chi_22,U_value,error"
)
SPECTRUM_COLUMNS = (
    "delta_nu,f1,Re f2,Im f2,f3,Re f4,Im f4,S_theta,S_theta_perp,V_s,E_n"
)

# figure-preset parameters (delta is the exact literal 0.1 * pi)
FIG_BASE = {"omega": 1.0, "omega0": 1.0, "delta": 0.1 * math.pi, "kappa": 0.2}


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Validated configuration of one steady/spectrum run."""

    command: str
    params: SystemParams
    sweep: dict | None = None  # {"variable", "start", "stop", "steps"}
    grid: dict | None = None  # {"nu_min", "nu_max", "points"}
    theta: float | None = None
    theta_mode: str = "fixed"
    fmt: str = "csv"

    def validate(self) -> "RunConfig":
        if self.command not in ("steady", "spectrum"):
            raise DomainError(f"unknown command {self.command!r}")
        if self.fmt not in ("csv", "json"):
            raise DomainError(f"unknown format {self.fmt!r}")
        if self.sweep is not None:
            var = self.sweep.get("variable")
            if var not in SWEEP_VARIABLES:
                raise DomainError(
                    f"sweep variable must be one of {SWEEP_VARIABLES}, got {var!r}"
                )
            if int(self.sweep["steps"]) < 2:
                raise DomainError("sweep needs steps >= 2")
        if self.command == "spectrum":
            if self.grid is None:
                raise DomainError("spectrum runs need a nu grid")
            if not float(self.grid["nu_min"]) < float(self.grid["nu_max"]):
                raise DomainError("nu grid must be strictly increasing")
            if int(self.grid["points"]) < 2:
                raise DomainError("nu grid needs at least 2 points")
            if self.theta_mode == "fixed" and self.theta is None:
                raise DomainError("fixed theta mode needs --theta")
            if self.theta_mode not in ("fixed", "optimize-zero", "optimize-global"):
                raise DomainError(f"unknown theta mode {self.theta_mode!r}")
        return self

    def to_dict(self) -> dict:
        d = {"command": self.command, "params": self.params.to_dict(), "format": self.fmt}
        if self.sweep is not None:
            d["sweep"] = dict(self.sweep)
        if self.grid is not None:
            d["grid"] = dict(self.grid)
        if self.command == "spectrum":
            d["theta_mode"] = self.theta_mode
            if self.theta is not None:
                d["theta"] = self.theta
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(
            command=d["command"],
            params=SystemParams.from_dict(d["params"]),
            sweep=d.get("sweep"),
            grid=d.get("grid"),
            theta=d.get("theta"),
            theta_mode=d.get("theta_mode", "fixed"),
            fmt=d.get("format", "csv"),
        ).validate()


# ---------------------------------------------------------------------------
# steady command
# ---------------------------------------------------------------------------

_NAN_OBS_FIELDS = (
    "n_R gamma_RL visibility eta_RR eta_RL g2_RR g2_LL g2_RL "
    "chi_RL chi_11 chi_22 U_value"
).split()


def _observables_row(p: SystemParams) -> CavityObservables:
    """Observables at one point; above-threshold points are flagged."""
    try:
        return cavity_observables(p)
    except AboveThresholdError as exc:
        nan = math.nan
        values = {name: nan for name in _NAN_OBS_FIELDS}
        return CavityObservables(
            alpha_k=p.alpha_k, beta=p.beta, coh_RL=complex(nan, nan),
            error=str(exc), **values,
        )


def run_steady(cfg: RunConfig) -> str:
    cfg.validate()
    points = []
    if cfg.sweep is None:
        points = [cfg.params]
    else:
        sw = cfg.sweep
        values = np.linspace(
            float(sw["start"]), float(sw["stop"]), int(sw["steps"])
        )
        for v in values:
            d = cfg.params.to_dict()
            d[sw["variable"]] = float(v)
            points.append(SystemParams.from_dict(d))
    rows = [_observables_row(p) for p in points]
    if cfg.fmt == "json":
        return json.dumps([r.as_dict() for r in rows], indent=2) + "\n"
    lines = [STEADY_COLUMNS]
    for r in rows:
        lines.append(
            ",".join(
                [
                    _fmt(r.alpha_k), _fmt(r.beta), _fmt(r.n_R),
                    _fmt(r.coh_RL.real), _fmt(r.coh_RL.imag),
                    _fmt(r.gamma_RL), _fmt(r.visibility),
                    _fmt(r.eta_RR), _fmt(r.eta_RL),
                    _fmt(r.g2_RR), _fmt(r.g2_LL), _fmt(r.g2_RL),
                    _fmt(r.chi_RL), _fmt(r.chi_11), _fmt(r.chi_22),
                    _fmt(r.U_value),
                    '"' + r.error.replace('"', "'") + '"' if r.error else "",
                ]
            )
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# spectrum command
# ---------------------------------------------------------------------------

def run_spectrum(cfg: RunConfig) -> str:
    cfg.validate()
    p = cfg.params
    grid = np.linspace(
        float(cfg.grid["nu_min"]), float(cfg.grid["nu_max"]), int(cfg.grid["points"])
    )
    if cfg.theta_mode == "fixed":
        theta = float(cfg.theta)
        theta_star = None
    else:
        objective = (
            "min-S-at-zero" if cfg.theta_mode == "optimize-zero" else "min-S-global"
        )
        theta_star = optimize_theta(p, objective)
        theta = theta_star
    points = spectrum_scan(p, grid, theta)
    if cfg.fmt == "json":
        payload = {
            "theta": theta,
            "theta_mode": cfg.theta_mode,
            "points": [
                {
                    "delta_nu": pt.nu,
                    "f1": pt.f1,
                    "f2": {"re": pt.f2.real, "im": pt.f2.imag},
                    "f3": pt.f3,
                    "f4": {"re": pt.f4.real, "im": pt.f4.imag},
                    "S_theta": pt.S_theta,
                    "S_theta_perp": pt.S_theta_perp,
                    "V_s": pt.V_s,
                    "E_n": pt.E_n,
                }
                for pt in points
            ],
        }
        if theta_star is not None:
            payload["theta_star"] = theta_star
        return json.dumps(payload, indent=2) + "\n"
    lines = [f"# theta = {_fmt(theta)}", f"# theta_mode = {cfg.theta_mode}"]
    if theta_star is not None:
        lines.append(f"# theta_star = {_fmt(theta_star)}")
    lines.append(SPECTRUM_COLUMNS)
    for pt in points:
        lines.append(
            ",".join(
                [
                    _fmt(pt.nu), _fmt(pt.f1),
                    _fmt(pt.f2.real), _fmt(pt.f2.imag), _fmt(pt.f3),
                    _fmt(pt.f4.real), _fmt(pt.f4.imag),
                    _fmt(pt.S_theta), _fmt(pt.S_theta_perp),
                    _fmt(pt.V_s), _fmt(pt.E_n),
                ]
            )
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

def _preset(alpha: float, beta: float) -> SystemParams:
    return SystemParams(alpha_k=alpha, beta=beta, **FIG_BASE)


def figure_configs(fig_id: str) -> list[tuple[str, RunConfig]]:
    """Named curve configurations of one bundled figure preset.

    fig3: first-order coherence vs drive for three phase-matching factors;
    fig4: correlations vs alpha_k for three drives; fig5: in-pair
    Cauchy-Schwarz ratios vs alpha_k; fig6: output spectra for three
    alpha_k at the per-curve optimized quadrature angles; fig7: output
    spectra for three drives at alpha_k = 0.1.
    """
    curves: list[tuple[str, RunConfig]] = []
    if fig_id == "fig3":
        for alpha in (0.1, 0.5, 0.8):
            p = _preset(alpha, 0.0)
            beta_c1, _ = critical_couplings(p)
            cfg = RunConfig(
                command="steady", params=p,
                sweep={
                    "variable": "beta", "start": 0.005,
                    "stop": 0.995 * beta_c1, "steps": 200,
                },
            )
            curves.append((f"alpha_{alpha:g}", cfg))
    elif fig_id == "fig4":
        for beta in (0.1, 0.2, 0.3):
            cfg = RunConfig(
                command="steady", params=_preset(0.0, beta),
                sweep={"variable": "alpha_k", "start": 0.0, "stop": 1.0, "steps": 201},
            )
            curves.append((f"beta_{beta:g}", cfg))
    elif fig_id == "fig5":
        # in-pair ratios: alpha_k = 1 is excluded (pair 2 is empty there)
        for beta in (0.1, 0.2, 0.3):
            cfg = RunConfig(
                command="steady", params=_preset(0.0, beta),
                sweep={"variable": "alpha_k", "start": 0.0, "stop": 0.995, "steps": 200},
            )
            curves.append((f"beta_{beta:g}", cfg))
    elif fig_id == "fig6":
        for alpha, theta in ((0.0, 1.6856), (0.3, 1.6518), (0.5, 1.6676)):
            cfg = RunConfig(
                command="spectrum", params=_preset(alpha, 0.44),
                grid={"nu_min": -2.5, "nu_max": 2.5, "points": 1001},
                theta=theta,
            )
            curves.append((f"alpha_{alpha:g}", cfg))
    elif fig_id == "fig7":
        for beta, theta in ((0.4, 1.6958), (0.46, 1.6734), (0.4932, 1.7625)):
            cfg = RunConfig(
                command="spectrum", params=_preset(0.1, beta),
                grid={"nu_min": -2.5, "nu_max": 2.5, "points": 1001},
                theta=theta,
            )
            curves.append((f"beta_{beta:g}", cfg))
    else:
        raise DomainError(f"unknown figure id {fig_id!r}")
    return curves


def run_figure(fig_id: str, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"figure": fig_id, "curves": []}
    for name, cfg in figure_configs(fig_id):
        text = run_steady(cfg) if cfg.command == "steady" else run_spectrum(cfg)
        fname = f"{fig_id}_{name}.csv"
        path = out_dir / fname
        path.write_text(text)
        manifest["curves"].append({"file": fname, "config": cfg.to_dict()})
    manifest_path = out_dir / f"{fig_id}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", type=Path, default=None, help="output file path")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--seed", type=int, default=0)


def _add_param_source(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, default=None,
                     help="run-configuration JSON (round-trips a manifest entry)")
    sub.add_argument("--params-json", type=Path, default=None,
                     help="parameter record JSON")
    sub.add_argument("--omega", type=float, default=None)
    sub.add_argument("--omega0", type=float, default=None)
    sub.add_argument("--delta", type=float, default=None)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--alpha", type=float, default=None, help="alpha_k in [0, 1]")
    sub.add_argument("--kappa", type=float, default=None)
    sub.add_argument("--phi-n", type=float, default=0.0)


def _params_from_args(args: argparse.Namespace) -> SystemParams | None:
    flags = (args.omega, args.omega0, args.delta, args.beta, args.alpha, args.kappa)
    given = [v for v in flags if v is not None]
    sources = sum(
        [args.config is not None, args.params_json is not None, bool(given)]
    )
    if sources != 1:
        raise DomainError(
            "exactly one parameter source is required: --config, --params-json "
            "or the full set of system flags"
        )
    if args.config is not None:
        return None  # the whole run comes from the config file
    if args.params_json is not None:
        return SystemParams.from_json(args.params_json)
    if len(given) != 6:
        raise DomainError(
            "system flags need all of --omega --omega0 --delta --beta "
            "--alpha --kappa"
        )
    return SystemParams(
        omega=args.omega, omega0=args.omega0, delta=args.delta,
        beta=args.beta, alpha_k=args.alpha, kappa=args.kappa, phi_n=args.phi_n,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringcavity",
        description=(
            "Coherence, photon correlations and spectral entanglement of "
            "counter-propagating ring-cavity modes coupled to a finite-size "
            "atomic ensemble.  Rates are plain numbers in one common unit "
            "(figure presets use 5*kappa = 1)."
        ),
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("params", help="derive/inspect a parameter record")
    _add_common(sp)
    _add_param_source(sp)
    sp.add_argument("--raw-json", type=Path, default=None,
                    help="raw physical inputs JSON (g, n_atoms, delta_e, ...)")

    ss = subs.add_parser("steady", help="equal-time observables, single point or sweep")
    _add_common(ss)
    _add_param_source(ss)
    ss.add_argument("--sweep", nargs=4, metavar=("VAR", "FROM", "TO", "STEPS"),
                    default=None, help="sweep alpha_k or beta")

    sc = subs.add_parser("spectrum", help="output spectra S(nu, theta) and E_n(nu)")
    _add_common(sc)
    _add_param_source(sc)
    sc.add_argument("--nu-min", type=float, default=-2.5)
    sc.add_argument("--nu-max", type=float, default=2.5)
    sc.add_argument("--points", type=int, default=501)
    sc.add_argument("--theta", type=float, default=None)
    sc.add_argument("--theta-mode",
                    choices=("fixed", "optimize-zero", "optimize-global"),
                    default="fixed")

    sf = subs.add_parser("figure", help="write a bundled figure-preset dataset")
    _add_common(sf)
    sf.add_argument("id", choices=("fig3", "fig4", "fig5", "fig6", "fig7"))
    sf.add_argument("--out-dir", type=Path, default=Path("."))

    sg = subs.add_parser("geometry", help="phase-matching factor studies")
    _add_common(sg)
    sg.add_argument("--dist", choices=geo.DISTRIBUTIONS, default="point")
    sg.add_argument("--n", type=int, default=1)
    sg.add_argument("--length", type=float, default=0.0,
                    help="segment length (wavelengths)")
    sg.add_argument("--sigma", type=float, default=0.0,
                    help="cloud standard deviation (wavelengths)")
    sg.add_argument("--positions", type=Path, default=None,
                    help="read positions CSV instead of sampling")
    sg.add_argument("--scan-n", type=str, default=None,
                    help="comma-separated atom numbers for a convergence scan")
    sg.add_argument("--trials", type=int, default=100)

    sv = subs.add_parser("verify", help="oracle-vs-closed-form verification")
    _add_common(sv)
    sv.add_argument("--draws", type=int, default=100)

    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_params(args: argparse.Namespace) -> int:
    if args.raw_json is not None:
        raw = RawParams(**json.loads(Path(args.raw_json).read_text()))
        p = derive_params(raw)
    else:
        p = _params_from_args(args)
        if p is None:
            cfg = RunConfig.from_dict(json.loads(Path(args.config).read_text()))
            p = cfg.params
    beta_c1, beta_c2 = critical_couplings(p)
    record = p.to_dict() | {
        "lambda_1": p.lambda_1,
        "lambda_2": p.lambda_2,
        "Omega_1": p.Omega_1,
        "Omega_2": p.Omega_2,
        "beta_c1": beta_c1,
        "beta_c2": beta_c2,
        "stability_margin": stability_margin(p),
    }
    _emit(json.dumps(record, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_steady(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    if p is None:
        cfg = RunConfig.from_dict(json.loads(Path(args.config).read_text()))
        cfg.fmt = args.format
    else:
        sweep = None
        if args.sweep is not None:
            var, lo, hi, steps = args.sweep
            sweep = {
                "variable": var, "start": float(lo),
                "stop": float(hi), "steps": int(steps),
            }
        cfg = RunConfig(command="steady", params=p, sweep=sweep, fmt=args.format)
    _emit(run_steady(cfg), args.out)
    return EXIT_OK


def _cmd_spectrum(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    if p is None:
        cfg = RunConfig.from_dict(json.loads(Path(args.config).read_text()))
        cfg.fmt = args.format
    else:
        cfg = RunConfig(
            command="spectrum", params=p,
            grid={"nu_min": args.nu_min, "nu_max": args.nu_max, "points": args.points},
            theta=args.theta, theta_mode=args.theta_mode, fmt=args.format,
        )
    _emit(run_spectrum(cfg), args.out)
    return EXIT_OK


def _cmd_figure(args: argparse.Namespace) -> int:
    run_figure(args.id, args.out_dir)
    return EXIT_OK


def _cmd_geometry(args: argparse.Namespace) -> int:
    if args.scan_n is not None:
        n_values = [int(v) for v in args.scan_n.split(",") if v.strip()]
        rows = geo.convergence_scan(
            args.dist, n_values, args.trials, args.seed,
            length=args.length, sigma=args.sigma,
        )
        lines = ["n,mean_alpha,std_alpha"]
        lines += [f"{n},{_fmt(m)},{_fmt(s)}" for n, m, s in rows]
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    if args.positions is not None:
        g = geo.load_positions_csv(args.positions)
        mag, phi = geo.alpha_from_positions(g)
        _emit(
            json.dumps(
                {"n_atoms": g.n_atoms, "alpha_mag": mag, "phi_N": phi}, indent=2
            ) + "\n",
            args.out,
        )
        return EXIT_OK
    g = geo.sample_ensemble(
        args.n, args.dist, args.seed, length=args.length, sigma=args.sigma
    )
    mag, phi = geo.alpha_from_positions(g)
    if args.out is not None:
        geo.save_positions_csv(args.out, g)
    sys.stdout.write(
        json.dumps(
            {"n_atoms": g.n_atoms, "alpha_mag": mag, "phi_N": phi}, indent=2
        ) + "\n"
    )
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    report = run_verification(args.draws, args.seed)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "params": _cmd_params,
        "steady": _cmd_steady,
        "spectrum": _cmd_spectrum,
        "figure": _cmd_figure,
        "geometry": _cmd_geometry,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except AboveThresholdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD
    except (DomainError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RingCavityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
