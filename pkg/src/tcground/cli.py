"""Command-line driver emitting CSV/JSON plot data.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from .compare import PRESETS, compare_point, gamma_grid, restricted_trial
from .model import DEFAULT_EPS, ModelParams, classify_region
from .quantum import find_ground, reduced_distributions
from .semiclassical import (critical_point, find_crossing, line_path, occupation_distribution,
                            transition_order, trial_coefficients, trial_lambda_distribution)

log = logging.getLogger("tcground")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

SWEEP_FIELDS = ("gamma", "omega_a", "region", "lambda_sc", "lambda_q", "e_sc", "e_q",
                "jz_sc", "jz_q", "n_sc", "n_q", "varn_sc", "varn_q", "se_sc", "se_q",
                "xi_sc", "xi_q", "fidelity")
PHASE_FIELDS = ("gamma", "omega_a", "region", "theta_c", "e0_per_n")
DIST_FIELDS = ("kind", "index", "probability")
DIST_KINDS = ("matter_q", "matter_sc", "photon_q", "photon_trial_full",
              "photon_trial_restricted", "lambda_trial")
ORDER_FIELDS = ("order", "s0", "gamma0", "omega_a0", "left_region", "right_region",
                "jump0", "jump1", "jump2")

NAMED_PATHS = {
    # omega_a = 0.8 fixed, gamma crossing the North arm at -sqrt(0.8)
    "arm": ((-1.2, 0.8), (-0.6, 0.8)),
    # gamma = omega_a through the vertex
    "vertex": ((-0.5, -0.5), (0.5, 0.5)),
    # wholly inside the North Pole region
    "interior": ((0.0, 2.0), (1.0, 2.0)),
}

RANGE_FLAGS = ("--gamma-range", "--omega-a-range", "--from", "--to")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n_atoms: int | None = None
    delta: float | None = None
    omega_a: float | None = None
    gamma: float | None = None
    gamma_range: tuple[float, float, float] | None = None
    omega_a_range: tuple[float, float, float] | None = None
    phi: float = 0.0
    eps_boundary: float = DEFAULT_EPS
    output_format: str = "csv"
    output_path: str | None = None
    preset: str | None = None
    keep_going: bool = False

    def __post_init__(self):
        if self.delta is not None and self.omega_a is not None:
            raise ConfigError("give exactly one of --delta and --omega-a")
        if self.gamma is not None and self.gamma_range is not None:
            raise ConfigError("give either --gamma or --gamma-range, not both")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}")
        if self.eps_boundary < 0:
            raise ConfigError("--eps-boundary must be non-negative")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        for rng in (self.gamma_range, self.omega_a_range):
            if rng is not None:
                start, stop, step = rng
                if step <= 0 or stop < start:
                    raise ConfigError(f"range {start}:{stop}:{step} must have step > 0 and start <= stop")

    @property
    def _preset(self):
        return PRESETS[self.preset] if self.preset else None

    def resolved_n_atoms(self, default: int | None = None) -> int:
        n = self.n_atoms if self.n_atoms is not None else getattr(self._preset, "n_atoms", default)
        if n is None:
            raise ConfigError("--n-atoms is required (or use --preset)")
        return n

    def params(self, gamma: float, omega_a: float | None = None, n_default: int | None = None) -> ModelParams:
        n = self.resolved_n_atoms(n_default)
        try:
            if omega_a is not None:
                return ModelParams.from_omega_a(n, gamma, omega_a, self.phi)
            if self.omega_a is not None:
                return ModelParams.from_omega_a(n, gamma, self.omega_a, self.phi)
            delta = self.delta if self.delta is not None else getattr(self._preset, "delta", None)
            if delta is None:
                raise ConfigError("one of --delta or --omega-a is required (or use --preset)")
            return ModelParams.from_delta(n, gamma, delta, self.phi)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def single_gamma(self) -> float:
        if self.gamma_range is not None:
            raise ConfigError("this command takes a single --gamma, not a range")
        if self.gamma is not None:
            return self.gamma
        if self._preset is not None and self._preset.gammas:
            return self._preset.gammas[0]
        raise ConfigError("--gamma is required")

    def gammas(self) -> np.ndarray:
        if self.gamma_range is not None:
            return gamma_grid(*self.gamma_range)
        if self.gamma is not None:
            return np.array([self.gamma])
        if self._preset is not None:
            if self._preset.gamma_range is not None:
                return gamma_grid(*self._preset.gamma_range)
            if self._preset.gammas:
                return np.array(sorted(self._preset.gammas))
        raise ConfigError("--gamma-range is required")


def parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected GAMMA,OMEGA_A, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value) + 0.0, ".12g")


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(row[k]) for k in header) + "\n")
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, (np.floating, float)):
        value = float(value) + 0.0
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def to_json(obj) -> str:
    def clean(o):
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        return _json_value(o)
    return json.dumps(clean(obj), indent=2) + "\n"


# -- row builders --------------------------------------------------------------

def comparison_row(params: ModelParams, eps: float) -> dict:
    rec = compare_point(params, eps)
    lam_q = rec.lambda_q
    return {
        "gamma": params.gamma,
        "omega_a": params.omega_a,
        "region": str(rec.region),
        "lambda_sc": rec.lambda_sc,
        "lambda_q": int(lam_q) if float(lam_q).is_integer() else lam_q,
        "e_sc": rec.e_sc,
        "e_q": rec.e_q,
        "jz_sc": rec.sc.jz_per_n,
        "jz_q": rec.q.jz_per_n,
        "n_sc": rec.sc.n_per_n,
        "n_q": rec.q.n_per_n,
        "varn_sc": rec.sc.var_n,
        "varn_q": rec.q.var_n,
        "se_sc": rec.sc.entropy_nats,
        "se_q": rec.q.entropy_nats,
        "xi_sc": rec.sc.squeezing_xi,
        "xi_q": rec.q.squeezing_xi,
        "fidelity": rec.fidelity,
    }


def _failed_row(header, **known):
    row = {k: math.nan for k in header}
    row.update(known)
    return row


def _run_grid(points, build, header, keep_going):
    """Evaluate every grid point in order; returns (rows, failures)."""
    rows, failures = [], 0
    for known, args in points:
        try:
            rows.append(build(*args))
        except (ConfigError, KeyboardInterrupt):
            raise
        except Exception as exc:
            context = ", ".join(f"{k}={v:g}" for k, v in known.items())
            if not keep_going:
                raise RuntimeError(f"grid point {context} failed: {exc}") from exc
            log.error("grid point %s failed: %s", context, exc)
            failures += 1
            rows.append(_failed_row(header, region="failed", **known))
    return rows, failures


def distribution_rows(params: ModelParams, kinds, eps: float, lam: float | None = None) -> list[dict]:
    rows = []
    gs = coeffs = None

    def ground():
        nonlocal gs
        if gs is None:
            gs = find_ground(params)
        return gs

    def trial():
        nonlocal coeffs
        if coeffs is None:
            coeffs = trial_coefficients(params, eps=eps)
        return coeffs

    for kind in kinds:
        if kind == "matter_q":
            dist = reduced_distributions(ground())[1]
        elif kind == "photon_q":
            dist = reduced_distributions(ground())[0]
        elif kind == "matter_sc":
            dist = occupation_distribution(params, eps)
        elif kind == "photon_trial_full":
            dist = trial().photon_distribution()
        elif kind == "photon_trial_restricted":
            target = lam if lam is not None else ground().lam
            dist = restricted_trial(trial(), target).photon_probs
        elif kind == "lambda_trial":
            dist = trial_lambda_distribution(trial())[0]
        else:
            raise ConfigError(f"unknown distribution kind {kind!r}")
        for idx, p in zip(dist.index, dist.weights):
            index = int(idx) if float(idx).is_integer() else float(idx)
            rows.append({"kind": kind, "index": index, "probability": p})
    return rows


# -- subcommands ---------------------------------------------------------------

def cmd_point(cfg: RunConfig, args) -> tuple[str, int]:
    params = cfg.params(cfg.single_gamma())
    row = comparison_row(params, cfg.eps_boundary)
    if cfg.output_format == "json":
        return to_json(row), EXIT_OK
    return to_csv(SWEEP_FIELDS, [row]), EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> tuple[str, int]:
    gammas = cfg.gammas()
    points = [({"gamma": g}, (cfg.params(float(g)),)) for g in gammas]
    for known, (p,) in points:
        known["omega_a"] = p.omega_a
    rows, failures = _run_grid(points, lambda p: comparison_row(p, cfg.eps_boundary),
                               SWEEP_FIELDS, cfg.keep_going)
    text = to_json(rows) if cfg.output_format == "json" else to_csv(SWEEP_FIELDS, rows)
    return text, EXIT_NUMERIC if failures else EXIT_OK


def phase_row(gamma: float, omega_a: float, eps: float) -> dict:
    cp = critical_point(ModelParams.from_omega_a(2, gamma, omega_a), eps)
    return {"gamma": gamma, "omega_a": omega_a, "region": str(cp.region),
            "theta_c": cp.theta_c, "e0_per_n": cp.energy_per_atom}


def cmd_phase_diagram(cfg: RunConfig, args) -> tuple[str, int]:
    if cfg.gamma_range is None or cfg.omega_a_range is None:
        raise ConfigError("phase-diagram needs --gamma-range and --omega-a-range")
    gammas = gamma_grid(*cfg.gamma_range)
    omegas = gamma_grid(*cfg.omega_a_range)
    points = [({"gamma": float(g), "omega_a": float(w)}, (float(g), float(w)))
              for w in omegas for g in gammas]
    rows, failures = _run_grid(points, lambda g, w: phase_row(g, w, cfg.eps_boundary),
                               PHASE_FIELDS, cfg.keep_going)
    text = to_json(rows) if cfg.output_format == "json" else to_csv(PHASE_FIELDS, rows)
    return text, EXIT_NUMERIC if failures else EXIT_OK


def cmd_distributions(cfg: RunConfig, args) -> tuple[str, int]:
    kinds = tuple(k.strip() for k in args.kinds.split(",") if k.strip()) if args.kinds else DIST_KINDS
    unknown = [k for k in kinds if k not in DIST_KINDS]
    if unknown:
        raise ConfigError(f"unknown kinds {unknown}; choose from {list(DIST_KINDS)}")
    params = cfg.params(cfg.single_gamma())
    lam = args.lam
    if lam is None and cfg.preset and args.gamma is None:
        lam = PRESETS[cfg.preset].lam
    rows = distribution_rows(params, kinds, cfg.eps_boundary, lam)
    if cfg.output_format == "json":
        grouped = {}
        for r in rows:
            grouped.setdefault(r["kind"], []).append([r["index"], r["probability"]])
        return to_json(grouped), EXIT_OK
    return to_csv(DIST_FIELDS, rows), EXIT_OK


def cmd_transition_order(cfg: RunConfig, args) -> tuple[str, int]:
    if args.path is not None:
        if args.start is not None or args.stop is not None:
            raise ConfigError("give either --path or --from/--to")
        start, stop = NAMED_PATHS[args.path]
    elif args.start is not None and args.stop is not None:
        start, stop = args.start, args.stop
    else:
        raise ConfigError("transition-order needs --path or both --from and --to")
    if args.h <= 0 or args.tol <= 0:
        raise ConfigError("--h and --tol must be positive")
    path = line_path(start, stop)
    s0 = find_crossing(path, 0.0, 1.0, cfg.eps_boundary)
    if s0 is None:
        s0 = 0.5
    res = transition_order(path, s0, h=args.h, tol=args.tol, eps=cfg.eps_boundary)
    g0, w0 = path(s0)
    row = {"order": "none" if res.order is None else res.order, "s0": s0, "gamma0": g0,
           "omega_a0": w0, "left_region": str(res.left_region),
           "right_region": str(res.right_region)}
    row.update({f"jump{i}": v for i, v in enumerate(res.jumps)})
    if cfg.output_format == "json":
        return to_json(row), EXIT_OK
    return to_csv(ORDER_FIELDS, [row]), EXIT_OK


COMMANDS = {
    "point": (cmd_point, "json"),
    "sweep": (cmd_sweep, "csv"),
    "phase-diagram": (cmd_phase_diagram, "csv"),
    "distributions": (cmd_distributions, "csv"),
    "transition-order": (cmd_transition_order, "json"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-atoms", type=int)
    freq = common.add_mutually_exclusive_group()
    freq.add_argument("--delta", type=float, help="detuning, omega_a = 1 - delta")
    freq.add_argument("--omega-a", type=float)
    coupling = common.add_mutually_exclusive_group()
    coupling.add_argument("--gamma", type=float)
    coupling.add_argument("--gamma-range", type=parse_range, metavar="START:STOP:STEP")
    common.add_argument("--omega-a-range", type=parse_range, metavar="START:STOP:STEP")
    common.add_argument("--phi", type=float, default=0.0)
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", metavar="PATH", help="default: standard output")
    common.add_argument("--eps-boundary", type=float, default=DEFAULT_EPS)
    common.add_argument("--keep-going", action="store_true",
                        help="write nan rows for failed grid points, exit 3 at the end")

    parser = argparse.ArgumentParser(
        prog="tcground",
        description="Exact vs coherent-state ground states of the Tavis-Cummings model.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("point", parents=[common], help="compare both descriptions at one point")
    sub.add_parser("sweep", parents=[common], help="comparison rows over a gamma range")
    sub.add_parser("phase-diagram", parents=[common], help="region and theta_c over a (gamma, omega_a) grid")
    dist = sub.add_parser("distributions", parents=[common], help="probability distributions at one point")
    dist.add_argument("--kinds", help=f"comma list from {','.join(DIST_KINDS)} (default: all)")
    dist.add_argument("--lambda", dest="lam", type=float,
                      help="sector for photon_trial_restricted (default: exact ground lambda)")
    order = sub.add_parser("transition-order", parents=[common],
                           help="Ehrenfest order of the semiclassical transition along a segment")
    order.add_argument("--path", choices=sorted(NAMED_PATHS))
    order.add_argument("--from", dest="start", type=parse_pair, metavar="GAMMA,OMEGA_A")
    order.add_argument("--to", dest="stop", type=parse_pair, metavar="GAMMA,OMEGA_A")
    order.add_argument("--h", type=float, default=1e-3)
    order.add_argument("--tol", type=float, default=1e-2)
    return parser


def _normalize_argv(argv):
    """Glue range flags to their values so '-2:2:0.1' is not read as an option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in RANGE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="tcground: %(message)s", stream=sys.stderr)
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_normalize_argv(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    handler, default_format = COMMANDS[args.command]
    try:
        cfg = RunConfig(
            n_atoms=args.n_atoms, delta=args.delta, omega_a=args.omega_a, gamma=args.gamma,
            gamma_range=args.gamma_range, omega_a_range=args.omega_a_range, phi=args.phi,
            eps_boundary=args.eps_boundary, output_format=args.format or default_format,
            output_path=args.output, preset=args.preset, keep_going=args.keep_going)
        text, code = handler(cfg, args)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except Exception as exc:  # numerical failures surface as exit 3
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC

    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
