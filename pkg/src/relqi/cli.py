"""Command-line sweeps with deterministic CSV/JSON output.

Subcommands: spin-entropy, spin-distinguish, photon-density,
photon-distinguish, doppler, channel-audit, entangle-sweep, convergence.
Parameter lists accept `a,b,c` or `min:max:step` (inclusive); angles are in
radians, speeds are fractions of c.  Lists starting with a negative number
need the `--flag=value` form.  Floats are printed with 12 significant
digits, so a fixed configuration yields byte-identical output regardless of
the worker count (capped by the RELQI_THREADS environment variable).
Exit codes: 0 success, 1 numerical non-convergence (output still written),
2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import channel, entangle, photon, spin_half

SPIN_HEADER = "theta,gamma,beta,delta_over_m,entropy_bits,p_error,grid_nodes,converged"
PHOTON_HEADER = "kA,delta_r,delta_z,v,p_error,p_error_closed_form,grid_nodes,converged"
ENTANGLE_HEADER = (
    "delta_over_m,beta,concurrence,entropy_of_marginal_bits,grid_nodes,converged"
)
CONVERGENCE_HEADER = (
    "observable,nodes_per_axis,grid_nodes,value,refined_value,rel_delta,converged"
)


class ConfigError(Exception):
    """Invalid configuration; the message names the offending field."""


def parse_values(text: str, field: str):
    """Parse `a,b,c` or `min:max:step` into a list of floats."""
    try:
        if ":" in text:
            lo, hi, step = (float(t) for t in text.split(":"))
            if step <= 0.0 or hi < lo:
                raise ValueError
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            return [lo + i * step for i in range(count)]
        values = [float(t) for t in text.split(",") if t != ""]
    except ValueError:
        raise ConfigError(f"{field}: cannot parse range {text!r}") from None
    if not values:
        raise ConfigError(f"{field}: empty range")
    return values


def _workers() -> int:
    raw = os.environ.get("RELQI_THREADS", "")
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"RELQI_THREADS: not an integer ({raw!r})") from None
    if n < 1:
        raise ConfigError("RELQI_THREADS: must be >= 1")
    return n


def _map_rows(fn, items):
    """Evaluate rows in a worker pool; output order follows input order."""
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        return list(pool.map(fn, items))


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.12g}"


def _csv(header: str, rows) -> str:
    keys = header.split(",")
    lines = [header]
    lines.extend(",".join(_fmt(row[k]) for k in keys) for row in rows)
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    def clean(x):
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        if isinstance(x, (np.floating, float)):
            x = float(x)
            return None if math.isnan(x) else x
        if isinstance(x, (np.integer,)):
            return int(x)
        if isinstance(x, np.bool_):
            return bool(x)
        return x

    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _all_converged(rows) -> bool:
    return all(bool(row.get("converged")) for row in rows)


def _rel_delta(coarse: float, fine: float) -> float:
    return abs(fine - coarse) / max(abs(fine), 1e-300)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relqi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, resolution):
        p.add_argument("--out", default="-", help="output path; '-' for stdout")
        p.add_argument("--resolution", type=int, default=resolution,
                       help="quadrature nodes per axis")
        p.add_argument("--tolerance", type=float, default=1e-4,
                       help="refinement tolerance for the converged flag")
        p.add_argument("--config", default=None,
                       help="JSON file whose entries override these flags")
        p.add_argument("--no-convergence", action="store_true",
                       help="skip the refined-grid convergence check")

    p = sub.add_parser("spin-entropy", help="spin entropy over (theta, gamma)")
    p.add_argument("--theta", default="0:3.14159:0.19635")
    p.add_argument("--gamma", default="0,0.25,0.5")
    p.add_argument("--delta-over-m", type=float, default=1.0)
    common(p, spin_half.DEFAULT_NODES_PER_AXIS)

    p = sub.add_parser("spin-distinguish", help="pair error over (theta, gamma)")
    p.add_argument("--theta", default="1.5707963268")
    p.add_argument("--gamma", default="0.001,0.002,0.005")
    p.add_argument("--delta-over-m", type=float, default=1.0)
    common(p, spin_half.DEFAULT_NODES_PER_AXIS)

    p = sub.add_parser("photon-density", help="3x3 polarization matrix of a beam")
    p.add_argument("--kA", type=float, default=100.0)
    p.add_argument("--dr", type=float, default=1.0)
    p.add_argument("--dz", type=float, default=0.1)
    p.add_argument("--helicity", type=int, choices=(-1, 1), default=1)
    common(p, photon.DEFAULT_NODES_PER_AXIS)

    p = sub.add_parser("photon-distinguish", help="circular-pair error vs radial spread")
    p.add_argument("--kA", type=float, default=100.0)
    p.add_argument("--dr", default="0.3,1,3")
    p.add_argument("--dz", type=float, default=0.1)
    common(p, photon.DEFAULT_NODES_PER_AXIS)

    p = sub.add_parser("doppler", help="pair error seen by an observer moving along z")
    p.add_argument("--kA", type=float, default=100.0)
    p.add_argument("--dr", type=float, default=1.0)
    p.add_argument("--dz", type=float, default=0.1)
    p.add_argument("--v", default="0.5")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="default: json for a single speed, csv for a list")
    common(p, photon.DEFAULT_NODES_PER_AXIS)

    p = sub.add_parser("channel-audit", help="CP/TP audit of the decoherence channel")
    p.add_argument("--gamma", type=float, default=0.2)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--witness-v", type=float, default=None,
                   help="also run the Doppler non-CP witness at this speed")
    common(p, spin_half.DEFAULT_NODES_PER_AXIS)

    p = sub.add_parser("entangle-sweep", help="boosted-singlet concurrence sweep")
    p.add_argument("--delta-over-m", default="0.0001,0.5")
    p.add_argument("--beta", default="0.3,0.6,0.9")
    common(p, entangle.DEFAULT_NODES_PER_AXIS)

    p = sub.add_parser("convergence", help="observable values at n and 2n nodes per axis")
    common(p, 8)
    return parser


def _apply_config(args) -> None:
    if not args.config:
        return
    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            overrides = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: {exc}") from None
    if not isinstance(overrides, dict):
        raise ConfigError("config: top-level JSON object required")
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"config: unknown field {key!r}")
        setattr(args, attr, value)


def _require_positive(value, field: str) -> float:
    value = float(value)
    if value <= 0.0:
        raise ConfigError(f"{field}: must be positive")
    return value


def _require_speed(value, field: str) -> float:
    value = float(value)
    if abs(value) >= 1.0:
        raise ConfigError(f"{field}: speeds must satisfy |v| < 1")
    return value


def _validate(args) -> None:
    if args.tolerance <= 0.0:
        raise ConfigError("tolerance: must be positive")
    if args.command == "convergence":
        if args.resolution < 1:
            raise ConfigError("resolution: must be >= 1")
    elif args.resolution < 4:
        raise ConfigError("resolution: must be >= 4")
    for field in ("kA", "dr", "dz"):
        value = getattr(args, field, None)
        if value is not None and not isinstance(value, str):
            _require_positive(value, field)
    if getattr(args, "delta_over_m", None) is not None:
        if not isinstance(args.delta_over_m, str):
            _require_positive(args.delta_over_m, "delta-over-m")


def _cmd_spin(args, thetas, gammas) -> int:
    for gamma in gammas:
        if gamma < 0.0:
            raise ConfigError("gamma: must be nonnegative")
    kwargs = dict(
        delta_over_m=_require_positive(args.delta_over_m, "delta-over-m"),
        nodes_per_axis=args.resolution,
        tolerance=args.tolerance,
        check_convergence=not args.no_convergence,
    )
    pairs = [(t, g) for t in thetas for g in gammas]
    rows = _map_rows(lambda tg: spin_half.sweep_row(tg[0], tg[1], **kwargs), pairs)
    _write(args.out, _csv(SPIN_HEADER, rows))
    return 0 if _all_converged(rows) else 1


def _cmd_photon_density(args) -> int:
    def rho_at(n):
        beam = photon.gaussian_beam(args.kA, args.dz, args.dr, args.helicity, n)
        return photon.effective_density(beam)

    rho = rho_at(args.resolution)
    converged = True
    if not args.no_convergence:
        delta = np.abs(rho_at(2 * args.resolution) - rho).max()
        converged = bool(delta < args.tolerance)
    _write(args.out, _json({
        "kA": args.kA,
        "delta_r": args.dr,
        "delta_z": args.dz,
        "helicity": args.helicity,
        "grid_nodes": args.resolution**3,
        "rho_re": np.real(rho).tolist(),
        "rho_im": np.imag(rho).tolist(),
        "tolerance": args.tolerance,
        "converged": converged,
    }))
    return 0 if converged else 1


def _photon_row(args, delta_r, v):
    if v == 0.0:
        pe = photon.circular_pair_error(args.kA, args.dz, delta_r, args.resolution)
        closed = delta_r**2 / (4.0 * args.kA**2)
        pe_fine = (
            photon.circular_pair_error(args.kA, args.dz, delta_r, 2 * args.resolution)
            if not args.no_convergence else pe
        )
    else:
        rep = photon.doppler_report(args.kA, args.dz, delta_r, v, args.resolution)
        pe = rep.pe_boosted
        closed = rep.closed_form_ratio * delta_r**2 / (4.0 * args.kA**2)
        pe_fine = (
            photon.doppler_report(args.kA, args.dz, delta_r, v, 2 * args.resolution).pe_boosted
            if not args.no_convergence else pe
        )
    return {
        "kA": args.kA,
        "delta_r": delta_r,
        "delta_z": args.dz,
        "v": v,
        "p_error": pe,
        "p_error_closed_form": closed,
        "grid_nodes": args.resolution**3,
        "converged": bool(abs(pe_fine - pe) < args.tolerance),
    }


def _cmd_photon_distinguish(args) -> int:
    drs = parse_values(args.dr, "dr") if isinstance(args.dr, str) else [float(args.dr)]
    rows = _map_rows(lambda dr: _photon_row(args, dr, 0.0), drs)
    _write(args.out, _csv(PHOTON_HEADER, rows))
    return 0 if _all_converged(rows) else 1


def _cmd_doppler(args) -> int:
    speeds = [_require_speed(v, "v") for v in parse_values(str(args.v), "v")]
    fmt = args.format or ("json" if len(speeds) == 1 else "csv")
    if fmt == "json":
        v = speeds[0]
        rep = photon.doppler_report(args.kA, args.dz, args.dr, v, args.resolution)
        converged = True
        if not args.no_convergence:
            fine = photon.doppler_report(args.kA, args.dz, args.dr, v, 2 * args.resolution)
            converged = bool(
                abs(fine.ratio - rep.ratio) < args.tolerance
                and abs(fine.pe_boosted - rep.pe_boosted) < args.tolerance
            )
        payload = rep.as_dict()
        payload.update(tolerance=args.tolerance, converged=converged)
        _write(args.out, _json(payload))
        return 0 if converged else 1
    rows = _map_rows(lambda v: _photon_row(args, args.dr, v), speeds)
    _write(args.out, _csv(PHOTON_HEADER, rows))
    return 0 if _all_converged(rows) else 1


def _cmd_channel_audit(args) -> int:
    spec = channel.BoostChannelSpec(gamma=args.gamma, theta=args.theta)
    report = channel.certify(spec).as_dict()
    if args.gamma > 0.0:
        report["trace_distance"] = channel.consistency_check(
            spec, args.resolution
        ).trace_distance
    if args.witness_v is not None:
        # is_cp keeps describing the audited channel; the verdict concerns
        # the Doppler frame-change pair map.
        witness = channel.non_cp_witness(args.witness_v, nodes_per_axis=args.resolution)
        report.update(
            pe_before=witness.pe_before,
            pe_after=witness.pe_after,
            verdict=witness.verdict,
        )
    _write(args.out, _json(report))
    return 0


def _cmd_entangle(args) -> int:
    dms = [
        _require_positive(dm, "delta-over-m")
        for dm in parse_values(str(args.delta_over_m), "delta-over-m")
    ]
    betas = [_require_speed(b, "beta") for b in parse_values(str(args.beta), "beta")]
    kwargs = dict(
        nodes_per_axis=args.resolution,
        tolerance=args.tolerance,
        check_convergence=not args.no_convergence,
    )
    pairs = [(dm, b) for dm in dms for b in betas]
    rows = _map_rows(lambda db: entangle.sweep_row(db[0], db[1], **kwargs), pairs)
    _write(args.out, _csv(ENTANGLE_HEADER, rows))
    return 0 if _all_converged(rows) else 1


def _cmd_convergence(args) -> int:
    n = args.resolution
    n_pair = max(2, n // 2)

    def spin_entropy(res):
        return spin_half.sweep_row(
            np.pi / 2, 0.5, nodes_per_axis=res, check_convergence=False
        )["entropy_bits"]

    def spin_error(res):
        return spin_half.sweep_row(
            np.pi / 2, 0.005, nodes_per_axis=res, check_convergence=False
        )["p_error"]

    def photon_error(res):
        return photon.circular_pair_error(100.0, 0.1, 1.0, res)

    def doppler_ratio(res):
        return photon.doppler_report(100.0, 0.1, 1.0, 0.5, res).ratio

    def pair_concurrence(res):
        return entangle.sweep_row(
            0.5, 0.6, nodes_per_axis=res, check_convergence=False
        )["concurrence"]

    probes = [
        ("spin_entropy_theta_pi2_gamma_0.5", spin_entropy, n),
        ("spin_pair_error_gamma_0.005", spin_error, n),
        ("photon_pair_error_dr_over_k_0.01", photon_error, n),
        ("doppler_ratio_v_0.5", doppler_ratio, n),
        ("entangle_concurrence_dm_0.5_beta_0.6", pair_concurrence, n_pair),
    ]

    def evaluate(probe):
        name, fn, res = probe
        value = fn(res)
        refined = fn(2 * res)
        delta = _rel_delta(value, refined)
        return {
            "observable": name,
            "nodes_per_axis": res,
            "grid_nodes": res**3,
            "value": value,
            "refined_value": refined,
            "rel_delta": delta,
            "converged": bool(delta < args.tolerance),
        }

    rows = _map_rows(evaluate, probes)
    _write(args.out, _csv(CONVERGENCE_HEADER, rows))
    return 0 if _all_converged(rows) else 1


def run(argv) -> int:
    """Parse arguments, run the subcommand, return the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(args)
        _validate(args)
        if args.command == "spin-entropy":
            return _cmd_spin(args, parse_values(str(args.theta), "theta"),
                             parse_values(str(args.gamma), "gamma"))
        if args.command == "spin-distinguish":
            return _cmd_spin(args, parse_values(str(args.theta), "theta"),
                             parse_values(str(args.gamma), "gamma"))
        if args.command == "photon-density":
            return _cmd_photon_density(args)
        if args.command == "photon-distinguish":
            return _cmd_photon_distinguish(args)
        if args.command == "doppler":
            return _cmd_doppler(args)
        if args.command == "channel-audit":
            return _cmd_channel_audit(args)
        if args.command == "entangle-sweep":
            return _cmd_entangle(args)
        if args.command == "convergence":
            return _cmd_convergence(args)
        raise ConfigError(f"command: unknown {args.command!r}")
    except ConfigError as exc:
        print(f"relqi: configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"relqi: configuration error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
