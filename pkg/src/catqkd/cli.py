"""Command-line sweeps and verification for the heralded-source key-rate study.

Subcommands
-----------
success-prob   heralding probability versus squeezing amplitude
entanglement   logarithmic negativity versus squeezing amplitude
keyrate        key rate versus distance, fixed or optimised transmittance
excess-noise   maximal tolerable excess noise versus distance (optimal T)
max-distance   largest distance keeping the optimised rate above a floor
verify         closed forms against the Fock-space oracle; exit 3 on failure

Output is a CSV table (header always present, floats at 9 significant
digits) or a JSON object with the same columns plus echoed inputs.  Rows
are computed and written in grid order, so runs with equal inputs are
byte-identical.  Exit codes: 0 ok, 1 usage error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import __version__, catalysis, oracle, subtraction
from .catalysis import CatalysisConfig, SourceParams
from .errors import ConsistencyError
from .keyrate import (
    ChannelParams,
    ProtocolParams,
    plob_bound,
    propagate_covariance,
    secret_key_rate,
    symplectic_eigenvalues,
)
from .optimize import golden_section_max, max_distance, max_tolerable_excess_noise, optimize_transmittance
from .subtraction import SubtractionConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_VERIFY = 3

_SCHEME_CHOICES = ("bsqc", "ssqc", "subtraction", "original")


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _t_value(text: str):
    if text.lower() == "optimal":
        return "optimal"
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"transmittance {value} outside (0, 1]")
    return value


def _add_common(sp: argparse.ArgumentParser) -> None:
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--alpha", type=float, default=None,
                       help="source squeezing amplitude (default: variance 20)")
    group.add_argument("--variance", type=float, default=None,
                       help="source quadrature variance in shot-noise units")
    sp.add_argument("--scheme", choices=_SCHEME_CHOICES, default=None,
                    help="single scheme instead of the command's default set")
    sp.add_argument("--m", type=int, default=None, help="catalysed photons, signal arm")
    sp.add_argument("--n", type=int, default=None, help="catalysed photons, idler arm")
    sp.add_argument("--beta", type=float, default=0.95, help="reconciliation efficiency")
    sp.add_argument("--epsilon", type=float, default=0.01, help="channel excess noise")
    sp.add_argument("--atten-db-km", type=float, default=0.2, dest="atten_db_km",
                    help="fibre attenuation in dB/km")
    sp.add_argument("--t", type=_t_value, default=0.95,
                    help="beam-splitter transmittance, a float or 'optimal'")
    sp.add_argument("--floor", type=float, default=1e-6,
                    help="minimal usable key rate in bits per pulse")
    sp.add_argument("--seed", type=int, default=0, help="seed for randomised spot checks")
    sp.add_argument("--out", default="-", help="output path, '-' for stdout")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--config", default=None,
                    help="key=value file supplying defaults; flags override")


def _add_alpha_grid(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--alpha-min", type=float, default=0.0, dest="alpha_min")
    sp.add_argument("--alpha-max", type=float, default=3.0, dest="alpha_max")
    sp.add_argument("--alpha-step", type=float, default=0.1, dest="alpha_step")


def _add_distance_grid(sp: argparse.ArgumentParser, d_min: float, d_max: float, d_step: float) -> None:
    sp.add_argument("--d-min", type=float, default=d_min, dest="d_min")
    sp.add_argument("--d-max", type=float, default=d_max, dest="d_max")
    sp.add_argument("--d-step", type=float, default=d_step, dest="d_step")


def _grid(lo: float, hi: float, step: float, what: str) -> list[float]:
    if step <= 0.0 or hi < lo:
        raise ValueError(f"bad {what} grid: [{lo}, {hi}] step {step}")
    count = int(round((hi - lo) / step)) + 1 if hi > lo else 1
    points = [lo + k * step for k in range(count)]
    if points[-1] > hi + 1e-12:
        points.pop()
    if points[-1] < hi - 1e-12:
        points.append(hi)
    return points


def _source(args) -> SourceParams:
    if args.alpha is not None:
        return SourceParams(alpha=args.alpha)
    return SourceParams.from_variance(args.variance if args.variance is not None else 20.0)


def _fixed_t(args) -> float:
    if args.t == "optimal":
        raise ValueError(f"{args.command} needs a fixed --t, not 'optimal'")
    return args.t


def _photon_number(args) -> int:
    if args.scheme == "bsqc" and args.m is not None and args.n is not None and args.m != args.n:
        raise ValueError("bsqc is symmetric: give one photon number via --m or --n")
    if args.scheme == "ssqc" and args.m not in (None, 0):
        raise ValueError("ssqc catalyses the idler arm only; --m does not apply")
    for value in (args.n, args.m):
        if value is not None:
            return value
    return 0


def _scheme_entries(args, default: list[tuple[str, int | None]]) -> list[tuple[str, int | None]]:
    """(scheme name, photon number) pairs for the sweep."""
    if args.scheme is None:
        if args.m is not None or args.n is not None:
            raise ValueError("--m/--n need an explicit --scheme")
        return default
    if args.scheme in ("subtraction", "original"):
        if args.m is not None or args.n is not None:
            raise ValueError("--m/--n only apply to catalysis schemes")
        return [(args.scheme, None)]
    return [(args.scheme, _photon_number(args))]


def _make_scheme(name: str, photons: int | None, t: float):
    if name == "original":
        return None
    if name == "subtraction":
        return SubtractionConfig(t=min(t, 1.0 - 1e-9))
    if name == "bsqc":
        return CatalysisConfig.bsqc(photons, t)
    if name == "ssqc":
        return CatalysisConfig.ssqc(photons, t)
    raise ValueError(f"unknown scheme {name!r}")


# ---------------------------------------------------------------------------
# output


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".9g")
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _emit(args, columns: list[str], rows: list[dict]) -> None:
    if args.format == "csv":
        def write(stream):
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(row.get(c)) for c in columns])
    else:
        meta = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}
        meta["version"] = __version__
        payload = {
            "metadata": meta,
            "columns": {c: [_json_safe(row.get(c)) for row in rows] for c in columns},
        }

        def write(stream):
            json.dump(payload, stream, indent=2)
            stream.write("\n")

    if args.out == "-":
        write(sys.stdout)
    else:
        with open(args.out, "w", newline="") as stream:
            write(stream)


# ---------------------------------------------------------------------------
# commands


_FULL_SET = [("bsqc", 0), ("bsqc", 1), ("bsqc", 2), ("ssqc", 0), ("ssqc", 1), ("ssqc", 2)]
_NOISE_SET = [("original", None), ("bsqc", 0), ("bsqc", 1), ("ssqc", 0), ("ssqc", 1),
              ("subtraction", None)]


def cmd_success_prob(args) -> int:
    t = _fixed_t(args)
    entries = _scheme_entries(args, _FULL_SET)
    alphas = _grid(args.alpha_min, args.alpha_max, args.alpha_step, "alpha")
    rows = []
    for alpha in alphas:
        src = SourceParams(alpha=alpha)
        for name, photons in entries:
            scheme = _make_scheme(name, photons, t)
            if scheme is None:
                pd = 1.0
            elif isinstance(scheme, SubtractionConfig):
                pd = subtraction.success_probability(scheme, src)
            else:
                pd = catalysis.success_probability(scheme, src)
            rows.append({"alpha": alpha, "scheme": name, "m": getattr(scheme, "m", None),
                         "n": getattr(scheme, "n", None), "t": t, "p_success": pd})
    _emit(args, ["alpha", "scheme", "m", "n", "t", "p_success"], rows)
    return EXIT_OK


def _best_log_negativity(cfg_at, src) -> tuple[float, float]:
    """Maximise the heralded log negativity over the transmittance."""

    def value(t: float) -> float:
        return catalysis.log_negativity(catalysis.schmidt_spectrum(cfg_at(t), src))

    grid = [0.5 + k * 0.01 for k in range(51)]
    best = max(range(len(grid)), key=lambda i: value(grid[i]))
    lo, hi = grid[max(0, best - 1)], grid[min(len(grid) - 1, best + 1)]
    t_ref, v_ref = golden_section_max(value, lo, hi, 1e-3)
    if v_ref < value(grid[best]):
        return grid[best], value(grid[best])
    return t_ref, v_ref


def cmd_entanglement(args) -> int:
    entries = _scheme_entries(args, _FULL_SET)
    for name, _ in entries:
        if name in ("subtraction", "original"):
            raise ValueError("entanglement sweeps cover catalysis schemes only")
    alphas = _grid(args.alpha_min, args.alpha_max, args.alpha_step, "alpha")
    rows = []
    for alpha in alphas:
        src = SourceParams(alpha=alpha)
        for name, photons in entries:
            if args.t == "optimal":
                maker = (lambda nn: lambda t: _make_scheme(name, nn, t))(photons)
                t_used, e_n = _best_log_negativity(maker, src)
            else:
                t_used = args.t
                e_n = catalysis.log_negativity(
                    catalysis.schmidt_spectrum(_make_scheme(name, photons, t_used), src))
            rows.append({"alpha": alpha, "scheme": name, "m": photons if name == "bsqc" else 0,
                         "n": photons, "t": t_used, "log_negativity": e_n})
        rows.append({"alpha": alpha, "scheme": "tmsv", "m": None, "n": None, "t": None,
                     "log_negativity": catalysis.log_negativity_tmsv(src)})
        rows.append({"alpha": alpha, "scheme": "tmsv-closed-form", "m": None, "n": None,
                     "t": None,
                     "log_negativity": catalysis.log_negativity_tmsv_closed_form(src)})
    _emit(args, ["alpha", "scheme", "m", "n", "t", "log_negativity"], rows)
    return EXIT_OK


def cmd_keyrate(args) -> int:
    default = [("original", None)] + _FULL_SET
    entries = _scheme_entries(args, default)
    distances = _grid(args.d_min, args.d_max, args.d_step, "distance")
    src = _source(args)
    rows = []
    for d in distances:
        ch = ChannelParams.from_distance(d, epsilon=args.epsilon, atten_db_per_km=args.atten_db_km)
        plob = plob_bound(ch.tc) if ch.tc < 1.0 else math.inf
        for name, photons in entries:
            if name == "original":
                t_used = None
                result = secret_key_rate(ProtocolParams(source=src, beta=args.beta), ch)
            elif args.t == "optimal":
                template = ProtocolParams(source=src, beta=args.beta,
                                          scheme=_make_scheme(name, photons, 0.95))
                opt = optimize_transmittance(template, ch)
                t_used = opt.t
                result = secret_key_rate(
                    replace(template, scheme=_make_scheme(name, photons, opt.t)), ch)
            else:
                t_used = args.t
                result = secret_key_rate(
                    ProtocolParams(source=src, beta=args.beta,
                                   scheme=_make_scheme(name, photons, t_used)), ch)
            rows.append({
                "distance_km": d, "scheme": name,
                "m": photons if name == "bsqc" else (0 if name == "ssqc" else None),
                "n": photons, "t": t_used,
                "p_success": result.p_success, "i_ab": result.i_ab,
                "holevo": result.holevo, "key_rate": result.key_rate, "plob": plob,
            })
    _emit(args, ["distance_km", "scheme", "m", "n", "t", "p_success", "i_ab", "holevo",
                 "key_rate", "plob"], rows)
    return EXIT_OK


def cmd_excess_noise(args) -> int:
    entries = _scheme_entries(args, _NOISE_SET)
    distances = _grid(args.d_min, args.d_max, args.d_step, "distance")
    src = _source(args)
    rows = []
    for d in distances:
        for name, photons in entries:
            p = ProtocolParams(source=src, beta=args.beta,
                               scheme=_make_scheme(name, photons, 0.95))
            eps = max_tolerable_excess_noise(p, d, atten_db_per_km=args.atten_db_km)
            rows.append({"distance_km": d, "scheme": name,
                         "m": photons if name == "bsqc" else (0 if name == "ssqc" else None),
                         "n": photons, "eps_max": eps})
    _emit(args, ["distance_km", "scheme", "m", "n", "eps_max"], rows)
    return EXIT_OK


def cmd_max_distance(args) -> int:
    entries = _scheme_entries(args, _NOISE_SET)
    src = _source(args)
    rows = []
    for name, photons in entries:
        p = ProtocolParams(source=src, beta=args.beta,
                           scheme=_make_scheme(name, photons, 0.95))
        d = max_distance(p, epsilon=args.epsilon, floor=args.floor,
                         atten_db_per_km=args.atten_db_km)
        rows.append({"scheme": name,
                     "m": photons if name == "bsqc" else (0 if name == "ssqc" else None),
                     "n": photons, "epsilon": args.epsilon, "floor": args.floor,
                     "max_distance_km": d})
    _emit(args, ["scheme", "m", "n", "epsilon", "floor", "max_distance_km"], rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suite


def _verify_catalysis(rows, sign, cutoff):
    grid = [("bsqc", k) for k in (0, 1, 2)] + [("ssqc", k) for k in (0, 1, 2)]
    devs = {"p_success": 0.0, "cov_x": 0.0, "cov_z": 0.0, "log_negativity": 0.0,
            "schmidt_norm": 0.0}
    for name, photons in grid:
        for t in (0.7, 0.9, 0.95):
            for alpha in (0.5, 1.0, 3.0):
                cfg = _make_scheme(name, photons, t)
                src = SourceParams(alpha=alpha)
                sim = oracle.simulate_catalysis(cfg, src, cutoff=cutoff, sign=sign)
                pd, cov = catalysis.pd_and_covariance(cfg, src)
                spec = catalysis.schmidt_spectrum(cfg, src)
                devs["p_success"] = max(devs["p_success"], abs(pd - sim.p_success))
                devs["cov_x"] = max(devs["cov_x"], abs(cov.x - sim.cov.x))
                devs["cov_z"] = max(devs["cov_z"], abs(cov.z - sim.cov.z))
                devs["log_negativity"] = max(
                    devs["log_negativity"],
                    abs(catalysis.log_negativity(spec) - sim.log_negativity))
                devs["schmidt_norm"] = max(devs["schmidt_norm"], abs(spec.squared_sum - 1.0))
    for key in ("p_success", "cov_x", "cov_z", "log_negativity"):
        rows.append(("catalysis-" + key, devs[key], 1e-6))
    rows.append(("schmidt-normalisation", devs["schmidt_norm"], 1e-8))


def _verify_subtraction(rows, sign):
    dev = 0.0
    for alpha in (0.5, 1.0, 3.0):
        for t in (0.5, 0.8, 0.95):
            cfg = SubtractionConfig(t=t)
            src = SourceParams(alpha=alpha)
            sim = oracle.simulate_subtraction(cfg, src, sign=sign)
            p1, cov = subtraction.p1_and_covariance(cfg, src)
            dev = max(dev, abs(p1 - sim.p_success), abs(cov.x - sim.cov.x),
                      abs(cov.y - sim.cov.y), abs(cov.z - sim.cov.z))
    rows.append(("subtraction-closed-forms", dev, 1e-6))


def _verify_orthogonality(rows, sign):
    dev = 0.0
    for t in (0.3, 0.7, 0.95):
        for total in range(0, 7):
            block = np.array([
                [oracle.bs_fock_amplitude(t, j, total - j, p, total - p, sign)
                 for p in range(total + 1)]
                for j in range(total + 1)
            ])
            dev = max(dev, float(np.abs(block.T @ block - np.eye(total + 1)).max()))
    rows.append(("beamsplitter-orthogonality", dev, 1e-10))


def _verify_symplectic(rows, rng):
    dev = 0.0
    for _ in range(20):
        src = SourceParams(alpha=float(rng.uniform(0.2, 3.0)))
        kind = rng.integers(0, 3)
        if kind == 0:
            cov = catalysis.tmsv_covariance(src)
        elif kind == 1:
            cfg = CatalysisConfig.bsqc(int(rng.integers(0, 3)), float(rng.uniform(0.6, 0.99)))
            cov = catalysis.output_covariance(cfg, src)
        else:
            cov = subtraction.output_covariance(
                SubtractionConfig(t=float(rng.uniform(0.5, 0.99))), src)
        ch = ChannelParams(tc=float(rng.uniform(1e-3, 1.0)), epsilon=float(rng.uniform(0.0, 0.1)))
        l1, l2, l3 = symplectic_eigenvalues(cov, ch)
        matrix = propagate_covariance(cov, ch).as_matrix()
        n1, n2 = oracle.two_mode_symplectic_numeric(matrix)
        # conditional state after a homodyne of Bob's x quadrature
        a = matrix[:2, :2]
        b = matrix[2:, 2:]
        c = matrix[:2, 2:]
        proj = np.diag([1.0, 0.0])
        cond = a - c @ np.linalg.pinv(proj @ b @ proj) @ c.T
        n3 = math.sqrt(max(np.linalg.det(cond), 0.0))
        dev = max(dev, abs(l1 - n1), abs(l2 - n2), abs(l3 - n3))
    rows.append(("symplectic-eigenvalues", dev, 1e-9))


def _verify_flip(rows, cutoff):
    dev = 0.0
    for name, photons in (("bsqc", 1), ("ssqc", 2)):
        cfg = _make_scheme(name, photons, 0.9)
        src = SourceParams(alpha=1.0)
        plus = oracle.simulate_catalysis(cfg, src, cutoff=cutoff, sign=1.0)
        minus = oracle.simulate_catalysis(cfg, src, cutoff=cutoff, sign=-1.0)
        dev = max(dev, abs(plus.p_success - minus.p_success),
                  abs(plus.cov.x - minus.cov.x), abs(plus.cov.z - minus.cov.z),
                  abs(plus.log_negativity - minus.log_negativity))
    rows.append(("reflection-phase-invariance", dev, 1e-12))


def cmd_verify(args) -> int:
    sign = 1.0 if args.flip_bs_sign else -1.0
    rng = np.random.default_rng(args.seed)
    checks: list[tuple[str, float, float]] = []
    _verify_orthogonality(checks, sign)
    _verify_catalysis(checks, sign, args.cutoff)
    _verify_subtraction(checks, sign)
    _verify_symplectic(checks, rng)
    _verify_flip(checks, args.cutoff)
    rows = [{"check": name, "max_abs_deviation": dev, "tolerance": tol,
             "status": "PASS" if dev <= tol else "FAIL"}
            for name, dev, tol in checks]
    _emit(args, ["check", "max_abs_deviation", "tolerance", "status"], rows)
    failed = [r for r in rows if r["status"] == "FAIL"]
    if failed:
        for r in failed:
            print(f"FAIL {r['check']}: {r['max_abs_deviation']:.3g} > {r['tolerance']:.3g}",
                  file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="catqkd", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"catqkd {__version__}")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    registry: dict[str, argparse.ArgumentParser] = {}

    sp = subs.add_parser("success-prob", help="heralding probability versus alpha")
    _add_common(sp)
    _add_alpha_grid(sp)
    sp.set_defaults(func=cmd_success_prob)
    registry["success-prob"] = sp

    sp = subs.add_parser("entanglement", help="log negativity versus alpha")
    _add_common(sp)
    _add_alpha_grid(sp)
    sp.set_defaults(func=cmd_entanglement)
    registry["entanglement"] = sp

    sp = subs.add_parser("keyrate", help="key rate versus distance")
    _add_common(sp)
    _add_distance_grid(sp, 0.0, 300.0, 5.0)
    sp.set_defaults(func=cmd_keyrate)
    registry["keyrate"] = sp

    sp = subs.add_parser("excess-noise", help="maximal tolerable excess noise versus distance")
    _add_common(sp)
    _add_distance_grid(sp, 50.0, 300.0, 50.0)
    sp.set_defaults(func=cmd_excess_noise)
    registry["excess-noise"] = sp

    sp = subs.add_parser("max-distance", help="largest distance above the key-rate floor")
    _add_common(sp)
    sp.set_defaults(func=cmd_max_distance)
    registry["max-distance"] = sp

    sp = subs.add_parser("verify", help="closed forms against the Fock-space oracle")
    _add_common(sp)
    sp.add_argument("--cutoff", type=int, default=None,
                    help="override the adaptive Fock cutoff")
    sp.add_argument("--flip-bs-sign", action="store_true", dest="flip_bs_sign",
                    help="run with the opposite reflected-beam phase")
    sp.set_defaults(func=cmd_verify)
    registry["verify"] = sp

    return parser, registry


def _expand_config(argv: list[str], registry: dict[str, argparse.ArgumentParser]) -> list[str]:
    """Splice config-file entries right after the subcommand, before user flags."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config":
            if i + 1 >= len(argv):
                return argv  # let argparse report the missing value
            path = argv[i + 1]
            break
        if token.startswith("--config="):
            path = token.split("=", 1)[1]
            break
    if path is None or not argv or argv[0] not in registry:
        return argv
    actions = {}
    for action in registry[argv[0]]._actions:
        for opt in action.option_strings:
            actions[opt.lstrip("-")] = action
    tokens: list[str] = []
    with open(path) as stream:
        for lineno, line in enumerate(stream, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "config":
                raise ValueError(f"{path}:{lineno}: config files cannot nest")
            action = actions.get(key) or actions.get(key.replace("_", "-"))
            if action is None:
                raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
            flag = action.option_strings[-1]
            if isinstance(action, argparse._StoreTrueAction):
                if value.lower() in ("1", "true", "yes", "on"):
                    tokens.append(flag)
                elif value.lower() not in ("0", "false", "no", "off"):
                    raise ValueError(f"{path}:{lineno}: boolean flag {key!r} got {value!r}")
            else:
                tokens.extend([flag, value])
    return [argv[0], *tokens, *argv[1:]]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    try:
        argv = _expand_config(argv, registry)
    except (OSError, ValueError) as exc:
        print(f"catqkd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError) as exc:
        print(f"catqkd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"catqkd: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"catqkd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
