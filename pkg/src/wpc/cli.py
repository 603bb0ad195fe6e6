"""``wpc`` command line: surface-check, net and certify.

Exit codes: 0 pass, 1 assertion failure, 2 usage or config error, 3 resource cap
or truncation too shallow.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .beltrami import (
    AHLFORS_TOL,
    LAPLACIAN_TOL,
    MAJORANT_SLACK,
    BeltramiField,
    CertifyConfig,
    certify,
    mc_field,
)
from .bergman import theta_series
from .curvature_bounds import bracket_report
from .errors import ConstructionError, InvalidPointError, ResourceError, TruncationError
from .fuchsian import SurfaceConfig, in_domain, load_config, systole_estimate, systole_roundoff
from .nets import count_bracket, greedy_net, injectivity_on_samples, sample_surface_array
from .quadrature import domain_area, wp_norm_squared, wp_norm_unfolded

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

AREA_REL_TOL = 0.02

TOLERANCES = {
    "relator": "config relator_tolerance",
    "dedup": "config dedup_tolerance",
    "area_relative": AREA_REL_TOL,
    "majorant_slack": MAJORANT_SLACK,
    "ahlfors_relative": AHLFORS_TOL,
    "laplacian_absolute": LAPLACIAN_TOL,
    "mc_band_sigma": 3.0,
}


class UsageError(Exception):
    pass


def _load(path: str) -> tuple[SurfaceConfig, str]:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {path}")
    raw = p.read_bytes()
    return load_config(p), hashlib.sha256(raw).hexdigest()


def _header(cfg: SurfaceConfig, digest: str, config_path: str, command: str, seed: int, E) -> dict:
    tol = dict(TOLERANCES)
    tol["relator"] = cfg.presentation.tolerance
    tol["dedup"] = cfg.dedup_tolerance
    return {
        "command": command,
        "version": __version__,
        "backend": kernels.BACKEND,
        "config": config_path,
        "config_hash": digest,
        "surface": cfg.presentation.name,
        "genus": cfg.presentation.genus,
        "seed": seed,
        "word_length": E.max_word_length,
        # deepest-shell sum |term| of the single-base series at the origin
        "truncation_tail": theta_series(E, [0j], 0j)[1],
        "tolerances": tol,
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, row in enumerate(v):
                yield from _flatten(row, f"{key}.{i}.")
        else:
            yield key, json.dumps(v) if isinstance(v, list) else v


def _emit(report: dict, out: str | None, fmt: str):
    report = _jsonable(report)
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in _flatten(report):
            w.writerow([k, v])
        text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def _warn(msg: str):
    print(f"wpc: warning: {msg}", file=sys.stderr)


# --------------------------------------------------------------------------
# commands


def cmd_surface_check(args) -> int:
    cfg, digest = _load(args.config)
    L = cfg.max_word_length if args.L is None else args.L
    E = cfg.enumerate(L)
    pres = cfg.presentation
    report = _header(cfg, digest, args.config, "surface-check", args.seed, E)
    report["relator_residual"] = pres.relator_residual() if not pres.is_trivial else 0.0
    report["elements"] = len(E)
    report["shell_counts"] = E.shell_counts
    report["systole_estimate"] = systole_estimate(E)
    report["systole_roundoff"] = systole_roundoff(E)
    ok = True
    if E.is_trivial or pres.is_trivial:
        _warn("identity-only enumeration: area check skipped")
        report["area"] = {"status": "SKIPPED"}
    else:
        area = domain_area(E, args.samples, args.seed)
        target = 4.0 * math.pi * (pres.genus - 1)
        rel = abs(area.value - target) / target
        passed = rel <= AREA_REL_TOL
        ok = ok and passed
        report["area"] = {
            "estimate": area.to_dict(),
            "target": target,
            "relative_error": rel,
            "status": "PASS" if passed else "FAIL",
        }
    report["passed"] = ok
    _emit(report, args.out, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_net(args) -> int:
    cfg, digest = _load(args.config)
    L = cfg.max_word_length if args.L is None else args.L
    E = cfg.enumerate(L)
    if E.is_trivial:
        raise UsageError("nets need a surface group with a bounded fundamental domain")
    pts = sample_surface_array(E, args.samples, args.seed)
    net = greedy_net(pts, args.eps, E)
    report = _header(cfg, digest, args.config, "net", args.seed, E)
    report["net"] = net.to_dict()
    genus = cfg.presentation.genus
    lo, hi = count_bracket(genus, args.eps)
    sys_est = systole_estimate(E)
    applies = sys_est / 2.0 >= args.eps
    inside = math.ceil(lo - 1e-12) <= net.count <= math.floor(hi + 1e-12)
    report["bracket"] = {
        "lower": lo,
        "upper": hi,
        "integer_range": [math.ceil(lo - 1e-12), math.floor(hi + 1e-12)],
        "count": net.count,
        "inside": inside,
        "injectivity_lower_bound": sys_est / 2.0,
        "status": ("PASS" if inside else "FAIL") if applies else "SKIPPED",
    }
    report["injectivity_on_samples"] = injectivity_on_samples(pts[: args.inj_samples], E)
    ok = net.separated and net.covering and (inside or not applies)
    report["passed"] = ok
    _emit(report, args.out, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def _bases_for(args, E) -> list[complex]:
    if E.is_trivial or args.bases == 1:
        return [0j]
    eps = args.net_eps if args.net_eps is not None else args.eps0
    pts = sample_surface_array(E, args.net_samples, args.seed)
    pts = np.concatenate([[0j], pts])
    net = greedy_net(pts, eps, E)
    lifts = [p.lift for p in net.points]
    return lifts if args.bases is None else lifts[: args.bases]


def _tables(directory: str, field: BeltramiField, grid: int):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    E = field.enumeration
    rows = []
    for k in range(8):
        theta = k * math.pi / 8
        r = np.linspace(0.0, 0.95, 96)
        z = r * np.exp(1j * theta)
        m, f, _ = field.evaluate(z)
        for rr, mm, ff in zip(r, m, f):
            rows.append((theta, float(rr), float(ff), float(abs(mm))))
    _write_csv(out / "radial_slices.csv", ["angle", "radius", "f", "abs_mu"], rows)
    xs = np.linspace(-0.95, 0.95, grid)
    X, Y = np.meshgrid(xs, xs)
    Z = (X + 1j * Y).ravel()
    Z = Z[np.abs(Z) < 0.95]
    inF = in_domain(Z, E)
    m = np.full(len(Z), np.nan)
    if np.any(inF):
        m[inF] = np.abs(field.mu(Z[inF]))
    rows = [(float(z.real), float(z.imag), int(f), float(v) if f else "") for z, f, v in zip(Z, inF, m)]
    _write_csv(out / "mu_grid.csv", ["x", "y", "in_domain", "abs_mu"], rows)


def cmd_certify(args) -> int:
    cfg, digest = _load(args.config)
    L = cfg.max_word_length if args.L is None else args.L
    E = cfg.enumerate(L)
    pres = cfg.presentation
    trivial = pres.is_trivial
    bases = _bases_for(args, E)
    field = BeltramiField.build(E, bases, args.eps0)
    ccfg = CertifyConfig(
        seed=args.seed,
        ball_samples=args.ball_samples,
        domain_samples=args.point_samples,
        majorant_samples=args.point_samples,
        mean_value_samples=args.mean_value_samples,
        area_samples=args.area_samples,
        mc_word_length=args.mc_L,
    )
    cert = certify(field, ccfg)
    mc = mc_field(field, args.mc_L)
    norm = wp_norm_squared(mc, args.samples, args.seed)
    unfolded, unfolded_tail = wp_norm_unfolded(field)
    bracket = bracket_report(field, cert, norm, pres.genus)

    report = _header(cfg, digest, args.config, "certify", args.seed, E)
    report["bases"] = [complex(b) for b in field.bases]
    report["separation"] = field.separation
    report["separation_verified"] = field.separation_verified
    report["certificate"] = cert.to_dict()
    report["wp_norm_squared"] = {
        "monte_carlo": norm.to_dict(),
        "monte_carlo_word_length": mc.word_length,
        "unfolded": unfolded,
        "unfolded_tail": unfolded_tail,
    }
    report["curvature_bracket"] = bracket.to_dict()
    ok = cert.passed and bracket.passed

    if trivial:
        ref = {
            "mu0": {"value": cert.base_values[0][0], "expected": 0.25},
            "wp_norm": {"value": norm.value, "sigma": norm.std_error, "expected": math.pi / 12},
            "hk_lower": {"value": bracket.hk_lower, "sigma": bracket.hk_sigma, "expected": -3.0 / (2 * math.pi)},
        }
        ref["mu0"]["status"] = "PASS" if abs(ref["mu0"]["value"] - 0.25) <= 1e-14 else "FAIL"
        ref["wp_norm"]["status"] = "PASS" if norm.within(math.pi / 12) else "FAIL"
        hk_ok = abs(bracket.hk_lower + 3.0 / (2 * math.pi)) <= 3.0 * bracket.hk_sigma
        ref["hk_lower"]["status"] = "PASS" if hk_ok else "FAIL"
        report["closed_forms"] = ref
        ok = ok and all(v["status"] == "PASS" for v in ref.values())

    report["passed"] = ok
    if args.tables:
        _tables(args.tables, field, args.grid)
    _emit(report, args.out, args.format)
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# parser


def _positive_int(s):
    v = int(float(s))
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wpc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, samples):
        p.add_argument("--config", required=True, help="surface-group JSON file")
        p.add_argument("--L", type=_nonneg_int, default=None, help="word length (default: from config)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=_positive_int, default=samples)
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("surface-check", help="relator, enumeration counts, systole and area")
    common(p, 1_000_000)
    p.set_defaults(func=cmd_surface_check)

    p = sub.add_parser("net", help="greedy eps-net from area-uniform samples")
    common(p, 4000)
    p.add_argument("--eps", type=_positive_float, required=True)
    p.add_argument("--inj-samples", type=_positive_int, default=200,
                   help="samples used to report the largest injectivity radius")
    p.set_defaults(func=cmd_net)

    p = sub.add_parser("certify", help="field, bound certificate, WP norm and curvature bracket")
    common(p, 1_000_000)
    p.add_argument("--eps0", type=_positive_float, required=True)
    p.add_argument("--bases", type=_positive_int, default=None,
                   help="keep only the first N net points (default: the whole net)")
    p.add_argument("--net-eps", type=_positive_float, default=None, help="net spacing (default: eps0)")
    p.add_argument("--net-samples", type=_positive_int, default=4000)
    p.add_argument("--mc-L", type=_nonneg_int, default=4,
                   help="word length for Monte-Carlo integrals (default 4)")
    p.add_argument("--ball-samples", type=_positive_int, default=4096)
    p.add_argument("--point-samples", type=_positive_int, default=10_000)
    p.add_argument("--mean-value-samples", type=_positive_int, default=20_000)
    p.add_argument("--area-samples", type=_positive_int, default=100_000)
    p.add_argument("--tables", default=None, help="directory for CSV tables (radial slices, |mu| grid)")
    p.add_argument("--grid", type=_positive_int, default=101)
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConstructionError, InvalidPointError, OSError) as exc:
        print(f"wpc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceError, TruncationError) as exc:
        print(f"wpc: resource: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
