"""Batch front end: verification suite, convergence sweeps and the free-gas table.

Three subcommands:

  verify   run the identity/duality/inequality checks and compare the frozen
           golden values; exit 0 only if every check passes
  sweep    drive convergence sweeps and emit one report per (quantity, eta)
           pair; exit 1 on an envelope-dominance violation
  pathria  tabulate the free-gas condensation decomposition on an
           (L/lambda, density) grid

All numeric output is emitted with 17 significant digits; identical configs
produce byte-identical files once the timestamp is disabled.
"""

import argparse
import csv
import datetime
import json
import math
import sys
from importlib import resources

import numpy as np

from . import bogoliubov, bounds, free_gas, geometry, heat_kernel, specfun
from .bogoliubov import BogoliubovParams, QuadratureConfig
from .errors import NonCondensedError
from .geometry import ConvexDomain
from .heat_kernel import TraceQuery, interval_trace

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

_FMT = "%.16e"

_VERIFY_CHECKS = (
    "identities",
    "interval_duality",
    "free_gas_duality",
    "dirichlet_trace_bound",
    "golden",
)

_VERIFY_KEYS = {"checks", "tolerances"}
_VERIFY_TOL_KEYS = {"i1", "k_rep", "gr6682", "interval_duality", "free_gas_duality", "golden"}
_SWEEP_KEYS = {"quantities", "sizes", "etas", "a", "n0", "beta", "s", "lam",
               "density_factor", "rel_tol", "tail_cut_factor", "k_max"}
_PATHRIA_KEYS = {"ratios", "density_factors", "lam"}


class UsageError(Exception):
    pass


def _load_config(path, allowed):
    if path is None:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(cfg) - allowed
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _provenance(args, cfg):
    prov = {"schema_version": SCHEMA_VERSION, "command": args.command, "config": cfg}
    if not args.no_timestamp:
        prov["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return prov


def _write_report(path, prov, fieldnames, rows, fmt):
    """Emit rows as CSV (with provenance comment header) or JSON."""
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump({"provenance": prov, "rows": rows}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return
    with open(path, "w", newline="") as fh:
        for key, val in sorted(prov.items()):
            fh.write(f"# {key} = {json.dumps(val, sort_keys=True)}\n")
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({
                k: (_FMT % v if isinstance(v, float) else v) for k, v in row.items()
            })


def _golden_values():
    text = resources.files("bosebox").joinpath("data/golden.json").read_text()
    return json.loads(text)["values"]


def _golden_current():
    """Re-evaluate every golden quantity with the current code."""
    out = {
        "j_constant": bogoliubov.J_CONSTANT,
        "xi_constant": bogoliubov.XI_CONSTANT,
        "zeta_3_2": specfun.bose_g(1.5, 1.0),
        "bulk_depletion_zero_T_a1": bogoliubov.bulk_depletion_zero_T(BogoliubovParams(1.0, 1.0)),
        "bessel_k_quarter_1": specfun.bessel_k(0.25, 1.0),
        "interval_trace_neumann_L1_s1": interval_trace(1.0, TraceQuery(s=1.0)),
        "cube2_trace_prime_s1": heat_kernel.box_trace_prime(ConvexDomain.cube(2.0), 1.0),
        "c_estimate_ratio40_factor3": free_gas.condensate_decomposition(
            3.0 * free_gas.critical_number(40.0, 1.0), 40.0, 1.0).c_estimate,
    }
    for eta in (0.25, 0.5, 0.75):
        out[f"brown_constant_cube2_eta{eta}"] = bounds.estimate_brown_constant(
            ConvexDomain.cube(2.0), eta)
    return out


def _run_verify_checks(selection, tols):
    rows = []

    def add(check, value, tol):
        rows.append({"check": check, "value": value, "tolerance": tol,
                     "pass": bool(value <= tol)})

    if "identities" in selection:
        for u in np.geomspace(1e-2, 1e2, 20):
            add(f"i1_identity_u={u:.6g}", specfun.residual_i1_identity(u), tols["i1"])
        for x in np.geomspace(1e-1, 1e2, 20):
            add(f"k_rep_nu=0.25_x={x:.6g}", specfun.residual_k_integral_rep(0.25, x),
                tols["k_rep"])
        for x in np.geomspace(1e-1, 1e2, 20):
            add(f"gr6682_mu=0.5_nu=0.5_x={x:.6g}", specfun.residual_gr6682(0.5, 0.5, x),
                tols["gr6682"])
    if "interval_duality" in selection:
        for L in (0.5, 1.0, 2.0, 5.0):
            for s in np.geomspace(1e-3, 10.0, 10):
                spectral = interval_trace(L, TraceQuery(s=s, representation="spectral"))
                image = interval_trace(L, TraceQuery(s=s, representation="image"))
                add(f"interval_duality_L={L:g}_s={s:.6g}",
                    abs(spectral - image) / spectral, tols["interval_duality"])
    if "free_gas_duality" in selection:
        for ratio in (2.0, 5.0, 10.0):
            for mb in (-5.0, -0.5, -1e-3):
                state = free_gas.FreeGasState(ratio, 1.0, mb)
                nd = free_gas.particle_number_direct(state)
                npn = free_gas.particle_number_poisson(state)
                add(f"free_gas_duality_L={ratio:g}_mb={mb:g}",
                    abs(nd - npn) / nd, tols["free_gas_duality"])
    if "dirichlet_trace_bound" in selection:
        for L in (1.0, 2.0, 4.0):
            for s in np.geomspace(1e-3, 10.0, 10):
                lhs, rhs, holds = bounds.angelescu_nenciu_check(ConvexDomain.cube(L), s)
                add(f"dirichlet_trace_bound_L={L:g}_s={s:.6g}",
                    0.0 if holds else lhs / rhs - 1.0, 0.0)
    if "golden" in selection:
        frozen = _golden_values()
        current = _golden_current()
        for name, ref in sorted(frozen.items()):
            add(f"golden_{name}", abs(current[name] - ref) / abs(ref), tols["golden"])
    return rows


def cmd_verify(args):
    cfg = _load_config(args.config, _VERIFY_KEYS)
    selection = cfg.get("checks", list(_VERIFY_CHECKS))
    if not selection:
        raise UsageError("empty check selection")
    unknown = set(selection) - set(_VERIFY_CHECKS)
    if unknown:
        raise UsageError(f"unknown checks: {sorted(unknown)}")
    tols = {"i1": 1e-8, "k_rep": 1e-7, "gr6682": 1e-8,
            "interval_duality": 1e-12, "free_gas_duality": 1e-10, "golden": 1e-9}
    tols.update(cfg.get("tolerances", {}))
    unknown = set(tols) - _VERIFY_TOL_KEYS
    if unknown:
        raise UsageError(f"unknown tolerance keys: {sorted(unknown)}")

    rows = _run_verify_checks(selection, tols)
    path = f"{args.out}/verify.{args.format}"
    _write_report(path, _provenance(args, cfg), ["check", "value", "tolerance", "pass"],
                  rows, args.format)
    failures = [r for r in rows if not r["pass"]]
    if not args.quiet:
        print(f"verify: {len(rows) - len(failures)}/{len(rows)} checks passed -> {path}")
        for r in failures:
            print(f"  FAIL {r['check']}: {r['value']:.3e} > {r['tolerance']:.3e}")
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def cmd_sweep(args):
    cfg = _load_config(args.config, _SWEEP_KEYS)
    quantities = cfg.get("quantities", ["trace_density"])
    sizes = cfg.get("sizes", [4.0, 8.0, 16.0, 32.0])
    etas = cfg.get("etas", [0.25])
    if len(sizes) < 3:
        raise UsageError("sweep needs at least 3 sizes")
    unknown = set(quantities) - set(bounds.SWEEP_QUANTITIES)
    if unknown:
        raise UsageError(f"unknown quantities: {sorted(unknown)}")
    a = cfg.get("a", 0.5)
    n0 = cfg.get("n0", 1.0)
    beta = cfg.get("beta")
    quad = QuadratureConfig(
        rel_tol=cfg.get("rel_tol", 1e-8),
        tail_cut_factor=cfg.get("tail_cut_factor", 40.0),
        k_max=cfg.get("k_max", 100_000),
    )

    exit_code = EXIT_OK
    for quantity in quantities:
        needs_beta = quantity == "depletion_finite_T"
        if needs_beta and beta is None:
            raise UsageError("depletion_finite_T requires beta in the config")
        params = BogoliubovParams(a / n0, n0, beta if needs_beta else None)
        for eta in etas:
            report = bounds.convergence_sweep(
                quantity, sizes, eta=eta, params=params, quad=quad,
                s=cfg.get("s", 1.0), lam=cfg.get("lam", 1.0),
                density_factor=cfg.get("density_factor", 3.0), jobs=args.jobs)
            rows = [
                {"size": report.sizes[i], "value": report.values[i],
                 "bulk_ref": report.bulk_ref, "abs_diff": report.abs_diffs[i],
                 "envelope": report.envelopes[i],
                 "ratio": report.abs_diffs[i] / report.envelopes[i]}
                for i in range(len(report.sizes))
            ]
            prov = _provenance(args, cfg)
            prov.update(quantity=quantity, eta=eta,
                        fitted_exponent=report.fitted_exponent, fit_r2=report.fit_r2,
                        envelope_constant=report.envelope_constant,
                        dominance_ok=report.dominance_ok,
                        floor_limited=report.floor_limited)
            path = f"{args.out}/sweep_{quantity}_eta{eta:g}.{args.format}"
            _write_report(path, prov,
                          ["size", "value", "bulk_ref", "abs_diff", "envelope", "ratio"],
                          rows, args.format)
            if not args.quiet:
                print(f"sweep {quantity} eta={eta:g}: exponent={report.fitted_exponent:.4f} "
                      f"r2={report.fit_r2:.4f} dominance={'ok' if report.dominance_ok else 'VIOLATED'}"
                      f" -> {path}")
            if not report.dominance_ok:
                exit_code = EXIT_CHECK_FAILED
                for L, diff, allowed in report.violations:
                    print(f"  dominance violation at L={L:g}: "
                          f"diff={diff:.6e} > allowed={allowed:.6e}", file=sys.stderr)
    return exit_code


def cmd_pathria(args):
    cfg = _load_config(args.config, _PATHRIA_KEYS)
    ratios = cfg.get("ratios", [10.0, 20.0, 40.0])
    factors = cfg.get("density_factors", [0.5, 2.0, 3.0])
    lam = cfg.get("lam", 1.0)
    if not ratios or not factors:
        raise UsageError("ratios and density_factors must be non-empty")

    rows = []
    for ratio in ratios:
        L = ratio * lam
        for factor in factors:
            n_target = factor * free_gas.critical_number(L, lam)
            res = free_gas.solve_fugacity(n_target, L, lam)
            state = free_gas.FreeGasState(L, lam, res.mu_beta)
            duality = abs(free_gas.particle_number_direct(state)
                          - free_gas.particle_number_poisson(state)) / res.particle_number
            try:
                dec = free_gas.condensate_decomposition(n_target, L, lam)
                row = {"n0": dec.n_condensate, "n_bulk": dec.n_bulk,
                       "residual": dec.residual, "c_estimate": dec.c_estimate,
                       "condensed": True}
            except NonCondensedError:
                z = math.exp(res.mu_beta)
                row = {"n0": z / (1.0 - z), "n_bulk": float("nan"),
                       "residual": float("nan"), "c_estimate": float("nan"),
                       "condensed": False}
            rows.append({"L_over_lam": ratio, "density_factor": factor,
                         "mu_beta": res.mu_beta, "N": res.particle_number,
                         **row, "duality_residual": duality})
    path = f"{args.out}/pathria.{args.format}"
    _write_report(path, _provenance(args, cfg),
                  ["L_over_lam", "density_factor", "mu_beta", "N", "n0", "n_bulk",
                   "residual", "c_estimate", "condensed", "duality_residual"],
                  rows, args.format)
    if not args.quiet:
        print(f"pathria: {len(rows)} grid points -> {path}")
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="bosebox",
        description="Finite-volume heat-kernel traces and Bogoliubov/free-gas thermodynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (("verify", cmd_verify), ("sweep", cmd_sweep), ("pathria", cmd_pathria)):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the timestamp for byte-identical reruns")
        p.add_argument("--jobs", type=int, default=1, help="concurrent sweep evaluations")
        p.add_argument("--quiet", action="store_true")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit status 2 for usage errors already
        return int(exc.code)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
