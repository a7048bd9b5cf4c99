"""Command-line front door: zero acquisition, explicit-formula checks, relation runs.

Exit codes: 0 PASS, 1 FAIL, 2 usage or configuration error, 3 SKIPPED for
missing data.
"""

import argparse
import configparser
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import arithmetic, euler, explicit_formula, interpolation, lfunctions, relations, testfn
from .explicit_formula import MissingZeroData
from .zeros import (ZeroCountError, ZeroStore, count_by_argument_principle, export_zeros,
                    fill_store, ingest, parse_zero_file)

log = logging.getLogger("zerosum")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_SKIPPED = 0, 1, 2, 3
OUT_ENV = "ZEROSUM_OUT"
RELATIONS = ("thm1", "thm2", "thm5", "thm6", "linnik", "symmetry", "tensor-split", "thm7", "thm8")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Settings shared by all subcommands; loaded from a key = value file."""

    registry: str | None = None
    center: float = 2.5
    radius: float = 1.0
    power: float = 1.0
    ef_tolerance: float = 1e-6
    identity_tolerance: float = 1e-5
    height: float = 500.0
    x_grid: list = field(default_factory=lambda: [0.1, 0.05, 0.02, 0.01])
    zero_files: dict = field(default_factory=dict)
    sigma: float = 1.0
    output: str = "zerosum-out"
    store: str | None = None

    def validate(self):
        for name in ("ef_tolerance", "identity_tolerance", "height", "radius", "power"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        try:
            relations.check_grid(self.x_grid)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        paths = list(self.zero_files.values()) + ([self.registry] if self.registry else [])
        for p in paths:
            if not Path(p).exists():
                raise ConfigError(f"path does not exist: {p}")
        return self

    def test_function(self):
        return testfn.bump(self.center, self.radius, self.power)


def load_config(path=None):
    cfg = RunConfig()
    if path:
        parser = configparser.ConfigParser()
        if not parser.read(path, encoding="utf-8"):
            raise ConfigError(f"cannot read config {path}")
        try:
            for key, value in parser["run"].items() if "run" in parser else ():
                if key == "x_grid":
                    cfg.x_grid = [float(v) for v in value.split(",")]
                elif key in ("registry", "output", "store"):
                    setattr(cfg, key, value)
                elif hasattr(cfg, key):
                    setattr(cfg, key, float(value))
                else:
                    raise ConfigError(f"unknown key {key!r} in [run]")
            if "zeros" in parser:
                cfg.zero_files = dict(parser["zeros"].items())
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    cfg.output = os.environ.get(OUT_ENV, cfg.output)
    return cfg.validate()


# ----------------------------------------------------------------- output

def _clean(obj):
    """Recursively round floats to 15 significant digits; complex -> {re, im}."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(float(obj.real)), "im": _clean(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(format(v, ".15g")) if math.isfinite(v) else str(v)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _write(outdir, name, text):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / name).write_text(text, encoding="utf-8")


def _store(cfg):
    store = ZeroStore.load(cfg.store) if cfg.store and Path(cfg.store).exists() else ZeroStore()
    for label, path in sorted(cfg.zero_files.items()):
        ingest(store, path, label)
    return store


def _label(label):
    try:
        return lfunctions.from_label(label)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"unknown L-function label {label!r}: {exc}") from None


# -------------------------------------------------------------- commands

def cmd_zeros(args, cfg):
    Lf = _label(args.label)
    if Lf.evaluate is None:
        raise ConfigError(f"{args.label}: no evaluation route; ingest a zero file instead")
    store = ZeroStore()
    try:
        fill_store(store, Lf, args.T)
    except ZeroCountError as exc:
        print(dumps({"label": Lf.label, "T": args.T, "error": str(exc), "complete": False}))
        return EXIT_FAIL
    gammas = store.ordinates[Lf.label]
    positive = [g for g in gammas if g > 0]
    expected = count_by_argument_principle(Lf, args.T)
    out = Path(args.out or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    export_zeros(gammas, out / f"{Lf.label}.txt", Lf.label)
    summary = {"label": Lf.label, "T": args.T, "count": len(positive),
               "argument_principle": expected, "complete": len(positive) == expected,
               "file": str(out / f"{Lf.label}.txt")}
    print(dumps(summary), end="")
    return EXIT_PASS if summary["complete"] else EXIT_FAIL


def cmd_ingest(args, cfg):
    target = args.store or cfg.store
    if not target:
        raise ConfigError("ingest needs --store")
    store = ZeroStore.load(target) if Path(target).exists() else ZeroStore()
    try:
        gammas, file_label = parse_zero_file(args.file)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    label = args.label or file_label or Path(args.file).stem
    before = store.count(label)
    store.add(label, gammas, "file")
    store.save(target)
    print(dumps({"label": label, "read": len(gammas), "stored": store.count(label),
                 "new": store.count(label) - before}), end="")
    return EXIT_PASS


def cmd_verify_ef(args, cfg):
    Lf = _label(args.label)
    store = _store(cfg)
    h = cfg.test_function()
    tol = args.tolerance or cfg.ef_tolerance
    try:
        rep = explicit_formula.verify(Lf, h, store, tol, args.T or cfg.height)
    except MissingZeroData as exc:
        print(dumps({"label": Lf.label, "status": "SKIPPED", "reason": str(exc)}), end="")
        return EXIT_SKIPPED
    body = rep.to_json()
    body["status"] = "PASS" if rep.passed else "FAIL"
    body["tolerance"] = tol
    body["test_function"] = h.label
    text = dumps(body)
    _write(args.out or cfg.output, f"ef_{Lf.label}.json", text)
    print(text, end="")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def run_relation(name, cfg, char="4.3", store=None):
    """Run one named relation; returns (status, json body, csv text or None)."""
    store = _store(cfg) if store is None else store
    h = cfg.test_function()
    grid = cfg.x_grid
    chi = arithmetic.character_from_label(char)
    if name == "thm1":
        rep = relations.theorem1_compare(lfunctions.dirichlet_function(chi),
                                         interpolation.phi_chi(chi), h, grid, store)
    elif name == "thm2":
        rep = relations.theorem2_compare(euler.delta_spec(_prime_limit(h, grid)),
                                         lfunctions.delta_function(), None, h, grid, store,
                                         A=-1.0, mu=1.0, nu=cfg.sigma)
    elif name == "thm5":
        rep = relations.theorem5_check(h, [1e-2, 1e-3, 1e-4], store, cfg.sigma)
    elif name in ("thm6", "thm8"):
        label = "DeltaxDelta"
        if label not in store.ordinates:
            return "SKIPPED", {"name": name, "status": "SKIPPED",
                               "reason": f"no zero file for {label}; ingest one first"}, None
        if name == "thm8":
            phi = interpolation.phi_delta()
            ident = explicit_formula.theorem8_identity(
                lfunctions.rankin_selberg_delta(), lfunctions.delta_function(), phi, phi, h,
                store, cfg.height, cfg.identity_tolerance, (phi.oscillation, phi.oscillation))
            body = ident.to_json()
            status = "PASS" if ident.passed else "FAIL"
            body["status"] = status
            return status, body, None
        phi = interpolation.phi_delta()
        rep = relations.theorem1_compare(lfunctions.rankin_selberg_delta(),
                                         interpolation.product_interp(phi, phi), h, grid, store,
                                         name="thm6")
    elif name == "linnik":
        rep = relations.linnik_classic(chi, [0.1, 0.03, 0.01, 0.003, 0.001], store)
    elif name == "symmetry":
        s = arithmetic.character_stream(arithmetic.character_from_label("5.2"))
        rep = relations.symmetry_experiment(interpolation.fourier_interp_u(s, 0.0),
                                            interpolation.fourier_interp_u(s, -0.5), h,
                                            [0.2, 0.1, 0.05], store)
    elif name == "tensor-split":
        spec = euler.delta_spec(_prime_limit(h, [1e-3]))
        rep = relations.tensor_report(spec, spec, h, [1e-2, 1e-3])
    elif name == "thm7":
        phi = interpolation.phi_chi(chi)
        ident = explicit_formula.theorem7_identity(
            lfunctions.dirichlet_function(chi), phi, testfn.bump(3.5, 2.4, 2), store, 300.0,
            cfg.identity_tolerance, phi.oscillation)
        body = ident.to_json()
        status = "PASS" if ident.passed else "FAIL"
        body["status"] = status
        return status, body, None
    else:
        raise ConfigError(f"unknown relation {name!r}")
    return rep.status, rep.to_json(), rep.to_csv()


def _prime_limit(h, grid):
    return int(h.b / min(grid)) + 2


def cmd_relation(args, cfg):
    if args.x_grid:
        try:
            cfg.x_grid = [float(v) for v in args.x_grid.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --x-grid: {exc}") from None
        cfg.validate()
    status, body, csv_text = run_relation(args.name, cfg, args.char)
    text = dumps(body)
    out = args.out or cfg.output
    _write(out, f"relation_{args.name}.json", text)
    if csv_text is not None:
        _write(out, f"relation_{args.name}.csv", csv_text)
    print(text, end="")
    return {"PASS": EXIT_PASS, "SKIPPED": EXIT_SKIPPED}.get(status, EXIT_FAIL)


REPORT_EF = ("zeta", "4.3", "5.2", "7.3")
REPORT_RELATIONS = ("tensor-split", "thm5", "thm7", "thm1", "thm6", "thm8")


def _report_item(item):
    kind, name, cfg = item
    if kind == "ef":
        rep = explicit_formula.verify(lfunctions.from_label(name), cfg.test_function(), None,
                                      cfg.ef_tolerance, cfg.height)
        body = rep.to_json()
        body["status"] = "PASS" if rep.passed else "FAIL"
        return body
    status, body, _ = run_relation(name, cfg)
    body["status"] = status
    return body


def cmd_report(args, cfg):
    items = [("ef", lab, cfg) for lab in REPORT_EF] + [("rel", n, cfg) for n in REPORT_RELATIONS]
    workers = max(1, args.workers or os.cpu_count() or 1)
    if workers == 1:
        results = [_report_item(it) for it in items]
    else:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_report_item, items))  # map keeps input order
    summary = {"explicit_formula": dict(zip(REPORT_EF, results[:len(REPORT_EF)])),
               "relations": dict(zip(REPORT_RELATIONS, results[len(REPORT_EF):]))}
    statuses = [r["status"] for r in results]
    summary["status"] = "FAIL" if "FAIL" in statuses else "PASS"
    text = dumps(summary)
    _write(args.out or cfg.output, "report.json", text)
    print(text, end="")
    return EXIT_FAIL if "FAIL" in statuses else EXIT_PASS


# ------------------------------------------------------------------ main

def build_parser():
    p = argparse.ArgumentParser(prog="zerosum", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key = value config file ([run] and [zeros] sections)")
    p.add_argument("--store", help="zero store directory")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: machine parallelism)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zeros", help="find zeros of zeta or L(s, chi) up to height T")
    z.add_argument("label", help="'zeta' or a Conrey character label such as 4.3")
    z.add_argument("--T", type=float, default=500.0)
    z.add_argument("--out", help="output directory")
    z.set_defaults(func=cmd_zeros)

    i = sub.add_parser("ingest", help="add a zero file to the store")
    i.add_argument("file")
    i.add_argument("--label")
    i.set_defaults(func=cmd_ingest)

    e = sub.add_parser("verify-ef", help="balance both sides of the explicit formula")
    e.add_argument("label")
    e.add_argument("--T", type=float)
    e.add_argument("--tolerance", type=float)
    e.add_argument("--out")
    e.set_defaults(func=cmd_verify_ef)

    r = sub.add_parser("relation", help="run one zero-sum relation")
    r.add_argument("name", choices=RELATIONS)
    r.add_argument("--char", default="4.3")
    r.add_argument("--x-grid", help="comma-separated descending x values")
    r.add_argument("--out")
    r.set_defaults(func=cmd_relation)

    rep = sub.add_parser("report", help="run the standard suite and write report.json")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.store:
            cfg.store = args.store
        if getattr(args, "store", None) is None:
            args.store = cfg.store
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"zerosum: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
