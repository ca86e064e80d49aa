"""Experiment runner: every verification as a subcommand with JSON config,
deterministic seeding, worker control, and JSON/CSV output.

Exit codes: 0 all checks passed, 2 a statistical (or exact) check failed,
1 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import dataclass

from . import arrangement as arr_mod
from .arrangement import Arrangement, ArrangementError, from_descriptor, subset_labels
from .dimred import (balanced_weight_check, check_asa_dr, check_dr,
                     tonks_series_check, typeD_unbalanced_check)
from .exact_linalg import FieldMismatchError, SingularSystemError
from .geometry import capped_cylinder_shape, cylinder_shape, sphere_shape
from .matroid import LinearOrder, MatroidView
from .mayer import SpanningError, mmc_d0, mmc_mc, pressure_coefficient
from .polymer import (G_FUNCTIONS, dump_samples_csv, planar_invariance_check,
                      polymer_svg, project_expectation,
                      safe_projection_expectation, volume_mc)


class CliError(Exception):
    """Usage or configuration problem; exits with code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits 2 on usage errors by default; 2 is reserved for
        # failed statistical checks here
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class ExperimentConfig:
    family: str = "braid"
    n: int = 3
    k: int | None = None
    colors: list | None = None
    radii: list | None = None
    normals: list | None = None
    d: int = 1
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    radii_list: list | None = None
    shape: str = "cylinder"
    length: float = 1.0
    g: str = "const1"
    subset: list | None = None
    m_max: int = 3
    orders: int = 0
    safe: bool = False

    def validate(self):
        if self.samples < 1:
            raise CliError("samples must be >= 1")
        if self.workers < 1:
            raise CliError("workers must be >= 1")
        if self.d < 0:
            raise CliError("d must be >= 0")

    def descriptor(self) -> dict:
        desc = {"family": self.family}
        if self.family == "widom_rowlinson":
            if not self.colors:
                raise CliError("widom_rowlinson needs --colors")
            desc["colors"] = list(self.colors)
        elif self.family == "custom":
            if not self.normals:
                raise CliError("custom arrangements need normals in --config")
            desc["normals"] = self.normals
        else:
            desc["n"] = self.n
        if self.family == "dowling":
            if self.k is None:
                raise CliError("dowling needs --k")
            desc["k"] = self.k
        if self.radii:
            desc["radii"] = list(self.radii)
        return desc

    def build_arrangement(self) -> Arrangement:
        try:
            return from_descriptor(self.descriptor())
        except (ArrangementError, FieldMismatchError) as exc:
            raise CliError(str(exc)) from exc

    def echo(self) -> dict:
        d = {"family": self.family, "n": self.n, "d": self.d,
             "samples": self.samples, "seed": self.seed, "workers": self.workers}
        for key in ("k", "colors", "radii", "normals", "radii_list", "subset"):
            value = getattr(self, key)
            if value is not None:
                d[key] = value
        for key in ("shape", "length", "g", "m_max", "orders", "safe"):
            d[key] = getattr(self, key)
        return d


def _parse_floats(text: str) -> list:
    return [float(v) for v in text.split(",") if v != ""]


def _parse_ints(text: str) -> list:
    return [int(v) for v in text.split(",") if v != ""]


def _build_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    for key in ("family", "n", "k", "d", "samples", "seed", "workers",
                "shape", "length", "g", "m_max", "orders", "safe"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "colors", None):
        cfg.colors = _parse_ints(args.colors)
    if getattr(args, "radii", None):
        cfg.radii = _parse_floats(args.radii)
    if getattr(args, "radii_list", None):
        cfg.radii_list = [_parse_floats(part)
                          for part in args.radii_list.split(";") if part]
    if getattr(args, "subset", None):
        cfg.subset = _parse_ints(args.subset)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config: {exc}") from exc
        for key, value in data.items():
            if not hasattr(cfg, key):
                raise CliError(f"unknown config key {key!r}")
            setattr(cfg, key, value)  # file overrides flags
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# subcommand implementations (each returns (payload dict, passed bool))
# --------------------------------------------------------------------------

def _cmd_chi(cfg: ExperimentConfig):
    arr = cfg.build_arrangement()
    view = MatroidView(arr)
    chi = view.chi_at_zero()
    default_order = LinearOrder.default(arr.size)
    rows = [{"order": list(default_order.elements),
             "safe_bases": view.safe_base_count(order=default_order)}]
    rng = random.Random(cfg.seed)
    for _ in range(cfg.orders):
        order = LinearOrder.shuffled(arr.size, rng)
        rows.append({"order": list(order.elements),
                     "safe_bases": view.safe_base_count(order=order)})
    sign_ok = all(r["safe_bases"] == (-1) ** arr.ambient_dim * chi for r in rows)
    payload = {"chi_at_zero": chi, "rank": arr.ambient_dim,
               "orders": rows, "sign_relation_ok": sign_ok}
    return payload, sign_ok


def _cmd_bases(cfg: ExperimentConfig):
    arr = cfg.build_arrangement()
    view = MatroidView(arr)
    bases = [{"mask": b, "hyperplanes": list(subset_labels(arr, b))}
             for b in view.bases()]
    return {"count": len(bases), "bases": bases}, True


def _subset_mask(cfg: ExperimentConfig, arr: Arrangement) -> int:
    if cfg.subset is None:
        return arr.ground_mask
    mask = 0
    for e in cfg.subset:
        if not 0 <= e < arr.size:
            raise CliError(f"subset element {e} outside the ground set")
        mask |= 1 << e
    return mask


def _cmd_mmc(cfg: ExperimentConfig):
    arr = cfg.build_arrangement()
    view = MatroidView(arr)
    mask = _subset_mask(cfg, arr)
    try:
        if cfg.d == 0:
            return {"subset_mask": mask, "exact": True,
                    "value": mmc_d0(view, mask)}, True
        est = mmc_mc(view, mask, cfg.d, cfg.samples, cfg.seed, cfg.workers)
    except SpanningError as exc:
        raise CliError(str(exc)) from exc
    return {"subset_mask": mask, "exact": False,
            "estimate": est.to_json_dict("mmc")}, True


def _cmd_pressure(cfg: ExperimentConfig):
    arr = cfg.build_arrangement()
    view = MatroidView(arr)
    est = pressure_coefficient(view, cfg.d, cfg.samples, cfg.seed, cfg.workers)
    return {"exact": cfg.d == 0,
            "estimate": est.to_json_dict("pressure coefficient")}, True


def _cmd_polymer_volume(cfg: ExperimentConfig, svg=None, dump=None):
    arr = cfg.build_arrangement()
    dim = cfg.d
    if dim < 2:
        raise CliError("polymer-volume interprets --d as the polymer "
                       "dimension, which must be >= 2")
    est = volume_mc(arr, dim, cfg.samples, cfg.seed, cfg.workers)
    if dump:
        dump_samples_csv(dump, arr, dim, min(cfg.samples, 200), cfg.seed)
    if svg:
        if dim != 2:
            raise CliError("SVG snapshots are drawn for 2-D polymers")
        polymer_svg(svg, arr, cfg.seed)
    return {"dim": dim, "estimate": est.to_json_dict("polymer volume")}, True


def _cmd_invariance(cfg: ExperimentConfig):
    arr = cfg.build_arrangement()
    if not cfg.radii_list:
        raise CliError("invariance needs --radii-list, e.g. '1,1,1;1,2,5'")
    report = planar_invariance_check(arr, cfg.radii_list, cfg.samples,
                                     cfg.seed, cfg.workers)
    payload = report.to_json_dict()
    payload["_csv_rows"] = [
        {"radii": ";".join(map(str, radii)), "mean": est.mean,
         "stderr": est.stderr, "target": report.target, "z_to_target": z}
        for radii, est, z in zip(report.radii_list, report.estimates,
                                 report.z_to_target)]
    return payload, report.passed


def _cmd_dr_check(cfg: ExperimentConfig):
    arr = cfg.build_arrangement()
    try:
        report = check_dr(arr, cfg.d, cfg.samples, cfg.seed, cfg.workers)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    return report.to_json_dict(), report.passed


def _cmd_tonks(cfg: ExperimentConfig):
    try:
        report = tonks_series_check(cfg.m_max, 1, cfg.samples, cfg.seed,
                                    cfg.workers)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    return report.to_json_dict(), report.passed


def _cmd_type_d(cfg: ExperimentConfig):
    try:
        report = typeD_unbalanced_check(cfg.n, cfg.d, cfg.samples, cfg.seed,
                                        cfg.workers)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    ok = report.combinatorial_ok and report.dr.passed
    payload = report.to_json_dict()
    payload["balanced_weight_ok"] = balanced_weight_check(min(cfg.n + 1, 5))
    return payload, ok and payload["balanced_weight_ok"]


def _shapes_for(cfg: ExperimentConfig, arr: Arrangement):
    dim = cfg.d + 2
    makers = {"sphere": lambda: sphere_shape(dim),
              "cylinder": lambda: cylinder_shape(dim, cfg.length),
              "capped_cylinder": lambda: capped_cylinder_shape(dim, cfg.length)}
    if cfg.shape not in makers:
        raise CliError(f"unknown shape {cfg.shape!r}")
    return [makers[cfg.shape]() for _ in range(arr.size)]


def _cmd_asa_dr(cfg: ExperimentConfig):
    arr = cfg.build_arrangement()
    try:
        shapes = _shapes_for(cfg, arr)
        report = check_asa_dr(arr, shapes, cfg.d, cfg.samples, cfg.seed,
                              cfg.workers)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    payload = report.to_json_dict()
    payload["shape"] = {"kind": cfg.shape, "dim": cfg.d + 2,
                        "length": cfg.length}
    return payload, report.passed


def _cmd_project_law(cfg: ExperimentConfig):
    arr = cfg.build_arrangement()
    if cfg.g not in G_FUNCTIONS:
        raise CliError(f"unknown g {cfg.g!r}; choose from {sorted(G_FUNCTIONS)}")
    try:
        report = project_expectation(arr, cfg.d, cfg.g, cfg.samples, cfg.seed,
                                     cfg.workers)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    payload = report.to_json_dict()
    passed = report.passed
    if cfg.safe:
        order = LinearOrder.default(arr.size)
        safe_est = safe_projection_expectation(arr, cfg.d, cfg.g, order,
                                               cfg.samples, cfg.seed + 7,
                                               cfg.workers)
        from .mayer import z_score
        z_safe = z_score(safe_est, report.mmc_side)
        payload["safe_side"] = safe_est.to_json_dict("safe-base projection")
        payload["z_safe_vs_mmc"] = z_safe
        passed = passed and abs(z_safe) < 4.0
        payload["pass"] = passed
    return payload, passed


_COMMANDS = {
    "chi": _cmd_chi,
    "bases": _cmd_bases,
    "mmc": _cmd_mmc,
    "pressure-coeff": _cmd_pressure,
    "invariance": _cmd_invariance,
    "dr-check": _cmd_dr_check,
    "tonks": _cmd_tonks,
    "type-d": _cmd_type_d,
    "asa-dr": _cmd_asa_dr,
    "project-law": _cmd_project_law,
}


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _flatten(prefix: str, value, out: dict):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for i, item in enumerate(value):
            _flatten(f"{prefix}[{i}]", item, out)
    else:
        out[prefix] = value


def _emit(payload: dict, fmt: str, out_path: str | None):
    rows = payload.pop("_csv_rows", None)
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        if rows is None:
            flat: dict = {}
            _flatten("", payload, flat)
            rows = [flat]
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(rows[0].keys())
        for row in rows:
            writer.writerow([json.dumps(v) if isinstance(v, (list, dict)) else v
                             for v in row.values()])
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--family", choices=sorted(arr_mod._FAMILIES), default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--k", type=int, default=None)
    sub.add_argument("--colors", default=None, help="comma list, e.g. 2,2")
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument("--samples", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--workers", type=int, default=None)
    sub.add_argument("--radii", default=None, help="comma list of radii")
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--config", default=None,
                     help="JSON config file; file values override flags")


def build_parser() -> _Parser:
    parser = _Parser(prog="polygas",
                     description="matroid / polymer / reduction experiments")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub = subs.add_parser(name)
        _add_common(sub)
        if name == "chi":
            sub.add_argument("--orders", type=int, default=None,
                             help="extra random linear orders to report")
        if name == "mmc":
            sub.add_argument("--subset", default=None,
                             help="comma list of hyperplane indices")
        if name == "invariance":
            sub.add_argument("--radii-list", dest="radii_list", default=None,
                             help="semicolon-separated radii assignments")
        if name == "tonks":
            sub.add_argument("--m-max", dest="m_max", type=int, default=None)
        if name == "asa-dr":
            sub.add_argument("--shape", default=None,
                             choices=("sphere", "cylinder", "capped_cylinder"))
            sub.add_argument("--length", type=float, default=None)
        if name == "project-law":
            sub.add_argument("--g", default=None,
                             choices=sorted(G_FUNCTIONS))
            sub.add_argument("--safe", action="store_true", default=None)
    poly = subs.add_parser("polymer-volume")
    _add_common(poly)
    poly.add_argument("--svg", default=None, help="write a 2-D snapshot here")
    poly.add_argument("--dump-samples", dest="dump_samples", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _build_config(args)
        started = time.perf_counter()
        if args.command == "polymer-volume":
            payload, passed = _cmd_polymer_volume(
                cfg, svg=getattr(args, "svg", None),
                dump=getattr(args, "dump_samples", None))
        else:
            payload, passed = _COMMANDS[args.command](cfg)
        payload = dict(payload)
        payload["config"] = cfg.echo()
        payload.setdefault("wall_time", time.perf_counter() - started)
        _emit(payload, args.format, args.out)
        return 0 if passed else 2
    except CliError as exc:
        print(f"polygas: error: {exc}", file=sys.stderr)
        return 1
    except (ArrangementError, SpanningError, FieldMismatchError,
            SingularSystemError) as exc:
        print(f"polygas: error: {exc}", file=sys.stderr)
        return 1


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
