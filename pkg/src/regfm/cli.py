"""Command-line driver: ``regfm synth | image | selftest``.

Configuration comes from an optional JSON file; command-line flags
override it.  Keys (all optional, defaults shown)::

    {"mode": "far", "shape": "star", "disk_radius": 0.5, "k": 4.0,
     "q": [1.0, 1.0], "rho": 5.0, "count": 64, "noise": 0.0, "seed": 0,
     "filter": "tikhonov", "alpha": 1e-6, "beta": null,
     "grid": [-1, 1, -1, 1, 128, 128],
     "forward_trunc": 15, "kernel_trunc": 10}
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import datafiles, forward, operators, rfm, specfun
from .forward import ArrayGeometry, ConfigError, MediumParams, RadialShape
from .rfm import FilterKind, FilterSpec, Grid

log = logging.getLogger("regfm")


@dataclass
class RunConfig:
    mode: str = "far"
    shape: str = "star"
    disk_radius: float = 0.5
    k: float = 4.0
    q: complex = 1.0 + 1.0j
    rho: float = 5.0
    count: int = 64
    noise: float = 0.0
    seed: int = 0
    filter: str = "tikhonov"
    alpha: float = rfm.DEFAULT_ALPHA
    beta: float | None = None
    grid: tuple = (-1.0, 1.0, -1.0, 1.0, 128, 128)
    forward_trunc: int = 15
    kernel_trunc: int = operators.DEFAULT_KERNEL_ORDER

    def validate(self) -> "RunConfig":
        if self.mode not in ("far", "near"):
            raise ConfigError(f"mode must be 'far' or 'near', not {self.mode!r}")
        if not self.k > 0:
            raise ConfigError("k must be positive")
        if self.count < 1:
            raise ConfigError("count must be positive")
        if self.noise < 0:
            raise ConfigError("noise must be nonnegative")
        if len(self.grid) != 6:
            raise ConfigError("grid needs xmin,xmax,ymin,ymax,nx,ny")
        self.shape_obj()
        self.filter_spec()
        self.grid_obj()
        if self.mode == "near":
            operators.KernelTruncation(self.kernel_trunc).check(self.geometry())
        return self

    def shape_obj(self) -> RadialShape:
        try:
            return RadialShape(self.shape, self.disk_radius)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def filter_spec(self) -> FilterSpec:
        try:
            return FilterSpec(FilterKind(self.filter), self.alpha, self.beta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def grid_obj(self) -> Grid:
        x0, x1, y0, y1, nx, ny = self.grid
        return Grid(float(x0), float(x1), float(y0), float(y1), int(nx), int(ny))

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.count, self.rho)


def _parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(str(v).replace(" ", "").replace("i", "j"))


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    raw = {}
    if path:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "q" in raw:
        raw["q"] = _parse_complex(raw["q"])
    if "grid" in raw:
        raw["grid"] = tuple(raw["grid"])
    try:
        cfg = RunConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


def _data_meta(cfg: RunConfig) -> dict:
    meta = {
        "mode": cfg.mode,
        "shape": cfg.shape,
        "k": cfg.k,
        "count": cfg.count,
        "noise": cfg.noise,
        "seed": cfg.seed,
    }
    if cfg.shape == "disk":
        meta["disk_radius"] = cfg.disk_radius
    if cfg.mode == "far":
        meta["q"] = [cfg.q.real, cfg.q.imag]
    else:
        meta.update(rho=cfg.rho, forward_trunc=cfg.forward_trunc, kernel_trunc=cfg.kernel_trunc)
    return meta


def synthesize(cfg: RunConfig):
    """Noise-free data matrix for ``cfg`` plus the residual report (near mode)."""
    shape = cfg.shape_obj()
    geom = cfg.geometry()
    if cfg.mode == "far":
        return forward.born_farfield_matrix(shape, MediumParams(cfg.k, cfg.q), geom), None
    return forward.soundsoft_nearfield_matrix(shape, cfg.k, geom, cfg.forward_trunc)


def condition(data, cfg: RunConfig) -> np.ndarray:
    """Noisy, conditioned (Hermitian PSD) operator that the imaging step uses."""
    noisy = forward.add_noise(data, cfg.noise, cfg.seed)
    if cfg.mode == "far":
        return operators.sharp(noisy)
    geom = cfg.geometry()
    trunc = operators.KernelTruncation(cfg.kernel_trunc)
    q = operators.q_kernel_matrix(cfg.k, cfg.rho, geom, trunc)
    r = operators.r_kernel_matrix(geom, trunc)
    return operators.sharp(operators.transform_nearfield(noisy, q, r))


def cmd_synth(cfg: RunConfig, out: Path) -> int:
    data, report = synthesize(cfg)
    if report is not None:
        print(report.summary(), file=sys.stderr)
        for msg in report.warnings:
            print(f"warning: {msg}", file=sys.stderr)
    meta = _data_meta(cfg)
    if report is not None:
        meta["max_residual"] = report.max_residual
    datafiles.write_complex_csv(out, data, meta)
    print(f"wrote {out} ({data.shape[0]}x{data.shape[1]} complex)")
    return 0


def _merge_data_meta(cfg: RunConfig, meta: dict) -> RunConfig:
    """Physical parameters come from the data file; imaging ones from cfg."""
    fields = {}
    for key in ("mode", "shape", "k", "count", "rho", "disk_radius", "kernel_trunc", "forward_trunc"):
        if key in meta:
            fields[key] = meta[key]
    if "q" in meta:
        fields["q"] = _parse_complex(meta["q"])
    return dataclasses.replace(cfg, **fields).validate()


def cmd_image(cfg: RunConfig, data_path: Path, out_prefix: Path) -> int:
    meta, data = datafiles.read_complex_csv(data_path)
    cfg = _merge_data_meta(cfg, meta)
    if data.shape != (cfg.count, cfg.count):
        raise ConfigError(f"data is {data.shape}, expected {cfg.count}x{cfg.count}")
    conditioned = condition(data, cfg)
    spec = cfg.filter_spec()
    grid = cfg.grid_obj()
    field_ = rfm.imaging_field(conditioned, grid, spec, cfg.k, cfg.geometry())

    out_prefix = Path(out_prefix)
    w_meta = {
        "kind": "imaging_functional",
        "filter": spec.kind.value,
        "alpha": spec.alpha,
        "noise": cfg.noise,
        "seed": cfg.seed,
        "grid": list(cfg.grid),
        "source": meta,
        "rows": "y ascending",
    }
    theta = np.linspace(0.0, 2.0 * math.pi, 257)
    bnd = forward.boundary_point(cfg.shape_obj(), theta)
    # writes happen together, after all computation
    datafiles.write_real_csv(out_prefix.with_name(out_prefix.name + "_W.csv"), field_.values, w_meta)
    datafiles.write_pgm(out_prefix.with_name(out_prefix.name + ".pgm"), field_.values)
    datafiles.write_real_csv(
        out_prefix.with_name(out_prefix.name + "_boundary.csv"),
        bnd,
        {"kind": "boundary", "shape": cfg.shape, "columns": ["x", "y"]},
    )
    print(f"wrote {out_prefix}_W.csv, {out_prefix}.pgm, {out_prefix}_boundary.csv")
    return 0


# ---------------------------------------------------------------- selftest

J0_AT_1 = 0.7651976865579666
Y0_AT_1 = 0.0882569642156770


def run_selftest(q_scale: float = 1.0):
    """Return a list of ``(name, passed, detail)``."""
    results = []

    err = max(abs(specfun.bessel_j(0, 1.0) - J0_AT_1), abs(specfun.bessel_y(0, 1.0) - Y0_AT_1))
    results.append(("bessel fixtures J0(1), Y0(1)", err <= 1e-10, f"max error {err:.2e}"))

    x = np.linspace(0.5, 50.0, 200)
    wr = 0.0
    for n in range(21):
        lhs = specfun.bessel_j(n + 1, x) * specfun.bessel_y(n, x) - specfun.bessel_j(
            n, x
        ) * specfun.bessel_y(n + 1, x)
        wr = max(wr, float(np.max(np.abs(lhs - 2.0 / (math.pi * x)))))
    results.append(("Wronskian n<=20, x in [0.5, 50]", wr <= 1e-9, f"max error {wr:.2e}"))

    k, a = 4.0, 0.5
    geom = ArrayGeometry(64, 5.0)
    n_mat, _ = forward.soundsoft_nearfield_matrix(RadialShape.disk(a), k, geom)
    q = operators.q_kernel_matrix(k, 5.0, geom, scale=q_scale)
    r = operators.r_kernel_matrix(geom)
    t = operators.transform_nearfield(n_mat, q, r)
    d = forward.disk_farfield_matrix(a, k, geom, 10)
    c = operators.fit_constant(t, d)
    fit_err = np.linalg.norm(t - c * d) / np.linalg.norm(t)
    c_ref = operators.disk_transform_constant(k)
    drift = abs(c / c_ref - 1.0)
    results.append(
        (
            "disk oracle: Q N Q^T R = c F_disk",
            fit_err < 0.05 and drift < 1e-3,
            f"c = {c.real:.10f}{c.imag:+.10f}i (expected {c_ref.real:.10f}{c_ref.imag:+.10f}i, "
            f"drift {drift:.2e}), fit error {fit_err:.2e}",
        )
    )

    t_vals = np.linspace(1e-3, 1.0, 1000)
    worst = 0.0
    ok = True
    for kind in FilterKind:
        phi = np.asarray(rfm.filter_value(FilterSpec(kind, 1e-3), t_vals, 1.0))
        ok &= bool(np.all((phi >= 0) & (phi <= 1)))
        worst = max(worst, float(np.max(phi)))
    results.append(("filter bounds 0 <= phi <= 1", ok, f"max phi {worst:.6f}"))
    return results


def cmd_selftest(q_scale: float = 1.0) -> int:
    results = run_selftest(q_scale)
    for name, passed, detail in results:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    failed = sum(not p for _, p, _ in results)
    print(f"{len(results) - failed}/{len(results)} passed")
    return 1 if failed else 0


# ---------------------------------------------------------------- argparse


def _grid_arg(text):
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("grid is xmin,xmax,ymin,ymax,nx,ny")
    return tuple(float(p) for p in parts[:4]) + tuple(int(p) for p in parts[4:])


def _add_common(p):
    d = RunConfig()
    p.add_argument("--config", type=Path, help="JSON config file (flags override it)")
    p.add_argument("--shape", choices=[s.value for s in forward.ShapeKind], help=f"default {d.shape}")
    p.add_argument("--k", type=float, help=f"wave number (default {d.k})")
    p.add_argument("--alpha", type=float, help=f"regularization parameter (default {d.alpha:g})")
    p.add_argument("--filter", choices=[f.value for f in FilterKind], help=f"default {d.filter}")
    p.add_argument("--noise", type=float, help=f"relative noise level delta (default {d.noise})")
    p.add_argument("--seed", type=int, help=f"noise seed (default {d.seed})")
    p.add_argument("--grid", type=_grid_arg, help="xmin,xmax,ymin,ymax,nx,ny (default -1,1,-1,1,128,128)")
    p.add_argument("--out", type=Path, required=True, help="output file (synth) or prefix (image)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regfm", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a noise-free data matrix")
    p.add_argument("--mode", choices=["far", "near"], help="far (Born) or near (sound-soft); default far")
    _add_common(p)

    p = sub.add_parser("image", help="reconstruct W(z) from a data file")
    p.add_argument("data", type=Path, help="complex CSV written by 'synth'")
    _add_common(p)

    p = sub.add_parser("selftest", help="run the built-in fixture checks")
    p.add_argument("--q-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(message)s")
    try:
        if args.command == "selftest":
            return cmd_selftest(args.q_scale)
        overrides = {
            key: getattr(args, key, None)
            for key in ("mode", "shape", "k", "alpha", "filter", "noise", "seed", "grid")
        }
        cfg = load_config(args.config, overrides)
        if args.command == "synth":
            return cmd_synth(cfg, args.out)
        return cmd_image(cfg, args.data, args.out)
    except (ConfigError, datafiles.DataFileError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
