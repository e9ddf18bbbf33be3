"""Command-line front end: verification suites, reports and data dumps.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error.
Report commands honor --format; data commands always print JSON.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import crc, mirror, quantum
from .errors import AncrcError, ConfigError
from .geometry import EFFECTIVE, INEFFECTIVE, AnGeometry, DiskConfig, classical_table, sample_geometry
from .report import dump_json, emit_report
from .special import (
    FDParams,
    PeriodParams,
    fd_euler_integral,
    fd_leading_asymptotics,
    lauricella_fd,
    twisted_period,
)
from .suite import SECTIONS, SuiteConfig, run_suite

_CONFIG_KEYS = {"n", "seed", "tol", "K", "d_max", "only", "samples", "workers", "format", "out"}


def parse_complex(s: str) -> complex:
    s = s.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


def parse_complex_list(s: str) -> list[complex]:
    return [parse_complex(x) for x in s.split(",") if x.strip()]


def parse_n_values(s: str) -> tuple[int, ...]:
    """'1,2,4' or '1-3'."""
    out = []
    try:
        for part in str(s).split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise ConfigError(f"bad n range {s!r}") from None
    if not out:
        raise ConfigError("n range is empty")
    return tuple(out)


def read_config(path: str) -> dict:
    """Plain key=value lines; '#' starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key=value")
        k, v = (x.strip() for x in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{no}: unknown key {k!r}")
        out[k] = v
    return out


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", help="n, or a range like 1-3 / 1,2,4 for suites")
    p.add_argument("--seed", type=int, help="seed (default: $ANCRC_SEED, else 0)")
    p.add_argument("--tol", type=float, help="force one tolerance for every residual check")
    p.add_argument("--K", type=int, help="truncation order of the z-series")
    p.add_argument("--d-max", dest="d_max", type=int, help="largest winding")
    p.add_argument("--samples", type=int, help="random samples per check")
    p.add_argument("--workers", type=int, help="worker threads for the suite")
    p.add_argument("--only", action="append",
                   help=f"restrict the suite to a section, one of {', '.join(SECTIONS)} (repeatable)")
    p.add_argument("--format", choices=("json", "csv", "human"), help="report format")
    p.add_argument("--out", help="write output to PATH instead of stdout")
    p.add_argument("--config", help="key=value file; flags override it")


def _weights(p: argparse.ArgumentParser):
    p.add_argument("--alpha1", type=parse_complex, help="torus weight alpha1 (default: sampled from the seed)")
    p.add_argument("--alpha2", type=parse_complex, help="torus weight alpha2")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ancrc", description="Crepant-resolution checks for the A_n pair.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("verify", help="run the verification suite")
    _common(p)

    p = sub.add_parser("geometry", help="classical data table as JSON")
    _common(p)
    _weights(p)

    p = sub.add_parser("u-matrix", help="U(z) and the A B = c U factorization")
    _common(p)
    _weights(p)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--route", choices=("closed", "ktheory"), default="closed")

    p = sub.add_parser("disk", help="disk functions D_k^+(d) for d <= d_max")
    _common(p)
    _weights(p)
    p.add_argument("--leg", choices=(INEFFECTIVE, EFFECTIVE), default=INEFFECTIVE)

    p = sub.add_parser("ocrc", help="open CRC map and its checks")
    osub = p.add_subparsers(dest="action", required=True)
    q = osub.add_parser("verify")
    _common(q)
    q = osub.add_parser("map")
    _common(q)
    _weights(q)
    q.add_argument("--z", type=parse_complex, required=True)
    q.add_argument("--leg", choices=(INEFFECTIVE, EFFECTIVE), default=INEFFECTIVE)
    q.add_argument("--route", choices=("u", "k"), default="u")

    p = sub.add_parser("monodromy", help="n = 1 monodromy matrices")
    _common(p)
    p.add_argument("--a", type=parse_complex)
    p.add_argument("--b", type=parse_complex)
    p.add_argument("--alpha1", type=parse_complex)
    p.add_argument("--alpha2", type=parse_complex)
    p.add_argument("--z", type=parse_complex)
    p.add_argument("--loop", choices=("LR1", "CP", "LR2", "all"), default="all")
    p.add_argument("--oracle", action="store_true", help="also continue the ODE numerically (needs weights and z)")

    p = sub.add_parser("mirror", help="mirror checks and canonical frames")
    msub = p.add_subparsers(dest="action", required=True)
    q = msub.add_parser("check")
    _common(q)
    q = msub.add_parser("frame")
    _common(q)
    _weights(q)
    q.add_argument("--kappa", type=parse_complex_list, required=True, help="kappa_1..kappa_n, comma separated")

    p = sub.add_parser("jfun", help="J-function vector from the twisted periods")
    _common(p)
    _weights(p)
    p.add_argument("--side", choices=("Y", "X"), default="Y")
    p.add_argument("--point", type=parse_complex_list, required=True,
                   help="t_1..t_N on Y, x_1..x_N on X (comma separated)")
    p.add_argument("--z", type=parse_complex, required=True)

    p = sub.add_parser("lauricella", help="Lauricella F_D evaluation")
    lsub = p.add_subparsers(dest="action", required=True)
    for name in ("eval", "continue"):
        q = lsub.add_parser(name)
        _common(q)
        q.add_argument("--a", type=parse_complex, required=True)
        q.add_argument("--b", type=parse_complex_list, required=True)
        q.add_argument("--c", type=parse_complex, required=True)
        q.add_argument("--w", type=parse_complex_list, required=True)
        if name == "eval":
            q.add_argument("--method", choices=("series", "euler"), default="series")
    q = lsub.add_parser("period")
    _common(q)
    _weights(q)
    q.add_argument("--kappa", type=parse_complex_list, required=True)
    q.add_argument("--z", type=parse_complex, required=True)
    q.add_argument("--method", choices=("auto", "series", "quadrature"), default="auto")

    p = sub.add_parser("calib", help="calibration checks")
    csub = p.add_subparsers(dest="action", required=True)
    q = csub.add_parser("check")
    _common(q)
    return ap


def _settings(args) -> dict:
    """Defaults <- config file <- ANCRC_SEED <- flags."""
    s = {"n": None, "seed": 0, "tol": None, "K": 4, "d_max": 6, "only": None, "samples": 3,
         "workers": 1, "format": "json", "out": None}
    if getattr(args, "config", None):
        s.update(read_config(args.config))
    env = os.environ.get("ANCRC_SEED")
    if env is not None:
        s["seed"] = env
    for k in _CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            s[k] = v
    try:
        s["seed"] = int(s["seed"])
        s["K"] = int(s["K"])
        s["d_max"] = int(s["d_max"])
        s["samples"] = int(s["samples"])
        s["workers"] = int(s["workers"])
        s["tol"] = None if s["tol"] in (None, "") else float(s["tol"])
    except ValueError as exc:
        raise ConfigError(f"bad setting: {exc}") from None
    if isinstance(s["only"], str):
        s["only"] = [x.strip() for x in s["only"].split(",") if x.strip()]
    elif s["only"]:
        s["only"] = [y.strip() for x in s["only"] for y in x.split(",") if y.strip()]
    if s["format"] not in ("json", "csv", "human"):
        raise ConfigError(f"unknown format {s['format']!r}")
    return s


def _suite(s: dict, only=None) -> int:
    cfg = SuiteConfig(
        n_values=parse_n_values(s["n"] or "1-3"), samples=s["samples"], seed=s["seed"], tol=s["tol"],
        K=s["K"], d_max=s["d_max"], only=tuple(only or s["only"] or ()) or None, workers=s["workers"],
    )
    reports, status = run_suite(cfg)
    _write(s, emit_report(reports, s["format"], seed=cfg.seed, config=cfg.as_dict()))
    return status


def _write(s: dict, data: bytes):
    if s["out"]:
        try:
            with open(s["out"], "wb") as fh:
                fh.write(data)
        except OSError as exc:
            raise ConfigError(f"cannot write {s['out']}: {exc}") from None
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _single_n(s: dict) -> int:
    if s["n"] is None:
        return 1
    ns = parse_n_values(s["n"])
    if len(ns) != 1:
        raise ConfigError(f"this command takes a single n, got {s['n']!r}")
    return ns[0]


def _geo(args, s: dict, n: int | None = None) -> AnGeometry:
    n = _single_n(s) if n is None else n
    a1, a2 = getattr(args, "alpha1", None), getattr(args, "alpha2", None)
    if (a1 is None) != (a2 is None):
        raise ConfigError("give both --alpha1 and --alpha2 or neither")
    if a1 is None:
        return sample_geometry(np.random.default_rng(s["seed"]), n)
    return AnGeometry(n, a1, a2)


def _weights_dict(geo: AnGeometry) -> dict:
    return {"n": geo.n, "alpha1": geo.alpha1, "alpha2": geo.alpha2}


def _dispatch(args, s: dict) -> int:
    cmd = args.cmd
    act = getattr(args, "action", None)
    if cmd == "verify":
        return _suite(s)
    if cmd == "mirror" and act == "check":
        return _suite(s, ["mirror"])
    if cmd == "calib":
        return _suite(s, ["calib"])
    if cmd == "ocrc" and act == "verify":
        return _suite(s, ["ocrc"])

    if cmd == "geometry":
        out = classical_table(_geo(args, s))
    elif cmd == "u-matrix":
        geo = _geo(args, s)
        U = crc.u_closed(geo, args.z) if args.route == "closed" else crc.u_ktheory(geo, args.z)
        f = crc.factorization_check(geo, args.z)
        out = {**_weights_dict(geo), "z": args.z, "route": args.route, "U": U,
               "factorization": {"c": f.c, "spread": f.spread, "predicted": f.predicted}}
    elif cmd == "disk":
        geo = _geo(args, s)
        dc = DiskConfig.for_leg(geo, args.leg)
        vals = [{"d": d, "k": k, "value": crc.disk_function(dc, d, k)}
                for d in range(1, s["d_max"] + 1) for k in range(1, geo.N + 1) if crc.compatible(dc, d, k)]
        out = {**_weights_dict(geo), "leg": args.leg, "n_e": dc.n_e, "disk_functions": vals}
    elif cmd == "ocrc":
        geo = _geo(args, s)
        dc = DiskConfig.for_leg(geo, args.leg)
        out = {**_weights_dict(geo), "z": args.z, "leg": args.leg, "route": args.route,
               "O": crc.o_map(geo, dc, args.z, args.route)}
    elif cmd == "monodromy":
        out = _monodromy(args)
    elif cmd == "mirror":
        geo = _geo(args, s)
        if len(args.kappa) != geo.n:
            raise ConfigError(f"expected {geo.n} kappa values")
        fr = mirror.canonical_frame(mirror.HurwitzPoint(geo, 1.0, tuple(args.kappa)))
        out = {**_weights_dict(geo), "kappa": args.kappa, "critical_points": fr.crit_q,
               "critical_values": fr.u, "delta": fr.delta}
    elif cmd == "jfun":
        geo = _geo(args, s)
        if len(args.point) != geo.N:
            raise ConfigError(f"expected {geo.N} coordinates")
        if args.side == "Y":
            J = quantum.j_function_Y(quantum.QuantumPoint(geo, tuple(args.point)), args.z)
        else:
            J = quantum.j_function_X(geo, args.point, args.z)
        out = {**_weights_dict(geo), "side": args.side, "point": args.point, "z": args.z, "J": J}
    elif cmd == "lauricella":
        out = _lauricella(args, s)
    else:  # pragma: no cover - argparse rejects unknown commands
        raise ConfigError(f"unknown command {cmd}")
    _write(s, dump_json(out))
    return 0


def _monodromy(args) -> dict:
    loops = ("LR1", "CP", "LR2") if args.loop == "all" else (args.loop,)
    geo = None
    if args.alpha1 is not None and args.alpha2 is not None and args.z is not None:
        geo = AnGeometry(1, args.alpha1, args.alpha2)
        a, b = 2 * geo.alpha1 / args.z, geo.s / args.z
    elif args.a is not None and args.b is not None:
        a, b = args.a, args.b
    else:
        raise ConfigError("give --a/--b or --alpha1/--alpha2/--z")
    out = {"a": a, "b": b, "closed_form": {w: crc.monodromy_n1(a, b, w) for w in loops}}
    if args.oracle:
        if geo is None:
            raise ConfigError("--oracle needs --alpha1, --alpha2 and --z")
        out["oracle"] = {w: crc.monodromy_oracle_n1(geo, args.z, w) for w in loops}
    return out


def _lauricella(args, s: dict) -> dict:
    if args.action in ("eval", "continue"):
        if len(args.b) != len(args.w):
            raise ConfigError("--b and --w need the same length")
        p = FDParams(args.a, tuple(args.b), args.c, tuple(args.w))
        if args.action == "continue":
            val = fd_leading_asymptotics(p)
            kind = "leading_asymptotics"
        elif args.method == "euler":
            val, kind = fd_euler_integral(p), "euler_integral"
        else:
            val, kind = lauricella_fd(p), "series"
        return {"a": p.a, "b": p.b, "c": p.c, "w": p.w, "method": kind, "value": val}
    geo = _geo(args, s)
    if len(args.kappa) != geo.n:
        raise ConfigError(f"expected {geo.n} kappa values")
    pp = PeriodParams.from_geometry(geo, args.kappa, args.z)
    vals = [twisted_period(pp, i, method=args.method) for i in range(1, geo.N + 1)]
    return {**_weights_dict(geo), "kappa": args.kappa, "z": args.z, "periods": vals}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        s = _settings(args)
        return _dispatch(args, s)
    except (ConfigError, argparse.ArgumentTypeError) as exc:
        print(f"ancrc: {exc}", file=sys.stderr)
        return 2
    except (AncrcError, ValueError) as exc:
        print(f"ancrc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
