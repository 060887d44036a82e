"""Command-line front end: ``dbx <subcommand> ...``.

Exit status 0 on success, 1 when an input violates a precondition, 2 on a
numeric failure, 64 on a usage error and 78 on a malformed config file.
Payloads go to stdout as JSON (sorted keys) or CSV; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import NumericError, PreconditionError
from .numeric import DEFAULT_PREC, decimal_string, parse_real

EXIT_OK, EXIT_PRECONDITION, EXIT_NUMERIC, EXIT_USAGE, EXIT_CONFIG = 0, 1, 2, 64, 78

__all__ = ["Config", "ConfigError", "load_config", "dispatch", "main"]


class ConfigError(Exception):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    precision_bits: int = DEFAULT_PREC
    root_tol: float = 1e-12
    depth_default: int = 64
    seed: int = 0
    output_format: str = "json"

    def validate(self) -> "Config":
        if self.precision_bits < 53:
            raise ConfigError(f"precision_bits must be at least 53, got {self.precision_bits}")
        if not self.root_tol > 0:
            raise ConfigError(f"root_tol must be positive, got {self.root_tol}")
        if self.depth_default < 1:
            raise ConfigError("depth_default must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"output_format must be json or csv, got {self.output_format!r}")
        return self


_CASTS = {"precision_bits": int, "root_tol": float, "depth_default": int, "seed": int,
          "output_format": str}
_ENV = {"DBX_PRECISION_BITS": "precision_bits", "DBX_ROOT_TOL": "root_tol", "DBX_SEED": "seed"}


def _cast(key: str, raw: str, line: int | None = None):
    try:
        return _CASTS[key](raw)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}", line) from None


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; values may be double-quoted."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", n)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _CASTS:
            raise ConfigError(f"unknown key {key!r}", n)
        if len(val) >= 2 and val[0] == val[-1] == '"':
            val = val[1:-1]
        if not val:
            raise ConfigError(f"empty value for {key}", n)
        out[key] = _cast(key, val, n)
    return out


def load_config(path: str | None = None, env=None, overrides: dict | None = None) -> Config:
    """Merge defaults < file < environment < flag overrides."""
    env = os.environ if env is None else env
    vals: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
        vals.update(parse_config_text(text))
    for var, key in _ENV.items():
        if env.get(var):
            vals[key] = _cast(key, env[var])
    vals.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return Config(**vals).validate()


# ----------------------------------------------------------------- output

def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction) or hasattr(v, "_mpf_"):
        return decimal_string(v)
    return str(v)


def _emit_json(obj, out) -> None:
    out.write(json.dumps(_jsonable(obj), sort_keys=True) + "\n")


def _emit_csv(header, rows, out) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([_jsonable(list(r)) for r in rows])
    out.write(buf.getvalue())


def _verdict_fields(prefix: str, v) -> dict:
    out = {prefix: v.value.value}
    if v.depth is not None:
        out[prefix + "_depth"] = v.depth
    if v.witness:
        out[prefix + "_witness"] = v.witness
    return out


# -------------------------------------------------------------- commands

def _base_pair(args, cfg: Config):
    from .expand import BasePair

    try:
        q0, q1 = parse_real(args.q0), parse_real(args.q1)
    except ValueError as e:
        raise PreconditionError(str(e)) from None
    return BasePair(q0, q1, prec=cfg.precision_bits)


def _seq(text: str, what: str):
    from .seqcore import EpSeq

    try:
        return EpSeq.parse(text)
    except ValueError as e:
        raise PreconditionError(f"{what}: {e}") from None


def cmd_expand(args, cfg, out):
    from .expand import Mode, run_algorithm

    q = _base_pair(args, cfg)
    x = args.x if args.x in ("ell", "r") else parse_real(args.x)
    depth = args.depth or cfg.depth_default
    run = run_algorithm(q, x, Mode(args.mode), depth)
    payload = {"digits": run.digits, "mode": run.mode.value, "depth": depth,
               "certified_depth": run.certified_depth,
               "residual_lo": run.residual_lo, "residual_hi": run.residual_hi,
               "precision_bits": cfg.precision_bits}
    if cfg.output_format == "csv":
        _emit_csv(["index", "digit"], [(i + 1, d) for i, d in enumerate(run.digits)], out)
    else:
        _emit_json(payload, out)


def cmd_phi(args, cfg, out):
    from .phimap import phi_forward

    q = _base_pair(args, cfg)
    fw = phi_forward(q, args.depth or cfg.depth_default)
    _emit_json({"mu_prefix": fw.mu_prefix, "alpha_prefix": fw.alpha_prefix,
                "certified_depth": fw.certified,
                "mu": None if fw.mu is None else str(fw.mu),
                "alpha": None if fw.alpha is None else str(fw.alpha),
                "region": q.region.value}, out)


def cmd_phi_inv(args, cfg, out):
    from .phimap import SolverConfig, phi_inverse

    mu, alpha = _seq(args.mu, "mu"), _seq(args.alpha, "alpha")
    sc = SolverConfig(root_tol=cfg.root_tol)
    r = phi_inverse(mu, alpha, prec=cfg.precision_bits, cfg=sc)
    _emit_json({"q0": r.q0, "q1": r.q1, "residual_f": r.residual_f,
                "residual_ftilde": r.residual_ftilde, "bracket": list(r.bracket),
                "iterations": r.iterations, "precision_bits": r.prec, "radius": r.radius}, out)


def cmd_classify(args, cfg, out):
    from .classify import classify_base_pair, classify_pair

    if args.mu is not None or args.alpha is not None:
        if args.mu is None or args.alpha is None:
            raise UsageError("classify needs both --mu and --alpha, or both --q0 and --q1")
        pc = classify_pair(_seq(args.mu, "mu"), _seq(args.alpha, "alpha"))
        payload = {}
        for name, v in (("in_B", pc.in_Bprime), ("in_C", pc.in_Cprime), ("in_U2", pc.in_U2prime),
                        ("in_V2", pc.in_V2prime), ("in_closureU2", pc.in_closureU2prime)):
            payload.update(_verdict_fields(name, v))
        payload["isolated"] = pc.isolated
        if pc.isolated:
            payload["u"], payload["v"] = pc.u, pc.v
    else:
        if args.q0 is None or args.q1 is None:
            raise UsageError("classify needs --q0 and --q1, or --mu and --alpha")
        bc = classify_base_pair(_base_pair(args, cfg), args.depth or cfg.depth_default)
        payload = {"region": bc.region.value, "certification_depth": bc.certification_depth,
                   "mu": None if bc.mu is None else str(bc.mu),
                   "alpha": None if bc.alpha is None else str(bc.alpha),
                   "isolated": bc.isolated}
        for name, v in (("in_U2", bc.in_U2), ("in_V2", bc.in_V2), ("in_closureU2", bc.in_closureU2)):
            payload.update(_verdict_fields(name, v))
    _emit_json(payload, out)


def _parse_grid(text: str) -> tuple[int, int]:
    for sep in ("x", "X", "×", ","):
        if sep in text:
            w, h = text.split(sep, 1)
            try:
                w, h = int(w), int(h)
            except ValueError:
                break
            if w >= 1 and h >= 1:
                return w, h
    raise PreconditionError(f"grid must look like WxH with positive sizes, got {text!r}")


def _parse_window(text: str) -> tuple[Fraction, ...]:
    parts = text.split(",")
    if len(parts) != 4:
        raise PreconditionError("window must be q0min,q0max,q1min,q1max")
    vals = tuple(parse_real(p) for p in parts)
    if not (1 < vals[0] < vals[1] and 1 < vals[2] < vals[3]):
        raise PreconditionError("window must satisfy 1 < min < max on both axes")
    return vals


def cmd_sample_region(args, cfg, out):
    from .classify import classify_base_pair
    from .expand import BasePair

    W, H = _parse_grid(args.grid)
    a0, b0, a1, b1 = _parse_window(args.window)
    rows = []
    for j in range(H):
        for i in range(W):
            # cell centres, exact rationals
            q0 = a0 + (b0 - a0) * Fraction(2 * i + 1, 2 * W)
            q1 = a1 + (b1 - a1) * Fraction(2 * j + 1, 2 * H)
            q = BasePair(q0, q1, prec=cfg.precision_bits)
            region = q.region.value
            if region == "Outside":
                u2 = "no"
            elif region == "C":
                u2 = "yes"
            elif args.classify:
                u2 = str(classify_base_pair(q, args.depth).in_U2)
            else:
                u2 = "unchecked"
            rows.append((i, j, decimal_string(q0, 17), decimal_string(q1, 17), region, u2))
    _emit_csv(["i", "j", "q0", "q1", "region", "in_U2"], rows, out)


def _parse_scales(text: str) -> list[float]:
    try:
        vals = [float(parse_real(s)) if "/" in s else float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise PreconditionError(f"cannot parse scales {text!r}") from None
    if len(vals) < 2:
        raise PreconditionError("need at least two scales")
    return vals


def cmd_dimension(args, cfg, out):
    from .dimension import FamilyParams, estimate_dimension, estimate_dimension_gap

    scales = _parse_scales(args.scales)
    seed = cfg.seed if args.seed is None else args.seed
    if args.family == "gap":
        est = estimate_dimension_gap(args.N, args.samples, scales, args.depth_blocks, seed)
    else:
        est = estimate_dimension(FamilyParams(args.N, args.depth_blocks, seed), args.samples, scales)
    _emit_csv(["scale", "count"], list(zip([repr(s) for s in est.scales], est.counts)), out)
    summary = {"slope": est.slope, "bound": est.bound, "eps_N": est.eps_N, "N": est.N,
               "samples": est.sample_count, "failed_solves": est.failed_solves,
               "fit_range": list(est.fit_range), "family": args.family, "seed": seed}
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            _emit_json(summary, fh)
    else:
        _emit_json(summary, sys.stderr)


def _end(v, side: int, digits: int = 20) -> str:
    # outward endpoint of an interval value, as a decimal string
    return mpmath.nstr(mpmath.mpf(v._mpi_[side]), digits)


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise PreconditionError(f"cannot parse {what} {text!r}") from None


def cmd_inequality(args, cfg, out):
    from .ineq import SeriesInput, eval_S, eval_S_auto, verify_positivity_sweep

    x, y = float(parse_real(args.x)), float(parse_real(args.y))
    if not (x > 1 and y > 1):
        raise PreconditionError("x and y must exceed 1")
    if args.n is not None or args.ntilde is not None:
        if args.n is None or args.ntilde is None:
            raise UsageError("give both --n and --ntilde, or neither for a random sweep")
        inp = SeriesInput(x, y, _int_list(args.n, "--n"), _int_list(args.ntilde, "--ntilde"))
        v = eval_S(inp, args.K) if args.K else eval_S_auto(inp)
        _emit_json({"x": x, "y": y, "n": list(inp.n_seq), "ntilde": list(inp.ntilde_seq), "K": v.K,
                    "lower": _end(v.lower, 0), "upper": _end(v.upper, 1), "tail": _end(v.tail, 1, 6), "constant": inp.constant,
                    "positive": bool(v.lower > 0)}, out)
        return
    seed = cfg.seed if args.seed is None else args.seed
    rep = verify_positivity_sweep(x, y, args.trials, seed)
    _emit_json({"x": x, "y": y, "trials": rep.trials, "seed": seed, "nonconstant": rep.nonconstant,
                "failures": [list(f) for f in rep.failures],
                "min_lower_nonconstant": rep.min_lower_nonconstant,
                "passed": not rep.failures}, out)


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dbx", description="Double-base expansions, univoque base pairs and the maps between them.")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--precision", type=int, dest="precision_bits", help="working precision in bits (>= 53)")
    p.add_argument("--root-tol", type=float, dest="root_tol")
    p.add_argument("--format", choices=["json", "csv"], dest="output_format")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pair(sp, required=True):
        sp.add_argument("--q0", required=required)
        sp.add_argument("--q1", required=required)

    sp = sub.add_parser("expand", help="run a greedy/lazy style digit algorithm")
    pair(sp)
    sp.add_argument("--x", required=True, help="point: p/q, decimal, 'ell' or 'r'")
    sp.add_argument("--mode", required=True, choices=["greedy", "quasi-greedy", "lazy", "quasi-lazy"])
    sp.add_argument("--depth", type=int)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("phi", help="critical expansions (mu, alpha) of a base pair")
    pair(sp)
    sp.add_argument("--depth", type=int)
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("phi-inv", help="base pair with given (mu, alpha)")
    sp.add_argument("--mu", required=True, help="e.g. '(01)*' or '0001(01)*'")
    sp.add_argument("--alpha", required=True)
    sp.set_defaults(func=cmd_phi_inv)

    sp = sub.add_parser("classify", help="U2 / V2 / closure membership")
    pair(sp, required=False)
    sp.add_argument("--mu")
    sp.add_argument("--alpha")
    sp.add_argument("--depth", type=int)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("sample-region", help="CSV of region membership over a grid")
    sp.add_argument("--grid", default="40x40")
    sp.add_argument("--window", default="1.01,3,1.01,3", help="q0min,q0max,q1min,q1max")
    sp.add_argument("--classify", action="store_true", help="also classify U2 membership per cell (slow)")
    sp.add_argument("--depth", type=int, default=32)
    sp.set_defaults(func=cmd_sample_region)

    sp = sub.add_parser("dimension", help="box-counting estimate on a univoque family")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--scales", default=",".join(f"1/{2**k}" for k in range(4, 13)))
    sp.add_argument("--depth-blocks", type=int, default=6)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--family", choices=["full", "gap"], default="full")
    sp.add_argument("--summary", help="write the JSON summary here instead of stderr")
    sp.set_defaults(func=cmd_dimension)

    sp = sub.add_parser("inequality-check", help="enclose the double series, or sweep random inputs")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--n", help="comma-separated non-decreasing n_k")
    sp.add_argument("--ntilde", help="comma-separated non-decreasing n~_l")
    sp.add_argument("--K", type=int, help="truncation index (default: grow until the tail is below 1e-10)")
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_inequality)
    return p


def dispatch(argv, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        cfg = load_config(args.config, overrides={
            "precision_bits": args.precision_bits, "root_tol": args.root_tol,
            "output_format": args.output_format})
    except ConfigError as e:
        err.write(f"dbx: config error: {e}\n")
        return EXIT_CONFIG
    try:
        args.func(args, cfg, out)
    except UsageError as e:
        err.write(f"dbx: usage error: {e}\n")
        return EXIT_USAGE
    except NumericError as e:
        err.write(f"dbx: numeric failure: {e}\n")
        return EXIT_NUMERIC
    except (PreconditionError, ValueError) as e:
        err.write(f"dbx: precondition violated: {e}\n")
        return EXIT_PRECONDITION
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
