"""Command-line driver: every experiment as one reproducible invocation.

Subcommands
-----------
vseq        exact terms, block indices and running sums of the base sequence
oscillate   window/shift families with conditionals approaching two limits
continuity  certified brackets of the kernel's continuity modulus
estimate    Monte-Carlo vs exact two-sided conditional, with z-score
cylinder    certified stationary probability of a symbol window
simulate    stationary sample with summary statistics

Every subcommand writes csv (default) or json.  The effective configuration
is echoed to stderr as one JSON line; json output embeds it under ``meta``.
Flags override config-file values, which override defaults.  Exit codes:
0 success, 2 configuration or validation failure, 3 numerical-certificate
failure (insufficient hits, search-cap exhaustion).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .blockseq import (
    ShiftSearchExhausted,
    block_index,
    find_subsequences,
    partial_sum,
    term,
)
from .exact import (
    CertificateError,
    CylinderSpec,
    cylinder_probability,
    limit_value,
    marginal_one,
    two_sided_conditional,
    two_sided_conditional_closed,
)
from .kernel import ParameterError, PSequence, continuity_modulus
from .sample import InsufficientHitsError, mc_conditional, stationary_sample

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CERTIFICATE = 3

_DEFAULTS: dict[str, Any] = {
    "family": "oscillating",
    "p_inf": 0.5,
    "xi": 2.0,
    "p": None,
    "custom_head": None,
    "seed": 0,
    "tol": 1e-12,
    "format": "csv",
    "out": None,
    "max_k": 14,
    "ell": "both",
    "count": 6,
    "search_cap": None,
    "k_max": 64,
    "horizon": None,
    "i": 2,
    "j": 2,
    "n_paths": 200000,
    "length": 10000,
    "offset": 0,
    "word": "1",
}


@dataclass
class RunConfig:
    """Effective configuration of one invocation, echoed with the output."""

    subcommand: str
    values: dict[str, Any] = field(default_factory=dict)

    def __getattr__(self, name: str) -> Any:
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def echo_dict(self) -> dict[str, Any]:
        return {"subcommand": self.subcommand, **self.values}


def _load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParameterError(f"config file {path} must hold a flat JSON object")
    return data


def _resolve(args: argparse.Namespace, keys: Sequence[str]) -> RunConfig:
    """Merge defaults, config file and flags (flags win)."""
    file_values = _load_config_file(args.config) if args.config else {}
    unknown = set(file_values) - set(_DEFAULTS)
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    values = {}
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
        elif key in file_values:
            values[key] = file_values[key]
        else:
            values[key] = _DEFAULTS[key]
    return RunConfig(args.subcommand, values)


def _sequence(cfg: RunConfig) -> PSequence:
    head = cfg.values.get("custom_head")
    if isinstance(head, str):
        head = [float(x) for x in head.split(",") if x.strip()]
    return PSequence.from_config(
        {
            "family": cfg.family,
            "p_inf": cfg.values.get("p_inf"),
            "xi": cfg.values.get("xi"),
            "p": cfg.values.get("p"),
            "custom_head": head,
        }
    )


def _require_oscillating(cfg: RunConfig) -> None:
    if cfg.family != "oscillating":
        raise ParameterError(
            f"subcommand {cfg.subcommand!r} requires the oscillating family"
        )


# -- output ------------------------------------------------------------------


def _format_cell(x: Any) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit(cfg: RunConfig, columns: list[str], rows: list[dict[str, Any]]) -> None:
    print(json.dumps({"effective-config": cfg.echo_dict()}, sort_keys=True),
          file=sys.stderr)
    if cfg.format == "json":
        payload = {
            "meta": {"config": cfg.echo_dict(), "version": __version__},
            "rows": [
                {c: _format_cell(r[c]) if isinstance(r[c], Fraction) else r[c]
                 for c in columns}
                for r in rows
            ],
        }
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        lines = [",".join(columns)]
        for r in rows:
            lines.append(",".join(_format_cell(r[c]) for c in columns))
        text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------


def _cmd_vseq(cfg: RunConfig) -> None:
    if cfg.max_k < 0:
        raise ParameterError(f"requires max_k >= 0, got {cfg.max_k}")
    rows = []
    running = Fraction(0)
    for k in range(cfg.max_k + 1):
        running += term(k)
        rows.append(
            {"k": k, "r": block_index(k), "v": term(k), "partial_sum": running}
        )
    _emit(cfg, ["k", "r", "v", "partial_sum"], rows)


def _cmd_oscillate(cfg: RunConfig) -> None:
    _require_oscillating(cfg)
    seq = _sequence(cfg)
    families = (1, 2) if cfg.ell == "both" else (int(cfg.ell),)
    rows = []
    for fam in families:
        pairs = find_subsequences(fam, cfg.count, cfg.search_cap)
        lim = limit_value(seq.params, fam)
        for pair in pairs:
            cond = two_sided_conditional_closed(seq.params, pair.i, pair.j)
            rows.append(
                {
                    "ell": fam,
                    "n": pair.n,
                    "i": pair.i,
                    "j": pair.j,
                    "window_sum": pair.window_sum,
                    "conditional": cond,
                    "limit": lim,
                    "abs_gap": abs(cond - lim),
                }
            )
    _emit(
        cfg,
        ["ell", "n", "i", "j", "window_sum", "conditional", "limit", "abs_gap"],
        rows,
    )


def _cmd_continuity(cfg: RunConfig) -> None:
    seq = _sequence(cfg)
    if cfg.k_max < 0:
        raise ParameterError(f"requires k_max >= 0, got {cfg.k_max}")
    horizon = cfg.horizon if cfg.horizon is not None else 2 * cfg.k_max + 100
    if horizon < cfg.k_max:
        raise ParameterError(f"requires horizon >= k_max, got {horizon}")
    rows = []
    for k in range(cfg.k_max + 1):
        lower, upper = continuity_modulus(seq, k, horizon)
        rows.append({"k": k, "lower": lower, "upper": upper})
    _emit(cfg, ["k", "lower", "upper"], rows)


def _cmd_estimate(cfg: RunConfig) -> None:
    seq = _sequence(cfg)
    if cfg.i < 0 or cfg.j < 0:
        raise ParameterError(f"requires i, j >= 0, got ({cfg.i}, {cfg.j})")
    exact = two_sided_conditional(seq, cfg.i, cfg.j)
    est = mc_conditional(seq, cfg.i, cfg.j, cfg.n_paths, cfg.seed, cfg.tol)
    z = (est.value - exact) / est.std_error
    rows = [
        {
            "i": cfg.i,
            "j": cfg.j,
            "exact": exact,
            "mc_value": est.value,
            "std_error": est.std_error,
            "z_score": z,
            "n_hits": est.n_hits,
            "n_samples": est.n_samples,
        }
    ]
    _emit(
        cfg,
        ["i", "j", "exact", "mc_value", "std_error", "z_score", "n_hits", "n_samples"],
        rows,
    )


def _cmd_cylinder(cfg: RunConfig) -> None:
    seq = _sequence(cfg)
    try:
        spec = CylinderSpec(cfg.offset, cfg.word)
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc
    cert = cylinder_probability(seq, spec, cfg.tol)
    rows = [
        {
            "offset": cfg.offset,
            "word": cfg.word,
            "probability": cert.value,
            "error_bound": cert.error,
        }
    ]
    _emit(cfg, ["offset", "word", "probability", "error_bound"], rows)


def _cmd_simulate(cfg: RunConfig) -> None:
    seq = _sequence(cfg)
    if cfg.length < 1:
        raise ParameterError(f"requires length >= 1, got {cfg.length}")
    path = stationary_sample(seq, cfg.length, cfg.seed, cfg.tol)
    ones = path.symbols.count("1")
    rows = [
        {
            "length": cfg.length,
            "seed": cfg.seed,
            "left_age": path.left_age,
            "ones": ones,
            "freq_one": ones / cfg.length,
            "marginal_one": marginal_one(seq, cfg.tol).value,
            "symbols": path.symbols,
        }
    ]
    _emit(
        cfg,
        ["length", "seed", "left_age", "ones", "freq_one", "marginal_one", "symbols"],
        rows,
    )


_COMMANDS = {
    "vseq": (_cmd_vseq, ["max_k"]),
    "oscillate": (
        _cmd_oscillate,
        ["family", "p_inf", "xi", "count", "search_cap", "ell"],
    ),
    "continuity": (
        _cmd_continuity,
        ["family", "p_inf", "xi", "p", "custom_head", "k_max", "horizon"],
    ),
    "estimate": (
        _cmd_estimate,
        ["family", "p_inf", "xi", "p", "custom_head", "i", "j", "n_paths", "seed", "tol"],
    ),
    "cylinder": (
        _cmd_cylinder,
        ["family", "p_inf", "xi", "p", "custom_head", "offset", "word", "tol"],
    ),
    "simulate": (
        _cmd_simulate,
        ["family", "p_inf", "xi", "p", "custom_head", "length", "seed", "tol"],
    ),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agechain",
        description="Numerical laboratory for age-driven binary renewal chains.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--family", choices=["oscillating", "constant", "custom"])
        sp.add_argument("--p-inf", dest="p_inf", type=float)
        sp.add_argument("--xi", type=float)
        sp.add_argument("--p", type=float, help="constant-family probability")
        sp.add_argument("--custom-head", dest="custom_head",
                        help="comma-separated head values for the custom family")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--config", help="flat JSON file with default values")
        sp.add_argument("--out", help="output path (default: stdout)")

    sp = sub.add_parser("vseq", help="exact terms and running sums")
    sp.add_argument("--max-k", dest="max_k", type=int)
    add_common(sp)

    sp = sub.add_parser("oscillate", help="two-limit discontinuity table")
    sp.add_argument("--count", type=int)
    sp.add_argument("--search-cap", dest="search_cap", type=int)
    sp.add_argument("--ell", choices=["1", "2", "both"])
    add_common(sp)

    sp = sub.add_parser("continuity", help="continuity-modulus brackets")
    sp.add_argument("--k-max", dest="k_max", type=int)
    sp.add_argument("--horizon", type=int)
    add_common(sp)

    sp = sub.add_parser("estimate", help="Monte-Carlo vs exact conditional")
    sp.add_argument("--i", type=int)
    sp.add_argument("--j", type=int)
    sp.add_argument("--n-paths", dest="n_paths", type=int)
    add_common(sp)

    sp = sub.add_parser("cylinder", help="certified cylinder probability")
    sp.add_argument("--offset", type=int)
    sp.add_argument("--word")
    add_common(sp)

    sp = sub.add_parser("simulate", help="stationary sample with summary")
    sp.add_argument("--length", type=int)
    add_common(sp)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler, keys = _COMMANDS[args.subcommand]
    keys = list(keys) + ["format", "out", "tol", "seed"]
    keys = list(dict.fromkeys(keys))  # dedupe, keep order
    try:
        cfg = _resolve(args, keys)
        handler(cfg)
    except ParameterError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ShiftSearchExhausted, InsufficientHitsError, CertificateError) as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


def console_entry() -> None:
    raise SystemExit(main())
