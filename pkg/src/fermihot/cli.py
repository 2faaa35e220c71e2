"""Command-line driver: JSON config in, CSV/JSON out, nothing resident.

Three commands share one config file:

  positivity  smeared state values over a seeded random family, both
              orderings, with tail bounds and the ordering-sum residual
  scan        macroexpectation values on a point grid
  verify      the cross-check suite as a JSON report bundle

Every CSV starts with a config-digest comment line and a header row; the
same (config, seed) always produces byte-identical output.  Exit codes:
0 pass, 1 a check or positivity failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import verify as verify_mod
from .hotbang import SeriesSchedule, two_point_series_pair
from .quad import QuadConfig
from .states import (Ordering, STATE_SCHEMA, StateSpec, anticommutator,
                     state_from_dict)
from .testfn import (TESTFUNCTION_SCHEMA, TestFunction, random_family,
                     testfunction_from_dict)
from .thermal import MACRO_SCHEMA, macro_expectation, macro_from_dict

__all__ = [
    "CONFIG_SCHEMA",
    "RunConfig",
    "default_config",
    "command_positivity",
    "command_scan",
    "command_verify",
    "main",
]

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2

_QUAD_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "radial_order": {"type": "integer", "minimum": 4},
        "costheta_order": {"type": "integer", "minimum": 4},
        "azimuth_order": {"type": "integer", "minimum": 4},
        "tol": {"type": "number", "exclusiveMinimum": 0},
    },
}

_FAMILY_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "count": {"type": "integer", "minimum": 0},
        "margin": {"type": "number", "exclusiveMinimum": 0},
        "max_terms": {"type": "integer", "minimum": 1},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "state": STATE_SCHEMA,
        "family": _FAMILY_SCHEMA,
        "functions": {"type": "array", "items": TESTFUNCTION_SCHEMA},
        "quad": _QUAD_SCHEMA,
        "positivity": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lam_values": {
                    "type": "array", "minItems": 1,
                    "items": {"type": "number", "exclusiveMinimum": 0},
                },
                "series_tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "scan": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "observable": MACRO_SCHEMA,
                "points": {
                    "type": "array",
                    "items": {"type": "array", "minItems": 4, "maxItems": 4,
                              "items": {"type": "number"}},
                },
            },
        },
        "verify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "filter": {"type": "string"},
            },
        },
    },
}


def default_config() -> dict:
    """Reduced-order starting config; desk-scale runtimes for every command."""
    return {
        "seed": 0,
        "state": {"hotbang": {"lambda": 1.0}},
        "family": {"count": 100, "margin": 0.2, "max_terms": 3},
        "quad": {"radial_order": 32, "costheta_order": 8,
                 "azimuth_order": 16, "tol": 1e-6},
        "positivity": {"lam_values": [0.25, 1.0, 4.0]},
        "scan": {
            "observable": {"t2": {}},
            "points": [[t, 0.0, 0.0, 0.0]
                       for t in (0.5, 1.0, 1.5, 2.0, 3.0, 4.0)],
        },
        "verify": {},
    }


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; built from a JSON dict, never mutated."""

    raw: dict
    seed: int
    state: StateSpec
    quad: QuadConfig
    functions: list[TestFunction] | None
    family_count: int
    family_margin: float
    family_max_terms: int
    lam_values: tuple[float, ...]
    series_tol: float
    scan_observable: dict
    scan_points: tuple[tuple[float, float, float, float], ...]
    verify_filter: str
    threads: int = 1

    @property
    def digest(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    @staticmethod
    def from_dict(d: dict, seed_override: int | None = None,
                  filter_override: str | None = None) -> "RunConfig":
        jsonschema.validate(d, CONFIG_SCHEMA)
        quad_args = d.get("quad", {})
        quad = QuadConfig(**quad_args) if quad_args else QuadConfig(
            radial_order=32, costheta_order=8, azimuth_order=16, tol=1e-6)
        state = state_from_dict(d.get("state", {"hotbang": {"lambda": 1.0}}))
        fam = d.get("family", {})
        pos = d.get("positivity", {})
        scan = d.get("scan", {})
        ver = d.get("verify", {})
        functions = None
        if "functions" in d:
            functions = [testfunction_from_dict(fd) for fd in d["functions"]]
        seed = int(seed_override if seed_override is not None
                   else d.get("seed", 0))
        filt = filter_override if filter_override is not None \
            else ver.get("filter", "")
        raw = dict(d)
        raw["seed"] = seed
        if filt:
            raw.setdefault("verify", {})
            raw["verify"] = dict(raw["verify"], filter=filt)
        return RunConfig(
            raw=raw,
            seed=seed,
            state=state,
            quad=quad,
            functions=functions,
            family_count=int(fam.get("count", 100)),
            family_margin=float(fam.get("margin", 0.2)),
            family_max_terms=int(fam.get("max_terms", 3)),
            lam_values=tuple(float(v) for v in
                             pos.get("lam_values", (0.25, 1.0, 4.0))),
            series_tol=float(pos.get("series_tol", 1e-8)),
            scan_observable=scan.get("observable", {"t2": {}}),
            scan_points=tuple(tuple(float(c) for c in pt)
                              for pt in scan.get("points", ())),
            verify_filter=filt,
            threads=_thread_cap(),
        )


def _thread_cap() -> int:
    raw = os.environ.get("HOTBANG_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"HOTBANG_THREADS must be an integer, got {raw!r}")
    return max(1, min(n, 32))


def _csv(lines: list[str]) -> str:
    return "\n".join(lines) + "\n"


def _positivity_rows(f_seed: int, f: TestFunction, lam: float,
                     quad: QuadConfig, series_tol: float) -> list[str]:
    sched = SeriesSchedule(lam=lam, tol=series_tol)
    pair = two_point_series_pair(f.conjugate(), f, sched, quad)
    ac = anticommutator(f, f.conjugate(), quad)
    total = sum(v for v, _ in pair.values())
    ac_scale = max(abs(ac), 1e-300)
    residual = abs(total - ac) / ac_scale
    rows = []
    for ordering in Ordering:
        value, bound = pair[ordering]
        if abs(value.imag) > 1e-8 * max(abs(value), bound, 1e-300):
            raise AssertionError(
                f"self-pairing value has imaginary part {value.imag:.3e}")
        rows.append(",".join([
            str(f_seed), repr(lam), ordering.value, repr(value.real),
            repr(bound), repr(ac.real), repr(residual)]))
    return rows


def command_positivity(cfg: RunConfig) -> tuple[int, str]:
    """Smeared values over the family: sign, tail bound, ordering-sum residual.

    Fails (exit 1) if any value dips below -tail_bound or any ordering-sum
    residual exceeds 1e-6 relative; a zero function yields a zero row and
    still passes.
    """
    if cfg.functions is not None:
        fns = list(enumerate(cfg.functions))
        fns = [(cfg.seed + i, f) for i, f in fns]
    else:
        fns = [(cfg.seed + i,
                random_family(cfg.seed + i, 1, margin=cfg.family_margin,
                              max_terms=cfg.family_max_terms)[0])
               for i in range(cfg.family_count)]

    jobs = [(s, f, lam) for s, f in fns for lam in cfg.lam_values]
    if cfg.threads > 1:
        with concurrent.futures.ThreadPoolExecutor(cfg.threads) as pool:
            blocks = list(pool.map(
                lambda j: _positivity_rows(j[0], j[1], j[2], cfg.quad,
                                           cfg.series_tol), jobs))
    else:
        blocks = [_positivity_rows(s, f, lam, cfg.quad, cfg.series_tol)
                  for s, f, lam in jobs]

    lines = [f"# config sha256={cfg.digest}",
             "seed,lam,ordering,value,tail_bound,anticommutator,"
             "ordering_sum_residual"]
    ok = True
    for rows in blocks:
        for row in rows:
            lines.append(row)
            parts = row.split(",")
            value, bound, residual = (float(parts[3]), float(parts[4]),
                                      float(parts[6]))
            if value < -bound or residual >= 1e-6:
                ok = False
    return (EXIT_PASS if ok else EXIT_CHECK_FAILURE), _csv(lines)


def command_scan(cfg: RunConfig) -> tuple[int, str]:
    """Macroexpectation on the configured point grid, one row per point."""
    xi = macro_from_dict(cfg.scan_observable)
    label = next(iter(cfg.scan_observable))
    lines = [f"# config sha256={cfg.digest}",
             "x0,x1,x2,x3,observable,value"]
    from .minkowski import FourVector
    for pt in cfg.scan_points:
        x = FourVector.from_array(pt)
        value = macro_expectation(cfg.state, xi, x)
        lines.append(",".join([repr(c) for c in pt] + [label, repr(value)]))
    return EXIT_PASS, _csv(lines)


def command_verify(cfg: RunConfig) -> tuple[int, str]:
    """The verify suite as a JSON bundle; exit 1 on any fail verdict."""
    reports = verify_mod.run_suite(seed=cfg.seed, cfg=cfg.quad)
    if cfg.verify_filter:
        reports = [r for r in reports if cfg.verify_filter in r.name]
    bundle = {
        "config_sha256": cfg.digest,
        "reports": [r.to_json_dict() for r in reports],
    }
    text = json.dumps(bundle, indent=2, sort_keys=True) + "\n"
    failed = any(r.verdict == "fail" for r in reports)
    return (EXIT_CHECK_FAILURE if failed else EXIT_PASS), text


_OUTPUT_NAME = {"positivity": "positivity.csv", "scan": "scan.csv",
                "verify": "verify.json"}
_COMMANDS = {"positivity": command_positivity, "scan": command_scan,
             "verify": command_verify}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fermihot",
        description="Massless-fermion state toolbox: positivity runs, "
                    "macroobservable scans, and the cross-check suite.")
    parser.add_argument("--command", required=True,
                        choices=("positivity", "scan", "verify"))
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON config; omitted means built-in defaults")
    parser.add_argument("--seed", type=int, default=None,
                        help="overrides the config seed")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="output directory")
    parser.add_argument("--filter", default=None,
                        help="substring filter on verify check names")
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        else:
            raw = default_config()
        cfg = RunConfig.from_dict(raw, seed_override=args.seed,
                                  filter_override=args.filter)
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError,
            ValueError, TypeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        code, text = _COMMANDS[args.command](cfg)
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / _OUTPUT_NAME[args.command]
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"{args.command}: wrote {out_path} "
          f"({'pass' if code == EXIT_PASS else 'FAIL'})")
    return code


if __name__ == "__main__":
    sys.exit(main())
