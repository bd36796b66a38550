"""``hkt list | verify <id> | sweep <id> --grid KEY=v1,v2``.

Exit codes: 0 when every check matches its expectation, 1 when some
check does not, 2 for usage errors. Defaults can come from a flat
``key = value`` file named by ``--config`` or ``$HKT_CONFIG``; flags win.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from dataclasses import fields, replace

from . import __version__
from .catalog import CATALOG, SuiteConfig, UsageError, list_examples, lookup, run_checks
from .errors import HKTError
from .report import CheckReport

CONFIG_ENV = "HKT_CONFIG"
_KEYS = {"tolerance", "samples", "seed", "format", "out", "r", "thetas", "generator"}


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


_PARSE = {
    "tolerance": float,
    "samples": int,
    "seed": int,
    "format": str,
    "out": str,
    "r": float,
    "thetas": _floats,
    "generator": str,
}


def read_config(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise UsageError(f"{path}:{no}: unknown key {key!r}")
        out[key] = _convert(key, val)
    return out


def _convert(key: str, val: str):
    try:
        return _PARSE[key](val)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {val!r}") from exc


def build_config(example: str, file_values: dict, flags: dict) -> SuiteConfig:
    values = {**file_values, **{k: v for k, v in flags.items() if v is not None}}
    cfg = SuiteConfig(example, **{k: v for k, v in values.items() if k in _KEYS})
    if cfg.format not in ("text", "json"):
        raise UsageError(f"format must be text or json, got {cfg.format!r}")
    lookup(example)
    return cfg


def make_report(cfg: SuiteConfig) -> CheckReport:
    checks = run_checks(cfg)
    ex = CATALOG[cfg.example]
    return CheckReport(
        cfg.example,
        checks,
        cfg.seed if ex.randomized else None,
        cfg.samples if ex.randomized else None,
        __version__,
        cfg.params(),
    )


def parse_grid(specs: list[str]) -> list[dict]:
    """``["r=0.3,0.5", "theta1=0,1"]`` -> cartesian product of assignments."""
    if not specs:
        raise UsageError("sweep needs at least one --grid KEY=v1,v2,...")
    axes = []
    for spec in specs:
        if "=" not in spec:
            raise UsageError(f"grid entry {spec!r} is not KEY=v1,v2,...")
        key, vals = spec.split("=", 1)
        key = key.strip()
        if not (key in _KEYS - {"thetas", "format", "out"} or _theta_index(key) is not None):
            raise UsageError(f"cannot sweep over {key!r}")
        items = [v.strip() for v in vals.split(",") if v.strip()]
        if not items:
            raise UsageError(f"grid for {key} is empty")
        axes.append([(key, v) for v in items])
    return [dict(combo) for combo in itertools.product(*axes)]


def _theta_index(key: str):
    if key.startswith("theta") and key[5:].isdigit() and int(key[5:]) >= 1:
        return int(key[5:]) - 1
    return None


def _angles(cfg: SuiteConfig) -> int:
    return CATALOG[cfg.example].defaults.get("angles", 0)


def apply_point(cfg: SuiteConfig, point: dict) -> SuiteConfig:
    out = cfg
    for key, raw in point.items():
        k = _theta_index(key)
        if k is None:
            out = replace(out, **{key: _convert(key, raw)})
            continue
        n = _angles(out)
        if k >= n:
            raise UsageError(f"{out.example} has {n} angles; {key} is out of range")
        thetas = list(out.thetas if out.thetas is not None else (0.3 * (j + 1) for j in range(n)))
        thetas[k] = _convert("r", raw)
        out = replace(out, thetas=tuple(thetas))
    return out


def sweep(cfg: SuiteConfig, grid: list[dict]) -> dict:
    reports = [(point, make_report(apply_point(cfg, point))) for point in grid]
    return {
        "example": cfg.example,
        "grid": [{k: p[k] for k in sorted(p)} for p, _ in reports],
        "reports": [r.to_dict() for _, r in reports],
        "summary": {
            "points": len(reports),
            "max_residual": repr(max((r.max_residual() for _, r in reports), default=0.0)),
            "verdict": all(r.verdict for _, r in reports),
        },
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hkt", description="Verify HKT constructions on built-in examples.")
    p.add_argument("--config", help=f"key = value defaults (else ${CONFIG_ENV})")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("list", help="show the example catalog")
    for verb in ("verify", "sweep"):
        s = sub.add_parser(verb)
        s.add_argument("example")
        s.add_argument("--tolerance", type=float)
        s.add_argument("--samples", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--format", choices=("text", "json"))
        s.add_argument("--out")
        s.add_argument("--r", type=float)
        s.add_argument("--thetas", type=_floats)
        s.add_argument("--generator")
        if verb == "sweep":
            s.add_argument("--grid", action="append", default=[], metavar="KEY=v1,v2,...")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with 2
        return int(exc.code or 0)
    if args.verb == "list":
        for key in list_examples():
            ex = CATALOG[key]
            tag = "  [negative control]" if ex.negative_control else ""
            sys.stdout.write(f"{key:16s} {ex.description}{tag}\n")
        return 0
    try:
        path = args.config or os.environ.get(CONFIG_ENV)
        file_values = read_config(path) if path else {}
        flags = {f.name: getattr(args, f.name, None) for f in fields(SuiteConfig) if f.name != "example"}
        cfg = build_config(args.example, file_values, flags)
        if args.verb == "verify":
            report = make_report(cfg)
            _emit(report.to_json() if cfg.format == "json" else report.to_text(), cfg.out)
            return 0 if report.verdict else 1
        result = sweep(cfg, parse_grid(args.grid))
        if cfg.format == "json":
            text = json.dumps(result, indent=2, sort_keys=True) + "\n"
        else:
            rows = [f"{json.dumps(g, sort_keys=True)}  {'PASS' if r['verdict'] else 'FAIL'}"
                    for g, r in zip(result["grid"], result["reports"])]
            s = result["summary"]
            rows.append(f"max residual {s['max_residual']}  verdict {'PASS' if s['verdict'] else 'FAIL'}")
            text = "\n".join(rows) + "\n"
        _emit(text, cfg.out)
        return 0 if result["summary"]["verdict"] else 1
    except UsageError as exc:
        sys.stderr.write(f"hkt: {exc}\n")
        return 2
    except HKTError as exc:
        sys.stderr.write(f"hkt: check aborted: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
