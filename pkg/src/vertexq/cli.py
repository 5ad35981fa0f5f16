"""Command-line entry point: ``vertexq run`` and ``vertexq preset``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import _kernels
from .lattice import DEFAULT_MAX_DIM
from .params import ConfigError, ModelParams
from .suite import CHECKS, DEFAULT_U_GRID, METHODS, Context, computational_failures, run_checks

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3

_INT_KEYS = ("N", "r", "r_prime", "rpp", "seed", "n_max", "quad_n", "max_dim")
_COMPLEX_KEYS = ("tau", "v", "lambda0", "u0")
_REAL_KEYS = ("tol",)
_PARAM_KEYS = tuple(f.name for f in dataclasses.fields(ModelParams))
_RUN_KEYS = ("method", "u_grid", "checks", "max_dim")

NOTES = (
    "tolerances are chosen per identity by this package; the identities themselves carry no accuracy bounds",
    "the space written with an extra '+' superscript is taken to be the even theta space of degree 4l",
)

PRESETS = {
    "baxter-odd-N": {"N": 3, "l": 1, "r": 4, "r_prime": 1, "tau": [0.0, 1.0], "method": "baxter"},
    "eight-vertex": {"N": 2, "l": 0.5, "r": 5, "r_prime": 1, "tau": [0.0, 1.0], "method": "both"},
    "fabricius-spin1": {"N": 2, "l": 1, "r": 4, "r_prime": 1, "rpp": 1, "tau": [0.0, 1.0],
                        "v": [0.09, 0.0], "method": "fabricius"},
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    method: str = "both"
    u_grid: tuple = DEFAULT_U_GRID
    checks: tuple = CHECKS
    max_dim: int = DEFAULT_MAX_DIM

    def snapshot(self) -> dict:
        return {
            "params": self.params.snapshot(),
            "method": self.method,
            "u_grid": [[u.real, u.imag] for u in self.u_grid],
            "checks": list(self.checks),
            "max_dim": self.max_dim,
        }


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _complex(key: str, val) -> complex:
    if isinstance(val, bool):
        raise ConfigError(key, f"{key}: expected a number or [re, im], got {val!r}")
    if isinstance(val, (int, float)):
        return complex(val)
    if isinstance(val, list) and len(val) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in val):
        return complex(val[0], val[1])
    raise ConfigError(key, f"{key}: expected a number or [re, im], got {val!r}")


def _int(key: str, val) -> int:
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(key, f"{key}: expected an integer, got {val!r}")
    return val


def _spin(val) -> float:
    if isinstance(val, str):
        try:
            return float(Fraction(val))
        except (ValueError, ZeroDivisionError):
            raise ConfigError("l", f"l: cannot parse {val!r}") from None
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError("l", f"l: expected a number, got {val!r}")
    return float(val)


def parse_config(raw: dict, checks_override: str | None = None) -> RunConfig:
    """Parse then validate; every model constraint is checked before any computation."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "config must be a JSON object")
    unknown = sorted(set(raw) - set(_PARAM_KEYS) - set(_RUN_KEYS))
    if unknown:
        raise ConfigError("config", f"unknown keys: {unknown}")
    for key in ("N", "l", "r"):
        if key not in raw:
            raise ConfigError(key, f"missing required key {key!r}")
    kw = {}
    for key, val in raw.items():
        if key not in _PARAM_KEYS:
            continue
        if key in _INT_KEYS:
            kw[key] = _int(key, val)
        elif key in _COMPLEX_KEYS:
            kw[key] = None if val is None and key in ("lambda0", "u0") else _complex(key, val)
        elif key in _REAL_KEYS:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(key, f"{key}: expected a number, got {val!r}")
            kw[key] = float(val)
        elif key == "l":
            kw[key] = _spin(val)
    params = ModelParams(**kw)

    method = raw.get("method", "both")
    if method not in METHODS:
        raise ConfigError("method", f"method must be one of {list(METHODS)}, got {method!r}")
    if method == "fabricius" and params.N % 2:
        raise ConfigError("N even (fabricius)", f"the Fabricius construction requires even N, got N={params.N}")

    u_grid = raw.get("u_grid", [[u.real, u.imag] for u in DEFAULT_U_GRID])
    if not isinstance(u_grid, list) or not u_grid:
        raise ConfigError("u_grid", "u_grid must be a non-empty list")
    u_grid = tuple(_complex("u_grid", u) for u in u_grid)

    checks = raw.get("checks", list(CHECKS))
    if checks_override is not None:
        checks = [c.strip() for c in checks_override.split(",") if c.strip()]
    if not isinstance(checks, list) or not checks or not all(isinstance(c, str) for c in checks):
        raise ConfigError("checks", "checks must be a non-empty list of names")
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise ConfigError("checks", f"unknown checks {bad}; choose from {list(CHECKS)}")
    checks = tuple(c for c in CHECKS if c in checks)

    max_dim = _int("max_dim", raw.get("max_dim", DEFAULT_MAX_DIM))
    if max_dim < 1:
        raise ConfigError("max_dim", "max_dim must be positive")
    return RunConfig(params, method, u_grid, checks, max_dim)


def load_config(path: str | Path, checks_override: str | None = None) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc}") from None
    return parse_config(raw, checks_override)


# ---------------------------------------------------------------------------
# running and writing
# ---------------------------------------------------------------------------

def worker_count() -> int:
    cap = os.environ.get("VERTEXQ_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError("VERTEXQ_THREADS", f"VERTEXQ_THREADS must be an integer, got {cap!r}") from None
    return n


def execute(cfg: RunConfig, workers: int = 1):
    ctx = Context(cfg.params, cfg.method, cfg.u_grid, max_dim=cfg.max_dim)
    return run_checks(ctx, cfg.checks, workers)


def build_document(cfg: RunConfig, reports) -> dict:
    return {
        "schema": SCHEMA,
        "backend": _kernels.backend(),
        "config": cfg.snapshot(),
        "notes": list(NOTES),
        "summary": {
            "total": len(reports),
            "passed": sum(r.passed for r in reports),
            "computational_failures": [r.id for r in computational_failures(reports)],
        },
        "reports": [r.as_dict() for r in reports],
    }


def write_outputs(out: Path, doc: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n")
    with open(out / "report.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "anchor", "residual", "tolerance", "pass", "seconds"])
        for r in doc["reports"]:
            w.writerow([r["id"], r["anchor"], repr(r["residual"]), repr(r["tolerance"]),
                        str(r["pass"]).lower(), f"{r['seconds']:.6f}"])


def exit_status(reports) -> int:
    if computational_failures(reports):
        return EXIT_COMPUTE
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _config_error(exc: ConfigError) -> int:
    print(json.dumps({"error": "config", "constraint": exc.constraint, "message": str(exc)}), file=sys.stderr)
    return EXIT_CONFIG


def _run(cfg: RunConfig, out: Path) -> int:
    reports = execute(cfg, worker_count())
    write_outputs(out, build_document(cfg, reports))
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag}  {r.id:<40} {r.residual:10.3e} < {r.tolerance:.0e}")
    status = exit_status(reports)
    n_pass = sum(r.passed for r in reports)
    print(f"{n_pass}/{len(reports)} passed; report written to {out}; exit {status}")
    return status


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="vertexq", description="Residual certificates for the higher-spin "
                                 "eight-vertex model: transfer matrix and Q-operators.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="run the checks of a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--checks", help=f"comma-separated subset of {','.join(CHECKS)}")
    run.add_argument("--out", default=".")
    pre = sub.add_parser("preset", help="write a preset config and run it")
    pre.add_argument("name", choices=sorted(PRESETS))
    pre.add_argument("--out", required=True)
    args = ap.parse_args(argv)

    try:
        if args.cmd == "run":
            cfg = load_config(args.config, args.checks)
            out = Path(args.out)
        else:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "config.json").write_text(json.dumps(PRESETS[args.name], indent=2) + "\n")
            cfg = parse_config(PRESETS[args.name])
        return _run(cfg, out)
    except ConfigError as exc:
        return _config_error(exc)


if __name__ == "__main__":
    sys.exit(main())
