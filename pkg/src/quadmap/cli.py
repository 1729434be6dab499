"""Command-line front end: degrees, fixed-points, analyze, verify, report.

Exit codes: 0 success, 1 witness disagreement or path-failure threshold,
2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__, golden
from .analysis import analyze
from .cache import Cache, cache_key
from .degrees import KIND2_BUDGET, CountDisagreement, DegreePredictionError, DegreeTable, WitnessDisagreement, degree_table
from .homotopy import PathFailureError, TrackSettings
from .maps import make_F, verify_fibration, verify_inverse, verify_leading_terms, verify_square
from .periodic import CountDisagreement as FixedCountDisagreement
from .periodic import count_fixed_points, random_fiber
from .report import render_markdown, table_checks

log = logging.getLogger("quadmap")

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2
THREADS_ENV = "QUADMAP_THREADS"
SCHEMA = 1


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    n_max: int = 6
    period: int = 1
    fiber: str = "random"
    seed: int = 0
    witnesses: int = 2
    threads: int = 1
    kind2_budget: int = KIND2_BUDGET
    kind2_method: str = "resultant"
    track: dict = field(default_factory=dict)
    cache_dir: str | None = None
    fmt: str = "json"
    out: str | None = None
    inputs: list = field(default_factory=list)
    diagnostics: str | None = None

    def settings(self) -> TrackSettings:
        try:
            return TrackSettings(**self.track)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad solver setting: {exc}") from exc

    def fiber_value(self) -> Fraction:
        if self.fiber == "random":
            return random_fiber(self.seed)
        try:
            return Fraction(self.fiber)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"fiber must be a rational or 'random', got {self.fiber!r}") from exc


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}")
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def _parse_track(items) -> dict:
    names = {f.name: f.type for f in dataclasses.fields(TrackSettings)}
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--track expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        if k not in names:
            raise ConfigError(f"unknown solver setting {k!r}")
        try:
            out[k] = int(v) if names[k] in (int, "int") else float(v)
        except ValueError as exc:
            raise ConfigError(f"bad value for {k}: {v!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=None, help=f"worker processes (default ${THREADS_ENV} or all cores)")
    common.add_argument("--cache-dir", default=None, help="directory for cached results (default: no cache)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "md"), default="json")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="quadmap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    d = sub.add_parser("degrees", parents=[common], help="degree sequences d1, d2, d3")
    d.add_argument("--n-max", type=int, default=6)
    d.add_argument("--witnesses", type=int, default=2)
    d.add_argument("--kind2-budget", type=int, default=KIND2_BUDGET)
    d.add_argument("--kind2-method", choices=("resultant", "solver"), default="resultant")
    d.add_argument("--track", action="append", metavar="KEY=VALUE", help="solver setting override")

    f = sub.add_parser("fixed-points", parents=[common], help="isolated periodic points of a given period")
    f.add_argument("--period", type=int, required=True)
    f.add_argument("--fiber", default="random", help="fiber value c as a rational, or 'random' (seeded)")
    f.add_argument("--track", action="append", metavar="KEY=VALUE")
    f.add_argument("--diagnostics", default=None, help="append JSON-lines path records here")

    a = sub.add_parser("analyze", parents=[common], help="question verdicts from stored tables")
    a.add_argument("inputs", nargs="*", help="degree-table or fixed-point JSON files (default: cache, then reference tables)")

    sub.add_parser("verify", parents=[common], help="symbolic checks of the map")

    r = sub.add_parser("report", parents=[common], help="Markdown reproduction of the reference tables")
    r.add_argument("inputs", nargs="*")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        subcommand=ns.subcommand,
        seed=ns.seed,
        threads=ns.threads if ns.threads is not None else default_threads(),
        cache_dir=ns.cache_dir,
        fmt=ns.fmt,
        out=ns.out,
    )
    for name in ("n_max", "period", "fiber", "witnesses", "kind2_budget", "kind2_method", "inputs", "diagnostics"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    cfg.track = _parse_track(getattr(ns, "track", None))
    if cfg.threads < 1:
        raise ConfigError("--threads must be positive")
    if cfg.subcommand == "degrees":
        if cfg.n_max < 1:
            raise ConfigError("--n-max must be at least 1")
        if cfg.witnesses < 2:
            raise ConfigError("--witnesses must be at least 2")
        if cfg.kind2_budget < 0:
            raise ConfigError("--kind2-budget must be non-negative")
    if cfg.subcommand == "fixed-points":
        if cfg.period < 1:
            raise ConfigError("--period must be at least 1")
        cfg.fiber_value()
    cfg.settings()
    return cfg


# ---------------------------------------------------------------- commands


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _cached(cfg: RunConfig, op: str, params: dict, compute):
    cache = Cache(cfg.cache_dir)
    key = cache_key(op, params, make_F().to_json())
    hit = cache.get(key)
    if hit is not None:
        log.info("cache hit %s %s", op, key[:12])
        return hit.payload
    payload = compute()
    cache.put(key, payload)
    return payload


def cmd_degrees(cfg: RunConfig) -> str:
    params = {
        "n_max": cfg.n_max,
        "seed": cfg.seed,
        "witnesses": cfg.witnesses,
        "kind2_budget": cfg.kind2_budget,
        "kind2_method": cfg.kind2_method,
        "track": cfg.track,
    }

    def compute():
        t = degree_table(
            cfg.n_max,
            kind2_budget=cfg.kind2_budget,
            witnesses=cfg.witnesses,
            seed=cfg.seed,
            solver=cfg.settings(),
            kind2_method=cfg.kind2_method,
            workers=cfg.threads,
            progress=lambda row: log.info("n=%d d1=%s d2=%s d3=%s", row.n, row.d1, row.d2, row.d3),
        )
        return {"schema": SCHEMA, "kind": "degree_table", "params": params, **t.to_json()}

    payload = _cached(cfg, "degree_table", params, compute)
    table = DegreeTable.from_json(payload)
    if cfg.fmt == "csv":
        return table.to_csv()
    if cfg.fmt == "md":
        rows = list(csv.reader(io.StringIO(table.to_csv())))
        lines = ["| " + " | ".join(rows[0]) + " |", "|" + "---|" * len(rows[0])]
        lines += ["| " + " | ".join(r) + " |" for r in rows[1:]]
        return f"seed: {cfg.seed}\n\n" + "\n".join(lines) + "\n"
    return _dumps(payload)


def cmd_fixed_points(cfg: RunConfig) -> str:
    c = cfg.fiber_value()
    params = {"period": cfg.period, "fiber": str(c), "seed": cfg.seed, "track": cfg.track}

    def compute():
        rep = count_fixed_points(cfg.period, c, cfg.seed, cfg.settings(), cfg.threads, cfg.diagnostics)
        return {"schema": SCHEMA, "kind": "fixed_points", "params": params, **rep.to_json()}

    payload = _cached(cfg, "fixed_points", params, compute)
    if cfg.fmt == "csv":
        growth = payload["isolated"] ** (1 / payload["n"]) if payload["isolated"] else 0.0
        return f"N,isolated,curves,growth,seed\n{payload['n']},{payload['isolated']},{' & '.join(k for k, v in sorted(payload['on_curve_solutions'].items()) if v)},{growth:.11f},{payload['seed']}\n"
    if cfg.fmt == "md":
        return (
            f"period {payload['n']}, fiber c = {payload['c']}, seed {payload['seed']}\n\n"
            f"- isolated points: {payload['isolated']} (growth {payload['growth']:.11f})\n"
            f"- points on invariant curves: {payload['on_curve_points']}\n"
            f"- non-hyperbolic isolated points: {payload['non_hyperbolic']}\n"
            f"- paths: {payload['paths']}, diverged {payload['diverged']}, failed {payload['failed']}\n"
        )
    return _dumps(payload)


def _load_inputs(cfg: RunConfig) -> tuple[dict, dict, str]:
    """Degree sequences and isolated counts from files, the cache, or the reference tables."""
    payloads = []
    for path in cfg.inputs:
        try:
            payloads.append(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
    source = "files"
    if not payloads and cfg.cache_dir and Path(cfg.cache_dir).is_dir():
        for p in sorted(Path(cfg.cache_dir).glob("*.json")):
            try:
                payloads.append(json.loads(p.read_text(encoding="utf-8"))["payload"])
            except (KeyError, json.JSONDecodeError):
                continue
        source = "cache"
    seqs: dict[str, list[int]] = {}
    counts: dict[int, int] = {}
    for pl in payloads:
        if pl.get("kind") == "degree_table":
            t = DegreeTable.from_json(pl)
            cand = {f"d{k}": t.sequence(k) for k in (1, 2, 3)}
            for k, v in cand.items():
                if len(v) > len(seqs.get(k, [])):
                    seqs[k] = v
        elif pl.get("kind") == "fixed_points":
            counts[int(pl["n"])] = int(pl["isolated"])
        else:
            raise ConfigError("input is neither a degree table nor a fixed-point report")
    if not seqs and not counts:
        return golden.degree_sequences(), golden.isolated_counts(), "reference"
    return seqs, counts, source


def cmd_analyze(cfg: RunConfig) -> str:
    seqs, counts, source = _load_inputs(cfg)
    rep = analyze(seqs, counts, cfg.seed)
    if cfg.fmt == "md":
        return render_markdown(rep)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["question", "n", "holds"])
        for v in rep.verdicts:
            for n, ok in sorted(v.per_n.items()):
                wr.writerow([v.qid, n, ok])
        return buf.getvalue()
    return _dumps({"source": source, **rep.to_json()})


def cmd_verify(cfg: RunConfig) -> tuple[str, bool]:
    F = make_F()
    rows = verify_leading_terms(8)
    checks = {
        "fibration": verify_fibration(F),
        "inverse": verify_inverse(),
        "square": verify_square(F),
        "leading-terms": all(r.ok for r in rows) and [r.degree for r in rows] == [3, 5, 9, 17, 31, 57, 105, 193],
    }
    if cfg.fmt == "json":
        text = _dumps({"schema": SCHEMA, "seed": cfg.seed, "checks": checks, "degrees": [r.degree for r in rows]})
    else:
        text = "".join(f"{k} {'ok' if v else 'FAILED'}\n" for k, v in checks.items())
    return text, all(checks.values())


def cmd_report(cfg: RunConfig) -> str:
    seqs, counts, _ = _load_inputs(cfg)
    rep = analyze(seqs, counts, cfg.seed)
    checks = table_checks(seqs, counts)
    if cfg.fmt == "json":
        return _dumps({**rep.to_json(), "tables": {c.name: {"matches": c.matches, "mismatches": c.mismatches} for c in checks}})
    return render_markdown(rep, checks)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(ns)
        started = time.time()
        ok = True
        if cfg.subcommand == "degrees":
            text = cmd_degrees(cfg)
        elif cfg.subcommand == "fixed-points":
            text = cmd_fixed_points(cfg)
        elif cfg.subcommand == "analyze":
            text = cmd_analyze(cfg)
        elif cfg.subcommand == "verify":
            text, ok = cmd_verify(cfg)
        else:
            text = cmd_report(cfg)
        _emit(cfg, text)
        log.info("%s finished in %.1f s", cfg.subcommand, time.time() - started)
        return EXIT_OK if ok else EXIT_FAILURE
    except ConfigError as exc:
        print(f"quadmap: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (WitnessDisagreement, CountDisagreement, FixedCountDisagreement, PathFailureError, DegreePredictionError) as exc:
        print(f"quadmap: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())


def console() -> None:
    sys.exit(main())
