"""Command-line front end.

Subcommands ``graph``, ``bmp``, ``table`` and ``verify``.  Data goes to
stdout (or ``--output``), progress to stderr.  Exit codes: 0 success,
1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from gmpy2 import mpq

from .bmp import DegreeBoundPolicy, NotGKM, bmp, multiplicity_table
from .coxeter import Weight, build_root_system
from .fixtures import FIXTURES
from .hecke import kl_table
from .momentgraph import build_block_graph, normalize_direction
from .sheaf import format_rank_poly, stalk_rank_poly
from .suites import SUITES, run_suites

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    cartan_type: str = "A"
    rank: int = 2
    weight: list | None = None  # fundamental-weight coordinates as strings; None means -2 rho
    direction: str = "up"
    bases: list = field(default_factory=lambda: ["all"])
    degree_cap: int | None = None
    window: int | None = None
    fixture: str | None = None
    output_format: str = "text"
    output: str | None = None

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> "JobConfig":
        return cls(**doc)

    def weight_coords(self) -> list:
        if self.weight is None:
            return [mpq(-2)] * self.rank
        return [mpq(Fraction(c)) for c in self.weight]

    def policy(self) -> DegreeBoundPolicy:
        kw = {}
        if self.degree_cap is not None:
            kw["degree_cap"] = self.degree_cap
        if self.window is not None:
            kw["saturation_window"] = self.window
        return DegreeBoundPolicy(**kw)


def parse_weight(text: str) -> list:
    try:
        return [str(Fraction(p.strip())) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse weight {text!r}: {exc}") from None


def build_graph(cfg: JobConfig):
    if cfg.fixture is not None:
        if cfg.fixture not in FIXTURES:
            raise UsageError(f"unknown fixture {cfg.fixture!r}; choose from {sorted(FIXTURES)}")
        return FIXTURES[cfg.fixture]()
    try:
        rs = build_root_system(cfg.cartan_type, cfg.rank)
        coords = cfg.weight_coords()
        if len(coords) != cfg.rank:
            raise UsageError(f"weight needs {cfg.rank} coordinates, got {len(coords)}")
        return build_block_graph(rs, Weight(coords))
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _emit(cfg: JobConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2)


# ----- commands -----------------------------------------------------------------


def cmd_graph(cfg: JobConfig) -> int:
    g = build_graph(cfg)
    fmt = cfg.output_format
    if fmt == "json":
        _emit(cfg, _dump(g.to_json()))
    elif fmt == "dot":
        _emit(cfg, g.to_dot())
    elif fmt == "text":
        lines = [f"{len(g)} vertices, {len(g.edges)} edges"]
        for v, name in enumerate(g.names):
            lines.append(f"  {name}  length {g.lengths[v]}")
        for k, (a, b) in enumerate(g.edges):
            lab = ",".join(str(c) for c in g.labels[k].integer_vector())
            lines.append(f"  {g.names[a]} -- {g.names[b]}  ({lab})")
        _emit(cfg, "\n".join(lines))
    else:
        raise UsageError(f"graph does not support format {fmt!r}")
    return EXIT_OK


def _bases(cfg: JobConfig, g) -> list:
    if cfg.bases == ["all"]:
        return list(range(len(g)))
    out = []
    for b in cfg.bases:
        if b not in g.index:
            raise UsageError(f"unknown vertex {b!r}")
        out.append(g.index[b])
    return out


def cmd_bmp(cfg: JobConfig) -> int:
    g = build_graph(cfg)
    if cfg.output_format not in ("json", "text"):
        raise UsageError(f"bmp does not support format {cfg.output_format!r}")
    direction = normalize_direction(cfg.direction)
    policy = cfg.policy()
    table = kl_table(g.block.group) if g.block is not None else None
    docs, texts = [], []
    status = EXIT_OK
    for x in _bases(cfg, g):
        t0 = time.perf_counter()
        try:
            res = bmp(g, direction, x, policy, oracle_table=table)
        except NotGKM as exc:
            _emit(cfg, _dump({"schema_version": SCHEMA_VERSION, "error": str(exc)}))
            return EXIT_FAIL
        _progress(f"bmp {direction} {g.names[x]}: {time.perf_counter() - t0:.2f}s")
        if not res.saturated or not res.oracle_ok:
            status = EXIT_FAIL
        docs.append(res.to_json())
        lines = [f"base {res.base_vertex} ({direction})"
                 + ("" if res.saturated else "  [not saturated]")
                 + ("" if res.oracle_ok else "  [oracle mismatch]")]
        for v, name in enumerate(g.names):
            if res.sheaf.stalk_shifts[v]:
                shifts = list(res.sheaf.stalk_shifts[v])
                lines.append(f"  {name}: {shifts}  {format_rank_poly(stalk_rank_poly(res.sheaf, v))}")
        texts.append("\n".join(lines))
    if cfg.output_format == "json":
        _emit(cfg, _dump({"schema_version": SCHEMA_VERSION, "direction": direction, "results": docs}))
    else:
        _emit(cfg, "\n".join(texts))
    return status


def cmd_table(cfg: JobConfig) -> int:
    g = build_graph(cfg)
    if g.block is None:
        raise UsageError("multiplicity tables need a block graph")
    t = multiplicity_table(g, cfg.direction, cfg.policy())
    fmt = cfg.output_format
    if fmt == "json":
        _emit(cfg, _dump(t.to_json()))
    elif fmt == "csv":
        _emit(cfg, t.to_csv())
    elif fmt == "text":
        _emit(cfg, t.render())
    else:
        raise UsageError(f"table does not support format {fmt!r}")
    return EXIT_OK if t.ungraded_ok else EXIT_FAIL


def cmd_verify(cfg: JobConfig, suites: list) -> int:
    g = build_graph(cfg)
    results = []
    for name in suites:
        t0 = time.perf_counter()
        res = run_suites(g, [name], cfg.policy(), _progress)[0]
        _progress(f"{name}: {'pass' if res.ok else 'FAIL'} ({time.perf_counter() - t0:.2f}s)")
        results.append(res)
    ok = all(r.ok for r in results)
    fmt = cfg.output_format
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "graph": {"vertices": len(g), "edges": len(g.edges),
                      **({"type": g.block.root_system.cartan_type, "rank": g.block.root_system.rank}
                         if g.block is not None else {"fixture": cfg.fixture})},
            "ok": ok,
            "suites": [r.to_json() for r in results],
        }
        _emit(cfg, _dump(doc))
    elif fmt == "text":
        lines = [f"{r.name:<18} {'pass' if r.ok else 'FAIL'}" for r in results]
        lines.append(f"overall: {'pass' if ok else 'FAIL'}")
        _emit(cfg, "\n".join(lines))
    else:
        raise UsageError(f"verify does not support format {fmt!r}")
    return EXIT_OK if ok else EXIT_FAIL


# ----- argument parsing ----------------------------------------------------------


def _common(p: argparse.ArgumentParser, formats) -> None:
    p.add_argument("--type", dest="cartan_type", default="A")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--lambda", dest="weight", default=None,
                   help="antidominant weight in fundamental-weight coordinates, e.g. -1,-3 (default -2rho)")
    p.add_argument("--fixture", choices=sorted(FIXTURES), default=None)
    p.add_argument("--format", dest="output_format", choices=formats, default="text")
    p.add_argument("--output", default=None)
    p.add_argument("--degree-cap", type=int, default=None)
    p.add_argument("--window", type=int, default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mgsheaves", description="Sheaves on moment graphs of Weyl group blocks.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("graph", help="emit the moment graph of a block")
    _common(p, ["text", "json", "dot"])
    p = sub.add_parser("bmp", help="build BMP sheaves")
    _common(p, ["text", "json"])
    p.add_argument("--dir", dest="direction", default="up")
    p.add_argument("--base", default="all", help="vertex name, comma-separated names, or 'all'")
    p = sub.add_parser("table", help="multiplicity table (rows w, columns x)")
    _common(p, ["text", "json", "csv"])
    p.add_argument("--dir", dest="direction", default="down")
    p = sub.add_parser("verify", help="run verification suites")
    _common(p, ["text", "json"])
    p.add_argument("--suite", default="all", help="'all' or comma-separated names: " + ", ".join(SUITES))
    return parser


def config_from_args(args) -> JobConfig:
    cfg = JobConfig(
        cartan_type=args.cartan_type,
        rank=args.rank,
        weight=parse_weight(args.weight) if args.weight is not None else None,
        fixture=args.fixture,
        output_format=args.output_format,
        output=args.output,
        degree_cap=args.degree_cap,
        window=args.window,
    )
    if hasattr(args, "direction"):
        try:
            cfg.direction = normalize_direction(args.direction)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if hasattr(args, "base"):
        cfg.bases = ["all"] if args.base == "all" else [b.strip() for b in args.base.split(",")]
    return cfg


def _suite_names(text: str, fixture: str | None) -> list:
    if text == "all":
        return list(SUITES)
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    return names


def _join_weight(argv: list) -> list:
    # "--lambda -1,-3" would otherwise read "-1,-3" as an option
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--lambda" and i + 1 < len(argv):
            out.append("--lambda=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = make_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_join_weight(argv))
    try:
        cfg = config_from_args(args)
        if args.command == "graph":
            return cmd_graph(cfg)
        if args.command == "bmp":
            return cmd_bmp(cfg)
        if args.command == "table":
            return cmd_table(cfg)
        return cmd_verify(cfg, _suite_names(args.suite, cfg.fixture))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
