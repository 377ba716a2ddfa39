"""Command-line entry point: ``depthlab <command> ...``.

Exit codes: 0 success, 1 property violation, 2 usage or configuration error,
3 corrupted files.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import pie, verify
from .agents import PlayerSpec
from .elo import WinMatrix, depth_from_plc, depth_report
from .errors import ConfigError, CorruptLogError, DomainError
from .games import canonical_openings, get_geometry
from .harness import FREE, ExperimentConfig, free_opening_plc, load_config, run_experiment

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CORRUPT = 0, 1, 2, 3
RULE_FLAGS = {"rdr": pie.RDR, "pr": pie.PR, "gfm": pie.GFM, "free": FREE}
DEFAULT_POOL = [125, 250, 500, 1000, 2000, 4000, 8000]


def _rules(text: str | None, default: list[str]) -> list[str]:
    if not text:
        return default
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if tok not in RULE_FLAGS:
            raise ConfigError(f"unknown rule {tok!r}; expected {sorted(RULE_FLAGS)}")
        out.append(RULE_FLAGS[tok])
    return out


def _print_pool_analysis(pool: list[pie.WinrateTable], rule_flag: str) -> None:
    wanted = [pie.RDR, pie.PR, pie.GFM] if rule_flag == "all" else [RULE_FLAGS[rule_flag]]
    for k, t in enumerate(pool):
        print(f"pair {k}: {t.pair[0]} vs {t.pair[1]}  (K={t.K})")
        print(f"  {'opening':>8} {'p':>8} {'q':>8} {'(p+q)/2':>8}")
        for i, o in enumerate(t.openings):
            print(f"  {o.id:>8} {o.p:8.4f} {o.q:8.4f} {pie.w_gfm(t, i).w:8.4f}")
        if pie.RDR in wanted:
            print(f"  w_rdr {pie.w_rdr(t).w:.6g}")
        if pie.PR in wanted:
            o = pie.w_pr(t)
            print(f"  w_pr  {o.w:.6g}  (strong opens {o.chosen_opening}, strong ends as {'White' if o.swap else 'Black'})")
    print()
    print(f"{'rule':<14} {'gaps (weakest pair first)':<32} {'PLC eq1':>10} {'PLC eq2':>10} {'depth':>7}")
    for rule in wanted:
        res = pie.plc_under_rule(pool, rule)
        rows = [res] if rule != pie.GFM else res.per_index
        for r in rows:
            eq2 = f"{r.gaps[0]:10.3f}" if len(pool) == 1 else f"{'n/a':>10}"
            frac = depth_from_plc(r.plc)[0] if r.plc >= 0 else float("nan")
            gaps = ", ".join(f"{g:.3f}" for g in r.gaps)
            print(f"{r.rule:<14} {gaps:<32} {r.plc:10.3f} {eq2} {frac:7.2f}")
        if rule == pie.GFM:
            print(f"{'GFM max':<14} {'':<32} {res.best.plc:10.3f}")
            print(f"{'GFM min':<14} {'':<32} {res.worst.plc:10.3f}")


def cmd_analyze_table(args) -> int:
    if args.fixture:
        pool = pie.fixture(args.fixture)
    elif args.path:
        try:
            text = Path(args.path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.path}: {exc}") from None
        pool = pie.load_pool(text)
    else:
        raise ConfigError("give a table file or --fixture")
    _print_pool_analysis(pool, args.rule)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite in ("theorem1", "symmetry") and args.seed is None:
        raise ConfigError(f"verify {args.suite} needs --seed")
    if args.suite == "theorem1":
        res = verify.theorem1(args.n or 100_000, args.seed)
    elif args.suite == "symmetry":
        res = verify.symmetry(args.game, args.size, args.n or 200, args.seed)
    elif args.suite == "nodraws":
        res = verify.nodraws(args.game, args.size, args.n or 10_000, args.seed)
    else:
        if not args.log:
            raise ConfigError("verify replay needs --log")
        res = verify.replay_log(args.log)
    print(res.summary())
    for f in res.failures[:10]:
        print(f"  counterexample: {f}")
    return EXIT_OK if res.ok else EXIT_VIOLATION


def _experiment_config(args, default_rules: list[str]) -> ExperimentConfig:
    d = load_config(args.config).to_dict() if args.config else {
        "game": "nogo", "size": 5, "pool": [PlayerSpec("mcts", b).to_dict() for b in DEFAULT_POOL],
        "rules": default_rules,
    }
    if args.game:
        d["game"] = args.game
    if args.size:
        d["size"] = args.size
    if args.pool:
        budgets = [int(b) for b in args.pool.split(",") if b.strip()]
        d["pool"] = [PlayerSpec("mcts", b, args.exploration).to_dict() for b in budgets]
    if args.pool_size is not None:
        if args.pool_size < 2:
            raise ConfigError("--pool-size must be at least 2")
        d["pool"] = d["pool"][: args.pool_size]
        if len(d["pool"]) < args.pool_size:
            raise ConfigError(f"--pool-size {args.pool_size} exceeds the {len(d['pool'])} configured players")
    if args.games_per_cell:
        d["games_per_cell"] = args.games_per_cell
    if args.seed is not None:
        d["master_seed"] = args.seed
    elif not args.config:
        raise ConfigError("--seed is required")
    if args.rules:
        d["rules"] = _rules(args.rules, default_rules)
    if args.openings:
        d["openings"] = args.openings
    if args.out:
        d["out"] = args.out
    threads = args.threads or os.environ.get("DEPTHLAB_THREADS")
    if threads:
        d["threads"] = int(threads)
    return ExperimentConfig.from_dict(d)


def _print_report(report) -> None:
    print(report.table_row())
    print(report.to_csv(), end="")
    if report.low_count:
        print("warning: some cells rest on a single game")


def cmd_tournament(args) -> int:
    c = _experiment_config(args, [pie.RDR, pie.PR, pie.GFM])
    _print_report(run_experiment(c))
    return EXIT_OK


def cmd_free_opening(args) -> int:
    c = _experiment_config(args, [FREE])
    _print_report(free_opening_plc(c))
    return EXIT_OK


def cmd_depth(args) -> int:
    try:
        data = json.loads(Path(args.path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read win matrix {args.path}: {exc}") from None
    m = WinMatrix.from_dict(data)
    print(json.dumps(depth_report(m, args.threshold).to_dict(), indent=2))
    return EXIT_OK


def cmd_openings(args) -> int:
    geo = get_geometry(args.game, args.size)
    moves = canonical_openings(args.game, args.size)
    print(f"{args.game} size {args.size}: {len(moves)} openings ({geo.n_cells} cells)")
    for m in moves:
        print(f"  {m}")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    names = [args.name] if args.name else sorted(pie.FIXTURES)
    for name in names:
        pool = pie.fixture(name)
        payload = [t.to_dict() for t in pool]
        if args.dump:
            out = Path(args.dump)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{name}.json").write_text(json.dumps(payload, indent=2) + "\n")
        else:
            print(f"{name}: {json.dumps(payload)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="depthlab", description="Game depth and first-move rule laboratory.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze-table", help="evaluate first-move rules on a winrate table or pool")
    p.add_argument("path", nargs="?")
    p.add_argument("--fixture", choices=sorted(pie.FIXTURES))
    p.add_argument("--rule", choices=["all", "rdr", "pr", "gfm"], default="all")
    p.set_defaults(func=cmd_analyze_table)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=["theorem1", "symmetry", "nodraws", "replay"])
    p.add_argument("-n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--game", default="y")
    p.add_argument("--size", type=int, default=3)
    p.add_argument("--log")
    p.set_defaults(func=cmd_verify)

    for name, func, help_text in (("tournament", cmd_tournament, "run a ladder experiment"),
                                  ("free-opening", cmd_free_opening, "PLC with agent-chosen openings")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config")
        p.add_argument("--game")
        p.add_argument("--size", type=int)
        p.add_argument("--pool", help="comma-separated simulation budgets")
        p.add_argument("--pool-size", type=int)
        p.add_argument("--exploration", type=float, default=1.0)
        p.add_argument("--games-per-cell", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--rules", help="comma-separated subset of rdr,pr,gfm,free")
        p.add_argument("--openings", choices=["canonical", "all"])
        p.add_argument("--out")
        p.add_argument("--threads", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("depth", help="PLC and depth of a win matrix JSON")
    p.add_argument("path")
    p.add_argument("--threshold", type=float, default=0.6)
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("openings", help="list canonical opening moves")
    p.add_argument("--game", default="nogo")
    p.add_argument("--size", type=int, default=5)
    p.set_defaults(func=cmd_openings)

    p = sub.add_parser("fixtures", help="print or dump the built-in winrate tables")
    p.add_argument("--name", choices=sorted(pie.FIXTURES))
    p.add_argument("--dump")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CorruptLogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
