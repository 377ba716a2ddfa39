"""Seeded match play, winrate-table estimation and PLC experiments.

Every game belongs to a cell ``(stage, pair, opening, colour, game index)``
and gets its own seed derived from the master seed and that key, so a run can
be interrupted and resumed, and reruns are bit-identical.  Matches are logged
one JSON object per line; the report is rebuilt from the log alone.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import pie
from .agents import PlayerSpec, make_agent
from .elo import depth_from_plc
from .errors import ConfigError, CorruptLogError
from .games import (Color, Move, canonical_openings, get_geometry, initial_state, is_terminal,
                    legal_moves, play, winner)
from .rng import derive_seed, make_generator

log = logging.getLogger(__name__)

FREE = "FREE"
RULES = (pie.RDR, pie.PR, pie.GFM, FREE)
RATIONAL_STAGE, FREE_STAGE = 0, 1
BLACK_IDX, WHITE_IDX = 0, 1
LOG_NAME, REPORT_NAME, CSV_NAME, CONFIG_NAME = "matches.jsonl", "report.json", "summary.csv", "config.json"
CSV_COLUMNS = ["rule", "plc_eq1", "plc_eq2", "depth_frac", "depth_int", "ci_low", "ci_high"]


@dataclass
class MatchRecord:
    pair: tuple[str, str]
    opening: str
    colors: dict[str, str]
    winner: str
    moves: list[list[int]]
    seed: int
    game: str = "nogo"
    size: int = 5
    cell: tuple[int, ...] = ()

    @property
    def black(self) -> str:
        return self.colors["black"]

    def strong_won(self) -> bool:
        strong = self.pair[0]
        return self.colors[self.winner] == strong

    def to_json(self) -> str:
        d = asdict(self)
        d["pair"] = list(self.pair)
        d["cell"] = list(self.cell)
        return json.dumps(d, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "MatchRecord":
        d = json.loads(line)
        d["pair"] = tuple(d["pair"])
        d["cell"] = tuple(d.get("cell", ()))
        return cls(**d)


def replay(record: MatchRecord) -> Color:
    """Re-apply the recorded moves and return the winner they produce."""
    s = initial_state(record.game, record.size)
    for r, c in record.moves:
        s = play(s, Move((r, c)))
    w = winner(s)
    if w is None:
        raise CorruptLogError(f"record {record.cell} does not reach a terminal position")
    return w


def play_match(game: str, size: int, black: PlayerSpec, white: PlayerSpec, opening: Move | None,
               seed: int, pair: tuple[str, str] | None = None, cell: tuple[int, ...] = ()) -> MatchRecord:
    """One full game.  ``opening``, when given, is Black's first move and is not chosen by an agent."""
    s = initial_state(game, size)
    moves: list[list[int]] = []
    if opening is not None:
        if is_terminal(s) or opening not in legal_moves(s):
            raise ConfigError(f"opening {opening} is not legal on {game} size {size}")
        s = play(s, opening)
        moves.append(list(opening.cell))
    agents = {Color.BLACK: make_agent(black, derive_seed(seed, 0)),
              Color.WHITE: make_agent(white, derive_seed(seed, 1))}
    while not is_terminal(s):
        m = agents[s.to_move].select_move(s)
        s = play(s, m)
        moves.append(list(m.cell))
    w = winner(s)
    return MatchRecord(
        pair=pair or (black.label, white.label),
        opening="free" if opening is None else str(opening),
        colors={"black": black.label, "white": white.label},
        winner="black" if w is Color.BLACK else "white",
        moves=moves, seed=seed, game=game, size=size, cell=tuple(cell),
    )


@dataclass
class ExperimentConfig:
    game: str = "nogo"
    size: int = 5
    pool: list[PlayerSpec] = field(default_factory=list)
    openings: str | list[list[int]] = "canonical"
    games_per_cell: int = 100
    master_seed: int = 0
    rules: list[str] = field(default_factory=lambda: [pie.RDR, pie.PR, pie.GFM])
    out: str | None = None
    threads: int = 1
    bootstrap_resamples: int = 200

    def __post_init__(self):
        self.pool = [p if isinstance(p, PlayerSpec) else PlayerSpec.from_dict(p) for p in self.pool]
        self.rules = list(self.rules)
        get_geometry(self.game, self.size)
        if len(self.pool) < 2:
            raise ConfigError("the player pool needs at least 2 players")
        if len({p.label for p in self.pool}) != len(self.pool):
            raise ConfigError("player labels must be unique")
        if self.games_per_cell < 1:
            raise ConfigError("games_per_cell must be >= 1")
        if not self.rules or set(self.rules) - set(RULES):
            raise ConfigError(f"rules must be a non-empty subset of {RULES}")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.bootstrap_resamples < 100:
            raise ConfigError("bootstrap_resamples must be >= 100")
        if not (self.openings in ("canonical", "all") or isinstance(self.openings, list)):
            raise ConfigError("openings must be 'canonical', 'all' or a list of [row, col]")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pool"] = [p.to_dict() for p in self.pool]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        return cls(**d)

    def config_hash(self) -> str:
        d = self.to_dict()
        for volatile in ("out", "threads"):
            d.pop(volatile)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    def ordered_pool(self) -> list[PlayerSpec]:
        """Weakest to strongest by simulation budget (stable)."""
        return sorted(self.pool, key=lambda p: (p.kind == "mcts", p.simulations))

    def opening_moves(self) -> list[Move]:
        if self.openings == "canonical":
            return canonical_openings(self.game, self.size)
        if self.openings == "all":
            geo = get_geometry(self.game, self.size)
            return [geo.move_of(i) for i in range(geo.n_cells)]
        return [Move((int(r), int(c))) for r, c in self.openings]


def _pairs(pool: Sequence[PlayerSpec]) -> list[tuple[PlayerSpec, PlayerSpec]]:
    """(strong, weak) adjacent pairs weakest first, then the strongest-vs-weakest pair."""
    pairs = [(pool[k + 1], pool[k]) for k in range(len(pool) - 1)]
    if len(pool) > 2:
        pairs.append((pool[-1], pool[0]))
    return pairs


@dataclass(frozen=True)
class _Job:
    game: str
    size: int
    black: PlayerSpec
    white: PlayerSpec
    opening: Move | None
    seed: int
    pair: tuple[str, str]
    cell: tuple[int, ...]


def _run_job(job: _Job) -> MatchRecord:
    return play_match(job.game, job.size, job.black, job.white, job.opening, job.seed, job.pair, job.cell)


def _cell_jobs(game, size, strong, weak, openings, g, master_seed, stage, pair_index) -> list[_Job]:
    jobs = []
    for oi, opening in enumerate(openings):
        for color in (BLACK_IDX, WHITE_IDX):
            black, white = (strong, weak) if color == BLACK_IDX else (weak, strong)
            for k in range(g):
                cell = (stage, pair_index, oi, color, k)
                jobs.append(_Job(game, size, black, white, opening, derive_seed(master_seed, *cell),
                                 (strong.label, weak.label), cell))
    return jobs


def _execute(jobs: Sequence[_Job], threads: int, sink: Callable[[MatchRecord], None] | None = None) -> list[MatchRecord]:
    out = []
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (threads * 8)))
            for rec in results:
                out.append(rec)
                if sink:
                    sink(rec)
    else:
        for job in jobs:
            rec = _run_job(job)
            out.append(rec)
            if sink:
                sink(rec)
    return out


def table_from_records(records: Iterable[MatchRecord], opening_ids: Sequence[str] | None = None) -> pie.WinrateTable:
    """Aggregate the records of one (strong, weak) pair into a winrate table.

    ``p`` counts games with the strong player as Black, ``q`` as White.
    """
    wins: dict[str, list[int]] = {}
    pair = None
    for r in records:
        pair = pair or r.pair
        w = wins.setdefault(r.opening, [0, 0, 0, 0])
        side = 0 if r.colors["black"] == r.pair[0] else 2
        w[side] += r.strong_won()
        w[side + 1] += 1
    if not wins:
        raise ConfigError("no match records to aggregate")
    ids = list(opening_ids) if opening_ids else list(wins)
    ops = []
    for oid in ids:
        bw, bn, ww, wn = wins.get(oid, [0, 0, 0, 0])
        if bn == 0 or wn == 0:
            raise ConfigError(f"opening {oid} lacks games for one colour")
        ops.append(pie.Opening(oid, bw / bn, ww / wn, bn, wn))
    return pie.WinrateTable(tuple(ops), tuple(pair))


def estimate_table(game: str, size: int, strong: PlayerSpec, weak: PlayerSpec, openings: Sequence[Move],
                   games_per_cell: int, seed: int, threads: int = 1,
                   records: list[MatchRecord] | None = None) -> pie.WinrateTable:
    """Play ``games_per_cell`` games per (opening, colour) and return the strong player's winrates."""
    if games_per_cell < 1:
        raise ConfigError("games_per_cell must be >= 1")
    jobs = _cell_jobs(game, size, strong, weak, list(openings), games_per_cell, seed, RATIONAL_STAGE, 0)
    recs = _execute(jobs, threads)
    if records is not None:
        records.extend(recs)
    return table_from_records(recs, [str(m) for m in openings])


def free_table_from_records(records: Iterable[MatchRecord]) -> pie.WinrateTable:
    return table_from_records(records, ["free"])


def resample_tables(tables: Sequence[pie.WinrateTable], rng: np.random.Generator) -> list[pie.WinrateTable]:
    """Binomial resample of every counted cell; analytic cells (count 0) are kept."""
    out = []
    for t in tables:
        ops = []
        for o in t.openings:
            p = rng.binomial(o.n_p, o.p) / o.n_p if o.n_p else o.p
            q = rng.binomial(o.n_q, o.q) / o.n_q if o.n_q else o.q
            ops.append(pie.Opening(o.id, p, q, o.n_p, o.n_q))
        out.append(pie.WinrateTable(tuple(ops), t.pair))
    return out


def bootstrap_ci(tables: Sequence[pie.WinrateTable], statistic: Callable[[list[pie.WinrateTable]], float],
                 resamples: int = 1000, seed: int = 0, level: float = 0.95) -> tuple[float, float]:
    """Percentile interval of ``statistic`` under per-cell binomial resampling."""
    if not tables:
        raise ConfigError("bootstrap_ci needs at least one table")
    if resamples < 100:
        raise ConfigError("bootstrap_ci needs at least 100 resamples")
    rng = make_generator(seed)
    stats = np.array([statistic(resample_tables(tables, rng)) for _ in range(resamples)])
    alpha = (1.0 - level) / 2
    lo, hi = np.quantile(stats, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


@dataclass
class RuleRow:
    rule: str
    plc_eq1: float
    plc_eq2: float
    depth_frac: float
    depth_int: int
    ci_low: float
    ci_high: float
    gaps: list[float]
    w: list[float]
    openings: list[str | None]


@dataclass
class PlcReport:
    game: str
    size: int
    order: list[str]
    rows: list[RuleRow]
    gfm_per_index: list[dict]
    tables: list[dict]
    free_tables: list[dict]
    config_hash: str
    n_records: int
    low_count: bool
    wall_clock: float = 0.0

    def row(self, rule: str) -> RuleRow:
        for r in self.rows:
            if r.rule == rule:
                return r
        raise KeyError(rule)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([r.rule, f"{r.plc_eq1:.4f}", f"{r.plc_eq2:.4f}", f"{r.depth_frac:.4f}",
                             r.depth_int, f"{r.ci_low:.4f}", f"{r.ci_high:.4f}"])
        return buf.getvalue()

    def table_row(self) -> str:
        """One line in the layout of a per-size results table."""
        cells = "  ".join(f"{r.rule}={r.plc_eq1:.2f}" for r in self.rows)
        return f"{self.game} {self.size}x{self.size} ({len(self.order)} players): {cells}"


def _row(rule: str, outcomes: list[pie.RuleOutcome], extreme: pie.RuleOutcome | None,
         ci: tuple[float, float]) -> RuleRow:
    gaps = [o.gap for o in outcomes]
    plc1 = float(sum(gaps))
    plc2 = extreme.gap if extreme is not None else plc1
    frac, integer = depth_from_plc(max(plc1, 0.0))
    return RuleRow(rule, plc1, plc2, frac, integer, ci[0], ci[1], gaps,
                   [o.w for o in outcomes], [o.chosen_opening for o in outcomes])


def evaluate_rules(adjacent: list[pie.WinrateTable], extreme: pie.WinrateTable | None, rules: Sequence[str],
                   resamples: int = 200, seed: int = 0) -> tuple[list[RuleRow], list[dict]]:
    """Rule rows (Eq.-1 sums over ``adjacent``, Eq.-2 from ``extreme``) with bootstrap intervals."""
    rows: list[RuleRow] = []
    gfm_detail: list[dict] = []
    ext = extreme if extreme is not None else (adjacent[0] if len(adjacent) == 1 else None)

    def ci(stat):
        return bootstrap_ci(adjacent, stat, resamples, seed)

    for rule in (pie.RDR, pie.PR):
        if rule in rules:
            res = pie.plc_under_rule(adjacent, rule)
            rows.append(_row(rule, res.outcomes, pie.rule_outcome(ext, rule) if ext else None,
                             ci(lambda ts, r=rule: pie.plc_under_rule(ts, r).plc)))
    if pie.GFM in rules:
        res = pie.plc_under_rule(adjacent, pie.GFM)
        best_i = res.per_index.index(res.best)
        worst_i = res.per_index.index(res.worst)
        for name, idx, pick in (("GFM-max", best_i, lambda g: g.best.plc), ("GFM-min", worst_i, lambda g: g.worst.plc)):
            rows.append(_row(name, res.per_index[idx].outcomes, pie.w_gfm(ext, idx) if ext else None,
                             ci(lambda ts, f=pick: f(pie.plc_under_rule(ts, pie.GFM)))))
        gfm_detail = [{"opening": r.outcomes[0].chosen_opening, "plc": r.plc, "gaps": r.gaps} for r in res.per_index]
        gfm_detail.append({"opening": "per-pair-best", "plc": res.envelope.plc, "gaps": res.envelope.gaps})
    return rows, gfm_detail


def _free_rows(adjacent, extreme, resamples, seed):
    outcomes = [pie.w_gfm(t, 0) for t in adjacent]
    ext = pie.w_gfm(extreme, 0) if extreme is not None else (outcomes[0] if len(outcomes) == 1 else None)
    interval = bootstrap_ci(adjacent, lambda ts: sum(pie.w_gfm(t, 0).gap for t in ts), resamples, seed)
    row = _row(FREE, outcomes, ext, interval)
    for i, o in enumerate(outcomes):
        row.openings[i] = "free"
    return row


class MatchLog:
    """Append-only newline-delimited record file supporting resumption."""

    def __init__(self, path: Path):
        self.path = path

    def load(self) -> list[MatchRecord]:
        if not self.path.exists():
            return []
        text = self.path.read_text()
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        elif lines:
            # interrupted write: drop the partial last line
            log.warning("dropping truncated final record in %s", self.path)
            lines.pop()
            self.path.write_text("".join(line + "\n" for line in lines))
        records = []
        for n, line in enumerate(lines, 1):
            try:
                records.append(MatchRecord.from_json(line))
            except (json.JSONDecodeError, TypeError, KeyError) as exc:
                raise CorruptLogError(f"{self.path}:{n}: unreadable record ({exc})") from None
        return records

    def append(self, rec: MatchRecord) -> None:
        with self.path.open("a") as fh:
            fh.write(rec.to_json() + "\n")


def _plan(c: ExperimentConfig) -> tuple[list[_Job], list[PlayerSpec], list[Move]]:
    pool = c.ordered_pool()
    openings = c.opening_moves()
    start = initial_state(c.game, c.size)
    legal = [] if is_terminal(start) else legal_moves(start)
    for m in openings:
        if m not in legal:
            raise ConfigError(f"opening {m} is not legal on {c.game} size {c.size}")
    jobs: list[_Job] = []
    rational = any(r in c.rules for r in (pie.RDR, pie.PR, pie.GFM))
    for k, (strong, weak) in enumerate(_pairs(pool)):
        if rational:
            jobs += _cell_jobs(c.game, c.size, strong, weak, openings, c.games_per_cell, c.master_seed,
                               RATIONAL_STAGE, k)
        if FREE in c.rules:
            jobs += _cell_jobs(c.game, c.size, strong, weak, [None], c.games_per_cell, c.master_seed,
                               FREE_STAGE, k)
    return jobs, pool, openings


def run_experiment(c: ExperimentConfig) -> PlcReport:
    """Play (or resume) every cell of the experiment and evaluate the requested rules."""
    t0 = time.perf_counter()
    jobs, pool, openings = _plan(c)
    sink = None
    done: dict[tuple, MatchRecord] = {}
    if c.out:
        out = Path(c.out)
        out.mkdir(parents=True, exist_ok=True)
        cfg_path = out / CONFIG_NAME
        if cfg_path.exists():
            try:
                stored = json.loads(cfg_path.read_text())
            except json.JSONDecodeError:
                raise CorruptLogError(f"{cfg_path} is unreadable") from None
            if stored.get("config_hash") != c.config_hash():
                raise ConfigError(f"{out} holds a different experiment (config hash mismatch)")
        else:
            cfg_path.write_text(json.dumps({"config_hash": c.config_hash(), "config": c.to_dict()}, indent=2) + "\n")
        mlog = MatchLog(out / LOG_NAME)
        done = {tuple(r.cell): r for r in mlog.load()}
        sink = mlog.append
    todo = [j for j in jobs if j.cell not in done]
    if done:
        log.info("resuming: %d of %d games already played", len(jobs) - len(todo), len(jobs))
    for rec in _execute(todo, c.threads, sink):
        done[tuple(rec.cell)] = rec
    records = [done[j.cell] for j in jobs]
    report = build_report(c, records, pool, openings)
    report.wall_clock = time.perf_counter() - t0
    if c.out:
        write_report(report, Path(c.out))
    return report


def build_report(c: ExperimentConfig, records: Sequence[MatchRecord], pool: Sequence[PlayerSpec] | None = None,
                 openings: Sequence[Move] | None = None) -> PlcReport:
    """Recompute every number of a report from its match records."""
    pool = list(pool or c.ordered_pool())
    opening_ids = [str(m) for m in (openings or c.opening_moves())]
    pairs = _pairs(pool)
    by_cell: dict[tuple[int, int], list[MatchRecord]] = {}
    for r in records:
        by_cell.setdefault((r.cell[0], r.cell[1]), []).append(r)
    n_adj = len(pool) - 1
    rows: list[RuleRow] = []
    gfm_detail: list[dict] = []
    tables: list[dict] = []
    free_tables: list[dict] = []
    low = False
    boot_seed = derive_seed(c.master_seed, 99)
    if any(r in c.rules for r in (pie.RDR, pie.PR, pie.GFM)):
        all_t = [table_from_records(by_cell[(RATIONAL_STAGE, k)], opening_ids) for k in range(len(pairs))]
        adjacent, extreme = all_t[:n_adj], (all_t[n_adj] if len(all_t) > n_adj else None)
        rows, gfm_detail = evaluate_rules(adjacent, extreme, c.rules, c.bootstrap_resamples, boot_seed)
        tables = [t.to_dict() for t in all_t]
        low = low or any(t.low_count for t in all_t)
    if FREE in c.rules:
        all_f = [free_table_from_records(by_cell[(FREE_STAGE, k)]) for k in range(len(pairs))]
        adjacent, extreme = all_f[:n_adj], (all_f[n_adj] if len(all_f) > n_adj else None)
        rows.append(_free_rows(adjacent, extreme, c.bootstrap_resamples, boot_seed))
        free_tables = [t.to_dict() for t in all_f]
        low = low or any(t.low_count for t in all_f)
    return PlcReport(c.game, c.size, [p.label for p in pool], rows, gfm_detail, tables, free_tables,
                     c.config_hash(), len(records), low)


def write_report(report: PlcReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / REPORT_NAME).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    (out / CSV_NAME).write_text(report.to_csv())


def free_opening_plc(c: ExperimentConfig) -> PlcReport:
    """PLC when Black's own agent chooses the first move (no rational-opening assumption)."""
    d = c.to_dict()
    d["rules"] = [FREE]
    return run_experiment(ExperimentConfig.from_dict(d))


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return ExperimentConfig.from_dict(data)

