"""Batch experiment runner.

Config files are flat key=value text (repeated keys form lists, '#' starts a
comment).  All randomness flows from the config's master seed through named
sub-streams; rerunning a command with the same config and seed produces
byte-identical result files, checksummed in the run manifest.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 invariant
violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__, lattice, limit, rescale, stats
from .errors import ConfigError, InvariantError
from .events import SeedSpec, marks_to_ignitions, read_marks_csv, sample_marks, write_marks_csv


class Config:
    """Flat key=value config with repeated keys."""

    def __init__(self, pairs: List[tuple]):
        self.pairs = pairs

    @classmethod
    def load(cls, path) -> "Config":
        pairs = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                pairs.append((key.strip(), value.strip()))
        return cls(pairs)

    def get(self, key: str, default=None, cast=str):
        hits = [v for k, v in self.pairs if k == key]
        if not hits:
            if default is None:
                raise ConfigError(f"missing config key {key!r}")
            return default
        if len(hits) > 1:
            raise ConfigError(f"config key {key!r} given {len(hits)} times; expected once")
        return self._cast(key, hits[0], cast)

    def get_list(self, key: str, cast=str, default=()):
        hits = [v for k, v in self.pairs if k == key]
        if not hits:
            return list(default)
        return [self._cast(key, v, cast) for v in hits]

    @staticmethod
    def _cast(key, value, cast):
        try:
            return cast(value)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from exc

    def canonical(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.pairs) + "\n"


class Manifest:
    def __init__(self, config: Config, seed: int):
        self.data = {
            "version": __version__,
            "config_sha256": hashlib.sha256(config.canonical().encode()).hexdigest(),
            "seed": seed,
            "files": {},
            "wall_clock": {},
        }
        self._t0 = time.perf_counter()
        self._stage_start = self._t0

    def stage(self, name: str) -> None:
        now = time.perf_counter()
        self.data["wall_clock"][name] = round(now - self._stage_start, 3)
        self._stage_start = now

    def add_file(self, path: Path) -> None:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.data["files"][path.name] = digest

    def write(self, out_dir: Path) -> None:
        self.data["wall_clock"]["total"] = round(time.perf_counter() - self._t0, 3)
        with open(out_dir / "run_manifest.json", "w") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _resolve_seed(config: Config) -> int:
    env = os.environ.get("FIRELINE_SEED")
    if env is not None:
        return int(env)
    return config.get("seed", cast=int)


def _log(args, msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# simulate-lattice
# ---------------------------------------------------------------------------


def _lattice_config(config: Config, seed: int, replica: int) -> lattice.LatticeConfig:
    lam = config.get("lambda", cast=float)
    half_width = config.get("A", cast=float)
    horizon = config.get("T", cast=float)
    if not 0.0 < lam < 1.0:
        raise ConfigError(f"lambda must lie in (0,1), got {lam}")
    source = config.get("ignitions", default="marks")
    log_inv = math.log(1.0 / lam)
    growth_seed = SeedSpec(seed, "growth").child(replica)
    if source == "marks":
        marks = sample_marks(horizon, half_width, SeedSpec(seed, "marks").child(replica))
        return lattice.LatticeConfig(
            lam=lam,
            half_width=half_width,
            raw_horizon=horizon * log_inv,
            growth_seed=growth_seed,
            ignitions=marks_to_ignitions(marks, lam),
        )
    if source == "clocks":
        return lattice.LatticeConfig(
            lam=lam,
            half_width=half_width,
            raw_horizon=horizon * log_inv,
            growth_seed=growth_seed,
            ignition_rate_clocks=True,
            ignition_seed=SeedSpec(seed, "ignite").child(replica),
        )
    raise ConfigError(f"ignitions must be 'marks' or 'clocks', got {source!r}")


def _lattice_replica(payload):
    config_pairs, seed, replica, probes, snaps, verify = payload
    config = Config(config_pairs)
    cfg = _lattice_config(config, seed, replica)
    runner = lattice.run_verified if verify else lattice.run
    res = runner(cfg, probes=probes, snapshot_times=snaps)
    return res


def cmd_simulate_lattice(args, config: Config, out_dir: Path, manifest: Manifest) -> None:
    seed = manifest.data["seed"]
    replicas = config.get("replicas", default=1, cast=int)
    probes = config.get_list("probe", cast=float)
    snaps = sorted(config.get_list("snapshot_t", cast=float))
    payloads = [
        (config.pairs, seed, r, probes, snaps, args.verify) for r in range(replicas)
    ]
    results = _map(args.threads, _lattice_replica, payloads)
    for r, res in enumerate(results):
        tag = f"r{r:04d}"
        burns_path = out_dir / f"burns_{tag}.csv"
        lattice.write_burns_csv(burns_path, res.burns)
        manifest.add_file(burns_path)
        if probes:
            probes_path = out_dir / f"probes_{tag}.csv"
            lattice.write_probes_csv(probes_path, res.probes, res.config.raw_horizon)
            manifest.add_file(probes_path)
        if snaps:
            snap_path = out_dir / f"snapshots_{tag}.txt"
            lattice.write_snapshots(snap_path, res.snapshots)
            manifest.add_file(snap_path)
        _log(args, f"lattice replica {r}: {len(res.burns)} burns, "
                   f"vacant {res.vacant_count}/{res.config.site_count}")
    manifest.stage("simulate")


# ---------------------------------------------------------------------------
# simulate-limit
# ---------------------------------------------------------------------------


def cmd_simulate_limit(args, config: Config, out_dir: Path, manifest: Manifest) -> None:
    seed = manifest.data["seed"]
    half_width = config.get("A", cast=float)
    horizon = config.get("T", cast=float)
    marks_file = config.get("marks_file", default="")
    if marks_file:
        marks = read_marks_csv(marks_file, horizon, half_width)
    else:
        marks = sample_marks(horizon, half_width, SeedSpec(seed, "marks"))
    timeline = limit.simulate(half_width, horizon, marks)
    if args.verify:
        _verify_timeline(timeline)
    marks_path = out_dir / "marks.csv"
    write_marks_csv(marks_path, marks)
    manifest.add_file(marks_path)
    tl_path = out_dir / "timeline.csv"
    limit.write_timeline_csv(tl_path, timeline)
    manifest.add_file(tl_path)
    n_grid = config.get("snapshot_grid", default=257, cast=int)
    grid = [horizon * k / (n_grid - 1) for k in range(n_grid)]
    dump_path = out_dir / "state_dump.txt"
    limit.write_state_dump(dump_path, timeline, grid)
    manifest.add_file(dump_path)
    _log(args, f"limit run: {len(marks)} marks, "
               f"{sum(1 for e in timeline.events if e.kind == 'macro')} macroscopic fires")
    manifest.stage("simulate")


def _verify_timeline(timeline: limit.Timeline) -> None:
    """Range and tiling scans over every post-mark state."""
    for state in timeline.states:
        t = state.time
        edges = [-state.half_width] + state.bx + [state.half_width]
        if any(b >= a for a, b in zip(edges[1:], edges)):
            raise InvariantError("breakpoints not strictly increasing")
        for j in range(len(state.bx)):
            z = state._z_bp(j, t)
            h = state._h_bp(j, t)
            if not (0.0 <= z <= 1.0 and 0.0 <= h <= 1.0):
                raise InvariantError("breakpoint value out of range")
        for c in range(len(state.czb)):
            z = state._z_cell(c, t)
            if not 0.0 <= z <= 1.0:
                raise InvariantError("cell value out of range")


# ---------------------------------------------------------------------------
# couple
# ---------------------------------------------------------------------------


def _couple_replica(payload):
    seed, lam, half_width, horizon, probes, replica = payload
    run = rescale.coupled_run(
        lam,
        half_width,
        horizon,
        SeedSpec(seed, "marks").child(replica),
        SeedSpec(seed, "growth").child(replica),
        probes,
    )
    return [
        {
            "lambda": lam,
            "A": half_width,
            "T": horizon,
            "seed": seed,
            "replica": replica,
            "probe": pc.probe,
            "delta_T": pc.delta_t,
            "sup_z": pc.sup_z,
            "int_D": pc.int_d,
        }
        for pc in run.probes
    ]


def cmd_couple(args, config: Config, out_dir: Path, manifest: Manifest) -> None:
    seed = manifest.data["seed"]
    lams = config.get_list("lambda", cast=float)
    if not lams:
        raise ConfigError("couple needs at least one lambda")
    half_width = config.get("A", cast=float)
    horizon = config.get("T", cast=float)
    replicas = config.get("replicas", default=200, cast=int)
    probes = config.get_list("probe", cast=float, default=(0.0,))
    records_path = out_dir / "couple_records.jsonl"
    summary = {"lambdas": lams, "A": half_width, "T": horizon,
               "replicas": replicas, "medians": {}, "boot_se": {}}
    with open(records_path, "w") as fh:
        for lam in lams:
            payloads = [(seed, lam, half_width, horizon, probes, r) for r in range(replicas)]
            deltas = []
            for recs in _map(args.threads, _couple_replica, payloads):
                for rec in recs:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
                    if rec["probe"] == probes[0]:
                        deltas.append(rec["delta_T"])
            summary["medians"][f"{lam:g}"] = stats.median(deltas)
            summary["boot_se"][f"{lam:g}"] = stats.bootstrap_median_se(deltas, 1000, seed)
            _log(args, f"lambda={lam:g}: median delta_T {summary['medians'][f'{lam:g}']:.4f}")
    manifest.add_file(records_path)
    summary_path = out_dir / "couple_summary.json"
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.add_file(summary_path)
    manifest.stage("couple")


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------


def _stats_rows(config: Config, seed: int) -> List[dict]:
    t = config.get("t", cast=float)
    replicas = config.get("replicas", default=1000, cast=int)
    half_width = config.get("A", cast=float)
    lams = config.get_list("lambda", cast=float)
    rows = []
    for estimator in config.get_list("estimator"):
        if estimator == "vacant":
            for lam in lams:
                est = stats.vacant_probability(lam, t, replicas, half_width, seed)
                rows.append(_row("vacant", est, t=t, **{"lambda": lam}))
        elif estimator == "window":
            windows = [tuple(map(float, w.split(":"))) for w in config.get_list("window")]
            for lam in lams:
                for est in stats.cluster_window_probs(lam, t, windows, replicas, half_width, seed):
                    rows.append(_row("window", est, t=t, a=est.window[0],
                                     b=est.window[1], **{"lambda": lam}))
        elif estimator == "mactail":
            for lam in lams:
                for bb in config.get_list("B", cast=float):
                    est = stats.macroscopic_tail(lam, t, bb, replicas, half_width, seed)
                    rows.append(_row("mactail", est, t=t, B=bb, **{"lambda": lam}))
        elif estimator == "lffp_tail":
            horizon = config.get("T", cast=float)
            for bb in config.get_list("B", cast=float):
                est = stats.lffp_length_tail(t, bb, replicas, half_width, horizon, seed)
                rows.append(_row("lffp_tail", est, t=t, B=bb))
        elif estimator == "atomless":
            zs = config.get_list("z", cast=float, default=(0.25, 0.5, 0.75))
            rep = stats.lffp_z_atomless(t, zs, replicas, half_width, seed)
            for z, hits in rep.exact_hits.items():
                rows.append({"estimator": "atom", "t": t, "z": z,
                             "p_hat": hits / rep.n, "se": 0.0, "n": rep.n,
                             "successes": hits})
            for est in rep.window_masses:
                rows.append(_row("zwindow", est, t=t, a=est.window[0], b=est.window[1]))
        elif estimator == "localization":
            horizon = config.get("T", cast=float)
            for process in config.get_list("process", default=("limit",)):
                lam_list = lams if process == "lattice" else [None]
                for lam in lam_list:
                    rep = stats.localization_coincidence(
                        half_width, horizon, replicas, seed, process=process, lam=lam
                    )
                    row = {"estimator": "localization", "process": process,
                           "A": half_width, "t": horizon, "p_hat": rep.fraction,
                           "se": rep.se, "n": rep.n, "successes": rep.agreeing}
                    if lam is not None:
                        row["lambda"] = lam
                    rows.append(row)
        else:
            raise ConfigError(f"unknown estimator {estimator!r}")
    return rows


def _row(name: str, est: stats.TailEstimate, **params) -> dict:
    row = {"estimator": name, "p_hat": est.p_hat, "se": est.se, "n": est.n,
           "successes": est.successes}
    if est.flagged:
        row["flagged"] = True
    row.update({k: v for k, v in params.items() if v is not None})
    return row


def cmd_stats(args, config: Config, out_dir: Path, manifest: Manifest) -> None:
    seed = manifest.data["seed"]
    rows = _stats_rows(config, seed)
    json_path = out_dir / "stats.json"
    with open(json_path, "w") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.add_file(json_path)
    csv_path = out_dir / "stats_batch.csv"
    cols = ["estimator", "lambda", "t", "a", "b", "B", "z", "process", "A",
            "p_hat", "se", "n", "successes"]
    with open(csv_path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(c)) for c in cols) + "\n")
    manifest.add_file(csv_path)
    for row in rows:
        _log(args, f"{row['estimator']}: p_hat={row['p_hat']:.5f} (n={row['n']})")
    manifest.stage("stats")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _map(threads: int, fn, payloads):
    if threads <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, payloads, chunksize=max(1, len(payloads) // (8 * threads))))


COMMANDS = {
    "simulate-lattice": cmd_simulate_lattice,
    "simulate-limit": cmd_simulate_limit,
    "couple": cmd_couple,
    "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fireline",
        description="Forest fire process simulators and Monte Carlo checks",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="key=value config file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--verify", action="store_true",
                        help="run full invariant scans (small instances only)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = Config.load(args.config)
        seed = _resolve_seed(config)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = Manifest(config, seed)
        COMMANDS[args.command](args, config, out_dir, manifest)
        manifest.write(out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
