"""Command-line entry point.

Exit status: 0 on success, 1 when an ``--oracle`` cross-check disagrees,
2 on bad input or bad flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .apsp import ApspConfig, apsp, apsp_bounded_edge_classes, build_tree, transitive_closure
from .bench import SUITES, distances_agree, run_suite
from .bits import UsageError
from .disk import build_disk_graph, generate_dense_points
from .mixed import mixed_left, mixed_left_naive, mixed_right, mixed_right_naive
from .oracles import bfs_closure, floyd_warshall_edge_classes, floyd_warshall_vertex_weighted

log = logging.getLogger("hamapsp")

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    witness_output: str | None = None
    stats: str | None = None
    seed: int = 0
    mst: str | None = None
    side: str = "auto"
    t: int | None = None
    epsilon: float | None = None
    threads: int = 1
    oracle: bool = False
    naive: bool = False
    disk: str | None = None
    edge_classes: bool = False
    of: str = "rows"
    n: int = 0
    b: int = 4
    r: float = 0.1
    suite: str = "clustered"
    sizes: tuple[int, ...] = (256, 512, 1024)
    with_apsp: bool = False

    def validate(self) -> None:
        if self.mst == "euclid" and not self.disk:
            raise UsageError("--mst euclid needs a point set (--disk)")
        if self.subcommand == "apsp":
            if bool(self.inputs) == bool(self.disk):
                raise UsageError("apsp takes either a graph file or --disk POINTS, not both")
            if self.disk and self.edge_classes:
                raise UsageError("--disk and --edge-classes cannot be combined")
        if self.subcommand == "mixed" and self.side not in ("right", "left"):
            raise UsageError("mixed needs --side right or left")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")

    def apsp_config(self, points=None) -> ApspConfig:
        mst = self.mst or ("euclid" if points is not None else "lsh")
        return ApspConfig(mst=mst, side=self.side, t=self.t, epsilon=self.epsilon, seed=self.seed,
                          threads=self.threads, points=points)


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _stats(cfg: RunConfig, record: dict) -> None:
    line = json.dumps(record, sort_keys=True, default=float)
    if cfg.stats:
        with open(cfg.stats, "a") as fh:
            fh.write(line + "\n")
    else:
        print(line, file=sys.stderr)


def _cmd_apsp(cfg: RunConfig) -> int:
    points = None
    if cfg.disk:
        points = io.read_points(cfg.disk)
        G = build_disk_graph(points)
    else:
        G = io.read_graph(cfg.inputs[0], edge_classes=cfg.edge_classes)
    conf = cfg.apsp_config(points)
    res = apsp_bounded_edge_classes(G, conf) if cfg.edge_classes else apsp(G, conf)
    _emit(io.format_scalar_csv(res.D), cfg.output)
    status = EXIT_OK
    if cfg.oracle:
        ref = floyd_warshall_edge_classes(G) if cfg.edge_classes else floyd_warshall_vertex_weighted(G)
        ok = distances_agree(res.D, ref)
        res.stats["oracle_ok"] = ok
        status = EXIT_OK if ok else EXIT_MISMATCH
    _stats(cfg, {"subcommand": "apsp", "n": G.n, **res.stats})
    return status


def _cmd_closure(cfg: RunConfig) -> int:
    B = io.read_bitmatrix(cfg.inputs[0])
    closure = transitive_closure(B, cfg.apsp_config())
    _emit(io.format_bitmatrix(closure), cfg.output)
    if cfg.oracle:
        ok = closure == bfs_closure(B)
        _stats(cfg, {"subcommand": "closure", "n": B.rows, "oracle_ok": ok})
        return EXIT_OK if ok else EXIT_MISMATCH
    return EXIT_OK


def _cmd_mixed(cfg: RunConfig) -> int:
    A = io.read_scalar_csv(cfg.inputs[0])
    B = io.read_bitmatrix(cfg.inputs[1])
    mst = cfg.mst or "exact"
    if cfg.naive:
        res = mixed_right_naive(A, B) if cfg.side == "right" else mixed_left_naive(B, A)
    elif cfg.side == "right":
        res = mixed_right(A, B, mst=mst, seed=cfg.seed, threads=cfg.threads)
    else:
        res = mixed_left(B, A, mst=mst, seed=cfg.seed, threads=cfg.threads)
    _emit(io.format_scalar_csv(res.C), cfg.output)
    if cfg.witness_output:
        Path(cfg.witness_output).write_text(io.format_witness_csv(res.W))
    print(f"op_count={res.op_count} tree_cost={res.tree_cost}", file=sys.stderr)
    if cfg.oracle and not cfg.naive:
        ref = mixed_right_naive(A, B) if cfg.side == "right" else mixed_left_naive(B, A)
        if not (np.array_equal(ref.C, res.C) and np.array_equal(ref.W, res.W)):
            print("oracle mismatch", file=sys.stderr)
            return EXIT_MISMATCH
    return EXIT_OK


def _cmd_mst(cfg: RunConfig) -> int:
    M = io.read_bitmatrix(cfg.inputs[0])
    rows = M.transpose() if cfg.of == "cols" else M
    mode = cfg.mst or "exact"
    if mode == "euclid":
        raise UsageError("mst subcommand builds Hamming trees; use exact or lsh")
    tree = build_tree(rows, mode, seed=cfg.seed, epsilon=cfg.epsilon)
    _emit(io.format_tree(tree), cfg.output)
    return EXIT_OK


def _cmd_gen_disk(cfg: RunConfig) -> int:
    P = generate_dense_points(cfg.n, cfg.b, cfg.r, cfg.seed)
    _emit(io.format_points(P), cfg.output)
    return EXIT_OK


def _cmd_bench(cfg: RunConfig) -> int:
    status = EXIT_OK
    lines = []
    for report in run_suite(cfg.suite, cfg.sizes, cfg.seed, oracle=cfg.oracle, with_apsp=cfg.with_apsp):
        lines.append(report.to_json())
        if report.oracle_ok is False:
            status = EXIT_MISMATCH
        if cfg.output is None:
            print(lines[-1], flush=True)
    if cfg.output is not None:
        _emit("\n".join(lines) + "\n", cfg.output)
    return status


COMMANDS = {
    "apsp": _cmd_apsp,
    "closure": _cmd_closure,
    "mixed": _cmd_mixed,
    "mst": _cmd_mst,
    "gen-disk": _cmd_gen_disk,
    "bench": _cmd_bench,
}


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hamapsp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, *, mst_choices=("exact", "lsh")):
        sp.add_argument("-o", "--output", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--mst", choices=mst_choices)
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("apsp", help="all-pairs distances of a vertex-weighted digraph")
    sp.add_argument("inputs", nargs="?", metavar="GRAPH")
    common(sp, mst_choices=("exact", "lsh", "euclid"))
    sp.add_argument("--disk", metavar="POINTS", help="build the unit disk graph of a point set")
    sp.add_argument("--edge-classes", action="store_true", help="graph edges carry weight classes")
    sp.add_argument("--side", choices=("auto", "right", "left"), default="auto")
    sp.add_argument("--t", type=int)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--stats", help="append a JSON stats line here (default: stderr)")

    sp = sub.add_parser("closure", help="reflexive-transitive closure of a Boolean matrix")
    sp.add_argument("inputs", metavar="MATRIX")
    common(sp)
    sp.add_argument("--side", choices=("auto", "right", "left"), default="auto")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--stats")

    sp = sub.add_parser("mixed", help="mixed product of a real and a Boolean matrix")
    sp.add_argument("a_csv", metavar="A_CSV")
    sp.add_argument("b_bits", metavar="B_BITS")
    common(sp)
    sp.add_argument("--side", choices=("right", "left"), default="right")
    sp.add_argument("--naive", action="store_true", help="use the direct triple loop")
    sp.add_argument("--witness", dest="witness_output", help="write the witness CSV here")
    sp.add_argument("--oracle", action="store_true")

    sp = sub.add_parser("mst", help="Hamming spanning tree of matrix rows (or columns)")
    sp.add_argument("inputs", metavar="MATRIX")
    common(sp)
    sp.add_argument("--of", choices=("rows", "cols"), default="rows")
    sp.add_argument("--epsilon", type=float)

    sp = sub.add_parser("gen-disk", help="generate a b-dense point set")
    sp.add_argument("n", type=int)
    sp.add_argument("--b", type=int, default=4)
    sp.add_argument("--r", type=float, default=0.1)
    sp.add_argument("-o", "--output")
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("bench", help="op-count benchmark, one JSON line per instance")
    sp.add_argument("--suite", choices=sorted(SUITES), default="clustered")
    sp.add_argument("--sizes", default="256,512,1024")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--apsp", dest="with_apsp", action="store_true", help="also run the APSP pipeline")
    sp.add_argument("-o", "--output")
    return p


def parse_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    verbose = ns.pop("verbose")
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(name)s: %(message)s")
    if "a_csv" in ns:
        ns["inputs"] = [ns.pop("a_csv"), ns.pop("b_bits")]
    elif "inputs" in ns:
        ns["inputs"] = [ns["inputs"]] if ns["inputs"] else []
    if "sizes" in ns:
        try:
            ns["sizes"] = tuple(int(s) for s in ns["sizes"].split(",") if s)
        except ValueError:
            raise SystemExit(f"error: bad --sizes {ns['sizes']!r}") from None
    return RunConfig(**ns)


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
