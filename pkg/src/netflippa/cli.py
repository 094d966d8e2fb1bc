"""Command-line front end: ``netflippa simulate | select | embed | validate``.

Graphs are exchanged as plain edge lists with 0-based node ids::

    # n=5
    0 1
    1 1
    2 4

The optional ``# n=<N>`` header fixes the node count (otherwise it is the largest
id plus one). Other lines starting with ``#`` and blank lines are ignored;
``u v`` and ``v u`` are the same edge, duplicates collapse, ``u u`` is a
self-loop. Reports are JSON, bulk numeric output is CSV.
"""
import argparse
import csv
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import theory
from .dcsbm import PRESETS, DcsbmParams, sample_adjacency
from .exceptions import InvalidInputError, ModelValidityError
from .flippa import MODES, FlipConfig, embed, select_dimension
from .normadj import build_normalized_adjacency
from .rng import RngStream

_HEADER = re.compile(r"^#\s*n\s*=\s*(\S*)\s*$")
REPORT_KEYS = ("n", "alpha", "trials", "quantile", "seed", "eigenvalues", "flip_leading",
               "threshold", "k_hat", "comparison_mode", "margin")


class EdgeListError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


# --- edge lists -----------------------------------------------------------------

def parse_edge_list(text: str) -> np.ndarray:
    """Parse edge-list text into a dense symmetric 0/1 adjacency matrix."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m:
                try:
                    value = int(m.group(1))
                except ValueError:
                    raise EdgeListError(f"bad node count in header {line!r}", lineno) from None
                if value < 1:
                    raise EdgeListError("node count must be positive", lineno)
                if n is not None and value != n:
                    raise EdgeListError(f"conflicting node count {value} (already {n})", lineno)
                n = value
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"node ids must be integers, got {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise EdgeListError(f"negative node id in {line!r}", lineno)
        edges.append((u, v, lineno))

    if n is None:
        if not edges:
            raise EdgeListError("no edges and no '# n=<N>' header; node count unknown")
        n = 1 + max(max(u, v) for u, v, _ in edges)
    for u, v, lineno in edges:
        if u >= n or v >= n:
            raise EdgeListError(f"node id {max(u, v)} out of range for n={n}", lineno)
    A = np.zeros((n, n), dtype=np.int8)
    if edges:
        uv = np.array([(u, v) for u, v, _ in edges])
        A[uv[:, 0], uv[:, 1]] = 1
        A[uv[:, 1], uv[:, 0]] = 1
    return A


def read_edge_list(path) -> np.ndarray:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(a) -> str:
    a = np.asarray(a)
    iu, ju = np.nonzero(np.triu(a))
    lines = [f"# n={a.shape[0]}"] + [f"{u} {v}" for u, v in zip(iu, ju)]
    return "\n".join(lines) + "\n"


def write_edge_list(path, a):
    Path(path).write_text(format_edge_list(a))


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".params.json")


# --- reports ----------------------------------------------------------------------

def selection_report(result, n, cfg: FlipConfig, alpha) -> dict:
    return {
        "n": int(n),
        "alpha": float(alpha),
        "trials": int(cfg.trials),
        "quantile": float(cfg.quantile),
        "seed": int(cfg.seed),
        "eigenvalues": [float(x) for x in result.eigenvalues],
        "flip_leading": [float(x) for x in result.flip_leading],
        "threshold": float(result.threshold),
        "k_hat": int(result.k_hat),
        "comparison_mode": result.mode,
        "margin": float(result.margin),
    }


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_report(path) -> dict:
    doc = json.loads(Path(path).read_text())
    missing = [k for k in REPORT_KEYS if k not in doc]
    if missing:
        raise InvalidInputError(f"report lacks keys {missing}")
    return doc


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# --- commands -----------------------------------------------------------------------

def cmd_simulate(args):
    if args.params_file:
        doc = json.loads(Path(args.params_file).read_text())
        params = DcsbmParams.from_dict(doc)
    else:
        params = PRESETS[args.preset](args.n, RngStream(args.seed, 0), q_scale=args.q_scale)
    a = sample_adjacency(params, RngStream(args.seed, 1))
    write_edge_list(args.out, a)
    sidecar_path(args.out).write_text(dump_json(params.to_dict()))
    return 0


def cmd_select(args):
    a = read_edge_list(args.input)
    cfg = FlipConfig(trials=args.trials, quantile=args.quantile, seed=args.seed,
                     mode=args.mode, margin=args.margin)
    l = build_normalized_adjacency(a, args.alpha)
    result = select_dimension(l, cfg)
    _emit(dump_json(selection_report(result, a.shape[0], cfg, args.alpha)), args.out)
    return 0


def cmd_embed(args):
    a = read_edge_list(args.input)
    if not 1 <= args.k <= a.shape[0]:
        raise InvalidInputError(f"k must lie in [1, {a.shape[0]}], got {args.k}")
    coords = embed(build_normalized_adjacency(a, args.alpha), args.k)
    rows = [["node"] + [f"v{j + 1}" for j in range(args.k)]]
    rows += [[str(i)] + [repr(float(x)) for x in row] for i, row in enumerate(coords)]
    _emit("".join(",".join(r) + "\n" for r in rows), args.out)
    return 0


def _parse_grid(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidInputError(f"grid must be comma-separated integers, got {text!r}") from None


def cmd_validate(args):
    grid = _parse_grid(args.grid)
    if len(grid) < theory.MIN_GRID:
        raise InvalidInputError(f"grid needs at least {theory.MIN_GRID} values, got {len(grid)}")
    if args.reps < theory.MIN_REPS:
        raise InvalidInputError(f"reps must be at least {theory.MIN_REPS}, got {args.reps}")
    if args.stat == "synthetic":
        fit = theory.synthetic_decay(grid)
    else:
        fit = theory.decay_fit(args.stat, grid, args.reps, family=args.family,
                               alpha=args.alpha, seed=args.seed, moment=args.moment)
    verdict = "PASS" if fit.within() else "FAIL"
    summary = {
        "stat": fit.stat,
        "family": args.family,
        "alpha": args.alpha,
        "seed": args.seed,
        "reps": args.reps,
        "moment": args.moment,
        "grid": [int(n) for n in fit.grid],
        "estimates": [float(x) for x in fit.estimates],
        "slope": fit.slope,
        "intercept": fit.intercept,
        "band": list(theory.SLOPE_BAND),
        "verdict": verdict,
    }
    out = Path(args.out)
    json_path = out if out.suffix == ".json" else out.with_name(out.name + ".json")
    csv_path = json_path.with_suffix(".csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["stat", "n", "rep", "value"])
        if fit.samples is None:
            for n, v in zip(fit.grid, fit.estimates):
                w.writerow([fit.stat, int(n), 0, repr(float(v))])
        else:
            for n, row in zip(fit.grid, fit.samples):
                for rep, v in enumerate(row):
                    w.writerow([fit.stat, int(n), rep, repr(float(v))])
    json_path.write_text(dump_json(summary))
    print(f"{fit.stat}: slope {fit.slope:.4f} in band {theory.SLOPE_BAND}? {verdict}")
    return 0 if verdict == "PASS" else 1


# --- parser -------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="netflippa",
        description="Select the embedding dimension of an undirected network by signflip "
                    "parallel analysis. Node ids in edge lists are 0-based.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="sample a blockmodel graph to an edge list")
    src = sim.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), default="fig1")
    src.add_argument("--params-file", help="JSON with fields q, g (1-based labels), M")
    sim.add_argument("--n", type=int, default=2000)
    sim.add_argument("--q-scale", type=float, default=1.0,
                     help="factor on the preset q levels (presets need n >= 1818 at 1.0)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    sel = sub.add_parser("select", help="run signflip parallel analysis on an edge list")
    sel.add_argument("input")
    sel.add_argument("--alpha", type=float, default=0.5)
    sel.add_argument("--trials", type=int, default=20)
    sel.add_argument("--quantile", type=float, default=1.0)
    sel.add_argument("--seed", type=int, default=0)
    sel.add_argument("--mode", choices=MODES, default="upper-edge")
    sel.add_argument("--margin", type=float, default=0.0)
    sel.add_argument("--out", default="-")
    sel.set_defaults(func=cmd_select)

    emb = sub.add_parser("embed", help="write the leading eigenvectors as CSV")
    emb.add_argument("input")
    emb.add_argument("--alpha", type=float, default=0.5)
    emb.add_argument("--k", type=int, default=2)
    emb.add_argument("--out", default="-")
    emb.set_defaults(func=cmd_embed)

    val = sub.add_parser("validate", help="Monte Carlo decay-rate check of a theorem statistic")
    val.add_argument("--stat", choices=sorted(theory.STATS) + ["synthetic"], default="thm4")
    val.add_argument("--grid", default="250,500,1000,2000")
    val.add_argument("--reps", type=int, default=50)
    val.add_argument("--alpha", type=float, default=0.5)
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--family", choices=sorted(PRESETS), default="fig1")
    val.add_argument("--moment", type=int, default=1)
    val.add_argument("--out", required=True, help="summary JSON path; per-replicate CSV goes alongside")
    val.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EdgeListError, InvalidInputError, ModelValidityError, OSError,
            json.JSONDecodeError, ValueError, TypeError) as exc:
        print(f"netflippa {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
