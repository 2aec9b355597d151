"""Batch command-line interface.

Subcommands chain through JSON envelopes (see FORMATS.md):

    generate   write a synthetic dataset CSV plus ground-truth labels
    preprocess scale / returns / correlation construction / denoising
    spc        temperature sweep of the cluster Monte Carlo engine
    fspc       genetic maximization of the configuration likelihood
    validate   phase report, likelihood/ARI curves, free-energy table
    mst        minimum-spanning-tree export (JSON and DOT)

Exit codes: 0 success, 1 data/domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .dataset import (
    CorrelationMatrix,
    DataMatrix,
    load_envelope,
    load_matrix,
    make_positive_definite,
    log_returns,
    pairwise_overlap_correlation,
    save_envelope,
)
from .errors import DomainError, ParseError, SpinclustError
from .evaluation import generate_blobs, generate_circles, minimum_spanning_tree
from .fspc import ga_run
from .preprocess import imn_denoise, min_max_scale, rmt_denoise
from .similarity import (
    correlation_to_distance,
    euclidean_distances,
    mutual_knn_graph,
    nearest_neighbor_order,
    similarity_from_distance,
    strength_matrix,
)
from .spc import sweep_from_json, sweep_to_json, temperature_sweep
from .thermo import free_energy_curve
from .validation import ari_vs_temperature, lc_vs_temperature, phase_report


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        return fallback


def _write_json(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def _read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from None


def parse_trange(spec: str) -> list[float]:
    """Parse 'start:stop:step' into an inclusive increasing grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f"temperature range must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise DomainError(f"non-numeric temperature range {spec!r}") from None
    if step <= 0 or start <= 0 or stop < start:
        raise DomainError(f"bad temperature range {spec!r}")
    grid = []
    i = 0
    while True:
        t = round(start + i * step, 12)
        if t > stop + 1e-12:
            break
        grid.append(t)
        i += 1
    return grid


def _load_table(path: str, has_header: bool) -> DataMatrix | CorrelationMatrix:
    if path.endswith(".json"):
        return load_envelope(path)
    return load_matrix(path, has_header=has_header)


def _distances_from_input(obj: DataMatrix | CorrelationMatrix) -> tuple[np.ndarray, list[str]]:
    """Distance matrix for graph construction, from data or a correlation."""
    if isinstance(obj, DataMatrix):
        return euclidean_distances(obj), list(obj.row_ids)
    if obj.kind == "similarity_from_distance":
        # inverse of the construction up to the lost global scale; strengths
        # are invariant under that scale
        d = 1.0 - obj.values
        np.fill_diagonal(d, 0.0)
        return np.maximum(d, 0.0), list(obj.row_ids)
    return correlation_to_distance(obj), list(obj.row_ids)


def _write_labels(labels, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for lab in labels:
            fh.write(f"{int(lab)}\n")


def _read_labels(path: str) -> np.ndarray:
    if path.endswith(".json"):
        doc = _read_json(path)
        if "best_labels" in doc:
            return np.asarray(doc["best_labels"], dtype=int)
        raise ParseError(f"{path}: no labels found in JSON document")
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(float(line)))
            except ValueError:
                raise ParseError(f"{path}: bad label on line {line_no}: {line!r}") from None
    return np.asarray(out, dtype=int)


def cmd_generate(args) -> int:
    if args.dataset == "circles":
        data, labels = generate_circles(args.n, noise=args.noise, seed=args.seed)
    else:
        sigmas = [float(s) for s in args.sigmas.split(",")]
        data, labels = generate_blobs(args.n, args.dims, sigmas, seed=args.seed)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(",".join(data.col_ids) + "\n")
        for row in data.values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    labels_path = args.labels or (args.output + ".labels.csv")
    _write_labels(labels, labels_path)
    print(f"wrote {args.output} ({data.n_rows} x {data.n_cols}) and {labels_path}")
    return 0


def cmd_preprocess(args) -> int:
    obj = _load_table(args.input, args.has_header)
    if isinstance(obj, CorrelationMatrix):
        data = None
        corr = obj
    else:
        data = obj
        corr = None
        if args.transpose:
            data = data.transposed()
        if args.returns:
            data = log_returns(data)
        if args.scale:
            data = min_max_scale(data)
        if args.order_rows:
            order = nearest_neighbor_order(euclidean_distances(data))
            data = DataMatrix(data.values[order], data.mask[order],
                              row_ids=[data.row_ids[i] for i in order],
                              col_ids=list(data.col_ids))

    if args.denoise == "imn":
        corr = imn_denoise(data if data is not None else corr,
                           max_iters=args.imn_iters, tol=args.imn_tol)
    elif args.denoise == "rmt":
        if data is None:
            raise DomainError("rmt denoising needs a data matrix input")
        corr = rmt_denoise(data, upper_only=args.rmt_upper_only)
    elif args.corr == "pearson":
        corr = pairwise_overlap_correlation(data)
    elif args.corr == "similarity":
        corr = similarity_from_distance(euclidean_distances(data), row_ids=data.row_ids)

    if corr is None:
        save_envelope(data, args.output)
        print(f"wrote data envelope {args.output}")
        return 0
    if args.pd:
        corr = make_positive_definite(corr)
    save_envelope(corr, args.output)
    print(f"wrote {corr.kind} correlation envelope {args.output}")
    return 0


def cmd_spc(args) -> int:
    obj = _load_table(args.input, args.has_header)
    dist, _ = _distances_from_input(obj)
    graph = mutual_knn_graph(dist, k=args.k)
    strengths = strength_matrix(graph, dist)
    grid = parse_trange(args.t)
    sweep = temperature_sweep(strengths, grid, m_steps=args.steps,
                              burn_in=args.burn_in, q=args.q, theta=args.theta,
                              seed=args.seed, workers=args.threads)
    params = {"k": args.k, "q": args.q, "theta": args.theta, "steps": args.steps,
              "burn_in": args.burn_in, "seed": args.seed, "t": args.t,
              "k_hat": graph.k_hat, "length_scale_a": graph.length_scale_a}
    _write_json(sweep_to_json(sweep, params=params, with_g=args.dump_g), args.output)
    print(f"wrote sweep with {len(sweep)} temperatures to {args.output}")
    return 0


def cmd_fspc(args) -> int:
    obj = load_envelope(args.corr)
    if not isinstance(obj, CorrelationMatrix):
        raise DomainError(f"{args.corr} is not a correlation envelope")
    res = ga_run(obj, pop_size=args.pop, max_generations=args.gens,
                 stall_generations=args.stall, seed=args.seed,
                 objective=args.objective)
    _write_json(res.to_dict(), args.output)
    print(f"wrote result (fitness {res.fitness:.6g}, "
          f"{res.generations_run} generations) to {args.output}")
    return 0


def cmd_validate(args) -> int:
    sweep = sweep_from_json(_read_json(args.sweep))
    report = phase_report(sweep)
    doc = report.to_dict()
    md = [report.to_markdown()]

    fec = free_energy_curve(sweep)
    doc["free_energy"] = [{"T": t, "F": f, "S": s, "chi": c} for t, f, s, c in fec]

    if args.corr:
        corr = load_envelope(args.corr)
        if not isinstance(corr, CorrelationMatrix):
            raise DomainError(f"{args.corr} is not a correlation envelope")
        curve = lc_vs_temperature(sweep, corr)
        doc["lc_curve"] = [{"T": t, "lc": v} for t, v in curve]
        best_t, best_lc = max(curve, key=lambda tv: tv[1])
        md.append(f"\nLikelihood argmax: T={best_t:g} (L_c={best_lc:.4f})\n")

    if args.reference:
        ref = _read_labels(args.reference)
        curve = ari_vs_temperature(sweep, ref)
        doc["ari_curve"] = [{"T": t, "ari": v} for t, v in curve]
        best_t, best_ari = max(curve, key=lambda tv: tv[1])
        md.append(f"\nARI maximum vs reference: T={best_t:g} (ARI={best_ari:.4f})\n")

    _write_json(doc, args.output + ".json")
    with open(args.output + ".md", "w", encoding="utf-8") as fh:
        fh.write("".join(md))
    with open(args.output + ".csv", "w", encoding="utf-8") as fh:
        fh.write("T,F,S,chi,mean_m\n")
        by_t = {st.temperature: st.mean_magnetization for st in sweep}
        for t, f, s, c in fec:
            fh.write(f"{t!r},{f!r},{s!r},{c!r},{by_t[t]!r}\n")
    print(f"wrote {args.output}.json, {args.output}.md, {args.output}.csv")
    return 0


def cmd_mst(args) -> int:
    obj = _load_table(args.input, args.has_header)
    dist, ids = _distances_from_input(obj)
    mst = minimum_spanning_tree(dist)
    _write_json(mst.to_dict(), args.output)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(mst.to_dot(ids))
    print(f"wrote MST ({len(mst.edges)} edges, total weight "
          f"{mst.total_weight:.6g}) to {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinclust",
        description="Spin-model clustering toolkit: Monte Carlo sweeps and "
                    "likelihood-maximizing genetic search.")
    parser.add_argument("--version", action="version", version=f"spinclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    default_seed = _env_int("SPINCLUST_SEED", 0)
    default_threads = _env_int("SPINCLUST_THREADS", 1)

    p = sub.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("dataset", choices=["circles", "blobs"])
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--noise", type=float, default=0.5, help="circles: radial noise factor")
    p.add_argument("--dims", type=int, default=3, help="blobs: feature count")
    p.add_argument("--sigmas", default="0.25,0.5,1",
                   help="blobs: comma-separated per-cluster spreads")
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--output", required=True)
    p.add_argument("--labels", default=None,
                   help="ground-truth labels path (default: <output>.labels.csv)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("preprocess", help="scaling, returns, correlations, denoising")
    p.add_argument("--input", required=True, help="CSV or JSON envelope")
    p.add_argument("--no-header", dest="has_header", action="store_false",
                   help="CSV input has no header row")
    p.add_argument("--transpose", action="store_true")
    p.add_argument("--returns", action="store_true", help="log returns of price rows")
    p.add_argument("--scale", action="store_true", help="min-max scale each column")
    p.add_argument("--order-rows", action="store_true",
                   help="reorder rows by nearest-neighbor chaining (row_ids keep "
                        "identity; positional label files no longer align)")
    p.add_argument("--corr", choices=["none", "pearson", "similarity"], default="none")
    p.add_argument("--pd", action="store_true", help="repair to positive definite")
    p.add_argument("--denoise", choices=["none", "imn", "rmt"], default="none")
    p.add_argument("--imn-iters", type=int, default=500)
    p.add_argument("--imn-tol", type=float, default=1e-8)
    p.add_argument("--rmt-upper-only", action="store_true")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("spc", help="temperature sweep")
    p.add_argument("--input", required=True, help="data CSV/JSON or correlation JSON")
    p.add_argument("--no-header", dest="has_header", action="store_false")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--q", type=int, default=20)
    p.add_argument("--t", default="0.005:0.25:0.005", help="grid start:stop:step")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--burn-in", type=int, default=400)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--threads", type=int, default=default_threads)
    p.add_argument("--dump-g", action="store_true",
                   help="include the pair-correlation matrix per temperature (large)")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_spc)

    p = sub.add_parser("fspc", help="genetic likelihood maximization")
    p.add_argument("--corr", required=True, help="correlation JSON envelope")
    p.add_argument("--pop", type=int, default=100)
    p.add_argument("--gens", type=int, default=25000)
    p.add_argument("--stall", type=int, default=100)
    p.add_argument("--objective", choices=["lc", "kmeans"], default="lc")
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_fspc)

    p = sub.add_parser("validate", help="phase report and validation curves")
    p.add_argument("--sweep", required=True, help="sweep JSON from the spc subcommand")
    p.add_argument("--corr", default=None, help="correlation envelope for the L_c curve")
    p.add_argument("--reference", default=None,
                   help="labels CSV or fspc result JSON for the ARI curve")
    p.add_argument("--output", required=True, help="basename for .json/.md/.csv outputs")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("mst", help="minimum spanning tree export")
    p.add_argument("--input", required=True, help="data CSV/JSON or correlation JSON")
    p.add_argument("--no-header", dest="has_header", action="store_false")
    p.add_argument("--output", required=True)
    p.add_argument("--dot", default=None, help="also write Graphviz DOT here")
    p.set_defaults(func=cmd_mst)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except SpinclustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
