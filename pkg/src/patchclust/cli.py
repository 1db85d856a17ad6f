"""Command-line entry point: ``patchclust <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import synth
from .core import Slice1D, ValidationError
from .io import read_dataset_csv, write_dataset_csv, write_merges_csv
from .linkage import single_linkage_1d
from .pipeline import (
    FeatureSelectionConfig,
    IntersticeDetector,
    run_feature_selection,
    slice_population_histogram,
)
from .relevance import find_interstices, relevance
from .svg import dendrogram_svg

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


def _snake(key: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", key).lower()


def load_config(path) -> dict:
    """Read a JSON or TOML key/value document; keys are returned snake_case."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        raw = json.loads(text)
    else:
        raw = tomllib.loads(text)
    return {_snake(k): v for k, v in raw.items()}


def _parse_params(pairs):
    out = {}
    for p in pairs or ():
        if "=" not in p:
            raise ValidationError(f"parameter {p!r} is not key=value")
        k, v = p.split("=", 1)
        try:
            out[k.strip()] = json.loads(v)
        except json.JSONDecodeError:
            out[k.strip()] = v
    return out


def _emit(obj, out):
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


GENERATORS = ("poisson-uniform", "normal", "two-cluster", "shapes", "elongated-2d", "blob-2d")


def _generate(model: str, params: dict, seed):
    truth = {}
    if model == "poisson-uniform":
        x = synth.gen_poisson_uniform(params.get("lam", 500.0), params.get("lo", 0.0),
                                      params.get("hi", 1.0), seed, params.get("fixed_count"))
        ds = synth.signal_dataset(x)
    elif model == "normal":
        x = synth.gen_normal(int(params.get("count", 500)), params.get("mu", 0.0),
                             params.get("sigma", 0.1), seed)
        ds = synth.signal_dataset(x)
    elif model == "two-cluster":
        fixed = bool(params.pop("fixed_count", False))
        m = synth.TwoClusterModel(**params)
        ds = synth.signal_dataset(synth.gen_two_cluster_model(m, seed, fixed))
        truth = {"interstice": [m.x1, m.x2], "expected_counts": list(m.expected_counts())}
    elif model == "shapes":
        ds = synth.gen_shapes(int(params.get("count", 5000)), seed, params.get("n_circles"))
    elif model == "elongated-2d":
        ds, truth = synth.gen_elongated_2d(int(params.get("count", 1000)),
                                           params.get("gap", 0.2), seed)
    elif model == "blob-2d":
        ds = synth.gen_blob_2d(int(params.get("count", 1000)), params.get("center", (0.5, 0.5)),
                               params.get("sigma", 0.1), seed)
    else:
        raise ValidationError(f"unknown model {model!r}")
    return ds, truth


def cmd_gen(args):
    params = _parse_params(args.param)
    ds, truth = _generate(args.model, dict(params), args.seed)
    write_dataset_csv(ds, args.out)
    meta = {"model": args.model, "params": params, "seed": args.seed,
            "n_rows": ds.n_rows, "columns": list(ds.names), "truth": truth}
    meta_path = args.meta or f"{args.out}.json"
    Path(meta_path).write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote {ds.n_rows} rows to {args.out} (metadata: {meta_path})", file=sys.stderr)


def cmd_dendro(args):
    ds = read_dataset_csv(args.csv)
    col = int(args.column) if args.column.isdigit() else args.column
    x = ds.column(col)
    tree = single_linkage_1d(x)
    rep = relevance(tree, args.alpha, args.occurrence)
    if args.merges:
        write_merges_csv(tree, args.merges)
    if args.svg:
        Path(args.svg).write_text(dendrogram_svg(tree, title=f"rho = {rep.rho:.4f}"))
    doc = rep.to_dict()
    if rep.occurred:
        s = Slice1D(x, np.arange(ds.n_rows))
        doc["interstices"] = [it.to_dict() for it in find_interstices(s, rep)]
    if args.json:
        _emit(doc, args.out)
    else:
        print(f"N={tree.n_leaves} H={rep.H:.6g} occurred={rep.occurred} rho={rep.rho:.4f}")
        for b in rep.branches:
            print(f"  branch size={len(b.rows)} formation={b.formation_height:.6g} "
                  f"split={b.split_height:.6g} length={b.length:.6g}")


def _fs_config(path) -> FeatureSelectionConfig:
    return FeatureSelectionConfig.from_mapping(load_config(path) if path else {})


def cmd_select(args):
    ds = read_dataset_csv(args.csv)
    cfg = _fs_config(args.config)
    result = run_feature_selection(ds, cfg)
    pops = result.populations
    _emit({
        "config": cfg.to_dict(),
        "features": [r.to_dict() for r in result.rows],
        "n_slices": int(pops.size),
        "mean_slice_population": float(pops.mean()) if pops.size else None,
    }, args.out)


def cmd_hist(args):
    ds = read_dataset_csv(args.csv)
    cfg = _fs_config(args.config)
    hist = slice_population_histogram(ds, cfg, bins=args.bins)
    _emit({"config": cfg.to_dict(), "histogram": hist.to_dict()}, args.out)


def cmd_detect(args):
    ds = read_dataset_csv(args.csv)
    conf = load_config(args.config) if args.config else {}
    if "r" in conf:
        conf["radius"] = conf.pop("r")
    allowed = IntersticeDetector().get_params()
    unknown = set(conf) - set(allowed)
    if unknown:
        print(f"ignoring unknown config keys: {sorted(unknown)}", file=sys.stderr)
    det = IntersticeDetector(**{k: v for k, v in conf.items() if k in allowed}).fit(ds)
    _emit({
        "params": det.get_params(),
        "patches": [p.to_dict() for p in det.patches_],
        "intervals": [list(iv) for iv in det.intervals_],
    }, args.out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="patchclust",
                                 description="Patched cluster detection on 1D feature-space slices.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a synthetic dataset as CSV")
    g.add_argument("model", choices=GENERATORS)
    g.add_argument("-p", "--param", action="append", metavar="KEY=VALUE",
                   help="generator parameter, repeatable")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--meta", help="metadata path (default: <out>.json)")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("dendro", help="dendrogram and relevance of one column")
    d.add_argument("csv")
    d.add_argument("--column", default="0", help="column name or index")
    d.add_argument("--alpha", type=float, default=4.0)
    d.add_argument("--occurrence", choices=("root", "any"), default="root")
    d.add_argument("--json", action="store_true", help="print the report as JSON")
    d.add_argument("--merges", help="write the merge table CSV here")
    d.add_argument("--svg", help="write an SVG dendrogram here")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dendro)

    for name, func, helptext in (
        ("select-features", cmd_select, "rank features by slice relevance"),
        ("slice-hist", cmd_hist, "histogram of retained slice populations"),
        ("detect-interstices", cmd_detect, "mark separation patches along one axis"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("csv")
        p.add_argument("--config", help="JSON or TOML config file")
        p.add_argument("--out")
        if name == "slice-hist":
            p.add_argument("--bins", type=int, default=20)
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValidationError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
