"""Command-line front door: every core capability behind one `veclens` command.

Exit codes: 0 success, 2 usage error (argparse), 1 data error (OOV, parse,
dimension mismatch, ...) with the message on stderr.  Results go to stdout
(or --output); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import algebra, bias, plotspec, retrieval, transforms
from .errors import VecLensError
from .plotspec import canonical_json
from .store import Embedding, EmbeddingSet, get_set, load_store, save_store, featurize

_FORMATS = {"auto": "auto", "word2vec": "word2vec_text", "glove": "glove_text"}


def _common_parser():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--vectors",
        action="append",
        metavar="PATH",
        help="vector file to load; repeatable; use LABEL=PATH to set a label",
    )
    p.add_argument("--format", choices=sorted(_FORMATS), default="auto")
    p.add_argument("--metric", choices=["cosine", "euclidean"], default="cosine")
    p.add_argument("--output", metavar="PATH", help="write results here instead of stdout")
    p.add_argument("--json", action="store_true", help="emit canonical machine-readable JSON")
    return p


def _load_stores(args):
    if not args.vectors:
        raise VecLensError("at least one --vectors PATH is required")
    stores = []
    for spec in args.vectors:
        label = None
        path = spec
        if "=" in spec:
            label, path = spec.split("=", 1)
        store = load_store(path, _FORMATS[args.format])
        if label:
            store.label = label
        stores.append(store)
    return stores


def _emit(args, text):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _word_list(args):
    words = []
    if getattr(args, "words", None):
        words.extend(w for w in args.words.split(",") if w)
    if getattr(args, "words_file", None):
        with open(args.words_file, encoding="utf-8") as fh:
            words.extend(line.strip() for line in fh if line.strip())
    if not words:
        raise VecLensError("no words given; use --words or --words-file")
    return words


def _read_pairs(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    bad = [i + 1 for i, row in enumerate(rows) if len(row) != 2]
    if bad:
        raise VecLensError(f"pairs file {path}: lines {bad} do not have 2 columns")
    return [(a.strip(), b.strip()) for a, b in rows]


def _expr_tokens(ast):
    """All store tokens an expression touches (for --exclude-inputs)."""
    if isinstance(ast, algebra.Word):
        return {ast.token}
    if isinstance(ast, algebra.Phrase):
        return set(ast.text.split())
    return _expr_tokens(ast.left) | _expr_tokens(ast.right)


def _neighbors_json(neighbors):
    return [{"name": sn.name, "distance": sn.distance} for sn in neighbors]


def _neighbors_text(neighbors):
    return "".join(f"{sn.name}\t{sn.distance:.12g}\n" for sn in neighbors)


# --- subcommand handlers ---------------------------------------------------


def _cmd_eval(args):
    store = _load_stores(args)[0]
    emb = algebra.evaluate(algebra.parse(args.expr), store)
    if args.json:
        payload = {"name": emb.name, "dim": emb.dim, "vector": [float(v) for v in emb.vector]}
        _emit(args, canonical_json(payload) + "\n")
    else:
        head = " ".join(f"{v:.6g}" for v in emb.vector[:8])
        ellipsis = " ..." if emb.dim > 8 else ""
        _emit(args, f"{emb.name}  dim={emb.dim}  [{head}{ellipsis}]\n")
    return 0


def _cmd_similar(args):
    store = _load_stores(args)[0]
    ast = algebra.parse(args.expr)
    query = algebra.evaluate(ast, store)
    source = store
    if args.exclude_inputs:
        banned = _expr_tokens(ast)
        names = [t for t in store.tokens if t not in banned]
        if not names:
            raise VecLensError("no candidates remain after excluding inputs")
        source = EmbeddingSet(Embedding(t, store.vector(t)) for t in names)
    neighbors = retrieval.score_similar(source, query, args.n, args.metric)
    if args.json:
        _emit(args, canonical_json(_neighbors_json(neighbors)) + "\n")
    else:
        _emit(args, _neighbors_text(neighbors))
    return 0


def _cmd_analogy(args):
    store = _load_stores(args)[0]
    positive = [t for t in args.pos.split(",") if t]
    negative = [t for t in args.neg.split(",") if t] if args.neg else []
    neighbors = retrieval.analogy(
        store, positive, negative, args.n, args.metric,
        exclude_inputs=not args.include_inputs,
    )
    if args.json:
        _emit(args, canonical_json(_neighbors_json(neighbors)) + "\n")
    else:
        _emit(args, _neighbors_text(neighbors))
    return 0


def _build_set(args, store):
    if getattr(args, "pairs_file", None):
        return bias.pair_difference_set(store, _read_pairs(args.pairs_file))
    return get_set(store, _word_list(args))


def _cmd_distance(args):
    store = _load_stores(args)[0]
    emb_set = _build_set(args, store)
    matrix = retrieval.distance_matrix(emb_set, args.metric)
    spec = plotspec.heatmap(matrix)
    if args.json:
        _emit(args, plotspec.emit_json(spec) + "\n")
    else:
        lines = ["\t" + "\t".join(matrix.labels)]
        for label, row in zip(matrix.labels, matrix.values):
            lines.append(label + "\t" + "\t".join(f"{v:.6f}" for v in row))
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_plot(args):
    store = _load_stores(args)[0]
    emb_set = get_set(store, _word_list(args))
    if args.plot_kind == "scatter":
        spec = plotspec.scatter_projection(
            emb_set, args.x_axis, args.y_axis, store, args.show_axis_point
        )
    else:
        spec = plotspec.arrow_plot(emb_set)
    if args.svg:
        _emit(args, plotspec.render_svg(spec))
    else:
        _emit(args, plotspec.emit_json(spec) + "\n")
    return 0


def _transform_payload(result, k):
    # member rows come first; the k axis pseudo-embeddings are appended last
    all_embs = list(result.reduced)
    members, axes = all_embs[:-k], all_embs[-k:]
    payload = {
        "points": [
            {"name": e.name, "coords": [float(v) for v in e.vector]} for e in members
        ],
        "axes": [e.name for e in axes],
        "explained_variance": (
            [float(v) for v in result.explained_variance]
            if result.explained_variance is not None
            else None
        ),
    }
    return payload


def _cmd_pca(args):
    store = _load_stores(args)[0]
    emb_set = get_set(store, _word_list(args))
    result = transforms.pca_transform(emb_set, args.k)
    _emit_transform(args, result, args.k)
    return 0


def _cmd_mds(args):
    store = _load_stores(args)[0]
    emb_set = get_set(store, _word_list(args))
    result = transforms.mds_transform(emb_set, args.k, args.metric)
    _emit_transform(args, result, args.k)
    return 0


def _emit_transform(args, result, k):
    payload = _transform_payload(result, k)
    if args.json:
        _emit(args, canonical_json(payload) + "\n")
    else:
        lines = []
        for point in payload["points"]:
            coords = " ".join(f"{v:.6g}" for v in point["coords"])
            lines.append(f"{point['name']}\t{coords}")
        if payload["explained_variance"]:
            ev = " ".join(f"{v:.6g}" for v in payload["explained_variance"])
            lines.append(f"# explained_variance: {ev}")
        _emit(args, "\n".join(lines) + "\n")


def _cmd_debias(args):
    store = _load_stores(args)[0]
    emb_set = get_set(store, _word_list(args))
    axis = bias.build_bias_axis(store, _read_pairs(args.pairs_file))
    debiased = bias.debias_set(emb_set, axis, keep_names=True)
    out = {
        "axis": {"name": axis.axis.name, "vector": [float(v) for v in axis.axis.vector]},
        "members": [
            {"name": e.name, "vector": [float(v) for v in e.vector]} for e in debiased
        ],
    }
    if args.report_token:
        report = bias.neighborhood_overlap(
            store, debiased, args.report_token, args.n, args.metric
        )
        out["overlap"] = {
            "token": args.report_token,
            "jaccard": report.jaccard,
            "before": list(report.before_tokens),
            "after": list(report.after_tokens),
        }
    if args.json:
        _emit(args, canonical_json(out) + "\n")
    else:
        lines = [f"debiased {len(debiased)} embeddings on {axis.axis.name}"]
        if "overlap" in out:
            ov = out["overlap"]
            lines.append(f"overlap({ov['token']}): jaccard={ov['jaccard']:.6f}")
            lines.append("before: " + " ".join(ov["before"]))
            lines.append("after:  " + " ".join(ov["after"]))
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_featurize(args):
    store = _load_stores(args)[0]
    with open(args.texts_file, encoding="utf-8") as fh:
        texts = [line.rstrip("\n") for line in fh if line.strip()]
    matrix = featurize(store, texts)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for row in matrix:
            writer.writerow([f"{v:.17g}" for v in row])
    return 0


def _cmd_convert(args):
    store = _load_stores(args)[0]
    if not args.output:
        raise VecLensError("convert requires --output PATH")
    save_store(store, args.output, _FORMATS[args.to])
    return 0


def _cmd_compare(args):
    stores = _load_stores(args)
    words = _word_list(args)
    specs = []
    for store in stores:
        emb_set = get_set(store, words)
        specs.append(
            (store.label, plotspec.scatter_projection(emb_set, args.x_axis, args.y_axis, store))
        )
    xs = [p.x for _, s in specs for p in s.points]
    ys = [p.y for _, s in specs for p in s.points]
    x_range = plotspec._data_range(xs) if xs else (0.0, 1.0)
    y_range = plotspec._data_range(ys) if ys else (0.0, 1.0)
    if args.svg:
        if not args.output:
            raise VecLensError("compare --svg requires --output PREFIX")
        for label, spec in specs:
            svg = plotspec.render_svg(spec, x_range=x_range, y_range=y_range)
            with open(f"{args.output}.{label}.svg", "w", encoding="utf-8") as fh:
                fh.write(svg)
        return 0
    payload = {
        "charts": [
            {"label": label, "spec": plotspec._spec_dict(spec)} for label, spec in specs
        ],
        "x_range": list(x_range),
        "y_range": list(y_range),
    }
    if args.json:
        _emit(args, canonical_json(payload) + "\n")
    else:
        blocks = []
        for label, spec in specs:
            lines = [f"== {label} =="]
            for p in spec.points:
                lines.append(f"{p.name}\t{p.x:.6f}\t{p.y:.6f}")
            blocks.append("\n".join(lines))
        _emit(args, "\n\n".join(blocks) + "\n")
    return 0


def _cmd_serve(args):
    from . import server

    stores = _load_stores(args)
    server.serve(stores, args.port, static_dir=args.static_dir)
    return 0


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="veclens", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    p.add_argument("--expr", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("similar", parents=[common], help="nearest neighbors of an expression")
    p.add_argument("--expr", required=True)
    p.add_argument("-n", type=int, default=5)
    p.add_argument("--exclude-inputs", action="store_true")
    p.set_defaults(func=_cmd_similar)

    p = sub.add_parser("analogy", parents=[common], help="sum(pos) - sum(neg) analogy query")
    p.add_argument("--pos", required=True, metavar="a,b")
    p.add_argument("--neg", default="", metavar="c")
    p.add_argument("-n", type=int, default=5)
    p.add_argument("--include-inputs", action="store_true",
                   help="keep input tokens in the candidate pool")
    p.set_defaults(func=_cmd_analogy)

    p = sub.add_parser("distance", parents=[common], help="pairwise distance matrix")
    p.add_argument("--words")
    p.add_argument("--words-file")
    p.add_argument("--pairs-file", help="two-column CSV of token pairs (differences)")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("plot", parents=[common], help="scatter or arrow chart")
    p.add_argument("plot_kind", choices=["scatter", "arrows"])
    p.add_argument("--words")
    p.add_argument("--words-file")
    p.add_argument("--x-axis")
    p.add_argument("--y-axis")
    p.add_argument("--show-axis-point", action="store_true")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("pca", parents=[common], help="principal component reduction")
    p.add_argument("--words")
    p.add_argument("--words-file")
    p.add_argument("-k", type=int, default=2)
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("mds", parents=[common], help="classical MDS reduction")
    p.add_argument("--words")
    p.add_argument("--words-file")
    p.add_argument("-k", type=int, default=2)
    p.set_defaults(func=_cmd_mds)

    p = sub.add_parser("debias", parents=[common], help="reject members on a pair-built axis")
    p.add_argument("--words")
    p.add_argument("--words-file")
    p.add_argument("--pairs-file", required=True)
    p.add_argument("--report-token", metavar="T")
    p.add_argument("-n", type=int, default=7)
    p.set_defaults(func=_cmd_debias)

    p = sub.add_parser("featurize", parents=[common], help="texts file -> CSV feature matrix")
    p.add_argument("--texts-file", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_featurize)

    p = sub.add_parser("convert", parents=[common], help="rewrite a store in another format")
    p.add_argument("--to", choices=["word2vec", "glove"], required=True)
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("compare", parents=[common], help="same chart across several stores")
    p.add_argument("--words")
    p.add_argument("--words-file")
    p.add_argument("--x-axis", required=True)
    p.add_argument("--y-axis", required=True)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("serve", parents=[common], help="start the HTTP JSON API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", help="directory with the explorer UI bundle")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VecLensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
