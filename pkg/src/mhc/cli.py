"""Command-line interface: fit, cut, eval, synth, bench.

Exit codes: 0 success, 1 validation failure (bad arguments or malformed
input data), 2 I/O failure.  Output files are written to a temporary
name and renamed into place, so a failing run never leaves a partial
file behind.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from ._version import __version__
from .benchmark import rows_csv, run_scaling_benchmark
from .dataset import (
    SyntheticSpec,
    generate_synthetic,
    labels_text,
    load_dataset,
    load_labels,
    read_text_utf8,
    view_text,
)
from .distance import distance_matrix_text, integrate_distances, view_distance_matrix
from .errors import ValidationError
from .hierarchy import cut, document_text, fit, hierarchy_document, hierarchy_from_document
from .metrics import accuracy, f_measure, nmi

_DUMP_LIMIT = 5000


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(
        dir=str(path.parent) or ".", prefix=path.name + ".", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _view_digests(paths) -> list[dict]:
    return [{"path": str(p), "sha256": _sha256(p)} for p in paths]


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(p.strip()) for p in text.split(",") if p.strip())
    except ValueError:
        raise ValidationError(f"{what} must be comma-separated integers: {text!r}") from None
    if not values:
        raise ValidationError(f"{what} is empty")
    return values


def _cmd_fit(args) -> int:
    t0 = time.perf_counter()
    dataset = load_dataset(args.views, header=args.header)
    if args.dump_distances and dataset.n > _DUMP_LIMIT:
        raise ValidationError(
            f"refusing to write a dense distance dump for n={dataset.n} "
            f"(limit {_DUMP_LIMIT} rows)"
        )
    hierarchy = fit(dataset, nn_backend=args.nn_backend)
    doc = hierarchy_document(
        hierarchy,
        command="fit",
        nn_backend=args.nn_backend,
        header=args.header,
        input_views=_view_digests(args.views),
    )
    _atomic_write_text(args.out, document_text(doc))
    if args.dump_distances:
        integrated = integrate_distances(
            [view_distance_matrix(v) for v in dataset.views]
        )
        _atomic_write_text(args.dump_distances, distance_matrix_text(integrated))
    print("levels: " + " ".join(str(s) for s in hierarchy.level_sizes))
    elapsed = (time.perf_counter() - t0) * 1000.0
    print(f"fit: n={dataset.n} v={dataset.v} in {elapsed:.1f} ms", file=sys.stderr)
    return 0


def _cmd_cut(args) -> int:
    doc_text = read_text_utf8(args.hierarchy)
    try:
        doc = json.loads(doc_text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{args.hierarchy}: not a hierarchy file: {exc}") from None
    hierarchy = hierarchy_from_document(doc)
    dataset = load_dataset(args.views, header=args.header)
    recorded = doc.get("input_views")
    if recorded is not None:
        want = [entry["sha256"] for entry in recorded]
        have = [_sha256(p) for p in args.views]
        if want != have:
            raise ValidationError(
                "view files do not match the digests recorded in the hierarchy"
            )
    part = cut(hierarchy, dataset, args.k)
    _atomic_write_text(args.out, labels_text(part.assignment))
    print(f"clusters: {part.num_clusters}")
    return 0


def _cmd_eval(args) -> int:
    pred = load_labels(args.pred)
    truth = load_labels(args.truth)
    if pred.shape[0] != truth.shape[0]:
        raise ValidationError(
            f"{args.pred} has {pred.shape[0]} labels, "
            f"{args.truth} has {truth.shape[0]}"
        )
    acc = accuracy(truth, pred)
    nmi_score = nmi(truth, pred)
    f_score = f_measure(truth, pred)
    if args.json:
        payload = {
            "tool_version": __version__,
            "command": "eval",
            "inputs": {
                "pred": {"path": str(args.pred), "sha256": _sha256(args.pred)},
                "truth": {"path": str(args.truth), "sha256": _sha256(args.truth)},
            },
            "n": int(truth.shape[0]),
            "acc": round(acc, 4),
            "nmi": round(nmi_score, 4),
            "f_measure": round(f_score, 4),
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"ACC {acc:.4f} NMI {nmi_score:.4f} F {f_score:.4f}")
    return 0


def _cmd_synth(args) -> int:
    dims = _parse_int_list(args.dims, "--dims")
    if len(dims) == 1 and args.views > 1:
        dims = dims * args.views
    spec = SyntheticSpec(
        n=args.n,
        v=args.views,
        m_true=args.clusters,
        dims=dims,
        separation=args.separation,
        noise=args.noise,
        seed=args.seed,
    )
    dataset = generate_synthetic(spec)
    written = []
    for i, view in enumerate(dataset.views, start=1):
        path = f"{args.out_prefix}_view{i}.csv"
        _atomic_write_text(path, view_text(view))
        written.append(path)
    labels_path = f"{args.out_prefix}_labels.txt"
    _atomic_write_text(labels_path, labels_text(dataset.labels))
    written.append(labels_path)
    for path in written:
        print(path)
    return 0


def _cmd_bench(args) -> int:
    sizes = _parse_int_list(args.sizes, "--sizes")
    rows, slope = run_scaling_benchmark(
        sizes, backend=args.nn_backend, repeats=args.repeats
    )
    print("n\tclusters\tfit_seconds\tlevels")
    for row in rows:
        levels = " ".join(str(s) for s in row.level_sizes)
        print(f"{row.n}\t{row.clusters}\t{row.seconds:.3f}\t{levels}")
    if slope is not None:
        print(f"slope: {slope:.3f}")
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write_text(out_dir / "timings.csv", rows_csv(rows))
        from .plotting import save_scaling_figure

        save_scaling_figure(rows, slope, out_dir / "scaling.png")
        print(f"report written to {out_dir}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mhc",
        description=(
            "Multi-view hierarchical clustering over integrated cosine "
            "distances; parameter-free agglomeration with exact-count cuts."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("fit", help="build a cluster hierarchy from view files")
    p.add_argument("--views", nargs="+", required=True, metavar="FILE",
                   help="one delimited text file per view, samples as rows")
    p.add_argument("--header", action="store_true",
                   help="skip the first line of every view file")
    p.add_argument("--nn-backend", choices=("tree", "exact"), default="tree",
                   help="nearest-neighbor strategy (identical results)")
    p.add_argument("--dump-distances", metavar="FILE",
                   help="also write the integrated distance matrix as CSV")
    p.add_argument("--out", required=True, metavar="FILE",
                   help="hierarchy JSON output path")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("cut", help="extract exactly k clusters from a hierarchy")
    p.add_argument("--hierarchy", required=True, metavar="FILE")
    p.add_argument("--views", nargs="+", required=True, metavar="FILE",
                   help="the same view files the hierarchy was fit on")
    p.add_argument("--header", action="store_true")
    p.add_argument("-k", "--clusters", dest="k", type=int, required=True)
    p.add_argument("--out", required=True, metavar="FILE",
                   help="one label per line output path")
    p.set_defaults(func=_cmd_cut)

    p = sub.add_parser("eval", help="score predicted labels against ground truth")
    p.add_argument("--pred", required=True, metavar="FILE")
    p.add_argument("--truth", required=True, metavar="FILE")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic multi-view dataset")
    p.add_argument("--n", type=int, required=True, help="sample count")
    p.add_argument("--views", type=int, required=True, help="view count")
    p.add_argument("--clusters", type=int, required=True, help="true cluster count")
    p.add_argument("--dims", required=True,
                   help="per-view dimensionality, e.g. 16,24 (single value broadcasts)")
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("bench", help="time fit over growing synthetic sizes")
    p.add_argument("--sizes", required=True,
                   help="comma-separated ascending sample counts")
    p.add_argument("--nn-backend", choices=("tree", "exact"), default="tree")
    p.add_argument("--repeats", type=int, default=2,
                   help="timing repeats per size (best is kept)")
    p.add_argument("--out-dir", metavar="DIR",
                   help="also write timings.csv and scaling.png here")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
