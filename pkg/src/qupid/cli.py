"""Command-line front end.

Subcommands::

    qupid generate orbit|patterns   synthetic point-cloud datasets
    qupid compute-pd                Rips diagrams for clouds, HKS diagrams for graphs
    qupid vectorize                 grid fit on the train split, features for every item
    qupid classify                  split / alpha search / train / test with repeats
    qupid bench                     quantization and transform timings
    qupid importance                per-coefficient random-forest importances

Exit codes: 0 success, 1 runtime error, 2 usage error. Every subcommand
accepts ``--config FILE.json``; explicit flags override the file, which
overrides the defaults. Outputs carry the resolved config, minus the
input/output paths and ``--jobs``/``--force``, so that reruns elsewhere or with
a different worker count produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import shutil
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import bench as benchmod
from .datasets import (
    ORBIT_RHOS,
    PATTERN_CLASSES,
    generate_orbit_dataset,
    generate_pattern_set,
    list_items,
    read_cloud_csv,
    write_dataset,
)
from .diagrams import LOG, SCALINGS, PersistenceDiagram, read_diagram_csv, write_diagram_csv
from .homology import (
    graph_sublevel_persistence,
    graph_superlevel_persistence,
    hks,
    laplacian_spectrum,
    read_graph,
    rips_h0,
    rips_h1,
)
from .homology.rips import MAX_TRIANGLES, pairwise_distances
from .learn import (
    FeatureTable,
    ForestParams,
    PipelineConfig,
    accuracy,
    feature_importance,
    grid_search_alpha,
    k_fold,
    predict,
    split_train_test,
    train_forest,
)
from .pipeline import Vectorizer, VectorizerConfig, diagram_key, parse_grid, sort_keys
from .quantize import DEFAULT_ALPHA_CANDIDATES
from .rng import derive_seed
from .transforms import TransformKind

log = logging.getLogger("qupid")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

# argument names that never enter an embedded config
_IO_ARGS = {"command", "kind", "func", "config", "input", "out", "diagrams", "features", "jobs", "force",
            "verbose", "quiet"}


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ parsing


def _floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one number")
    return vals


def _alpha(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or min(vals) <= 0:
        raise argparse.ArgumentTypeError(f"alpha must be one or two positive numbers, got {text!r}")
    return vals[0], vals[1]


def _grid(text: str) -> tuple[int, int]:
    try:
        r, s = parse_grid(str(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if r < 1 or s < 1:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return r, s


def _grids(text: str) -> list[tuple[int, int]]:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        out.append(_grid(part) if "x" in part.lower() else _grid(f"{part}x{part}"))
    if not out:
        raise argparse.ArgumentTypeError("expected at least one grid size")
    return out


def _transforms(text: str) -> list[str]:
    names = [t.strip() for t in str(text).split(",") if t.strip()]
    if not names:
        raise argparse.ArgumentTypeError("expected at least one transform")
    out = []
    for name in names:
        try:
            out.append(TransformKind.parse(name).name)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    return out


def _names(text: str) -> list[str]:
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _ratio(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError("ratio must be in (0, 1]")
    return v


# ------------------------------------------------------------------ helpers


def _to_jsonable(v):
    if isinstance(v, tuple):
        return [_to_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_to_jsonable(x) for x in v]
    if isinstance(v, Path):
        return str(v)
    return v


def resolved_config(args: argparse.Namespace) -> dict:
    return {k: _to_jsonable(v) for k, v in sorted(vars(args).items()) if k not in _IO_ARGS}


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def prepare_out_dir(path, force: bool) -> Path:
    """Create ``path``; an existing non-empty directory needs ``force`` and is cleared."""
    p = Path(path)
    if p.exists():
        if not p.is_dir():
            raise RuntimeError(f"{p} exists and is not a directory")
        if any(p.iterdir()):
            if not force:
                raise RuntimeError(f"output directory {p} is not empty; pass --force to overwrite")
            shutil.rmtree(p)
    p.mkdir(parents=True, exist_ok=True)
    return p


def parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    """Order-stable map; results line up with ``items`` whatever ``jobs`` is."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _read_manifest(root: Path) -> dict:
    p = root / "manifest.json"
    if p.exists():
        return json.loads(p.read_text(encoding="utf-8"))
    return {}


# ------------------------------------------------------------------ generate


def cmd_generate(args) -> int:
    if args.kind == "orbit":
        data = generate_orbit_dataset(args.rhos, args.per_class, args.points, args.seed)
    else:
        unknown = [c for c in args.classes if c not in PATTERN_CLASSES]
        if unknown:
            raise UsageError(f"unknown pattern class(es) {unknown}; choose from {', '.join(PATTERN_CLASSES)}")
        data = generate_pattern_set(args.classes, args.per_class, args.points, args.seed,
                                    args.jitter, args.background)
    out = prepare_out_dir(args.out, args.force)
    write_dataset(out, data, {"generator": args.kind, "config": resolved_config(args)})
    log.info("wrote %d clouds to %s", len(data), out)
    return EXIT_OK


# ------------------------------------------------------------------ compute-pd


def _essential_policy(diagram: PersistenceDiagram, policy: str, clamp_value: float) -> PersistenceDiagram:
    if diagram.n_essential == 0:
        return diagram
    if policy == "drop":
        return diagram.finite()
    pts = np.array(diagram.points)
    inf = np.isinf(pts[:, 1])
    if np.any(pts[inf, 0] > clamp_value):
        raise ValueError("clamp below birth")
    pts[inf, 1] = clamp_value
    return PersistenceDiagram(pts, diagram.degree)


def cloud_diagrams(task) -> tuple[np.ndarray, np.ndarray]:
    """Worker: ``(path, max_scale, max_triangles, essential)`` -> H0 and H1 point arrays."""
    path, max_scale, max_triangles, essential = task
    cloud = read_cloud_csv(path)
    h0 = rips_h0(cloud)
    h1 = rips_h1(cloud, max_scale, max_triangles)
    diameter = float(pairwise_distances(cloud.points).max()) if len(cloud.points) > 1 else 0.0
    h0 = _essential_policy(h0, essential, diameter)
    return np.array(h0.points), np.array(h1.points)


def graph_diagrams(task) -> list[tuple[str, np.ndarray]]:
    """Worker: ``(path, times, essential)`` -> ``[(key, points)]`` for both directions and degrees."""
    path, times, essential = task
    g = read_graph(path)
    spectrum = laplacian_spectrum(g)
    out = []
    for t in times:
        f = hks(g, t, spectrum)
        top = float(f.max()) if f.size else 0.0
        for direction, fn in (("sub", graph_sublevel_persistence), ("sup", graph_superlevel_persistence)):
            for d in fn(g, f):
                out.append((diagram_key(d.degree, direction, t), np.array(_essential_policy(d, essential, top).points)))
    return out


def cmd_compute_pd(args) -> int:
    root = Path(args.input)
    if (root / "clouds").is_dir():
        kind = "clouds"
        items = list_items(root, "clouds", ".csv")
    elif (root / "graphs").is_dir():
        kind = "graphs"
        items = list_items(root, "graphs", ".txt")
    else:
        raise RuntimeError(f"{root} has neither clouds/ nor graphs/")
    if not items:
        raise RuntimeError(f"no input items under {root / kind}")
    essential = args.essential
    if essential == "auto":
        essential = "drop" if kind == "clouds" else "clamp"
    out = prepare_out_dir(args.out, args.force)

    if kind == "clouds":
        tasks = [(str(it.path), args.max_scale, args.max_triangles, essential) for it in items]
        results = parallel_map(cloud_diagrams, tasks, args.jobs)
        per_item = [[("h0", h0), ("h1", h1)] for h0, h1 in results]
    else:
        tasks = [(str(it.path), tuple(args.times), essential) for it in items]
        per_item = parallel_map(graph_diagrams, tasks, args.jobs)

    for it, diagrams in zip(items, per_item):
        d = out / "diagrams" / str(it.label)
        d.mkdir(parents=True, exist_ok=True)
        for key, pts in diagrams:
            degree = int(key.rsplit("h", 1)[1])
            write_diagram_csv(d / f"{it.stem}_{key}.csv", PersistenceDiagram(pts, degree))

    manifest = _read_manifest(root)
    write_json(out / "manifest.json", {
        "kind": "diagrams",
        "source_kind": kind,
        "class_names": manifest.get("class_names", []),
        "n_items": len(items),
        "keys": sort_keys(k for k, _ in per_item[0]),
        "essential": essential,
        "config": resolved_config(args),
    })
    log.info("wrote diagrams for %d %s to %s", len(items), kind, out)
    return EXIT_OK


# ------------------------------------------------------------------ diagram store

_DIAGRAM_FILE_RE = re.compile(r"^(.*?)_((?:sub|sup)_t[^_]+_)?h(\d+)\.csv$")


@dataclass(frozen=True)
class StoreItem:
    label: int
    stem: str
    files: dict


class DiagramStore:
    """Lazy access to ``diagrams/<label>/<stem>_<key>.csv`` with a read log.

    Every load is recorded as ``(phase, run, index)`` in ``log`` so that
    callers can audit which items were touched in which phase.
    """

    def __init__(self, root):
        self.root = Path(root)
        base = self.root / "diagrams"
        if not base.is_dir():
            raise FileNotFoundError(f"{base} does not exist")
        grouped: dict[tuple[int, str], dict] = {}
        for label_dir in sorted((p for p in base.iterdir() if p.is_dir()), key=lambda p: int(p.name)):
            for f in sorted(label_dir.glob("*.csv")):
                m = _DIAGRAM_FILE_RE.match(f.name)
                if m is None:
                    raise ValueError(f"unexpected diagram file name {f.name!r}")
                stem, prefix, degree = m.groups()
                key = f"{prefix or ''}h{degree}"
                grouped.setdefault((int(label_dir.name), stem), {})[key] = f
        if not grouped:
            raise RuntimeError(f"no diagram files under {base}")
        self.items = [StoreItem(lab, stem, files) for (lab, stem), files in sorted(grouped.items())]
        self.labels = np.array([it.label for it in self.items], dtype=np.int64)
        self.manifest = _read_manifest(self.root)
        self.log: list[tuple[str, int, int]] = []

    def __len__(self) -> int:
        return len(self.items)

    @property
    def class_names(self) -> list[str]:
        names = self.manifest.get("class_names") or []
        return list(names) if names else [str(c) for c in range(int(self.labels.max()) + 1)]

    def load(self, index: int, phase: str, run: int = 0) -> dict:
        self.log.append((phase, run, int(index)))
        it = self.items[index]
        return {key: read_diagram_csv(path) for key, path in it.files.items()}

    def load_many(self, indices, phase: str, run: int = 0) -> list[dict]:
        return [self.load(int(i), phase, run) for i in indices]


# ------------------------------------------------------------------ vectorize


def _feature_row(task) -> np.ndarray:
    vec, sample = task
    return vec.transform([sample])[0]


def _fmt(x: float) -> str:
    return repr(float(x))


def write_features_csv(path, names, rows, meta) -> None:
    """``meta`` is a list of ``(index, label, stem, split)`` per row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "label", "stem", "split", *names])
        for (idx, lab, stem, split), row in zip(meta, rows):
            w.writerow([idx, lab, stem, split, *(_fmt(v) for v in row)])


def read_features_csv(path):
    """Returns ``(names, X, labels, stems, splits)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:4] != ["index", "label", "stem", "split"]:
            raise ValueError(f"{path}: not a features file")
        rows = [r for r in reader if r]
    names = header[4:]
    X = np.array([[float(v) for v in r[4:]] for r in rows], dtype=float).reshape(len(rows), len(names))
    labels = np.array([int(r[1]) for r in rows], dtype=np.int64)
    return names, X, labels, [r[2] for r in rows], [r[3] for r in rows]


def cmd_vectorize(args) -> int:
    store = DiagramStore(args.diagrams)
    n = len(store)
    if args.fit_on == "train":
        # same split as the first classify repeat with the same seed
        train, _ = split_train_test(n, args.ratio, store.labels, derive_seed(args.seed, 0))
    else:
        train = np.arange(n)
    train_set = set(train.tolist())
    cfg = VectorizerConfig(tuple(args.grid), args.scaling, args.alpha if args.scaling == LOG else None,
                           tuple(args.transform))
    vec = Vectorizer(cfg).fit(store.load_many(train, "fit"))
    samples = store.load_many(range(n), "transform")
    rows = parallel_map(_feature_row, [(vec, s) for s in samples], args.jobs)

    out = prepare_out_dir(args.out, args.force)
    config = resolved_config(args)
    meta = [(i, int(store.labels[i]), store.items[i].stem, "train" if i in train_set else "test") for i in range(n)]
    write_features_csv(out / "features.csv", vec.feature_names(), rows, meta)
    write_json(out / "layout.json", {
        "config": config,
        "keys": vec.keys,
        "n_features": len(vec.feature_names()),
        "segments": vec.segments(),
        "class_names": store.class_names,
    })
    write_json(out / "grid.json", {
        "config": config,
        "fit_items": len(train),
        "grids": {k: vec.grids[k].to_dict() for k in vec.keys},
    })
    log.info("wrote %d x %d features to %s", n, len(vec.feature_names()), out)
    return EXIT_OK


# ------------------------------------------------------------------ classify


def _std(values) -> float:
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def _runs(args, labels: np.ndarray) -> list[dict]:
    """Train/test index pairs for every repeat (and fold)."""
    n = labels.size
    runs = []
    for r in range(args.repeats):
        s = derive_seed(args.seed, r)
        if args.folds:
            folds = k_fold(n, args.folds, labels, s)
            for f, test in enumerate(folds):
                runs.append({"repeat": r, "fold": f, "train": np.setdiff1d(np.arange(n), test), "test": test})
        else:
            train, test = split_train_test(n, args.ratio, labels, s)
            runs.append({"repeat": r, "fold": None, "train": train, "test": test})
    return runs


def _forest_params(args, run_id: int) -> ForestParams:
    return ForestParams(n_trees=args.trees, max_features=args.max_features, min_leaf=args.min_leaf,
                        max_depth=args.max_depth, seed=derive_seed(args.seed, run_id, 1))


def classify_diagrams(args, store: DiagramStore) -> dict:
    """Full evaluation loop over diagram samples; test items are read only after fitting."""
    labels = store.labels
    runs = _runs(args, labels)
    grids = args.ablate_grids or [tuple(args.grid)]
    search = args.alpha_search and args.scaling == LOG
    cands = [(a, b) for a in args.alpha_candidates for b in args.alpha_candidates]
    records = []
    for run_id, run in enumerate(runs):
        train_samples = store.load_many(run["train"], "fit", run_id)
        y_train = labels[run["train"]]
        forest = _forest_params(args, run_id)
        fitted = []  # (grid, transform, alpha, vectorizer, model)
        for grid in grids:
            base = VectorizerConfig(tuple(grid), args.scaling, tuple(args.alpha) if args.scaling == LOG else None,
                                    tuple(args.transforms))
            cache: dict = {}
            for name in args.transforms:
                alpha = base.alpha
                if search:
                    pcfg = PipelineConfig(replace(base, transforms=(name,)), forest, tuple(cands), args.cv_k)
                    alpha, _ = grid_search_alpha(pcfg, train_samples, y_train, seed=derive_seed(args.seed, run_id, 2))
                if alpha not in cache:
                    vec = Vectorizer(replace(base, alpha=alpha)).fit(train_samples)
                    cache[alpha] = (vec, vec.masses(train_samples))
                vec, masses = cache[alpha]
                X = vec.transform(train_samples, [name], masses)
                model = train_forest(FeatureTable(X, y_train), forest)
                fitted.append((grid, name, alpha, vec, model))
        test_samples = store.load_many(run["test"], "evaluate", run_id)
        y_test = labels[run["test"]]
        for grid, name, alpha, vec, model in fitted:
            acc = accuracy(y_test, predict(model, vec.transform(test_samples, [name])))
            records.append({
                "run": run_id, "repeat": run["repeat"], "fold": run["fold"],
                "grid": f"{grid[0]}x{grid[1]}", "transform": name,
                "alpha": list(alpha) if alpha is not None else None, "accuracy": acc,
            })
        log.info("run %d/%d done", run_id + 1, len(runs))
    return {"runs": runs, "records": records}


def classify_features(args, X: np.ndarray, labels: np.ndarray) -> dict:
    runs = _runs(args, labels)
    records = []
    for run_id, run in enumerate(runs):
        model = train_forest(FeatureTable(X[run["train"]], labels[run["train"]]), _forest_params(args, run_id))
        acc = accuracy(labels[run["test"]], predict(model, X[run["test"]]))
        records.append({"run": run_id, "repeat": run["repeat"], "fold": run["fold"], "grid": None,
                        "transform": "features", "alpha": None, "accuracy": acc})
    return {"runs": runs, "records": records}


def summarize(records: list[dict]) -> list[dict]:
    groups: dict[tuple, list[float]] = {}
    for r in records:
        groups.setdefault((r["grid"], r["transform"]), []).append(r["accuracy"])

    def order(key):
        grid, name = key
        g = tuple(int(v) for v in grid.split("x")) if grid else (0, 0)
        return g, name

    table = []
    for key in sorted(groups, key=order):
        accs = groups[key]
        table.append({"grid": key[0], "transform": key[1], "mean": float(np.mean(accs)), "std": _std(accs),
                      "n_runs": len(accs)})
    return table


def run_classify(args) -> tuple[dict, DiagramStore | None]:
    store = None
    if args.features:
        _, X, labels, _, _ = read_features_csv(Path(args.features))
        result = classify_features(args, X, labels)
        class_names = [str(c) for c in range(int(labels.max()) + 1)]
    else:
        store = DiagramStore(args.diagrams)
        labels = store.labels
        result = classify_diagrams(args, store)
        class_names = store.class_names
    table = summarize(result["records"])
    metrics = {
        "config": resolved_config(args),
        "class_names": class_names,
        "n_items": int(labels.size),
        "protocol": {"kind": "kfold", "folds": args.folds} if args.folds else {"kind": "split", "ratio": args.ratio},
        "splits": [{"repeat": r["repeat"], "fold": r["fold"], "test": r["test"].tolist()} for r in result["runs"]],
        "records": result["records"],
        "table": table,
    }
    if args.ablate_grids:
        metrics["ablation"] = [
            {"grid": row["grid"], "transform": row["transform"], "mean": row["mean"], "std": row["std"]}
            for row in table
        ]
    return metrics, store


def cmd_classify(args) -> int:
    if not args.diagrams and not args.features:
        raise UsageError("classify needs --diagrams or --features")
    metrics, _ = run_classify(args)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_json(args.out, metrics)
    for row in metrics["table"]:
        grid = f"{row['grid']:>7} " if row["grid"] else ""
        print(f"{grid}{row['transform']:>8}  {row['mean']:.4f} +/- {row['std']:.4f}  (n={row['n_runs']})")
    return EXIT_OK


# ------------------------------------------------------------------ bench


def cmd_bench(args) -> int:
    report = {
        "config": resolved_config(args),
        "quantize": benchmod.bench_quantize(args.sizes, tuple(args.grid), args.runs, args.seed),
        "transforms": benchmod.bench_transforms(args.transforms, args.grids, args.runs, args.seed),
    }
    if args.throughput:
        n_diag, n_pts = args.throughput
        report["throughput"] = benchmod.vectorize_throughput(n_diag, n_pts, tuple(args.grid), "coif2", args.seed)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ------------------------------------------------------------------ importance


def cmd_importance(args) -> int:
    src = Path(args.features)
    names, X, labels, _, splits = read_features_csv(src / "features.csv")
    layout = json.loads((src / "layout.json").read_text(encoding="utf-8"))
    rows = np.arange(labels.size) if args.all_rows else np.array([i for i, s in enumerate(splits) if s == "train"])
    if rows.size == 0:
        raise RuntimeError("no training rows in the features file")
    params = ForestParams(n_trees=args.trees, max_features=args.max_features, min_leaf=args.min_leaf,
                          max_depth=args.max_depth, seed=args.seed)
    model = train_forest(FeatureTable(X[rows], labels[rows]), params)
    imp = feature_importance(model)

    out = prepare_out_dir(args.out, args.force)
    segments = layout["segments"]
    with open(out / "importance.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "key", "transform", "segment", "i", "j", "importance"])
        for seg in segments:
            cols = seg["shape"][1]
            for idx in range(seg["start"], seg["stop"]):
                i, j = divmod(idx - seg["start"], cols)
                w.writerow([names[idx], seg["key"], seg["transform"], seg["segment"], i, j, _fmt(imp[idx])])
    write_json(out / "importance.json", {
        "config": resolved_config(args),
        "vectorizer": layout.get("config", {}),
        "n_train_rows": int(rows.size),
        "segments": [
            {"key": s["key"], "transform": s["transform"], "segment": s["segment"], "shape": s["shape"],
             "sum": float(imp[s["start"]:s["stop"]].sum())}
            for s in segments
        ],
    })
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_forest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trees", type=_positive_int, default=100)
    p.add_argument("--max-features", choices=("sqrt", "all"), default="sqrt")
    p.add_argument("--min-leaf", type=_positive_int, default=1)
    p.add_argument("--max-depth", type=int, default=None)


def _add_vector_args(p: argparse.ArgumentParser, transforms_flag: str, default_transforms: str) -> None:
    p.add_argument(transforms_flag, dest=transforms_flag.lstrip("-"), type=_transforms, default=default_transforms,
                   help="comma-separated: id, fft, db1-db3, coif1-coif3 (haar = db1)")
    p.add_argument("--grid", type=_grid, default="32x32", help="r x s, e.g. 32x32")
    p.add_argument("--scaling", choices=SCALINGS, default=LOG)
    p.add_argument("--alpha", type=_alpha, default="500,500", help="log-grid parameter, one or two values")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of defaults for this subcommand")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("-q", "--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="qupid", description="Quantized persistence diagram vectorization.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    gen = sub.add_parser("generate", help="write a synthetic dataset")
    gsub = gen.add_subparsers(dest="kind", required=True)
    orbit = gsub.add_parser("orbit", parents=[common])
    orbit.add_argument("--rhos", type=_floats, default=",".join(f"{r:g}" for r in ORBIT_RHOS))
    patterns = gsub.add_parser("patterns", parents=[common])
    patterns.add_argument("--classes", type=_names, default=",".join(PATTERN_CLASSES))
    patterns.add_argument("--jitter", type=float, default=0.01)
    patterns.add_argument("--background", type=float, default=0.2)
    for p in (orbit, patterns):
        p.add_argument("--out", required=True)
        p.add_argument("--per-class", type=_positive_int, default=50)
        p.add_argument("--points", type=_positive_int, default=300)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--force", action="store_true")
        p.set_defaults(func=cmd_generate)
    subs["generate orbit"], subs["generate patterns"] = orbit, patterns

    pd = sub.add_parser("compute-pd", parents=[common], help="persistence diagrams for a dataset")
    pd.add_argument("--input", required=True, help="dataset root with clouds/ or graphs/")
    pd.add_argument("--out", required=True)
    pd.add_argument("--max-scale", type=float, default=0.1, help="Rips truncation scale for H1")
    pd.add_argument("--max-triangles", type=_positive_int, default=MAX_TRIANGLES)
    pd.add_argument("--times", type=_floats, default="0.1,10", help="HKS diffusion times for graphs")
    pd.add_argument("--essential", choices=("auto", "drop", "clamp"), default="auto",
                    help="essential classes: auto = drop for clouds, clamp to max f for graphs")
    pd.add_argument("--jobs", type=_positive_int, default=1)
    pd.add_argument("--force", action="store_true")
    pd.set_defaults(func=cmd_compute_pd)
    subs["compute-pd"] = pd

    vec = sub.add_parser("vectorize", parents=[common], help="quantize and transform diagrams")
    vec.add_argument("--diagrams", required=True, help="output directory of compute-pd")
    vec.add_argument("--out", required=True)
    _add_vector_args(vec, "--transform", "coif2")
    vec.add_argument("--fit-on", choices=("train", "all"), default="train")
    vec.add_argument("--ratio", type=_ratio, default=0.7, help="train fraction of the stratified split")
    vec.add_argument("--seed", type=int, default=0)
    vec.add_argument("--jobs", type=_positive_int, default=1)
    vec.add_argument("--force", action="store_true")
    vec.set_defaults(func=cmd_vectorize)
    subs["vectorize"] = vec

    cls = sub.add_parser("classify", parents=[common], help="evaluate random-forest classification")
    src = cls.add_mutually_exclusive_group()
    src.add_argument("--diagrams", help="output directory of compute-pd")
    src.add_argument("--features", help="features.csv written by vectorize")
    cls.add_argument("--out", help="metrics JSON path")
    _add_vector_args(cls, "--transforms", "id,coif2")
    cls.add_argument("--alpha-search", action="store_true", help="pick alpha by CV on each training split")
    cls.add_argument("--alpha-candidates", type=_floats,
                     default=",".join(f"{a:g}" for a in DEFAULT_ALPHA_CANDIDATES))
    cls.add_argument("--cv-k", type=_positive_int, default=3)
    cls.add_argument("--ratio", type=_ratio, default=0.7)
    cls.add_argument("--folds", type=int, default=0, help="k-fold protocol instead of a single split")
    cls.add_argument("--repeats", type=_positive_int, default=1)
    cls.add_argument("--ablate-grids", type=_grids, default=None, help="e.g. 4,8,16,32")
    cls.add_argument("--seed", type=int, default=0)
    _add_forest_args(cls)
    cls.set_defaults(func=cmd_classify)
    subs["classify"] = cls

    bn = sub.add_parser("bench", parents=[common], help="time quantization and transforms")
    bn.add_argument("--sizes", type=lambda t: [int(v) for v in _floats(t)], default="250,500,1000,2000")
    bn.add_argument("--grid", type=_grid, default="32x32")
    bn.add_argument("--grids", type=_grids, default="8x8,16x16,32x32,64x64")
    bn.add_argument("--transforms", type=_transforms, default="id,fft,coif2")
    bn.add_argument("--runs", type=int, default=20)
    bn.add_argument("--throughput", type=lambda t: tuple(int(v) for v in _floats(t)), default=None,
                    help="N,P: also vectorize N diagrams of P points")
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--out")
    bn.set_defaults(func=cmd_bench)
    subs["bench"] = bn

    imp = sub.add_parser("importance", parents=[common], help="per-coefficient forest importances")
    imp.add_argument("--features", required=True, help="output directory of vectorize")
    imp.add_argument("--out", required=True)
    imp.add_argument("--all-rows", action="store_true", help="train on every row, not only the train split")
    imp.add_argument("--seed", type=int, default=0)
    imp.add_argument("--force", action="store_true")
    _add_forest_args(imp)
    imp.set_defaults(func=cmd_importance)
    subs["importance"] = imp
    return parser, subs


def _subparser_for(args, subs) -> argparse.ArgumentParser:
    key = f"{args.command} {args.kind}" if args.command == "generate" else args.command
    return subs[key]


def parse_args(argv=None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            parser.error("config file must hold a JSON object")
        sp = _subparser_for(args, subs)
        known = {a.dest for a in sp._actions}
        unknown = sorted(k for k in (key.replace("-", "_") for key in cfg) if k not in known)
        if unknown:
            parser.error(f"unknown config key(s): {', '.join(unknown)}")
        defaults = {}
        for key, value in cfg.items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            defaults[key.replace("-", "_")] = value
        sp.set_defaults(**defaults)
        # string defaults pass through the type converters on this second parse
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    level = logging.WARNING if args.quiet else (logging.DEBUG if args.verbose else logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qupid: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, ValueError, OSError) as exc:
        print(f"qupid: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
