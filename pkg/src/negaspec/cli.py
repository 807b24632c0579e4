"""Command-line harness: exact spectra, predictions and their comparison.

Configuration comes from a flat JSON file (``--config``) and/or flags;
flags win.  Unknown keys are rejected before any computation.  Exit codes:
0 on success, 2 for invalid input, 3 for numerical failure.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field, replace
import io
import itertools
import json
import os
import sys

import numpy as np

from .errors import DomainError, NegaspecError, NumericalError, ValidationError
from .lattice import make_geometry, make_state
from . import rh, spectra
from .svg import Figure

__all__ = [
    "RunConfig",
    "ComparisonReport",
    "match_spectra",
    "load_config",
    "build_config",
    "run",
    "main",
]

COMMANDS = ("spectrum", "predict", "density", "negativity", "compare", "sweep")
SPECTRUM_COLUMNS = ("source", "re_lambda", "im_lambda", "branch", "residual")
DENSITY_COLUMNS = ("lambda", "rho_pred", "count_exact", "bin_width")
SWEEP_COLUMNS = (
    "k",
    "l",
    "gap",
    "pf",
    "dim",
    "n_pairs_exact",
    "n_pairs_pred",
    "max_abs_imag",
    "negativity_exact",
    "negativity_closed",
    "ratio",
    "match_fraction",
    "classification_agrees",
)
THRESHOLD_DEFAULTS = {
    "imag_floor": spectra.IMAG_FLOOR,
    "match_cap": 0.5,
}
DEFAULTS = {
    "command": None,
    "k": None,
    "l": None,
    "gap": None,
    "pf": "1/2",
    "lambda_window": (-0.9, 0.9),
    "thresholds": {},
    "out": None,
    "svg": None,
    "bins": 18,
    "convention": rh.DEFAULT_CONVENTION,
    "sweep": None,
    "threads": None,
}
KNOWN_KEYS = frozenset(DEFAULTS)
SWEEP_KEYS = frozenset(("k", "l", "gap", "pf"))


def _num(x):
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    command: str
    k: int = None
    l: int = None
    gap: int = None
    pf: str = "1/2"
    lambda_window: tuple = (-0.9, 0.9)
    thresholds: dict = field(default_factory=dict)
    out: str = None
    svg: str = None
    bins: int = 18
    convention: str = rh.DEFAULT_CONVENTION
    sweep: tuple = None
    threads: int = None

    def threshold(self, name):
        return self.thresholds.get(name, THRESHOLD_DEFAULTS[name])

    def geometry(self):
        return make_geometry(self.k, self.l, self.gap)

    def state(self):
        return make_state(self.pf)


def load_config(path):
    """Read a flat JSON object; unknown keys raise :class:`ValidationError`."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config must be a JSON object")
    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _as_int(name, value, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    return value


def _check_pf(value):
    pf = str(value)
    make_state(pf)
    return pf


def build_config(file_values, flag_values):
    """Merge defaults, file values and flags (in that order) and validate."""
    merged = dict(DEFAULTS)
    for source in (file_values or {}, flag_values or {}):
        unknown = sorted(set(source) - KNOWN_KEYS)
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        merged.update({k: v for k, v in source.items() if v is not None})

    command = merged["command"]
    if command not in COMMANDS:
        raise ValidationError(f"command must be one of {COMMANDS}, got {command!r}")
    merged["pf"] = _check_pf(merged["pf"])

    window = merged["lambda_window"]
    try:
        a, b = (float(v) for v in window)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"lambda_window must be two numbers, got {window!r}") from exc
    if not -1 < a < b < 1:
        raise ValidationError(f"lambda_window must satisfy -1 < a < b < 1, got {window!r}")
    merged["lambda_window"] = (a, b)

    thresholds = merged["thresholds"]
    if not isinstance(thresholds, dict):
        raise ValidationError("thresholds must be a mapping")
    unknown = sorted(set(thresholds) - set(THRESHOLD_DEFAULTS))
    if unknown:
        raise ValidationError(f"unknown thresholds: {', '.join(unknown)}")
    for name, value in thresholds.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
            raise ValidationError(f"threshold {name} must be a positive number")
    merged["thresholds"] = {k: float(v) for k, v in sorted(thresholds.items())}

    merged["bins"] = _as_int("bins", merged["bins"], 1)
    if merged["convention"] not in ("sites", "coords"):
        raise ValidationError(f"convention must be 'sites' or 'coords', got {merged['convention']!r}")
    if merged["threads"] is not None:
        merged["threads"] = _as_int("threads", merged["threads"], 1)

    if command == "sweep":
        cells = merged["sweep"]
        if not isinstance(cells, (list, tuple)) or not cells:
            raise ValidationError("sweep needs a non-empty list of cells")
        checked = []
        for cell in cells:
            if not isinstance(cell, dict):
                raise ValidationError(f"sweep cell must be a mapping, got {cell!r}")
            bad = sorted(set(cell) - SWEEP_KEYS)
            if bad:
                raise ValidationError(f"unknown sweep cell keys: {', '.join(bad)}")
            c = {"pf": merged["pf"], **cell}
            for key in ("k", "l", "gap"):
                if key not in c:
                    raise ValidationError(f"sweep cell {cell!r} lacks {key}")
            make_geometry(c["k"], c["l"], c["gap"])
            c["pf"] = _check_pf(c["pf"])
            checked.append(c)
        merged["sweep"] = tuple(checked)
    else:
        for key in ("k", "l", "gap"):
            if merged[key] is None:
                raise ValidationError(f"missing required parameter {key}")
        make_geometry(merged["k"], merged["l"], merged["gap"])
        merged["sweep"] = None
    return RunConfig(**merged)


# ---------------------------------------------------------------------------
# exact vs predicted matching


@dataclass
class ComparisonReport:
    matched: list
    unmatched_exact: list
    unmatched_predicted: list
    window: tuple
    density: list = None
    negativity: dict = None
    classification: dict = None

    @property
    def n_exact(self):
        return len(self.matched) + len(self.unmatched_exact)

    @property
    def match_fraction(self):
        return len(self.matched) / self.n_exact if self.n_exact else 1.0

    def transposed(self):
        return ComparisonReport(
            matched=[(b, a, d, s) for a, b, d, s in self.matched],
            unmatched_exact=list(self.unmatched_predicted),
            unmatched_predicted=list(self.unmatched_exact),
            window=self.window,
        )


def _values(obj):
    for attr in ("lambdas", "roots"):
        if hasattr(obj, attr):
            return np.asarray(getattr(obj, attr), dtype=np.complex128)
    return np.asarray(obj, dtype=np.complex128).ravel()


def _distinct_real(values):
    u = np.sort(values.real)
    if u.size == 0:
        return u
    keep = np.concatenate([[True], np.diff(u) > 1e-8])
    return u[keep]


def _local_spacing(u, x):
    """Mean spacing of the sorted positions ``u`` around ``x``."""
    if u.size < 2:
        return 2.0
    j = int(np.clip(np.searchsorted(u, x), 1, u.size - 1))
    lo, hi = max(j - 1, 0), min(j + 1, u.size - 1)
    if hi - lo < 2:
        return float(u[j] - u[j - 1])
    return float(u[hi] - u[lo]) / (hi - lo)


def match_spectra(exact, predicted, *, window=(-0.9, 0.9), cap_factor=0.5):
    """Greedy nearest-neighbour matching in the complex plane.

    Only values with ``window[0] <= Re <= window[1]`` take part.  A pair
    is admissible when its distance is at most ``cap_factor`` times the
    local spacing, taken as the mean of both sets' spacings of distinct
    real parts at the pair's midpoint.  Pairs are accepted in order of
    increasing distance; ties are broken on the values themselves, so
    swapping the inputs transposes the report.
    """
    a_all, b_all = _values(exact), _values(predicted)
    lo, hi = window
    a = a_all[(a_all.real >= lo) & (a_all.real <= hi)]
    b = b_all[(b_all.real >= lo) & (b_all.real <= hi)]
    ua, ub = _distinct_real(a), _distinct_real(b)

    candidates = []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            d = abs(x - y)
            mid = 0.5 * (x.real + y.real)
            sp = 0.5 * (_local_spacing(ua, mid) + _local_spacing(ub, mid))
            if d <= cap_factor * sp:
                key = tuple(sorted([(x.real, x.imag), (y.real, y.imag)]))
                candidates.append((d, key, i, j, sp))
    candidates.sort(key=lambda c: (c[0], c[1]))

    used_a, used_b, matched = set(), set(), []
    for d, _, i, j, sp in candidates:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        matched.append((complex(a[i]), complex(b[j]), float(d), float(sp)))
    matched.sort(key=lambda m: (m[0].real, m[0].imag))
    return ComparisonReport(
        matched=matched,
        unmatched_exact=[complex(a[i]) for i in range(a.size) if i not in used_a],
        unmatched_predicted=[complex(b[j]) for j in range(b.size) if j not in used_b],
        window=(float(lo), float(hi)),
    )


# ---------------------------------------------------------------------------
# computations


def _exact(cfg, geom, state):
    return spectra.exact_spectrum(geom, state, imag_floor=cfg.threshold("imag_floor"))


def _predict(cfg, geom, state):
    return rh.predict_fine_structure(
        geom, state, window=cfg.lambda_window, convention=cfg.convention
    )


def _closed_form(cfg, geom, state):
    if not state.half_filling or geom.k != geom.l:
        return None
    return rh.half_filling_closed_forms(geom, state, convention=cfg.convention)[1]


def _prediction_residuals(cfg, geom, state, pred):
    out = []
    for lam, branch in zip(pred.roots, pred.branches):
        if lam.imag == 0:
            out.append(rh.phase_residual(lam.real, geom, state, branch, convention=cfg.convention))
        else:
            x = rh.beta_imag(complex(lam))
            out.append(abs(rh.phase_mismatch(x, geom, state, convention=cfg.convention)))
    return out


def _spectrum_rows(res):
    rows = []
    for i, lam in enumerate(res.lambdas):
        rows.append(("exact", lam.real, lam.imag, "pair" if res.partner[i] >= 0 else "real", res.residual))
    return rows


def _prediction_rows(cfg, geom, state, pred):
    resid = _prediction_residuals(cfg, geom, state, pred)
    return [
        (pred.source, lam.real, lam.imag, branch, r)
        for lam, branch, r in zip(pred.roots, pred.branches, resid)
    ]


def _density_table(cfg, geom, state, lambdas):
    a, b = cfg.lambda_window
    edges = np.linspace(a, b, cfg.bins + 1)
    counts, _ = np.histogram(np.asarray(lambdas).real, bins=edges)
    centres = 0.5 * (edges[:-1] + edges[1:])
    rho = rh.mean_density(centres, geom, convention=cfg.convention)
    width = edges[1:] - edges[:-1]
    return edges, [(c, r, int(n), w) for c, r, n, w in zip(centres, rho, counts, width)]


def _negativity_doc(cfg, geom, state, exact):
    value = spectra.logarithmic_negativity(exact.lambdas).value
    closed = _closed_form(cfg, geom, state)
    ratio = value / closed if closed else None
    return {
        "exact": value,
        "closed_form": closed,
        "ratio": ratio,
        "geometry": {"k": geom.k, "l": geom.l, "gap": geom.gap, "pf": cfg.pf},
    }


def compare(cfg):
    geom, state = cfg.geometry(), cfg.state()
    exact = _exact(cfg, geom, state)
    pred = _predict(cfg, geom, state)
    report = match_spectra(
        exact, pred, window=cfg.lambda_window, cap_factor=cfg.threshold("match_cap")
    )
    _, table = _density_table(cfg, geom, state, exact.lambdas)
    report.density = table
    report.negativity = _negativity_doc(cfg, geom, state, exact)
    report.classification = {
        "exact": exact.classification,
        "predicted": pred.classification,
        "agrees": exact.classification == pred.classification,
        "exact_pairs": exact.n_pairs,
        "predicted_pairs": pred.n_pairs,
        "prediction_gaps": [list(g) for g in pred.gaps],
    }
    return exact, pred, report


def _report_doc(cfg, report):
    c = lambda z: [z.real, z.imag]
    return {
        "geometry": {"k": cfg.k, "l": cfg.l, "gap": cfg.gap, "pf": cfg.pf},
        "convention": cfg.convention,
        "window": list(report.window),
        "match_fraction": report.match_fraction,
        "n_exact_in_window": report.n_exact,
        "matched": [
            {"exact": c(a), "predicted": c(b), "distance": d, "spacing": s}
            for a, b, d, s in report.matched
        ],
        "unmatched_exact": [c(z) for z in report.unmatched_exact],
        "unmatched_predicted": [c(z) for z in report.unmatched_predicted],
        "density": [
            {"lambda": x, "rho_pred": r, "count_exact": n, "bin_width": w}
            for x, r, n, w in report.density
        ],
        "negativity": report.negativity,
        "classification": report.classification,
    }


def sweep_cell(cfg, cell):
    sub = replace(cfg, command="compare", k=cell["k"], l=cell["l"], gap=cell["gap"], pf=cell["pf"], sweep=None)
    exact, pred, report = compare(sub)
    neg = report.negativity
    lam = exact.lambdas
    return (
        cell["k"],
        cell["l"],
        cell["gap"],
        cell["pf"],
        lam.size,
        exact.n_pairs,
        pred.n_pairs,
        float(np.max(np.abs(lam.imag))) if lam.size else 0.0,
        neg["exact"],
        neg["closed_form"],
        neg["ratio"],
        report.match_fraction,
        report.classification["agrees"],
    )


def _thread_count(cfg):
    if cfg.threads is not None:
        return cfg.threads
    env = os.environ.get("NEGASPEC_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ValidationError(f"NEGASPEC_THREADS must be an integer, got {env!r}") from exc
        if n < 1:
            raise ValidationError("NEGASPEC_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def run_sweep(cfg):
    """Evaluate every cell; results come back in input order."""
    threads = min(_thread_count(cfg), len(cfg.sweep))
    if threads == 1:
        return [sweep_cell(cfg, c) for c in cfg.sweep]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: sweep_cell(cfg, c), cfg.sweep))


# ---------------------------------------------------------------------------
# output


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(
            [
                "" if v is None
                else str(v).lower() if isinstance(v, (bool, np.bool_))
                else _num(v) if isinstance(v, (float, np.floating))
                else v
                for v in row
            ]
        )
    return buf.getvalue()


def _json_text(doc):
    return json.dumps(_plain(doc), indent=2, allow_nan=False) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _spectrum_figure(title, exact=None, predicted=None):
    fig = Figure(title=title, xlabel="Re lambda", ylabel="Im lambda")
    if exact is not None:
        fig.scatter(exact.real, exact.imag, label="exact")
    if predicted is not None:
        fig.scatter(predicted.real, predicted.imag, label="predicted", marker="cross")
    return fig


def _title(cfg):
    return f"k={cfg.k} l={cfg.l} gap={cfg.gap} pF/pi={cfg.pf}"


def run(cfg):
    """Execute one validated configuration; returns the exit code."""
    if cfg.command == "sweep":
        rows = run_sweep(cfg)
        _emit(_csv_text(SWEEP_COLUMNS, rows), cfg.out)
        return 0

    geom, state = cfg.geometry(), cfg.state()
    if cfg.command == "spectrum":
        exact = _exact(cfg, geom, state)
        if exact.range_violations:
            print(f"warning: {len(exact.range_violations)} eigenvalues with |Re| > 1", file=sys.stderr)
        _emit(_csv_text(SPECTRUM_COLUMNS, _spectrum_rows(exact)), cfg.out)
        if cfg.svg:
            _spectrum_figure(_title(cfg), exact=exact.lambdas).save(cfg.svg)
    elif cfg.command == "predict":
        pred = _predict(cfg, geom, state)
        for lo, hi in pred.gaps:
            print(f"warning: no root resolved for beta_I in [{lo:.6g}, {hi:.6g}]", file=sys.stderr)
        _emit(_csv_text(SPECTRUM_COLUMNS, _prediction_rows(cfg, geom, state, pred)), cfg.out)
        if cfg.svg:
            _spectrum_figure(_title(cfg), predicted=pred.roots).save(cfg.svg)
    elif cfg.command == "density":
        exact = _exact(cfg, geom, state)
        edges, table = _density_table(cfg, geom, state, exact.lambdas)
        _emit(_csv_text(DENSITY_COLUMNS, table), cfg.out)
        if cfg.svg:
            fig = Figure(title=_title(cfg), xlabel="lambda", ylabel="density")
            fig.steps(edges, [n / w for _, _, n, w in table], label="exact histogram")
            xs = np.linspace(edges[0], edges[-1], 200)
            fig.line(xs, rh.mean_density(xs, geom, convention=cfg.convention), label="mean density")
            fig.save(cfg.svg)
    elif cfg.command == "negativity":
        exact = _exact(cfg, geom, state)
        _emit(_json_text(_negativity_doc(cfg, geom, state, exact)), cfg.out)
    elif cfg.command == "compare":
        exact, pred, report = compare(cfg)
        _emit(_json_text(_report_doc(cfg, report)), cfg.out)
        if cfg.svg:
            _spectrum_figure(_title(cfg), exact=exact.lambdas, predicted=pred.roots).save(cfg.svg)
    return 0


# ---------------------------------------------------------------------------
# entry point


def _parser():
    p = argparse.ArgumentParser(
        prog="negaspec",
        description="Exact and asymptotic negativity spectra of two lattice-fermion intervals.",
    )
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", help="flat JSON file with run parameters")
    p.add_argument("--k", type=int, help="interval A has k+1 sites")
    p.add_argument("--l", type=int, help="interval B has l+1 sites")
    p.add_argument("--gap", type=int, help="distance from the last site of B to the first of A")
    p.add_argument("--pf", help="filling fraction p_F/pi as p/q (default 1/2)")
    p.add_argument("--window", type=float, nargs=2, metavar=("A", "B"), help="lambda window")
    p.add_argument("--bins", type=int, help="histogram bins for density output")
    p.add_argument("--convention", choices=("sites", "coords"), help="interval length convention")
    p.add_argument("--imag-floor", type=float, help="relative |Im| below which eigenvalues are real")
    p.add_argument("--match-cap", type=float, help="matching cap in units of local spacing")
    p.add_argument("--sweep-k", type=int, nargs="+", help="k values for a sweep")
    p.add_argument("--sweep-l", type=int, nargs="+", help="l values (default: l = k)")
    p.add_argument("--sweep-gap", type=int, nargs="+", help="gap values for a sweep")
    p.add_argument("--threads", type=int, help="sweep worker threads (overrides NEGASPEC_THREADS)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--svg", help="also write an SVG plot")
    return p


def _flag_values(args):
    flags = {
        "command": args.command,
        "k": args.k,
        "l": args.l,
        "gap": args.gap,
        "pf": args.pf,
        "lambda_window": tuple(args.window) if args.window else None,
        "bins": args.bins,
        "convention": args.convention,
        "out": args.out,
        "svg": args.svg,
        "threads": args.threads,
    }
    thresholds = {}
    if args.imag_floor is not None:
        thresholds["imag_floor"] = args.imag_floor
    if args.match_cap is not None:
        thresholds["match_cap"] = args.match_cap
    if args.sweep_k or args.sweep_gap or args.sweep_l:
        if not (args.sweep_k and args.sweep_gap):
            raise ValidationError("a flag sweep needs both --sweep-k and --sweep-gap")
        cells = []
        for k, gap in itertools.product(args.sweep_k, args.sweep_gap):
            for l in args.sweep_l or [k]:
                cells.append({"k": k, "l": l, "gap": gap})
        flags["sweep"] = cells
    return flags, thresholds


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        file_values = load_config(args.config) if args.config else {}
        flags, thresholds = _flag_values(args)
        if thresholds:
            flags["thresholds"] = {**file_values.get("thresholds", {}), **thresholds}
        cfg = build_config(file_values, flags)
        return run(cfg)
    except (ValidationError, DomainError) as exc:
        print(f"negaspec: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"negaspec: numerical failure: {exc}", file=sys.stderr)
        return 3
    except NegaspecError as exc:
        print(f"negaspec: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"negaspec: cannot write output: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
