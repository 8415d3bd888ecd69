"""Command-line front end.

Subcommands: simulate, moments, wordlimit, compare, words, rerun.
Every output file starts with the full run config (a ``# config:`` comment
line for CSV, a ``config`` key for JSON) and ``rerun FILE`` repeats the run.
Exit codes: 0 ok, 2 bad configuration or input, 3 resource budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from thetalink import laws, limits, spectra
from thetalink.errors import BudgetExceeded, ConfigError
from thetalink.matrix import DISTRIBUTIONS, build_matrix
from thetalink.words import MAX_K, classify, enumerate_pair_matched, parse_word

COMMANDS = ("simulate", "moments", "wordlimit", "compare", "words")
MOMENT_METHODS = ("ensemble", "mc", "mixed", "closed-form")
WORD_METHODS = ("mc", "catalan", "finite-n", "closed-form")
DEFAULT_METHODS = {"moments": ["closed-form", "mixed"], "wordlimit": ["mc", "catalan"]}

HIST_COLUMNS = ("bin_left", "bin_right", "count")
MOMENT_COLUMNS = ("k", "method", "value", "std_error", "lower", "upper")
ZERO_COLUMNS = ("theta", "n", "reps", "zero_tol", "zero_proportion", "limit")
COMPARE_COLUMNS = ("x", "empirical_cdf", "law_cdf", "law_density")
WORDLIMIT_COLUMNS = ("word", "symmetric", "catalan", "closure", "method", "value", "std_error")
WORDS_COLUMNS = ("word", "symmetric", "catalan", "closure", "generating_vertices")


@dataclass
class RunConfig:
    command: str
    thetas: List[float] = field(default_factory=list)
    grid: bool = False
    n: Optional[int] = None
    reps: int = 1
    kmax: int = 2
    word: Optional[str] = None
    method: List[str] = field(default_factory=list)
    samples: int = 10 ** 6
    seed: int = 0
    dist: str = "gaussian"
    bins: int = 81
    range: Optional[List[float]] = None
    exclude_zero: bool = False
    zero_tol: Optional[float] = None
    out: Optional[str] = None
    format: str = "csv"
    workers: int = 1
    budget: int = limits.DEFAULT_BUDGET
    dump_matrix: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def single(self, theta: float) -> "RunConfig":
        d = asdict(self)
        d.update(thetas=[theta], grid=False)
        return RunConfig(**d)

    @property
    def theta(self) -> float:
        return self.thetas[0]


def parse_grid(text: str) -> List[float]:
    """``"a:b:step"`` (inclusive) or a comma list ``"0.5,1,1.5"``."""
    try:
        if ":" in text:
            a, b, step = (float(t) for t in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            count = int(round((b - a) / step))
            return [round(a + i * step, 12) for i in range(count + 1)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse theta grid {text!r}; use a:b:step or a,b,c") from None


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    if cfg.command != "words":
        if not cfg.thetas:
            raise ConfigError("give --theta or --theta-grid")
        for t in cfg.thetas:
            if not (t > 0 and math.isfinite(t)):
                raise ConfigError(f"theta must be positive, got {t}")
    if cfg.dist not in DISTRIBUTIONS:
        raise ConfigError(f"unknown --dist {cfg.dist!r}; choose from {', '.join(DISTRIBUTIONS)}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("--format must be csv or json")
    for name in ("reps", "samples", "bins", "workers", "budget"):
        if getattr(cfg, name) < 1:
            raise ConfigError(f"--{name} must be >= 1")
    if not 1 <= cfg.kmax <= MAX_K:
        raise ConfigError(f"--kmax must be in 1..{MAX_K}")
    if cfg.range is not None:
        if len(cfg.range) != 2 or not cfg.range[1] > cfg.range[0]:
            raise ConfigError("--range needs lo,hi with hi > lo")
    if cfg.zero_tol is not None and not cfg.zero_tol > 0:
        raise ConfigError("--zero-tol must be positive")
    if cfg.n is not None and cfg.n < 1:
        raise ConfigError("--n must be >= 1")
    if not cfg.method:
        cfg.method = list(DEFAULT_METHODS.get(cfg.command, []))
    allowed = {"moments": MOMENT_METHODS, "wordlimit": WORD_METHODS}.get(cfg.command)
    if allowed is not None:
        cfg.method = ["mixed" if m == "word-sum" else m for m in cfg.method]
        bad = [m for m in cfg.method if m not in allowed]
        if bad:
            raise ConfigError(f"unknown method(s) {bad}; choose from {', '.join(allowed)}")
    needs_n = cfg.command in ("simulate", "compare") or "ensemble" in cfg.method \
        or (cfg.command == "wordlimit" and "finite-n" in cfg.method)
    if needs_n and cfg.n is None:
        raise ConfigError("--n is required for this command/method")
    if cfg.command == "moments" and cfg.kmax > 4 and {"mc", "mixed"} & set(cfg.method):
        raise ConfigError("word-sum moments are limited to --kmax <= 4")
    if cfg.command == "wordlimit" and cfg.word is not None:
        parse_word(cfg.word)
    return cfg


# ---- output --------------------------------------------------------------

def _csv_text(cfg: RunConfig, columns, rows, notes=()) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(cfg.to_dict(), sort_keys=True) + "\n")
    for note in notes:
        buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(cfg: RunConfig, payload: dict) -> str:
    return json.dumps({"config": cfg.to_dict(), **payload}, indent=2, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def write_atomic(path: str, text: str):
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _stem(out: str) -> str:
    for ext in (".csv", ".json"):
        if out.endswith(ext):
            return out[: -len(ext)]
    return out


def emit(outputs, out: Optional[str]) -> List[str]:
    """Write (suffix, text) pairs to ``<out><suffix>``, or to stdout without --out."""
    if out is None:
        sys.stdout.write("\n".join(text for _, text in outputs))
        return []
    paths = []
    for suffix, text in outputs:
        path = _stem(out) + suffix
        write_atomic(path, text)
        paths.append(path)
    return paths


# ---- commands ------------------------------------------------------------

def _ensemble(cfg: RunConfig):
    return spectra.ensemble_eigenvalues(cfg.theta, cfg.n, cfg.reps, cfg.dist, cfg.seed, cfg.workers)


def cmd_simulate(cfg: RunConfig):
    eigs = _ensemble(cfg)
    pooled = np.concatenate(eigs)
    tol = cfg.zero_tol if cfg.zero_tol is not None else spectra.default_zero_tol(pooled)
    hist = spectra.histogram(pooled, cfg.bins, cfg.range, cfg.exclude_zero, tol)
    em = spectra.moments_of(eigs, 2 * cfg.kmax)
    moment_rows = []
    for k in range(1, cfg.kmax + 1):
        lo, hi = laws.moment_bounds(cfg.theta, k)
        mean, se = em[2 * k]
        moment_rows.append([k, "ensemble", mean, se, lo, hi])
    zp = float(np.mean([spectra.zero_proportion(e, tol) for e in eigs]))
    zero_row = [cfg.theta, cfg.n, cfg.reps, tol, zp, laws.limiting_zero_proportion(cfg.theta)]
    hist_notes = [f"underflow={hist.underflow} overflow={hist.overflow} dropped={hist.dropped}"]

    if cfg.format == "json":
        payload = {
            "histogram": {"columns": list(HIST_COLUMNS), "rows": [list(r) for r in hist.rows()],
                          "underflow": hist.underflow, "overflow": hist.overflow, "dropped": hist.dropped},
            "moments": [dict(zip(MOMENT_COLUMNS, r)) for r in moment_rows],
            "zero": dict(zip(ZERO_COLUMNS, zero_row)),
        }
        outputs = [(".json", _json_text(cfg, payload))]
    else:
        outputs = [("_histogram.csv", _csv_text(cfg, HIST_COLUMNS, hist.rows(), hist_notes)),
                   ("_moments.csv", _csv_text(cfg, MOMENT_COLUMNS, moment_rows)),
                   ("_zero.csv", _csv_text(cfg, ZERO_COLUMNS, [zero_row]))]
    if cfg.dump_matrix:
        a = build_matrix(cfg.n, cfg.theta, cfg.dist, cfg.seed, 0).entries
        buf = io.StringIO()
        np.savetxt(buf, a, delimiter=",", fmt="%.17g")
        outputs.append(("_matrix.csv", buf.getvalue()))
    summary = f"theta={cfg.theta:g} n={cfg.n} reps={cfg.reps}: zero proportion {zp:.4f}"
    return outputs, summary


def closed_form_moment(theta: float, k: int) -> Optional[float]:
    if k == 1:
        return 1.0
    if float(theta) == int(theta):
        return laws.moment_integer_theta(theta, k)
    if k == 2:
        return laws.beta4_closed_form(theta)
    return None


def cmd_moments(cfg: RunConfig):
    theta = cfg.theta
    rows = []
    em = None
    if "ensemble" in cfg.method:
        em = spectra.moments_of(_ensemble(cfg), 2 * cfg.kmax)
    for k in range(1, cfg.kmax + 1):
        lo, hi = laws.moment_bounds(theta, k)
        for method in cfg.method:
            if method == "ensemble":
                value, se = em[2 * k]
            elif method == "closed-form":
                value, se = closed_form_moment(theta, k), 0.0
                if value is None:
                    continue
            else:
                est = limits.lsd_moment(theta, k, method=method, samples=cfg.samples, seed=cfg.seed)
                value, se = est.value, est.std_error
            rows.append([k, method, float(value), float(se), lo, hi])
    if cfg.format == "json":
        outputs = [(".json", _json_text(cfg, {"moments": [dict(zip(MOMENT_COLUMNS, r)) for r in rows]}))]
    else:
        outputs = [("_moments.csv", _csv_text(cfg, MOMENT_COLUMNS, rows))]
    return outputs, f"theta={theta:g}: {len(rows)} moment rows"


def word_report(w, theta: float, cfg: RunConfig) -> dict:
    cls = classify(w)
    report = {"word": str(w), "symmetric": cls.symmetric, "catalan": cls.catalan,
              "closure": limits.closure_type(w), "estimates": [], "skipped": []}
    for method in cfg.method:
        if method == "mc":
            est = limits.word_limit_mc(w, theta, cfg.samples, cfg.seed)
        elif method == "catalan":
            if not cls.catalan:
                report["skipped"].append({"method": method, "reason": "not a Catalan word"})
                continue
            est = limits.word_limit_catalan(w, theta)
        elif method == "finite-n":
            est = limits.word_limit_finite(w, cfg.n, theta, budget=cfg.budget)
        else:
            est = limits.word_limit_closed_form(w, theta)
            if est is None:
                report["skipped"].append({"method": method, "reason": "no closed form"})
                continue
        report["estimates"].append(est.to_dict())
    return report


def cmd_wordlimit(cfg: RunConfig):
    theta = cfg.theta
    words = [parse_word(cfg.word)] if cfg.word is not None else list(enumerate_pair_matched(cfg.kmax))
    reports = [word_report(w, theta, cfg) for w in words]
    if cfg.format == "json":
        outputs = [(".json", _json_text(cfg, {"theta": theta, "words": reports}))]
    else:
        rows = [[r["word"], r["symmetric"], r["catalan"], r["closure"], e["method"], e["value"], e["std_error"]]
                for r in reports for e in r["estimates"]]
        outputs = [(".csv", _csv_text(cfg, WORDLIMIT_COLUMNS, rows))]
    return outputs, f"theta={theta:g}: {len(reports)} word(s)"


def cmd_compare(cfg: RunConfig):
    theta = cfg.theta
    pooled = np.concatenate(_ensemble(cfg))
    tol = cfg.zero_tol if cfg.zero_tol is not None else spectra.default_zero_tol(pooled)
    integer = float(theta) == int(theta)
    if integer and not cfg.exclude_zero:
        sample = spectra.snap_zeros(pooled, tol)
        law = "integer-theta law"

        def cdf(x):
            return laws.integer_theta_cdf(theta, x)
    else:
        # zero-free part against F_1(x / sqrt(theta)); this is G_theta only for integer theta
        sample = pooled[np.abs(pooled) > tol]
        law = "F_1(x/sqrt(theta))" + ("" if integer else " [reference only, not the LSD]")

        def cdf(x):
            return laws.scaled_rayleigh_cdf(theta, x)
    if sample.size == 0:
        raise ConfigError("no eigenvalues left after removing zeros")
    ks = spectra.ks_distance(sample, cdf)
    lo, hi = cfg.range if cfg.range is not None else (float(sample.min()), float(sample.max()))
    grid = np.linspace(lo, hi, cfg.bins + 1)
    emp = np.searchsorted(np.sort(sample), grid, side="right") / sample.size
    if integer and not cfg.exclude_zero:
        table = laws.law_table(theta, grid)
    else:
        s = math.sqrt(theta)
        table = np.column_stack([grid, laws.rayleigh_density(grid / s) / s, cdf(grid)])
    rows = [[float(x), float(e), float(c), float(d)] for (x, d, c), e in zip(table, emp)]
    notes = [f"law={law}", f"ks={ks!r}", f"sample_size={sample.size}"]
    if cfg.format == "json":
        payload = {"theta": theta, "law": law, "ks": ks, "sample_size": int(sample.size),
                   "columns": list(COMPARE_COLUMNS), "rows": rows}
        outputs = [(".json", _json_text(cfg, payload))]
    else:
        outputs = [("_compare.csv", _csv_text(cfg, COMPARE_COLUMNS, rows, notes))]
    return outputs, f"theta={theta:g}: KS={ks:.4f} vs {law}"


def cmd_words(cfg: RunConfig):
    rows = []
    for w in enumerate_pair_matched(cfg.kmax):
        cls = classify(w)
        rows.append([str(w), cls.symmetric, cls.catalan, limits.closure_type(w),
                     " ".join(str(v) for v in cls.generating_vertices)])
    if cfg.format == "json":
        payload = {"k": cfg.kmax, "words": [dict(zip(WORDS_COLUMNS, r)) for r in rows]}
        outputs = [(".json", _json_text(cfg, payload))]
    else:
        outputs = [("_words.csv", _csv_text(cfg, WORDS_COLUMNS, rows))]
    return outputs, f"k={cfg.kmax}: {len(rows)} words"


HANDLERS = {"simulate": cmd_simulate, "moments": cmd_moments, "wordlimit": cmd_wordlimit,
            "compare": cmd_compare, "words": cmd_words}


def run(cfg: RunConfig) -> List[str]:
    """Validate and execute; returns written paths (empty when printing to stdout)."""
    cfg = validate(cfg)
    handler = HANDLERS[cfg.command]
    if cfg.command == "words" or not cfg.grid:
        one = cfg.single(cfg.thetas[0]) if cfg.thetas else cfg
        outputs, summary = handler(one)
        print(summary, file=sys.stderr)
        return emit(outputs, cfg.out)
    if cfg.out is None:
        raise ConfigError("--theta-grid needs --out")
    written, index_rows = [], []
    for theta in cfg.thetas:
        one = cfg.single(theta)
        outputs, summary = handler(one)
        print(summary, file=sys.stderr)
        paths = emit(outputs, f"{_stem(cfg.out)}_theta{theta:g}")
        written += paths
        index_rows += [[theta, os.path.basename(p)] for p in paths]
    index = _stem(cfg.out) + "_index.csv"
    write_atomic(index, _csv_text(cfg, ("theta", "file"), index_rows))
    return written + [index]


def read_config(path: str) -> RunConfig:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        d = json.loads(text).get("config")
    else:
        line = next((ln for ln in text.splitlines() if ln.startswith("# config: ")), None)
        d = json.loads(line[len("# config: "):]) if line else None
    if not isinstance(d, dict):
        raise ConfigError(f"{path} carries no embedded config")
    return RunConfig.from_dict(d)


# ---- argument parsing ----------------------------------------------------

def _float_pair(text):
    try:
        lo, hi = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected lo,hi") from None
    return [lo, hi]


def get_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_mutually_exclusive_group()
    g.add_argument("--theta", type=float, help="link parameter; modulus is floor(n/theta)")
    g.add_argument("--theta-grid", help="a:b:step or comma list; one output per theta plus an index")
    common.add_argument("--n", type=int, help="matrix dimension (or finite-n oracle size)")
    common.add_argument("--reps", type=int, default=1, help="independent replicates")
    common.add_argument("--kmax", "--k", dest="kmax", type=int, default=2,
                        help="largest k (moments beta_2k) or word half-length")
    common.add_argument("--word", help="canonical pair-matched word such as abba")
    common.add_argument("--method", default="", help="comma list of methods")
    common.add_argument("--samples", type=int, default=10 ** 6, help="Monte Carlo samples per word")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--dist", default="gaussian", help="/".join(DISTRIBUTIONS))
    common.add_argument("--bins", type=int, default=81)
    common.add_argument("--range", type=_float_pair, help="lo,hi")
    common.add_argument("--exclude-zero", action="store_true", help="drop |x| <= zero-tol first")
    common.add_argument("--zero-tol", type=float)
    common.add_argument("--out", help="output path stem; stdout if omitted")
    common.add_argument("--format", default="csv", choices=("csv", "json"))
    common.add_argument("--workers", type=int, default=1, help="threads for the ensemble")
    common.add_argument("--budget", type=int, default=limits.DEFAULT_BUDGET,
                        help="work budget for the finite-n circuit count")
    common.add_argument("--dump-matrix", action="store_true", help="simulate: also write replicate 0")

    p = argparse.ArgumentParser(prog="thetalink",
                                description="Spectra and word limits of i+j (mod n/theta) patterned matrices")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="ensemble histogram, moments, zero proportion")
    sub.add_parser("moments", parents=[common], help="beta_2k by ensemble / word sums / closed forms")
    sub.add_parser("wordlimit", parents=[common], help="p_theta(w) for one word or all words of length 2k")
    sub.add_parser("compare", parents=[common], help="ESD against the integer-theta law")
    sub.add_parser("words", parents=[common], help="list pair-matched words with their flags")
    r = sub.add_parser("rerun", help="repeat the run recorded in an output file")
    r.add_argument("file")
    r.add_argument("--out")
    return p


def config_from_args(ns) -> RunConfig:
    if ns.command == "rerun":
        cfg = read_config(ns.file)
        cfg.out = ns.out
        return cfg
    thetas, grid = [], False
    if ns.theta_grid is not None:
        thetas, grid = parse_grid(ns.theta_grid), True
    elif ns.theta is not None:
        thetas = [ns.theta]
    return RunConfig(command=ns.command, thetas=thetas, grid=grid, n=ns.n, reps=ns.reps, kmax=ns.kmax,
                     word=ns.word, method=[m.strip() for m in ns.method.split(",") if m.strip()],
                     samples=ns.samples, seed=ns.seed, dist=ns.dist, bins=ns.bins, range=ns.range,
                     exclude_zero=ns.exclude_zero, zero_tol=ns.zero_tol, out=ns.out, format=ns.format,
                     workers=ns.workers, budget=ns.budget, dump_matrix=ns.dump_matrix)


def main(argv=None) -> int:
    ns = get_parser().parse_args(argv)
    try:
        paths = run(config_from_args(ns))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
