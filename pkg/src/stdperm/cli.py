"""Command-line interface: ``stdperm <command> [options]``.

Exit codes: 0 success, 1 a statistical check failed, 2 usage or parse error,
3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import exact, stats
from .core import format_sequence, parse_sequence, standardize
from .dist import parse_dist
from .errors import InternalInvariant, ParseError, StdPermError
from .harness import simulate, std_sampler, uniform_sampler
from .sampling import DEFAULT_SEED, PD_TOL, RngStream, m_t, sample_pd, sample_std_perm
from .surgery import census_by_type, insert_cycle, locate_cycle, remove_cycle, unique_cycle_generator
from .words import format_word, necklace_of, parse_word

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
COMMANDS = ("sample", "census", "exact", "surgery", "verify", "pd", "clt")


@dataclass
class RunConfig:
    command: str
    options: dict[str, Any] = field(default_factory=dict)

    def canonical(self) -> str:
        return stats.canonical_json(asdict(self))

    def hash(self) -> str:
        return stats.config_hash(asdict(self))


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {v}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(tok)) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list: {text!r}")


def _t_specs(text: str) -> list[tuple[int, ...]]:
    """``2;3;2,2`` -> [(2,), (3,), (2, 2)]."""
    try:
        return [tuple(int(t) for t in part.split(",")) for part in text.split(";") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad t-spec list: {text!r}")


def _common(p: argparse.ArgumentParser, n: bool = True, reps: int = 1):
    p.add_argument("--dist", default="uniform:2", help="uniform:<q> | geom:<q> | file:<path>")
    if n:
        p.add_argument("--n", type=_nonneg, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--reps", type=_positive, default=reps)
    p.add_argument("--streams", type=_positive, default=1)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", help="report path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stdperm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw sequences and their standardizations")
    _common(p)
    p.add_argument("--seq-out", help="file for sequences, one per line")
    p.add_argument("--perm-out", help="file for one-line permutations")

    p = sub.add_parser("census", help="typed cycle census of a sequence")
    _common(p)
    p.add_argument("--g", help="sequence, space or comma separated (default: sample one)")

    p = sub.add_parser("exact", help="exact laws: expected c_k, joint tails, marginals")
    _common(p)
    p.add_argument("what", choices=("ck", "tail", "marginal"))
    p.add_argument("--kmax", type=_positive, default=5)
    p.add_argument("--pair", action="append", default=[], metavar="WORD:L",
                   help="query pair, e.g. 4,2,7,2,5,4:1 (repeatable)")
    p.add_argument("--query", help="query file with lines 'WORD L'")
    p.add_argument("--word", help="necklace for 'marginal'")

    p = sub.add_parser("surgery", help="insert or remove a typed cycle")
    _common(p)
    p.add_argument("action", choices=("insert", "remove", "generator"))
    p.add_argument("--g", default="", help="sequence (space or comma separated)")
    p.add_argument("--word", required=True, help="primitive word, comma separated")

    p = sub.add_parser("verify", help="run a statistical verification suite")
    _common(p, reps=10_000)
    p.add_argument("suite", choices=("small-fixed", "small-spreading", "pd", "clt", "special"))
    p.add_argument("--kmax", type=_positive, default=3)
    p.add_argument("--q", type=_positive, help="alphabet size for small-spreading (default n)")
    p.add_argument("--t-specs", type=_t_specs, default=[(2,), (3,), (2, 2)])
    p.add_argument("--ns", type=_int_list, default=[1000, 10_000, 100_000])
    p.add_argument("--control", action="store_true", help="pd: also run the Fisher-Yates control")
    p.add_argument("--R", type=float, default=stats.R_DEFAULT)
    p.add_argument("--csv", help="write raw per-replication summaries here")

    p = sub.add_parser("pd", help="stick-breaking Poisson-Dirichlet samples")
    _common(p, n=False, reps=10)
    p.add_argument("--tol", type=float, default=PD_TOL)
    p.add_argument("--t", type=_int_list, default=[2, 3])
    p.add_argument("--top", type=_positive, default=5)

    p = sub.add_parser("clt", help="total cycle counts K_n over a grid of n")
    _common(p, n=False, reps=1000)
    p.add_argument("--ns", type=_int_list, default=[1000, 10_000, 100_000])
    p.add_argument("--uniform-control", action="store_true")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    opts = {k: v for k, v in vars(args).items() if k != "command"}
    return RunConfig(args.command, json.loads(stats.canonical_json(opts)))


def _seq_arg(text: str):
    return parse_sequence(text.replace(",", " "))


class Output:
    """Collects a report and writes it with the config header in the chosen format."""

    def __init__(self, cfg: RunConfig, fmt: str):
        self.cfg = cfg
        self.fmt = fmt
        self.records: list[dict] = []
        self.lines: list[str] = []
        self.columns: list[str] | None = None

    def row(self, record: dict, line: str | None = None):
        self.records.append(record)
        if self.columns is None:
            self.columns = list(record)
        self.lines.append(line if line is not None else "  ".join(f"{k}={v}" for k, v in record.items()))

    def render(self, passed: bool | None = None) -> str:
        if self.fmt == "json":
            doc = {"config": json.loads(self.cfg.canonical()), "config_hash": self.cfg.hash(),
                   "records": self.records}
            if passed is not None:
                doc["passed"] = passed
            return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
        if self.fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=self.columns or ["empty"], lineterminator="\r\n",
                               extrasaction="ignore")
            w.writeheader()
            for r in self.records:
                w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
            return buf.getvalue()
        head = [f"# config {self.cfg.canonical()}", f"# hash {self.cfg.hash()}"]
        tail = [] if passed is None else [f"# overall {'PASS' if passed else 'FAIL'}"]
        return "\n".join(head + self.lines + tail) + "\n"


def _write(text: str, path: str | None):
    if path:
        Path(path).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _num(x):
    return str(x) if isinstance(x, Fraction) else x


def cmd_sample(args, out: Output):
    dist = parse_dist(args.dist)
    rng = RngStream(args.seed, 0)
    seqs, perms = [], []
    for rep in range(args.reps):
        g, sigma = sample_std_perm(dist, args.n, rng)
        seqs.append(format_sequence(g))
        perms.append(str(sigma))
        out.row({"rep": rep, "sequence": seqs[-1], "permutation": perms[-1]},
                f"{seqs[-1]}\t{perms[-1]}")
    if args.seq_out:
        Path(args.seq_out).write_text("".join(s + "\n" for s in seqs))
    if args.perm_out:
        Path(args.perm_out).write_text("".join(s + "\n" for s in perms))
    return None


def cmd_census(args, out: Output):
    if args.g is not None:
        g = _seq_arg(args.g)
    else:
        g, _ = sample_std_perm(parse_dist(args.dist), args.n, RngStream(args.seed, 0))
    sigma = standardize(g)
    census = census_by_type(g, sigma)
    out.lines.append(f"# g = {format_sequence(g)}")
    out.lines.append(f"# std(g) = {sigma}")
    for w, count in sorted(census.by_type.items()):
        out.row({"necklace": format_word(w.word), "length": len(w), "count": count})
    return None


def _read_pairs(args) -> list[tuple]:
    raw = list(args.pair)
    if args.query:
        for line in Path(args.query).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                parts = line.split()
                if len(parts) != 2:
                    raise ParseError(f"bad query line: {line!r}")
                raw.append(f"{parts[0]}:{parts[1]}")
    pairs = []
    for item in raw:
        word, sep, l = item.rpartition(":")
        if not sep:
            raise ParseError(f"query pair needs WORD:L, got {item!r}")
        try:
            pairs.append((necklace_of(parse_word(word)), int(l)))
        except ValueError as exc:
            if isinstance(exc, StdPermError):
                raise
            raise ParseError(f"bad threshold in {item!r}") from exc
    return pairs


def cmd_exact(args, out: Output):
    dist = parse_dist(args.dist)
    if args.what == "ck":
        for k in range(1, args.kmax + 1):
            v = exact.expected_ck(dist, k, args.n)
            out.row({"k": k, "expected_ck": _num(v), "float": float(v)})
    elif args.what == "tail":
        pairs = _read_pairs(args)
        if not pairs:
            raise ParseError("tail needs at least one --pair or a --query file")
        v = exact.joint_tail(dist, exact.TypedTailQuery(tuple(pairs), args.n))
        out.row({"query": " ".join(f"{format_word(w.word)}:{l}" for w, l in pairs),
                 "n": args.n, "tail": _num(v), "float": float(v)})
    else:
        if not args.word:
            raise ParseError("marginal needs --word")
        w = necklace_of(parse_word(args.word))
        for l, p in enumerate(exact.marginal_pmf_D(dist, w, args.n)):
            out.row({"necklace": format_word(w.word), "l": l, "pmf": _num(p), "float": float(p)})
    return None


def cmd_surgery(args, out: Output):
    g = _seq_arg(args.g)
    word = parse_word(args.word)
    if args.action == "generator":
        wit = unique_cycle_generator(word)
        out.row({"word": format_word(word), "generator": format_sequence(wit.generator),
                 "std": str(standardize(wit.generator)),
                 "cycle": format_sequence(wit.support_order)})
        return None
    if args.action == "insert":
        h = insert_cycle(g, word)
    else:
        out.lines.append(f"# removing positions {format_sequence(locate_cycle(g, word))}")
        h = remove_cycle(g, word)
    before, after = census_by_type(g), census_by_type(h)
    w = necklace_of(word)
    out.row({"action": args.action, "input": format_sequence(g), "output": format_sequence(h),
             "std": str(standardize(h)), "necklace": format_word(w.word),
             "D_before": before.D(w), "D_after": after.D(w)})
    return None


def _emit_reports(out: Output, reports: Sequence[stats.TestReport]) -> bool:
    for r in reports:
        d = r.to_dict()
        d.pop("config", None)
        out.row(d, r.summary())
    return all(r.passed for r in reports)


def cmd_verify(args, out: Output):
    dist = parse_dist(args.dist) if args.suite not in ("small-spreading", "special") else None
    if args.suite == "small-fixed":
        sample = simulate(std_sampler(dist), args.n, args.reps, args.seed, args.streams,
                          k_max=args.kmax, threads=args.threads)
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                sample.write_csv(fh)
        reports = stats.verify_small_cycles_fixed(dist, args.n, args.kmax, args.reps, args.seed,
                                                  args.streams, sample=sample)
    elif args.suite == "small-spreading":
        reports = stats.verify_small_cycles_spreading(args.q, args.n, args.kmax, args.reps,
                                                      args.seed, args.streams, args.threads)
    elif args.suite == "pd":
        reports = stats.verify_pd(dist, args.n, args.reps, args.t_specs, args.seed,
                                  args.streams, args.threads, args.R)
        if args.control:
            control = stats.verify_pd(None, args.n, args.reps, args.t_specs, args.seed,
                                      args.streams, args.threads)
            for r in control:
                r.name = "control " + r.name
            reports += control
    elif args.suite == "clt":
        rep = stats.verify_clt(dist, args.ns, args.reps, args.seed, args.streams,
                               args.threads, args.R)
        for row in rep.details["grid"]:
            out.lines.append("# n={n} mean/log n={mean_ratio:.4f} var/log n={var_ratio:.4f} "
                             "skew={skewness:.4f} KS={ks_limit:.4f}".format(**row))
        out.lines.append(f"# checks {json.dumps(rep.details['checks'])}")
        reports = [rep]
    else:
        reports = stats.verify_special(args.reps, args.seed)
    return _emit_reports(out, reports)


def cmd_pd(args, out: Output):
    rng = RngStream(args.seed, 0)
    for rep in range(args.reps):
        v = sample_pd(rng, args.tol)
        rec = {"rep": rep}
        for j in range(args.top):
            rec[f"x{j + 1}"] = v.entries[j] if j < len(v.entries) else 0.0
        for t in args.t:
            rec[f"m{t}"] = m_t(v, t)[0]
        rec["remainder"] = v.remainder
        out.row(rec)
    return None


def cmd_clt(args, out: Output):
    sampler = uniform_sampler() if args.uniform_control else std_sampler(parse_dist(args.dist))
    for idx, n in enumerate(args.ns):
        K = simulate(sampler, n, args.reps, args.seed + idx, args.streams, k_max=1,
                     threads=args.threads).K
        L = math.log(n)
        if args.format == "csv":
            for rep, k in enumerate(K):
                out.row({"rep": rep, "n": n, "K": int(k), "z": (int(k) - L) / math.sqrt(L)})
        else:
            out.row({"n": n, "mean_over_log_n": float(K.mean() / L),
                     "var_over_log_n": float(K.var() / L)})
    return None


HANDLERS = {"sample": cmd_sample, "census": cmd_census, "exact": cmd_exact,
            "surgery": cmd_surgery, "verify": cmd_verify, "pd": cmd_pd, "clt": cmd_clt}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = _config(args)
    out = Output(cfg, args.format)
    try:
        passed = HANDLERS[args.command](args, out)
    except InternalInvariant as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (StdPermError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(out.render(passed), args.out)
    if passed is False:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
