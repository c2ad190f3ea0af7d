"""Command-line front end.

Every output starts with a ``#`` header block (tool version, config hash,
weight, p, rng seed) followed by a CSV table or JSON lines, and ends with a
``# summary:`` line holding a JSON pass/fail record.  Exit status is 0 when
every asserted inequality held, 1 when a mathematical check failed and 2 for
input or configuration errors.

CSV columns per command
-----------------------
norm                 space, value, oracle, agree
positioning pi       j, pi, pi_inverse
positioning q        n, q
positioning from-ranks
                     n, d
positioning roundtrip
                     check, n, result
seed em              m, lower, upper
seed phi             n, lower, upper
seed blocks          block, pos, coef   (json-lines: one vector document per block)
experiment steve1/2  n, norm, limit, gap
experiment nonsym    step, n, forward_norm_p, reverse_norm
experiment linf      j, n, support, window_lo, window_hi
experiment tree      branch, level, bit, m, eps, A, B, phi_lower, phi_upper, bound, status
corpus vectors       (json-lines only) one vector document per line
"""

import argparse
import csv
import hashlib
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .experiments import (
    SearchExhausted,
    branch_report,
    domination_check,
    linf_witness,
    nonsym_search,
    steve1_run,
    steve2_run,
    tree_build,
    tree_separation_check,
)
from .norms import (
    garling_norm,
    garling_norm_bruteforce,
    lorentz_norm,
    lp_norm,
    sup_norm,
)
from .positioning import (
    Positioning,
    pi_prefix,
    pi_prefixes,
    positioning_from_pi,
    positioning_from_ranks,
    q_sequence,
)
from .seeds import PowerCoefficients, Seed, block_sequence_Q, e_tail, fundamental_function
from .vectors import SparseVector
from .weights import Weight

__all__ = ["main", "build_parser"]

ORACLE_SUPPORT = 12


class InputError(Exception):
    """Malformed input documents or options (exit status 2)."""


# -- helpers ------------------------------------------------------------------

def _int_list(text):
    """``"1,4,16"`` or ``"1..5"`` (inclusive) into a list of integers."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"cannot parse integer list {text!r}") from None


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _load_vector(path):
    try:
        return SparseVector.from_doc(_load_json(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _fmt(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


class Report:
    """Collects header, rows and summary, then renders them deterministically."""

    def __init__(self, config, columns, fmt):
        self.config = config
        self.columns = list(columns)
        self.fmt = fmt
        self.rows = []
        self.documents = []
        self.summary = {}
        self.failed = False

    def row(self, *values):
        self.rows.append(values)

    def fail(self, reason):
        self.failed = True
        self.summary.setdefault("failures", []).append(reason)

    def render(self):
        out = io.StringIO()
        canon = json.dumps(_jsonable(self.config), sort_keys=True, separators=(",", ":"))
        out.write(f"# tool: garling {__version__}\n")
        out.write(f"# config-sha256: {hashlib.sha256(canon.encode()).hexdigest()}\n")
        out.write(f"# config: {canon}\n")
        out.write(f"# weight: {self.config.get('weight', '-')}\n")
        out.write(f"# p: {_fmt(self.config.get('p', '-'))}\n")
        out.write(f"# rng-seed: {self.config.get('rng_seed', 0)}\n")
        if self.fmt == "csv":
            writer = csv.writer(out, lineterminator="\n")
            if self.documents:
                writer.writerow(["block", "pos", "coef"])
                for k, doc in enumerate(self.documents, start=1):
                    for e in doc["entries"]:
                        writer.writerow([k, e["pos"], _fmt(float(e["coef"]))])
            else:
                writer.writerow(self.columns)
                for r in self.rows:
                    writer.writerow([_fmt(v) for v in r])
        else:
            for doc in self.documents:
                out.write(json.dumps(_jsonable(doc), sort_keys=True) + "\n")
            for r in self.rows:
                rec = {c: _jsonable(v) for c, v in zip(self.columns, r)}
                out.write(json.dumps(rec, sort_keys=True) + "\n")
        summary = dict(self.summary)
        summary["result"] = "FAIL" if self.failed else "PASS"
        out.write("# summary: " + json.dumps(_jsonable(summary), sort_keys=True) + "\n")
        return out.getvalue()


def _weight(args, cfg):
    spec = _pick(args, cfg, "weight", "power:1")
    try:
        return Weight.parse(spec) if isinstance(spec, str) else Weight.from_doc(spec), spec
    except ValueError as exc:
        raise InputError(f"weight: {exc}") from None


def _pick(args, cfg, name, default):
    """Explicit flag, then config document, then built-in default."""
    v = getattr(args, name, None)
    if v is not None:
        return v
    return cfg.get(name, default)


def _positive(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a number") from None
    if not (value > 0 and math.isfinite(value)):
        raise InputError(f"{name} must be positive and finite")
    return value


def _seed_from(args, cfg):
    doc = None
    if getattr(args, "seed_doc", None):
        doc = _load_json(args.seed_doc)
    elif "seed" in cfg:
        doc = cfg["seed"]
    try:
        if doc is not None:
            return Seed.from_doc(doc), doc
        eta = Positioning.parse(args.eta or "trivial")
        if getattr(args, "power", None):
            c, beta = (float(v) for v in args.power.split(","))
            seed = Seed(PowerCoefficients(c, beta), eta)
        else:
            coefs = [float(v) for v in (args.coefs or "1").split(",")]
            seed = Seed(coefs, eta)
    except (TypeError, ValueError) as exc:
        raise InputError(f"seed: {exc}") from None
    return seed, seed.to_doc()


# -- commands -----------------------------------------------------------------

def cmd_norm(args):
    x = _load_vector(args.vector)
    w, wspec = _weight(args, {})
    p = _positive(args.p, "p")
    config = {"command": "norm", "space": args.space, "weight": wspec, "p": p,
              "vector": x.to_doc(), "rng_seed": 0}
    rep = Report(config, ["space", "value", "oracle", "agree"], args.format)
    spaces = ["garling", "lorentz", "lp", "sup"] if args.space == "all" else [args.space]
    for space in spaces:
        if space == "garling":
            value = garling_norm(x, w, p).value
            if len(x) <= ORACLE_SUPPORT:
                oracle = garling_norm_bruteforce(x, w, p)
                agree = abs(value - oracle) <= 1e-10 * max(1.0, abs(oracle))
                if not agree:
                    rep.fail(f"garling {value!r} disagrees with enumeration {oracle!r}")
                rep.row(space, value, oracle, agree)
            else:
                rep.row(space, value, "", "")
        elif space == "lorentz":
            rep.row(space, lorentz_norm(x, w, p), "", "")
        elif space == "lp":
            rep.row(space, lp_norm(x, p), "", "")
        else:
            rep.row(space, sup_norm(x), "", "")
    return rep


def cmd_positioning(args):
    config = {"command": "positioning", "action": args.action, "eta": args.eta, "n": args.n,
              "rng_seed": 0}
    try:
        eta = Positioning.parse(args.eta) if args.eta else None
    except ValueError as exc:
        raise InputError(f"eta: {exc}") from None
    if eta is not None and eta.kind == "random":
        config["rng_seed"] = eta.seed
    n = args.n
    if args.action in ("pi", "q", "roundtrip") and (eta is None or n is None or n < 1):
        raise InputError(f"positioning {args.action} needs --eta and --n >= 1")
    try:
        if args.action == "pi":
            rep = Report(config, ["j", "pi", "pi_inverse"], args.format)
            perm = pi_prefix(eta, n)
            for j in range(1, n + 1):
                rep.row(j, perm.forward[j - 1], perm.inverse[j - 1])
        elif args.action == "q":
            rep = Report(config, ["n", "q"], args.format)
            for k, q in enumerate(q_sequence(eta, n), start=1):
                rep.row(k, str(q.to_fraction()))
        elif args.action == "from-ranks":
            if not args.ranks:
                raise InputError("from-ranks needs --ranks")
            from fractions import Fraction

            try:
                ranks = [Fraction(v.strip()) for v in args.ranks.split(",") if v.strip()]
            except ValueError as exc:
                raise InputError(f"ranks: {exc}") from None
            config["ranks"] = args.ranks
            rep = Report(config, ["n", "d"], args.format)
            d = positioning_from_ranks(ranks).prefix(len(ranks))
            for k, dk in enumerate(d, start=1):
                rep.row(k, dk)
        else:
            rep = Report(config, ["check", "n", "result"], args.format)
            target = eta.prefix(n)
            via_pi = positioning_from_pi(pi_prefixes(eta, n)).prefix(n)
            via_q = positioning_from_ranks(q_sequence(eta, n)).prefix(n)
            for name, got in (("pi", via_pi), ("q", via_q)):
                ok = got == target
                rep.row(name, n, "PASS" if ok else "FAIL")
                if not ok:
                    rep.fail(f"{name} roundtrip differs")
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return rep


def cmd_seed(args):
    seed, seed_doc = _seed_from(args, {})
    w, wspec = _weight(args, {})
    p = _positive(args.p, "p")
    config = {"command": "seed", "action": args.action, "seed": seed_doc, "weight": wspec,
              "p": p, "tol": args.tol, "max_terms": args.max_terms, "rng_seed": 0}
    if seed.eta.kind == "random":
        config["rng_seed"] = seed.eta.seed
    try:
        if args.action == "em":
            ms = _int_list(args.m or "0..2")
            config["m"] = ms
            rep = Report(config, ["m", "lower", "upper"], args.format)
            for m in ms:
                e = e_tail(seed, m, w, p, tol=args.tol, max_terms=args.max_terms)
                rep.row(m, e.lower, e.upper)
        elif args.action == "phi":
            ns = _int_list(args.n or "1..5")
            config["n"] = ns
            rep = Report(config, ["n", "lower", "upper"], args.format)
            for n in ns:
                v = fundamental_function(seed, n, w, p, tol=args.tol, max_terms=args.max_terms)
                rep.row(n, v.lower, v.upper)
        else:
            K = args.K if args.K is not None else 2
            config["K"] = K
            rep = Report(config, ["block", "pos", "coef"], args.format)
            blocks = block_sequence_Q(seed, K, tol=args.tol, max_terms=args.max_terms, p=p)
            rep.documents = [b.to_doc() for b in blocks.blocks]
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return rep


def _experiment_config(args):
    cfg = _load_json(args.config) if args.config else {}
    if not isinstance(cfg, dict):
        raise InputError("experiment config must be a JSON object")
    return cfg


def cmd_experiment(args):
    cfg = _experiment_config(args)
    w, wspec = _weight(args, cfg)
    p = _positive(_pick(args, cfg, "p", 1.0), "p")
    seed, seed_doc = _seed_from(args, cfg)
    config = {"command": "experiment", "kind": args.kind, "weight": wspec, "p": p,
              "seed": seed_doc, "rng_seed": int(_pick(args, cfg, "rng_seed", 0))}
    try:
        handler = {"steve1": _exp_steve, "steve2": _exp_steve, "nonsym": _exp_nonsym,
                   "linf": _exp_linf, "tree": _exp_tree}[args.kind]
        return handler(args, cfg, config, seed, w, p)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _exp_steve(args, cfg, config, seed, w, p):
    from .experiments import AverageFamily

    ns = _int_list(_pick(args, cfg, "n", "1,4,16,64,256"))
    vec_path = _pick(args, cfg, "vector", None)
    if isinstance(vec_path, dict):
        x = SparseVector.from_doc(vec_path)
    elif vec_path:
        x = _load_vector(vec_path)
    else:
        x = SparseVector.unit(0)
    config.update({"n": ns, "vector": x.to_doc()})
    rep = Report(config, ["n", "norm", "limit", "gap"], args.format)
    if args.kind == "steve1":
        family = AverageFamily(seed, w, p, offset=lambda n: -n)
        table = steve1_run(x, ns, w, p, family=family, threads=args.threads)
    else:
        family = AverageFamily(seed, w, p, offset=0)
        table = steve2_run(x, ns, w, p, family=family, threads=args.threads)
    for n, v in table.rows:
        rep.row(n, v, table.limit, v - table.limit)
    rep.summary.update({"limit": table.limit, "bound": table.bound, "final_gap": table.final_gap})
    if not table.bound_ok:
        rep.fail(f"{table.bound} bound violated")
    tol = _pick(args, cfg, "tol", None)
    if tol is not None:
        config["tol"] = float(tol)
        if table.final_gap > float(tol):
            rep.fail(f"final gap {table.final_gap!r} exceeds {tol}")
    return rep


def _exp_nonsym(args, cfg, config, seed, w, p):
    k = int(_pick(args, cfg, "k", 2))
    eps = _positive(_pick(args, cfg, "eps", 0.5), "eps")
    n_cap = int(_pick(args, cfg, "n_cap", 4096))
    config.update({"k": k, "eps": eps, "n_cap": n_cap})
    rep = Report(config, ["step", "n", "forward_norm_p", "reverse_norm"], args.format)
    try:
        witness = nonsym_search(seed, eps, k, w, p, n_cap=n_cap)
        ok = witness.satisfied()
        if not ok:
            rep.fail("returned witness violates its inequalities")
    except SearchExhausted as exc:
        witness = exc.partial
        rep.fail(str(exc))
    for step, n in enumerate(witness.n, start=1):
        e = [r for r in witness.log if r["step"] == step and r["n"] == n][-1]
        rep.row(step, n, e["forward_norm_p"], e["reverse_norm"])
    rep.summary.update({"n": list(witness.n), "forward_norm_p": witness.forward_norm_p,
                        "reverse_norm": witness.reverse_norm,
                        "forward_target": k - eps, "reverse_target": 1 + eps})
    return rep


def _exp_linf(args, cfg, config, seed, w, p):
    k = int(_pick(args, cfg, "k", 4))
    eps = _positive(_pick(args, cfg, "eps", 0.25), "eps")
    samples = int(_pick(args, cfg, "samples", 1000))
    n_cap = int(_pick(args, cfg, "n_cap", 4096))
    config.update({"k": k, "eps": eps, "samples": samples, "n_cap": n_cap})
    rep = Report(config, ["j", "n", "support", "window_lo", "window_hi"], args.format)
    try:
        report = linf_witness(seed, eps, k, w, p, samples=samples, rng_seed=config["rng_seed"],
                              n_cap=n_cap, threads=args.threads)
    except SearchExhausted as exc:
        rep.fail(str(exc))
        return rep
    for j, (n, v) in enumerate(zip(report.n, report.vectors), start=1):
        rep.row(j, n, len(v), f"1/{1 << j}", f"1/{1 << (j - 1)}" if j > 1 else "1")
    rep.summary.update({"checks": report.checks, "min_ratio": report.min_ratio,
                        "max_ratio": report.max_ratio, "violations": report.violations[:10]})
    if not report.passed:
        rep.fail(f"{len(report.violations)} sampled vectors violate the bounds")
    return rep


def _nested(a, b):
    return all(not (x == "1" and y == "0") for x, y in zip(a, b))


def _exp_tree(args, cfg, config, seed, w, p):
    K = int(_pick(args, cfg, "depth", 3))
    branches = _pick(args, cfg, "branches", "111,000")
    if isinstance(branches, str):
        branches = [b.strip() for b in branches.split(",") if b.strip()]
    eps0 = _positive(_pick(args, cfg, "eps", 1.0), "eps")
    m0 = int(_pick(args, cfg, "m0", 1))
    m_cap = int(_pick(args, cfg, "m_cap", 1 << 16))
    support_cap = int(_pick(args, cfg, "support_cap", 2304))
    config.update({"depth": K, "branches": branches, "eps": eps0, "m0": m0, "m_cap": m_cap,
                   "support_cap": support_cap})
    try:
        state = tree_build(K, seed, p, w, eps0=eps0, m0=m0, branches=branches,
                           support_cap=support_cap, m_cap=m_cap)
    except SearchExhausted as exc:
        rep = Report(config, [], args.format)
        rep.fail(str(exc))
        return rep
    cols = ["branch", "level", "bit", "m", "eps", "A", "B", "phi_lower", "phi_upper", "bound",
            "status"]
    rep = Report(config, cols, args.format)
    undecided = []
    for b in branches:
        r = branch_report(state, b)
        for row in r["rows"]:
            k = row["level"]
            rep.row(b, k, row["bit"], row["m"], state.eps[k], state.A[k], state.B[k],
                    row["phi_lower"], row["phi_upper"], row["bound"], row["status"])
            if row["status"] == "fail":
                rep.fail(f"branch {b} level {k}: {row['bound']}_{k} bound")
            elif row["status"] == "undecided":
                undecided.append(f"branch {b} level {k}")
        for t in r["tails"]:
            if not t["ok"]:
                rep.fail(f"branch {b} level {t['level']}: tail bound")
        if not r["sum_ok"]:
            rep.fail(f"branch {b}: node p-power budget")
    invariants = tree_separation_check(state, (branches[0], branches[0]))["invariants"] \
        if branches else []
    for name, ok, detail in invariants:
        if not ok:
            rep.fail(f"{name} ({detail})")
    domination = []
    for a in branches:
        for b in branches:
            if a != b and _nested(a, b):
                for row in domination_check(state, a, b):
                    domination.append({"small": a, "large": b, "n": row["n"],
                                       "status": row["status"]})
                    if row["status"] == "fail":
                        rep.fail(f"domination {a} <= {b} at n={row['n']}")
                    elif row["status"] == "undecided":
                        undecided.append(f"domination {a} <= {b} at n={row['n']}")
    rep.summary.update({
        "m": state.m, "eps": state.eps, "n": state.n,
        "A_over_B": [a / b if math.isfinite(b) else None for a, b in zip(state.A, state.B)],
        "forward_ok": [t.forward_ok for t in state.tuples],
        "invariants_checked": len(invariants),
        "domination_rows": len(domination),
        "undecided": undecided,
    })
    return rep


def cmd_corpus(args):
    rng = np.random.default_rng(args.rng_seed)
    config = {"command": "corpus", "count": args.count, "max_support": args.max_support,
              "rng_seed": args.rng_seed}
    rep = Report(config, [], "json-lines")
    for _ in range(args.count):
        size = int(rng.integers(0, args.max_support + 1))
        pos = sorted(set(int(v) for v in rng.integers(1, 4 * args.max_support + 1, size=size)))
        coefs = rng.normal(size=len(pos))
        rep.documents.append(SparseVector(zip(pos, coefs.tolist())).to_doc())
    return rep


# -- parser -------------------------------------------------------------------

def _common(sub, weight=True, p=True):
    if weight:
        sub.add_argument("--weight", default=None, help="weight spec, e.g. power:1 (default)")
    if p:
        sub.add_argument("--p", type=float, default=None, help="exponent p (default 1)")
    sub.add_argument("--format", choices=["csv", "json-lines"], default="csv")
    sub.add_argument("--output", "-o", default=None, help="write here instead of stdout")


def _seed_options(sub):
    sub.add_argument("--seed-doc", default=None, help="seed document (JSON file)")
    sub.add_argument("--coefs", default=None, help="finite coefficients, e.g. 1,0.1")
    sub.add_argument("--power", default=None, help="power-law coefficients c,beta")
    sub.add_argument("--eta", default=None, help="positioning, e.g. trivial or random:42")


def build_parser():
    parser = argparse.ArgumentParser(prog="garling", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"garling {__version__}")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default from GARLING_THREADS, else 1)")
    cmds = parser.add_subparsers(dest="command", required=True)

    sub = cmds.add_parser("norm", help="norms of a vector document")
    sub.add_argument("vector")
    sub.add_argument("--space", choices=["garling", "lorentz", "lp", "sup", "all"],
                     default="garling")
    _common(sub)
    sub.set_defaults(func=cmd_norm)

    sub = cmds.add_parser("positioning", help="permutation prefixes and dyadic placements")
    sub.add_argument("action", choices=["pi", "q", "from-ranks", "roundtrip"])
    sub.add_argument("--eta", default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--ranks", default=None, help="comma-separated distinct values")
    _common(sub, weight=False, p=False)
    sub.set_defaults(func=cmd_positioning)

    sub = cmds.add_parser("seed", help="tail quantities, fundamental function, blocks")
    sub.add_argument("action", choices=["em", "phi", "blocks"])
    sub.add_argument("--m", default=None, help="indices, e.g. 0..2 or 0,3")
    sub.add_argument("--n", default=None, help="indices, e.g. 1..5")
    sub.add_argument("--K", type=int, default=None)
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.add_argument("--max-terms", type=int, default=4096)
    _seed_options(sub)
    _common(sub)
    sub.set_defaults(func=cmd_seed)

    sub = cmds.add_parser("experiment", help="block-average constructions")
    sub.add_argument("kind", choices=["steve1", "steve2", "nonsym", "linf", "tree"])
    sub.add_argument("--config", default=None, help="JSON config; flags override it")
    sub.add_argument("--k", type=int, default=None)
    sub.add_argument("--eps", type=float, default=None)
    sub.add_argument("--n", default=None, help="n values for steve runs, e.g. 1,4,16")
    sub.add_argument("--vector", default=None, help="vector document x for steve runs")
    sub.add_argument("--tol", type=float, default=None, help="required final gap for steve runs")
    sub.add_argument("--samples", type=int, default=None)
    sub.add_argument("--n-cap", dest="n_cap", type=int, default=None)
    sub.add_argument("--depth", type=int, default=None)
    sub.add_argument("--branches", default=None, help="bit strings, e.g. 111,000,101")
    sub.add_argument("--m0", type=int, default=None)
    sub.add_argument("--m-cap", dest="m_cap", type=int, default=None)
    sub.add_argument("--support-cap", dest="support_cap", type=int, default=None)
    sub.add_argument("--rng-seed", dest="rng_seed", type=int, default=None)
    _seed_options(sub)
    _common(sub)
    sub.set_defaults(func=cmd_experiment)

    sub = cmds.add_parser("corpus", help="random vector documents for tests")
    sub.add_argument("--count", type=int, default=100)
    sub.add_argument("--max-support", type=int, default=ORACLE_SUPPORT)
    sub.add_argument("--rng-seed", dest="rng_seed", type=int, default=0)
    sub.add_argument("--output", "-o", default=None)
    sub.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "p", None) is None and args.command in ("norm", "seed"):
        args.p = 1.0
    try:
        rep = args.func(args)
        text = rep.render()
    except InputError as exc:
        print(f"garling: error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"garling: error: {args.output}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
