"""Command-line driver: bounds, certification, optimisation and clique demos."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import __version__
from .bounds import (
    ExponentStage,
    MulticolorTarget,
    cor_easy2_bound,
    cor_easy_bound,
    correction,
    crossover_exponent,
    crossover_root,
    diagonal_base,
    es_bound,
    es_product_bound,
    golden_optimal_p,
    main_theorem_bound,
    stage_profile,
    thm_easy2_bound,
    thm_easy_bound,
)
from .clique import Coloring, SizePreconditionError, descend, ramsey_exact, witness_validate
from .exact import DEFAULT_PREC, DomainError, ExactReal, format_decimal, to_fraction
from .optimizer import run_iteration
from .region import ES_ALPHA, ProvenAlpha
from .verifier import FAIL, INCONCLUSIVE, PAPER_CHAIN, PASS, VerificationPolicy, exponent_text, verify_chain, verify_stage

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
STATUS_EXIT = {PASS: EXIT_OK, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}
METHODS = ("es", "es-product", "thm-easy", "cor-easy", "main-exponent", "multicolor")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    precision: int = DEFAULT_PREC
    format: str = "text"
    output: str | None = None
    seed: int = 0

    @classmethod
    def from_args(cls, args) -> RunConfig:
        return cls(args.precision, args.format, args.output, args.seed)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str):
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _real(v: ExactReal) -> dict:
    out = {"value": str(v)}
    if v.log_value is not None:
        out["log_value"] = format_decimal(v.log_value, v.precision)
    return out


def _plain(v, digits=17) -> str:
    return mpmath.nstr(v, digits, min_fixed=-6, max_fixed=8)


def _table_text(header, rows) -> str:
    cols = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(header))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cols)


def _render(cfg: RunConfig, payload: dict, header, rows, extra_text="") -> str:
    if cfg.format == "json":
        return dumps_json(payload)
    if cfg.format == "csv":
        return dumps_csv(header, rows)
    return _table_text(header, rows) + extra_text


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _policy(args) -> VerificationPolicy:
    return VerificationPolicy(
        psi_floor_main=to_fraction(args.psi_floor),
        psi_prime_floor=to_fraction(args.psi_prime_floor),
        lambda_min=to_fraction(args.lambda_min),
        max_depth=args.max_depth,
        precision=args.precision,
        samples=args.samples,
    )


def cmd_verify(args) -> int:
    cfg = RunConfig.from_args(args)
    policy = _policy(args)
    single = args.alpha is not None or args.beta is not None
    if single and args.paper_chain:
        raise UsageError("--paper-chain cannot be combined with --alpha/--beta")
    if single:
        stage = ExponentStage.make(args.alpha or "0", args.beta if args.beta is not None else "0.08")
        proven = [ES_ALPHA]
        if not stage.alpha.is_zero():
            # a lone stage has no predecessor to prove its alpha; take it as given
            proven.append(ProvenAlpha(stage.alpha, provenance=-1))
        rep = verify_stage(stage, proven, policy)
        payload = rep.to_json(include_time=not args.no_time)
        base = diagonal_base(stage, policy.precision)
        payload["diagonal_base"] = _real(base)
        status = rep.status
        rows = [[stage.label(), rep.status, payload["certified_margins"].get("psi_main") or "-",
                 payload["certified_margins"].get("psi_prime_near_zero") or "-"]]
        extra = f"diagonal base: {base}\n"
        if rep.witness:
            extra += f"witness: {json.dumps(rep.witness, sort_keys=True)}\n"
    else:
        chain = verify_chain(PAPER_CHAIN, policy)
        payload = chain.to_json(include_time=not args.no_time)
        status = chain.status
        rows = [
            [r.stage.label(), r.status, r.to_json(False)["certified_margins"].get("psi_main") or "-",
             r.to_json(False)["certified_margins"].get("psi_prime_near_zero") or "-"]
            for r in chain.stages
        ]
        extra = f"chain: {chain.status}\n"
        if chain.final_base is not None:
            extra += f"diagonal base: {chain.final_base}\nexponent: {chain.exponent}\n"
    header = ["stage", "status", "psi_main_margin", "psi_prime_margin"]
    _emit(cfg, _render(cfg, payload, header, rows, extra))
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(dumps_json(payload))
    return STATUS_EXIT[status]


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------


def _parse_parts(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--l-parts expects comma-separated integers, got {text!r}") from None


def _log_ratio(v, es: int, prec: int) -> str:
    with mpmath.workprec(prec):
        log_v = mpmath.log(v) if isinstance(v, int) else v.log_value
        return format_decimal(log_v - mpmath.log(es), prec)


def cmd_bound(args) -> int:
    cfg = RunConfig.from_args(args)
    prec = args.precision
    k = args.k
    if args.l_parts is not None:
        target = MulticolorTarget.of(_parse_parts(args.l_parts))
        methods = [args.method or "multicolor"]
        if methods != ["multicolor"]:
            raise UsageError("--l-parts only supports --method multicolor")
    else:
        target = None
        methods = [args.method] if args.method else [m for m in METHODS if m != "multicolor"]
    l = args.l if target is None else target.total
    results = []

    def add(name, value, es=None):
        row = {"method": name}
        if isinstance(value, int):
            row.update(value=str(value), log_value=format_decimal(mpmath.log(value), prec))
        else:
            row.update(_real(value))
        row["log_ratio_to_es"] = None if es is None else _log_ratio(value, es, prec)
        results.append(row)

    es = None if target is not None else es_bound(k, l)
    for m in methods:
        if m == "multicolor":
            tgt = target if target is not None else MulticolorTarget.of(l)
            p = to_fraction(args.p) if args.p is not None else golden_optimal_p(k, tgt.total)
            add("thm-easy2", thm_easy2_bound(k, tgt, p, prec))
            add("cor-easy2", cor_easy2_bound(k, tgt, prec))
        elif m == "es":
            add("es", es, es)
        elif m == "es-product":
            x = to_fraction(args.x) if args.x is not None else Fraction(k, k + l)
            add("es-product", es_product_bound(k, l, x, prec), es)
        elif m == "thm-easy":
            p = to_fraction(args.p) if args.p is not None else golden_optimal_p(k, l)
            add("thm-easy", thm_easy_bound(k, l, p, prec), es)
        elif m == "cor-easy":
            if l > k:
                if args.method:
                    cor_easy_bound(k, l, prec)  # raises with the violated precondition
                continue
            add("cor-easy", cor_easy_bound(k, l, prec), es)
        elif m == "main-exponent":
            if l > k:
                if args.method:
                    main_theorem_bound(k, l, to_fraction(args.beta), prec)
                continue
            beta = to_fraction(args.beta)
            add("main-exponent", main_theorem_bound(k, l, beta, prec), es)
            stage = ExponentStage(PAPER_CHAIN[-1][0], beta, len(PAPER_CHAIN) - 1)
            base = diagonal_base(stage, prec)
            with mpmath.workprec(prec):
                g = correction(mpmath.mpf(l) / k, beta, prec)
            results[-1]["form"] = f"exp({_plain(g)} k) * C(k+l, l), G(l/k) per k; {exponent_text(beta)}"
            results[-1]["diagonal_base"] = str(base)
    payload = {"k": k, "l": l, "parts": list(target) if target else None, "bounds": results}
    header = ["method", "value", "log_value", "log_ratio_to_es"]
    rows = [[r["method"], r["value"], r["log_value"], r["log_ratio_to_es"] or ""] for r in results]
    extra = "".join(f"{r['method']}: {r['form']}\ndiagonal base: {r['diagonal_base']}\n" for r in results if "form" in r)
    _emit(cfg, _render(cfg, payload, header, rows, extra))
    return EXIT_OK


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

TABLE_COLUMNS = ["lambda", "F", "Fprime", "M", "X", "Y", "branch", "psi", "G", "ratio_to_es", "cor_easy_exponent"]


def table_rows(stage: ExponentStage, step: Fraction, prec: int) -> list[list[str]]:
    """One row per lambda = step, 2 step, ... <= 1.

    ``ratio_to_es`` is e^G(lambda), the per-k factor by which the stage
    exponent undercuts the entropy baseline; ``cor_easy_exponent`` is the
    per-k log ratio of the two-color corollary bound to that baseline.
    """
    rows = []
    for i in range(1, int(1 / step) + 1):
        lam = step * i
        pr = stage_profile(stage, lam, prec)
        with mpmath.workprec(prec):
            rows.append(
                [_fraction_plain(lam)]
                + [_plain(v) for v in (pr.F, pr.Fprime, pr.M, pr.X, pr.Y)]
                + [str(pr.branch), _plain(pr.psi), _plain(pr.G), _plain(mpmath.exp(pr.G)),
                   _plain(crossover_exponent(lam, prec))]
            )
    return rows


def _fraction_plain(q: Fraction) -> str:
    return _plain(mpmath.mpf(q.numerator) / q.denominator, 12)


def cmd_table(args) -> int:
    cfg = RunConfig.from_args(args)
    step = to_fraction(args.grid)
    if not 0 < step <= 1:
        raise UsageError("--grid must lie in (0, 1]")
    if args.alpha is not None or args.beta is not None:
        stage = ExponentStage.make(args.alpha or "0", args.beta or "0.08")
    else:
        if not 0 <= args.stage < len(PAPER_CHAIN):
            raise UsageError(f"--stage must lie in 0..{len(PAPER_CHAIN) - 1}")
        stage = ExponentStage.make(*PAPER_CHAIN[args.stage], args.stage)
    rows = table_rows(stage, step, args.precision)
    if cfg.format == "json":
        text = dumps_json({"stage": {"alpha": str(stage.alpha), "beta": str(stage.beta)},
                           "columns": TABLE_COLUMNS, "rows": rows, "precision": args.precision})
    elif cfg.format == "csv":
        text = dumps_csv(TABLE_COLUMNS, rows)
    else:
        text = _table_text(TABLE_COLUMNS, [[c[:12] for c in r] for r in rows])
    _emit(cfg, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# optimize / crossover
# ---------------------------------------------------------------------------


def cmd_optimize(args) -> int:
    cfg = RunConfig.from_args(args)
    trace = run_iteration(args.stages, args.resolution, _policy(args))
    payload = trace.to_json(include_time=not args.no_time)
    rows = [[s.index, str(s.alpha), payload["stages"][i]["beta"], r.status]
            for i, (s, r) in enumerate(zip(trace.stages, trace.reports))]
    extra = f"stop: {trace.stop_reason}\ndiagonal base: {trace.final_base}\n"
    _emit(cfg, _render(cfg, payload, ["stage", "alpha", "beta", "status"], rows, extra))
    return EXIT_OK if trace.stop_reason != "verification_failure" else EXIT_FAIL


def cmd_crossover(args) -> int:
    cfg = RunConfig.from_args(args)
    root = crossover_root(prec=args.precision)
    payload = {"crossover": str(root)}
    _emit(cfg, _render(cfg, payload, ["quantity", "value"], [["crossover", str(root)]]))
    return EXIT_OK


# ---------------------------------------------------------------------------
# clique demo / exact Ramsey numbers
# ---------------------------------------------------------------------------


def cmd_clique_demo(args) -> int:
    cfg = RunConfig.from_args(args)
    parts = _parse_parts(args.l_parts) if args.l_parts else (args.l,)
    p = to_fraction(args.p)
    need = math.ceil(thm_easy2_bound(args.k, parts, p).value)
    n = args.n or need
    rng = np.random.default_rng(args.seed)
    c = len(parts)
    red = float(to_fraction(args.red_density))
    weights = [red] + [(1 - red) / c] * c
    g = Coloring.random(n, rng, weights, c)
    trace: list = []
    try:
        w = descend(g, args.k, parts, p, seed=args.seed, trace=trace, enforce_size=n >= need)
    except SizePreconditionError as exc:  # guarded above
        raise DomainError(str(exc)) from exc
    ok = witness_validate(g, w)
    payload = {
        "n": n,
        "required_n": need,
        "k": args.k,
        "targets": list(parts),
        "p": str(p),
        "seed": args.seed,
        "witness": w.to_json(),
        "valid": ok,
        "steps": len(trace),
    }
    rows = [[w.kind, w.color, " ".join(map(str, w.vertices)), ok]]
    extra = f"n = {n} (theorem size {need}), seed = {args.seed}, descent steps: {len(trace)}\n"
    _emit(cfg, _render(cfg, payload, ["kind", "color", "vertices", "valid"], rows, extra))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_ramsey_exact(args) -> int:
    cfg = RunConfig.from_args(args)
    parts = _parse_parts(args.l_parts) if args.l_parts else (args.l,)
    res = ramsey_exact(args.k, parts, n_max=args.n_max)
    payload = res.to_json()
    label = f"R({args.k},{','.join(map(str, parts))})"
    _emit(cfg, _render(cfg, payload, ["quantity", "value", "survivors"],
                       [[label, str(res), " ".join(map(str, res.survivors))]]))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and config
# ---------------------------------------------------------------------------


def _common(p):
    g = p.add_argument_group("run options")
    g.add_argument("--precision", type=int, default=DEFAULT_PREC, help="working precision in bits (default: %(default)s)")
    g.add_argument("--format", choices=("text", "json", "csv"), default="text", help="output format (default: %(default)s)")
    g.add_argument("--output", default=None, help="write output to this file instead of stdout (default: stdout)")
    g.add_argument("--seed", type=int, default=0, help="random seed (default: %(default)s)")
    g.add_argument("--config", default=None, help="key = value file overriding defaults; flags override it")


def _policy_flags(p):
    d = VerificationPolicy()
    g = p.add_argument_group("verification policy")
    g.add_argument("--psi-floor", default=str(d.psi_floor_main), help="psi floor on the main region (default: %(default)s)")
    g.add_argument("--psi-prime-floor", default=str(d.psi_prime_floor), help="psi' floor near zero (default: %(default)s)")
    g.add_argument("--lambda-min", default=str(d.lambda_min), help="left end of the near-zero region (default: %(default)s)")
    g.add_argument("--max-depth", type=int, default=d.max_depth, help="bisection depth limit (default: %(default)s)")
    g.add_argument("--samples", type=int, default=d.samples, help="point samples in the pre-pass (default: %(default)s)")
    g.add_argument("--no-time", action="store_true", help="omit wall_time from JSON (default: off)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ramsey-bounds", description="Ramsey number upper bounds and their certification.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("verify", help="certify one stage or the four-stage chain",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--alpha", default=None, help="stage alpha, e.g. 0.09/e (default: chain mode)")
    p.add_argument("--beta", default=None, help="stage beta (default: chain mode)")
    p.add_argument("--paper-chain", action="store_true", help="verify the four-stage chain (the zero-flag default)")
    p.add_argument("--report", default=None, help="also write the JSON report here (default: none)")
    _policy_flags(p)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bound", help="evaluate closed-form upper bounds")
    p.add_argument("--k", type=int, default=10, help="red clique size (default: %(default)s)")
    p.add_argument("--l", type=int, default=10, help="blue clique size (default: %(default)s)")
    p.add_argument("--l-parts", default=None, help="comma-separated multicolor targets (default: none)")
    p.add_argument("--method", choices=METHODS, default=None, help="single method (default: all applicable)")
    p.add_argument("--p", default=None, help="density for thm-easy (default: optimal golden-ratio p)")
    p.add_argument("--x", default=None, help="x for es-product (default: k/(k+l))")
    p.add_argument("--beta", default="0.03", help="beta for main-exponent (default: %(default)s)")
    _common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("table", help="curve data for one stage over a lambda grid")
    p.add_argument("--grid", default="0.01", help="lambda step in (0, 1] (default: %(default)s)")
    p.add_argument("--stage", type=int, default=3, help="chain stage 0..3 (default: %(default)s)")
    p.add_argument("--alpha", default=None, help="custom stage alpha (default: from --stage)")
    p.add_argument("--beta", default=None, help="custom stage beta (default: from --stage)")
    _common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("optimize", help="search minimal betas stage by stage")
    p.add_argument("--stages", type=int, default=4, help="maximum number of stages (default: %(default)s)")
    p.add_argument("--resolution", default="0.001", help="beta grid step (default: %(default)s)")
    _policy_flags(p)
    _common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("crossover", help="lambda where the corollary bound meets the entropy baseline")
    _common(p)
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("clique-demo", help="run the constructive descent on a random coloring")
    p.add_argument("--n", type=int, default=0, help="vertices (default: 0, the theorem's size)")
    p.add_argument("--k", type=int, default=3, help="red clique size (default: %(default)s)")
    p.add_argument("--l", type=int, default=2, help="blue clique size (default: %(default)s)")
    p.add_argument("--l-parts", default=None, help="comma-separated multicolor targets (default: none)")
    p.add_argument("--p", default="13/20", help="descent density parameter (default: %(default)s)")
    p.add_argument("--red-density", default="4/5", help="red edge probability of the coloring (default: %(default)s)")
    _common(p)
    p.set_defaults(func=cmd_clique_demo)

    p = sub.add_parser("ramsey-exact", help="exact small Ramsey numbers by exhaustive search")
    p.add_argument("--k", type=int, default=3, help="red clique size (default: %(default)s)")
    p.add_argument("--l", type=int, default=3, help="blue clique size (default: %(default)s)")
    p.add_argument("--l-parts", default=None, help="comma-separated multicolor targets (default: none)")
    p.add_argument("--n-max", type=int, default=8, help="largest n searched (default: %(default)s)")
    _common(p)
    p.set_defaults(func=cmd_ramsey_exact)
    return parser


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes in keys
    map to underscores."""
    out = {}
    with open(path) as fh:
        for num, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"{path}:{num}: expected 'key = value'")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices.get(name)
    return None


def _apply_config(parser, argv):
    """Re-parse with config values installed as defaults, so flags still win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    sp = _subparser(parser, args.command)
    known = {a.dest: a for a in sp._actions}
    cfg = read_config(args.config)
    for key, value in cfg.items():
        action = known.get(key)
        if action is None or key in ("help", "config", "func"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if action.const is not None and action.nargs == 0:
            value = value.lower() in ("1", "true", "yes", "on")
        sp.set_defaults(**{key: value})
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ramsey-bounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"ramsey-bounds: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
