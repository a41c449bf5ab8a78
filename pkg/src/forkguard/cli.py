"""Command-line entry point.

Exit codes: 0 success, 2 invalid arguments, 3 I/O failure, 4 numerical or
diagnostic failure. Every output starts with a ``#`` header line echoing
the version, command, parameters and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .collusion_detector import (
    decide,
    episode_features,
    evaluate,
    fit_episodes,
    load_model,
    model_to_dict,
    predict,
    save_model,
)
from .consortium_sim import (
    TraceError,
    dumps_trace,
    estimate_risk_monte_carlo,
    generate_dataset,
    load_scenario_config,
    read_trace,
    scenario_from_dict,
)
from .payoff_game import AttackStake, attacker_payoff, expected_attack_payoff
from .race_math import (
    DEFAULT_N_CAP,
    HashratePartition,
    double_spend_risk,
    double_spend_risk_series,
    min_confirmations,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4
ROSENFELD_Q = (0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45)
ROSENFELD_EPS = (0.1, 0.01, 0.001)


class UsageError(Exception):
    pass


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _header(command, params, seed):
    echo = {k: v for k, v in sorted(params.items()) if k not in ("func", "command", "workers", "output", "format")}
    seed = "none" if seed is None else seed
    return f"# forkguard {__version__} command={command} seed={seed} params={json.dumps(echo, sort_keys=True)}\n"


def _emit(args, columns, rows):
    """Write ``rows`` as CSV or JSON to ``--output`` (stdout by default)."""
    head = _header(args.command, vars(args), getattr(args, "seed", None))
    if args.format == "structured":
        body = json.dumps([dict(zip(columns, r)) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
        body = buf.getvalue()
    _write(args.output, head + body)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# argument parsing helpers


def _prob(flag, lo_open=False, hi_open=False):
    def parse(text):
        try:
            x = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects a number, got {text!r}") from None
        lo_ok = x > 0 if lo_open else x >= 0
        hi_ok = x < 1 if hi_open else x <= 1
        if not (lo_ok and hi_ok):
            lb = "(" if lo_open else "["
            rb = ")" if hi_open else "]"
            raise argparse.ArgumentTypeError(f"{flag} must lie in {lb}0, 1{rb}, got {x}")
        return x
    return parse


def _int_range(text):
    """``"4"`` or ``"1..6"``."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"range must satisfy 1 <= A <= B, got {text!r}")
    return list(range(lo, hi + 1))


def _eps_list(text):
    parse = _prob("--eps", lo_open=True, hi_open=True)
    return [parse(x) for x in text.split(",") if x]


def _positive_int(flag, minimum=1):
    def parse(text):
        try:
            x = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects an integer, got {text!r}") from None
        if x < minimum:
            raise argparse.ArgumentTypeError(f"{flag} must be >= {minimum}, got {x}")
        return x
    return parse


def _nonneg(flag):
    def parse(text):
        try:
            x = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects a number, got {text!r}") from None
        if x < 0:
            raise argparse.ArgumentTypeError(f"{flag} must be non-negative, got {x}")
        return x
    return parse


def _default_seed():
    env = os.environ.get("FORKGUARD_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"FORKGUARD_SEED must be an integer, got {env!r}") from None


def _split(q):
    return HashratePartition.from_attacker(q)


# --------------------------------------------------------------------------
# commands


def cmd_risk(args):
    split = _split(args.q)
    rows = []
    for n in args.n:
        closed = double_spend_risk(n, split)
        if split.attacker_majority:
            series = diff = None
        else:
            series = double_spend_risk_series(n, split, args.tail_tol)
            diff = closed - series
        rows.append((args.q, n, closed, series, diff))
    _emit(args, ["q", "n", "risk_closed_form", "risk_series", "difference"], rows)


def cmd_policy(args):
    split = _split(args.q)
    rows = []
    for eps in args.eps:
        pol = min_confirmations(split, eps, args.n_cap)
        rows.append((args.q, eps, str(pol)))
    _emit(args, ["q", "epsilon", "n_star"], rows)


def cmd_payoff(args):
    stake = AttackStake(args.v, args.o, args.B)
    split = _split(args.q)
    rows = [("step", args.q, args.v, args.o, args.B, None, None, attacker_payoff(stake, split))]
    if args.expected:
        r = double_spend_risk(args.n, split)
        rows.append(("expected", args.q, args.v, args.o, args.B, args.n, r, expected_attack_payoff(stake, split, args.n)))
    _emit(args, ["mode", "q", "v", "o", "B", "n", "risk", "payoff"], rows)


def cmd_simulate(args):
    split = _split(args.q)
    if split.p == 0.0:
        raise UsageError("argument --q: honest hashrate is zero; the race cannot terminate")
    rows = []
    for n in args.n:
        est = estimate_risk_monte_carlo(split, n, args.trials, args.lead_cutoff, args.seed, args.workers)
        closed = double_spend_risk(n, split)
        rows.append((args.q, n, args.trials, est.estimate, est.std_error, closed))
    _emit(args, ["q", "n", "trials", "estimate", "std_error", "risk_closed_form"], rows)


def cmd_gen_data(args):
    config = load_scenario_config(args.scenario)
    params, scenario = scenario_from_dict(config)
    data = generate_dataset(params, scenario, args.count, args.seed, args.workers)
    head = _header(args.command, {**vars(args), "scenario_config": config}, args.seed)
    # second header line: class summary
    summary = "# summary " + json.dumps(data.summary, sort_keys=True) + "\n"
    _write(args.output, head + summary + dumps_trace(data.episodes))
    s = data.summary
    print(
        f"episodes={s['count']} attacks={s['attack_count']} prevalence={s['prevalence']:.4f}",
        file=sys.stderr,
    )


def _slice(episodes, split, part):
    if split is None:
        return episodes
    cut = int(round(split * len(episodes)))
    return episodes[:cut] if part == "head" else episodes[cut:]


def cmd_train(args):
    episodes = _slice(read_trace(args.trace), args.split, "head")
    if not episodes:
        raise UsageError("argument --trace: no episodes to train on")
    model = fit_episodes(episodes, args.lr, args.epochs, args.seed)
    head = _header(args.command, vars(args), args.seed)
    save_model(model, args.model, head)
    loss_path = args.loss_csv or f"{args.model}.loss.csv"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["epoch", "loss"])
    for i, loss in enumerate(model.loss_curve):
        w.writerow([i, repr(loss)])
    _write(loss_path, head + buf.getvalue())
    print(json.dumps(model_to_dict(model)["training_meta"], sort_keys=True), file=sys.stderr)


def cmd_detect(args):
    model = load_model(args.model)
    episodes = read_trace(args.trace)
    if not episodes:
        raise UsageError("argument --trace: trace holds no episodes")
    X, _ = episode_features(episodes, model.training_meta.median_v)
    probs = predict(model, X)
    rows = []
    cancels = 0
    for i, (ep, pr) in enumerate(zip(episodes, probs)):
        verdict = decide(float(pr), args.threshold)
        cancels += verdict.decision.value == "CancelAndRetry"
        rows.append((i, ep.seed, verdict.attack_probability, verdict.decision.value, verdict.threshold_used))
    _emit(args, ["index", "seed", "attack_probability", "decision", "threshold"], rows)
    print(f"episodes={len(rows)} cancel_rate={cancels / len(rows):.4f}", file=sys.stderr)


def cmd_evaluate(args):
    model = load_model(args.model)
    episodes = _slice(read_trace(args.trace), args.split, "tail")
    if not episodes:
        raise UsageError("argument --trace: no episodes to evaluate")
    X, y = episode_features(episodes, model.training_meta.median_v)
    m = evaluate(model, X, y, args.threshold)
    rows = [
        ("accuracy", m.accuracy), ("precision", m.precision), ("recall", m.recall), ("auc", m.auc),
        ("tp", m.tp), ("fp", m.fp), ("tn", m.tn), ("fn", m.fn),
    ]
    _emit(args, ["metric", "value"], rows)


def cmd_report(args):
    if args.table == "rosenfeld":
        rows = []
        for q in args.q_grid or ROSENFELD_Q:
            split = _split(q)
            for eps in ROSENFELD_EPS:
                rows.append((q, eps, str(min_confirmations(split, eps, DEFAULT_N_CAP))))
        _emit(args, ["q", "epsilon", "n_star"], rows)
    else:
        rows = []
        for q in args.q_grid or ROSENFELD_Q:
            split = _split(q)
            for n in args.n:
                rows.append((q, n, double_spend_risk(n, split)))
        _emit(args, ["q", "n", "risk"], rows)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "structured"), default="csv", help="output format")
    common.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=None, help="root seed (falls back to $FORKGUARD_SEED, then 0)")
    threaded = argparse.ArgumentParser(add_help=False)
    threaded.add_argument("--workers", type=_positive_int("--workers"), default=1, help="worker threads; results do not depend on it")

    parser = argparse.ArgumentParser(prog="forkguard", description="Majority-attack risk, simulation and collusion detection.")
    parser.add_argument("--version", action="version", version=f"forkguard {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("risk", parents=[common], help="double-spend risk r(n, q), closed form vs series")
    p.add_argument("--q", type=_prob("--q"), required=True, help="attacker hashrate share")
    p.add_argument("--n", type=_int_range, default=list(range(1, 11)), help="confirmations, N or A..B (default 1..10)")
    p.add_argument("--tail-tol", type=_prob("--tail-tol", True, True), default=1e-12, help="series truncation mass")
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("policy", parents=[common], help="minimum confirmations for risk ceilings")
    p.add_argument("--q", type=_prob("--q"), required=True, help="attacker hashrate share")
    p.add_argument("--eps", type=_eps_list, default=list(ROSENFELD_EPS), help="comma-separated ceilings in (0, 1)")
    p.add_argument("--n-cap", type=_positive_int("--n-cap"), default=DEFAULT_N_CAP, help="search bound on n")
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("payoff", parents=[common], help="attacker payoff for a stake")
    p.add_argument("--v", type=_nonneg("--v"), required=True, help="commodity value")
    p.add_argument("--o", type=_positive_int("--o", 0), default=0, help="attacker-mined blocks at risk")
    p.add_argument("--B", type=_nonneg("--B"), default=0.0, help="value per block")
    p.add_argument("--q", type=_prob("--q"), required=True, help="attacker hashrate share")
    p.add_argument("--expected", action="store_true", help="also report the risk-weighted payoff")
    p.add_argument("--n", type=_positive_int("--n"), default=1, help="confirmations for --expected")
    p.set_defaults(func=cmd_payoff)

    p = sub.add_parser("simulate", parents=[common, seeded, threaded], help="Monte Carlo double-spend risk")
    p.add_argument("--q", type=_prob("--q"), required=True, help="attacker hashrate share")
    p.add_argument("--n", type=_int_range, default=[1], help="confirmations, N or A..B")
    p.add_argument("--trials", type=_positive_int("--trials", 100), default=100_000, help="races per n (>= 100)")
    p.add_argument("--lead-cutoff", type=_positive_int("--lead-cutoff", 50), default=200, help="honest lead declaring failure")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-data", parents=[common, seeded, threaded], help="generate a labelled episode trace")
    p.add_argument("--scenario", default="default", help="scenario JSON file, or 'default'")
    p.add_argument("--count", type=_positive_int("--count"), default=10_000, help="number of episodes")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", parents=[seeded], help="fit the attack classifier on a trace")
    p.add_argument("--trace", required=True, help="episode trace (JSONL)")
    p.add_argument("--model", required=True, help="model file to write")
    p.add_argument("--loss-csv", default=None, help="loss curve CSV (default: <model>.loss.csv)")
    p.add_argument("--lr", type=float, default=1.0, help="learning rate")
    p.add_argument("--epochs", type=_positive_int("--epochs"), default=3000, help="gradient steps")
    p.add_argument("--split", type=_prob("--split", True, True), default=None, help="train on this leading fraction")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("detect", parents=[common], help="approve/cancel verdict for every episode in a trace")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--trace", required=True, help="episode trace (JSONL)")
    p.add_argument("--threshold", type=_prob("--threshold"), default=0.5, help="cancel when probability >= threshold")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", parents=[common], help="classifier metrics on a labelled trace")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--trace", required=True, help="episode trace (JSONL)")
    p.add_argument("--threshold", type=_prob("--threshold"), default=0.5, help="decision threshold")
    p.add_argument("--split", type=_prob("--split", True, True), default=None, help="evaluate the trailing part after this fraction")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", parents=[common], help="plot-ready confirmation tables and risk curves")
    p.add_argument("--table", choices=("rosenfeld", "risk-curve"), default="rosenfeld", help="which table")
    p.add_argument("--q-grid", type=lambda t: [_prob("--q-grid")(x) for x in t.split(",")], default=None, help="comma-separated q values")
    p.add_argument("--n", type=_int_range, default=list(range(1, 31)), help="n range for risk-curve")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        args.func(args)
    except UsageError as exc:
        print(f"forkguard {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FloatingPointError, RuntimeError, ArithmeticError) as exc:
        print(f"forkguard {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, TraceError, json.JSONDecodeError) as exc:
        print(f"forkguard {args.command}: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"forkguard {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
