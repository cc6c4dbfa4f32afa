"""Command-line front end.

Subcommands map one-to-one onto library calls: ``gen`` (culture to
election file), ``eval`` (one resolute run with its tie trace),
``unique`` (tie verdict, exit status 3 when tied), ``count``,
``enumerate``, ``gadget is|matching`` (graph file to annotated election
files), ``experiment`` (config JSON to CSV plus a rendered figure), and
``pabulib-sample``.  Exit status: 0 success, 1 domain error, 2 usage
error, 3 tied.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import gadgets, sequential, simple_rules, thiele
from .cultures import CultureSpec, generate, parse_pabulib, subsample_pabulib
from .errors import ApprovaltiesError
from .experiments import (
    RULE_TAGS,
    ExperimentConfig,
    emit_csv,
    run_basic_experiment,
)
from .model import (
    Election,
    UniqueReport,
    make_weight_function,
    parse_election,
    parse_rational,
    serialize_election,
    validate_weight_function,
)
from .scores import av_scores, sav_scores

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_TIED = 3

#: Fixed default seed: reproducible output, never wall-clock derived.
DEFAULT_SEED = 42


def _read_election(path: str) -> Election:
    return parse_election(Path(path).read_text(encoding="utf-8"))


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _parse_weights(text: str):
    return validate_weight_function([parse_rational(t) for t in text.split(",")])


def _sequential_rule(tag: str, k: int) -> sequential.SequentialRule:
    if tag == "greedy-pav":
        return sequential.greedy_thiele(make_weight_function("pav", k))
    if tag == "greedy-ccav":
        return sequential.greedy_thiele(make_weight_function("cc", k))
    if tag == "phragmen":
        return sequential.PHRAGMEN
    if tag == "meqs-phase1":
        return sequential.MEQS_PHASE1
    return sequential.MEQS_FULL


def _scores_for(tag: str, election: Election):
    return av_scores(election) if tag == "av" else sav_scores(election)


def _thiele_weights(tag: str, k: int):
    return make_weight_function("cc" if tag == "ccav-exact" else "pav", k)


_SCORE_RULES = ("av", "sav")
_THIELE_RULES = ("ccav-exact", "pav-exact")


def _emit(payload: dict, text: str, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload))
    else:
        print(text, end="")


def _committee_str(committee) -> str:
    return "{" + ", ".join(str(c) for c in committee) + "}"


def _cmd_gen(args) -> int:
    if args.culture == "resampling":
        spec = CultureSpec("resampling", p=parse_rational(args.p), phi=parse_rational(args.phi))
    elif args.culture == "interval":
        spec = CultureSpec("interval", radius=args.radius)
    else:
        spec = CultureSpec("pabulib", source=args.source)
    election = generate(spec.instantiate(args.m, args.n, args.seed))
    _write_output(serialize_election(election), args.output)
    return EXIT_OK


def _cmd_eval(args) -> int:
    election = _read_election(args.election)
    tag, k = args.rule, args.k
    if tag in _SCORE_RULES:
        report = simple_rules.score_rule_unique(_scores_for(tag, election), k)
        committee, score, trace = report.witnesses[0], report.optimum, []
    elif tag in _THIELE_RULES:
        score, committee = thiele.thiele_optimum(election, _thiele_weights(tag, k), k)
        trace = []
    else:
        committee, trace = sequential.run_resolute(_sequential_rule(tag, k), election, k)
        score = None
    payload = {
        "rule": tag,
        "committee": list(committee),
        "score": None if score is None else str(score),
        "trace": [
            {"candidates": list(t.candidates), "merit": str(t.merit)} for t in trace
        ],
    }
    lines = [f"committee {_committee_str(committee)}"]
    if score is not None:
        lines.append(f"score {score}")
    lines.extend(
        f"step {i}: tie {_committee_str(t.candidates)} merit {t.merit}"
        for i, t in enumerate(trace, start=1)
    )
    _emit(payload, "\n".join(lines) + "\n", args.json)
    return EXIT_OK


def _unique_report(tag: str, election: Election, k: int) -> UniqueReport:
    if tag in _SCORE_RULES:
        return simple_rules.score_rule_unique(_scores_for(tag, election), k)
    if tag in _THIELE_RULES:
        return thiele.thiele_unique(election, _thiele_weights(tag, k), k)
    return sequential.sequential_unique(_sequential_rule(tag, k), election, k)


def _cmd_unique(args) -> int:
    election = _read_election(args.election)
    report = _unique_report(args.rule, election, args.k)
    payload = {
        "rule": args.rule,
        "verdict": report.verdict,
        "witnesses": [list(w) for w in report.witnesses],
        "optimum": None if report.optimum is None else str(report.optimum),
    }
    lines = [report.verdict.upper()]
    lines.extend(f"witness {_committee_str(w)}" for w in report.witnesses)
    _emit(payload, "\n".join(lines) + "\n", args.json)
    return EXIT_OK if report.is_unique else EXIT_TIED


def _count_and_committees(tag: str, election: Election, k: int, limit: int):
    if tag in _SCORE_RULES:
        scores = _scores_for(tag, election)
        committees = simple_rules.enumerate_score_rule_committees(scores, k, limit)
        return len(committees), committees
    if tag in _THIELE_RULES:
        committees = thiele.enumerate_thiele_winning(election, _thiele_weights(tag, k), k, limit)
        return len(committees), committees
    universe = sequential.enumerate_universes(
        _sequential_rule(tag, k), election, k, max_committees=limit
    )
    if universe.truncated:
        raise ApprovaltiesError(
            f"more than {limit} winning committees; raise --limit to enumerate them"
        )
    return len(universe.committees), sorted(universe.committees)


def _cmd_count(args) -> int:
    election = _read_election(args.election)
    if args.rule in _SCORE_RULES:
        count = simple_rules.score_rule_tally(_scores_for(args.rule, election), args.k).count
    elif args.rule in _THIELE_RULES:
        count = thiele.thiele_count(election, _thiele_weights(args.rule, args.k), args.k, args.limit)
    else:
        count, _ = _count_and_committees(args.rule, election, args.k, args.limit)
    _emit({"rule": args.rule, "count": count}, f"{count}\n", args.json)
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    election = _read_election(args.election)
    count, committees = _count_and_committees(args.rule, election, args.k, args.limit)
    payload = {"rule": args.rule, "count": count, "committees": [list(c) for c in committees]}
    text = "".join(f"{_committee_str(c)}\n" for c in committees)
    _emit(payload, text, args.json)
    return EXIT_OK


def _cmd_gadget(args) -> int:
    graph = gadgets.parse_graph(Path(args.graph).read_text(encoding="utf-8"))
    weights = _parse_weights(args.weights) if args.weights else make_weight_function(
        args.rule_weights, max(args.k + 4, 8)
    )
    if args.kind == "is":
        gadget = gadgets.gen_is_gadget(graph, args.k, weights)
        truth = gadgets.count_independent_sets(gadget.augmented, args.k)
        annotation = [
            f"# independent-set gadget, weight function {weights.name}",
            f"# committee size {gadget.committee_size}",
            f"# ground truth: optimal committees = {truth}; "
            f"unique = {'yes' if truth == 1 else 'no'}",
        ]
        text = "\n".join(annotation) + "\n" + serialize_election(gadget.election)
        _write_output(text, args.output)
        print(f"committee size {gadget.committee_size}, winning committees {truth}")
        return EXIT_OK
    gadget = gadgets.gen_matching_gadget(graph, weights)
    matchings = gadgets.count_matchings(graph, args.k)
    base = Path(args.output) if args.output else None
    annotation = [
        f"# matching gadget, ground truth: size-{args.k} matchings = {matchings}",
        f"# identity: |universes(E_p, {args.k + gadget.size_shift})| - "
        f"|universes(E, {args.k - 1 + gadget.size_shift})| = {matchings}",
    ]
    text_e = "\n".join(annotation) + "\n" + serialize_election(gadget.election)
    text_p = "\n".join(annotation) + "\n" + serialize_election(gadget.election_p)
    if base is None:
        sys.stdout.write(text_e)
        sys.stdout.write(text_p)
    else:
        path_p = base.with_name(base.stem + "_p" + base.suffix)
        base.write_text(text_e, encoding="utf-8")
        path_p.write_text(text_p, encoding="utf-8")
        print(f"wrote {base} and {path_p}; size-{args.k} matchings = {matchings}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    table = run_basic_experiment(cfg)
    csv_text = emit_csv(table, diagnostics=args.diagnostics)
    _write_output(csv_text, args.output)
    plot_path = args.plot
    if plot_path is None and args.output is not None and not args.no_plot:
        plot_path = str(Path(args.output).with_suffix(".png"))
    if plot_path is not None and not args.no_plot:
        from .plotting import render_unique_fraction_figure

        render_unique_fraction_figure(
            table, plot_path, title=f"m={cfg.m}, k={cfg.k}, {cfg.culture.describe()}"
        )
        print(f"figure written to {plot_path}", file=sys.stderr)
    return EXIT_OK


def _cmd_pabulib_sample(args) -> int:
    pb = parse_pabulib(Path(args.source).read_text(encoding="utf-8"))
    election = subsample_pabulib(pb, args.m, args.n, args.seed)
    _write_output(serialize_election(election), args.output)
    return EXIT_OK


def _add_rule_args(parser, rules=RULE_TAGS):
    parser.add_argument("--rule", required=True, choices=list(rules))
    parser.add_argument("-k", type=int, required=True, help="committee size")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("election", help="election file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="approvalties",
        description="Winning committees, tie detection and tie counting "
        "for approval-based multiwinner rules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an election from a statistical culture")
    p.add_argument("--culture", required=True, choices=["resampling", "interval", "pabulib"])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", help="approval probability (rational or decimal)")
    p.add_argument("--phi", help="resampling probability (rational or decimal)")
    p.add_argument("--radius", type=float, help="interval base radius")
    p.add_argument("--source", help="PB file or directory for the pabulib culture")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("eval", help="one resolute run with its tie trace")
    _add_rule_args(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("unique", help="tie verdict and witnesses (exit 3 when tied)")
    _add_rule_args(p)
    p.set_defaults(func=_cmd_unique)

    p = sub.add_parser("count", help="number of winning committees")
    _add_rule_args(p)
    p.add_argument("--limit", type=int, default=thiele.DEFAULT_COUNT_LIMIT)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("enumerate", help="list the winning committees")
    _add_rule_args(p)
    p.add_argument("--limit", type=int, default=10**4)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("gadget", help="generate a ground-truth election from a graph")
    p.add_argument("kind", choices=["is", "matching"])
    p.add_argument("--graph", required=True, help="graph file (p/e format)")
    p.add_argument("-k", type=int, required=True)
    p.add_argument(
        "--rule-weights",
        default="pav",
        choices=["pav", "cc"],
        help="weight function for the construction",
    )
    p.add_argument("--weights", help="custom increments, e.g. '1,1/2,1/3'")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_gadget)

    p = sub.add_parser("experiment", help="run a tie-frequency experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--output", help="CSV output path (default stdout)")
    p.add_argument("--plot", help="figure output path (default: next to the CSV)")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--workers", type=int, help="override the config's worker count")
    p.add_argument("--diagnostics", action="store_true", help="add a truncation column")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("pabulib-sample", help="sample an election from a PB file")
    p.add_argument("--source", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_pabulib_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen":
        if args.culture == "resampling" and (args.p is None or args.phi is None):
            parser.error("resampling culture needs --p and --phi")
        if args.culture == "interval" and args.radius is None:
            parser.error("interval culture needs --radius")
        if args.culture == "pabulib" and args.source is None:
            parser.error("pabulib culture needs --source")
    try:
        return args.func(args)
    except (ApprovaltiesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
