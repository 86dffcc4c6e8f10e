"""Command-line interface over the shared engine.

Exit codes: 0 success (including recorded aborts — they are outcomes,
not errors), 1 protocol/validation error, 2 storage error, 64 usage
error. Complex step payloads can be given as JSON via --json FILE or
--json - (stdin) instead of individual flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import batch as bt
from .config import load_config, store_path
from .errors import ProtocolError, ProviderFailure, StorageError
from .export import export_report
from .ledger import Store
from .serialize import session_from_payload
from .service import Engine

USAGE_EXIT = 64


def _json_arg(value: str) -> dict:
    if value == "-":
        return json.load(sys.stdin)
    with open(value, encoding="utf-8") as fh:
        return json.load(fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protorail",
        description="Run gated ideation (ghosty) and foresight (precog) protocol sessions.",
    )
    parser.add_argument("--store", help="path of the append-only store file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("session", help="create and control sessions")
    session_sub = p.add_subparsers(dest="session_command", required=True)
    new = session_sub.add_parser("new")
    new.add_argument("--protocol", required=True, choices=["ghosty", "precog"])
    new.add_argument("--theme", required=True)
    new.add_argument("--id")
    new.add_argument("--horizon", default="unspecified")
    new.add_argument("--from-precog", help="derive fragments from a finished precog session")
    new.add_argument("--select", help="comma-separated convergence ids (with --from-precog)")
    new.add_argument("--externals-json", help="JSON file with external fragments (with --from-precog)")
    for verb in ("advance", "complete", "finalize", "show"):
        q = session_sub.add_parser(verb)
        q.add_argument("--session", required=True)

    p = sub.add_parser("fragment", help="add a fragment to a draft session")
    fragment_sub = p.add_subparsers(dest="verb", required=True)
    q = fragment_sub.add_parser("add")
    q.add_argument("--session", required=True)
    q.add_argument("--id")
    q.add_argument("--text")
    q.add_argument("--domain")
    q.add_argument("--kind", default="observation")
    q.add_argument("--confidence")
    q.add_argument("--json")

    p = sub.add_parser("ghost", help="attach a ghost to a fragment")
    ghost_sub = p.add_subparsers(dest="verb", required=True)
    q = ghost_sub.add_parser("set")
    q.add_argument("--session", required=True)
    q.add_argument("--fragment")
    q.add_argument("--text")
    q.add_argument("--uses-verbs", action="store_true")
    q.add_argument("--includes-emotion", action="store_true")
    q.add_argument("--cross-domain", action="store_true")
    q.add_argument("--reversibility", action="store_true")
    q.add_argument("--json")

    p = sub.add_parser("collide", help="score a collision pair")
    collide_sub = p.add_subparsers(dest="verb", required=True)
    q = collide_sub.add_parser("score")
    q.add_argument("--session", required=True)
    q.add_argument("--pair", required=True, help="two fragment ids, comma-separated")
    q.add_argument("--score", required=True, choices=["boring", "interesting", "electric"])
    q.add_argument("--rationale", default="")

    p = sub.add_parser("vision", help="crystallize a vision from an electric collision")
    vision_sub = p.add_subparsers(dest="verb", required=True)
    q = vision_sub.add_parser("add")
    q.add_argument("--session", required=True)
    q.add_argument("--id")
    q.add_argument("--collision")
    q.add_argument("--name")
    q.add_argument("--one-line")
    q.add_argument("--emotion")
    q.add_argument("--image")
    q.add_argument("--why-now")
    q.add_argument("--ratings", help="novelty,feasibility,resonance,timing")
    q.add_argument("--json")

    p = sub.add_parser("bridge", help="ground an advancing vision")
    bridge_sub = p.add_subparsers(dest="verb", required=True)
    q = bridge_sub.add_parser("set")
    q.add_argument("--session", required=True)
    q.add_argument("--vision")
    q.add_argument("--mvv")
    q.add_argument("--capability", action="append", default=[])
    q.add_argument("--kill", action="append", default=[])
    q.add_argument("--first-step")
    q.add_argument("--json")

    p = sub.add_parser("signal", help="map a signal")
    signal_sub = p.add_subparsers(dest="verb", required=True)
    q = signal_sub.add_parser("add")
    q.add_argument("--session", required=True)
    q.add_argument("--key")
    q.add_argument("--description")
    q.add_argument("--strength", choices=["strong", "emerging", "weak"])
    q.add_argument("--direction", choices=["accelerating", "stable", "decelerating"])
    q.add_argument("--confidence", choices=["verified", "reported", "speculative"])
    q.add_argument("--kind", default="behavioral")
    q.add_argument("--evidence", action="append", default=[], help='"claim | source", repeatable')
    q.add_argument("--json")

    p = sub.add_parser("converge", help="add a convergence point")
    converge_sub = p.add_subparsers(dest="verb", required=True)
    q = converge_sub.add_parser("add")
    q.add_argument("--session", required=True)
    q.add_argument("--id")
    q.add_argument("--signals", help="comma-separated signal keys")
    q.add_argument("--hypothesis")
    q.add_argument("--logic")
    q.add_argument("--confidence", choices=["high", "medium", "low"])
    q.add_argument("--rationale")
    q.add_argument("--json")

    p = sub.add_parser("contrarian", help="set the contrarian view")
    contrarian_sub = p.add_subparsers(dest="verb", required=True)
    q = contrarian_sub.add_parser("set")
    q.add_argument("--session", required=True)
    q.add_argument("--json", required=True)

    p = sub.add_parser("grid", help="evaluate a timing grid")
    grid_sub = p.add_subparsers(dest="verb", required=True)
    q = grid_sub.add_parser("eval")
    q.add_argument("--market", required=True)
    q.add_argument("--competitive", required=True)
    q.add_argument("--readiness", required=True)
    q.add_argument("--external", required=True)
    q.add_argument("--annotation", default="")
    q.add_argument("--session", help="record the evaluation on this session")
    q.add_argument("--label", default="")

    p = sub.add_parser("action", help="add an action item")
    action_sub = p.add_subparsers(dest="verb", required=True)
    q = action_sub.add_parser("add")
    q.add_argument("--session", required=True)
    q.add_argument("--id")
    q.add_argument("--category", choices=["now", "soon", "watch", "kill"])
    q.add_argument("--action")
    q.add_argument("--trigger")
    q.add_argument("--cost")
    q.add_argument("--json")

    p = sub.add_parser("history", help="longitudinal signal tracking")
    history_sub = p.add_subparsers(dest="verb", required=True)
    q = history_sub.add_parser("diff")
    q.add_argument("--theme", required=True)

    p = sub.add_parser("predict", help="prediction feedback loop")
    predict_sub = p.add_subparsers(dest="verb", required=True)
    q = predict_sub.add_parser("add")
    q.add_argument("--id")
    q.add_argument("--theme", required=True)
    q.add_argument("--statement", required=True)
    q.add_argument("--from", dest="start", required=True)
    q.add_argument("--to", dest="end", required=True)
    q = predict_sub.add_parser("eval")
    q.add_argument("--id", required=True)
    q.add_argument("--outcome", required=True, choices=["hit", "miss", "partial"])
    q.add_argument("--timing")
    q.add_argument("--contrarian-value")

    p = sub.add_parser("score", help="rubric scoring")
    score_sub = p.add_subparsers(dest="verb", required=True)
    q = score_sub.add_parser("rubric")
    q.add_argument("--target", required=True)
    q.add_argument("--scores", help="8 comma-separated integers 0..10")
    q.add_argument("--labels", help="8 comma-separated labels")
    q.add_argument("--json")

    p = sub.add_parser("batch", help="replay or run a batch of collider sessions")
    batch_sub = p.add_subparsers(dest="verb", required=True)
    q = batch_sub.add_parser("run")
    q.add_argument("--fixtures", required=True)

    p = sub.add_parser("export", help="export a session report")
    p.add_argument("--session", required=True)
    p.add_argument("--format", default="md", choices=["md", "data"])

    p = sub.add_parser("serve", help="start the HTTP session API")
    p.add_argument("--port", type=int, default=8321)

    return parser


def _engine(args) -> Engine:
    path = args.store or store_path()
    return Engine(Store(path), load_config())


def _merged(args, mapping: dict, json_attr: str = "json") -> dict:
    """Step payload from --json plus/over individual flags."""
    body = {}
    for key, value in mapping.items():
        if value is not None and value != [] and value != "":
            body[key] = value
    raw = getattr(args, json_attr, None)
    if raw:
        body.update(_json_arg(raw))
    return body


def _print_session(payload: dict) -> None:
    protocol = payload["protocol"]
    status = payload["status"]
    print(f"session {payload['id']} [{protocol}] status={status}")
    if payload.get("abort_reason"):
        print(f"aborted: {payload['abort_reason']}")
    for warning in payload.get("warnings", []):
        print(f"warning: {warning}")


def _ratings_list(raw: str) -> list[int]:
    try:
        return [int(x) for x in raw.split(",")]
    except ValueError:
        raise ProtocolError("invalid_value", f"ratings must be integers, got {raw!r}", "ratings")


def _fraction_str(value: Fraction | None) -> str:
    if value is None:
        return "n/a"
    return f"{value} ({float(value):.4f})"


def cli_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; remap to the documented code,
        # keep 0 for --help.
        return 0 if exc.code == 0 else USAGE_EXIT
    try:
        return _run(args)
    except StorageError as exc:
        print(f"storage error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 2
    except ProtocolError as exc:
        where = f" at {exc.field_path}" if exc.field_path else ""
        print(f"error [{exc.code}]{where}: {exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"storage error: {exc}", file=sys.stderr)
        return 2


def _run(args) -> int:
    command = args.command

    if command == "grid" and not args.session:
        # Pure evaluation needs no store.
        from .precog import TimingGrid, evaluate_timing_grid
        from .serialize import parse_enum
        from . import precog as pc

        grid = TimingGrid(
            market_phase=parse_enum(pc.MarketPhase, args.market, "market_phase"),
            competitive=parse_enum(pc.CompetitivePosition, args.competitive, "competitive"),
            readiness=parse_enum(pc.Readiness, args.readiness, "readiness"),
            external_window=parse_enum(pc.ExternalWindow, args.external, "external_window"),
            annotation=args.annotation,
        )
        judgment = evaluate_timing_grid(grid, load_config())
        _print_judgment(judgment)
        return 0

    if command == "batch":
        configs, provider = bt.load_batch_fixture(args.fixtures)
        try:
            outcomes = bt.run_batch(configs, provider)
        except ProviderFailure as exc:
            print(f"provider failure in run {exc.run_label!r}: {exc.cause}", file=sys.stderr)
            print(f"{len(exc.completed)} earlier run(s) completed", file=sys.stderr)
            return 1
        stats = bt.compute_stats(outcomes)
        for outcome, rate in zip(outcomes, stats.per_run_hit_rates):
            rate_s = "n/a" if rate is None else f"{float(rate):.0%}"
            print(
                f"{outcome.pairing_label}: electric {outcome.electric_count}/{outcome.pair_count} "
                f"({rate_s}), advancing visions {len(outcome.advancing_visions())}, "
                f"{outcome.result.value}"
            )
        print(f"runs: {stats.n_runs}")
        print(f"success rate: {_fraction_str(stats.success_rate)}")
        print(f"failure rate: {_fraction_str(stats.failure_rate)}")
        print(f"mean hit rate (successful runs): {_fraction_str(stats.mean_hit_rate_successful)}")
        print(f"mean hit rate (all runs): {_fraction_str(stats.mean_hit_rate_all)}")
        print(f"total advancing visions: {stats.total_visions}")
        print(f"mean visions per successful run: {_fraction_str(stats.mean_visions_per_successful)}")
        r = stats.novelty_feasibility_r
        print(f"novelty/feasibility correlation: {'n/a' if r is None else f'{r:.3f}'}")
        for warning in stats.warnings:
            print(f"warning: {warning}")
        return 0

    if command == "serve":
        from .api import serve

        print(f"serving on 127.0.0.1:{args.port}")
        serve(args.port)
        return 0

    engine = _engine(args)

    if command == "session":
        verb = args.session_command
        if verb == "new":
            body = {"protocol": args.protocol, "theme": args.theme, "horizon": args.horizon}
            if args.protocol == "precog":
                body["theme_key"] = args.theme
            if args.id:
                body["id"] = args.id
            if args.from_precog:
                externals = _json_arg(args.externals_json)["externals"] if args.externals_json else []
                body["integration"] = {
                    "precog_session_id": args.from_precog,
                    "select": [s for s in (args.select or "").split(",") if s],
                    "externals": externals,
                }
            _print_session(engine.create_session(body))
            return 0
        if verb == "show":
            print(json.dumps(engine.get_session(args.session), indent=2, sort_keys=True))
            return 0
        step = {"advance": "advance", "complete": "complete", "finalize": "finalize"}[verb]
        _print_session(engine.apply_step(args.session, step, {}))
        return 0

    if command == "fragment":
        body = _merged(
            args,
            {
                "id": args.id,
                "text": args.text,
                "domain_tag": args.domain,
                "source_kind": args.kind,
                "confidence": args.confidence,
            },
        )
        if "id" not in body:
            session = engine.get_session(args.session)
            body["id"] = f"f{len(session.get('fragments', [])) + 1}"
        _print_session(engine.apply_step(args.session, "fragment", body))
        return 0

    if command == "ghost":
        body = _merged(
            args,
            {
                "fragment_id": args.fragment,
                "structural_description": args.text,
                "checklist": {
                    "uses_verbs": args.uses_verbs,
                    "includes_emotion": args.includes_emotion,
                    "cross_domain_comprehensible": args.cross_domain,
                    "reversibility_pass": args.reversibility,
                },
            },
        )
        payload = engine.apply_step(args.session, "ghost", body)
        _print_session(payload)
        return 0

    if command == "collide":
        pair = [p.strip() for p in args.pair.split(",")]
        body = {"pair": pair, "score": args.score, "rationale": args.rationale}
        payload = engine.apply_step(args.session, "collision", body)
        _print_session(payload)
        gate = payload.get("gate")
        if gate:
            print(f"gate: {gate['kind']}; electric: {', '.join(gate['electric']) or 'none'}")
            if gate["electric_inflation"]:
                print("flag: electric inflation")
        return 0

    if command == "vision":
        body = _merged(
            args,
            {
                "id": args.id,
                "collision_id": args.collision,
                "name": args.name,
                "one_line": args.one_line,
                "emotion": args.emotion,
                "cinematic_image": args.image,
                "why_now": args.why_now,
                "ratings": _ratings_list(args.ratings) if args.ratings else None,
            },
        )
        payload = engine.apply_step(args.session, "vision", body)
        _print_session(payload)
        stored = payload["visions"][-1]
        print(f"vision {stored['id']}: {'advances' if stored['advances'] else 'does not advance'}")
        return 0

    if command == "bridge":
        body = _merged(
            args,
            {
                "vision_id": args.vision,
                "mvv": args.mvv,
                "existing_capabilities": args.capability,
                "kill_conditions": args.kill,
                "first_step_24h": args.first_step,
            },
        )
        _print_session(engine.apply_step(args.session, "bridge", body))
        return 0

    if command == "signal":
        evidence = []
        for item in args.evidence:
            claim, _, source = item.partition("|")
            evidence.append({"claim": claim.strip(), "source": source.strip()})
        body = _merged(
            args,
            {
                "key": args.key,
                "description": args.description,
                "strength": args.strength,
                "direction": args.direction,
                "confidence": args.confidence,
                "source_kind": args.kind,
                "evidence": evidence,
            },
        )
        _print_session(engine.apply_step(args.session, "signal", body))
        return 0

    if command == "converge":
        body = _merged(
            args,
            {
                "id": args.id,
                "signal_keys": [s for s in (args.signals or "").split(",") if s],
                "hypothesis": args.hypothesis,
                "causal_logic": args.logic,
                "confidence": args.confidence,
                "confidence_rationale": args.rationale,
            },
        )
        _print_session(engine.apply_step(args.session, "convergence", body))
        return 0

    if command == "contrarian":
        body = _json_arg(args.json)
        _print_session(engine.apply_step(args.session, "contrarian", body))
        return 0

    if command == "grid":
        body = {
            "label": args.label,
            "market_phase": args.market,
            "competitive": args.competitive,
            "readiness": args.readiness,
            "external_window": args.external,
            "annotation": args.annotation,
        }
        payload = engine.apply_step(args.session, "grid", body)
        judgment = payload["grid_evaluations"][-1]["judgment"]
        _print_judgment_payload(judgment)
        return 0

    if command == "action":
        body = _merged(
            args,
            {
                "id": args.id,
                "category": args.category,
                "action": args.action,
                "trigger": args.trigger,
                "cost_estimate": args.cost,
            },
        )
        _print_session(engine.apply_step(args.session, "action", body))
        return 0

    if command == "history":
        diff = engine.history_diff(args.theme)
        if not diff["available"]:
            print(
                f"theme {args.theme!r}: need at least two recorded sessions, "
                f"found {diff['sessions_found']}"
            )
            return 0
        print(f"theme {args.theme!r}: {diff['prev_session']} -> {diff['curr_session']}")
        for delta in diff["deltas"]:
            flag = " PRIORITY" if delta["priority"] else ""
            prev_s = delta["prev_strength"] or "-"
            curr_s = delta["curr_strength"] or "-"
            print(
                f"{delta['signal_key']}: {delta['classification']} "
                f"({prev_s} -> {curr_s}){flag}"
            )
        return 0

    if command == "predict":
        if args.verb == "add":
            payload = engine.add_prediction(
                {
                    "id": args.id,
                    "theme_key": args.theme,
                    "statement": args.statement,
                    "horizon": {"start": args.start, "end": args.end},
                }
            )
            print(f"prediction {payload['id']} recorded")
            return 0
        payload = engine.evaluate_prediction(
            args.id,
            {
                "outcome": args.outcome,
                "timing_accuracy": args.timing,
                "contrarian_value": args.contrarian_value,
            },
        )
        summary = payload["summary"]
        print(
            f"prediction {payload['id']}: {payload['outcome']} — theme summary "
            f"hit {summary['hit']}, miss {summary['miss']}, partial {summary['partial']}"
        )
        return 0

    if command == "score":
        body = {"target_ref": args.target}
        if args.scores:
            body["scores"] = [int(x) for x in args.scores.split(",")]
        if args.labels:
            body["labels"] = args.labels.split(",")
        if args.json:
            body.update(_json_arg(args.json))
        payload = engine.rubric(body)
        print(f"rubric {payload['target_ref']}: total {payload['total']}/80")
        return 0

    if command == "export":
        payload = engine.get_session(args.session)
        session = session_from_payload(payload)
        print(export_report(session, args.format), end="")
        return 0

    raise ProtocolError("invalid_value", f"unknown command {command!r}")


def _print_judgment(judgment) -> None:
    esc = "required" if judgment.escalated_contrarian_required else "none"
    print(f"{judgment.overall.value.capitalize()} (sum={judgment.polarity_sum}, escalation: {esc})")


def _print_judgment_payload(judgment: dict) -> None:
    esc = "required" if judgment["escalated_contrarian_required"] else "none"
    print(f"{judgment['overall'].capitalize()} (sum={judgment['polarity_sum']}, escalation: {esc})")


def main() -> None:  # pragma: no cover
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":  # pragma: no cover
    main()
