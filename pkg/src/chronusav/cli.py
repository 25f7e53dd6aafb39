"""Command-line entry point.

Subcommands: build-qa, eval, collect, reward, interleave, merge-segments,
kappa, grpo-demo, score-stdio. All file formats are UTF-8 JSONL as documented
on the corresponding modules. CHRONUS_ENDPOINT provides the default --endpoint.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import annotations as anns
from . import bridge, harness
from .errors import ChronusError
from .interleave import build_sequence
from .qa import build_benchmark, load_qa, save_qa
from .rewards import RewardConfig, group_advantages, composite_reward, run_grpo_demo


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_build_qa(args: argparse.Namespace) -> None:
    annotations = anns.load_annotations(args.annotations)
    pairs = build_benchmark(annotations, rng_seed=args.seed, template_set=args.templates)
    save_qa(pairs, args.out)
    print(f"wrote {len(pairs)} QA pairs to {args.out}")


def _cmd_eval(args: argparse.Namespace) -> None:
    report = harness.evaluate(args.qa, args.predictions, label=args.label)
    text = harness.emit_report(report, format=args.format, out_path=args.out)
    if args.out:
        print(f"wrote report to {args.out}")
    else:
        print(text)


def _cmd_collect(args: argparse.Namespace) -> None:
    endpoint = args.endpoint or os.environ.get("CHRONUS_ENDPOINT")
    if not endpoint:
        raise ChronusError("no endpoint: pass --endpoint or set CHRONUS_ENDPOINT")
    out = harness.collect_predictions(
        args.qa,
        endpoint,
        args.out,
        concurrency=args.concurrency,
        timeout_s=args.timeout_s,
    )
    print(f"predictions written to {out}")


def _cmd_reward(args: argparse.Namespace) -> None:
    pairs = {pair.qa_id: pair for pair in load_qa(args.qa)}
    groups: dict[str, list[str]] = {}
    order: list[str] = []
    with open(args.completions, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            qa_id = record["qa_id"]
            if qa_id not in pairs:
                raise ChronusError(f"completion references unknown qa_id {qa_id!r}")
            if qa_id not in groups:
                order.append(qa_id)
            groups.setdefault(qa_id, []).append(record["completion"])

    lines = []
    for qa_id in order:
        completions = groups[qa_id]
        rewards = [composite_reward(c, pairs[qa_id]) for c in completions]
        advantages = group_advantages(rewards)
        for completion, reward, advantage in zip(completions, rewards, advantages):
            lines.append(
                json.dumps(
                    {
                        "qa_id": qa_id,
                        "completion": completion,
                        "reward": reward,
                        "advantage": advantage,
                    },
                    ensure_ascii=False,
                )
            )
    _write_or_print("\n".join(lines), args.out)


def _cmd_interleave(args: argparse.Namespace) -> None:
    sequence = build_sequence(
        args.duration_s, args.frames, args.video_tokens, args.audio_tokens_per_s
    )
    _write_or_print("\n".join(sequence.render_lines()), args.out)


def _cmd_merge_segments(args: argparse.Namespace) -> None:
    data = json.loads(Path(args.input).read_text(encoding="utf-8"))
    merged = anns.merge_segments(
        data["boundaries"],
        data["adjacent_similarity"],
        threshold=args.threshold,
        max_segments=args.max_segments,
    )
    _write_or_print(json.dumps({"boundaries": merged}), args.out)


def _cmd_kappa(args: argparse.Namespace) -> None:
    table = json.loads(Path(args.input).read_text(encoding="utf-8"))
    print(f"{anns.fleiss_kappa(table):.6f}")


def _cmd_grpo_demo(args: argparse.Namespace) -> None:
    config = RewardConfig(
        group_size=args.group_size,
        kl_beta=args.kl_beta,
        temperature=args.temperature,
    )
    trace = run_grpo_demo(config, seed=args.seed, iterations=args.iterations)
    window = min(50, trace.iterations)
    print(f"iterations: {trace.iterations}")
    print(f"mean reward, first {window}: {trace.window_mean(0, window):.4f}")
    print(f"mean reward, last {window}: {trace.window_mean(-window, None):.4f}")
    if args.out:
        Path(args.out).write_text(
            json.dumps({"mean_rewards": list(trace.mean_rewards)}), encoding="utf-8"
        )
        print(f"trace written to {args.out}")


def _cmd_score_stdio(args: argparse.Namespace) -> None:
    config = RewardConfig(
        group_size=args.group_size,
        kl_beta=args.kl_beta,
        temperature=args.temperature,
        max_gen_tokens=args.max_gen_tokens,
    )
    bridge.serve(config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronusav",
        description="Audiovisual temporal grounding toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-qa", help="materialize benchmark QA from annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--templates", default="default")
    p.set_defaults(func=_cmd_build_qa)

    p = sub.add_parser("eval", help="score predictions against a QA file")
    p.add_argument("--qa", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--format", choices=["json", "markdown"], default="json")
    p.add_argument("--out")
    p.add_argument("--label", default="model")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("collect", help="query a model endpoint for predictions")
    p.add_argument("--qa", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--concurrency", type=int, default=4)
    p.add_argument("--timeout-s", type=float, default=30.0)
    p.set_defaults(func=_cmd_collect)

    p = sub.add_parser("reward", help="score completion groups against QA targets")
    p.add_argument("--qa", required=True)
    p.add_argument("--completions", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_reward)

    p = sub.add_parser("interleave", help="print the T/V/A token layout")
    p.add_argument("--duration-s", type=float, required=True)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--video-tokens", type=int, default=1)
    p.add_argument("--audio-tokens-per-s", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_interleave)

    p = sub.add_parser("merge-segments", help="merge segment boundaries by similarity")
    p.add_argument("input", help="JSON file with boundaries and adjacent_similarity")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--max-segments", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_merge_segments)

    p = sub.add_parser("kappa", help="Fleiss' kappa of a vote-count table")
    p.add_argument("input", help="JSON file with an items x categories count matrix")
    p.set_defaults(func=_cmd_kappa)

    p = sub.add_parser("grpo-demo", help="run the toy group-relative learning demo")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--group-size", type=int, default=4)
    p.add_argument("--kl-beta", type=float, default=0.04)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_grpo_demo)

    p = sub.add_parser("score-stdio", help="serve scoring requests over stdin/stdout")
    p.add_argument("--group-size", type=int, default=4)
    p.add_argument("--kl-beta", type=float, default=0.04)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--max-gen-tokens", type=int, default=1024)
    p.set_defaults(func=_cmd_score_stdio)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ChronusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
