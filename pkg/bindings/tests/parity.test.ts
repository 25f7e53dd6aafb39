import { execFileSync } from "node:child_process";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  BoundScorer,
  type CaptionMetric,
  GroupSizeMismatch,
  type TargetRecord,
  UnknownMetric,
} from "../src/index.js";

const here = dirname(fileURLToPath(import.meta.url));
const DIRECT_SCRIPT = join(here, "direct_scoring.py");

/** Deterministic PRNG so the randomized parity corpus is reproducible. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const WORDS = (
  "wind rain thunder engine crowd cheers birds singing quiet hum speaker " +
  "announces train whistle guitar chords water boils knife taps applause"
).split(" ");

function oneDecimal(rng: () => number, hi: number): number {
  return Math.round(rng() * hi * 10) / 10;
}

function randomInterval(rng: () => number): [number, number] {
  const a = oneDecimal(rng, 60);
  const b = oneDecimal(rng, 60);
  return a <= b ? [a, b] : [b, a];
}

function randomCompletion(rng: () => number, answer: string): string {
  const roll = rng();
  if (roll < 0.4) {
    const [a, b] = randomInterval(rng);
    return `second{${a.toFixed(1)}}-second{${b.toFixed(1)}}`;
  }
  if (roll < 0.55) {
    const [a, b] = randomInterval(rng);
    return `second{${b.toFixed(1)}}-second{${a.toFixed(1)}}`; // possibly reversed
  }
  if (roll < 0.7) return answer;
  if (roll < 0.85) return WORDS.slice(0, 2 + Math.floor(rng() * 6)).join(" ");
  return "";
}

function randomCaption(rng: () => number): string {
  const n = 1 + Math.floor(rng() * 8);
  const picked: string[] = [];
  for (let i = 0; i < n; i++) picked.push(WORDS[Math.floor(rng() * WORDS.length)]);
  return picked.join(" ");
}

interface GroupCase {
  completions: string[];
  target: TargetRecord;
}

interface CaptionCase {
  pred: string;
  ref: string;
  metric: CaptionMetric;
}

function buildCases(): { groups: GroupCase[]; captions: CaptionCase[] } {
  const rng = mulberry32(20260810);
  const groups: GroupCase[] = [];
  const captions: CaptionCase[] = [];
  const metrics: CaptionMetric[] = ["bleu4", "rouge_l", "meteor"];
  for (let i = 0; i < 100; i++) {
    if (i % 2 === 0) {
      const [a, b] = randomInterval(rng);
      const answer = `second{${a.toFixed(1)}}-second{${b.toFixed(1)}}`;
      const target: TargetRecord = {
        subtask: i % 4 === 0 ? "v2t" : "a2t",
        answer,
        interval: [a, b],
      };
      groups.push({
        completions: [0, 1, 2, 3].map(() => randomCompletion(rng, answer)),
        target,
      });
    } else {
      const answer = randomCaption(rng);
      const target: TargetRecord = {
        subtask: (["t2v", "t2a", "v2a", "a2v"] as const)[i % 4],
        answer,
        interval: [0, 1],
      };
      groups.push({
        completions: [0, 1, 2, 3].map(() =>
          rng() < 0.3 ? answer : randomCaption(rng)
        ),
        target,
      });
    }
    captions.push({
      pred: rng() < 0.1 ? "" : randomCaption(rng),
      ref: randomCaption(rng),
      metric: metrics[i % metrics.length],
    });
  }
  return { groups, captions };
}

describe("BoundScorer", () => {
  let scorer: BoundScorer;

  beforeAll(async () => {
    scorer = new BoundScorer();
    await scorer.ping();
  });

  afterAll(() => {
    scorer.close();
  });

  it("matches direct engine invocation bit-exactly on 100 randomized cases", async () => {
    const cases = buildCases();
    const direct = JSON.parse(
      execFileSync("python3", [DIRECT_SCRIPT], {
        input: JSON.stringify(cases),
        encoding: "utf-8",
      })
    );

    for (let i = 0; i < cases.groups.length; i++) {
      const { completions, target } = cases.groups[i];
      const viaBridge = await scorer.scoreGroup(completions, target);
      expect(viaBridge.rewards).toStrictEqual(direct.groups[i].rewards);
      expect(viaBridge.advantages).toStrictEqual(direct.groups[i].advantages);
    }
    for (let i = 0; i < cases.captions.length; i++) {
      const { pred, ref, metric } = cases.captions[i];
      expect(await scorer.scoreCaption(pred, ref, metric)).toBe(direct.captions[i]);
    }
  }, 60_000);

  it("scores malformed completion groups as all zero", async () => {
    const { rewards, advantages } = await scorer.scoreGroup(
      ["nonsense", "", "also not an interval", "??"],
      { subtask: "v2t", answer: "second{2.0}-second{8.0}", interval: [2, 8] }
    );
    expect(rewards).toStrictEqual([0, 0, 0, 0]);
    expect(advantages).toStrictEqual([0, 0, 0, 0]);
  });

  it("exposes the primitive rewards", async () => {
    expect(
      await scorer.rewardIou("second{4.0}-second{10.0}", [2, 8])
    ).toBe(0.5);
    expect(await scorer.rewardFormat("second{1.0}-second{2.0}")).toBe(1);
    expect(await scorer.rewardFormat("not a timestamp")).toBe(0);
  });

  it("surfaces contract violations as typed errors", async () => {
    await expect(
      scorer.scoreGroup(["a", "b"], { subtask: "v2t", interval: [0, 1] })
    ).rejects.toBeInstanceOf(GroupSizeMismatch);
    await expect(
      scorer.scoreCaption("a", "b", "cider" as CaptionMetric)
    ).rejects.toBeInstanceOf(UnknownMetric);
    // the engine keeps serving after error responses
    expect(await scorer.rewardFormat("second{1.0}-second{2.0}")).toBe(1);
  });

  it("answers concurrent callers in order", async () => {
    const results = await Promise.all([
      scorer.rewardIou("second{2.0}-second{8.0}", [2, 8]),
      scorer.rewardIou("second{4.0}-second{10.0}", [2, 8]),
      scorer.rewardFormat("second{9.0}-second{1.0}"),
    ]);
    expect(results).toStrictEqual([1, 0.5, 1]);
  });

  it("keeps the per-call round trip under 100 ms", async () => {
    await scorer.scoreCaption("warm up", "warm up", "meteor");
    const calls = 50;
    const start = performance.now();
    for (let i = 0; i < calls; i++) {
      await scorer.scoreCaption("a crowd cheers loudly", "the crowd cheers", "meteor");
    }
    const perCall = (performance.now() - start) / calls;
    expect(perCall).toBeLessThan(100);
  });

  it("mirrors the engine config record", () => {
    const custom = new BoundScorer({ group_size: 8, kl_beta: 0.1 });
    try {
      expect(custom.config.group_size).toBe(8);
      expect(custom.config.kl_beta).toBe(0.1);
      expect(custom.config.temperature).toBe(1.0);
      expect(custom.config.max_gen_tokens).toBe(1024);
      expect(custom.config.subtask).toBe("v2t");
    } finally {
      custom.close();
    }
  });
});
