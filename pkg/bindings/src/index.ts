/**
 * Reward and caption-metric scoring for training loops.
 *
 * A {@link BoundScorer} owns one long-lived scoring engine child process
 * (`chronusav score-stdio`) and exchanges one JSON object per line with it,
 * so callers pay interpreter startup once, not per call. All scoring calls
 * are total: malformed completions come back as zero rewards, never as
 * errors. Errors are reserved for contract violations (wrong group size,
 * unknown metric) and engine failures.
 */

import { type ChildProcessByStdio, spawn } from "node:child_process";
import { createInterface, type Interface } from "node:readline";
import type { Readable, Writable } from "node:stream";

/** Mirrors the engine's reward configuration record field-for-field. */
export interface RewardConfig {
  group_size: number;
  kl_beta: number;
  temperature: number;
  max_gen_tokens: number;
  subtask: Subtask;
}

export const DEFAULT_CONFIG: RewardConfig = {
  group_size: 4,
  kl_beta: 0.04,
  temperature: 1.0,
  max_gen_tokens: 1024,
  subtask: "v2t",
};

export type Subtask = "v2t" | "t2v" | "a2t" | "t2a" | "v2a" | "a2v";

export type CaptionMetric = "bleu4" | "rouge_l" | "meteor";

/** The QA-pair-equivalent record a completion group is scored against. */
export interface TargetRecord {
  subtask: Subtask;
  /** Ground-truth caption for caption subtasks. */
  answer?: string;
  /** Ground-truth [start, end] seconds for moment-retrieval subtasks. */
  interval?: [number, number];
  qa_id?: string;
}

export interface GroupScore {
  rewards: number[];
  advantages: number[];
}

export class ScoringError extends Error {
  constructor(readonly code: string, message: string) {
    super(message);
    this.name = code;
  }
}

export class GroupSizeMismatch extends ScoringError {
  constructor(message: string) {
    super("GroupSizeMismatch", message);
  }
}

export class UnknownMetric extends ScoringError {
  constructor(message: string) {
    super("UnknownMetric", message);
  }
}

export interface BoundScorerOptions {
  /**
   * Command used to launch the engine bridge; configuration flags are
   * appended. Defaults to `python3 -m chronusav.cli score-stdio`, which
   * works wherever the engine package is installed.
   */
  command?: string[];
}

interface Pending {
  resolve: (value: Record<string, unknown>) => void;
  reject: (reason: Error) => void;
}

function toError(response: Record<string, unknown>): ScoringError {
  const code = String(response.error ?? "EngineError");
  const message = String(response.message ?? "engine reported an error");
  if (code === "GroupSizeMismatch") return new GroupSizeMismatch(message);
  if (code === "UnknownMetric") return new UnknownMetric(message);
  return new ScoringError(code, message);
}

/**
 * One scoring engine handle. The configuration is frozen at construction;
 * concurrent callers are safe (the line protocol answers strictly in
 * request order, and requests are written atomically per line).
 */
export class BoundScorer {
  readonly config: Readonly<RewardConfig>;
  private readonly child: ChildProcessByStdio<Writable, Readable, null>;
  private readonly lines: Interface;
  private readonly pending: Pending[] = [];
  private closed = false;

  constructor(config: Partial<RewardConfig> = {}, options: BoundScorerOptions = {}) {
    this.config = Object.freeze({ ...DEFAULT_CONFIG, ...config });
    const base = options.command ?? ["python3", "-m", "chronusav.cli", "score-stdio"];
    const argv = [
      ...base,
      "--group-size", String(this.config.group_size),
      "--kl-beta", String(this.config.kl_beta),
      "--temperature", String(this.config.temperature),
      "--max-gen-tokens", String(this.config.max_gen_tokens),
    ];
    this.child = spawn(argv[0], argv.slice(1), { stdio: ["pipe", "pipe", "inherit"] });
    this.child.on("exit", (code) => {
      this.closed = true;
      const leftover = this.pending.splice(0);
      for (const p of leftover) {
        p.reject(new ScoringError("EngineExited", `engine exited with code ${code}`));
      }
    });
    this.lines = createInterface({ input: this.child.stdout });
    this.lines.on("line", (line) => {
      const next = this.pending.shift();
      if (!next) return;
      let response: Record<string, unknown>;
      try {
        response = JSON.parse(line);
      } catch (err) {
        next.reject(new ScoringError("BadResponse", `unparseable engine line: ${line}`));
        return;
      }
      if (response.ok === true) {
        next.resolve(response);
      } else {
        next.reject(toError(response));
      }
    });
  }

  private request(body: Record<string, unknown>): Promise<Record<string, unknown>> {
    if (this.closed) {
      return Promise.reject(new ScoringError("EngineExited", "scorer is closed"));
    }
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.child.stdin.write(JSON.stringify(body) + "\n");
    });
  }

  /** Round-trip health check. */
  async ping(): Promise<void> {
    await this.request({ op: "ping" });
  }

  /**
   * Composite rewards and group-relative advantages for one rollout group.
   * The group length must equal the configured group size.
   */
  async scoreGroup(completions: string[], target: TargetRecord): Promise<GroupScore> {
    const response = await this.request({ op: "score_group", completions, target });
    return {
      rewards: response.rewards as number[],
      advantages: response.advantages as number[],
    };
  }

  /** Score one caption pair; empty predictions score 0. */
  async scoreCaption(pred: string, ref: string, metric: CaptionMetric): Promise<number> {
    const response = await this.request({ op: "score_caption", pred, ref, metric });
    return response.score as number;
  }

  /** IoU of the completion's interval against [start, end]; garbage scores 0. */
  async rewardIou(completion: string, interval: [number, number]): Promise<number> {
    const response = await this.request({ op: "reward_iou", completion, interval });
    return response.score as number;
  }

  /** 1 iff the trimmed completion is exactly one canonical interval string. */
  async rewardFormat(completion: string): Promise<number> {
    const response = await this.request({ op: "reward_format", completion });
    return response.score as number;
  }

  /** Shut the engine down; in-flight requests reject. */
  close(): void {
    if (!this.closed) {
      this.closed = true;
      this.child.stdin.end();
    }
  }
}
