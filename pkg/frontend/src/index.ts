/**
 * Node bindings for the factacc toolkit.
 *
 * The toolkit does all the metric math; this package only shells out to its
 * CLI and passes JSON through untouched, so results here are field-identical
 * to running the CLI by hand. The CLI is located via the FACTACC_CLI
 * environment variable (a full command line, e.g. "python3 -m factacc.cli"
 * or just "factacc"), falling back to `python3 -m factacc.cli`.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface RougeComponents {
  precision: number;
  recall: number;
  f_measure: number;
}

export interface RougeSet {
  rouge1: RougeComponents;
  rouge2: RougeComponents;
  rougeL: RougeComponents;
}

export interface FactJson {
  subject: string;
  relation: { id: string; label: string };
  object: string;
}

export interface ScoreCounts {
  n_truth: number;
  n_gen: number;
  n_truth_filtered: number;
  n_gen_filtered: number;
  n_matched: number;
}

export interface ScoreResult {
  fact_acc: number | null;
  no_verifiable_claims: boolean;
  counts: ScoreCounts;
  rouge: RougeSet;
  matched: FactJson[];
  refuted: FactJson[];
  unverifiable: FactJson[];
}

export interface ScoreOptions {
  /** compare tuples case-insensitively */
  caseFold?: boolean;
  /** override the CLI command, e.g. ["python3", "-m", "factacc.cli"] */
  command?: string[];
}

export class ToolkitNotFoundError extends Error {}

function cliCommand(options?: ScoreOptions): string[] {
  if (options?.command && options.command.length > 0) return options.command;
  const env = process.env.FACTACC_CLI;
  if (env && env.trim().length > 0) return env.trim().split(/\s+/);
  return ["python3", "-m", "factacc.cli"];
}

function runCli(args: string[], options?: ScoreOptions): string {
  const [head, ...rest] = cliCommand(options);
  try {
    return execFileSync(head, [...rest, ...args], { encoding: "utf-8" });
  } catch (err) {
    const e = err as NodeJS.ErrnoException & { stderr?: string; status?: number };
    if (e.code === "ENOENT") {
      throw new ToolkitNotFoundError(
        `factacc CLI not found (tried "${head}"); install the toolkit or set FACTACC_CLI`,
      );
    }
    if (e.stderr && /No module named/.test(String(e.stderr))) {
      throw new ToolkitNotFoundError(
        `factacc toolkit is not importable by "${head}"; install it or set FACTACC_CLI`,
      );
    }
    throw new Error(`factacc CLI failed (exit ${e.status}): ${e.stderr ?? e.message}`);
  }
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "factacc-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

/**
 * Score a generated text against a reference text.
 *
 * `extractor` is the toolkit's extractor spec string, e.g.
 * `tuples:/path/truth.jsonl,/path/generated.jsonl`. The texts are passed via
 * temporary files; the report comes back exactly as the CLI emitted it.
 */
export function score(
  truth: string,
  generated: string,
  extractor: string,
  options?: ScoreOptions,
): ScoreResult {
  return withTempDir((dir) => {
    const truthPath = join(dir, "truth.txt");
    const generatedPath = join(dir, "generated.txt");
    writeFileSync(truthPath, truth, "utf-8");
    writeFileSync(generatedPath, generated, "utf-8");
    const args = [
      "score",
      "--truth", truthPath,
      "--generated", generatedPath,
      "--extractor", extractor,
    ];
    if (options?.caseFold) args.push("--case-fold");
    return JSON.parse(runCli(args, options)) as ScoreResult;
  });
}

/**
 * ROUGE-1/2/L of a text pair, via a score run with empty tuple sets (the
 * factual-accuracy side of that report is the no-claims state and is
 * discarded here).
 */
export function rouge(
  truth: string,
  generated: string,
  options?: ScoreOptions,
): RougeSet {
  return withTempDir((dir) => {
    const empty = join(dir, "empty.jsonl");
    writeFileSync(empty, "", "utf-8");
    const truthPath = join(dir, "truth.txt");
    const generatedPath = join(dir, "generated.txt");
    writeFileSync(truthPath, truth, "utf-8");
    writeFileSync(generatedPath, generated, "utf-8");
    const report = JSON.parse(runCli([
      "score",
      "--truth", truthPath,
      "--generated", generatedPath,
      "--extractor", `tuples:${empty},${empty}`,
    ], options)) as ScoreResult;
    return report.rouge;
  });
}

/** Toolkit version string, e.g. "factacc 0.1.0 (checkpoint format 1)". */
export function version(options?: ScoreOptions): string {
  return runCli(["--version"], options).trim();
}
