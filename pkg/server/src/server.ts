#!/usr/bin/env node
/**
 * Reference external predictor: serves a linear model over stdio using
 * the ei-predict/1 line protocol.
 *
 * Usage: node dist/server.js --model <spec.json> [--task regression|classification]
 *
 * --task is a sanity check against the loaded spec; the spec alone
 * determines the model. To host a real DNN instead, implement
 * PredictBackend (see linear.ts) and pass it to serve() — the protocol
 * layer is model-agnostic by construction.
 */

import { createInterface } from "node:readline";
import process from "node:process";

import { LinearModel, type PredictBackend, type TaskKind } from "./linear.js";
import { handleLine } from "./protocol.js";

function parseArgs(argv: string[]): { model: string; task?: TaskKind } {
  let model: string | undefined;
  let task: TaskKind | undefined;
  for (let i = 0; i < argv.length; i += 1) {
    if (argv[i] === "--model") {
      model = argv[++i];
    } else if (argv[i] === "--task") {
      const value = argv[++i];
      if (value !== "regression" && value !== "classification") {
        throw new Error(`--task must be regression or classification, got ${value}`);
      }
      task = value;
    } else {
      throw new Error(`unknown argument ${argv[i]}`);
    }
  }
  if (!model) {
    throw new Error("--model <spec.json> is required");
  }
  return { model, task };
}

export function serve(backend: PredictBackend): void {
  const rl = createInterface({ input: process.stdin, terminal: false });
  rl.on("line", (line) => {
    const result = handleLine(line, backend);
    if (result.kind === "bye") {
      rl.close();
      process.exit(0);
    }
    if (result.kind === "reply") {
      process.stdout.write(JSON.stringify(result.payload) + "\n");
    }
  });
  rl.on("close", () => {
    process.exit(0);
  });
}

function main(): void {
  let backend: LinearModel;
  try {
    const args = parseArgs(process.argv.slice(2));
    backend = LinearModel.fromFile(args.model);
    if (args.task && args.task !== backend.task) {
      throw new Error(`spec ${args.model} is a ${backend.task} model, not ${args.task}`);
    }
  } catch (err) {
    process.stderr.write(`fatal: ${err instanceof Error ? err.message : String(err)}\n`);
    process.exit(1);
  }
  serve(backend);
}

main();
