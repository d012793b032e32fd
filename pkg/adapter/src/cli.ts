#!/usr/bin/env node
/**
 * adapter: corpus-to-ML bridge.
 *
 *   adapter export --manifest PATH --split train|test --out instructions.jsonl
 *   adapter normalize --raw PATH --manifest PATH --out predictions.jsonl
 *   adapter craft-fixture --manifest PATH --out raw_outputs.jsonl
 *   adapter finetune --dataset PATH --base-model NAME --rank N --alpha N \
 *       --target-modules a,b --epochs N --learning-rate F --out-dir DIR [--dry-run]
 *
 * Exit codes: 0 success, 1 processing failure, 2 usage/config error.
 */

import { parseArgs } from "util";

import { exportInstructions } from "./export.js";
import { ConfigError, finetuneEntrypoint } from "./finetune.js";
import { craftRawOutputs } from "./fixture.js";
import { normalizeOutputs } from "./normalize.js";

function usageError(message: string): number {
  console.error(`error: ${message}`);
  return 2;
}

function cmdExport(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      manifest: { type: "string" },
      split: { type: "string" },
      out: { type: "string" },
    },
  });
  if (!values.manifest || !values.out) {
    return usageError("export requires --manifest and --out");
  }
  const split = values.split ?? "train";
  if (split !== "train" && split !== "test") {
    return usageError(`--split must be train or test, got ${split}`);
  }
  const result = exportInstructions(values.manifest, split, values.out);
  for (const message of result.errors) {
    console.error(`error: ${message}`);
  }
  console.log(`wrote ${result.count} instruction examples to ${values.out}`);
  return result.errors.length === 0 ? 0 : 1;
}

function cmdNormalize(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      raw: { type: "string" },
      manifest: { type: "string" },
      out: { type: "string" },
    },
  });
  if (!values.raw || !values.manifest || !values.out) {
    return usageError("normalize requires --raw, --manifest, and --out");
  }
  const result = normalizeOutputs(values.raw, values.manifest, values.out);
  for (const message of result.errors) {
    console.error(`error: ${message}`);
  }
  console.log(
    `wrote ${result.written} predictions (${result.abstained} abstain) to ${values.out}`,
  );
  return 0;
}

function cmdCraftFixture(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: { manifest: { type: "string" }, out: { type: "string" } },
  });
  if (!values.manifest || !values.out) {
    return usageError("craft-fixture requires --manifest and --out");
  }
  const count = craftRawOutputs(values.manifest, values.out);
  console.log(`wrote ${count} raw output lines to ${values.out}`);
  return 0;
}

function cmdFinetune(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      dataset: { type: "string" },
      "base-model": { type: "string" },
      rank: { type: "string" },
      alpha: { type: "string" },
      "target-modules": { type: "string" },
      epochs: { type: "string" },
      "learning-rate": { type: "string" },
      "out-dir": { type: "string" },
      "dry-run": { type: "boolean", default: false },
    },
  });
  try {
    const planPath = finetuneEntrypoint({
      dataset: values.dataset ?? "",
      baseModel: values["base-model"] ?? "",
      rank: Number(values.rank ?? NaN),
      alpha: Number(values.alpha ?? NaN),
      targetModules: (values["target-modules"] ?? "")
        .split(",")
        .map((s) => s.trim())
        .filter(Boolean),
      epochs: Number(values.epochs ?? NaN),
      learningRate: Number(values["learning-rate"] ?? NaN),
      outDir: values["out-dir"] ?? "",
      dryRun: values["dry-run"] ?? false,
    });
    if (planPath) {
      console.log(`training plan written to ${planPath}; run it with your GPU trainer`);
    }
    return 0;
  } catch (error) {
    if (error instanceof ConfigError) {
      return usageError(error.message);
    }
    throw error;
  }
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  switch (command) {
    case "export":
      return cmdExport(rest);
    case "normalize":
      return cmdNormalize(rest);
    case "craft-fixture":
      return cmdCraftFixture(rest);
    case "finetune":
      return cmdFinetune(rest);
    default:
      return usageError(
        `unknown command ${command ?? "(none)"}; expected export | normalize | craft-fixture | finetune`,
      );
  }
}

const invokedDirectly =
  process.argv[1] &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
