import fs from "fs";
import path from "path";

import { instructionPrompt } from "./prompt.js";
import { InstructionExample, parseManifest } from "./schema.js";

export interface ExportResult {
  count: number;
  errors: string[]; // one message per record whose contract file is missing
}

/**
 * Write one instruction-tuning example per manifest record of the given
 * split, in manifest order, to a line-delimited file. Missing contract
 * files are reported per record and skipped; the export continues.
 */
export function exportInstructions(
  manifestPath: string,
  split: "train" | "test",
  outPath: string,
): ExportResult {
  const manifestDir = path.dirname(path.resolve(manifestPath));
  const records = parseManifest(fs.readFileSync(manifestPath, "utf-8"));
  const prompt = instructionPrompt();
  const lines: string[] = [];
  const errors: string[] = [];
  for (const record of records) {
    if (record.split !== split) continue;
    const contractPath = path.join(manifestDir, record.file);
    let source: string;
    try {
      source = fs.readFileSync(contractPath, "utf-8");
    } catch {
      errors.push(`${record.id}: contract file missing (${record.file})`);
      continue;
    }
    const example: InstructionExample = {
      instruction: prompt,
      input: source,
      output: record.label,
    };
    lines.push(JSON.stringify(example));
  }
  fs.writeFileSync(outPath, lines.map((l) => l + "\n").join(""), "utf-8");
  return { count: lines.length, errors };
}
