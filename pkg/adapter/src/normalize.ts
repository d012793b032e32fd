import fs from "fs";

import { parseManifest, Prediction, PredictionRecord } from "./schema.js";

/**
 * Map free-form model text to a prediction label. Rule-based and total:
 * the leading token decides ("vulnerable"/"yes" vs "secure"/"no", with
 * "not vulnerable" counting as secure); anything else, including empty
 * or hedged text, abstains.
 */
export function normalizeLabel(text: string): Prediction {
  const words = text
    .toLowerCase()
    .split(/[^a-z0-9]+/)
    .filter(Boolean);
  if (words.length === 0) return "abstain";
  const [first, second] = words;
  if (first === "vulnerable" || first === "yes") return "vulnerable";
  if (first === "secure" || first === "no") return "secure";
  if (first === "not" && second === "vulnerable") return "secure";
  return "abstain";
}

export interface NormalizeResult {
  written: number;
  abstained: number;
  errors: string[]; // unknown ids and malformed lines; processing continues
}

/**
 * Convert raw model outputs ({"id","text"} per line) into the
 * evaluator's predictions.jsonl schema. Unknown ids produce an error
 * entry and are dropped; every kept line gets a prediction (abstain as
 * the fallback).
 */
export function normalizeOutputs(
  rawPath: string,
  manifestPath: string,
  outPath: string,
): NormalizeResult {
  const records = parseManifest(fs.readFileSync(manifestPath, "utf-8"));
  const testIds = new Set(
    records.filter((r) => r.split === "test").map((r) => r.id),
  );
  const errors: string[] = [];
  const out: PredictionRecord[] = [];
  const seen = new Set<string>();
  let abstained = 0;
  const content = fs.readFileSync(rawPath, "utf-8");
  let lineno = 0;
  for (const line of content.split("\n")) {
    lineno += 1;
    if (!line.trim()) continue;
    let data: unknown;
    try {
      data = JSON.parse(line);
    } catch {
      errors.push(`line ${lineno}: malformed JSON`);
      continue;
    }
    const record = data as { id?: unknown; text?: unknown };
    if (typeof record.id !== "string" || typeof record.text !== "string") {
      errors.push(`line ${lineno}: expected {"id", "text"}`);
      continue;
    }
    if (!testIds.has(record.id)) {
      errors.push(`line ${lineno}: unknown id ${record.id}`);
      continue;
    }
    if (seen.has(record.id)) {
      errors.push(`line ${lineno}: duplicate id ${record.id}`);
      continue;
    }
    seen.add(record.id);
    const prediction = normalizeLabel(record.text);
    if (prediction === "abstain") abstained += 1;
    out.push({ id: record.id, prediction });
  }
  fs.writeFileSync(
    outPath,
    out.map((r) => JSON.stringify(r) + "\n").join(""),
    "utf-8",
  );
  return { written: out.length, abstained, errors };
}
