import fs from "fs";
import path from "path";
import { fileURLToPath } from "url";

import { parseManifest, RawModelOutput } from "./schema.js";

/** Reference confusion matrix the bundled fixture realizes. */
export const REFERENCE_MATRIX = { tn: 47, fp: 4, fn: 26, tp: 15, abstained: 28 };

interface RawTextBank {
  vulnerable_predicted_vulnerable: string[];
  vulnerable_predicted_secure: string[];
  vulnerable_abstain: string[];
  secure_predicted_secure: string[];
  secure_predicted_vulnerable: string[];
  secure_abstain: string[];
}

function loadBank(): RawTextBank {
  const here = path.dirname(fileURLToPath(import.meta.url));
  const bankPath = path.join(here, "..", "fixtures", "raw_texts.json");
  return JSON.parse(fs.readFileSync(bankPath, "utf-8")) as RawTextBank;
}

function cycle(bank: string[], n: number): string[] {
  return Array.from({ length: n }, (_, i) => bank[i % bank.length]);
}

/**
 * Materialize the bundled 120-line raw-output fixture against a concrete
 * test manifest: test ids are bucketed by actual label (sorted by id for
 * determinism) and paired with phrasing-bank texts so that normalization
 * reproduces the reference confusion matrix, abstentions included.
 */
export function craftRawOutputs(manifestPath: string, outPath: string): number {
  const records = parseManifest(fs.readFileSync(manifestPath, "utf-8"));
  const test = records
    .filter((r) => r.split === "test")
    .sort((a, b) => (a.id < b.id ? -1 : 1));
  const vuln = test.filter((r) => r.label === "vulnerable");
  const secure = test.filter((r) => r.label === "secure");
  const m = REFERENCE_MATRIX;
  const vulnAbstain = vuln.length - m.tp - m.fn;
  const secureAbstain = secure.length - m.tn - m.fp;
  if (vulnAbstain < 0 || secureAbstain < 0) {
    throw new Error(
      `test split too small for the reference matrix: ${vuln.length} vulnerable, ${secure.length} secure`,
    );
  }
  const bank = loadBank();
  const texts: string[] = [
    ...cycle(bank.vulnerable_predicted_vulnerable, m.tp),
    ...cycle(bank.vulnerable_predicted_secure, m.fn),
    ...cycle(bank.vulnerable_abstain, vulnAbstain),
    ...cycle(bank.secure_predicted_secure, m.tn),
    ...cycle(bank.secure_predicted_vulnerable, m.fp),
    ...cycle(bank.secure_abstain, secureAbstain),
  ];
  const ids = [...vuln.map((r) => r.id), ...secure.map((r) => r.id)];
  const lines: RawModelOutput[] = ids.map((id, i) => ({ id, text: texts[i] }));
  fs.writeFileSync(
    outPath,
    lines.map((l) => JSON.stringify(l) + "\n").join(""),
    "utf-8",
  );
  return lines.length;
}
