import fs from "fs";
import os from "os";
import path from "path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { exportInstructions } from "../src/export.js";
import { instructionPrompt, PROMPT_VERSION } from "../src/prompt.js";

describe("exportInstructions", () => {
  let dir: string;

  beforeEach(() => {
    dir = fs.mkdtempSync(path.join(os.tmpdir(), "adapter-export-"));
  });

  afterEach(() => {
    fs.rmSync(dir, { recursive: true, force: true });
  });

  function makeCorpus(n: number): string {
    const lines: string[] = [];
    for (let i = 0; i < n; i++) {
      const id = `c${String(i).padStart(3, "0")}`;
      const file = `train/contracts/${id}.sol`;
      fs.mkdirSync(path.join(dir, "train", "contracts"), { recursive: true });
      fs.writeFileSync(path.join(dir, file), `contract C${i} {}\n`);
      lines.push(
        JSON.stringify({
          id,
          file,
          label: i % 2 === 0 ? "vulnerable" : "secure",
          subtype: null,
          provenance: "synthetic_basic",
          split: "train",
          seed: i,
          solidity_version: "^0.8.0",
          verified_by: "both",
          review_status: "auto_verified",
        }),
      );
    }
    const manifestPath = path.join(dir, "manifest.jsonl");
    fs.writeFileSync(manifestPath, lines.join("\n") + "\n");
    return manifestPath;
  }

  it("writes one example per record with the versioned prompt", () => {
    const manifestPath = makeCorpus(6);
    const outPath = path.join(dir, "instructions.jsonl");
    const result = exportInstructions(manifestPath, "train", outPath);
    expect(result.count).toBe(6);
    expect(result.errors).toEqual([]);
    const rows = fs
      .readFileSync(outPath, "utf-8")
      .trim()
      .split("\n")
      .map((l) => JSON.parse(l));
    expect(rows).toHaveLength(6);
    for (const [i, row] of rows.entries()) {
      expect(row.instruction).toBe(instructionPrompt());
      expect(row.input).toContain(`contract C${i}`);
      expect(row.output).toBe(i % 2 === 0 ? "vulnerable" : "secure");
    }
  });

  it("empty split produces an empty file", () => {
    const manifestPath = makeCorpus(3);
    const outPath = path.join(dir, "instructions.jsonl");
    const result = exportInstructions(manifestPath, "test", outPath);
    expect(result.count).toBe(0);
    expect(fs.readFileSync(outPath, "utf-8")).toBe("");
  });

  it("reports missing contract files per record and continues", () => {
    const manifestPath = makeCorpus(4);
    fs.unlinkSync(path.join(dir, "train", "contracts", "c002.sol"));
    const outPath = path.join(dir, "instructions.jsonl");
    const result = exportInstructions(manifestPath, "train", outPath);
    expect(result.count).toBe(3);
    expect(result.errors).toHaveLength(1);
    expect(result.errors[0]).toContain("c002");
  });

  it("re-export is byte-identical", () => {
    const manifestPath = makeCorpus(5);
    const a = path.join(dir, "a.jsonl");
    const b = path.join(dir, "b.jsonl");
    exportInstructions(manifestPath, "train", a);
    exportInstructions(manifestPath, "train", b);
    expect(fs.readFileSync(a)).toEqual(fs.readFileSync(b));
  });

  it("prompt asset is versioned", () => {
    expect(PROMPT_VERSION).toBe("v1");
    expect(instructionPrompt().length).toBeGreaterThan(20);
  });
});
