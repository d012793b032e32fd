/**
 * Shared record shapes for the adapter. These mirror the corpus and
 * evaluator file formats exactly; the adapter talks to the pipeline
 * only through those files.
 */

export type Label = "vulnerable" | "secure";
export type Prediction = Label | "abstain";

/** One line of the corpus manifest (only the fields the adapter uses). */
export interface ManifestRecord {
  id: string;
  file: string;
  label: Label;
  split: "train" | "test";
}

/** One line of instructions.jsonl. */
export interface InstructionExample {
  instruction: string;
  input: string;
  output: Label;
}

/** One line of a raw model-output file. */
export interface RawModelOutput {
  id: string;
  text: string;
}

/** One line of predictions.jsonl (the evaluator's input schema). */
export interface PredictionRecord {
  id: string;
  prediction: Prediction;
}

export function parseManifest(content: string): ManifestRecord[] {
  const records: ManifestRecord[] = [];
  for (const line of content.split("\n")) {
    if (!line.trim()) continue;
    const data = JSON.parse(line);
    if (typeof data.id !== "string" || typeof data.file !== "string") {
      throw new Error(`manifest line missing id/file: ${line}`);
    }
    if (data.label !== "vulnerable" && data.label !== "secure") {
      throw new Error(`manifest line has bad label: ${line}`);
    }
    if (data.split !== "train" && data.split !== "test") {
      throw new Error(`manifest line has bad split: ${line}`);
    }
    records.push({
      id: data.id,
      file: data.file,
      label: data.label,
      split: data.split,
    });
  }
  return records;
}
