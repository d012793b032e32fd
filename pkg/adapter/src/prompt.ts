import fs from "fs";
import path from "path";
import { fileURLToPath } from "url";

/**
 * The classification prompt ships as a versioned asset so exports stay
 * byte-comparable across runs and prompt revisions are explicit.
 */
export const PROMPT_VERSION = "v1";

export function instructionPrompt(): string {
  const here = path.dirname(fileURLToPath(import.meta.url));
  const assetPath = path.join(
    here,
    "..",
    "assets",
    `instruction_prompt_${PROMPT_VERSION}.txt`,
  );
  return fs.readFileSync(assetPath, "utf-8").trim();
}
