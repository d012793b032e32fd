import fs from "fs";
import path from "path";

/**
 * LoRA fine-tuning entrypoint (plan-only). This toolkit validates the
 * configuration and emits a training plan for an external GPU runner;
 * no trainer is bundled, so nothing here touches model weights. All
 * hyperparameters are required flags: there are no blessed defaults.
 */
export interface FinetuneConfig {
  dataset: string;
  baseModel: string;
  rank: number;
  alpha: number;
  targetModules: string[];
  epochs: number;
  learningRate: number;
  outDir: string;
  dryRun: boolean;
}

export class ConfigError extends Error {}

export function validateConfig(config: FinetuneConfig): void {
  if (!config.dataset) {
    throw new ConfigError("--dataset is required");
  }
  if (!fs.existsSync(config.dataset)) {
    throw new ConfigError(`dataset path does not exist: ${config.dataset}`);
  }
  if (!config.baseModel) {
    throw new ConfigError("--base-model is required");
  }
  if (!Number.isInteger(config.rank) || config.rank <= 0) {
    throw new ConfigError(`rank must be a positive integer, got ${config.rank}`);
  }
  if (!(config.alpha > 0)) {
    throw new ConfigError(`alpha must be positive, got ${config.alpha}`);
  }
  if (config.targetModules.length === 0) {
    throw new ConfigError("--target-modules must name at least one module");
  }
  if (!Number.isInteger(config.epochs) || config.epochs <= 0) {
    throw new ConfigError(`epochs must be a positive integer, got ${config.epochs}`);
  }
  if (!(config.learningRate > 0)) {
    throw new ConfigError(`learning rate must be positive, got ${config.learningRate}`);
  }
  if (!config.outDir) {
    throw new ConfigError("--out-dir is required");
  }
}

export interface TrainingPlan {
  baseModel: string;
  dataset: string;
  adapter: {
    method: "lora";
    rank: number;
    alpha: number;
    targetModules: string[];
  };
  quantization: "dynamic-4bit";
  epochs: number;
  learningRate: number;
  outDir: string;
}

export function resolvePlan(config: FinetuneConfig): TrainingPlan {
  validateConfig(config);
  return {
    baseModel: config.baseModel,
    dataset: path.resolve(config.dataset),
    adapter: {
      method: "lora",
      rank: config.rank,
      alpha: config.alpha,
      targetModules: config.targetModules,
    },
    quantization: "dynamic-4bit",
    epochs: config.epochs,
    learningRate: config.learningRate,
    outDir: path.resolve(config.outDir),
  };
}

/**
 * Validate, echo the resolved plan, and (unless dry-run) write it to
 * outDir/plan.json for the external runner. Returns the plan path, or
 * null for a dry run.
 */
export function finetuneEntrypoint(config: FinetuneConfig): string | null {
  const plan = resolvePlan(config);
  console.log(JSON.stringify(plan, null, 2));
  if (config.dryRun) {
    return null;
  }
  fs.mkdirSync(plan.outDir, { recursive: true });
  const planPath = path.join(plan.outDir, "plan.json");
  fs.writeFileSync(planPath, JSON.stringify(plan, null, 2) + "\n", "utf-8");
  return planPath;
}
