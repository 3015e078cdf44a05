/**
 * Linear model backend over token-index rows.
 *
 * Loads the same JSON spec format as the engine's built-in model:
 * regression is `{"bias": b, "coefficients": {"<index>": w}}`, and
 * classification is `{"class_biases": [...], "class_coefficients":
 * [{...}, ...]}` with a softmax over the per-class linear scores.
 * Index 0 means "word absent" and contributes nothing.
 */

import { readFileSync } from "node:fs";

export type TaskKind = "regression" | "classification";

/**
 * Anyone hosting a real model implements this instead of LinearModel:
 * take a batch of index rows, return one output per row (a number for
 * regression, a probability array for classification). The server never
 * looks inside.
 */
export interface PredictBackend {
  readonly task: TaskKind;
  predict(rows: number[][]): number[] | number[][];
}

type RegressionSpec = { bias: number; coefficients: Record<string, number> };
type ClassificationSpec = {
  class_biases: number[];
  class_coefficients: Record<string, number>[];
};

function parseCoefficients(raw: Record<string, number>): Map<number, number> {
  const coeffs = new Map<number, number>();
  for (const [key, value] of Object.entries(raw)) {
    const index = Number(key);
    if (!Number.isInteger(index) || index <= 0) {
      throw new Error(`coefficient key ${key} must be a positive integer index`);
    }
    coeffs.set(index, value);
  }
  return coeffs;
}

function rowScore(bias: number, coeffs: Map<number, number>, row: number[]): number {
  let total = bias;
  for (const index of row) {
    total += coeffs.get(index) ?? 0;
  }
  return total;
}

function softmax(scores: number[]): number[] {
  const top = Math.max(...scores);
  const exps = scores.map((s) => Math.exp(s - top));
  const sum = exps.reduce((a, b) => a + b, 0);
  return exps.map((e) => e / sum);
}

export class LinearModel implements PredictBackend {
  readonly task: TaskKind;
  private bias = 0;
  private coeffs: Map<number, number> = new Map();
  private classBiases: number[] = [];
  private classCoeffs: Map<number, number>[] = [];

  constructor(spec: RegressionSpec | ClassificationSpec) {
    if ("class_biases" in spec || "class_coefficients" in spec) {
      const cls = spec as ClassificationSpec;
      if (
        !Array.isArray(cls.class_biases) ||
        !Array.isArray(cls.class_coefficients) ||
        cls.class_biases.length !== cls.class_coefficients.length ||
        cls.class_biases.length < 2
      ) {
        throw new Error("classification spec needs matching class_biases/class_coefficients for >= 2 classes");
      }
      this.task = "classification";
      this.classBiases = cls.class_biases;
      this.classCoeffs = cls.class_coefficients.map(parseCoefficients);
    } else {
      const reg = spec as RegressionSpec;
      if (typeof reg.bias !== "number" || typeof reg.coefficients !== "object") {
        throw new Error("regression spec needs 'bias' and 'coefficients'");
      }
      this.task = "regression";
      this.bias = reg.bias;
      this.coeffs = parseCoefficients(reg.coefficients);
    }
  }

  static fromFile(path: string): LinearModel {
    return new LinearModel(JSON.parse(readFileSync(path, "utf-8")));
  }

  predict(rows: number[][]): number[] | number[][] {
    if (this.task === "regression") {
      return rows.map((row) => rowScore(this.bias, this.coeffs, row));
    }
    return rows.map((row) =>
      softmax(this.classBiases.map((b, c) => rowScore(b, this.classCoeffs[c], row)))
    );
  }
}
