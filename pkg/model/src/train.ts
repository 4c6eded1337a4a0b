/** Mini-batch training harness with per-epoch metrics. */

import { Adam, rocAuc } from "./nn.js";
import {
  Catalog,
  Task,
  TaskOptions,
  TriangleIndexFile,
  buildTask,
  makeBatch,
  parseCatalogFile,
  parseIndexFile,
} from "./data.js";
import { Batch, ModelConfig, TginModel, defaultConfig } from "./tgin.js";
import { noGrad, resetTape } from "./tensor.js";

export interface EpochMetrics {
  epoch: number;
  lossTarget: number;
  lossAux: number;
  auc: number;
}

export interface TrainResult {
  model: TginModel;
  metrics: EpochMetrics[];
  finalAuc: number;
}

export interface TrainOptions {
  epochs: number;
  batchSize: number;
  config: ModelConfig;
  seed: number;
}

export function evaluate(model: TginModel, batches: Batch[]): number {
  const scores: number[] = [];
  const labels: number[] = [];
  noGrad(() => {
    for (const batch of batches) {
      const result = model.forward(batch);
      for (let i = 0; i < batch.size; i++) {
        scores.push(result.probs[i]);
        labels.push(batch.labels[i]);
      }
    }
  });
  resetTape();
  return rocAuc(scores, labels);
}

function toBatches(samples: Task["train"], index: TriangleIndexFile, task: Task,
  cfg: ModelConfig, batchSize: number, seedBase: number): Batch[] {
  const batches: Batch[] = [];
  for (let i = 0; i < samples.length; i += batchSize) {
    batches.push(makeBatch(samples.slice(i, i + batchSize), index, task, cfg,
      seedBase + batches.length));
  }
  return batches;
}

export function trainModel(index: TriangleIndexFile, task: Task,
  opts: TrainOptions): TrainResult {
  const cfg = opts.config;
  const model = new TginModel(cfg);
  const optimizer = new Adam(model.params(), cfg.lr);
  const trainBatches = toBatches(task.train, index, task, cfg, opts.batchSize,
    opts.seed * 1000);
  const testBatches = toBatches(task.test, index, task, cfg, opts.batchSize,
    900_000 + opts.seed);

  const metrics: EpochMetrics[] = [];
  for (let epoch = 1; epoch <= opts.epochs; epoch++) {
    let lossTarget = 0;
    let lossAux = 0;
    for (const batch of trainBatches) {
      const result = model.trainStep(batch, optimizer);
      lossTarget += result.lossTarget.item();
      lossAux += result.lossAux.item();
    }
    metrics.push({
      epoch,
      lossTarget: lossTarget / trainBatches.length,
      lossAux: lossAux / trainBatches.length,
      auc: evaluate(model, testBatches),
    });
  }
  return { model, metrics, finalAuc: metrics[metrics.length - 1].auc };
}

export function metricsTsv(metrics: EpochMetrics[]): string {
  const lines = ["epoch\tl_target\tl_aux\tauc"];
  for (const m of metrics) {
    lines.push(`${m.epoch}\t${m.lossTarget.toFixed(6)}\t${m.lossAux.toFixed(6)}`
      + `\t${m.auc.toFixed(6)}`);
  }
  return lines.join("\n") + "\n";
}

export interface RunOptions {
  indexPath: string;
  catalogPath: string;
  epochs?: number;
  batchSize?: number;
  seed?: number;
  trainSamples?: number;
  testSamples?: number;
  shuffleLabels?: boolean;
  trainBaseline?: boolean;
  overrides?: Partial<ModelConfig>;
}

/** Load files, build the task, train triangle and ablation models. */
export function runTraining(run: RunOptions): {
  tgin: TrainResult;
  baseline: TrainResult;
  task: Task;
  index: TriangleIndexFile;
  catalog: Catalog;
} {
  const index = parseIndexFile(run.indexPath);
  const catalog = parseCatalogFile(run.catalogPath);
  const seed = run.seed ?? 0;
  const taskOpts: TaskOptions = {
    trainSamples: run.trainSamples ?? 1536,
    testSamples: run.testSamples ?? 512,
    historyLen: defaultConfig.historyLen,
    contextDim: defaultConfig.contextDim,
    seed,
    shuffleLabels: run.shuffleLabels ?? false,
  };
  const task = buildTask(catalog, taskOpts);
  const base: ModelConfig = {
    ...defaultConfig,
    ...run.overrides,
    itemVocab: task.itemToId.size + 1,
    userVocab: task.userVocab,
    trianglesPerItem: index.n,
    seed,
  };
  const opts: TrainOptions = {
    epochs: run.epochs ?? 5,
    batchSize: run.batchSize ?? 128,
    config: base,
    seed,
  };
  const tgin = trainModel(index, task, opts);
  const baseline = run.trainBaseline === false
    ? tgin
    : trainModel(index, task, { ...opts, config: { ...base, useTriangles: false } });
  return { tgin, baseline, task, index, catalog };
}
