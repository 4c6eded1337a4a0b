/**
 * Triangle-interest ranking model.
 *
 * Behaviors and the target item are each represented by a set of n
 * triangles per order. Triangle node embeddings are mean-pooled, the n
 * triangles interact through multi-head self-attention and are pooled to
 * one vector per behavior, a second attention block refines the behavior
 * sequence (supervised by a next-item auxiliary loss), position-aware
 * attention against the target collapses the sequence, and per-order
 * vectors fuse through attention against the user embedding before the
 * prediction MLP. The no-triangle ablation feeds raw item embeddings
 * through the same refiner/attention/MLP stack.
 */

import { MultiHeadSelfAttention } from "./attention.js";
import { Adam, Linear, makeRng, uniformInit } from "./nn.js";
import {
  Tensor,
  add,
  backward,
  bmm,
  concatLastDim,
  dotLast,
  embed,
  logSigmoid,
  maskedMean,
  matmul,
  mulElem,
  param,
  relu,
  reshape,
  resetTape,
  scale,
  sigmoid,
  sliceAxis1,
  sliceLastDim,
  softmaxMaskedLast,
  stackAxis1,
  scoresAgainst,
  tensor,
  weightedSumAxis1,
} from "./tensor.js";

export type Aggregation = "mean" | "weight" | "attention";
export type RefinerCollapse = "concat" | "headmean";

export interface ModelConfig {
  itemVocab: number;
  userVocab: number;
  embedDim: number;          // d
  posDim: number;            // d_p
  heads: number;
  historyLen: number;        // L
  trianglesPerItem: number;  // n, must match the index
  orders: number[];
  contextDim: number;
  aggregation: Aggregation;
  refinerCollapse: RefinerCollapse;
  lambda: number;
  useTriangles: boolean;
  mlpHidden: [number, number];
  lr: number;
  seed: number;
}

export const defaultConfig: Omit<ModelConfig, "itemVocab" | "userVocab"> = {
  embedDim: 18,
  posDim: 2,
  heads: 3,
  historyLen: 8,
  trianglesPerItem: 4,
  orders: [0, 1, 2],
  contextDim: 4,
  aggregation: "mean",
  refinerCollapse: "concat",
  lambda: 1.0,
  useTriangles: true,
  mlpHidden: [200, 80],
  lr: 0.001,
  seed: 0,
};

/** One order's triangle slab for a group of G slots. */
export interface TriangleSlab {
  ids: Int32Array;        // [G * n * 3]
  mask: Float64Array;     // [G * n], 1 = real triangle
  relevance: Float64Array; // [G * n]
}

export interface Batch {
  size: number;
  userIds: Int32Array;           // [B]
  behaviorIds: Int32Array;       // [B * L]
  behaviorMask: Float64Array;    // [B * L]
  positions: Int32Array;         // [B * L], reverse order, 0 = pad
  negativeIds: Int32Array;       // [B * L], aux-loss negatives per step
  behaviorTris: Map<number, TriangleSlab>; // order -> slab over G = B*L
  targetIds: Int32Array;         // [B]
  targetTris: Map<number, TriangleSlab>;   // order -> slab over G = B
  context: Float64Array;         // [B * contextDim]
  labels: Float64Array;          // [B]
}

export interface ForwardResult {
  logits: Tensor;        // [B]
  probs: Float64Array;
  lossTarget: Tensor;
  lossAux: Tensor;
  lossTotal: Tensor;
}

export class TginModel {
  cfg: ModelConfig;
  itemEmb: Tensor;
  userEmb: Tensor;
  posEmb: Tensor;
  interAttn: Map<number, MultiHeadSelfAttention>;
  aggQuery: Tensor;                  // attention-pooling query
  refiner: MultiHeadSelfAttention;
  headLift: Tensor[];                // per-head d_h -> d lifts ("headmean")
  posQ: Linear;
  posK: Linear;
  posV: Linear;
  fuseW: Tensor;                     // [d, d]
  mlp: [Linear, Linear, Linear];

  constructor(cfg: ModelConfig) {
    this.cfg = cfg;
    const rng = makeRng(cfg.seed * 7919 + 13);
    const d = cfg.embedDim;
    this.itemEmb = param(uniformInit(rng, cfg.itemVocab * d, 0.2), [cfg.itemVocab, d]);
    this.userEmb = param(uniformInit(rng, cfg.userVocab * d, 0.15), [cfg.userVocab, d]);
    this.posEmb = param(uniformInit(rng, (cfg.historyLen + 1) * cfg.posDim, 0.05),
      [cfg.historyLen + 1, cfg.posDim]);
    this.interAttn = new Map(
      cfg.orders.map((k) => [k, new MultiHeadSelfAttention(rng, d, cfg.heads)]));
    this.aggQuery = param(uniformInit(rng, d, 0.1), [d]);
    this.refiner = new MultiHeadSelfAttention(rng, d, cfg.heads);
    const dh = d / cfg.heads;
    this.headLift = Array.from({ length: cfg.heads }, () =>
      param(uniformInit(rng, dh * d, Math.sqrt(6 / (dh + d))), [dh, d]));
    this.posQ = new Linear(rng, d, d, false);
    this.posK = new Linear(rng, d, d, false);
    this.posV = new Linear(rng, cfg.posDim, d, false);
    this.fuseW = param(uniformInit(rng, d * d, Math.sqrt(3 / d)), [d, d]);
    const featDim = 3 * d + cfg.contextDim;
    this.mlp = [
      new Linear(rng, featDim, cfg.mlpHidden[0]),
      new Linear(rng, cfg.mlpHidden[0], cfg.mlpHidden[1]),
      new Linear(rng, cfg.mlpHidden[1], 1),
    ];
  }

  params(): Tensor[] {
    const out = [this.itemEmb, this.userEmb, this.posEmb, this.aggQuery,
      this.fuseW, ...this.headLift];
    for (const attn of this.interAttn.values()) out.push(...attn.params());
    out.push(...this.refiner.params());
    out.push(...this.posQ.params(), ...this.posK.params(), ...this.posV.params());
    for (const layer of this.mlp) out.push(...layer.params());
    return out;
  }

  /** Mean of the three member embeddings per triangle: ids [G*n*3] -> [G, n, d]. */
  intraAggregate(slab: TriangleSlab, groups: number): Tensor {
    const n = this.cfg.trianglesPerItem;
    const total = groups * n;
    const pick = (offset: number) => {
      const ids = new Int32Array(total);
      for (let i = 0; i < total; i++) ids[i] = slab.ids[i * 3 + offset];
      return embed(this.itemEmb, ids, [total]);
    };
    const mean = scale(add(add(pick(0), pick(1)), pick(2)), 1 / 3);
    return reshape(mean, [groups, n, this.cfg.embedDim]);
  }

  /** Triangle interaction (per order) followed by pooling to one vector. */
  interAggregate(order: number, h: Tensor, slab: TriangleSlab): Tensor {
    const [groups, n, d] = h.shape;
    const z = this.interAttn.get(order)!.apply(h, slab.mask); // [G, n, d]
    if (this.cfg.aggregation === "attention") {
      const scores = reshape(
        matmul(reshape(z, [groups * n, d]), reshape(this.aggQuery, [d, 1])),
        [groups, n]);
      const probs = softmaxMaskedLast(scores, slab.mask);
      return reshape(bmm(reshape(probs, [groups, 1, n]), z), [groups, d]);
    }
    const weights = new Float64Array(groups * n);
    for (let g = 0; g < groups; g++) {
      let total = 0;
      for (let t = 0; t < n; t++) {
        const live = slab.mask[g * n + t] > 0;
        const w = this.cfg.aggregation === "weight"
          ? (live ? slab.relevance[g * n + t] : 0)
          : (live ? 1 : 0);
        weights[g * n + t] = w;
        total += w;
      }
      if (total === 0) { // all-zero relevance falls back to plain mean
        for (let t = 0; t < n; t++) {
          weights[g * n + t] = slab.mask[g * n + t] > 0 ? 1 : 0;
          total += weights[g * n + t];
        }
      }
      if (total > 0) {
        for (let t = 0; t < n; t++) weights[g * n + t] /= total;
      }
    }
    return weightedSumAxis1(z, weights);
  }

  /** Second attention block over the L behaviors. */
  refine(zb: Tensor, behaviorMask: Float64Array): Tensor {
    const [b, l, d] = zb.shape;
    if (this.cfg.refinerCollapse === "concat") {
      return this.refiner.apply(zb, behaviorMask);
    }
    // parallel per-head interests: lift each head to d and average
    const detail = this.refiner.applyDetailed(zb, behaviorMask, false);
    const dh = d / this.cfg.heads;
    let acc: Tensor | null = null;
    for (let h = 0; h < this.cfg.heads; h++) {
      const slice = reshape(
        sliceLastDim(detail.output, h * dh, dh), [b * l, dh]);
      const lifted = reshape(matmul(slice, this.headLift[h]), [b, l, d]);
      acc = acc === null ? lifted : add(acc, lifted);
    }
    return scale(acc!, 1 / this.cfg.heads);
  }

  /**
   * Next-item supervision: refined step t should score its true successor
   * above a sampled negative. Mean over valid (sample, step) pairs.
   */
  auxLoss(refined: Tensor, batch: Batch): Tensor {
    const l = this.cfg.historyLen;
    const b = batch.size;
    if (l < 2) return tensor([0], [1]);
    const steps = l - 1;
    const nextIds = new Int32Array(b * steps);
    const negIds = new Int32Array(b * steps);
    const valid = new Float64Array(b * steps);
    for (let i = 0; i < b; i++) {
      for (let t = 0; t < steps; t++) {
        nextIds[i * steps + t] = batch.behaviorIds[i * l + t + 1];
        negIds[i * steps + t] = batch.negativeIds[i * l + t + 1];
        valid[i * steps + t] =
          batch.behaviorMask[i * l + t] * batch.behaviorMask[i * l + t + 1];
      }
    }
    const bts = sliceAxis1(refined, 0, steps);                   // [B, L-1, d]
    const zNext = embed(this.itemEmb, nextIds, [b, steps]);
    const zNeg = embed(this.itemEmb, negIds, [b, steps]);
    const posTerm = logSigmoid(dotLast(bts, zNext));
    const negTerm = logSigmoid(scale(dotLast(bts, zNeg), -1));
    return scale(maskedMean(add(posTerm, negTerm), valid), -1);
  }

  /** Position-aware attention of the target over refined behaviors. */
  positionAttention(zt: Tensor, refined: Tensor, batch: Batch): Tensor {
    const [b, l, d] = refined.shape;
    const query = this.posQ.apply(zt);                            // [B, d]
    const keys = this.posK.apply(refined);                        // [B, L, d]
    const pos = embed(this.posEmb, batch.positions, [b, l]);      // [B, L, d_p]
    const posVal = this.posV.apply(pos);                          // [B, L, d]
    const gates = sigmoid(add(keys, posVal));
    const coef = softmaxMaskedLast(scoresAgainst(gates, query), batch.behaviorMask);
    return reshape(bmm(reshape(coef, [b, 1, l]), refined), [b, d]);
  }

  /** Attention over per-order vectors against the user embedding. */
  fuseLevels(levels: Tensor[], xu: Tensor): Tensor {
    if (levels.length === 1) return levels[0];
    const [b, d] = xu.shape;
    const stacked = stackAxis1(levels);                           // [B, K, d]
    const vw = reshape(
      matmul(reshape(stacked, [b * levels.length, d]), this.fuseW),
      [b, levels.length, d]);
    const uw = matmul(xu, this.fuseW);                            // [B, d]
    const e = softmaxMaskedLast(scoresAgainst(vw, uw));           // [B, K]
    return reshape(bmm(reshape(e, [b, 1, levels.length]), stacked), [b, d]);
  }

  /** MLP head and the combined loss. */
  predictAndLoss(xu: Tensor, xb: Tensor, context: Tensor, xt: Tensor,
    labels: Float64Array, lossAux: Tensor): ForwardResult {
    const b = xu.shape[0];
    const feats = concatLastDim([xu, xb, context, xt]);
    const h1 = relu(this.mlp[0].apply(feats));
    const h2 = relu(this.mlp[1].apply(h1));
    const logits = reshape(this.mlp[2].apply(h2), [b]);
    const y = tensor(labels, [b]);
    const oneMinus = tensor(labels.map((v) => 1 - v), [b]);
    const perSample = add(
      mulElem(y, logSigmoid(logits)),
      mulElem(oneMinus, logSigmoid(scale(logits, -1))));
    const lossTarget = scale(maskedMean(perSample), -1);
    const lossTotal = add(lossTarget, scale(lossAux, this.cfg.lambda));
    const probs = new Float64Array(b);
    for (let i = 0; i < b; i++) probs[i] = 1 / (1 + Math.exp(-logits.data[i]));
    return { logits, probs, lossTarget, lossAux, lossTotal };
  }

  forward(batch: Batch): ForwardResult {
    const cfg = this.cfg;
    const b = batch.size;
    const l = cfg.historyLen;
    const xu = embed(this.userEmb, batch.userIds, [b]);
    const context = tensor(batch.context, [b, cfg.contextDim]);

    if (!cfg.useTriangles) {
      const xb = reshape(
        embed(this.itemEmb, batch.behaviorIds, [b * l]), [b, l, cfg.embedDim]);
      const refined = this.refine(xb, batch.behaviorMask);
      const lossAux = this.auxLoss(refined, batch);
      const xt = embed(this.itemEmb, batch.targetIds, [b]);
      const v = this.positionAttention(xt, refined, batch);
      return this.predictAndLoss(xu, v, context, xt, batch.labels, lossAux);
    }

    const levelVs: Tensor[] = [];
    const levelTargets: Tensor[] = [];
    const auxTerms: Tensor[] = [];
    for (const k of cfg.orders) {
      const bSlab = batch.behaviorTris.get(k)!;
      const tSlab = batch.targetTris.get(k)!;
      const hb = this.intraAggregate(bSlab, b * l);               // [B*L, n, d]
      const zbFlat = this.interAggregate(k, hb, bSlab);           // [B*L, d]
      const zb = reshape(zbFlat, [b, l, cfg.embedDim]);
      const ht = this.intraAggregate(tSlab, b);                   // [B, n, d]
      const zt = this.interAggregate(k, ht, tSlab);               // [B, d]
      const refined = this.refine(zb, batch.behaviorMask);
      auxTerms.push(this.auxLoss(refined, batch));
      levelVs.push(this.positionAttention(zt, refined, batch));
      levelTargets.push(zt);
    }
    let lossAux = auxTerms[0];
    for (let i = 1; i < auxTerms.length; i++) lossAux = add(lossAux, auxTerms[i]);
    lossAux = scale(lossAux, 1 / auxTerms.length);
    const xb = this.fuseLevels(levelVs, xu);
    const xt = this.fuseLevels(levelTargets, xu);
    return this.predictAndLoss(xu, xb, context, xt, batch.labels, lossAux);
  }

  trainStep(batch: Batch, optimizer: Adam): ForwardResult {
    resetTape();
    optimizer.zeroGrad();
    const result = this.forward(batch);
    backward(result.lossTotal);
    optimizer.step();
    return result;
  }
}
