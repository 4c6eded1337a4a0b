/** Layers, initialization and the Adam optimizer. */

import { Tensor, addBias, matmul, param, reshape } from "./tensor.js";

/** Deterministic 32-bit PRNG (mulberry32). */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function uniformInit(rng: () => number, size: number, bound: number): Float64Array {
  const data = new Float64Array(size);
  for (let i = 0; i < size; i++) data[i] = (rng() * 2 - 1) * bound;
  return data;
}

export class Linear {
  weight: Tensor; // [inDim, outDim]
  bias: Tensor | null;

  constructor(rng: () => number, inDim: number, outDim: number, useBias = true) {
    const bound = Math.sqrt(6 / (inDim + outDim));
    this.weight = param(uniformInit(rng, inDim * outDim, bound), [inDim, outDim]);
    this.bias = useBias ? param(new Float64Array(outDim), [outDim]) : null;
  }

  /** x [..., inDim] -> [..., outDim] */
  apply(x: Tensor): Tensor {
    const inDim = this.weight.shape[0];
    const outDim = this.weight.shape[1];
    const lead = x.shape.slice(0, -1);
    const rows = x.size / inDim;
    let y = matmul(reshape(x, [rows, inDim]), this.weight);
    if (this.bias) y = addBias(y, this.bias);
    return reshape(y, [...lead, outDim]);
  }

  params(): Tensor[] {
    return this.bias ? [this.weight, this.bias] : [this.weight];
  }
}

export class Adam {
  private m = new Map<Tensor, Float64Array>();
  private v = new Map<Tensor, Float64Array>();
  private t = 0;

  constructor(public parameters: Tensor[], public lr = 0.001,
    public beta1 = 0.9, public beta2 = 0.999, public eps = 1e-8) {}

  step(): void {
    this.t += 1;
    const bc1 = 1 - Math.pow(this.beta1, this.t);
    const bc2 = 1 - Math.pow(this.beta2, this.t);
    for (const p of this.parameters) {
      if (p.grad === null) continue;
      let m = this.m.get(p);
      let v = this.v.get(p);
      if (!m) { m = new Float64Array(p.size); this.m.set(p, m); }
      if (!v) { v = new Float64Array(p.size); this.v.set(p, v); }
      for (let i = 0; i < p.size; i++) {
        const g = p.grad[i];
        m[i] = this.beta1 * m[i] + (1 - this.beta1) * g;
        v[i] = this.beta2 * v[i] + (1 - this.beta2) * g * g;
        p.data[i] -= this.lr * (m[i] / bc1) / (Math.sqrt(v[i] / bc2) + this.eps);
      }
    }
  }

  zeroGrad(): void {
    for (const p of this.parameters) {
      if (p.grad !== null) p.grad.fill(0);
    }
  }
}

/** Area under the ROC curve by rank statistic (average ranks on ties). */
export function rocAuc(scores: number[], labels: number[]): number {
  const order = scores.map((s, i) => i).sort((a, b) => scores[a] - scores[b]);
  const ranks = new Float64Array(scores.length);
  let i = 0;
  while (i < order.length) {
    let j = i;
    while (j + 1 < order.length && scores[order[j + 1]] === scores[order[i]]) j++;
    const avg = (i + j) / 2 + 1;
    for (let k = i; k <= j; k++) ranks[order[k]] = avg;
    i = j + 1;
  }
  let posRankSum = 0;
  let nPos = 0;
  for (let k = 0; k < labels.length; k++) {
    if (labels[k] === 1) {
      posRankSum += ranks[k];
      nPos += 1;
    }
  }
  const nNeg = labels.length - nPos;
  if (nPos === 0 || nNeg === 0) return 0.5;
  return (posRankSum - (nPos * (nPos + 1)) / 2) / (nPos * nNeg);
}
