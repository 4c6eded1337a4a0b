/**
 * Masked multi-head self-attention.
 *
 * The embedding dim d splits into h head slices of d_h; each head applies
 * its own d_h x d_h query/key/value projections, scores scale by
 * 1/sqrt(d_h), and the concatenated heads go through an output projection.
 * Masked key positions receive exactly zero attention weight.
 */

import {
  Tensor,
  bmm,
  concatLastDim,
  matmul,
  param,
  reshape,
  scale,
  sliceLastDim,
  softmaxMaskedLast,
  transposeLast2,
} from "./tensor.js";
import { uniformInit } from "./nn.js";

export interface AttentionResult {
  output: Tensor;           // [G, s, d]
  attention: Tensor[];      // per head, [G, s, s]
}

export class MultiHeadSelfAttention {
  readonly headDim: number;
  wq: Tensor[];
  wk: Tensor[];
  wv: Tensor[];
  wo: Tensor; // [d, d]

  constructor(rng: () => number, readonly dim: number, readonly heads: number) {
    if (dim % heads !== 0) throw new Error(`heads ${heads} must divide dim ${dim}`);
    this.headDim = dim / heads;
    const bound = Math.sqrt(6 / (2 * this.headDim));
    const mk = () => param(uniformInit(rng, this.headDim * this.headDim, bound),
      [this.headDim, this.headDim]);
    this.wq = Array.from({ length: heads }, mk);
    this.wk = Array.from({ length: heads }, mk);
    this.wv = Array.from({ length: heads }, mk);
    this.wo = param(uniformInit(rng, dim * dim, Math.sqrt(3 / dim)), [dim, dim]);
  }

  /**
   * x [G, s, d]; keepMask flat [G*s] with 1 = attend to this position.
   * Per-head outputs are concatenated and projected; when `project` is
   * false the concatenated heads are returned raw.
   */
  applyDetailed(x: Tensor, keepMask: Float64Array | null,
    project = true): AttentionResult {
    const [g, s, d] = x.shape;
    if (d !== this.dim) throw new Error(`dim mismatch: ${d} vs ${this.dim}`);
    const dh = this.headDim;
    let mask3: Float64Array | null = null;
    if (keepMask !== null) {
      mask3 = new Float64Array(g * s * s);
      for (let b = 0; b < g; b++) {
        for (let i = 0; i < s; i++) {
          for (let j = 0; j < s; j++) {
            mask3[(b * s + i) * s + j] = keepMask[b * s + j];
          }
        }
      }
    }
    const headOuts: Tensor[] = [];
    const attns: Tensor[] = [];
    for (let h = 0; h < this.heads; h++) {
      const slice = sliceLastDim(x, h * dh, dh);            // [G, s, dh]
      const flat = reshape(slice, [g * s, dh]);
      const q = reshape(matmul(flat, this.wq[h]), [g, s, dh]);
      const k = reshape(matmul(flat, this.wk[h]), [g, s, dh]);
      const v = reshape(matmul(flat, this.wv[h]), [g, s, dh]);
      const scores = scale(bmm(q, transposeLast2(k)), 1 / Math.sqrt(dh));
      const attn = softmaxMaskedLast(scores, mask3);        // [G, s, s]
      attns.push(attn);
      headOuts.push(bmm(attn, v));                          // [G, s, dh]
    }
    let output = concatLastDim(headOuts);                   // [G, s, d]
    if (project) {
      output = reshape(matmul(reshape(output, [g * s, d]), this.wo), [g, s, d]);
    }
    return { output, attention: attns };
  }

  apply(x: Tensor, keepMask: Float64Array | null = null): Tensor {
    return this.applyDetailed(x, keepMask).output;
  }

  params(): Tensor[] {
    return [...this.wq, ...this.wk, ...this.wv, this.wo];
  }
}
