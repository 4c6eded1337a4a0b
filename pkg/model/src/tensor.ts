/**
 * Minimal reverse-mode autograd over float64 arrays.
 *
 * Every op records a backward closure on a global tape; `backward(loss)`
 * replays the tape in reverse. JS numbers are IEEE doubles, so gradients
 * check against central finite differences at ~1e-10 relative error.
 */

export class Tensor {
  data: Float64Array;
  shape: number[];
  grad: Float64Array | null = null;
  requiresGrad: boolean;
  backwardFn: (() => void) | null = null;

  constructor(data: Float64Array, shape: number[], requiresGrad = false) {
    if (data.length !== shape.reduce((a, b) => a * b, 1)) {
      throw new Error(`data length ${data.length} does not match shape ${shape}`);
    }
    this.data = data;
    this.shape = shape;
    this.requiresGrad = requiresGrad;
  }

  get size(): number {
    return this.data.length;
  }

  ensureGrad(): Float64Array {
    if (this.grad === null) this.grad = new Float64Array(this.size);
    return this.grad;
  }

  item(): number {
    if (this.size !== 1) throw new Error("item() on non-scalar");
    return this.data[0];
  }
}

let tape: Tensor[] = [];
let recording = true;

export function resetTape(): void {
  tape = [];
}

export function noGrad<T>(fn: () => T): T {
  const prev = recording;
  recording = false;
  try {
    return fn();
  } finally {
    recording = prev;
  }
}

function record(out: Tensor, backwardFn: () => void): Tensor {
  if (recording) {
    out.backwardFn = backwardFn;
    tape.push(out);
  }
  return out;
}

export function backward(loss: Tensor): void {
  if (loss.size !== 1) throw new Error("backward() expects a scalar loss");
  loss.ensureGrad()[0] = 1.0;
  for (let i = tape.length - 1; i >= 0; i--) {
    const node = tape[i];
    if (node.backwardFn && node.grad !== null) node.backwardFn();
  }
}

export function tensor(values: number[] | Float64Array, shape: number[]): Tensor {
  return new Tensor(Float64Array.from(values), shape);
}

export function zeros(shape: number[], requiresGrad = false): Tensor {
  return new Tensor(new Float64Array(shape.reduce((a, b) => a * b, 1)),
    shape, requiresGrad);
}

export function param(values: Float64Array, shape: number[]): Tensor {
  return new Tensor(values, shape, true);
}

function out(shape: number[], parents: Tensor[]): Tensor {
  return new Tensor(new Float64Array(shape.reduce((a, b) => a * b, 1)),
    shape, parents.some((p) => p.requiresGrad));
}

function sameShape(a: Tensor, b: Tensor): void {
  if (a.shape.length !== b.shape.length
    || a.shape.some((d, i) => d !== b.shape[i])) {
    throw new Error(`shape mismatch: ${a.shape} vs ${b.shape}`);
  }
}

// -- elementwise --------------------------------------------------------------

export function add(a: Tensor, b: Tensor): Tensor {
  sameShape(a, b);
  const y = out(a.shape, [a, b]);
  for (let i = 0; i < y.size; i++) y.data[i] = a.data[i] + b.data[i];
  return record(y, () => {
    const g = y.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i] += g[i];
    }
  });
}

/** x [..., d] + bias [d] */
export function addBias(x: Tensor, bias: Tensor): Tensor {
  const d = bias.shape[0];
  if (bias.shape.length !== 1 || x.shape[x.shape.length - 1] !== d) {
    throw new Error(`bias dim ${bias.shape} does not match ${x.shape}`);
  }
  const y = out(x.shape, [x, bias]);
  for (let i = 0; i < y.size; i++) y.data[i] = x.data[i] + bias.data[i % d];
  return record(y, () => {
    const g = y.grad!;
    if (x.requiresGrad) {
      const gx = x.ensureGrad();
      for (let i = 0; i < g.length; i++) gx[i] += g[i];
    }
    if (bias.requiresGrad) {
      const gb = bias.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i % d] += g[i];
    }
  });
}

export function scale(x: Tensor, s: number): Tensor {
  const y = out(x.shape, [x]);
  for (let i = 0; i < y.size; i++) y.data[i] = x.data[i] * s;
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let i = 0; i < g.length; i++) gx[i] += g[i] * s;
  });
}

export function mulElem(a: Tensor, b: Tensor): Tensor {
  sameShape(a, b);
  const y = out(a.shape, [a, b]);
  for (let i = 0; i < y.size; i++) y.data[i] = a.data[i] * b.data[i];
  return record(y, () => {
    const g = y.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i] * b.data[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i] += g[i] * a.data[i];
    }
  });
}

export function sigmoid(x: Tensor): Tensor {
  const y = out(x.shape, [x]);
  for (let i = 0; i < y.size; i++) {
    const v = x.data[i];
    y.data[i] = v >= 0 ? 1 / (1 + Math.exp(-v))
      : Math.exp(v) / (1 + Math.exp(v));
  }
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let i = 0; i < g.length; i++) {
      gx[i] += g[i] * y.data[i] * (1 - y.data[i]);
    }
  });
}

/** log(sigmoid(x)), numerically stable. */
export function logSigmoid(x: Tensor): Tensor {
  const y = out(x.shape, [x]);
  for (let i = 0; i < y.size; i++) {
    const v = x.data[i];
    y.data[i] = v >= 0 ? -Math.log1p(Math.exp(-v)) : v - Math.log1p(Math.exp(v));
  }
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let i = 0; i < g.length; i++) {
      const v = x.data[i];
      const sig = v >= 0 ? 1 / (1 + Math.exp(-v)) : Math.exp(v) / (1 + Math.exp(v));
      gx[i] += g[i] * (1 - sig);
    }
  });
}

export function relu(x: Tensor): Tensor {
  const y = out(x.shape, [x]);
  for (let i = 0; i < y.size; i++) y.data[i] = x.data[i] > 0 ? x.data[i] : 0;
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let i = 0; i < g.length; i++) if (x.data[i] > 0) gx[i] += g[i];
  });
}

export function tanh(x: Tensor): Tensor {
  const y = out(x.shape, [x]);
  for (let i = 0; i < y.size; i++) y.data[i] = Math.tanh(x.data[i]);
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let i = 0; i < g.length; i++) gx[i] += g[i] * (1 - y.data[i] * y.data[i]);
  });
}

// -- shape moves --------------------------------------------------------------

export function reshape(x: Tensor, shape: number[]): Tensor {
  const total = shape.reduce((a, b) => a * b, 1);
  if (total !== x.size) throw new Error(`cannot reshape ${x.shape} to ${shape}`);
  // forward buffers are never mutated after creation, so a view is safe
  const y = new Tensor(x.data, shape, x.requiresGrad);
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let i = 0; i < g.length; i++) gx[i] += g[i];
  });
}

/** x [G, m, n] -> [G, n, m] */
export function transposeLast2(x: Tensor): Tensor {
  const [g0, m, n] = x.shape;
  if (x.shape.length !== 3) throw new Error("transposeLast2 expects 3 dims");
  const y = out([g0, n, m], [x]);
  for (let g = 0; g < g0; g++) {
    const base = g * m * n;
    for (let i = 0; i < m; i++) {
      for (let j = 0; j < n; j++) {
        y.data[base + j * m + i] = x.data[base + i * n + j];
      }
    }
  }
  return record(y, () => {
    if (!x.requiresGrad) return;
    const grad = y.grad!;
    const gx = x.ensureGrad();
    for (let g = 0; g < g0; g++) {
      const base = g * m * n;
      for (let i = 0; i < m; i++) {
        for (let j = 0; j < n; j++) {
          gx[base + i * n + j] += grad[base + j * m + i];
        }
      }
    }
  });
}

/** Middle-axis slice: x [B, L, d] -> [B, size, d] starting at `start`. */
export function sliceAxis1(x: Tensor, start: number, size: number): Tensor {
  const [b, l, d] = x.shape;
  if (x.shape.length !== 3) throw new Error("sliceAxis1 expects 3 dims");
  const y = out([b, size, d], [x]);
  for (let i = 0; i < b; i++) {
    for (let t = 0; t < size; t++) {
      const src = (i * l + start + t) * d;
      const dst = (i * size + t) * d;
      for (let j = 0; j < d; j++) y.data[dst + j] = x.data[src + j];
    }
  }
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let i = 0; i < b; i++) {
      for (let t = 0; t < size; t++) {
        const src = (i * l + start + t) * d;
        const dst = (i * size + t) * d;
        for (let j = 0; j < d; j++) gx[src + j] += g[dst + j];
      }
    }
  });
}

/** Last-dim slice: x [..., d] -> [..., size] starting at `start`. */
export function sliceLastDim(x: Tensor, start: number, size: number): Tensor {
  const d = x.shape[x.shape.length - 1];
  const rows = x.size / d;
  const y = out([...x.shape.slice(0, -1), size], [x]);
  for (let r = 0; r < rows; r++) {
    for (let j = 0; j < size; j++) y.data[r * size + j] = x.data[r * d + start + j];
  }
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let r = 0; r < rows; r++) {
      for (let j = 0; j < size; j++) gx[r * d + start + j] += g[r * size + j];
    }
  });
}

export function concatLastDim(xs: Tensor[]): Tensor {
  const lead = xs[0].shape.slice(0, -1);
  const dims = xs.map((x) => x.shape[x.shape.length - 1]);
  const total = dims.reduce((a, b) => a + b, 0);
  const rows = xs[0].size / dims[0];
  const y = out([...lead, total], xs);
  let offset = 0;
  for (let k = 0; k < xs.length; k++) {
    const d = dims[k];
    for (let r = 0; r < rows; r++) {
      for (let j = 0; j < d; j++) {
        y.data[r * total + offset + j] = xs[k].data[r * d + j];
      }
    }
    offset += d;
  }
  return record(y, () => {
    const g = y.grad!;
    let off = 0;
    for (let k = 0; k < xs.length; k++) {
      const d = dims[k];
      if (xs[k].requiresGrad) {
        const gx = xs[k].ensureGrad();
        for (let r = 0; r < rows; r++) {
          for (let j = 0; j < d; j++) gx[r * d + j] += g[r * total + off + j];
        }
      }
      off += d;
    }
  });
}

/** Stack K tensors of shape [B, d] into [B, K, d]. */
export function stackAxis1(xs: Tensor[]): Tensor {
  const [b, d] = xs[0].shape;
  const k = xs.length;
  const y = out([b, k, d], xs);
  for (let t = 0; t < k; t++) {
    for (let i = 0; i < b; i++) {
      for (let j = 0; j < d; j++) {
        y.data[(i * k + t) * d + j] = xs[t].data[i * d + j];
      }
    }
  }
  return record(y, () => {
    const g = y.grad!;
    for (let t = 0; t < k; t++) {
      if (!xs[t].requiresGrad) continue;
      const gx = xs[t].ensureGrad();
      for (let i = 0; i < b; i++) {
        for (let j = 0; j < d; j++) gx[i * d + j] += g[(i * k + t) * d + j];
      }
    }
  });
}

// -- linear algebra -----------------------------------------------------------

export function matmul(a: Tensor, b: Tensor): Tensor {
  const [m, k] = a.shape;
  const [k2, n] = b.shape;
  if (a.shape.length !== 2 || b.shape.length !== 2 || k !== k2) {
    throw new Error(`matmul shapes ${a.shape} x ${b.shape}`);
  }
  const y = out([m, n], [a, b]);
  const ad = a.data, bd = b.data, yd = y.data;
  for (let i = 0; i < m; i++) {
    for (let p = 0; p < k; p++) {
      const av = ad[i * k + p];
      if (av === 0) continue;
      const brow = p * n, yrow = i * n;
      for (let j = 0; j < n; j++) yd[yrow + j] += av * bd[brow + j];
    }
  }
  return record(y, () => {
    const g = y.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < m; i++) {
        for (let j = 0; j < n; j++) {
          const gv = g[i * n + j];
          if (gv === 0) continue;
          const arow = i * k;
          for (let p = 0; p < k; p++) ga[arow + p] += gv * bd[p * n + j];
        }
      }
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < m; i++) {
        for (let p = 0; p < k; p++) {
          const av = ad[i * k + p];
          if (av === 0) continue;
          const brow = p * n, grow = i * n;
          for (let j = 0; j < n; j++) gb[brow + j] += av * g[grow + j];
        }
      }
    }
  });
}

/** Batched matmul: [G, m, k] x [G, k, n] -> [G, m, n]. */
export function bmm(a: Tensor, b: Tensor): Tensor {
  const [g0, m, k] = a.shape;
  const [g1, k2, n] = b.shape;
  if (g0 !== g1 || k !== k2) throw new Error(`bmm shapes ${a.shape} x ${b.shape}`);
  const y = out([g0, m, n], [a, b]);
  for (let g = 0; g < g0; g++) {
    const ab = g * m * k, bb = g * k * n, yb = g * m * n;
    for (let i = 0; i < m; i++) {
      for (let p = 0; p < k; p++) {
        const av = a.data[ab + i * k + p];
        if (av === 0) continue;
        for (let j = 0; j < n; j++) y.data[yb + i * n + j] += av * b.data[bb + p * n + j];
      }
    }
  }
  return record(y, () => {
    const g = y.grad!;
    for (let gi = 0; gi < g0; gi++) {
      const ab = gi * m * k, bb = gi * k * n, yb = gi * m * n;
      if (a.requiresGrad) {
        const ga = a.ensureGrad();
        for (let i = 0; i < m; i++) {
          for (let j = 0; j < n; j++) {
            const gv = g[yb + i * n + j];
            if (gv === 0) continue;
            for (let p = 0; p < k; p++) ga[ab + i * k + p] += gv * b.data[bb + p * n + j];
          }
        }
      }
      if (b.requiresGrad) {
        const gb = b.ensureGrad();
        for (let i = 0; i < m; i++) {
          for (let p = 0; p < k; p++) {
            const av = a.data[ab + i * k + p];
            if (av === 0) continue;
            for (let j = 0; j < n; j++) gb[bb + p * n + j] += av * g[yb + i * n + j];
          }
        }
      }
    }
  });
}

/** Row scores: a [B, K, d] against b [B, d] -> [B, K] inner products. */
export function scoresAgainst(a: Tensor, b: Tensor): Tensor {
  const [bt, k, d] = a.shape;
  if (b.shape.length !== 2 || b.shape[0] !== bt || b.shape[1] !== d) {
    throw new Error(`scoresAgainst shapes ${a.shape} vs ${b.shape}`);
  }
  const y = out([bt, k], [a, b]);
  for (let i = 0; i < bt; i++) {
    for (let t = 0; t < k; t++) {
      let acc = 0;
      for (let j = 0; j < d; j++) acc += a.data[(i * k + t) * d + j] * b.data[i * d + j];
      y.data[i * k + t] = acc;
    }
  }
  return record(y, () => {
    const g = y.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < bt; i++) {
        for (let t = 0; t < k; t++) {
          const gv = g[i * k + t];
          for (let j = 0; j < d; j++) ga[(i * k + t) * d + j] += gv * b.data[i * d + j];
        }
      }
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < bt; i++) {
        for (let t = 0; t < k; t++) {
          const gv = g[i * k + t];
          for (let j = 0; j < d; j++) gb[i * d + j] += gv * a.data[(i * k + t) * d + j];
        }
      }
    }
  });
}

/** Per-element inner products over the last dim: a, b [..., d] -> [...]. */
export function dotLast(a: Tensor, b: Tensor): Tensor {
  sameShape(a, b);
  const d = a.shape[a.shape.length - 1];
  const rows = a.size / d;
  const y = out(a.shape.slice(0, -1), [a, b]);
  for (let r = 0; r < rows; r++) {
    let acc = 0;
    for (let j = 0; j < d; j++) acc += a.data[r * d + j] * b.data[r * d + j];
    y.data[r] = acc;
  }
  return record(y, () => {
    const g = y.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let r = 0; r < rows; r++) {
        for (let j = 0; j < d; j++) ga[r * d + j] += g[r] * b.data[r * d + j];
      }
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let r = 0; r < rows; r++) {
        for (let j = 0; j < d; j++) gb[r * d + j] += g[r] * a.data[r * d + j];
      }
    }
  });
}

// -- softmax and reductions ---------------------------------------------------

/**
 * Softmax over the last dim with an optional 0/1 keep-mask. Masked slots
 * get zero probability; a fully-masked row falls back to uniform.
 */
export function softmaxMaskedLast(x: Tensor, mask: Float64Array | null = null): Tensor {
  const n = x.shape[x.shape.length - 1];
  const rows = x.size / n;
  if (mask !== null && mask.length !== x.size) {
    throw new Error("mask length does not match tensor size");
  }
  const y = out(x.shape, [x]);
  for (let r = 0; r < rows; r++) {
    let hasLive = false;
    let max = -Infinity;
    for (let j = 0; j < n; j++) {
      const live = mask === null || mask[r * n + j] > 0;
      if (live) {
        hasLive = true;
        if (x.data[r * n + j] > max) max = x.data[r * n + j];
      }
    }
    if (!hasLive) {
      for (let j = 0; j < n; j++) y.data[r * n + j] = 1 / n;
      continue;
    }
    let total = 0;
    for (let j = 0; j < n; j++) {
      const live = mask === null || mask[r * n + j] > 0;
      const e = live ? Math.exp(x.data[r * n + j] - max) : 0;
      y.data[r * n + j] = e;
      total += e;
    }
    for (let j = 0; j < n; j++) y.data[r * n + j] /= total;
  }
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad!;
    const gx = x.ensureGrad();
    for (let r = 0; r < rows; r++) {
      let dot = 0;
      for (let j = 0; j < n; j++) dot += g[r * n + j] * y.data[r * n + j];
      let live = false;
      if (mask !== null) {
        for (let j = 0; j < n; j++) if (mask[r * n + j] > 0) { live = true; break; }
      } else {
        live = true;
      }
      if (!live) continue; // uniform fallback is constant in x
      for (let j = 0; j < n; j++) {
        const keep = mask === null || mask[r * n + j] > 0;
        if (keep) gx[r * n + j] += y.data[r * n + j] * (g[r * n + j] - dot);
      }
    }
  });
}

export function sumAll(x: Tensor): Tensor {
  const y = out([1], [x]);
  let acc = 0;
  for (let i = 0; i < x.size; i++) acc += x.data[i];
  y.data[0] = acc;
  return record(y, () => {
    if (!x.requiresGrad) return;
    const g = y.grad![0];
    const gx = x.ensureGrad();
    for (let i = 0; i < x.size; i++) gx[i] += g;
  });
}

/** Mean of elements where mask > 0 (mask is a constant, not differentiated). */
export function maskedMean(x: Tensor, mask: Float64Array | null = null): Tensor {
  const y = out([1], [x]);
  let acc = 0;
  let count = 0;
  for (let i = 0; i < x.size; i++) {
    if (mask === null || mask[i] > 0) {
      acc += x.data[i];
      count += 1;
    }
  }
  y.data[0] = count > 0 ? acc / count : 0;
  return record(y, () => {
    if (!x.requiresGrad || count === 0) return;
    const g = y.grad![0] / count;
    const gx = x.ensureGrad();
    for (let i = 0; i < x.size; i++) {
      if (mask === null || mask[i] > 0) gx[i] += g;
    }
  });
}

/**
 * Weighted sum over axis 1 with constant weights:
 * x [G, n, d], w [G, n] -> [G, d]. Weights are data, not parameters.
 */
export function weightedSumAxis1(x: Tensor, w: Float64Array): Tensor {
  const [g0, n, d] = x.shape;
  if (w.length !== g0 * n) throw new Error("weight length mismatch");
  const y = out([g0, d], [x]);
  for (let g = 0; g < g0; g++) {
    for (let t = 0; t < n; t++) {
      const wv = w[g * n + t];
      if (wv === 0) continue;
      for (let j = 0; j < d; j++) {
        y.data[g * d + j] += wv * x.data[(g * n + t) * d + j];
      }
    }
  }
  return record(y, () => {
    if (!x.requiresGrad) return;
    const grad = y.grad!;
    const gx = x.ensureGrad();
    for (let g = 0; g < g0; g++) {
      for (let t = 0; t < n; t++) {
        const wv = w[g * n + t];
        if (wv === 0) continue;
        for (let j = 0; j < d; j++) {
          gx[(g * n + t) * d + j] += wv * grad[g * d + j];
        }
      }
    }
  });
}

// -- embeddings ---------------------------------------------------------------

/** Gather rows: table [V, d], ids (flat) -> [...idShape, d]. */
export function embed(table: Tensor, ids: Int32Array, idShape: number[]): Tensor {
  const [v, d] = table.shape;
  if (ids.length !== idShape.reduce((a, b) => a * b, 1)) {
    throw new Error("ids length does not match idShape");
  }
  const y = out([...idShape, d], [table]);
  for (let r = 0; r < ids.length; r++) {
    const row = ids[r];
    if (row < 0 || row >= v) throw new Error(`id ${row} outside table of ${v}`);
    for (let j = 0; j < d; j++) y.data[r * d + j] = table.data[row * d + j];
  }
  return record(y, () => {
    if (!table.requiresGrad) return;
    const g = y.grad!;
    const gt = table.ensureGrad();
    for (let r = 0; r < ids.length; r++) {
      const row = ids[r];
      for (let j = 0; j < d; j++) gt[row * d + j] += g[r * d + j];
    }
  });
}
