import { expect } from "vitest";

import { makeRng } from "../src/nn.js";
import { Tensor, backward, noGrad, resetTape } from "../src/tensor.js";

/**
 * Compare analytic gradients against central finite differences.
 *
 * `lossFn` must rebuild the graph from the given leaf tensors on every
 * call. Checks every coordinate up to `maxPerTensor`, then a seeded
 * random sample beyond that.
 */
export function checkGradients(lossFn: () => Tensor, leaves: Tensor[],
  tol = 1e-4, maxPerTensor = 64, h = 1e-5): void {
  resetTape();
  for (const leaf of leaves) leaf.grad = null;
  const loss = lossFn();
  backward(loss);
  const analytic = leaves.map((leaf) => leaf.grad
    ? Float64Array.from(leaf.grad) : new Float64Array(leaf.size));
  resetTape();

  const value = () => noGrad(() => lossFn().item());
  const rng = makeRng(1234);
  for (let t = 0; t < leaves.length; t++) {
    const leaf = leaves[t];
    const indices: number[] = [];
    if (leaf.size <= maxPerTensor) {
      for (let i = 0; i < leaf.size; i++) indices.push(i);
    } else {
      for (let i = 0; i < maxPerTensor; i++) {
        indices.push(Math.floor(rng() * leaf.size));
      }
    }
    for (const i of indices) {
      const orig = leaf.data[i];
      leaf.data[i] = orig + h;
      const fp = value();
      leaf.data[i] = orig - h;
      const fm = value();
      leaf.data[i] = orig;
      const numeric = (fp - fm) / (2 * h);
      const got = analytic[t][i];
      const denom = Math.max(1.0, Math.abs(numeric), Math.abs(got));
      expect(Math.abs(got - numeric) / denom,
        `tensor ${t} index ${i}: analytic ${got} vs numeric ${numeric}`)
        .toBeLessThan(tol);
    }
  }
}

export function randomData(rng: () => number, size: number, scaleBy = 1.0): Float64Array {
  const data = new Float64Array(size);
  for (let i = 0; i < size; i++) data[i] = (rng() * 2 - 1) * scaleBy;
  return data;
}
