// Layered DAG layout for Hasse diagrams: longest-path layering, barycenter
// crossing reduction, fixed spacing. Deterministic for a given payload.

export interface LayoutNode {
  idx: number;
  layer: number;
  /** position within the layer after ordering */
  slot: number;
  x: number;
  y: number;
}

export interface DagLayout {
  nodes: LayoutNode[];
  layers: number[][]; // node idx per layer, in slot order
  width: number;
  height: number;
}

export const LAYER_SPACING = 140;
export const NODE_SPACING = 54;
export const MARGIN = 40;

/** Longest-path depth from the sources; edges must be acyclic. */
export function layerByLongestPath(n: number, edges: [number, number][]): number[] {
  const preds: number[][] = Array.from({ length: n }, () => []);
  const succs: number[][] = Array.from({ length: n }, () => []);
  const indeg = new Array<number>(n).fill(0);
  for (const [a, b] of edges) {
    preds[b].push(a);
    succs[a].push(b);
    indeg[b] += 1;
  }
  const depth = new Array<number>(n).fill(0);
  const queue: number[] = [];
  const remaining = indeg.slice();
  for (let i = 0; i < n; i++) if (remaining[i] === 0) queue.push(i);
  let seen = 0;
  while (queue.length) {
    const u = queue.shift()!;
    seen += 1;
    for (const v of succs[u]) {
      depth[v] = Math.max(depth[v], depth[u] + 1);
      remaining[v] -= 1;
      if (remaining[v] === 0) queue.push(v);
    }
  }
  if (seen !== n) throw new Error("hasse edges contain a cycle");
  return depth;
}

function initialLayers(depth: number[]): number[][] {
  const maxDepth = depth.length ? Math.max(...depth) : 0;
  const layers: number[][] = Array.from({ length: maxDepth + 1 }, () => []);
  depth.forEach((d, i) => layers[d].push(i));
  return layers;
}

/**
 * Barycenter sweeps: order each layer by the mean slot of its neighbors in
 * the fixed adjacent layer, alternating downward and upward passes. Ties and
 * neighbor-less nodes keep their current slot, which makes the result stable.
 */
export function orderLayersBarycenter(
  layers: number[][],
  edges: [number, number][],
  sweeps = 4,
): number[][] {
  const preds = new Map<number, number[]>();
  const succs = new Map<number, number[]>();
  for (const [a, b] of edges) {
    if (!preds.has(b)) preds.set(b, []);
    preds.get(b)!.push(a);
    if (!succs.has(a)) succs.set(a, []);
    succs.get(a)!.push(b);
  }
  const current = layers.map((l) => l.slice());
  const slotOf = new Map<number, number>();
  const refreshSlots = (layer: number[]) =>
    layer.forEach((node, slot) => slotOf.set(node, slot));
  current.forEach(refreshSlots);

  const reorder = (layer: number[], neighborsOf: Map<number, number[]>) => {
    const keyed = layer.map((node, slot) => {
      const nb = neighborsOf.get(node) ?? [];
      const bary = nb.length
        ? nb.reduce((acc, m) => acc + (slotOf.get(m) ?? 0), 0) / nb.length
        : slot;
      return { node, bary, slot };
    });
    keyed.sort((p, q) => p.bary - q.bary || p.slot - q.slot);
    return keyed.map((k) => k.node);
  };

  for (let s = 0; s < sweeps; s++) {
    for (let li = 1; li < current.length; li++) {
      current[li] = reorder(current[li], preds);
      refreshSlots(current[li]);
    }
    for (let li = current.length - 2; li >= 0; li--) {
      current[li] = reorder(current[li], succs);
      refreshSlots(current[li]);
    }
  }
  return current;
}

export function layoutDag(n: number, edges: [number, number][]): DagLayout {
  if (n === 0) {
    return { nodes: [], layers: [], width: 2 * MARGIN, height: 2 * MARGIN };
  }
  const depth = layerByLongestPath(n, edges);
  const layers = orderLayersBarycenter(initialLayers(depth), edges);
  const tallest = Math.max(...layers.map((l) => l.length));
  const height = 2 * MARGIN + Math.max(0, tallest - 1) * NODE_SPACING;
  const nodes: LayoutNode[] = new Array(n);
  layers.forEach((layer, li) => {
    const columnHeight = (layer.length - 1) * NODE_SPACING;
    const top = (height - columnHeight) / 2;
    layer.forEach((idx, slot) => {
      nodes[idx] = {
        idx,
        layer: li,
        slot,
        x: MARGIN + li * LAYER_SPACING,
        y: top + slot * NODE_SPACING,
      };
    });
  });
  return {
    nodes,
    layers,
    width: 2 * MARGIN + (layers.length - 1) * LAYER_SPACING,
    height,
  };
}
