/** Pure dendrogram layout: served payload in, drawable geometry out.
 *
 * Layout only; every name, height, and partition shown comes from the
 * service payloads untouched.
 */

import type { ClustersPayload, DendrogramPayload, TreeNode } from "./api.js";

export interface PlacedNode {
  id: number;
  name: string | null;
  size: number;
  isLeaf: boolean;
  collapsed: boolean;
  x: number;
  y: number;
  children: number[];
}

export interface Layout {
  nodes: PlacedNode[];
  edges: Array<{ from: number; to: number }>;
  width: number;
  height: number;
  /** y coordinate for a given dendrogram height (for the cut line). */
  yFor(height: number): number;
}

function nodeIndex(payload: DendrogramPayload): Map<number, TreeNode> {
  return new Map(payload.nodes.map((node) => [node.id, node]));
}

/** Leaf ids in dendrogram drawing order (left-to-right child traversal). */
export function leafOrder(payload: DendrogramPayload): number[] {
  const byId = nodeIndex(payload);
  const order: number[] = [];
  const stack = [payload.root];
  while (stack.length > 0) {
    const id = stack.pop()!;
    const node = byId.get(id);
    if (node === undefined) continue;
    if (node.children.length === 0) {
      order.push(id);
    } else {
      // push right first so the left child is visited first
      for (let i = node.children.length - 1; i >= 0; i--) {
        stack.push(node.children[i]);
      }
    }
  }
  return order;
}

export function layoutTree(
  payload: DendrogramPayload,
  width: number,
  height: number,
  collapsed: ReadonlySet<number> = new Set(),
): Layout {
  const byId = nodeIndex(payload);
  const rootHeight = byId.get(payload.root)?.height ?? 0;
  const scale = rootHeight > 0 ? (height - 40) / rootHeight : 0;
  const yFor = (h: number) => height - 20 - h * scale;

  const leaves = leafOrder(payload);
  const step = leaves.length > 1 ? (width - 40) / (leaves.length - 1) : 0;
  const xs = new Map<number, number>();
  leaves.forEach((id, i) => xs.set(id, 20 + i * step));

  const placed: PlacedNode[] = [];
  const edges: Array<{ from: number; to: number }> = [];
  const visible = new Set<number>();

  // nodes in ascending id order so children are placed before parents
  const ordered = [...payload.nodes].sort((a, b) => a.id - b.id);
  const place = (node: TreeNode): number => {
    if (node.children.length === 0) return xs.get(node.id) ?? 20;
    const child_xs = node.children.map((c) => xs.get(c) ?? 20);
    return child_xs.reduce((a, b) => a + b, 0) / child_xs.length;
  };
  for (const node of ordered) {
    xs.set(node.id, place(node));
  }

  // walk down from the root, stopping at collapsed nodes
  const stack = [payload.root];
  while (stack.length > 0) {
    const id = stack.pop()!;
    visible.add(id);
    const node = byId.get(id);
    if (node === undefined || collapsed.has(id)) continue;
    for (const child of node.children) {
      edges.push({ from: id, to: child });
      stack.push(child);
    }
  }

  for (const node of ordered) {
    if (!visible.has(node.id)) continue;
    placed.push({
      id: node.id,
      name: node.name,
      size: node.size,
      isLeaf: node.children.length === 0,
      collapsed: collapsed.has(node.id),
      x: xs.get(node.id) ?? 20,
      y: yFor(node.height),
      children: node.children,
    });
  }
  return { nodes: placed, edges, width, height, yFor };
}

/** Map each member label to its cluster's index in the served partition. */
export function partitionColors(partition: ClustersPayload): Map<string, number> {
  const colors = new Map<string, number>();
  partition.clusters.forEach((cluster, i) => {
    for (const member of cluster.members) {
      colors.set(member.label, i);
    }
  });
  return colors;
}
