/** View model and pure state transitions.
 *
 * The rendered tree is exactly the served dendrogram: the payload is stored
 * verbatim and never recomputed client-side. Rename drafts are cleared on a
 * successful POST; an in-flight rename disables further renames on that node
 * until the request resolves.
 */

import type { ClustersPayload, DendrogramPayload, ExplanationPayload } from "./api.js";

export interface ViewModel {
  tree: DendrogramPayload | null;
  etag: string;
  cut: number;
  partition: ClustersPayload | null;
  drafts: ReadonlyMap<number, string>;
  inflight: ReadonlySet<number>;
  lastExplanation: ExplanationPayload | null;
  banner: string | null;
}

export function initialView(): ViewModel {
  return {
    tree: null,
    etag: "",
    cut: 0,
    partition: null,
    drafts: new Map(),
    inflight: new Set(),
    lastExplanation: null,
    banner: null,
  };
}

export function withDendrogram(
  view: ViewModel,
  tree: DendrogramPayload,
  etag: string,
): ViewModel {
  return { ...view, tree, etag, banner: null };
}

export function withBanner(view: ViewModel, banner: string): ViewModel {
  return { ...view, banner };
}

export function clearBanner(view: ViewModel): ViewModel {
  return { ...view, banner: null };
}

export function withCut(view: ViewModel, cut: number): ViewModel {
  return { ...view, cut };
}

export function withPartition(view: ViewModel, partition: ClustersPayload): ViewModel {
  return { ...view, partition };
}

export function withDraft(view: ViewModel, node: number, draft: string): ViewModel {
  const drafts = new Map(view.drafts);
  drafts.set(node, draft);
  return { ...view, drafts };
}

export function draftFor(view: ViewModel, node: number): string {
  return view.drafts.get(node) ?? "";
}

/** A rename may be submitted only with a non-empty draft on an idle node. */
export function canSubmitRename(view: ViewModel, node: number): boolean {
  return draftFor(view, node).trim() !== "" && !view.inflight.has(node);
}

export function beginRename(view: ViewModel, node: number): ViewModel {
  const inflight = new Set(view.inflight);
  inflight.add(node);
  return { ...view, inflight };
}

/** Resolve an in-flight rename; success clears the node's draft. */
export function endRename(view: ViewModel, node: number, succeeded: boolean): ViewModel {
  const inflight = new Set(view.inflight);
  inflight.delete(node);
  if (!succeeded) {
    return { ...view, inflight };
  }
  const drafts = new Map(view.drafts);
  drafts.delete(node);
  return { ...view, inflight, drafts };
}

export function withExplanation(
  view: ViewModel,
  explanation: ExplanationPayload,
): ViewModel {
  return { ...view, lastExplanation: explanation, banner: null };
}
