/** DOM wiring for the naming and query tabs. */

import { ApiClient } from "./api.js";
import {
  ViewModel,
  beginRename,
  canSubmitRename,
  clearBanner,
  draftFor,
  endRename,
  initialView,
  withBanner,
  withCut,
  withDendrogram,
  withDraft,
  withExplanation,
  withPartition,
} from "./model.js";
import { layoutTree, partitionColors } from "./tree.js";

const PALETTE = [
  "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
  "#b279a2", "#ff9da6", "#9d755d", "#eeca3b", "#bab0ac",
];

const api = new ApiClient((url, init) => fetch(url, init));
let view: ViewModel = initialView();
const collapsed = new Set<number>();

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function render(): void {
  renderBanner();
  renderTree();
  renderClusterList();
  renderExplanation();
}

function renderBanner(): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = view.banner ?? "";
  banner.hidden = view.banner === null;
}

function renderTree(): void {
  const svg = el<HTMLElement>("tree");
  if (view.tree === null) {
    svg.innerHTML = "";
    return;
  }
  const layout = layoutTree(view.tree, 900, 420, collapsed);
  const colors = view.partition ? partitionColors(view.partition) : new Map<string, number>();
  const pos = new Map(layout.nodes.map((n) => [n.id, n]));
  const parts: string[] = [];

  for (const edge of layout.edges) {
    const a = pos.get(edge.from);
    const b = pos.get(edge.to);
    if (!a || !b) continue;
    parts.push(
      `<path class="edge" d="M ${a.x} ${a.y} L ${b.x} ${a.y} L ${b.x} ${b.y}" />`,
    );
  }
  const cutY = layout.yFor(view.cut);
  parts.push(`<line class="cut" x1="0" y1="${cutY}" x2="900" y2="${cutY}" />`);

  for (const node of layout.nodes) {
    const color = node.isLeaf && node.name !== null
      ? PALETTE[(colors.get(node.name) ?? 0) % PALETTE.length]
      : "#555";
    const label = node.isLeaf
      ? node.name ?? `#${node.id}`
      : `${node.name ?? "(unnamed)"} (${node.size})`;
    parts.push(
      `<g class="node" data-node="${node.id}">` +
        `<circle cx="${node.x}" cy="${node.y}" r="5" fill="${color}" />` +
        `<text x="${node.x + 8}" y="${node.y + 4}">${escapeHtml(label)}</text>` +
        "</g>",
    );
  }
  svg.innerHTML = parts.join("");
  for (const g of Array.from(svg.querySelectorAll("g.node"))) {
    g.addEventListener("click", () => {
      const id = Number(g.getAttribute("data-node"));
      if (collapsed.has(id)) collapsed.delete(id);
      else collapsed.add(id);
      render();
    });
  }
}

function renderClusterList(): void {
  const list = el<HTMLDivElement>("clusters");
  list.innerHTML = "";
  if (view.partition === null) return;
  for (const cluster of view.partition.clusters) {
    const row = document.createElement("div");
    row.className = "cluster-row";

    const title = document.createElement("span");
    title.className = "cluster-name";
    title.textContent = `${cluster.name ?? "(unnamed)"} [${cluster.size}]`;
    row.appendChild(title);

    const chips = document.createElement("span");
    chips.className = "chips";
    for (const member of cluster.members) {
      chips.appendChild(memberChip(member.label, member.image_url));
    }
    row.appendChild(chips);

    const input = document.createElement("input");
    input.placeholder = "rename cluster";
    input.value = draftFor(view, cluster.node);
    input.addEventListener("input", () => {
      view = withDraft(view, cluster.node, input.value);
      button.disabled = !canSubmitRename(view, cluster.node);
    });
    row.appendChild(input);

    const button = document.createElement("button");
    button.textContent = "rename";
    button.disabled = !canSubmitRename(view, cluster.node);
    button.addEventListener("click", () => void submitRename(cluster.node));
    row.appendChild(button);

    list.appendChild(row);
  }
}

function memberChip(label: string, imageUrl: string | null): HTMLElement {
  const chip = document.createElement("span");
  chip.className = "chip";
  chip.textContent = label;
  if (imageUrl) {
    const img = document.createElement("img");
    img.src = imageUrl;
    img.alt = label;
    img.className = "preview";
    chip.appendChild(img); // shown on hover via CSS
  }
  return chip;
}

function renderExplanation(): void {
  const target = el<HTMLDivElement>("explanation");
  target.innerHTML = "";
  const explanation = view.lastExplanation;
  if (explanation === null) return;
  const heading = document.createElement("h3");
  heading.textContent = explanation.label;
  target.appendChild(heading);
  explanation.sentences.forEach((sentence, i) => {
    const p = document.createElement("p");
    p.textContent = sentence;
    const chips = document.createElement("span");
    chips.className = "chips";
    for (const label of explanation.members[i] ?? []) {
      chips.appendChild(memberChip(label, null));
    }
    p.appendChild(chips);
    target.appendChild(p);
  });
}

async function reloadDendrogram(): Promise<void> {
  const result = await api.getDendrogram();
  if (result.ok) {
    view = withDendrogram(view, result.value.payload, result.value.etag);
  } else {
    view = withBanner(view, result.message);
  }
  render();
}

async function reloadPartition(): Promise<void> {
  const result = await api.getClusters(view.cut);
  if (result.ok) {
    view = withPartition(result.ok ? clearBanner(view) : view, result.value);
  } else {
    view = withBanner(view, result.message);
  }
  render();
}

async function submitRename(node: number): Promise<void> {
  if (!canSubmitRename(view, node)) return; // empty submits blocked client-side
  const name = draftFor(view, node).trim();
  view = beginRename(view, node);
  render();
  const result = await api.renameNode(node, name);
  view = endRename(view, node, result.ok);
  if (!result.ok) {
    view = withBanner(view, `rename failed: ${result.message}`);
    render();
    return;
  }
  await reloadDendrogram();
  await reloadPartition();
}

async function runQuery(): Promise<void> {
  const label = el<HTMLInputElement>("query-label").value.trim();
  const pasted = el<HTMLTextAreaElement>("query-record").value.trim();
  const result = pasted !== ""
    ? await api.classifyExplain(pasted)
    : await api.explain(label);
  view = result.ok
    ? withExplanation(view, result.value)
    : withBanner(view, result.message);
  render();
}

function wireTabs(): void {
  for (const name of ["naming", "query"]) {
    el<HTMLButtonElement>(`tab-${name}`).addEventListener("click", () => {
      el<HTMLDivElement>("panel-naming").hidden = name !== "naming";
      el<HTMLDivElement>("panel-query").hidden = name !== "query";
    });
  }
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function start(): void {
  wireTabs();
  const slider = el<HTMLInputElement>("cut-slider");
  slider.addEventListener("input", () => {
    view = withCut(view, Number(slider.value));
    void reloadPartition();
  });
  el<HTMLButtonElement>("query-run").addEventListener("click", () => void runQuery());
  void reloadDendrogram().then(() => {
    if (view.tree !== null) {
      const root = view.tree.nodes.find((n) => n.id === view.tree!.root);
      slider.max = String(root ? root.height : 1);
      slider.step = "any";
    }
    void reloadPartition();
  });
}

if (typeof document !== "undefined" && document.getElementById("tree") !== null) {
  start();
}
