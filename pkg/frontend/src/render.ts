// String-SVG rendering of partial-order variants. Pure functions of the
// payload, so rendering is testable without a browser; main.ts injects the
// strings via innerHTML.

import { layoutDag } from "./layout.js";
import type { VariantPayload } from "./types.js";

const NODE_W = 108;
const NODE_H = 34;

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function isVariantPayload(v: unknown): v is VariantPayload {
  if (typeof v !== "object" || v === null) return false;
  const p = v as Record<string, unknown>;
  if (typeof p.canonical_key !== "string" || typeof p.frequency !== "number") return false;
  if (!Array.isArray(p.nodes) || !Array.isArray(p.hasse_edges)) return false;
  const n = p.nodes.length;
  if (
    !p.nodes.every(
      (nd: any) =>
        nd && typeof nd.idx === "number" && typeof nd.activity === "string",
    )
  ) {
    return false;
  }
  return p.hasse_edges.every(
    (e: any) =>
      Array.isArray(e) &&
      e.length === 2 &&
      Number.isInteger(e[0]) &&
      Number.isInteger(e[1]) &&
      e[0] >= 0 &&
      e[0] < n &&
      e[1] >= 0 &&
      e[1] < n,
  );
}

export function errorPanel(message: string): string {
  return `<div class="error-panel" role="alert">${esc(message)}</div>`;
}

/** Layered Hasse-diagram SVG with a frequency badge; error panel on bad input. */
export function renderVariant(payload: unknown): string {
  if (!isVariantPayload(payload)) {
    return errorPanel("malformed variant payload");
  }
  const v = payload;
  let layout;
  try {
    layout = layoutDag(v.nodes.length, v.hasse_edges);
  } catch (exc) {
    return errorPanel(`cannot lay out variant: ${String(exc)}`);
  }
  const width = layout.width + NODE_W;
  const height = Math.max(layout.height + NODE_H, 90);
  const parts: string[] = [];
  parts.push(
    `<svg class="variant" xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" data-key="${esc(v.canonical_key)}">`,
  );
  parts.push(
    `<defs><marker id="arr" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#5b6470"/></marker></defs>`,
  );
  for (const [a, b] of v.hasse_edges) {
    const pa = layout.nodes[a];
    const pb = layout.nodes[b];
    const x1 = pa.x + NODE_W;
    const y1 = pa.y + NODE_H / 2;
    const x2 = pb.x;
    const y2 = pb.y + NODE_H / 2;
    const mid = (x1 + x2) / 2;
    parts.push(
      `<path class="edge" d="M${x1},${y1} C${mid},${y1} ${mid},${y2} ${x2},${y2}" fill="none" stroke="#5b6470" stroke-width="1.4" marker-end="url(#arr)"/>`,
    );
  }
  for (const node of v.nodes) {
    const p = layout.nodes[node.idx];
    parts.push(
      `<g class="node" data-idx="${node.idx}">` +
        `<rect x="${p.x}" y="${p.y}" width="${NODE_W}" height="${NODE_H}" rx="6" fill="#eef3fa" stroke="#3f5877"/>` +
        `<text x="${p.x + NODE_W / 2}" y="${p.y + NODE_H / 2 + 4}" text-anchor="middle" font-size="11">${esc(shorten(node.activity))}</text>` +
        `</g>`,
    );
  }
  parts.push(
    `<g class="badge"><rect x="6" y="6" width="64" height="20" rx="10" fill="#3f5877"/>` +
      `<text x="38" y="20" text-anchor="middle" font-size="11" fill="#fff">${v.frequency}×</text></g>`,
  );
  parts.push(`</svg>`);
  return parts.join("");
}

function shorten(label: string, max = 18): string {
  return label.length <= max ? label : label.slice(0, max - 1) + "…";
}

export function renderVariantCard(payload: VariantPayload): string {
  return (
    `<article class="variant-card" data-key="${esc(payload.canonical_key)}">` +
    renderVariant(payload) +
    `<footer>${payload.frequency} case(s) · ${payload.nodes.length} events · key ${esc(
      payload.canonical_key.slice(0, 10),
    )}…</footer></article>`
  );
}
