// Variant-count-per-granularity sweep as a string-SVG line chart.

import { GRANULARITIES, type LevelCount } from "./types.js";

const W = 560;
const H = 200;
const PAD = { left: 56, right: 16, top: 16, bottom: 40 };

export function sweepChart(levels: LevelCount[], highlighted?: string): string {
  if (!levels.length) {
    return `<div class="error-panel">no granularity data</div>`;
  }
  const ordered = [...levels].sort(
    (a, b) => GRANULARITIES.indexOf(a.granularity) - GRANULARITIES.indexOf(b.granularity),
  );
  const maxCount = Math.max(...ordered.map((l) => l.variant_count), 1);
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const x = (i: number) =>
    PAD.left + (ordered.length === 1 ? innerW / 2 : (i * innerW) / (ordered.length - 1));
  const y = (c: number) => PAD.top + innerH - (c / maxCount) * innerH;

  const points = ordered.map((l, i) => `${x(i)},${y(l.variant_count)}`).join(" ");
  const parts: string[] = [];
  parts.push(
    `<svg class="sweep" xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}">`,
  );
  parts.push(
    `<line x1="${PAD.left}" y1="${PAD.top + innerH}" x2="${PAD.left + innerW}" y2="${PAD.top + innerH}" stroke="#999"/>`,
  );
  parts.push(
    `<line x1="${PAD.left}" y1="${PAD.top}" x2="${PAD.left}" y2="${PAD.top + innerH}" stroke="#999"/>`,
  );
  parts.push(`<text x="10" y="${PAD.top + 8}" font-size="10" fill="#555">${maxCount}</text>`);
  parts.push(
    `<polyline points="${points}" fill="none" stroke="#3f5877" stroke-width="2"/>`,
  );
  ordered.forEach((l, i) => {
    const active = l.granularity === highlighted;
    parts.push(
      `<circle class="sweep-point" data-granularity="${l.granularity}" data-count="${l.variant_count}" ` +
        `cx="${x(i)}" cy="${y(l.variant_count)}" r="${active ? 6 : 4}" ` +
        `fill="${active ? "#d9822b" : "#3f5877"}"/>`,
    );
    parts.push(
      `<text x="${x(i)}" y="${H - 22}" text-anchor="middle" font-size="9" fill="#555">${l.granularity}</text>`,
    );
    parts.push(
      `<text x="${x(i)}" y="${y(l.variant_count) - 8}" text-anchor="middle" font-size="9" fill="#333">${l.variant_count}</text>`,
    );
  });
  parts.push(`</svg>`);
  return parts.join("");
}
