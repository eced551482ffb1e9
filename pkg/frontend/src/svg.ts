/**
 * Minimal deterministic SVG assembly: fixed canvas, linear axes,
 * polylines, markers and text. No timestamps or random ids, so the same
 * input always yields byte-identical output.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 64, right: 160, top: 32, bottom: 48 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  return f;
}

const fmt = (v: number) => {
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
};

export function polyline(points: [number, number][], color: string, dashed = false): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  const dash = dashed ? ` stroke-dasharray="6 4"` : "";
  return `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`;
}

export function marker(x: number, y: number, color: string): string {
  return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="2.4" fill="${color}"/>`;
}

export function text(x: number, y: number, s: string, anchor = "middle", size = 12): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" ` +
    `font-family="sans-serif" font-size="${size}">${escapeXml(s)}</text>`;
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string,
                     xTicks: number[], yTicks: number[]): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  for (const t of xTicks) {
    const px = xs(t);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(text(px, y0 + 20, fmt(t)));
  }
  for (const t of yTicks) {
    const py = ys(t);
    parts.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`);
    parts.push(text(x0 - 8, py + 4, fmt(t), "end"));
  }
  parts.push(text((x0 + x1) / 2, HEIGHT - 8, xLabel));
  parts.push(`<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
    `font-family="sans-serif" font-size="12" ` +
    `transform="rotate(-90 16 ${(y0 + y1) / 2})">${escapeXml(yLabel)}</text>`);
  return parts.join("\n");
}

export function ticks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const step = (hi - lo) / (n - 1);
  return Array.from({ length: n }, (_, i) => lo + i * step);
}

export function document(body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
    body + "\n</svg>\n";
}
