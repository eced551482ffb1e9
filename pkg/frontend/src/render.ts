/**
 * Figure construction for the two CSV kinds.
 *
 * theta_sweep: one SIR-vs-theta polyline per (scheme, snr_b_db) group.
 * acpr: SNR_A x SNR_B plane; "lrc" decoder regions are drawn as 0.5-level
 * boundary contours of the 0/1 decodable grid, "ldpc_bp" decodable points
 * as filled symbols.
 */

import { ACPR_COLUMNS, num, parseCsv, Row, SchemaError, THETA_COLUMNS } from "./csv.js";
import {
  axes,
  document as svgDocument,
  HEIGHT,
  linearScale,
  MARGIN,
  marker,
  PALETTE,
  polyline,
  text,
  ticks,
  WIDTH,
} from "./svg.js";

const plotRange = {
  x: [MARGIN.left, WIDTH - MARGIN.right] as [number, number],
  y: [HEIGHT - MARGIN.bottom, MARGIN.top] as [number, number],
};

function groupBy(rows: Row[], key: (r: Row) => string): Map<string, Row[]> {
  const out = new Map<string, Row[]>();
  for (const r of rows) {
    const k = key(r);
    const bucket = out.get(k);
    if (bucket) bucket.push(r);
    else out.set(k, [r]);
  }
  return out;
}

function legend(entries: { label: string; color: string; dashed?: boolean }[]): string {
  const x = WIDTH - MARGIN.right + 12;
  return entries
    .map((e, i) => {
      const y = MARGIN.top + 16 + 18 * i;
      const dash = e.dashed ? ` stroke-dasharray="6 4"` : "";
      return (
        `<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" ` +
        `stroke="${e.color}" stroke-width="1.8"${dash}/>` +
        text(x + 28, y, e.label, "start", 11)
      );
    })
    .join("\n");
}

export function renderThetaSweep(csvText: string): string {
  const rows = parseCsv(csvText, THETA_COLUMNS);
  const groups = groupBy(rows, (r) => `${r.scheme} @ SNR_B=${r.snr_b_db} dB`);
  const thetas = rows.map((r) => num(r, "theta_rad"));
  const sirs = rows.map((r) => num(r, "sir_bits"));
  const xs = linearScale([Math.min(...thetas), Math.max(...thetas)], plotRange.x);
  const ys = linearScale([0, Math.max(...sirs) * 1.05], plotRange.y);

  const parts: string[] = [];
  const entries: { label: string; color: string }[] = [];
  let i = 0;
  for (const [label, group] of groups) {
    const color = PALETTE[i % PALETTE.length];
    const pts = group
      .map((r): [number, number] => [num(r, "theta_rad"), num(r, "sir_bits")])
      .sort((a, b) => a[0] - b[0])
      .map(([t, s]): [number, number] => [xs(t), ys(s)]);
    parts.push(polyline(pts, color));
    entries.push({ label, color });
    i += 1;
  }
  parts.push(axes(xs, ys, "theta (rad)", "SIR (bits / complex use)",
    ticks(xs.domain[0], xs.domain[1]), ticks(ys.domain[0], ys.domain[1])));
  parts.push(legend(entries));
  return svgDocument(parts.join("\n"));
}

/** Boundary segments of the 0.5-level contour of a 0/1 grid. */
export function boundarySegments(
  a: number[], b: number[], decodable: (i: number, j: number) => boolean,
): [number, number, number, number][] {
  const segs: [number, number, number, number][] = [];
  const midA = (i: number) => (a[i] + a[i + 1]) / 2;
  const midB = (j: number) => (b[j] + b[j + 1]) / 2;
  const lo = (v: number[], k: number) => (k > 0 ? (v[k - 1] + v[k]) / 2 : v[k] - (v[k + 1] - v[k]) / 2);
  const hi = (v: number[], k: number) =>
    k < v.length - 1 ? (v[k] + v[k + 1]) / 2 : v[k] + (v[k] - v[k - 1]) / 2;
  for (let i = 0; i < a.length; i++) {
    for (let j = 0; j < b.length; j++) {
      if (i + 1 < a.length && decodable(i, j) !== decodable(i + 1, j)) {
        segs.push([midA(i), lo(b, j), midA(i), hi(b, j)]);
      }
      if (j + 1 < b.length && decodable(i, j) !== decodable(i, j + 1)) {
        segs.push([lo(a, i), midB(j), hi(a, i), midB(j)]);
      }
    }
  }
  return segs;
}

export function renderAcpr(csvText: string): string {
  const rows = parseCsv(csvText, ACPR_COLUMNS);
  const aVals = [...new Set(rows.map((r) => num(r, "snr_a_db")))].sort((x, y) => x - y);
  const bVals = [...new Set(rows.map((r) => num(r, "snr_b_db")))].sort((x, y) => x - y);
  const xs = linearScale([aVals[0], aVals[aVals.length - 1]], plotRange.x);
  const ys = linearScale([bVals[0], bVals[bVals.length - 1]], plotRange.y);

  const parts: string[] = [];
  const entries: { label: string; color: string; dashed?: boolean }[] = [];
  const groups = groupBy(rows, (r) => `${r.scheme}|${r.decoder}`);
  let i = 0;
  for (const [key, group] of groups) {
    const [scheme, decoder] = key.split("|");
    const color = PALETTE[i % PALETTE.length];
    const dec = new Map<string, boolean>();
    for (const r of group) {
      dec.set(`${num(r, "snr_a_db")}|${num(r, "snr_b_db")}`, r.decodable === "1");
    }
    const at = (ii: number, jj: number) => dec.get(`${aVals[ii]}|${bVals[jj]}`) ?? false;
    if (decoder === "lrc") {
      for (const [xa, yb, xc, yd] of boundarySegments(aVals, bVals, at)) {
        parts.push(polyline([[xs(xa), ys(yb)], [xs(xc), ys(yd)]], color));
      }
      entries.push({ label: `${scheme} (lrc boundary)`, color });
    } else {
      for (const r of group) {
        if (r.decodable === "1") {
          parts.push(marker(xs(num(r, "snr_a_db")), ys(num(r, "snr_b_db")), color));
        }
      }
      entries.push({ label: `${scheme} (${decoder})`, color });
    }
    i += 1;
  }
  parts.push(axes(xs, ys, "SNR_A (dB)", "SNR_B (dB)",
    ticks(xs.domain[0], xs.domain[1]), ticks(ys.domain[0], ys.domain[1])));
  parts.push(legend(entries));
  return svgDocument(parts.join("\n"));
}

export function render(kind: string, csvText: string): string {
  if (kind === "theta_sweep") return renderThetaSweep(csvText);
  if (kind === "acpr") return renderAcpr(csvText);
  throw new SchemaError(`unknown kind: ${kind}`);
}
