/**
 * Semilog BER chart rendering. Pure string-in, string-out SVG so the
 * output is byte-stable for fixed inputs; no canvas, no fonts to load.
 */

import { EmptyData, SweepData } from "./csv.js";

export interface Curve {
  label: string;
  snrDb: number[];
  ber: number[]; // strictly positive, same length as snrDb
}

export interface ChartOptions {
  /** Dashed guide with this slope (decades per 10 dB), anchored at the
   *  last point of the first curve. */
  refSlope?: number;
  title?: string;
  width?: number;
  height?: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#7f7f7f", "#9467bd", "#8c564b"];
const GUIDE_COLOR = "#2ca02c";

/** Curve from parsed sweep data; zero-BER points cannot appear on a log
 *  axis, so they are dropped and counted for the caller to report. */
export function toCurve(data: SweepData, label: string): { curve: Curve; dropped: number } {
  const snrDb: number[] = [];
  const ber: number[] = [];
  let dropped = 0;
  for (const r of data.rows) {
    if (r.ber > 0) {
      snrDb.push(r.snrDb);
      ber.push(r.ber);
    } else {
      dropped++;
    }
  }
  return { curve: { label, snrDb, ber }, dropped };
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Fixed-precision coordinate so output never depends on fp printing quirks. */
function px(v: number): string {
  return v.toFixed(2);
}

function xTickStep(range: number): number {
  for (const step of [1, 2, 5, 10, 20]) {
    if (range / step <= 8) return step;
  }
  return 50;
}

export function renderBerSvg(curves: Curve[], opts: ChartOptions = {}): string {
  if (curves.length === 0) throw new EmptyData("no curves to plot");
  for (const c of curves) {
    if (c.snrDb.length === 0) throw new EmptyData(`curve "${c.label}" has no positive-BER points`);
    if (c.snrDb.length !== c.ber.length) throw new RangeError("snrDb/ber length mismatch");
  }

  const W = opts.width ?? 640;
  const H = opts.height ?? 440;
  const ml = 64, mr = 18, mt = 34, mb = 48;
  const pw = W - ml - mr;
  const ph = H - mt - mb;

  // X range over all curves, padded half a tick
  const allX = curves.flatMap((c) => c.snrDb);
  let xMin = Math.min(...allX);
  let xMax = Math.max(...allX);
  if (xMin === xMax) {
    xMin -= 1;
    xMax += 1;
  }

  // Y range in log10 space, extended to whole decades
  const first = curves[0];
  const anchorX = first.snrDb[first.snrDb.length - 1];
  const anchorY = first.ber[first.ber.length - 1];
  const guideYs: number[] = [];
  if (opts.refSlope !== undefined) {
    // c * rho^-d through the anchor: straight in (dB, log10) coordinates
    guideYs.push(
      Math.log10(anchorY) - (opts.refSlope * (xMin - anchorX)) / 10,
      Math.log10(anchorY) - (opts.refSlope * (xMax - anchorX)) / 10
    );
  }
  const allLogY = curves.flatMap((c) => c.ber.map(Math.log10)).concat(guideYs);
  const decMin = Math.floor(Math.min(...allLogY));
  const decMax = Math.ceil(Math.max(...allLogY));

  const xOf = (v: number) => ml + ((v - xMin) / (xMax - xMin)) * pw;
  const yOf = (logV: number) => mt + ph - ((logV - decMin) / (decMax - decMin || 1)) * ph;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  if (opts.title) {
    s += `<text x="${ml}" y="${mt - 12}" font-size="13" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;
  }

  // Decade grid + y labels
  for (let d = decMin; d <= decMax; d++) {
    const y = yOf(d);
    s += `<line x1="${ml}" y1="${px(y)}" x2="${ml + pw}" y2="${px(y)}" stroke="#ddd" stroke-width="0.6"/>\n`;
    s += `<text x="${ml - 6}" y="${px(y + 3)}" font-size="10" text-anchor="end" fill="#444">1e${d}</text>\n`;
  }

  // X grid + labels
  const step = xTickStep(xMax - xMin);
  for (let v = Math.ceil(xMin / step) * step; v <= xMax + 1e-9; v += step) {
    const x = xOf(v);
    s += `<line x1="${px(x)}" y1="${mt}" x2="${px(x)}" y2="${mt + ph}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${px(x)}" y="${mt + ph + 16}" font-size="10" text-anchor="middle" fill="#444">${v}</text>\n`;
  }

  // Frame and axis titles
  s += `<rect x="${ml}" y="${mt}" width="${pw}" height="${ph}" fill="none" stroke="#999" stroke-width="1"/>\n`;
  s += `<text x="${ml + pw / 2}" y="${H - 12}" font-size="11" text-anchor="middle" fill="#222">SNR (dB)</text>\n`;
  s += `<text x="16" y="${mt + ph / 2}" font-size="11" text-anchor="middle" fill="#222" transform="rotate(-90 16 ${mt + ph / 2})">BER</text>\n`;

  // Reference guide: dashed, behind the data
  if (opts.refSlope !== undefined) {
    const y1 = yOf(guideYs[0]);
    const y2 = yOf(guideYs[1]);
    s += `<line x1="${px(xOf(xMin))}" y1="${px(y1)}" x2="${px(xOf(xMax))}" y2="${px(y2)}" stroke="${GUIDE_COLOR}" stroke-width="1.3" stroke-dasharray="6,4" class="guide"/>\n`;
  }

  // Data curves with point markers
  curves.forEach((c, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = c.snrDb
      .map((v, j) => `${px(xOf(v))},${px(yOf(Math.log10(c.ber[j])))}`)
      .join(" ");
    s += `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6" class="curve"/>\n`;
    for (let j = 0; j < c.snrDb.length; j++) {
      s += `<circle cx="${px(xOf(c.snrDb[j]))}" cy="${px(yOf(Math.log10(c.ber[j])))}" r="2.6" fill="${color}"/>\n`;
    }
  });

  // Legend, top right inside the frame, legend order = input order
  const legendEntries = curves.map((c, i) => ({ label: c.label, color: PALETTE[i % PALETTE.length], dash: "" }));
  if (opts.refSlope !== undefined) {
    legendEntries.push({ label: `snr^-${opts.refSlope} guide`, color: GUIDE_COLOR, dash: "6,4" });
  }
  const lw = 180;
  const lx = ml + pw - lw - 8;
  let ly = mt + 10;
  s += `<rect x="${lx - 6}" y="${ly - 8}" width="${lw}" height="${legendEntries.length * 16 + 8}" fill="#fff" opacity="0.85" stroke="#ccc" stroke-width="0.5"/>\n`;
  for (const e of legendEntries) {
    const dash = e.dash ? ` stroke-dasharray="${e.dash}"` : "";
    s += `<line x1="${lx}" y1="${ly}" x2="${lx + 24}" y2="${ly}" stroke="${e.color}" stroke-width="1.6"${dash}/>\n`;
    s += `<text x="${lx + 30}" y="${ly + 3.5}" font-size="10" fill="#222">${esc(e.label)}</text>\n`;
    ly += 16;
  }

  s += `</svg>\n`;
  return s;
}
