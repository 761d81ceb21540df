/**
 * Minimal hand-rolled SVG line charts.
 *
 * Deliberately dependency-free: the figures are static line plots of a few
 * hundred points, so a small template-string builder beats pulling in a
 * charting stack. Output is deterministic for identical inputs; nothing
 * here looks at the clock or the environment.
 */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label: string;
  width?: number;
  dash?: string; // stroke-dasharray
  markers?: boolean; // circles on data points, for sparse series
}

export interface ChartOpts {
  title: string;
  subtitle?: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logX?: boolean;
  logY?: boolean;
}

const W = 700;
const H = 300;
const ML = 74;
const MR = 20;
const MT = 40;
const MB = 48;
const PW = W - ML - MR;
const PH = H - MT - MB;

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const nice = [1, 2, 5, 10].map((m) => m * mag);
  const step = nice.find((n) => n >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 0.01; v += step) ticks.push(v);
  return ticks;
}

function decadeTicks(min: number, max: number): number[] {
  const lo = Math.floor(Math.log10(min));
  const hi = Math.ceil(Math.log10(max));
  const ticks: number[] = [];
  // cap the label count on wide ranges by striding whole decades
  const stride = Math.max(1, Math.ceil((hi - lo) / 8));
  for (let e = lo; e <= hi; e += stride) ticks.push(Math.pow(10, e));
  return ticks;
}

export function fmtNum(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const [m, e] = v.toExponential(1).split("e");
    const mant = m.endsWith(".0") ? m.slice(0, -2) : m;
    return `${mant}e${parseInt(e, 10)}`;
  }
  const s = v.toFixed(3);
  return s.replace(/\.?0+$/, "");
}

interface Kept {
  series: Series;
  xs: number[];
  ys: number[];
}

/** Drop points a given axis scale cannot show (non-finite; nonpositive on log). */
function keepPlottable(series: Series[], logX: boolean, logY: boolean): Kept[] {
  const kept: Kept[] = [];
  for (const s of series) {
    if (s.x.length !== s.y.length) {
      throw new Error(`series '${s.label}': ${s.x.length} x values for ${s.y.length} y values`);
    }
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const x = s.x[i];
      const y = s.y[i];
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      if (logX && x <= 0) continue;
      if (logY && y <= 0) continue;
      xs.push(x);
      ys.push(y);
    }
    if (xs.length > 0) kept.push({ series: s, xs, ys });
  }
  if (kept.length === 0) {
    throw new Error("nothing to plot: every point was filtered out");
  }
  return kept;
}

export function buildChart(opts: ChartOpts): string {
  const logX = opts.logX ?? false;
  const logY = opts.logY ?? false;
  const kept = keepPlottable(opts.series, logX, logY);

  const allX = kept.flatMap((k) => k.xs);
  const allY = kept.flatMap((k) => k.ys);
  let xMin = Math.min(...allX);
  let xMax = Math.max(...allX);
  let yMin = Math.min(...allY);
  let yMax = Math.max(...allY);
  // a flat series still needs a nonzero span to land mid-plot
  if (xMin === xMax) {
    const pad = Math.abs(xMin) * 0.5 || 1;
    xMin -= logX ? 0 : pad;
    xMax += pad;
    if (logX) xMin /= 2;
  }
  if (yMin === yMax) {
    const pad = Math.abs(yMin) * 0.5 || 1;
    yMin -= logY ? 0 : pad;
    yMax += pad;
    if (logY) yMin /= 2;
  }

  const xT = logX ? Math.log10 : (v: number) => v;
  const yT = logY ? Math.log10 : (v: number) => v;
  const xOf = (v: number) => ML + ((xT(v) - xT(xMin)) / (xT(xMax) - xT(xMin) || 1)) * PW;
  const yOf = (v: number) => MT + PH - ((yT(v) - yT(yMin)) / (yT(yMax) - yT(yMin) || 1)) * PH;

  const xTicks = logX ? decadeTicks(xMin, xMax) : niceTicks(xMin, xMax, 6);
  const yTicks = logY ? decadeTicks(yMin, yMax) : niceTicks(yMin, yMax, 5);

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ML}" y="${MT - 22}" font-size="12" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;
  if (opts.subtitle) {
    s += `<text x="${ML}" y="${MT - 8}" font-size="9" fill="#888">${esc(opts.subtitle)}</text>\n`;
  }

  for (const v of yTicks) {
    const y = yOf(v).toFixed(1);
    s += `<line x1="${ML}" y1="${y}" x2="${ML + PW}" y2="${y}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 6}" y="${y}" font-size="8.5" fill="#555" text-anchor="end" dominant-baseline="middle">${esc(fmtNum(v))}</text>\n`;
  }
  for (const v of xTicks) {
    const x = xOf(v).toFixed(1);
    s += `<line x1="${x}" y1="${MT}" x2="${x}" y2="${MT + PH}" stroke="#f3f3f3" stroke-width="0.6"/>\n`;
    s += `<text x="${x}" y="${MT + PH + 14}" font-size="8.5" fill="#555" text-anchor="middle">${esc(fmtNum(v))}</text>\n`;
  }

  s += `<rect x="${ML}" y="${MT}" width="${PW}" height="${PH}" fill="none" stroke="#999" stroke-width="0.8"/>\n`;
  s += `<text x="${ML + PW / 2}" y="${H - 8}" font-size="10" fill="#333" text-anchor="middle">${esc(opts.xLabel)}</text>\n`;
  s += `<text x="16" y="${MT + PH / 2}" font-size="10" fill="#333" text-anchor="middle" transform="rotate(-90 16 ${MT + PH / 2})">${esc(opts.yLabel)}</text>\n`;

  for (const k of kept) {
    const sr = k.series;
    const pts = k.xs.map((x, i) => `${xOf(x).toFixed(2)},${yOf(k.ys[i]).toFixed(2)}`);
    const dash = sr.dash ? ` stroke-dasharray="${sr.dash}"` : "";
    if (pts.length > 1) {
      s += `<polyline points="${pts.join(" ")}" fill="none" stroke="${sr.color}" stroke-width="${sr.width ?? 1.4}"${dash}/>\n`;
    }
    if (sr.markers || pts.length === 1) {
      for (const p of pts) {
        const [px, py] = p.split(",");
        s += `<circle cx="${px}" cy="${py}" r="2.2" fill="${sr.color}"/>\n`;
      }
    }
  }

  let ly = MT + 10;
  for (const k of kept) {
    const sr = k.series;
    const dash = sr.dash ? ` stroke-dasharray="${sr.dash}"` : "";
    s += `<line x1="${ML + PW - 150}" y1="${ly}" x2="${ML + PW - 128}" y2="${ly}" stroke="${sr.color}" stroke-width="2"${dash}/>\n`;
    s += `<text x="${ML + PW - 122}" y="${ly + 3}" font-size="8.5" fill="#333">${esc(sr.label)}</text>\n`;
    ly += 13;
  }

  s += "</svg>\n";
  return s;
}
