/**
 * Minimal dependency-free SVG line charts.
 *
 * Every series element carries `data-label` and `data-values` attributes with
 * the exact numbers being plotted, so tests can verify plotted values against
 * the source CSV without touching pixel coordinates.  The renderer performs
 * no numeric transformation beyond the affine axis mapping.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  /** draw as step-after (sawtooth-style) instead of point-to-point */
  step?: boolean;
  /** which vertical axis the series is scaled against */
  axis?: "left" | "right";
  dash?: string;
}

export interface HLine {
  value: number;
  label: string;
  color: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  rightYLabel?: string;
  series: Series[];
  hLines?: HLine[];
  width?: number;
  height?: number;
}

const MARGIN = { top: 42, right: 74, bottom: 46, left: 64 };

interface Scale {
  (v: number): number;
  min: number;
  max: number;
}

function makeScale(values: number[], lo: number, hi: number): Scale {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (!Number.isFinite(min) || !Number.isFinite(max)) {
    min = 0;
    max = 1;
  }
  if (min === max) {
    // degenerate domain (e.g. a single-row trace): pad so the point is visible
    min -= 1;
    max += 1;
  }
  const scale = ((v: number) => lo + ((v - min) / (max - min)) * (hi - lo)) as Scale;
  scale.min = min;
  scale.max = max;
  return scale;
}

function ticks(scale: Scale, count = 5): number[] {
  const out: number[] = [];
  for (let i = 0; i <= count; i++) {
    out.push(scale.min + ((scale.max - scale.min) * i) / count);
  }
  return out;
}

function fmt(v: number): string {
  if (Number.isInteger(v)) return String(v);
  const magnitude = Math.abs(v);
  if (magnitude >= 1000) return v.toFixed(0);
  if (magnitude >= 1) return v.toFixed(1);
  return v.toPrecision(3);
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

function polylinePoints(s: Series, sx: Scale, sy: Scale): string {
  const pts: string[] = [];
  for (let i = 0; i < s.x.length; i++) {
    if (s.step && i > 0) {
      // step-after: hold the previous level until the new slot
      pts.push(`${sx(s.x[i]).toFixed(2)},${sy(s.y[i - 1]).toFixed(2)}`);
    }
    pts.push(`${sx(s.x[i]).toFixed(2)},${sy(s.y[i]).toFixed(2)}`);
  }
  return pts.join(" ");
}

export function renderChart(opts: ChartOptions): string {
  const width = opts.width ?? 860;
  const height = opts.height ?? 420;
  const plotW: [number, number] = [MARGIN.left, width - MARGIN.right];
  const plotH: [number, number] = [height - MARGIN.bottom, MARGIN.top];

  const left = opts.series.filter((s) => (s.axis ?? "left") === "left");
  const right = opts.series.filter((s) => s.axis === "right");
  const hValues = (opts.hLines ?? []).map((h) => h.value);

  const sx = makeScale(opts.series.flatMap((s) => s.x), plotW[0], plotW[1]);
  const syLeft = makeScale(left.flatMap((s) => s.y).concat(hValues, [0]), plotH[0], plotH[1]);
  const syRight = right.length
    ? makeScale(right.flatMap((s) => s.y).concat([0]), plotH[0], plotH[1])
    : syLeft;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">${esc(opts.title)}</text>`,
  );

  // axes
  parts.push(
    `<line x1="${plotW[0]}" y1="${plotH[0]}" x2="${plotW[1]}" y2="${plotH[0]}" stroke="black"/>`,
    `<line x1="${plotW[0]}" y1="${plotH[0]}" x2="${plotW[0]}" y2="${plotH[1]}" stroke="black"/>`,
  );
  for (const t of ticks(sx)) {
    const px = sx(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${plotH[0]}" x2="${px.toFixed(2)}" y2="${plotH[0] + 4}" stroke="black"/>`,
      `<text x="${px.toFixed(2)}" y="${plotH[0] + 17}" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(syLeft)) {
    const py = syLeft(t);
    parts.push(
      `<line x1="${plotW[0] - 4}" y1="${py.toFixed(2)}" x2="${plotW[0]}" y2="${py.toFixed(2)}" stroke="black"/>`,
      `<text x="${plotW[0] - 7}" y="${(py + 4).toFixed(2)}" text-anchor="end">${fmt(t)}</text>`,
    );
  }
  if (right.length) {
    parts.push(
      `<line x1="${plotW[1]}" y1="${plotH[0]}" x2="${plotW[1]}" y2="${plotH[1]}" stroke="black"/>`,
    );
    for (const t of ticks(syRight)) {
      const py = syRight(t);
      parts.push(
        `<line x1="${plotW[1]}" y1="${py.toFixed(2)}" x2="${plotW[1] + 4}" y2="${py.toFixed(2)}" stroke="black"/>`,
        `<text x="${plotW[1] + 7}" y="${(py + 4).toFixed(2)}" text-anchor="start">${fmt(t)}</text>`,
      );
    }
  }

  // axis labels
  parts.push(
    `<text x="${(plotW[0] + plotW[1]) / 2}" y="${height - 10}" text-anchor="middle">${esc(opts.xLabel)}</text>`,
    `<text x="16" y="${(plotH[0] + plotH[1]) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(plotH[0] + plotH[1]) / 2})">${esc(opts.yLabel)}</text>`,
  );
  if (opts.rightYLabel && right.length) {
    const cx = width - 14;
    parts.push(
      `<text x="${cx}" y="${(plotH[0] + plotH[1]) / 2}" text-anchor="middle" ` +
        `transform="rotate(90 ${cx} ${(plotH[0] + plotH[1]) / 2})">${esc(opts.rightYLabel)}</text>`,
    );
  }

  // reference lines
  for (const h of opts.hLines ?? []) {
    const py = syLeft(h.value).toFixed(2);
    parts.push(
      `<line class="hline" data-value="${String(h.value)}" x1="${plotW[0]}" y1="${py}" ` +
        `x2="${plotW[1]}" y2="${py}" stroke="${h.color}" stroke-dasharray="6,4"/>`,
      `<text x="${plotW[1] - 4}" y="${(Number(py) - 4).toFixed(2)}" text-anchor="end" ` +
        `fill="${h.color}">${esc(h.label)}</text>`,
    );
  }

  // series
  for (const s of opts.series) {
    const sy = (s.axis ?? "left") === "left" ? syLeft : syRight;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    const values = s.y.map((v) => String(v)).join(",");
    if (s.x.length === 1) {
      parts.push(
        `<circle class="series" data-label="${esc(s.label)}" data-values="${values}" ` +
          `cx="${sx(s.x[0]).toFixed(2)}" cy="${sy(s.y[0]).toFixed(2)}" r="3" fill="${s.color}"/>`,
      );
    } else {
      parts.push(
        `<polyline class="series" data-label="${esc(s.label)}" data-values="${values}" ` +
          `points="${polylinePoints(s, sx, sy)}" fill="none" stroke="${s.color}"${dash} stroke-width="1.5"/>`,
      );
    }
  }

  // legend
  let ly = MARGIN.top + 6;
  for (const s of opts.series) {
    const lx = plotW[0] + 10;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${s.color}" stroke-width="2"/>`,
      `<text class="legend" x="${lx + 28}" y="${ly + 4}">${esc(s.label)}</text>`,
    );
    ly += 16;
  }

  parts.push("</svg>");
  return parts.join("\n");
}
