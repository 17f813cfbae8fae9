/** SVG assembly helpers: the renderers emit plain strings, no DOM. */

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const MARGINS: Margins = { top: 44, right: 24, bottom: 46, left: 64 };

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Linear or log mapping from data to pixel coordinates. */
export class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pxLo: number,
    readonly pxHi: number,
    readonly log = false,
  ) {}

  at(v: number): number {
    const [a, b] = this.log
      ? [Math.log10(this.lo), Math.log10(this.hi)]
      : [this.lo, this.hi];
    const x = this.log ? Math.log10(v) : v;
    const t = b === a ? 0.5 : (x - a) / (b - a);
    return this.pxLo + t * (this.pxHi - this.pxLo);
  }

  ticks(count = 6): number[] {
    if (this.log) {
      const lo = Math.ceil(Math.log10(this.lo) - 1e-9);
      const hi = Math.floor(Math.log10(this.hi) + 1e-9);
      const out: number[] = [];
      for (let e = lo; e <= hi; e++) out.push(Math.pow(10, e));
      return out.length >= 2 ? out : [this.lo, this.hi];
    }
    const range = this.hi - this.lo || 1;
    const rough = range / count;
    const mag = Math.pow(10, Math.floor(Math.log10(rough)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
    const out: number[] = [];
    for (let v = Math.ceil(this.lo / step) * step; v <= this.hi + step * 1e-6; v += step) {
      out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
    }
    return out;
  }
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return Number(v.toPrecision(3)).toString();
  }
  const e = Math.floor(Math.log10(a));
  const m = v / Math.pow(10, e);
  const mm = Number(m.toPrecision(2));
  return mm === 1 ? `1e${e}` : `${mm}e${e}`;
}

/** Blue -> yellow -> red intensity ramp on [0, 1]. */
export function heatColor(t: number): string {
  const x = Math.max(0, Math.min(1, t));
  const h = 240 - 240 * x; // blue to red
  const l = 28 + 32 * x;
  return `hsl(${h.toFixed(0)},85%,${l.toFixed(0)}%)`;
}

export interface AxisSpec {
  scale: Scale;
  label: string;
  orient: "x" | "y";
  cross: number; // pixel position of the perpendicular axis line
  length: number; // extent of the plot area along the other direction
}

export function axis(a: AxisSpec): string {
  const parts: string[] = [];
  const tickLen = 5;
  for (const v of a.scale.ticks()) {
    const p = a.scale.at(v);
    if (a.orient === "x") {
      parts.push(`<line x1="${p.toFixed(1)}" y1="${a.cross}" x2="${p.toFixed(1)}" y2="${a.cross + tickLen}" stroke="#444"/>`);
      parts.push(`<text x="${p.toFixed(1)}" y="${a.cross + 18}" text-anchor="middle" class="tick">${fmtTick(v)}</text>`);
      parts.push(`<line x1="${p.toFixed(1)}" y1="${a.cross}" x2="${p.toFixed(1)}" y2="${a.cross - a.length}" stroke="#000" stroke-opacity="0.06"/>`);
    } else {
      parts.push(`<line x1="${a.cross - tickLen}" y1="${p.toFixed(1)}" x2="${a.cross}" y2="${p.toFixed(1)}" stroke="#444"/>`);
      parts.push(`<text x="${a.cross - 8}" y="${(p + 3.5).toFixed(1)}" text-anchor="end" class="tick">${fmtTick(v)}</text>`);
      parts.push(`<line x1="${a.cross}" y1="${p.toFixed(1)}" x2="${a.cross + a.length}" y2="${p.toFixed(1)}" stroke="#000" stroke-opacity="0.06"/>`);
    }
  }
  return parts.join("\n");
}

export interface Doc {
  width: number;
  height: number;
  title: string;
  /** JSON-serializable provenance embedded as <metadata>. */
  metadata: Record<string, unknown>;
  body: string;
}

export function document(doc: Doc): string {
  return `<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="${doc.width}" height="${doc.height}" viewBox="0 0 ${doc.width} ${doc.height}">
<metadata id="gocdr-provenance">${esc(JSON.stringify(doc.metadata))}</metadata>
<style>
  text { font-family: sans-serif; font-size: 12px; fill: #222; }
  .tick { font-size: 10px; fill: #444; }
  .title { font-size: 14px; font-weight: bold; }
  .axis-label { font-size: 11px; fill: #333; }
</style>
<rect width="100%" height="100%" fill="white"/>
<text x="${doc.width / 2}" y="22" text-anchor="middle" class="title">${esc(doc.title)}</text>
${doc.body}
</svg>
`;
}
