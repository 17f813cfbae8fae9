/**
 * Figure renderers for the workbench's CSV outputs.
 *
 * Pure presentation: values are binned/interpolated exactly as they appear
 * in the files, never recomputed. Every SVG embeds the sha256 digest of the
 * CSV(s) it was drawn from in its <metadata> element.
 */

import { basename } from "path";
import { readFileSync } from "fs";
import { createHash } from "crypto";

import { Table, col, readCsv } from "./csv.js";
import { MARGINS, Scale, axis, document as svgDocument, esc, fmtTick, heatColor } from "./svg.js";

export type FigureKind = "eye" | "ber-surface" | "jtol" | "tradeoff";

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  input2?: string;
  outPath: string;
}

export interface RenderResult {
  svg: string;
  /** renderer-specific summary used by tests and the CLI's one-line report */
  stats: Record<string, unknown>;
}

const WIDTH = 640;
const HEIGHT = 420;

function plotArea() {
  return {
    x0: MARGINS.left,
    x1: WIDTH - MARGINS.right,
    y0: HEIGHT - MARGINS.bottom,
    y1: MARGINS.top,
  };
}

function metadata(kind: string, tables: { path: string; digest: string }[]) {
  return {
    tool: "gocdr-plots",
    kind,
    inputs: tables.map((t) => ({ file: basename(t.path), sha256: t.digest })),
  };
}

function xLabel(text: string): string {
  return `<text x="${(MARGINS.left + WIDTH - MARGINS.right) / 2}" y="${HEIGHT - 8}" text-anchor="middle" class="axis-label">${esc(text)}</text>`;
}

function yLabel(text: string): string {
  const y = (MARGINS.top + HEIGHT - MARGINS.bottom) / 2;
  return `<text x="16" y="${y}" text-anchor="middle" class="axis-label" transform="rotate(-90 16 ${y})">${esc(text)}</text>`;
}

// ---------------------------------------------------------------------------
// eye histogram heatmap
// ---------------------------------------------------------------------------

export function renderEye(t: Table): RenderResult {
  const rel = col(t, "rel_time_ui");
  const level = col(t, "level");
  const count = col(t, "count");
  const times = Array.from(new Set(rel)).sort((a, b) => a - b);
  const binW = times.length > 1 ? times[1] - times[0] : 1;

  const byKey = new Map<string, number>();
  for (let i = 0; i < rel.length; i++) {
    byKey.set(`${level[i]}|${rel[i]}`, count[i]);
  }
  const peak = Math.max(1, ...count);
  const area = plotArea();
  const x = new Scale(0, 1, area.x0, area.x1);
  const bandH = (area.y0 - area.y1) / 2 - 6;

  const parts: string[] = [];
  const nonzeroTimes = new Set<number>();
  for (const lv of [0, 1]) {
    const yTop = lv === 1 ? area.y1 : area.y1 + bandH + 12;
    parts.push(`<text x="${area.x1 + 2}" y="${yTop + bandH / 2}" class="tick" transform="rotate(90 ${area.x1 + 4} ${yTop + bandH / 2})">level ${lv}</text>`);
    parts.push(`<rect x="${area.x0}" y="${yTop}" width="${area.x1 - area.x0}" height="${bandH}" fill="none" stroke="#999"/>`);
    for (const tm of times) {
      const c = byKey.get(`${lv}|${tm}`) ?? 0;
      if (c <= 0) continue;
      nonzeroTimes.add(tm);
      // bins are centered on their rel_time value and wrap circularly
      const lo = Math.max(0, tm - binW / 2);
      const hi = Math.min(1, tm + binW / 2);
      parts.push(`<rect x="${x.at(lo).toFixed(2)}" y="${yTop}" width="${(x.at(hi) - x.at(lo)).toFixed(2)}" height="${bandH}" fill="${heatColor(c / peak)}" fill-opacity="${(0.25 + 0.75 * c / peak).toFixed(3)}"/>`);
    }
  }
  parts.push(axis({ scale: x, label: "", orient: "x", cross: area.y0, length: 0 }));
  parts.push(xLabel("time since sampling edge (UI, mod 1)"));

  const svg = svgDocument({
    width: WIDTH,
    height: HEIGHT,
    title: "Recovered-clock eye: transition histogram",
    metadata: metadata("eye", [t]),
    body: parts.join("\n"),
  });
  const sorted = Array.from(nonzeroTimes).sort((a, b) => a - b);
  return {
    svg,
    stats: {
      nonzeroTimes: sorted,
      nBins: times.length,
      totalCount: count.reduce((a, b) => a + b, 0),
    },
  };
}

// ---------------------------------------------------------------------------
// BER surface heatmap
// ---------------------------------------------------------------------------

const BER_FLOOR = 1e-16; // display floor for exact zeros on the log scale

export function renderBerSurface(t: Table): RenderResult {
  const f = col(t, "sj_freq_norm");
  const a = col(t, "sj_amp_pp_ui");
  const b = col(t, "ber");
  const freqs = Array.from(new Set(f)).sort((x, y) => x - y);
  const amps = Array.from(new Set(a)).sort((x, y) => x - y);
  const grid = new Map<string, number>();
  for (let i = 0; i < f.length; i++) grid.set(`${f[i]}|${a[i]}`, b[i]);

  const logs = b.map((v) => Math.log10(Math.max(v, BER_FLOOR)));
  const lo = Math.min(...logs);
  const hi = Math.max(...logs, lo + 1e-9);

  const area = plotArea();
  const parts: string[] = [];
  const cw = (area.x1 - area.x0) / freqs.length;
  const ch = (area.y0 - area.y1) / amps.length;
  for (let i = 0; i < freqs.length; i++) {
    for (let j = 0; j < amps.length; j++) {
      const v = grid.get(`${freqs[i]}|${amps[j]}`);
      if (v === undefined) continue;
      const tNorm = (Math.log10(Math.max(v, BER_FLOOR)) - lo) / (hi - lo);
      const px = area.x0 + i * cw;
      const py = area.y0 - (j + 1) * ch;
      parts.push(`<rect x="${px.toFixed(2)}" y="${py.toFixed(2)}" width="${cw.toFixed(2)}" height="${ch.toFixed(2)}" fill="${heatColor(tNorm)}"><title>f=${freqs[i]} amp=${amps[j]} ber=${v}</title></rect>`);
    }
  }
  // cell-centered category labels
  freqs.forEach((v, i) => {
    const px = area.x0 + (i + 0.5) * cw;
    parts.push(`<text x="${px.toFixed(1)}" y="${area.y0 + 16}" text-anchor="middle" class="tick">${fmtTick(v)}</text>`);
  });
  amps.forEach((v, j) => {
    const py = area.y0 - (j + 0.5) * ch;
    parts.push(`<text x="${area.x0 - 8}" y="${(py + 3.5).toFixed(1)}" text-anchor="end" class="tick">${fmtTick(v)}</text>`);
  });
  // color legend
  const legX = area.x1 - 150;
  for (let k = 0; k < 120; k++) {
    parts.push(`<rect x="${legX + k}" y="30" width="1.5" height="8" fill="${heatColor(k / 119)}"/>`);
  }
  parts.push(`<text x="${legX - 6}" y="38" text-anchor="end" class="tick">log10(BER) ${fmtTick(lo)}</text>`);
  parts.push(`<text x="${legX + 126}" y="38" class="tick">${fmtTick(hi)}</text>`);
  parts.push(xLabel("sinusoidal jitter frequency / data rate"));
  parts.push(yLabel("sinusoidal jitter amplitude (UI peak-peak)"));

  const svg = svgDocument({
    width: WIDTH,
    height: HEIGHT,
    title: "BER vs sinusoidal jitter frequency and amplitude",
    metadata: metadata("ber-surface", [t]),
    body: parts.join("\n"),
  });
  return { svg, stats: { nFreqs: freqs.length, nAmps: amps.length, log10Range: [lo, hi] } };
}

// ---------------------------------------------------------------------------
// jitter tolerance vs mask (log-log)
// ---------------------------------------------------------------------------

interface JtolSidecar {
  unbounded_freq_norms?: number[];
  amp_bracket_ui?: [number, number];
}

export function renderJtol(t: Table, sidecarPath?: string): RenderResult {
  const f = col(t, "freq_norm");
  const amp = col(t, "jtol_amp_ui");
  const mask = col(t, "mask_amp_ui");

  let sidecar: JtolSidecar = {};
  let sidecarDigest: { path: string; digest: string } | undefined;
  if (sidecarPath) {
    const raw = readFileSync(sidecarPath);
    sidecar = JSON.parse(raw.toString("utf-8")) as JtolSidecar;
    sidecarDigest = {
      path: sidecarPath,
      digest: createHash("sha256").update(raw).digest("hex"),
    };
  }
  const unbounded = new Set((sidecar.unbounded_freq_norms ?? []).map((v) => Number(v)));

  const finiteAmps = amp.filter((v, i) => !unbounded.has(f[i]) && isFinite(v) && v > 0);
  const maskAmps = mask.filter((v) => isFinite(v) && v > 0);
  const allAmps = [...finiteAmps, ...maskAmps, ...amp.filter((v) => isFinite(v) && v > 0)];
  const area = plotArea();
  const x = new Scale(Math.min(...f), Math.max(...f), area.x0, area.x1, true);
  const yLo = Math.min(...allAmps) / 2;
  const yHi = Math.max(...allAmps) * 2;
  const y = new Scale(yLo, yHi, area.y0, area.y1, true);

  const parts: string[] = [];
  parts.push(axis({ scale: x, label: "", orient: "x", cross: area.y0, length: area.y0 - area.y1 }));
  parts.push(axis({ scale: y, label: "", orient: "y", cross: area.x0, length: area.x1 - area.x0 }));

  if (maskAmps.length > 0) {
    const pts = f.map((v, i) => (isFinite(mask[i]) && mask[i] > 0
      ? `${x.at(v).toFixed(1)},${y.at(mask[i]).toFixed(1)}` : null))
      .filter((p): p is string => p !== null);
    parts.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="#b02a2a" stroke-width="1.5" stroke-dasharray="6,3"/>`);
    parts.push(`<text x="${area.x1 - 4}" y="${area.y1 + 14}" text-anchor="end" class="tick" fill="#b02a2a">mask floor</text>`);
  }

  const curvePts: string[] = [];
  let nArrows = 0;
  for (let i = 0; i < f.length; i++) {
    const px = x.at(f[i]);
    if (unbounded.has(f[i])) {
      // tolerance exceeded the search bracket: draw an up arrow at its top
      const py = y.at(amp[i]);
      parts.push(`<line x1="${px.toFixed(1)}" y1="${(py + 14).toFixed(1)}" x2="${px.toFixed(1)}" y2="${py.toFixed(1)}" stroke="#1a6b2a" stroke-width="2"/>`);
      parts.push(`<path d="M ${(px - 5).toFixed(1)} ${(py + 6).toFixed(1)} L ${px.toFixed(1)} ${py.toFixed(1)} L ${(px + 5).toFixed(1)} ${(py + 6).toFixed(1)}" fill="none" stroke="#1a6b2a" stroke-width="2"/>`);
      nArrows++;
      continue;
    }
    curvePts.push(`${px.toFixed(1)},${y.at(amp[i]).toFixed(1)}`);
    parts.push(`<circle cx="${px.toFixed(1)}" cy="${y.at(amp[i]).toFixed(1)}" r="2.6" fill="#1f4da0"/>`);
  }
  if (curvePts.length > 1) {
    parts.push(`<polyline points="${curvePts.join(" ")}" fill="none" stroke="#1f4da0" stroke-width="1.5"/>`);
  }
  parts.push(xLabel("jitter frequency / data rate"));
  parts.push(yLabel("tolerated amplitude (UI peak-peak)"));

  const tables = [t, ...(sidecarDigest ? [sidecarDigest] : [])];
  const svg = svgDocument({
    width: WIDTH,
    height: HEIGHT,
    title: "Sinusoidal jitter tolerance vs mask",
    metadata: metadata("jtol", tables),
    body: parts.join("\n"),
  });
  return { svg, stats: { nPoints: f.length, nUnbounded: nArrows, hasMask: maskAmps.length > 0 } };
}

// ---------------------------------------------------------------------------
// phase-noise / power trade-off (log-log)
// ---------------------------------------------------------------------------

export function renderTradeoff(t: Table): RenderResult {
  const power = col(t, "power_w");
  const sigma = col(t, "sigma_cid5_ui");
  const kappa = col(t, "kappa_sqrt_s");

  const area = plotArea();
  const x = new Scale(Math.min(...power) / 1.5, Math.max(...power) * 1.5, area.x0, area.x1, true);
  const y = new Scale(Math.min(...sigma) / 1.5, Math.max(...sigma) * 1.5, area.y0, area.y1, true);

  const parts: string[] = [];
  parts.push(axis({ scale: x, label: "", orient: "x", cross: area.y0, length: area.y0 - area.y1 }));
  parts.push(axis({ scale: y, label: "", orient: "y", cross: area.x0, length: area.x1 - area.x0 }));
  const pts = power.map((p, i) => `${x.at(p).toFixed(1)},${y.at(sigma[i]).toFixed(1)}`);
  parts.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="#1f4da0" stroke-width="1.8"/>`);
  power.forEach((p, i) => {
    parts.push(`<circle cx="${x.at(p).toFixed(1)}" cy="${y.at(sigma[i]).toFixed(1)}" r="3" fill="#1f4da0"><title>power=${p} W, sigma=${sigma[i]} UI, kappa=${kappa[i]}</title></circle>`);
  });
  parts.push(xLabel("oscillator power (W)"));
  parts.push(yLabel("clock jitter after a 5-bit run (UI RMS)"));

  const svg = svgDocument({
    width: WIDTH,
    height: HEIGHT,
    title: "Oscillator phase noise vs power consumption",
    metadata: metadata("tradeoff", [t]),
    body: parts.join("\n"),
  });
  return { svg, stats: { nPoints: power.length } };
}

// ---------------------------------------------------------------------------

const REQUIRED_COLUMNS: Record<FigureKind, string[]> = {
  eye: ["rel_time_ui", "level", "count"],
  "ber-surface": ["sj_freq_norm", "sj_amp_pp_ui", "ber"],
  jtol: ["freq_norm", "jtol_amp_ui", "mask_amp_ui", "margin_ui", "pass"],
  tradeoff: ["i_ss_a", "power_w", "kappa_sqrt_s", "sigma_cid5_ui"],
};

export function render(spec: FigureSpec): RenderResult {
  const table = readCsv(spec.input, REQUIRED_COLUMNS[spec.kind]);
  switch (spec.kind) {
    case "eye":
      return renderEye(table);
    case "ber-surface":
      return renderBerSurface(table);
    case "jtol":
      return renderJtol(table, spec.input2);
    case "tradeoff":
      return renderTradeoff(table);
  }
}
