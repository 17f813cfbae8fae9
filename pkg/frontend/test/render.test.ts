import { createHash } from "crypto";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { readCsv, SchemaMismatchError } from "../src/csv.js";
import { render, renderEye } from "../src/render.js";
import { run } from "../src/plot.js";

const FIXTURES = join(__dirname, "..", "fixtures");

function fixture(name: string): string {
  return join(FIXTURES, name);
}

function sha256(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

function embeddedMetadata(svg: string): any {
  const m = svg.match(/<metadata id="gocdr-provenance">(.*?)<\/metadata>/s);
  expect(m).not.toBeNull();
  return JSON.parse(m![1].replace(/&amp;/g, "&").replace(/&lt;/g, "<").replace(/&gt;/g, ">"));
}

describe("every figure kind renders its golden fixture", () => {
  const cases: Array<[string, string, string?]> = [
    ["eye", "eye_clean.csv"],
    ["eye", "eye_smeared.csv"],
    ["ber-surface", "ber_surface.csv"],
    ["jtol", "jtol_vs_mask.csv", "jtol_points.json"],
    ["tradeoff", "tradeoff.csv"],
  ];
  for (const [kind, file, sidecar] of cases) {
    it(`${kind} <- ${file}`, () => {
      const result = render({
        kind: kind as any,
        input: fixture(file),
        input2: sidecar ? fixture(sidecar) : undefined,
        outPath: "/dev/null",
      });
      expect(result.svg).toContain("<svg");
      expect(result.svg).toContain("</svg>");
    });
  }
});

describe("image metadata digests", () => {
  it("embeds the sha256 of the input CSV", () => {
    for (const [kind, file] of [
      ["eye", "eye_clean.csv"],
      ["ber-surface", "ber_surface.csv"],
      ["tradeoff", "tradeoff.csv"],
    ] as const) {
      const { svg } = render({ kind, input: fixture(file), outPath: "x" });
      const meta = embeddedMetadata(svg);
      expect(meta.inputs[0].sha256).toBe(sha256(fixture(file)));
      expect(meta.kind).toBe(kind);
    }
  });

  it("embeds both digests for jtol with its sidecar", () => {
    const { svg } = render({
      kind: "jtol",
      input: fixture("jtol_vs_mask.csv"),
      input2: fixture("jtol_points.json"),
      outPath: "x",
    });
    const meta = embeddedMetadata(svg);
    expect(meta.inputs.map((i: any) => i.sha256)).toEqual([
      sha256(fixture("jtol_vs_mask.csv")),
      sha256(fixture("jtol_points.json")),
    ]);
  });
});

describe("eye figure semantics", () => {
  it("no-jitter fixture is a single transition line at 0.5 UI", () => {
    const table = readCsv(fixture("eye_clean.csv"), ["rel_time_ui", "level", "count"]);
    const { stats } = renderEye(table);
    const times = stats.nonzeroTimes as number[];
    expect(times).toHaveLength(1);
    expect(times[0]).toBeCloseTo(0.5, 6);
  });

  it("offset-oscillator fixture smears across many bins", () => {
    const table = readCsv(fixture("eye_smeared.csv"), ["rel_time_ui", "level", "count"]);
    const { stats } = renderEye(table);
    expect((stats.nonzeroTimes as number[]).length).toBeGreaterThan(5);
  });

  it("conserves the total transition count", () => {
    const table = readCsv(fixture("eye_clean.csv"), ["rel_time_ui", "level", "count"]);
    const { stats } = renderEye(table);
    const raw = readFileSync(fixture("eye_clean.csv"), "utf-8").trim().split("\n").slice(1);
    const total = raw.reduce((acc, ln) => acc + Number(ln.split(",")[2]), 0);
    expect(stats.totalCount).toBe(total);
  });
});

describe("jtol figure semantics", () => {
  it("draws unbounded points as arrows", () => {
    const { svg, stats } = render({
      kind: "jtol",
      input: fixture("jtol_vs_mask.csv"),
      input2: fixture("jtol_points.json"),
      outPath: "x",
    });
    const sidecar = JSON.parse(readFileSync(fixture("jtol_points.json"), "utf-8"));
    expect(stats.nUnbounded).toBe(sidecar.unbounded_freq_norms.length);
    expect(stats.nUnbounded).toBeGreaterThan(0);
    expect(svg).toContain("<path d=\"M ");
  });
});

describe("schema mismatches name the offending column", () => {
  it("throws SchemaMismatchError with the column", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "rel_time_ui,count\n0.5,1\n");
    expect(() => readCsv(bad, ["rel_time_ui", "level", "count"]))
      .toThrowError(/missing required column 'level'/);
  });
});

describe("command line", () => {
  it("renders to a file and exits 0", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "eye.svg");
    const rc = run(["eye", "--in", fixture("eye_clean.csv"), "--out", out]);
    expect(rc).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("</svg>");
  });

  it("exits 2 on a schema mismatch and names the column", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "freq_norm,jtol_amp_ui\n0.1,1.0\n");
    const rc = run(["jtol", "--in", bad, "--out", join(dir, "x.svg")]);
    expect(rc).toBe(2);
  });

  it("exits 2 on a missing input file", () => {
    const rc = run(["eye", "--in", "/no/such/file.csv", "--out", "/tmp/x.svg"]);
    expect(rc).toBe(2);
  });

  it("exits 2 on usage errors", () => {
    expect(run([])).toBe(2);
    expect(run(["volcano", "--in", "a", "--out", "b"])).toBe(2);
    expect(run(["eye", "--in", "a"])).toBe(2);
  });
});
