/**
 * Minimal CSV reader for the workbench's result files: one header row,
 * comma-separated numeric fields ('.' decimal), no quoting.
 */

import { readFileSync } from "fs";
import { createHash } from "crypto";

export class SchemaMismatchError extends Error {
  constructor(public readonly file: string, public readonly column: string) {
    super(`${file}: missing required column '${column}'`);
    this.name = "SchemaMismatchError";
  }
}

export interface Table {
  path: string;
  header: string[];
  /** column name -> values, row-aligned */
  columns: Map<string, number[]>;
  nRows: number;
  /** sha256 of the raw file bytes */
  digest: string;
}

export function readCsv(path: string, required: string[]): Table {
  const raw = readFileSync(path);
  const digest = createHash("sha256").update(raw).digest("hex");
  const lines = raw.toString("utf-8").split("\n").filter((l) => l.trim() !== "");
  if (lines.length === 0) throw new SchemaMismatchError(path, required[0] ?? "?");
  const header = lines[0].split(",").map((h) => h.trim());
  for (const col of required) {
    if (!header.includes(col)) throw new SchemaMismatchError(path, col);
  }
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    header.forEach((h, i) => {
      const cell = (parts[i] ?? "").trim();
      // booleans appear in the pass column; map to 1/0
      const v = cell === "true" ? 1 : cell === "false" ? 0 : Number(cell);
      columns.get(h)!.push(v);
    });
  }
  return { path, header, columns, nRows: lines.length - 1, digest };
}

export function col(t: Table, name: string): number[] {
  const c = t.columns.get(name);
  if (c === undefined) throw new SchemaMismatchError(t.path, name);
  return c;
}
