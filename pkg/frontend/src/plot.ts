#!/usr/bin/env node
/**
 * plot <kind> --in CSV [--in2 CSV] --out IMG
 *
 * Renders a workbench result CSV into an SVG figure. Kinds: eye,
 * ber-surface, jtol, tradeoff. For jtol, --in2 may point at the
 * `.points.json` sidecar so points that exceeded the search bracket are
 * drawn as up arrows.
 *
 * Exit codes follow the workbench convention: 0 ok, 2 bad arguments or a
 * schema mismatch (the offending column is named), 3 runtime failure.
 */

import { writeFileSync } from "fs";
import { FigureKind, FigureSpec, render } from "./render.js";
import { SchemaMismatchError } from "./csv.js";

const KINDS: FigureKind[] = ["eye", "ber-surface", "jtol", "tradeoff"];

function usage(): string {
  return `usage: plot <${KINDS.join("|")}> --in CSV [--in2 CSV] --out IMG`;
}

export function parseArgs(argv: string[]): FigureSpec | string {
  if (argv.length === 0) return usage();
  const [kind, ...rest] = argv;
  if (!KINDS.includes(kind as FigureKind)) {
    return `unknown figure kind '${kind}'; ${usage()}`;
  }
  const opts = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const val = rest[i + 1];
    if (!key.startsWith("--") || val === undefined) return usage();
    opts.set(key.slice(2), val);
  }
  const input = opts.get("in");
  const outPath = opts.get("out");
  if (!input || !outPath) return usage();
  return { kind: kind as FigureKind, input, input2: opts.get("in2"), outPath };
}

export function run(argv: string[]): number {
  const spec = parseArgs(argv);
  if (typeof spec === "string") {
    console.error(spec);
    return 2;
  }
  let result;
  try {
    result = render(spec);
  } catch (err) {
    if (err instanceof SchemaMismatchError) {
      console.error(`plot ${spec.kind}: ${err.message}`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`plot ${spec.kind}: ${(err as Error).message}`);
      return 2;
    }
    console.error(`plot ${spec.kind}: ${(err as Error).message}`);
    return 3;
  }
  try {
    writeFileSync(spec.outPath, result.svg);
  } catch (err) {
    console.error(`plot ${spec.kind}: cannot write ${spec.outPath}: ${(err as Error).message}`);
    return 3;
  }
  console.log(`${spec.outPath}: ${spec.kind} ${JSON.stringify(result.stats)}`);
  return 0;
}

const isMain = process.argv[1] !== undefined
  && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isMain) {
  process.exit(run(process.argv.slice(2)));
}
