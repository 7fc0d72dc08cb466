#!/usr/bin/env node
/**
 * plot: render sweep CSVs from the simulator as a semilog BER chart.
 *
 *   plot --in a.csv --in b.csv --label A --label B [--ref-slope 4] --out fig.png
 *
 * --in may repeat; --label pairs up with --in positionally and falls
 * back to the file name. Output format follows the --out extension:
 * .svg always works, .png needs the optional @resvg/resvg-js dependency.
 *
 * Exit codes: 0 ok, 2 usage or input errors.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { EmptyData, ParseError, parseSweepCsv } from "./csv.js";
import { Curve, renderBerSvg, toCurve } from "./chart.js";

export interface PlotArgs {
  inputs: string[];
  labels: string[];
  refSlope?: number;
  out: string;
  title?: string;
}

export function parseArgs(argv: string[]): PlotArgs {
  const args: PlotArgs = { inputs: [], labels: [], out: "" };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${a} needs a value`);
      return argv[++i];
    };
    switch (a) {
      case "--in":
        args.inputs.push(next());
        break;
      case "--label":
        args.labels.push(next());
        break;
      case "--ref-slope": {
        const v = Number(next());
        if (!Number.isFinite(v) || v <= 0) throw new UsageError("--ref-slope must be a positive number");
        args.refSlope = v;
        break;
      }
      case "--out":
        args.out = next();
        break;
      case "--title":
        args.title = next();
        break;
      default:
        throw new UsageError(`unknown argument: ${a}`);
    }
  }
  if (args.inputs.length === 0) throw new UsageError("at least one --in is required");
  if (args.out === "") throw new UsageError("--out is required");
  if (args.labels.length > args.inputs.length) {
    throw new UsageError("more --label values than --in files");
  }
  return args;
}

export class UsageError extends Error {}

/** Render to SVG text; rasterization happens only at the file boundary. */
export function buildSvg(args: PlotArgs, note: (msg: string) => void): string {
  const curves: Curve[] = [];
  for (let i = 0; i < args.inputs.length; i++) {
    const path = args.inputs[i];
    const label = args.labels[i] ?? basename(path).replace(/\.csv$/, "");
    const data = parseSweepCsv(readFileSync(path, "utf-8"), path);
    const { curve, dropped } = toCurve(data, label);
    if (dropped > 0) note(`note: dropped ${dropped} zero-BER point(s) from ${label}`);
    curves.push(curve);
  }
  return renderBerSvg(curves, { refSlope: args.refSlope, title: args.title });
}

async function writeOutput(out: string, svg: string): Promise<void> {
  if (out.endsWith(".png")) {
    let Resvg;
    try {
      ({ Resvg } = await import("@resvg/resvg-js"));
    } catch {
      throw new UsageError(
        "png output needs the optional @resvg/resvg-js package; " +
          "install it or use an .svg output path"
      );
    }
    writeFileSync(out, new Resvg(svg).render().asPng());
  } else {
    writeFileSync(out, svg);
  }
}

export async function main(argv: string[]): Promise<number> {
  try {
    const args = parseArgs(argv);
    const svg = buildSvg(args, (m) => console.error(m));
    await writeOutput(args.out, svg);
    console.error(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (
      err instanceof UsageError ||
      err instanceof ParseError ||
      err instanceof EmptyData ||
      (err as NodeJS.ErrnoException).code === "ENOENT"
    ) {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

// argv[1] is this script when invoked directly, not under the test runner
if (process.argv[1] && /cli\.(ts|js|mjs)$/.test(process.argv[1])) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
