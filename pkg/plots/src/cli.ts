#!/usr/bin/env node
/**
 * Command line front end: render one plot from a JSON spec file or
 * from flags that mirror the spec fields.
 *
 *   phonoblock-plot spec.json
 *   phonoblock-plot --input sweep.csv --kind line --x delta --y g2_b \
 *       --log-y --output dip.svg
 */

import { readFileSync, realpathSync } from "fs";
import { pathToFileURL } from "url";
import yargs from "yargs";
import { PlotSpec, render, validateSpec } from "./plot.js";

function specFromFlags(argv: Record<string, unknown>): unknown {
  const spec: Record<string, unknown> = {};
  const copy: [string, keyof PlotSpec][] = [
    ["input", "input"],
    ["kind", "kind"],
    ["x", "x"],
    ["y", "y"],
    ["z", "z"],
    ["output", "output"],
    ["overlay", "overlay"],
    ["title", "title"],
    ["logX", "logX"],
    ["logY", "logY"],
    ["logZ", "logZ"],
  ];
  for (const [flag, field] of copy) {
    if (argv[flag] !== undefined) spec[field] = argv[flag];
  }
  return spec;
}

export function main(argv: string[]): number {
  const parser = yargs(argv)
    .usage("Usage: phonoblock-plot [spec.json] | phonoblock-plot --input ... --kind ... --output ...")
    .option("input", { type: "string", describe: "sweep CSV to read" })
    .option("kind", { type: "string", describe: "line | multi-line | contour" })
    .option("x", { type: "string", describe: "x column name" })
    .option("y", { type: "string", describe: "y column name" })
    .option("z", { type: "string", describe: "grouping / cell value column" })
    .option("log-x", { type: "boolean", describe: "logarithmic x axis" })
    .option("log-y", { type: "boolean", describe: "logarithmic y axis" })
    .option("log-z", { type: "boolean", describe: "logarithmic color scale" })
    .option("output", { type: "string", describe: "SVG file to write" })
    .option("overlay", { type: "string", describe: "optimal-curve sidecar CSV to draw dashed" })
    .option("title", { type: "string", describe: "plot title" })
    .help()
    .strictOptions()
    .exitProcess(false);

  let parsed;
  try {
    parsed = parser.parseSync();
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 1;
  }
  if (parsed.help) return 0;

  const positional = parsed._.map(String);
  const flagsUsed = ["input", "kind", "x", "y", "z", "output", "overlay", "title", "logX", "logY", "logZ"].some(
    (k) => (parsed as Record<string, unknown>)[k] !== undefined
  );

  let raw: unknown;
  try {
    if (positional.length > 1) {
      throw new Error("expected at most one spec file argument");
    }
    if (positional.length === 1 && flagsUsed) {
      throw new Error("give either a spec file or flags, not both");
    }
    if (positional.length === 1) {
      raw = JSON.parse(readFileSync(positional[0], "utf8"));
    } else if (flagsUsed) {
      raw = specFromFlags(parsed as Record<string, unknown>);
    } else {
      throw new Error("nothing to do: give a spec file or --input/--kind/... flags (see --help)");
    }
    const spec = validateSpec(raw);
    render(spec);
    process.stdout.write(`wrote ${spec.output}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

const invoked = process.argv[1] ? pathToFileURL(realpathSync(process.argv[1])).href : "";
if (import.meta.url === invoked) {
  process.exit(main(process.argv.slice(2)));
}
