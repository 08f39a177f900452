/**
 * plots --in results.csv --fig {dfo_err|mse|ber|tp} --out figure.svg
 *       [--position p3db|<meters>] [--estimators a,b,...] [--log-y|--linear-y]
 */

import { FigureKind, FigureSpec, SelectionError } from "./figure.js";
import { render } from "./render.js";
import { SchemaError } from "./schema.js";

const USAGE = `usage: plots --in results.csv --fig {dfo_err|mse|ber|tp} --out figure.svg
             [--position p3db|<meters>] [--estimators name,name,...]
             [--log-y | --linear-y]`;

const KINDS: FigureKind[] = ["dfo_err", "mse", "ber", "tp"];

export function parseArgs(argv: string[]): FigureSpec {
  const values = new Map<string, string>();
  const flags = new Set<string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument ${arg}\n${USAGE}`);
    }
    const name = arg.slice(2);
    if (name === "log-y" || name === "linear-y") {
      flags.add(name);
      continue;
    }
    const value = argv[++i];
    if (value === undefined) {
      throw new Error(`missing value for --${name}\n${USAGE}`);
    }
    values.set(name, value);
  }
  for (const required of ["in", "fig", "out"]) {
    if (!values.has(required)) {
      throw new Error(`missing --${required}\n${USAGE}`);
    }
  }
  const kind = values.get("fig") as FigureKind;
  if (!KINDS.includes(kind)) {
    throw new Error(`unknown figure kind ${values.get("fig")}\n${USAGE}`);
  }
  const spec: FigureSpec = {
    kind,
    inputPath: values.get("in")!,
    outputPath: values.get("out")!,
  };
  const position = values.get("position");
  if (position !== undefined) {
    if (position === "p3db") {
      spec.position = "p3db";
    } else {
      const parsed = Number(position);
      if (Number.isNaN(parsed)) {
        throw new Error(`--position must be a number or "p3db"\n${USAGE}`);
      }
      spec.position = parsed;
    }
  }
  const estimators = values.get("estimators");
  if (estimators !== undefined) {
    spec.estimators = estimators.split(",").filter((e) => e.length > 0);
  }
  if (flags.has("log-y")) spec.logY = true;
  if (flags.has("linear-y")) spec.logY = false;
  return spec;
}

export function main(argv: string[]): number {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
  } catch (error) {
    console.error((error as Error).message);
    return 2;
  }
  try {
    render(spec);
  } catch (error) {
    if (error instanceof SchemaError || error instanceof SelectionError) {
      console.error(error.message);
      return 1;
    }
    throw error;
  }
  console.log(`wrote ${spec.outputPath}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
