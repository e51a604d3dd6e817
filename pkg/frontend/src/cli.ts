#!/usr/bin/env node
/**
 * Command-line wrapper: `onlinefw-plots --kind Regret --out fig.svg
 * runs/orgfw_T512.csv runs/osfw_T512.csv`.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { render } from "./figure.js";
import { SchemaError } from "./schema.js";
import { PLOT_KINDS, type PlotKind } from "./series.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .usage("$0 --kind <kind> --out <file.svg> <csv...>")
    .option("kind", {
      choices: PLOT_KINDS as readonly PlotKind[],
      demandOption: true,
      describe: "which figure to draw",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("log-x", { type: "boolean", default: false })
    .option("log-y", { type: "boolean", default: false })
    .command("$0 <csv...>", "render a figure from run CSVs")
    .strict()
    .parse();

  const csvPaths = (args.csv as string[]).map(String);
  try {
    await render({
      csvPaths,
      kind: args.kind,
      outPath: args.out,
      logX: args["log-x"],
      logY: args["log-y"],
    });
    console.log(`wrote ${args.out} (${csvPaths.length} series)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof RangeError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
