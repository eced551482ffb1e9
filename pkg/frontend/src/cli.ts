/**
 * `render --kind <theta_sweep|acpr> --in <csv> --out <svg>`
 *
 * Exit codes: 0 on success, 1 on schema/IO errors. On error no output
 * file is written.
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./csv.js";
import { render } from "./render.js";

export function main(argv: string[]): number {
  try {
    const args = yargs(argv)
      .command("render", "render a cafqpsk CSV to SVG", (y) =>
        y
          .option("kind", {
            choices: ["theta_sweep", "acpr"] as const,
            demandOption: true,
          })
          .option("in", { type: "string", demandOption: true })
          .option("out", { type: "string", demandOption: true }),
      )
      .demandCommand(1)
      .strict()
      .exitProcess(false)
      .fail((msg) => {
        throw new SchemaError(msg);
      })
      .parseSync();

    const text = readFileSync(args.in as string, "utf8");
    const svg = render(args.kind as string, text);
    writeFileSync(args.out as string, svg);
    return 0;
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err);
    process.stderr.write(`render error: ${msg}\n`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(hideBin(process.argv)));
}
