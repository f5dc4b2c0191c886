#!/usr/bin/env node
/**
 * Render one figure from a JSON spec:
 *
 *   gadmm-figures --spec figure.json
 *
 * The spec names the figure kind, the input trace/CDF CSV files, optional
 * per-curve labels and a title, and the output SVG path.
 */

import { SchemaError } from "./csv.js";
import { parseSpec } from "./figures.js";
import { render } from "./render.js";

function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx < 0 || idx + 1 >= argv.length) {
    console.error("usage: gadmm-figures --spec PATH");
    return 1;
  }
  try {
    const out = render(parseSpec(argv[idx + 1]));
    console.log(out);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`spec error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exit(main(process.argv.slice(2)));
