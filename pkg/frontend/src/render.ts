/** Read a figure spec, load its inputs, write the SVG. */

import * as fs from "fs";
import * as path from "path";
import { FigureSpec, loadFigureData } from "./figures.js";
import { figureSvg } from "./svg.js";

export function render(spec: FigureSpec): string {
  const data = loadFigureData(spec);
  const svg = figureSvg(data, spec.title);
  fs.mkdirSync(path.dirname(path.resolve(spec.output)), { recursive: true });
  fs.writeFileSync(spec.output, svg);
  return spec.output;
}
