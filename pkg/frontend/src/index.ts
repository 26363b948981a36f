export { FIGURE_KINDS, render } from './figures.js';
export type { FigureKind, InputFile } from './figures.js';
export { SchemaError, parseCsv, requireColumns } from './csv.js';
export { logFit, sqrtLogFit } from './fits.js';
export { main } from './cli.js';
