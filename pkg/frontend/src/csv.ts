/**
 * Minimal CSV reader for the simulator's output files.
 *
 * The producer never quotes fields or embeds separators, so a plain split
 * is exact. Schemas are enforced strictly: a file with missing or extra
 * columns is rejected with both column lists in the message, because a
 * silently reordered header would otherwise plot the wrong quantity.
 */

export class SchemaError extends Error {
  constructor(path: string, expected: readonly string[], found: readonly string[]) {
    super(
      `${path}: header mismatch; expected columns [${expected.join(', ')}] ` +
        `but found [${found.join(', ')}]`,
    );
    this.name = 'SchemaError';
  }
}

export interface Table {
  path: string;
  columns: string[];
  rows: string[][];
}

export function parseCsv(path: string, text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty file`);
  }
  const columns = lines[0].split(',');
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(',');
    if (cells.length !== columns.length) {
      throw new Error(
        `${path}: row ${i + 2} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    return cells;
  });
  return { path, columns, rows };
}

export function requireColumns(table: Table, expected: readonly string[]): void {
  const same =
    table.columns.length === expected.length &&
    expected.every((c, i) => table.columns[i] === c);
  if (!same) {
    throw new SchemaError(table.path, expected, table.columns);
  }
}

/** Numeric cell access; "inf" is the producer's spelling of Infinity. */
export function num(table: Table, row: string[], column: string): number {
  const idx = table.columns.indexOf(column);
  const raw = row[idx];
  if (raw === 'inf') return Infinity;
  if (raw === '-inf') return -Infinity;
  const value = Number(raw);
  if (Number.isNaN(value)) {
    throw new Error(`${table.path}: non-numeric value ${JSON.stringify(raw)} in column ${column}`);
  }
  return value;
}

export function str(table: Table, row: string[], column: string): string {
  return row[table.columns.indexOf(column)];
}
