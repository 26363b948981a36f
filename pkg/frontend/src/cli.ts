#!/usr/bin/env node
/**
 * Command line entry: renders one figure per invocation.
 *
 *   plotkit --kind rate_sweep --out fig.svg curve_a.csv curve_b.csv
 *   plotkit --spec figures.json
 *
 * A spec file holds {"kind", "out", "inputs": [{"path", "label"?}]} or a
 * list of such objects. Input labels default to the file name. The output
 * is written only after a successful render, so a failure never leaves a
 * truncated image behind.
 */

import { readFileSync, writeFileSync, mkdirSync } from 'node:fs';
import { dirname } from 'node:path';

import { FIGURE_KINDS, FigureKind, InputFile, render } from './figures.js';

interface SpecEntry {
  kind: FigureKind;
  out: string;
  inputs: Array<{ path: string; label?: string }>;
}

function loadInput(path: string, label?: string): InputFile {
  return { path, text: readFileSync(path, 'utf8'), label };
}

function renderEntry(entry: SpecEntry): void {
  if (!FIGURE_KINDS.includes(entry.kind)) {
    throw new Error(
      `unknown figure kind ${JSON.stringify(entry.kind)}; expected one of ${FIGURE_KINDS.join(', ')}`,
    );
  }
  const svg = render(entry.kind, entry.inputs.map((i) => loadInput(i.path, i.label)));
  mkdirSync(dirname(entry.out) || '.', { recursive: true });
  writeFileSync(entry.out, svg);
  console.log(`wrote ${entry.out}`);
}

export function main(argv: string[]): number {
  const args = [...argv];
  let kind: string | undefined;
  let out: string | undefined;
  let spec: string | undefined;
  const paths: string[] = [];
  while (args.length > 0) {
    const arg = args.shift()!;
    if (arg === '--kind') kind = args.shift();
    else if (arg === '--out') out = args.shift();
    else if (arg === '--spec') spec = args.shift();
    else if (arg === '--help' || arg === '-h') {
      console.log(
        `usage: plotkit --kind <${FIGURE_KINDS.join('|')}> --out FILE input.csv...\n` +
          '       plotkit --spec figures.json',
      );
      return 0;
    } else if (arg.startsWith('--')) {
      throw new Error(`unknown flag ${arg}`);
    } else paths.push(arg);
  }

  const entries: SpecEntry[] = [];
  if (spec !== undefined) {
    const parsed = JSON.parse(readFileSync(spec, 'utf8'));
    entries.push(...(Array.isArray(parsed) ? parsed : [parsed]));
  } else {
    if (kind === undefined || out === undefined || paths.length === 0) {
      throw new Error('need --kind, --out and at least one input CSV (or --spec)');
    }
    entries.push({
      kind: kind as FigureKind,
      out,
      inputs: paths.map((p) => ({ path: p })),
    });
  }
  for (const entry of entries) {
    renderEntry(entry);
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split('/').pop()!);
if (invokedDirectly) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}
