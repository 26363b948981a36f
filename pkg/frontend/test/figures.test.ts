import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { SchemaError, parseCsv, requireColumns } from '../src/csv.js';
import { logFit, sqrtLogFit } from '../src/fits.js';
import { InputFile, render } from '../src/figures.js';

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');

function fixture(name: string, label?: string): InputFile {
  const path = join(FIXTURES, name);
  return { path, text: readFileSync(path, 'utf8'), label };
}

describe('rendering the bundled preset outputs', () => {
  it('rate_sweep renders one curve per input file', () => {
    const svg = render('rate_sweep', [
      fixture('rate_sweep_gamma_0.csv', 'γ=0'),
      fixture('rate_sweep_gamma_0.5.csv', 'γ=0.5'),
    ]);
    expect(svg).toContain('<svg');
    expect(svg).toContain('γ=0.5');
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
  });

  it('solved_vs_tau groups by policy with error bars', () => {
    const svg = render('solved_vs_tau', [fixture('sat_report.csv')]);
    expect(svg).toContain('ucb-rb');
    expect(svg).toContain('luby[2]');
    expect(svg).toContain('luby[42]');
  });

  it('regret_scaling overlays both reference fits in the legend', () => {
    const svg = render('regret_scaling', [fixture('regret_report.csv')]);
    expect(svg).toContain('log τ');
    expect(svg).toContain('√(τ log τ)');
    // two dashed reference curves beyond the data polyline
    expect((svg.match(/stroke-dasharray="5,3"/g) ?? []).length).toBeGreaterThanOrEqual(2);
  });

  it('coverage draws a bound series per estimator group', () => {
    const svg = render('coverage', [fixture('coverage.csv')]);
    expect(svg).toContain('bernstein');
    expect(svg).toContain('median');
    expect(svg).toContain('bound');
  });
});

describe('schema enforcement', () => {
  it('rejects a wrong header and lists both column sets', () => {
    const bad: InputFile = { path: 'x.csv', text: 'a,b\n1,2\n' };
    expect(() => render('regret_scaling', [bad])).toThrowError(SchemaError);
    try {
      render('regret_scaling', [bad]);
    } catch (err) {
      expect((err as Error).message).toContain('tau, policy, mean_reward');
      expect((err as Error).message).toContain('a, b');
    }
  });

  it('rejects an empty report instead of writing an empty image', () => {
    const empty: InputFile = {
      path: 'empty.csv',
      text: 'tau,policy,mean_reward,stderr,pseudo_regret,reps\n',
    };
    expect(() => render('regret_scaling', [empty])).toThrow(/no data rows/);
  });

  it('rejects ragged rows with the row number', () => {
    expect(() => parseCsv('r.csv', 't,rate,flag\n1,2\n')).toThrow(/row 2/);
  });

  it('requireColumns accepts an exact match', () => {
    const table = parseCsv('t.csv', 't,rate,flag\n1,0.5,\n');
    expect(() => requireColumns(table, ['t', 'rate', 'flag'])).not.toThrow();
  });
});

describe('plots values verbatim', () => {
  it('perturbing one CSV cell changes the rendered document', () => {
    const original = fixture('regret_report.csv');
    const before = render('regret_scaling', [original]);
    const lines = original.text.split('\n');
    const cells = lines[1].split(',');
    cells[4] = String(Number(cells[4]) + 1.0); // nudge one pseudo_regret value
    lines[1] = cells.join(',');
    const after = render('regret_scaling', [
      { path: original.path, text: lines.join('\n') },
    ]);
    expect(after).not.toBe(before);
  });

  it('identical inputs render byte-identical output', () => {
    const a = render('coverage', [fixture('coverage.csv')]);
    const b = render('coverage', [fixture('coverage.csv')]);
    expect(a).toBe(b);
  });
});

describe('reference fits', () => {
  it('recovers the scale constant on synthetic data', () => {
    const taus = [1e3, 1e4, 1e5];
    const log = logFit(taus, taus.map((t) => 3.0 * Math.log(t)));
    expect(log.c).toBeCloseTo(3.0, 10);
    const sqrt = sqrtLogFit(taus, taus.map((t) => 0.5 * Math.sqrt(t * Math.log(t))));
    expect(sqrt.c).toBeCloseTo(0.5, 10);
    expect(sqrt.label).toContain('√(τ log τ)');
  });
});
