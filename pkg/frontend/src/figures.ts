/**
 * The four figure kinds, each a pure function from CSV text to an SVG
 * document. Nothing is aggregated or re-derived from the data: every
 * plotted coordinate is a value read from a cell, apart from the two
 * explicit least-squares reference curves on the regret figure.
 */

import { Table, num, parseCsv, requireColumns, str } from './csv.js';
import { Fit, logFit, sqrtLogFit } from './fits.js';
import { PALETTE, PLOT, SvgDoc, linearScale, logScale } from './svg.js';

export type FigureKind = 'rate_sweep' | 'solved_vs_tau' | 'regret_scaling' | 'coverage';

export const FIGURE_KINDS: FigureKind[] = [
  'rate_sweep', 'solved_vs_tau', 'regret_scaling', 'coverage',
];

export interface InputFile {
  path: string;
  text: string;
  label?: string;
}

const RATE_COLUMNS = ['t', 'rate', 'flag'] as const;
const REPORT_COLUMNS = ['tau', 'policy', 'mean_reward', 'stderr', 'pseudo_regret', 'reps'] as const;
const COVERAGE_COLUMNS = [
  'estimator', 'n', 'delta', 'violations', 'bound', 'fraction', 'pre_asymptotic',
] as const;

function baseName(path: string): string {
  const parts = path.split('/');
  return parts[parts.length - 1].replace(/\.csv$/, '');
}

function nonEmpty(table: Table): Table {
  if (table.rows.length === 0) {
    throw new Error(`${table.path}: no data rows to plot`);
  }
  return table;
}

interface Series {
  label: string;
  points: Array<{ x: number; y: number; err?: number; hollow?: boolean }>;
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) throw new Error('no finite values to plot');
  return [lo, hi];
}

function drawSeries(
  doc: SvgDoc,
  series: Series[],
  opts: { title: string; xLabel: string; yLabel: string; logX: boolean },
  extras: Fit[] = [],
): string {
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) =>
    s.points.flatMap((p) => (p.err ? [p.y - p.err, p.y + p.err] : [p.y])),
  );
  const [xLo, xHi] = extent(xs);
  const [yLoRaw, yHiRaw] = extent([...ys, ...extras.flatMap((f) => xs.map((x) => f.evaluate(x)))]);
  const pad = (yHiRaw - yLoRaw || Math.abs(yHiRaw) || 1) * 0.05;
  const yLo = Math.min(yLoRaw - pad, 0 < yLoRaw ? 0 : yLoRaw - pad);
  const sx = opts.logX
    ? logScale(xLo, xHi, PLOT.x0, PLOT.x1)
    : linearScale(xLo, xHi, PLOT.x0, PLOT.x1);
  const sy = linearScale(yLo, yHiRaw + pad, PLOT.y0, PLOT.y1);

  doc.axes(sx, sy, opts.xLabel, opts.yLabel);
  const legend: Array<[string, string]> = [];
  const dashed: boolean[] = [];
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points
      .filter((p) => Number.isFinite(p.x) && Number.isFinite(p.y))
      .map((p) => [sx(p.x), sy(p.y)] as [number, number]);
    doc.polyline(pts, color);
    doc.dots(
      s.points
        .filter((p) => !p.hollow && Number.isFinite(p.x) && Number.isFinite(p.y))
        .map((p) => [sx(p.x), sy(p.y)] as [number, number]),
      color,
    );
    const bars = s.points
      .filter((p) => p.err !== undefined && Number.isFinite(p.x))
      .map((p) => [sx(p.x), sy(p.y - p.err!), sy(p.y + p.err!)] as [number, number, number]);
    doc.errorBars(bars, color);
    legend.push([s.label, color]);
    dashed.push(false);
  });
  extras.forEach((fit, i) => {
    const color = PALETTE[(series.length + i) % PALETTE.length];
    const grid: number[] = [];
    for (let k = 0; k <= 60; k++) {
      grid.push(
        opts.logX
          ? xLo * Math.pow(xHi / xLo, k / 60)
          : xLo + ((xHi - xLo) * k) / 60,
      );
    }
    doc.polyline(
      grid.map((x) => [sx(x), sy(fit.evaluate(x))] as [number, number]),
      color,
      '5,3',
    );
    legend.push([fit.label, color]);
    dashed.push(true);
  });
  doc.legend(legend, dashed);
  return doc.toString();
}

function renderRateSweep(inputs: InputFile[]): string {
  const series: Series[] = inputs.map((input) => {
    const table = nonEmpty(parseCsv(input.path, input.text));
    requireColumns(table, RATE_COLUMNS);
    return {
      label: input.label ?? baseName(input.path),
      points: table.rows.map((row) => ({
        x: num(table, row, 't'),
        y: num(table, row, 'rate'),
        hollow: str(table, row, 'flag') !== 'ok' && str(table, row, 'flag') !== '',
      })),
    };
  });
  return drawSeries(new SvgDoc('Reward rate vs restart cutoff'), series, {
    title: '',
    xLabel: 'cutoff t',
    yLabel: 'reward rate',
    logX: true,
  });
}

function byPolicy(table: Table): Map<string, string[][]> {
  const groups = new Map<string, string[][]>();
  for (const row of table.rows) {
    const key = str(table, row, 'policy');
    const bucket = groups.get(key) ?? [];
    bucket.push(row);
    groups.set(key, bucket);
  }
  return groups;
}

function renderSolvedVsTau(inputs: InputFile[]): string {
  const table = nonEmpty(parseCsv(inputs[0].path, inputs[0].text));
  requireColumns(table, REPORT_COLUMNS);
  const series: Series[] = [...byPolicy(table)].map(([policy, rows]) => ({
    label: policy,
    points: rows.map((row) => ({
      x: num(table, row, 'tau'),
      y: num(table, row, 'mean_reward'),
      err: num(table, row, 'stderr'),
    })),
  }));
  return drawSeries(new SvgDoc('Solved instances vs flip budget'), series, {
    title: '',
    xLabel: 'budget τ',
    yLabel: 'mean solved count',
    logX: true,
  });
}

function renderRegretScaling(inputs: InputFile[]): string {
  const table = nonEmpty(parseCsv(inputs[0].path, inputs[0].text));
  requireColumns(table, REPORT_COLUMNS);
  const series: Series[] = [...byPolicy(table)].map(([policy, rows]) => ({
    label: policy,
    points: rows.map((row) => ({
      x: num(table, row, 'tau'),
      y: num(table, row, 'pseudo_regret'),
      err: num(table, row, 'stderr'),
    })),
  }));
  // reference curves fitted to all plotted points, reported in the legend
  const taus = series.flatMap((s) => s.points.map((p) => p.x));
  const regrets = series.flatMap((s) => s.points.map((p) => p.y));
  const fits = [logFit(taus, regrets), sqrtLogFit(taus, regrets)];
  return drawSeries(
    new SvgDoc('Pseudo-regret vs horizon'),
    series,
    { title: '', xLabel: 'horizon τ', yLabel: 'pseudo-regret', logX: true },
    fits,
  );
}

function renderCoverage(inputs: InputFile[]): string {
  const table = nonEmpty(parseCsv(inputs[0].path, inputs[0].text));
  requireColumns(table, COVERAGE_COLUMNS);
  const groups = new Map<string, string[][]>();
  for (const row of table.rows) {
    const key = `${str(table, row, 'estimator')} δ=${str(table, row, 'delta')}`;
    const bucket = groups.get(key) ?? [];
    bucket.push(row);
    groups.set(key, bucket);
  }
  const series: Series[] = [];
  for (const [key, rows] of groups) {
    series.push({
      label: key,
      points: rows.map((row) => ({
        x: num(table, row, 'n'),
        y: num(table, row, 'fraction'),
        hollow: ['1', 'true', 'True'].includes(str(table, row, 'pre_asymptotic')),
      })),
    });
    series.push({
      label: `${key} bound`,
      points: rows.map((row) => ({
        x: num(table, row, 'n'),
        y: num(table, row, 'bound'),
      })),
    });
  }
  return drawSeries(new SvgDoc('Coverage violation fraction vs sample size'), series, {
    title: '',
    xLabel: 'sample size n',
    yLabel: 'violation fraction',
    logX: true,
  });
}

export function render(kind: FigureKind, inputs: InputFile[]): string {
  if (inputs.length === 0) {
    throw new Error('at least one input CSV is required');
  }
  switch (kind) {
    case 'rate_sweep':
      return renderRateSweep(inputs);
    case 'solved_vs_tau':
      return renderSolvedVsTau(inputs);
    case 'regret_scaling':
      return renderRegretScaling(inputs);
    case 'coverage':
      return renderCoverage(inputs);
    default:
      throw new Error(`unknown figure kind ${JSON.stringify(kind)}`);
  }
}
