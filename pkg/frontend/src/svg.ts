/**
 * Hand-rolled SVG output: scales, axes, polylines, legends.
 *
 * No chart library so the output is a pure function of the input values;
 * the contract tests rely on every plotted number surviving verbatim into
 * the document.
 */

export interface Scale {
  (value: number): number;
  ticks(): number[];
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 62, right: 20, top: 34, bottom: 46 };

export const PLOT = {
  width: WIDTH,
  height: HEIGHT,
  x0: MARGIN.left,
  x1: WIDTH - MARGIN.right,
  y0: HEIGHT - MARGIN.bottom,
  y1: MARGIN.top,
};

export const PALETTE = [
  '#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e',
  '#8c564b', '#17becf', '#7f7f7f', '#bcbd22', '#e377c2',
];

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step0);
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function linearScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (!(hi > lo)) {
    hi = lo + 1;
    lo = lo - 1;
  }
  const f = ((value: number) => rLo + ((value - lo) / (hi - lo)) * (rHi - rLo)) as Scale;
  f.ticks = () => niceTicks(lo, hi);
  return f;
}

export function logScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (!(lo > 0)) {
    throw new Error(`log scale requires positive domain, got [${lo}, ${hi}]`);
  }
  const la = Math.log10(lo);
  const lb = Math.log10(hi > lo ? hi : lo * 10);
  const f = ((value: number) => rLo + ((Math.log10(value) - la) / (lb - la)) * (rHi - rLo)) as Scale;
  f.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(la - 1e-9); e <= Math.floor(lb + 1e-9); e++) {
      out.push(Math.pow(10, e));
    }
    return out.length >= 2 ? out : [lo, hi];
  };
  return f;
}

export function fmt(value: number): string {
  if (value === 0) return '0';
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) return value.toExponential(1).replace('e+', 'e');
  return String(Number(value.toPrecision(6)));
}

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="14">${esc(title)}</text>`,
    );
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string): void {
    const { x0, x1, y0, y1 } = PLOT;
    this.parts.push(
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
    );
    for (const t of xs.ticks()) {
      const px = xs(t);
      if (px < x0 - 0.5 || px > x1 + 0.5) continue;
      this.parts.push(
        `<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + 5}" stroke="black"/>`,
        `<text x="${px.toFixed(2)}" y="${y0 + 18}" text-anchor="middle">${esc(fmt(t))}</text>`,
      );
    }
    for (const t of ys.ticks()) {
      const py = ys(t);
      if (py > y0 + 0.5 || py < y1 - 0.5) continue;
      this.parts.push(
        `<line x1="${x0 - 5}" y1="${py.toFixed(2)}" x2="${x0}" y2="${py.toFixed(2)}" stroke="black"/>`,
        `<text x="${x0 - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end">${esc(fmt(t))}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(x0 + x1) / 2}" y="${PLOT.height - 8}" text-anchor="middle">${esc(xLabel)}</text>`,
      `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
        `transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`,
    );
  }

  polyline(pts: Array<[number, number]>, color: string, dash = ''): void {
    if (pts.length === 0) return;
    const attr = dash ? ` stroke-dasharray="${dash}"` : '';
    const d = pts.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(' ');
    this.parts.push(
      `<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.5"${attr}/>`,
    );
  }

  dots(pts: Array<[number, number]>, color: string): void {
    for (const [x, y] of pts) {
      this.parts.push(
        `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="3" fill="${color}"/>`,
      );
    }
  }

  errorBars(bars: Array<[number, number, number]>, color: string): void {
    for (const [x, lo, hi] of bars) {
      this.parts.push(
        `<line x1="${x.toFixed(2)}" y1="${lo.toFixed(2)}" x2="${x.toFixed(2)}" ` +
          `y2="${hi.toFixed(2)}" stroke="${color}"/>`,
      );
    }
  }

  legend(entries: Array<[string, string]>, dashed: boolean[] = []): void {
    const x = PLOT.x0 + 10;
    entries.forEach(([label, color], i) => {
      const y = PLOT.y1 + 8 + i * 16;
      const dash = dashed[i] ? ' stroke-dasharray="5,3"' : '';
      this.parts.push(
        `<line x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}" stroke="${color}" stroke-width="1.5"${dash}/>`,
        `<text x="${x + 28}" y="${y + 4}">${esc(label)}</text>`,
      );
    });
  }

  toString(): string {
    return this.parts.join('\n') + '\n</svg>\n';
  }
}
