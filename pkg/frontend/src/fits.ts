/**
 * One-parameter least-squares reference fits for the regret figure.
 *
 * Both references are scale families y = c * g(tau); the optimal c in the
 * least-squares sense is <y, g> / <g, g>. No statistics beyond this are
 * computed: the fits are visual guides, not estimates.
 */

export interface Fit {
  label: string;
  c: number;
  evaluate(tau: number): number;
}

function scaleFit(
  taus: number[],
  ys: number[],
  g: (tau: number) => number,
  name: string,
): Fit {
  let num = 0;
  let den = 0;
  for (let i = 0; i < taus.length; i++) {
    const gi = g(taus[i]);
    num += ys[i] * gi;
    den += gi * gi;
  }
  const c = den > 0 ? num / den : 0;
  return {
    label: `${(c >= 0 ? c : -c).toPrecision(3)}·${name}`.replace(/^/, c < 0 ? '-' : ''),
    c,
    evaluate: (tau) => c * g(tau),
  };
}

export function logFit(taus: number[], ys: number[]): Fit {
  return scaleFit(taus, ys, (tau) => Math.log(tau), 'log τ');
}

export function sqrtLogFit(taus: number[], ys: number[]): Fit {
  return scaleFit(taus, ys, (tau) => Math.sqrt(tau * Math.log(tau)), '√(τ log τ)');
}
