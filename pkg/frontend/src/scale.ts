/** Linear and base-10 log scales with round tick positions. */

export interface Scale {
  toPixel(v: number): number;
  ticks(): number[];
  domain: [number, number];
}

export function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step = niceStep(span / 5);
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= hi + 1e-12 * Math.abs(span); t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return {
    domain: [lo, hi],
    toPixel: (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo),
    ticks: () => ticks,
  };
}

export function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error("log scale needs positive bounds");
  }
  if (hi === lo) {
    hi = lo * 10;
  }
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi); e += 1) {
    ticks.push(10 ** e);
  }
  if (ticks.length === 0) {
    ticks.push(lo, hi);
  }
  return {
    domain: [lo, hi],
    toPixel: (v) => pxLo + ((Math.log10(v) - llo) / (lhi - llo)) * (pxHi - pxLo),
    ticks: () => ticks,
  };
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  const nice = norm <= 1 ? 1 : norm <= 2 ? 2 : norm <= 5 ? 5 : 10;
  return nice * mag;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) {
    return v.toExponential(0).replace("e+", "e");
  }
  return String(Number(v.toPrecision(6)));
}
