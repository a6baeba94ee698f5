/** Minimal dependency-free SVG plotting: panels, log axes, markers. */

export type Marker = "triangle" | "square" | "circle" | "none";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  marker: Marker;
  dash: string; // stroke-dasharray, "" for solid
  color: string;
}

export interface Guide {
  label: string;
  x: [number, number];
  y: [number, number];
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  logX: boolean;
  logY: boolean;
  series: Series[];
  guides: Guide[];
}

const W = 420;
const H = 360;
const MARGIN = { left: 62, right: 14, top: 30, bottom: 44 };

function finiteExtent(values: number[], log: boolean): [number, number] {
  const ok = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (ok.length === 0) {
    throw new Error("no finite data to plot");
  }
  let lo = Math.min(...ok);
  let hi = Math.max(...ok);
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  }
  return [lo, hi];
}

function scale(lo: number, hi: number, log: boolean, range: [number, number]) {
  const [r0, r1] = range;
  if (log) {
    const a = Math.log10(lo);
    const b = Math.log10(hi);
    return (v: number) => r0 + ((Math.log10(v) - a) / (b - a)) * (r1 - r0);
  }
  return (v: number) => r0 + ((v - lo) / (hi - lo)) * (r1 - r0);
}

function ticks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    for (let d = Math.ceil(Math.log10(lo) - 1e-9);
         d <= Math.floor(Math.log10(hi) + 1e-9); d++) {
      out.push(Math.pow(10, d));
    }
    if (out.length === 0) out.push(lo, hi);
    return out;
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 8 ? 2 : 1;
  const out: number[] = [];
  for (let v = Math.ceil(lo / (step * mult)) * step * mult; v <= hi + 1e-12;
       v += step * mult) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const mag = Math.abs(v);
  if (mag >= 0.01 && mag < 10000) return String(Number(v.toPrecision(4)));
  return v.toExponential(0);
}

function markerShape(m: Marker, px: number, py: number, color: string): string {
  const s = 4;
  switch (m) {
    case "triangle":
      return `<polygon points="${px},${py - s} ${px - s},${py + s} ` +
        `${px + s},${py + s}" fill="${color}"/>`;
    case "square":
      return `<rect x="${px - s}" y="${py - s}" width="${2 * s}" ` +
        `height="${2 * s}" fill="${color}"/>`;
    case "circle":
      return `<circle cx="${px}" cy="${py}" r="${s}" fill="${color}"/>`;
    default:
      return "";
  }
}

function renderPanel(panel: Panel, x0: number): string {
  const xs = panel.series.flatMap((s) => s.x)
    .concat(panel.guides.flatMap((g) => g.x));
  const ys = panel.series.flatMap((s) => s.y)
    .concat(panel.guides.flatMap((g) => g.y));
  const [xlo, xhi] = finiteExtent(xs, panel.logX);
  const [ylo, yhi] = finiteExtent(ys, panel.logY);
  const padX = panel.logX ? 1.25 : 0;
  const padY = panel.logY ? 1.6 : 0.06 * (yhi - ylo || 1);
  const sx = scale(panel.logX ? xlo / padX : xlo - padY * 0,
                   panel.logX ? xhi * padX : xhi,
                   panel.logX, [x0 + MARGIN.left, x0 + W - MARGIN.right]);
  const sy = scale(panel.logY ? ylo / padY : ylo - padY,
                   panel.logY ? yhi * padY : yhi + padY,
                   panel.logY, [H - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  parts.push(`<rect x="${x0 + MARGIN.left}" y="${MARGIN.top}" ` +
    `width="${W - MARGIN.left - MARGIN.right}" ` +
    `height="${H - MARGIN.top - MARGIN.bottom}" fill="none" stroke="black"/>`);
  parts.push(`<text x="${x0 + W / 2}" y="16" text-anchor="middle" ` +
    `font-size="13">${panel.title}</text>`);
  parts.push(`<text x="${x0 + W / 2}" y="${H - 8}" text-anchor="middle" ` +
    `font-size="11">${panel.xLabel}</text>`);
  parts.push(`<text x="${x0 + 14}" y="${H / 2}" text-anchor="middle" ` +
    `font-size="11" transform="rotate(-90 ${x0 + 14} ${H / 2})">` +
    `${panel.yLabel}</text>`);

  for (const t of ticks(...finiteExtent(xs, panel.logX), panel.logX)) {
    const px = sx(t);
    parts.push(`<line x1="${px}" y1="${H - MARGIN.bottom}" x2="${px}" ` +
      `y2="${H - MARGIN.bottom + 4}" stroke="black"/>`);
    parts.push(`<text x="${px}" y="${H - MARGIN.bottom + 16}" ` +
      `text-anchor="middle" font-size="10">${fmt(t)}</text>`);
  }
  for (const t of ticks(...finiteExtent(ys, panel.logY), panel.logY)) {
    const py = sy(t);
    parts.push(`<line x1="${x0 + MARGIN.left - 4}" y1="${py}" ` +
      `x2="${x0 + MARGIN.left}" y2="${py}" stroke="black"/>`);
    parts.push(`<text x="${x0 + MARGIN.left - 7}" y="${py + 3}" ` +
      `text-anchor="end" font-size="10">${fmt(t)}</text>`);
  }

  for (const g of panel.guides) {
    const d = `M ${sx(g.x[0])} ${sy(g.y[0])} L ${sx(g.x[1])} ${sy(g.y[1])}`;
    parts.push(`<path d="${d}" stroke="#888" fill="none" stroke-width="1.3"/>`);
    parts.push(`<text x="${sx(g.x[1]) + 3}" y="${sy(g.y[1])}" ` +
      `font-size="10" fill="#666">${g.label}</text>`);
  }

  panel.series.forEach((s, i) => {
    const pts = s.x.map((v, k) => `${sx(v)} ${sy(s.y[k])}`);
    if (pts.length > 1) {
      const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
      parts.push(`<path d="M ${pts.join(" L ")}" fill="none" ` +
        `stroke="${s.color}" stroke-width="1.4"${dash}/>`);
    }
    s.x.forEach((v, k) => {
      parts.push(markerShape(s.marker, sx(v), sy(s.y[k]), s.color));
    });
    const ly = MARGIN.top + 14 + 13 * i;
    const lx = x0 + W - MARGIN.right - 8;
    parts.push(`<text x="${lx}" y="${ly}" text-anchor="end" font-size="10" ` +
      `fill="${s.color}">${s.label}</text>`);
  });
  return parts.join("\n");
}

/** Render panels side by side into one standalone SVG document. */
export function renderPanels(panels: Panel[]): string {
  if (panels.length === 0) {
    throw new Error("nothing to render: no panels");
  }
  const body = panels.map((p, i) => renderPanel(p, i * W)).join("\n");
  return `<svg xmlns="http://www.w3.org/2000/svg" ` +
    `width="${W * panels.length}" height="${H}" ` +
    `font-family="Helvetica, sans-serif">\n<rect width="100%" ` +
    `height="100%" fill="white"/>\n${body}\n</svg>\n`;
}
