import { join } from 'node:path'
import { numericColumn, readCsv } from './csv.js'
import { BLACK, BLUE, GRAY, GREEN, ORANGE, RED, Raster, Rgb, WHITE, YELLOW, formatTick, ticks } from './raster.js'

export interface FigureInfo {
  kind: string
  path: string
  width: number
  height: number
  xDomain: [number, number]
  yDomain: [number, number]
  pointCount: number
}

const SIZE = 720
const MARGIN = { left: 64, right: 20, top: 20, bottom: 44 }

class Frame {
  constructor(
    readonly raster: Raster,
    readonly xDomain: [number, number],
    readonly yDomain: [number, number],
  ) {}

  get plotWidth(): number {
    return this.raster.width - MARGIN.left - MARGIN.right
  }

  get plotHeight(): number {
    return this.raster.height - MARGIN.top - MARGIN.bottom
  }

  px(x: number): number {
    const [lo, hi] = this.xDomain
    return MARGIN.left + ((x - lo) / (hi - lo)) * this.plotWidth
  }

  py(y: number): number {
    const [lo, hi] = this.yDomain
    return MARGIN.top + (1 - (y - lo) / (hi - lo)) * this.plotHeight
  }

  axes(): void {
    const r = this.raster
    const x0 = MARGIN.left
    const x1 = r.width - MARGIN.right
    const y0 = MARGIN.top
    const y1 = r.height - MARGIN.bottom
    r.line(x0, y1, x1, y1, BLACK)
    r.line(x0, y0, x0, y1, BLACK)
    for (const t of ticks(this.xDomain[0], this.xDomain[1])) {
      const x = this.px(t)
      r.line(x, y1, x, y1 + 4, BLACK)
      const label = formatTick(t)
      r.text(x - (label.length * 6) / 2, y1 + 8, label, BLACK)
    }
    for (const t of ticks(this.yDomain[0], this.yDomain[1])) {
      const y = this.py(t)
      r.line(x0 - 4, y, x0, y, BLACK)
      const label = formatTick(t)
      r.text(x0 - 8 - label.length * 6, y - 3, label, BLACK)
    }
  }
}

function span(values: number[], padFraction = 0.05): [number, number] {
  // no spread here: these arrays can hold half a million pair rows
  let lo = Infinity
  let hi = -Infinity
  for (const v of values) {
    if (!Number.isFinite(v)) continue
    if (v < lo) lo = v
    if (v > hi) hi = v
  }
  if (lo > hi) return [0, 1]
  if (lo === hi) {
    lo -= 0.5
    hi += 0.5
  }
  const pad = (hi - lo) * padFraction
  return [lo - pad, hi + pad]
}

function newFrame(xDomain: [number, number], yDomain: [number, number], square = false): Frame {
  const raster = new Raster(SIZE, square ? SIZE : Math.round(SIZE * 0.75), WHITE)
  return new Frame(raster, xDomain, yDomain)
}

function finish(kind: string, frame: Frame, outPath: string, pointCount: number): FigureInfo {
  frame.axes()
  frame.raster.save(outPath)
  return {
    kind,
    path: outPath,
    width: frame.raster.width,
    height: frame.raster.height,
    xDomain: frame.xDomain,
    yDomain: frame.yDomain,
    pointCount,
  }
}

interface Nodes {
  x: number[]
  y: number[]
  isBeacon: number[]
}

function readNodes(dataDir: string): Nodes {
  const table = readCsv(join(dataDir, 'sensors.csv'), ['id', 'x', 'y', 'is_beacon'])
  return {
    x: numericColumn(table, 'x'),
    y: numericColumn(table, 'y'),
    isBeacon: numericColumn(table, 'is_beacon'),
  }
}

/** Deployment plus proximity-graph edges (network overlay). */
export function renderOverlay(dataDir: string, outPath: string): FigureInfo {
  const nodes = readNodes(dataDir)
  const edges = readCsv(join(dataDir, 'graph.csv'), ['i', 'j'])
  const ei = numericColumn(edges, 'i')
  const ej = numericColumn(edges, 'j')
  const frame = newFrame(span(nodes.x), span(nodes.y), true)
  for (let e = 0; e < ei.length; e++) {
    const a = ei[e]!
    const b = ej[e]!
    frame.raster.line(frame.px(nodes.x[a]!), frame.py(nodes.y[a]!), frame.px(nodes.x[b]!), frame.py(nodes.y[b]!), GRAY)
  }
  for (let n = 0; n < nodes.x.length; n++) {
    const px = frame.px(nodes.x[n]!)
    const py = frame.py(nodes.y[n]!)
    if (nodes.isBeacon[n] === 1) frame.raster.square(px, py, 4, RED)
    else frame.raster.square(px, py, 1, BLUE)
  }
  return finish('overlay', frame, outPath, nodes.x.length)
}

/** Pairwise cumulant (y) against distance (x). */
export function renderScatter(dataDir: string, outPath: string): FigureInfo {
  const table = readCsv(join(dataDir, 'scatter.csv'), ['i', 'j', 'distance', 'c2'])
  const dist = numericColumn(table, 'distance')
  const value = numericColumn(table, 'c2')
  const frame = newFrame(span(dist), span(value))
  for (let n = 0; n < dist.length; n++) {
    frame.raster.set(frame.px(dist[n]!), frame.py(value[n]!), BLUE)
  }
  return finish('scatter', frame, outPath, dist.length)
}

/** True positions joined to their estimates. */
export function renderPositionMap(dataDir: string, outPath: string): FigureInfo {
  const table = readCsv(join(dataDir, 'positions.csv'), [
    'id',
    'true_x',
    'true_y',
    'est_x',
    'est_y',
    'error',
    'interior',
    'unlocalized',
  ])
  const tx = numericColumn(table, 'true_x')
  const ty = numericColumn(table, 'true_y')
  const ex = numericColumn(table, 'est_x')
  const ey = numericColumn(table, 'est_y')
  const frame = newFrame(span([...tx, ...ex]), span([...ty, ...ey]), true)
  let drawn = 0
  for (let n = 0; n < tx.length; n++) {
    if (!Number.isFinite(ex[n]!) || !Number.isFinite(ey[n]!)) continue
    frame.raster.line(frame.px(tx[n]!), frame.py(ty[n]!), frame.px(ex[n]!), frame.py(ey[n]!), GRAY)
    frame.raster.square(frame.px(tx[n]!), frame.py(ty[n]!), 2, YELLOW)
    frame.raster.square(frame.px(ex[n]!), frame.py(ey[n]!), 2, GREEN)
    drawn++
  }
  return finish('position-map', frame, outPath, drawn)
}

/** Walker trajectories, with the deployment drawn underneath when present. */
export function renderTraces(dataDir: string, outPath: string): FigureInfo {
  const table = readCsv(join(dataDir, 'traces.csv'), ['step', 'walker', 'x', 'y'])
  const step = numericColumn(table, 'step')
  const walker = numericColumn(table, 'walker')
  const x = numericColumn(table, 'x')
  const y = numericColumn(table, 'y')
  const frame = newFrame(span(x), span(y), true)
  let nodeCount = 0
  try {
    const nodes = readNodes(dataDir)
    for (let n = 0; n < nodes.x.length; n++) {
      frame.raster.square(frame.px(nodes.x[n]!), frame.py(nodes.y[n]!), 1, GRAY)
    }
    nodeCount = nodes.x.length
  } catch {
    // traces can render without a deployment file
  }
  const last = new Map<number, [number, number]>()
  const palette: Rgb[] = [ORANGE, BLUE, GREEN, RED, [150, 60, 180], [0, 160, 170]]
  const order = step.map((_, idx) => idx).sort((a, b) => step[a]! - step[b]! || walker[a]! - walker[b]!)
  for (const idx of order) {
    const w = walker[idx]!
    const px = frame.px(x[idx]!)
    const py = frame.py(y[idx]!)
    const prev = last.get(w)
    if (prev) frame.raster.line(prev[0], prev[1], px, py, palette[w % palette.length]!)
    last.set(w, [px, py])
  }
  return finish('traces', frame, outPath, x.length + nodeCount)
}

/** Covariance against distance for each source (analytic, Monte Carlo...). */
export function renderCovariance(dataDir: string, outPath: string): FigureInfo {
  const table = readCsv(join(dataDir, 'covariance_curve.csv'), ['distance', 'value', 'stderr', 'source'])
  const dist = numericColumn(table, 'distance')
  const value = numericColumn(table, 'value')
  const stderr = numericColumn(table, 'stderr')
  const sourceIdx = table.columns.indexOf('source')
  const sources = table.rows.map((row) => row[sourceIdx]!)
  const frame = newFrame(span(dist), span([...value.map((v, i) => v + 3 * stderr[i]!), ...value.map((v, i) => v - 3 * stderr[i]!)]))
  const palette = new Map<string, Rgb>()
  const colors: Rgb[] = [BLACK, RED, BLUE, GREEN]
  let prev: { source: string; px: number; py: number } | null = null
  for (let n = 0; n < dist.length; n++) {
    const source = sources[n]!
    if (!palette.has(source)) palette.set(source, colors[palette.size % colors.length]!)
    const color = palette.get(source)!
    const px = frame.px(dist[n]!)
    const py = frame.py(value[n]!)
    if (stderr[n]! > 0) {
      frame.raster.line(px, frame.py(value[n]! - 3 * stderr[n]!), px, frame.py(value[n]! + 3 * stderr[n]!), color)
    }
    frame.raster.dot(px, py, 2, color)
    if (prev && prev.source === source) frame.raster.line(prev.px, prev.py, px, py, color)
    prev = { source, px, py }
  }
  return finish('covariance', frame, outPath, dist.length)
}

export const RENDERERS: Record<string, (dataDir: string, outPath: string) => FigureInfo> = {
  overlay: renderOverlay,
  scatter: renderScatter,
  'position-map': renderPositionMap,
  traces: renderTraces,
  covariance: renderCovariance,
}
