import { writeFileSync } from 'node:fs'
import { encodePng } from './png.js'

export type Rgb = readonly [number, number, number]

export const WHITE: Rgb = [255, 255, 255]
export const BLACK: Rgb = [20, 20, 20]
export const GRAY: Rgb = [150, 150, 150]
export const BLUE: Rgb = [46, 100, 200]
export const RED: Rgb = [205, 50, 40]
export const GREEN: Rgb = [40, 150, 70]
export const ORANGE: Rgb = [230, 150, 30]
export const YELLOW: Rgb = [220, 190, 30]

// 5x7 glyphs for tick labels; each entry is 7 rows of 5 bits (MSB left).
const FONT: Record<string, number[]> = {
  '0': [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  '1': [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  '2': [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  '3': [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  '4': [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  '5': [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  '6': [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  '7': [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  '8': [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  '9': [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  '.': [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  '-': [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  '+': [0x00, 0x04, 0x04, 0x1f, 0x04, 0x04, 0x00],
  e: [0x00, 0x00, 0x0e, 0x11, 0x1f, 0x10, 0x0e],
  ' ': [0, 0, 0, 0, 0, 0, 0],
}

export class Raster {
  readonly width: number
  readonly height: number
  readonly data: Uint8Array

  constructor(width: number, height: number, background: Rgb = WHITE) {
    this.width = width
    this.height = height
    this.data = new Uint8Array(width * height * 3)
    for (let i = 0; i < width * height; i++) this.data.set(background, i * 3)
  }

  set(x: number, y: number, color: Rgb): void {
    const xi = Math.round(x)
    const yi = Math.round(y)
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return
    this.data.set(color, (yi * this.width + xi) * 3)
  }

  get(x: number, y: number): Rgb {
    const off = (y * this.width + x) * 3
    return [this.data[off]!, this.data[off + 1]!, this.data[off + 2]!]
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgb): void {
    // Bresenham on rounded endpoints
    let xa = Math.round(x0)
    let ya = Math.round(y0)
    const xb = Math.round(x1)
    const yb = Math.round(y1)
    const dx = Math.abs(xb - xa)
    const dy = -Math.abs(yb - ya)
    const sx = xa < xb ? 1 : -1
    const sy = ya < yb ? 1 : -1
    let err = dx + dy
    for (;;) {
      this.set(xa, ya, color)
      if (xa === xb && ya === yb) break
      const e2 = 2 * err
      if (e2 >= dy) {
        err += dy
        xa += sx
      }
      if (e2 <= dx) {
        err += dx
        ya += sy
      }
    }
  }

  fillRect(x0: number, y0: number, x1: number, y1: number, color: Rgb): void {
    for (let y = Math.round(y0); y <= Math.round(y1); y++)
      for (let x = Math.round(x0); x <= Math.round(x1); x++) this.set(x, y, color)
  }

  square(cx: number, cy: number, half: number, color: Rgb): void {
    this.fillRect(cx - half, cy - half, cx + half, cy + half, color)
  }

  dot(cx: number, cy: number, radius: number, color: Rgb): void {
    for (let y = -radius; y <= radius; y++)
      for (let x = -radius; x <= radius; x++)
        if (x * x + y * y <= radius * radius) this.set(cx + x, cy + y, color)
  }

  text(x: number, y: number, s: string, color: Rgb): void {
    let cx = Math.round(x)
    for (const ch of s) {
      const glyph = FONT[ch] ?? FONT[' ']!
      for (let row = 0; row < 7; row++) {
        const bits = glyph[row]!
        for (let col = 0; col < 5; col++) {
          if (bits & (1 << (4 - col))) this.set(cx + col, y + row, color)
        }
      }
      cx += 6
    }
  }

  save(path: string): void {
    writeFileSync(path, encodePng(this.width, this.height, this.data))
  }
}

export function formatTick(value: number): string {
  if (value === 0) return '0'
  const abs = Math.abs(value)
  if (abs >= 0.001 && abs < 10000) {
    const text = value.toFixed(3)
    return text.replace(/0+$/, '').replace(/\.$/, '')
  }
  return value.toExponential(1).replace(/e([+-])(\d)$/, 'e$1$2')
}

export function ticks(min: number, max: number, count = 5): number[] {
  if (!(max > min)) return [min]
  const rawStep = (max - min) / count
  const magnitude = 10 ** Math.floor(Math.log10(rawStep))
  const residual = rawStep / magnitude
  const step = (residual >= 5 ? 5 : residual >= 2 ? 2 : 1) * magnitude
  const start = Math.ceil(min / step) * step
  const out: number[] = []
  for (let v = start; v <= max + step * 1e-9; v += step) out.push(Math.abs(v) < step * 1e-9 ? 0 : v)
  return out
}
