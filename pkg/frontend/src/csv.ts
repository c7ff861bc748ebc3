import { readFileSync } from 'node:fs'

export interface Table {
  path: string
  columns: string[]
  rows: string[][]
}

export class CsvError extends Error {}

/** Read a comma-separated file and check that the required columns exist.
 * The pipeline's exports never quote fields, so a plain split is exact. */
export function readCsv(path: string, required: string[]): Table {
  let text: string
  try {
    text = readFileSync(path, 'utf8')
  } catch {
    throw new CsvError(`${path}: file not found`)
  }
  const lines = text.split('\n')
  while (lines.length > 0 && lines[lines.length - 1] === '') lines.pop()
  if (lines.length === 0) throw new CsvError(`${path}: empty file`)
  const columns = lines[0]!.split(',')
  for (const name of required) {
    if (!columns.includes(name)) throw new CsvError(`${path}: missing column '${name}'`)
  }
  const rows: string[][] = []
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(',')
    if (cells.length !== columns.length) {
      throw new CsvError(`${path}: row ${i + 1} has ${cells.length} fields, expected ${columns.length}`)
    }
    rows.push(cells)
  }
  return { path, columns, rows }
}

/** Column values as numbers; blank cells become NaN, anything else that
 * fails to parse reports its row number. */
export function numericColumn(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name)
  if (idx < 0) throw new CsvError(`${table.path}: missing column '${name}'`)
  return table.rows.map((row, i) => {
    const cell = row[idx]!
    if (cell === '') return NaN
    const value = Number(cell)
    if (Number.isNaN(value)) {
      throw new CsvError(`${table.path}: row ${i + 2}: '${cell}' in column '${name}' is not a number`)
    }
    return value
  })
}
