#!/usr/bin/env node
import { existsSync, mkdirSync } from 'node:fs'
import { join } from 'node:path'
import { pathToFileURL } from 'node:url'
import { parseArgs } from 'node:util'
import { CsvError } from './csv.js'
import { FigureInfo, RENDERERS } from './figures.js'

const KINDS = Object.keys(RENDERERS)

const USAGE = `usage: fieldloc-figures <kind> --data <pipeline dir> [--figures <out dir>] [--skip-missing]
  kind: ${KINDS.join(' | ')} | all
Renders PNG figures from a fieldloc pipeline output directory.`

export function run(argv: string[]): number {
  const { values, positionals } = parseArgs({
    args: argv,
    allowPositionals: true,
    options: {
      data: { type: 'string' },
      figures: { type: 'string' },
      'skip-missing': { type: 'boolean', default: false },
      help: { type: 'boolean', default: false },
    },
  })
  if (values.help || positionals.length === 0) {
    console.log(USAGE)
    return values.help ? 0 : 2
  }
  const kind = positionals[0]!
  if (kind !== 'all' && !KINDS.includes(kind)) {
    console.error(`unknown figure kind '${kind}'; expected one of: ${KINDS.join(', ')}, all`)
    return 2
  }
  if (!values.data) {
    console.error('missing required option --data <pipeline dir>')
    return 2
  }
  const dataDir = values.data
  const outDir = values.figures ?? join(dataDir, 'figures')
  mkdirSync(outDir, { recursive: true })

  const selected = kind === 'all' ? KINDS : [kind]
  const rendered: FigureInfo[] = []
  for (const name of selected) {
    const outPath = join(outDir, `${name}.png`)
    try {
      rendered.push(RENDERERS[name]!(dataDir, outPath))
    } catch (err) {
      if (err instanceof CsvError) {
        if (values['skip-missing'] && /file not found/.test(err.message)) {
          console.log(`${name}: skipped (${err.message})`)
          continue
        }
        console.error(`${name}: ${err.message}`)
        return 3
      }
      throw err
    }
  }
  for (const info of rendered) {
    console.log(
      `${info.kind}: ${info.path} (${info.width}x${info.height}, ${info.pointCount} points, ` +
        `x [${info.xDomain[0].toPrecision(3)}, ${info.xDomain[1].toPrecision(3)}], ` +
        `y [${info.yDomain[0].toPrecision(3)}, ${info.yDomain[1].toPrecision(3)}])`,
    )
  }
  return 0
}

if (process.argv[1] && existsSync(process.argv[1]) && pathToFileURL(process.argv[1]).href === import.meta.url) {
  process.exit(run(process.argv.slice(2)))
}
