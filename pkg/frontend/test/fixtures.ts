import { mkdtempSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'

/** A miniature but schema-complete pipeline output directory. */
export function makePipelineDir(): string {
  const dir = mkdtempSync(join(tmpdir(), 'fieldloc-figs-'))
  writeFileSync(
    join(dir, 'sensors.csv'),
    [
      'id,x,y,is_beacon',
      '0,0.2,0.3,0',
      '1,0.5,0.45,0',
      '2,0.75,0.6,0',
      '3,0,0,1',
      '4,1,0,1',
      '5,0,1,1',
      '6,1,1,1',
      '',
    ].join('\n'),
  )
  writeFileSync(join(dir, 'graph.csv'), ['i,j', '0,1', '1,2', '0,3', '2,6', ''].join('\n'))
  writeFileSync(
    join(dir, 'scatter.csv'),
    [
      'i,j,distance,c2',
      '0,1,0.33541019662496846,0.1503',
      '0,2,0.62649820430903071,0.0301',
      '1,2,0.29154759474226499,0.1671',
      '0,3,0.36055512754639891,0.1405',
      '1,4,0.67268120235368682,0.0144',
      '2,5,0.84852813742385702,-0.0042',
      '',
    ].join('\n'),
  )
  writeFileSync(
    join(dir, 'positions.csv'),
    [
      'id,true_x,true_y,est_x,est_y,error,interior,unlocalized',
      '0,0.2,0.3,0.24,0.33,0.05,0,0',
      '1,0.5,0.45,0.46,0.5,0.064,1,0',
      '2,0.75,0.6,,,,1,1',
      '3,0,0,0,0,0,0,0',
      '',
    ].join('\n'),
  )
  const traces = ['step,walker,x,y']
  for (let t = 0; t < 40; t++) {
    traces.push(`${t},0,${(0.2 + 0.015 * t).toFixed(4)},${(0.3 + 0.01 * t).toFixed(4)}`)
    traces.push(`${t},1,${(0.9 - 0.012 * t).toFixed(4)},${(0.8 - 0.009 * t).toFixed(4)}`)
  }
  traces.push('')
  writeFileSync(join(dir, 'traces.csv'), traces.join('\n'))
  writeFileSync(
    join(dir, 'covariance_curve.csv'),
    [
      'distance,value,stderr,source',
      '0,0.20360695117808614,0,analytic',
      '0.1,0.080976722886634085,0,analytic',
      '0.2,0.025814122847986801,0,analytic',
      '0,0.20322,0.00040159,montecarlo',
      '0.1,0.081102,0.00046926,montecarlo',
      '0.2,0.026174,0.00044793,montecarlo',
      '',
    ].join('\n'),
  )
  return dir
}
