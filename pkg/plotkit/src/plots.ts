/**
 * The two figure styles built from simulator trace CSVs:
 *  (a) per-content AoI sawtooth with a cumulative-reward overlay,
 *  (b) per-RSU backlog over time compared across policies.
 *
 * Strictly read-only over the CSV contract; no re-simulation, no numeric
 * transformation beyond axis mapping.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { assertSameSlotRange, column, parseTraceCsv, TraceTable } from "./csv.js";
import { HLine, renderChart, Series } from "./svg.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export interface ContentRef {
  rsu: number;
  content: number;
}

export interface AoiPlotSpec {
  csvPath: string;
  contents: ContentRef[];
  outPath: string;
  title?: string;
  /** optional per-content AoI limits drawn as dashed reference lines */
  limits?: number[];
}

export interface BacklogPlotSpec {
  csvPaths: string[];
  labels: string[];
  outPath: string;
  rsu?: number;
  title?: string;
}

function readTable(path: string): TraceTable {
  return parseTraceCsv(readFileSync(path, "utf8"));
}

/** Figure (a): step-style AoI trajectories plus cumulative reward (right axis). */
export function plotAoiAndReward(spec: AoiPlotSpec): string {
  const table = readTable(spec.csvPath);
  const slots = column(table, "slot");

  const series: Series[] = spec.contents.map((ref, i) => ({
    label: `AoI rsu ${ref.rsu}, content ${ref.content}`,
    x: slots,
    y: column(table, `aoi_${ref.rsu}_${ref.content}`),
    color: PALETTE[i % PALETTE.length],
    step: true,
  }));
  series.push({
    label: "cumulative reward",
    x: slots,
    y: column(table, "cumulative_reward"),
    color: "#444444",
    axis: "right",
    dash: "2,3",
  });

  const hLines: HLine[] = (spec.limits ?? []).map((value, i) => ({
    value,
    label: `limit ${value}`,
    color: PALETTE[i % PALETTE.length],
  }));

  const svg = renderChart({
    title: spec.title ?? "Cached-content age and cumulative reward",
    xLabel: "slot",
    yLabel: "AoI (slots)",
    rightYLabel: "cumulative reward",
    series,
    hLines,
  });
  writeFileSync(spec.outPath, svg);
  return svg;
}

/** Figure (b): one backlog curve per policy CSV, shared slot range required. */
export function plotBacklogComparison(spec: BacklogPlotSpec): string {
  if (spec.csvPaths.length < 2) {
    throw new RangeError("backlog comparison needs at least two input CSVs");
  }
  if (spec.labels.length !== spec.csvPaths.length) {
    throw new RangeError("need exactly one label per input CSV");
  }
  const tables = spec.csvPaths.map(readTable);
  assertSameSlotRange(tables);
  const rsu = spec.rsu ?? 0;
  const slots = column(tables[0], "slot");

  const series: Series[] = tables.map((table, i) => ({
    label: spec.labels[i],
    x: slots,
    y: column(table, `q_${rsu}`),
    color: PALETTE[i % PALETTE.length],
  }));

  const svg = renderChart({
    title: spec.title ?? `Backlog at rsu ${rsu} by service policy`,
    xLabel: "slot",
    yLabel: "backlog (request-slots)",
    series,
  });
  writeFileSync(spec.outPath, svg);
  return svg;
}
