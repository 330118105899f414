#!/usr/bin/env node
/**
 * plot aoi --csv trace.csv --contents 1:5,1:8 --out aoi.svg [--limits 50,50] [--title T]
 * plot backlog --csv a.csv,b.csv,c.csv --labels lyapunov,always,periodic5 \
 *              --out backlog.svg [--rsu 0] [--title T]
 */

import { ContentRef, plotAoiAndReward, plotBacklogComparison } from "./plots.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near "${key}"`);
    }
    flags.set(key.slice(2), value);
  }
  return flags;
}

function need(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (value === undefined) throw new Error(`missing required flag --${name}`);
  return value;
}

function parseContents(text: string): ContentRef[] {
  return text.split(",").map((pair) => {
    const m = /^(\d+):(\d+)$/.exec(pair.trim());
    if (!m) throw new Error(`bad content ref "${pair}"; expected rsu:content`);
    return { rsu: Number(m[1]), content: Number(m[2]) };
  });
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "aoi") {
      const flags = parseFlags(rest);
      plotAoiAndReward({
        csvPath: need(flags, "csv"),
        contents: parseContents(need(flags, "contents")),
        outPath: need(flags, "out"),
        title: flags.get("title"),
        limits: flags.get("limits")?.split(",").map(Number),
      });
      return 0;
    }
    if (command === "backlog") {
      const flags = parseFlags(rest);
      plotBacklogComparison({
        csvPaths: need(flags, "csv").split(","),
        labels: need(flags, "labels").split(","),
        outPath: need(flags, "out"),
        rsu: flags.has("rsu") ? Number(flags.get("rsu")) : undefined,
        title: flags.get("title"),
      });
      return 0;
    }
    console.error("usage: plot aoi|backlog [flags]   (see source header)");
    return 2;
  } catch (err) {
    console.error(`plot ${command ?? ""}: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
