/**
 * Trace-CSV reader for the simulator's output contract:
 * header row, numeric cells, RFC-4180 quoting, LF newlines.
 */

export class ParseError extends Error {}
export class MissingColumn extends Error {}
export class RangeMismatch extends Error {}

export interface TraceTable {
  header: string[];
  columns: Map<string, number[]>;
  rows: number;
}

/** Split one CSV record, honoring RFC-4180 double-quote escaping. */
function splitRecord(line: string, lineNo: number): string[] {
  const fields: string[] = [];
  let field = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch === '"' && field === "") {
      quoted = true;
    } else if (ch === ",") {
      fields.push(field);
      field = "";
    } else {
      field += ch;
    }
  }
  if (quoted) throw new ParseError(`line ${lineNo}: unterminated quote`);
  fields.push(field);
  return fields;
}

export function parseTraceCsv(text: string): TraceTable {
  const lines = text.split("\n");
  while (lines.length && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) throw new ParseError("empty CSV document");

  const header = splitRecord(lines[0].replace(/\r$/, ""), 1);
  const series: number[][] = header.map(() => []);
  for (let i = 1; i < lines.length; i++) {
    const cells = splitRecord(lines[i].replace(/\r$/, ""), i + 1);
    if (cells.length !== header.length) {
      throw new ParseError(
        `line ${i + 1}: expected ${header.length} fields, got ${cells.length}`,
      );
    }
    for (let c = 0; c < cells.length; c++) {
      const value = Number(cells[c]);
      if (cells[c] === "" || Number.isNaN(value)) {
        throw new ParseError(`line ${i + 1}: non-numeric cell "${cells[c]}"`);
      }
      series[c].push(value);
    }
  }

  const columns = new Map<string, number[]>();
  header.forEach((name, idx) => columns.set(name, series[idx]));
  return { header, columns, rows: lines.length - 1 };
}

/** Fetch a column or fail with the offending name. */
export function column(table: TraceTable, name: string): number[] {
  const values = table.columns.get(name);
  if (values === undefined) throw new MissingColumn(`column "${name}" not in CSV`);
  return values;
}

/** All inputs must cover the identical slot sequence. */
export function assertSameSlotRange(tables: TraceTable[]): void {
  const first = column(tables[0], "slot");
  for (const table of tables.slice(1)) {
    const slots = column(table, "slot");
    if (slots.length !== first.length || slots.some((s, i) => s !== first[i])) {
      throw new RangeMismatch(
        `slot ranges differ: ${first.length} rows vs ${slots.length} rows`,
      );
    }
  }
}
