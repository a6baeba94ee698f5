/** CSV reading for the solver's diagnostics and sweep outputs. */

export interface Table {
  columns: string[];
  rows: number[][];
}

/** Parse CSV text; blank lines and '#' comment lines are skipped. */
export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0 && !l.startsWith("#"));
  if (lines.length === 0) {
    throw new Error("empty CSV: no header line found");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(
        `CSV row ${i + 1} has ${parts.length} fields, expected ${columns.length}`,
      );
    }
    const row = parts.map((p) => Number(p));
    if (row.some((v) => Number.isNaN(v))) {
      throw new Error(`CSV row ${i + 1} contains a non-numeric field`);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new Error("empty CSV: header but no data rows");
  }
  return { columns, rows };
}

/** Extract one column by name; unknown names report what exists. */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `missing column '${name}'; available: ${table.columns.join(", ")}`,
    );
  }
  return table.rows.map((r) => r[idx]);
}

export function hasColumn(table: Table, name: string): boolean {
  return table.columns.includes(name);
}
