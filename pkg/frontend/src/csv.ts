/** Minimal reader for the campaign CSV files (one header row, float cells). */

export interface Table {
  columns: string[];
  rows: number[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new Error(`row ${i}: expected ${columns.length} cells, got ${cells.length}`);
    }
    rows.push(cells.map(Number));
  }
  return { columns, rows };
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column '${name}' (have: ${table.columns.join(", ")})`);
  }
  return table.rows.map((r) => r[idx]);
}
