/**
 * Reader for the simulator's sweep CSVs.
 *
 * Layout produced by the Python side:
 *
 *   # scheme=alamouti
 *   # m=2
 *   ...
 *   snr_db,trials,bits_sent,bit_errors,codeword_errors,ber,cwer
 *   14.0,5000,80000,869,715,0.0108625,0.03575
 *
 * Metadata lines are `# key=value`, the header is fixed, blank lines are
 * tolerated anywhere.
 */

export class ParseError extends Error {}
export class EmptyData extends Error {}

export const COLUMNS = [
  "snr_db",
  "trials",
  "bits_sent",
  "bit_errors",
  "codeword_errors",
  "ber",
  "cwer",
] as const;

export interface SweepRow {
  snrDb: number;
  trials: number;
  bitsSent: number;
  bitErrors: number;
  codewordErrors: number;
  ber: number;
  cwer: number;
}

export interface SweepData {
  meta: Record<string, string>;
  rows: SweepRow[];
}

export function parseSweepCsv(text: string, source = "<string>"): SweepData {
  const meta: Record<string, string> = {};
  const rows: SweepRow[] = [];
  let headerSeen = false;

  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    const where = `${source} line ${i + 1}`;
    if (line === "") continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) meta[body.slice(0, eq)] = body.slice(eq + 1);
      continue;
    }
    if (!headerSeen) {
      if (line !== COLUMNS.join(",")) {
        throw new ParseError(`${where}: expected header "${COLUMNS.join(",")}"`);
      }
      headerSeen = true;
      continue;
    }
    const fields = line.split(",");
    if (fields.length !== COLUMNS.length) {
      throw new ParseError(
        `${where}: expected ${COLUMNS.length} fields, got ${fields.length}`
      );
    }
    const nums = fields.map((f, j) => {
      const v = Number(f);
      if (f.trim() === "" || Number.isNaN(v)) {
        throw new ParseError(`${where}: field ${COLUMNS[j]} is not numeric: "${f}"`);
      }
      return v;
    });
    rows.push({
      snrDb: nums[0],
      trials: nums[1],
      bitsSent: nums[2],
      bitErrors: nums[3],
      codewordErrors: nums[4],
      ber: nums[5],
      cwer: nums[6],
    });
  }

  if (!headerSeen) throw new ParseError(`${source}: no header line found`);
  if (rows.length === 0) throw new EmptyData(`${source}: no data rows`);
  return { meta, rows };
}
