/**
 * Input traces, trajectory rows, and their interchange formats.
 *
 * Input traces are JSON-lines, one `{"t_ms": int, "x_px": number,
 * "contact": 0|1}` object per line with strictly increasing
 * timestamps. Trajectories are CSV `t,q,p,phase,spring_force,
 * string_len` with six decimals. Both formats are shared with the
 * headless toolkit; the resampling and row arithmetic below mirror it
 * exactly so a replayed trace reproduces the same bytes.
 */

import {
  FrictionParams,
  InputSample,
  InputValueError,
  Phase,
  SimState,
  initialState,
  step,
  tickDt,
} from "./friction.js";
import { stringLength } from "./display.js";
import { fixed6 } from "./pyformat.js";

export interface TraceRow {
  readonly t: number;
  readonly q: number;
  readonly p: number;
  readonly phase: Phase;
  readonly springForce: number;
  readonly stringLen: number;
}

export class TraceFormatError extends Error {
  constructor(readonly lineno: number, message: string) {
    super(`line ${lineno}: ${message}`);
  }
}

/** Constant-velocity stroke from the origin, all samples in contact. */
export function synthConstantVelocity(velocity: number, duration: number,
                                      simRate = 100.0): InputSample[] {
  if (!(duration > 0.0 && Number.isFinite(duration))) {
    throw new InputValueError(`duration must be positive, got ${duration}`);
  }
  if (!(simRate > 0.0 && Number.isFinite(simRate))) {
    throw new InputValueError(`sim_rate must be positive, got ${simRate}`);
  }
  if (!Number.isFinite(velocity)) {
    throw new InputValueError(`velocity must be finite, got ${velocity}`);
  }
  const n = Math.round(duration * simRate);
  const out: InputSample[] = [];
  for (let i = 0; i <= n; i++) {
    out.push({ t: i / simRate, q: velocity * (i / simRate), contact: true });
  }
  return out;
}

/** Parse an input-trace JSONL string, enforcing the format rules. */
export function parseTrace(text: string): InputSample[] {
  const samples: InputSample[] = [];
  let lastMs: number | null = null;
  const lines = text.split("\n");
  for (let idx = 0; idx < lines.length; idx++) {
    const lineno = idx + 1;
    const line = (lines[idx] ?? "").trim();
    if (!line) continue;
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch (e) {
      throw new TraceFormatError(lineno, `invalid JSON: ${(e as Error).message}`);
    }
    if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
      throw new TraceFormatError(lineno, "expected an object per line");
    }
    const rec = obj as Record<string, unknown>;
    for (const field of ["t_ms", "x_px", "contact"]) {
      if (!(field in rec)) {
        throw new TraceFormatError(lineno, `missing field '${field}'`);
      }
    }
    const tMs = rec["t_ms"];
    const xPx = rec["x_px"];
    const contact = rec["contact"];
    if (typeof tMs !== "number" || !Number.isInteger(tMs)) {
      throw new TraceFormatError(lineno, `t_ms must be an integer, got ${JSON.stringify(tMs)}`);
    }
    if (typeof xPx !== "number" || !Number.isFinite(xPx)) {
      throw new TraceFormatError(lineno, `x_px must be a finite number, got ${JSON.stringify(xPx)}`);
    }
    if (contact !== 0 && contact !== 1) {
      throw new TraceFormatError(lineno, `contact must be 0 or 1, got ${JSON.stringify(contact)}`);
    }
    if (lastMs !== null && tMs <= lastMs) {
      throw new TraceFormatError(
        lineno, `t_ms must be strictly increasing, got ${tMs} after ${lastMs}`);
    }
    lastMs = tMs;
    samples.push({ t: tMs / 1000.0, q: xPx, contact: contact === 1 });
  }
  if (samples.length === 0) {
    throw new InputValueError("trace holds no samples");
  }
  return samples;
}

/** Linear interpolation of position onto the tick grid; contact is a
 *  left-continuous step function of the bracketing sample. */
export function interpPosition(samples: readonly InputSample[], t: number,
                               hint: number): [number, boolean, number] {
  let i = hint;
  const n = samples.length;
  while (i + 1 < n && samples[i + 1]!.t <= t) {
    i += 1;
  }
  if (i + 1 >= n) {
    const last = samples[n - 1]!;
    return [last.q, last.contact, i];
  }
  const a = samples[i]!;
  const b = samples[i + 1]!;
  const span = b.t - a.t;
  const w = span > 0 ? (t - a.t) / span : 0.0;
  return [a.q + w * (b.q - a.q), a.contact, i];
}

export function rowOf(state: SimState, params: FrictionParams): TraceRow {
  const force = params.k * Math.abs(state.p - state.q);
  return {
    t: state.t,
    q: state.q,
    p: state.p,
    phase: state.phase,
    springForce: force,
    stringLen: stringLength(force, params.stringScale),
  };
}

/** Run the simulator over an input trace resampled to the tick grid.
 *  Row 0 is the initial state; each later row is the state after one
 *  tick. */
export function simulateTrace(samples: readonly InputSample[],
                              params: FrictionParams,
                              initial: SimState | null = null): TraceRow[] {
  if (samples.length === 0) {
    throw new InputValueError("input trace is empty");
  }
  for (let i = 1; i < samples.length; i++) {
    if (samples[i]!.t <= samples[i - 1]!.t) {
      throw new TraceFormatError(
        i + 1, `timestamps must be strictly increasing, got ` +
        `${samples[i]!.t} after ${samples[i - 1]!.t}`);
    }
  }
  const dt = tickDt(params);
  const t0 = samples[0]!.t;
  const nTicks = Math.floor((samples[samples.length - 1]!.t - t0) / dt + 1e-9);
  let state = initial !== null ? initial : initialState(samples[0]!.q, t0);

  const rows: TraceRow[] = [rowOf(state, params)];
  let hint = 0;
  for (let i = 1; i <= nTicks; i++) {
    const t = t0 + i * dt;
    const [q, contact, newHint] = interpPosition(samples, t, hint);
    hint = newHint;
    state = step(state, params, { t, q, contact });
    rows.push(rowOf(state, params));
  }
  return rows;
}

export function formatTrajectoryCsv(rows: readonly TraceRow[]): string {
  const out: string[] = ["t,q,p,phase,spring_force,string_len"];
  for (const r of rows) {
    out.push(`${fixed6(r.t)},${fixed6(r.q)},${fixed6(r.p)},${r.phase},` +
             `${fixed6(r.springForce)},${fixed6(r.stringLen)}`);
  }
  return out.join("\n") + "\n";
}

/** Parse a trajectory CSV produced by the toolkit or by
 *  `formatTrajectoryCsv`. */
export function parseTrajectoryCsv(text: string): TraceRow[] {
  const lines = text.split("\n");
  if ((lines[0] ?? "").trim() !== "t,q,p,phase,spring_force,string_len") {
    throw new TraceFormatError(1, `unexpected header ${JSON.stringify(lines[0])}`);
  }
  const rows: TraceRow[] = [];
  for (let idx = 1; idx < lines.length; idx++) {
    const text2 = (lines[idx] ?? "").trim();
    if (!text2) continue;
    const parts = text2.split(",");
    if (parts.length !== 6) {
      throw new TraceFormatError(idx + 1, `expected 6 columns, got ${parts.length}`);
    }
    const phase = parts[3]!;
    if (phase !== "stick" && phase !== "slip") {
      throw new TraceFormatError(idx + 1, `unknown phase ${JSON.stringify(phase)}`);
    }
    const nums = [parts[0]!, parts[1]!, parts[2]!, parts[4]!, parts[5]!].map(Number);
    if (nums.some((v) => Number.isNaN(v))) {
      throw new TraceFormatError(idx + 1, "non-numeric column");
    }
    rows.push({
      t: nums[0]!, q: nums[1]!, p: nums[2]!, phase,
      springForce: nums[3]!, stringLen: nums[4]!,
    });
  }
  return rows;
}
