/**
 * Experiment protocol pieces shared with the headless toolkit: the
 * trial state machine, exact-hundredths magnitude accounting, and the
 * byte-precise results format.
 *
 * A results file is JSON lines with a fixed key order; `recordLine`
 * reproduces the reference writer byte for byte (including "1.0"
 * style float rendering) so files exported here are interchangeable
 * with CLI-produced ones. A schedule file is the same format with
 * `response` null on every line.
 */

import { reprFloat, roundTiesEven } from "./pyformat.js";

export type Study = "jnd" | "magnitude";
export type StimulusOrder = "standard_first" | "comparison_first";
export type Stage = "present_standard" | "present_comparison" | "await_response" | "done";

export const RESPONSE_STANDARD = "standard";
export const RESPONSE_COMPARISON = "comparison";

/** Magnitude adjustment buttons, valued in exact hundredths. */
export const PRESS_VALUES = [-10, -5, -1, 1, 5, 10] as const;
export type Press = (typeof PRESS_VALUES)[number];

export class ExperimentError extends Error {}

export interface SessionConfig {
  readonly study: Study;
  readonly standardMuS: number;
  readonly comparisonLevels: readonly number[];
  readonly reps: number;
  readonly withString: boolean;
  readonly seed: number;
  readonly participantIndex: number;
}

export interface TrialRecord {
  readonly trialIndex: number;
  readonly comparisonMuS: number;
  readonly stimulusOrder: StimulusOrder;
  readonly direction: 1 | -1;
  readonly response: string | number | null;
  readonly pressLog: readonly number[];
  readonly durationStandardS: number;
  readonly durationComparisonS: number;
  readonly durationResponseS: number;
}

export interface SessionRecord {
  readonly study: Study;
  readonly participantIndex: number;
  readonly withString: boolean;
  readonly standardMuS: number;
  readonly trial: TrialRecord;
}

// --- trial state machine ----------------------------------------------------

export interface TrialPhaseState {
  readonly stage: Stage;
  readonly pStart: number;
  readonly progress: number;
  readonly pressLog: readonly number[];
  readonly response: string | number | null;
}

export const INITIAL_TRIAL_PHASE: TrialPhaseState = {
  stage: "present_standard",
  pStart: 0.0,
  progress: 0.0,
  pressLog: [],
  response: null,
};

export type TrialEvent =
  | { kind: "pointer_tick"; p: number }
  | { kind: "choice"; answer: string }
  | { kind: "adjust"; press: Press }
  | { kind: "confirm" };

/**
 * Advance the trial state machine by one event. Pointer ticks
 * accumulate travel as displacement from the stimulus start; a
 * presentation completes once progress reaches the travel target.
 * Response events arriving during presentation are rejected by
 * returning the phase unchanged.
 */
export function advanceTrial(phase: TrialPhaseState, event: TrialEvent,
                             study: Study, travelTarget: number): TrialPhaseState {
  const stage = phase.stage;
  switch (event.kind) {
    case "pointer_tick": {
      if (stage === "present_standard" || stage === "present_comparison") {
        const progress = Math.abs(event.p - phase.pStart);
        if (progress >= travelTarget) {
          if (stage === "present_standard") {
            // Next stimulus begins recentered.
            return { ...phase, stage: "present_comparison", progress: 0.0, pStart: 0.0 };
          }
          return { ...phase, stage: "await_response", progress: 0.0 };
        }
        return { ...phase, progress };
      }
      return phase;
    }
    case "choice": {
      if (stage === "await_response" && study === "jnd") {
        if (event.answer !== RESPONSE_STANDARD && event.answer !== RESPONSE_COMPARISON) {
          throw new ExperimentError(`unknown answer ${JSON.stringify(event.answer)}`);
        }
        return { ...phase, stage: "done", response: event.answer };
      }
      return phase;
    }
    case "adjust": {
      if (stage === "await_response" && study === "magnitude") {
        return { ...phase, pressLog: [...phase.pressLog, event.press] };
      }
      return phase;
    }
    case "confirm": {
      if (stage === "await_response" && study === "magnitude") {
        let sum = 0;
        for (const h of phase.pressLog) sum += h;
        const ratio = (100 + sum) / 100.0;
        return { ...phase, stage: "done", response: ratio };
      }
      return phase;
    }
  }
}

/** Apply one button press to an intensity ratio, accumulating in
 *  integer hundredths so repeated presses stay exact. */
export function applyAdjustment(ratio: number, press: Press): number {
  const hundredths = roundTiesEven(ratio * 100.0) + press;
  return hundredths / 100.0;
}

// --- results format ---------------------------------------------------------

function jsonString(s: string): string {
  return JSON.stringify(s);
}

function jsonFloat(v: number): string {
  return reprFloat(v);
}

function jsonInt(v: number): string {
  if (!Number.isInteger(v)) {
    throw new ExperimentError(`expected an integer, got ${v}`);
  }
  return String(v);
}

/** Canonical one-line JSON encoding of a trial record; byte-compatible
 *  with the toolkit's writer. */
export function recordLine(study: Study, participantIndex: number,
                           withString: boolean, standardMuS: number,
                           trial: TrialRecord): string {
  let response: string;
  if (trial.response === null) {
    response = "null";
  } else if (typeof trial.response === "string") {
    response = jsonString(trial.response);
  } else {
    response = jsonFloat(trial.response);
  }
  const pressLog = "[" + trial.pressLog.map(jsonInt).join(",") + "]";
  return (
    `{"study":${jsonString(study)}` +
    `,"participant_index":${jsonInt(participantIndex)}` +
    `,"with_string":${withString ? "true" : "false"}` +
    `,"standard_mu_s":${jsonFloat(standardMuS)}` +
    `,"trial_index":${jsonInt(trial.trialIndex)}` +
    `,"comparison_mu_s":${jsonFloat(trial.comparisonMuS)}` +
    `,"stimulus_order":${jsonString(trial.stimulusOrder)}` +
    `,"direction":${jsonInt(trial.direction)}` +
    `,"response":${response}` +
    `,"press_log":${pressLog}` +
    `,"duration_standard_s":${jsonFloat(trial.durationStandardS)}` +
    `,"duration_comparison_s":${jsonFloat(trial.durationComparisonS)}` +
    `,"duration_response_s":${jsonFloat(trial.durationResponseS)}}`
  );
}

function requireField(rec: Record<string, unknown>, field: string, lineno: number): unknown {
  if (!(field in rec)) {
    throw new ExperimentError(`line ${lineno}: missing field '${field}'`);
  }
  return rec[field];
}

/** Parse one results/schedule line into a session record. */
export function parseRecordLine(line: string, lineno = 1): SessionRecord {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch (e) {
    throw new ExperimentError(`line ${lineno}: invalid JSON: ${(e as Error).message}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ExperimentError(`line ${lineno}: expected an object`);
  }
  const rec = obj as Record<string, unknown>;
  const study = requireField(rec, "study", lineno);
  if (study !== "jnd" && study !== "magnitude") {
    throw new ExperimentError(`line ${lineno}: unknown study ${JSON.stringify(study)}`);
  }
  const response = requireField(rec, "response", lineno);
  if (response !== null && typeof response !== "string" && typeof response !== "number") {
    throw new ExperimentError(`line ${lineno}: bad response ${JSON.stringify(response)}`);
  }
  const stimulusOrder = requireField(rec, "stimulus_order", lineno);
  if (stimulusOrder !== "standard_first" && stimulusOrder !== "comparison_first") {
    throw new ExperimentError(
      `line ${lineno}: unknown stimulus_order ${JSON.stringify(stimulusOrder)}`);
  }
  const direction = requireField(rec, "direction", lineno);
  if (direction !== 1 && direction !== -1) {
    throw new ExperimentError(`line ${lineno}: direction must be 1 or -1`);
  }
  const numeric = (field: string): number => {
    const v = requireField(rec, field, lineno);
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new ExperimentError(`line ${lineno}: ${field} must be a finite number`);
    }
    return v;
  };
  const integer = (field: string): number => {
    const v = numeric(field);
    if (!Number.isInteger(v)) {
      throw new ExperimentError(`line ${lineno}: ${field} must be an integer`);
    }
    return v;
  };
  const withString = requireField(rec, "with_string", lineno);
  if (typeof withString !== "boolean") {
    throw new ExperimentError(`line ${lineno}: with_string must be a boolean`);
  }
  const pressLogRaw = requireField(rec, "press_log", lineno);
  if (!Array.isArray(pressLogRaw) ||
      pressLogRaw.some((v) => typeof v !== "number" || !Number.isInteger(v))) {
    throw new ExperimentError(`line ${lineno}: press_log must be a list of integers`);
  }
  return {
    study,
    participantIndex: integer("participant_index"),
    withString,
    standardMuS: numeric("standard_mu_s"),
    trial: {
      trialIndex: integer("trial_index"),
      comparisonMuS: numeric("comparison_mu_s"),
      stimulusOrder,
      direction,
      response,
      pressLog: pressLogRaw as number[],
      durationStandardS: numeric("duration_standard_s"),
      durationComparisonS: numeric("duration_comparison_s"),
      durationResponseS: numeric("duration_response_s"),
    },
  };
}

/** Parse a whole results or schedule JSONL document. */
export function parseResults(text: string): SessionRecord[] {
  const out: SessionRecord[] = [];
  const lines = text.split("\n");
  for (let idx = 0; idx < lines.length; idx++) {
    const line = (lines[idx] ?? "").trim();
    if (!line) continue;
    out.push(parseRecordLine(line, idx + 1));
  }
  return out;
}

// --- session configs ---------------------------------------------------------

const CONFIG_KEYS = ["study", "standard_mu_s", "comparison_levels", "reps",
                     "with_string", "seed", "participant_index"] as const;

/** Parse the seven-key session-config JSON document. */
export function parseSessionConfig(obj: unknown): SessionConfig {
  if (typeof obj === "string") {
    obj = JSON.parse(obj);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ExperimentError("session config must be an object");
  }
  const rec = obj as Record<string, unknown>;
  for (const key of Object.keys(rec)) {
    if (!(CONFIG_KEYS as readonly string[]).includes(key)) {
      throw new ExperimentError(`unknown session config key '${key}'`);
    }
  }
  for (const key of CONFIG_KEYS) {
    if (!(key in rec)) {
      throw new ExperimentError(`session config missing key '${key}'`);
    }
  }
  const study = rec["study"];
  if (study !== "jnd" && study !== "magnitude") {
    throw new ExperimentError(`unknown study ${JSON.stringify(study)}`);
  }
  const levels = rec["comparison_levels"];
  if (!Array.isArray(levels) || levels.length === 0 ||
      levels.some((v) => typeof v !== "number" || !(v >= 0) || !Number.isFinite(v))) {
    throw new ExperimentError("comparison_levels must be a non-empty list of numbers >= 0");
  }
  const standardMuS = rec["standard_mu_s"];
  if (typeof standardMuS !== "number" || !(standardMuS >= 0) || !Number.isFinite(standardMuS)) {
    throw new ExperimentError(`standard_mu_s must be >= 0, got ${standardMuS}`);
  }
  const reps = rec["reps"];
  if (typeof reps !== "number" || !Number.isInteger(reps) || reps < 1) {
    throw new ExperimentError(`reps must be an integer >= 1, got ${reps}`);
  }
  const withString = rec["with_string"];
  if (typeof withString !== "boolean") {
    throw new ExperimentError("with_string must be a boolean");
  }
  const seed = rec["seed"];
  if (typeof seed !== "number" || !Number.isInteger(seed) || seed < 0) {
    throw new ExperimentError(`seed must be an integer >= 0, got ${seed}`);
  }
  const participantIndex = rec["participant_index"];
  if (typeof participantIndex !== "number" || !Number.isInteger(participantIndex) ||
      participantIndex < 0) {
    throw new ExperimentError(
      `participant_index must be an integer >= 0, got ${participantIndex}`);
  }
  return {
    study, standardMuS, comparisonLevels: levels as number[], reps,
    withString, seed, participantIndex,
  };
}

/**
 * Balanced trial order for standalone in-browser sessions: every
 * comparison level exactly `reps` times, shuffled by a small seeded
 * generator local to this page. The stream differs from the headless
 * scheduler's, so for cross-tool replication load a schedule file
 * instead; results files are self-describing either way.
 */
export function buildLocalSchedule(config: SessionConfig): TrialRecord[] {
  const items: number[] = [];
  for (const lv of config.comparisonLevels) {
    for (let r = 0; r < config.reps; r++) items.push(lv);
  }
  // SplitMix64-style integer hash as the shuffle stream.
  let s = (BigInt(config.seed) * 0x9e3779b97f4a7c15n +
           BigInt(config.participantIndex) * 0xbf58476d1ce4e5b9n) &
          0xffffffffffffffffn;
  const nextU53 = (): number => {
    s = (s + 0x9e3779b97f4a7c15n) & 0xffffffffffffffffn;
    let z = s;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & 0xffffffffffffffffn;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & 0xffffffffffffffffn;
    z = z ^ (z >> 31n);
    return Number(z >> 11n);
  };
  for (let i = items.length - 1; i > 0; i--) {
    const j = nextU53() % (i + 1);
    const a = items[i]!;
    items[i] = items[j]!;
    items[j] = a;
  }
  return items.map((lv, i) => ({
    trialIndex: i,
    comparisonMuS: lv,
    stimulusOrder: "standard_first",
    direction: 1,
    response: null,
    pressLog: [],
    durationStandardS: 0.0,
    durationComparisonS: 0.0,
    durationResponseS: 0.0,
  }));
}
