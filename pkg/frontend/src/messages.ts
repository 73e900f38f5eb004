/**
 * Versioned message envelope for the UI session boundary.
 *
 * Everything crossing between the page shell and the session engine is
 * one of six message kinds. Parsing is strict: unknown kinds, missing
 * fields, and version mismatches are rejected rather than guessed at,
 * and display frames must arrive in tick order.
 */

import type { FrictionOverrides, InputSample, Phase } from "./friction.js";
import type { Press, SessionConfig, StimulusOrder, Stage } from "./experiment.js";
import { parseSessionConfig } from "./experiment.js";

export const MESSAGE_VERSION = 1;

export class MessageError extends Error {}

export interface FrictionSettings {
  readonly muS: number;
  readonly overrides: FrictionOverrides;
}

export interface ConfigureMsg {
  readonly v: typeof MESSAGE_VERSION;
  readonly kind: "Configure";
  readonly session: SessionConfig | null;
  readonly friction: FrictionSettings;
}

export interface InputBatchMsg {
  readonly v: typeof MESSAGE_VERSION;
  readonly kind: "InputBatch";
  readonly samples: readonly InputSample[];
}

export interface DisplayFrameMsg {
  readonly v: typeof MESSAGE_VERSION;
  readonly kind: "DisplayFrame";
  readonly tick: number;
  readonly t: number;
  readonly pointerPx: number;
  readonly inputPx: number;
  readonly phase: Phase;
  readonly springForce: number;
  readonly stringVisible: boolean;
  readonly stringLen: number;
  readonly stringFrom: number;
  readonly stringTo: number;
  readonly stage: Stage | null;
}

export interface TrialPromptMsg {
  readonly v: typeof MESSAGE_VERSION;
  readonly kind: "TrialPrompt";
  readonly trialIndex: number;
  readonly stage: Stage;
  readonly stimulusOrder: StimulusOrder;
}

export type ResponseMsg =
  | { readonly v: typeof MESSAGE_VERSION; readonly kind: "Response";
      readonly response: "choice"; readonly answer: string }
  | { readonly v: typeof MESSAGE_VERSION; readonly kind: "Response";
      readonly response: "adjust"; readonly press: Press }
  | { readonly v: typeof MESSAGE_VERSION; readonly kind: "Response";
      readonly response: "confirm" };

export interface SessionDoneMsg {
  readonly v: typeof MESSAGE_VERSION;
  readonly kind: "SessionDone";
  readonly records: readonly string[];
}

export type UiSessionMessage =
  | ConfigureMsg
  | InputBatchMsg
  | DisplayFrameMsg
  | TrialPromptMsg
  | ResponseMsg
  | SessionDoneMsg;

export const MESSAGE_KINDS = [
  "Configure", "InputBatch", "DisplayFrame", "TrialPrompt", "Response", "SessionDone",
] as const;

function asObject(raw: unknown): Record<string, unknown> {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new MessageError("message must be an object");
  }
  return raw as Record<string, unknown>;
}

function finiteNumber(rec: Record<string, unknown>, field: string): number {
  const v = rec[field];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new MessageError(`field '${field}' must be a finite number`);
  }
  return v;
}

function boolField(rec: Record<string, unknown>, field: string): boolean {
  const v = rec[field];
  if (typeof v !== "boolean") {
    throw new MessageError(`field '${field}' must be a boolean`);
  }
  return v;
}

const STAGES: readonly string[] =
  ["present_standard", "present_comparison", "await_response", "done"];

/** Strict parse of one session message. */
export function parseMessage(raw: unknown): UiSessionMessage {
  if (typeof raw === "string") {
    try {
      raw = JSON.parse(raw);
    } catch (e) {
      throw new MessageError(`invalid JSON: ${(e as Error).message}`);
    }
  }
  const rec = asObject(raw);
  if (rec["v"] !== MESSAGE_VERSION) {
    throw new MessageError(`unsupported message version ${JSON.stringify(rec["v"])}`);
  }
  const kind = rec["kind"];
  switch (kind) {
    case "Configure": {
      const frictionRaw = asObject(rec["friction"]);
      const muS = finiteNumber(frictionRaw, "muS");
      const overridesRaw = rec["overrides"] === undefined
        ? (frictionRaw["overrides"] ?? {})
        : rec["overrides"];
      const overrides = asObject(overridesRaw) as FrictionOverrides;
      const session = rec["session"] === null || rec["session"] === undefined
        ? null
        : parseSessionConfig(rec["session"]);
      return { v: MESSAGE_VERSION, kind, session, friction: { muS, overrides } };
    }
    case "InputBatch": {
      const samplesRaw = rec["samples"];
      if (!Array.isArray(samplesRaw)) {
        throw new MessageError("field 'samples' must be a list");
      }
      const samples: InputSample[] = samplesRaw.map((s, i) => {
        const sample = asObject(s);
        const t = sample["t"];
        const q = sample["q"];
        const contact = sample["contact"];
        if (typeof t !== "number" || !Number.isFinite(t)) {
          throw new MessageError(`sample ${i}: 't' must be a finite number`);
        }
        if (typeof q !== "number" || !Number.isFinite(q)) {
          throw new MessageError(`sample ${i}: 'q' must be a finite number`);
        }
        if (typeof contact !== "boolean") {
          throw new MessageError(`sample ${i}: 'contact' must be a boolean`);
        }
        return { t, q, contact };
      });
      return { v: MESSAGE_VERSION, kind, samples };
    }
    case "DisplayFrame": {
      const tick = finiteNumber(rec, "tick");
      if (!Number.isInteger(tick) || tick < 0) {
        throw new MessageError("field 'tick' must be an integer >= 0");
      }
      const phase = rec["phase"];
      if (phase !== "stick" && phase !== "slip") {
        throw new MessageError(`unknown phase ${JSON.stringify(phase)}`);
      }
      const stage = rec["stage"] ?? null;
      if (stage !== null && !STAGES.includes(stage as string)) {
        throw new MessageError(`unknown stage ${JSON.stringify(stage)}`);
      }
      return {
        v: MESSAGE_VERSION, kind, tick,
        t: finiteNumber(rec, "t"),
        pointerPx: finiteNumber(rec, "pointerPx"),
        inputPx: finiteNumber(rec, "inputPx"),
        phase,
        springForce: finiteNumber(rec, "springForce"),
        stringVisible: boolField(rec, "stringVisible"),
        stringLen: finiteNumber(rec, "stringLen"),
        stringFrom: finiteNumber(rec, "stringFrom"),
        stringTo: finiteNumber(rec, "stringTo"),
        stage: stage as Stage | null,
      };
    }
    case "TrialPrompt": {
      const trialIndex = finiteNumber(rec, "trialIndex");
      if (!Number.isInteger(trialIndex) || trialIndex < 0) {
        throw new MessageError("field 'trialIndex' must be an integer >= 0");
      }
      const stage = rec["stage"];
      if (!STAGES.includes(stage as string)) {
        throw new MessageError(`unknown stage ${JSON.stringify(stage)}`);
      }
      const order = rec["stimulusOrder"];
      if (order !== "standard_first" && order !== "comparison_first") {
        throw new MessageError(`unknown stimulusOrder ${JSON.stringify(order)}`);
      }
      return { v: MESSAGE_VERSION, kind, trialIndex, stage: stage as Stage,
               stimulusOrder: order };
    }
    case "Response": {
      const response = rec["response"];
      if (response === "choice") {
        const answer = rec["answer"];
        if (typeof answer !== "string") {
          throw new MessageError("field 'answer' must be a string");
        }
        return { v: MESSAGE_VERSION, kind, response, answer };
      }
      if (response === "adjust") {
        const press = rec["press"];
        if (press !== -10 && press !== -5 && press !== -1 &&
            press !== 1 && press !== 5 && press !== 10) {
          throw new MessageError(`unknown press ${JSON.stringify(press)}`);
        }
        return { v: MESSAGE_VERSION, kind, response, press };
      }
      if (response === "confirm") {
        return { v: MESSAGE_VERSION, kind, response };
      }
      throw new MessageError(`unknown response ${JSON.stringify(response)}`);
    }
    case "SessionDone": {
      const recordsRaw = rec["records"];
      if (!Array.isArray(recordsRaw) || recordsRaw.some((r) => typeof r !== "string")) {
        throw new MessageError("field 'records' must be a list of strings");
      }
      return { v: MESSAGE_VERSION, kind, records: recordsRaw as string[] };
    }
    default:
      throw new MessageError(`unknown message kind ${JSON.stringify(kind)}`);
  }
}

/** Enforce that display frames arrive strictly in tick order. */
export class FrameOrderChecker {
  private lastTick = -1;

  accept(frame: DisplayFrameMsg): void {
    if (frame.tick <= this.lastTick) {
      throw new MessageError(
        `display frame out of order: tick ${frame.tick} after ${this.lastTick}`);
    }
    this.lastTick = frame.tick;
  }
}
