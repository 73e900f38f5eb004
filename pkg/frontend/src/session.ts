/**
 * UI session engine: owns the friction stepper and the trial state
 * machine, speaks only session messages to the page shell.
 *
 * Inbound: Configure, InputBatch, Response. Outbound: DisplayFrame,
 * TrialPrompt, SessionDone. The shell never touches friction math; it
 * forwards pointer samples in and draws whatever frames come out.
 *
 * Ticking is input-driven. Each stimulus segment anchors its tick grid
 * at the first admitted sample (t = t0 + i * dt, exactly as the
 * offline trace runner computes it) and a tick runs only once buffered
 * input covers its timestamp. The wall-clock accumulator decides how
 * many ticks to attempt per animation frame; this module decides how
 * many are actually computable. Responses are queued and applied only
 * between ticks, so a click can never split a simulation step.
 *
 * In experiment mode each stimulus presentation is its own simulation
 * segment, restarted from rest at the segment origin with the input
 * re-anchored to zero; this matches the headless runner, which
 * simulates every stroke from a fresh initial state. Completed trials
 * are appended line by line to storage, so a reload resumes at the
 * first unfinished trial.
 */

import {
  type FrictionOverrides, type FrictionParams, type InputSample, type SimState,
  initialState, makeParams, step, tickDt,
} from "./friction.js";
import { composeDisplay } from "./display.js";
import { interpPosition } from "./traces.js";
import {
  type Press, type SessionConfig, type SessionRecord, type Stage,
  type TrialEvent, type TrialPhaseState, type TrialRecord,
  ExperimentError, INITIAL_TRIAL_PHASE, advanceTrial, buildLocalSchedule,
  recordLine,
} from "./experiment.js";
import {
  type ConfigureMsg, type DisplayFrameMsg, type UiSessionMessage,
  MESSAGE_VERSION, MessageError,
} from "./messages.js";
import { type StorageLike, RecordLog } from "./storage.js";

export type SessionMode = "idle" | "demo" | "experiment" | "done" | "failed";

export interface UiSessionOptions {
  /** Backend for trial persistence; omit to disable resume. */
  readonly storage?: StorageLike;
  /** Override the derived storage key. */
  readonly storageKey?: string;
}

interface Segment {
  params: FrictionParams;
  sim: SimState | null;
  t0: number;
  anchor: number;
  buffer: InputSample[];
  hint: number;
  ticks: number;
}

export class UiSession {
  private readonly storage: StorageLike | null;
  private readonly storageKeyOverride: string | null;

  private modeValue: SessionMode = "idle";
  private failureErr: Error | null = null;
  private muDemo = 0.0;
  private overrides: FrictionOverrides = {};
  private config: SessionConfig | null = null;
  private schedule: TrialRecord[] = [];
  private log: RecordLog | null = null;

  private trialPos = 0;
  private phase: TrialPhaseState = INITIAL_TRIAL_PHASE;
  private records: string[] = [];
  private logDirty = false;
  private durationStandardS = 0.0;
  private durationComparisonS = 0.0;

  private segment: Segment | null = null;
  private globalTick = 0;

  private outbox: UiSessionMessage[] = [];
  private responseQueue: TrialEvent[] = [];

  constructor(opts: UiSessionOptions = {}) {
    this.storage = opts.storage ?? null;
    this.storageKeyOverride = opts.storageKey ?? null;
  }

  get mode(): SessionMode {
    return this.modeValue;
  }

  /** Set when the engine has stopped on an error; the shell must show it. */
  get failure(): Error | null {
    return this.failureErr;
  }

  get stage(): Stage | null {
    return this.modeValue === "experiment" ? this.phase.stage : null;
  }

  get trialIndex(): number {
    return this.trialPos;
  }

  get trialCount(): number {
    return this.schedule.length;
  }

  get pressLog(): readonly number[] {
    return this.phase.pressLog;
  }

  get recordedLines(): readonly string[] {
    return this.records;
  }

  get sessionConfig(): SessionConfig | null {
    return this.config;
  }

  private fail(e: Error): never {
    this.modeValue = "failed";
    this.failureErr = e;
    throw e;
  }

  /** Process one inbound message. Outbound messages queue up in the
   *  outbox; drain them with `poll()`. */
  handle(msg: UiSessionMessage): void {
    if (msg.v !== MESSAGE_VERSION) {
      this.fail(new MessageError(`unsupported message version ${msg.v}`));
    }
    try {
      switch (msg.kind) {
        case "Configure":
          this.configure(msg);
          return;
        case "InputBatch":
          this.acceptSamples(msg.samples);
          return;
        case "Response":
          if (this.modeValue === "experiment") {
            if (msg.response === "choice") {
              this.responseQueue.push({ kind: "choice", answer: msg.answer });
            } else if (msg.response === "adjust") {
              this.responseQueue.push({ kind: "adjust", press: msg.press });
            } else {
              this.responseQueue.push({ kind: "confirm" });
            }
          }
          return;
        default:
          this.fail(new MessageError(
            `engine cannot accept ${msg.kind} messages`));
      }
    } catch (e) {
      if (this.modeValue !== "failed") {
        this.fail(e as Error);
      }
      throw e;
    }
  }

  /** Queued outbound messages, oldest first. */
  poll(): UiSessionMessage[] {
    const out = this.outbox;
    this.outbox = [];
    return out;
  }

  /** Completed records as a results-file document. */
  exportResults(): string {
    return this.records.length === 0 ? "" : this.records.join("\n") + "\n";
  }

  /** Drop persisted trials for the configured session. */
  clearSaved(): void {
    if (this.log !== null) {
      this.log.clear();
    }
  }

  // --- configuration ---------------------------------------------------------

  /**
   * Install an externally built trial order (a schedule file's parsed
   * records). Must follow Configure for an experiment session and
   * agree with it; trial indices must be exactly 0..n-1.
   */
  loadSchedule(entries: readonly SessionRecord[]): void {
    const config = this.config;
    if (this.modeValue !== "experiment" || config === null) {
      this.fail(new ExperimentError("loadSchedule requires a configured experiment"));
    }
    if (entries.length === 0) {
      this.fail(new ExperimentError("schedule is empty"));
    }
    const stubs: TrialRecord[] = [];
    for (const entry of entries) {
      if (entry.study !== config.study ||
          entry.participantIndex !== config.participantIndex ||
          entry.withString !== config.withString ||
          entry.standardMuS !== config.standardMuS) {
        this.fail(new ExperimentError(
          `schedule entry ${entry.trial.trialIndex} does not match the session config`));
      }
      stubs.push(entry.trial);
    }
    stubs.sort((a, b) => a.trialIndex - b.trialIndex);
    for (let i = 0; i < stubs.length; i++) {
      if (stubs[i]!.trialIndex !== i) {
        this.fail(new ExperimentError(`schedule trial indices must be 0..${stubs.length - 1}`));
      }
      this.validateMu(stubs[i]!.comparisonMuS);
    }
    this.schedule = stubs;
    this.restoreProgress();
    this.beginTrial();
  }

  private configure(msg: ConfigureMsg): void {
    this.muDemo = msg.friction.muS;
    this.overrides = msg.friction.overrides;
    this.failureErr = null;
    this.records = [];
    this.trialPos = 0;
    this.phase = INITIAL_TRIAL_PHASE;
    this.responseQueue = [];
    this.globalTick = 0;
    this.segment = null;
    this.log = null;
    if (msg.session === null) {
      this.config = null;
      this.schedule = [];
      this.modeValue = "demo";
      this.beginSegment(this.muDemo);
      return;
    }
    const config = msg.session;
    this.config = config;
    this.modeValue = "experiment";
    this.validateMu(config.standardMuS);
    for (const lv of config.comparisonLevels) {
      this.validateMu(lv);
    }
    if (this.storage !== null) {
      this.log = new RecordLog(this.storage, this.storageKey(config));
    }
    // A schedule file may replace this default order via loadSchedule.
    this.schedule = buildLocalSchedule(config);
    this.restoreProgress();
    this.beginTrial();
  }

  private storageKey(config: SessionConfig): string {
    if (this.storageKeyOverride !== null) {
      return this.storageKeyOverride;
    }
    return `stickslip.results.${config.study}.seed${config.seed}` +
           `.p${config.participantIndex}.${config.withString ? "string" : "nostring"}`;
  }

  private validateMu(muS: number): void {
    // Surface bad parameter combinations at configure time, not mid-trial.
    makeParams(muS, this.overrides);
  }

  /**
   * Re-adopt any completed trials persisted by an earlier page load.
   * Stored lines that do not prefix-match the active schedule are
   * ignored rather than deleted, because a schedule file loaded right
   * after Configure may still claim them; the stale log is only
   * overwritten once a freshly run trial is recorded.
   */
  private restoreProgress(): void {
    this.records = [];
    this.trialPos = 0;
    this.logDirty = false;
    if (this.log === null || this.config === null) {
      return;
    }
    const lines = this.log.load();
    if (lines.length === 0) {
      return;
    }
    if (lines.length > this.schedule.length) {
      this.logDirty = true;
      return;
    }
    const restored: string[] = [];
    for (let i = 0; i < lines.length; i++) {
      const line = lines[i]!;
      try {
        const obj = JSON.parse(line) as Record<string, unknown>;
        const stub = this.schedule[i]!;
        if (obj["study"] !== this.config.study ||
            obj["participant_index"] !== this.config.participantIndex ||
            obj["with_string"] !== this.config.withString ||
            obj["trial_index"] !== stub.trialIndex ||
            obj["comparison_mu_s"] !== stub.comparisonMuS) {
          throw new ExperimentError("stored trial does not match the schedule");
        }
      } catch {
        this.logDirty = true;
        return;
      }
      restored.push(line);
    }
    this.records = restored;
    this.trialPos = restored.length;
  }

  // --- segments ---------------------------------------------------------------

  private currentStub(): TrialRecord {
    const stub = this.schedule[this.trialPos];
    if (stub === undefined) {
      this.fail(new ExperimentError(`no trial at index ${this.trialPos}`));
    }
    return stub;
  }

  private beginSegment(muS: number): void {
    this.segment = {
      params: makeParams(muS, this.overrides),
      sim: null,
      t0: 0.0,
      anchor: 0.0,
      buffer: [],
      hint: 0,
      ticks: 0,
    };
  }

  private beginTrial(): void {
    if (this.trialPos >= this.schedule.length) {
      this.finish();
      return;
    }
    const config = this.config!;
    this.phase = INITIAL_TRIAL_PHASE;
    this.durationStandardS = 0.0;
    this.durationComparisonS = 0.0;
    this.beginSegment(config.standardMuS);
    this.prompt();
  }

  private prompt(): void {
    const stub = this.currentStub();
    this.outbox.push({
      v: MESSAGE_VERSION,
      kind: "TrialPrompt",
      trialIndex: stub.trialIndex,
      stage: this.phase.stage,
      stimulusOrder: stub.stimulusOrder,
    });
  }

  private finish(): void {
    this.segment = null;
    this.modeValue = "done";
    this.outbox.push({
      v: MESSAGE_VERSION,
      kind: "SessionDone",
      records: [...this.records],
    });
  }

  // --- input -------------------------------------------------------------------

  private acceptSamples(samples: readonly InputSample[]): void {
    if (this.modeValue !== "demo" && this.modeValue !== "experiment") {
      return;
    }
    const seg = this.segment;
    if (seg === null) {
      // Awaiting a response; pointer motion has no stimulus to drive.
      return;
    }
    for (const sample of samples) {
      if (seg.sim === null) {
        // First contact anchors the segment's tick grid and, in
        // experiment mode, re-zeroes the input coordinate.
        seg.t0 = sample.t;
        seg.anchor = this.modeValue === "experiment" ? sample.q : 0.0;
        const q0 = this.modeValue === "experiment" ? 0.0 : sample.q;
        seg.sim = initialState(q0, sample.t);
        seg.buffer.push({ t: sample.t, q: q0, contact: sample.contact });
        this.emitFrame(seg, sample.contact);
        continue;
      }
      const last = seg.buffer[seg.buffer.length - 1];
      if (last !== undefined && sample.t <= last.t) {
        // Stale or duplicated timestamp; the tick grid has moved on.
        continue;
      }
      const q = this.modeValue === "experiment" ? sample.q - seg.anchor : sample.q;
      seg.buffer.push({ t: sample.t, q, contact: sample.contact });
    }
  }

  /** Wall time of the last admitted sample, or null before first contact. */
  coveredUntil(): number | null {
    const seg = this.segment;
    if (seg === null || seg.buffer.length === 0) {
      return null;
    }
    return seg.buffer[seg.buffer.length - 1]!.t;
  }

  // --- ticking -----------------------------------------------------------------

  /**
   * Run up to `maxTicks` simulation ticks, bounded by how far buffered
   * input reaches. Returns the number of ticks actually run. Queued
   * responses are applied between ticks.
   */
  pump(maxTicks: number = Number.POSITIVE_INFINITY): number {
    try {
      return this.pumpInner(maxTicks);
    } catch (e) {
      if (this.modeValue !== "failed") {
        this.modeValue = "failed";
        this.failureErr = e as Error;
      }
      throw e;
    }
  }

  private pumpInner(maxTicks: number): number {
    let ran = 0;
    this.drainResponses();
    while (ran < maxTicks) {
      if (this.modeValue !== "demo" && this.modeValue !== "experiment") {
        break;
      }
      const seg = this.segment;
      if (seg === null || seg.sim === null) {
        break;
      }
      const last = seg.buffer[seg.buffer.length - 1]!;
      const covered = Math.floor((last.t - seg.t0) / tickDt(seg.params) + 1e-9);
      if (seg.ticks + 1 > covered) {
        break;
      }
      this.runTick(seg);
      ran++;
      this.drainResponses();
    }
    return ran;
  }

  private runTick(seg: Segment): void {
    const i = seg.ticks + 1;
    const t = seg.t0 + i * tickDt(seg.params);
    const [q, contact, hint] = interpPosition(seg.buffer, t, seg.hint);
    seg.hint = hint;
    seg.sim = step(seg.sim!, seg.params, { t, q, contact });
    seg.ticks = i;
    // Consumed history ahead of the cursor can go; interpolation only
    // ever reads the bracketing pair at or after the hint.
    if (seg.hint > 4096) {
      seg.buffer.splice(0, seg.hint);
      seg.hint = 0;
    }
    this.emitFrame(seg, contact);
    if (this.modeValue !== "experiment") {
      return;
    }
    const config = this.config!;
    const before = this.phase.stage;
    this.phase = advanceTrial(this.phase, { kind: "pointer_tick", p: seg.sim.p },
                              config.study, seg.params.travelTarget);
    if (this.phase.stage === before) {
      return;
    }
    if (before === "present_standard") {
      this.durationStandardS = seg.ticks / seg.params.simRate;
      this.beginSegment(this.currentStub().comparisonMuS);
      this.prompt();
      return;
    }
    if (before === "present_comparison") {
      this.durationComparisonS = seg.ticks / seg.params.simRate;
      this.segment = null;
      this.prompt();
    }
  }

  private emitFrame(seg: Segment, contact: boolean): void {
    const sim = seg.sim!;
    const withString = this.config === null ? true : this.config.withString;
    const view = composeDisplay(sim, seg.params, withString, contact);
    const frame: DisplayFrameMsg = {
      v: MESSAGE_VERSION,
      kind: "DisplayFrame",
      tick: this.globalTick,
      t: sim.t,
      pointerPx: view.pointerPx,
      inputPx: sim.q,
      phase: sim.phase,
      springForce: seg.params.k * Math.abs(sim.p - sim.q),
      stringVisible: view.stringVisible,
      stringLen: view.stringLen,
      stringFrom: view.stringFrom,
      stringTo: view.stringTo,
      stage: this.modeValue === "experiment" ? this.phase.stage : null,
    };
    this.globalTick += 1;
    this.outbox.push(frame);
  }

  private drainResponses(): void {
    if (this.modeValue !== "experiment") {
      this.responseQueue = [];
      return;
    }
    const config = this.config!;
    while (this.responseQueue.length > 0) {
      const event = this.responseQueue.shift()!;
      const travel = this.segment === null
        ? makeParams(config.standardMuS, this.overrides).travelTarget
        : this.segment.params.travelTarget;
      const before = this.phase.stage;
      this.phase = advanceTrial(this.phase, event, config.study, travel);
      if (this.phase.stage === "done" && before !== "done") {
        this.recordTrial();
        this.trialPos += 1;
        this.beginTrial();
        if (this.modeValue !== "experiment") {
          return;
        }
      }
    }
  }

  private recordTrial(): void {
    const config = this.config!;
    const stub = this.currentStub();
    const trial: TrialRecord = {
      trialIndex: stub.trialIndex,
      comparisonMuS: stub.comparisonMuS,
      stimulusOrder: stub.stimulusOrder,
      direction: stub.direction,
      response: this.phase.response,
      pressLog: this.phase.pressLog,
      durationStandardS: this.durationStandardS,
      durationComparisonS: this.durationComparisonS,
      // The headless runner does not time the response step either;
      // keeping zero here keeps its files and ours interchangeable.
      durationResponseS: 0.0,
    };
    const line = recordLine(config.study, config.participantIndex,
                            config.withString, config.standardMuS, trial);
    this.records.push(line);
    if (this.log !== null) {
      if (this.logDirty) {
        this.log.clear();
        this.logDirty = false;
      }
      this.log.append(line);
    }
  }
}

export type { Press };
