/**
 * Page shell: canvas rendering, pointer capture, controls. All
 * simulation and trial logic lives behind the session message
 * boundary; this file only forwards input samples in and draws the
 * frames that come out.
 */

import { FixedStepAccumulator } from "./accumulator.js";
import type { InputSample } from "./friction.js";
import type { Press, SessionConfig } from "./experiment.js";
import { parseResults } from "./experiment.js";
import type { DisplayFrameMsg, UiSessionMessage } from "./messages.js";
import { MESSAGE_VERSION } from "./messages.js";
import { UiSession } from "./session.js";

const SIM_RATE = 100.0;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const canvas = byId<HTMLCanvasElement>("track");
const statusLine = byId<HTMLDivElement>("status");
const errorBanner = byId<HTMLDivElement>("error");
const resultsBox = byId<HTMLTextAreaElement>("results");
const downloadLink = byId<HTMLAnchorElement>("download");

const muSInput = byId<HTMLInputElement>("mu-s");
const muKInput = byId<HTMLInputElement>("mu-k");
const scaleInput = byId<HTMLInputElement>("string-scale");
const stringToggle = byId<HTMLInputElement>("with-string");
const dprInput = byId<HTMLInputElement>("dpr");
const muSReadout = byId<HTMLSpanElement>("mu-s-value");
const muKReadout = byId<HTMLSpanElement>("mu-k-value");
const scaleReadout = byId<HTMLSpanElement>("string-scale-value");

const seedInput = byId<HTMLInputElement>("seed");
const participantInput = byId<HTMLInputElement>("participant");
const scheduleFile = byId<HTMLInputElement>("schedule-file");

const demoButton = byId<HTMLButtonElement>("mode-demo");
const study1Button = byId<HTMLButtonElement>("mode-study1");
const study2Button = byId<HTMLButtonElement>("mode-study2");
const clearButton = byId<HTMLButtonElement>("clear-saved");

const choicePanel = byId<HTMLDivElement>("choice-panel");
const adjustPanel = byId<HTMLDivElement>("adjust-panel");

const session = new UiSession({ storage: window.localStorage });
const accumulator = new FixedStepAccumulator(SIM_RATE);

let experimentActive = false;
let lastFrame: DisplayFrameMsg | null = null;
let pendingSamples: InputSample[] = [];
let pointerHeld: { q: number; contact: boolean } | null = null;
let pendingSchedule: string | null = null;

function showError(e: unknown): void {
  const message = e instanceof Error ? `${e.name}: ${e.message}` : String(e);
  errorBanner.textContent = `Session stopped: ${message}`;
  errorBanner.hidden = false;
}

function guard(fn: () => void): void {
  try {
    fn();
  } catch (e) {
    showError(e);
  }
}

// --- canvas ------------------------------------------------------------------

function applyDpr(): void {
  const dpr = Number(dprInput.value) || 1.0;
  const rect = canvas.getBoundingClientRect();
  canvas.width = Math.max(1, Math.round(rect.width * dpr));
  canvas.height = Math.max(1, Math.round(rect.height * dpr));
  const ctx = canvas.getContext("2d");
  if (ctx !== null) {
    ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  }
}

function frameX(value: number): number {
  // Experiment segments are simulated around zero; demo mode works in
  // raw canvas coordinates.
  const rect = canvas.getBoundingClientRect();
  return experimentActive ? rect.width / 2 + value : value;
}

function draw(): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  ctx.clearRect(0, 0, rect.width, rect.height);
  const midY = rect.height / 2;
  ctx.strokeStyle = "#bbb";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, midY);
  ctx.lineTo(rect.width, midY);
  ctx.stroke();
  const frame = lastFrame;
  if (frame === null) {
    return;
  }
  if (frame.stringVisible && frame.stringLen > 0) {
    ctx.strokeStyle = "#c33";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(frameX(frame.stringFrom), midY);
    ctx.lineTo(frameX(frame.stringTo), midY);
    ctx.stroke();
  }
  ctx.fillStyle = frame.phase === "stick" ? "#246" : "#2a7";
  ctx.beginPath();
  ctx.arc(frameX(frame.pointerPx), midY, 9, 0, Math.PI * 2);
  ctx.fill();
}

// --- session plumbing ---------------------------------------------------------

function currentOverrides(): Record<string, number> {
  return {
    muK: Number(muKInput.value),
    stringScale: Number(scaleInput.value),
    simRate: SIM_RATE,
  };
}

function configureDemo(): void {
  experimentActive = false;
  lastFrame = null;
  accumulator.reset();
  pointerHeld = null;
  statusLine.textContent = "Demo: drag along the track to feel the surface.";
  choicePanel.hidden = true;
  adjustPanel.hidden = true;
  session.handle({
    v: MESSAGE_VERSION,
    kind: "Configure",
    session: null,
    friction: { muS: Number(muSInput.value), overrides: currentOverrides() },
  });
}

function configureStudy(study: "jnd" | "magnitude"): void {
  experimentActive = true;
  lastFrame = null;
  accumulator.reset();
  pointerHeld = null;
  resultsBox.value = "";
  const config: SessionConfig = study === "jnd"
    ? {
        study: "jnd",
        standardMuS: 0.0,
        comparisonLevels: [0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
        reps: 10,
        withString: stringToggle.checked,
        seed: Number(seedInput.value) || 0,
        participantIndex: Number(participantInput.value) || 0,
      }
    : {
        study: "magnitude",
        standardMuS: 0.7,
        comparisonLevels: [0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        reps: 5,
        withString: stringToggle.checked,
        seed: Number(seedInput.value) || 0,
        participantIndex: Number(participantInput.value) || 0,
      };
  session.handle({
    v: MESSAGE_VERSION,
    kind: "Configure",
    session: config,
    friction: { muS: Number(muSInput.value), overrides: currentOverrides() },
  });
  if (pendingSchedule !== null) {
    session.loadSchedule(parseResults(pendingSchedule));
  }
}

function describeStage(stage: string, trialIndex: number): string {
  const trialNo = `Trial ${trialIndex + 1} of ${session.trialCount}`;
  switch (stage) {
    case "present_standard":
      return `${trialNo}: drag across the first surface.`;
    case "present_comparison":
      return `${trialNo}: now drag across the second surface.`;
    case "await_response":
      return session.sessionConfig?.study === "jnd"
        ? `${trialNo}: which surface felt more frictional?`
        : `${trialNo}: rate the second surface relative to the first (1.00 = same).`;
    default:
      return trialNo;
  }
}

function onMessage(msg: UiSessionMessage): void {
  switch (msg.kind) {
    case "DisplayFrame":
      lastFrame = msg;
      return;
    case "TrialPrompt": {
      statusLine.textContent = describeStage(msg.stage, msg.trialIndex);
      const awaiting = msg.stage === "await_response";
      const study = session.sessionConfig?.study;
      choicePanel.hidden = !(awaiting && study === "jnd");
      adjustPanel.hidden = !(awaiting && study === "magnitude");
      if (msg.stage === "present_comparison" || awaiting) {
        // New stimulus/new question: drop the held pointer so the next
        // drag re-anchors cleanly.
        pointerHeld = null;
        lastFrame = null;
      }
      return;
    }
    case "SessionDone": {
      experimentActive = false;
      choicePanel.hidden = true;
      adjustPanel.hidden = true;
      statusLine.textContent =
        `Session complete: ${msg.records.length} trials recorded.`;
      const doc = session.exportResults();
      resultsBox.value = doc;
      const blob = new Blob([doc], { type: "application/jsonl" });
      downloadLink.href = URL.createObjectURL(blob);
      downloadLink.hidden = false;
      return;
    }
    default:
      return;
  }
}

function sendResponse(msg: UiSessionMessage): void {
  guard(() => {
    session.handle(msg);
    session.pump();
    for (const out of session.poll()) {
      onMessage(out);
    }
  });
}

// --- input capture --------------------------------------------------------------

function pushSample(t: number, q: number, contact: boolean): void {
  pendingSamples.push({ t, q, contact });
  pointerHeld = { q, contact };
}

canvas.addEventListener("pointerdown", (ev) => {
  canvas.setPointerCapture(ev.pointerId);
  pushSample(ev.timeStamp / 1000.0, ev.offsetX, true);
});

canvas.addEventListener("pointermove", (ev) => {
  if (pointerHeld !== null || ev.buttons !== 0) {
    pushSample(ev.timeStamp / 1000.0, ev.offsetX, ev.buttons !== 0);
  }
});

canvas.addEventListener("pointerup", (ev) => {
  pushSample(ev.timeStamp / 1000.0, ev.offsetX, false);
});

// --- main loop --------------------------------------------------------------------

function frame(nowMs: number): void {
  const now = nowMs / 1000.0;
  guard(() => {
    if (session.failure !== null) {
      return;
    }
    const held = pointerHeld;
    if (held !== null) {
      const lastPending = pendingSamples[pendingSamples.length - 1];
      if (lastPending === undefined || lastPending.t < now) {
        // Keep the tick grid covered while the pointer rests.
        pendingSamples.push({ t: now, q: held.q, contact: held.contact });
      }
    }
    if (pendingSamples.length > 0) {
      session.handle({ v: MESSAGE_VERSION, kind: "InputBatch", samples: pendingSamples });
      pendingSamples = [];
    }
    const budget = accumulator.update(now);
    if (budget > 0) {
      session.pump(budget);
    }
    for (const out of session.poll()) {
      onMessage(out);
    }
  });
  draw();
  window.requestAnimationFrame(frame);
}

// --- controls -----------------------------------------------------------------------

function refreshReadouts(): void {
  muSReadout.textContent = Number(muSInput.value).toFixed(2);
  muKReadout.textContent = Number(muKInput.value).toFixed(2);
  scaleReadout.textContent = Number(scaleInput.value).toFixed(0);
}

for (const input of [muSInput, muKInput, scaleInput]) {
  input.addEventListener("input", () => {
    refreshReadouts();
    if (!experimentActive) {
      guard(configureDemo);
    }
  });
}
stringToggle.addEventListener("change", () => {
  if (!experimentActive) {
    guard(configureDemo);
  }
});
dprInput.addEventListener("change", applyDpr);

demoButton.addEventListener("click", () => guard(configureDemo));
study1Button.addEventListener("click", () => guard(() => configureStudy("jnd")));
study2Button.addEventListener("click", () => guard(() => configureStudy("magnitude")));
clearButton.addEventListener("click", () => guard(() => session.clearSaved()));

scheduleFile.addEventListener("change", () => {
  const file = scheduleFile.files?.[0];
  if (file === undefined) {
    pendingSchedule = null;
    return;
  }
  void file.text().then((text) => {
    pendingSchedule = text;
    statusLine.textContent = `Schedule loaded (${file.name}); start a study to use it.`;
  });
});

byId<HTMLButtonElement>("answer-standard").addEventListener("click", () => {
  sendResponse({ v: MESSAGE_VERSION, kind: "Response", response: "choice", answer: "standard" });
});
byId<HTMLButtonElement>("answer-comparison").addEventListener("click", () => {
  sendResponse({ v: MESSAGE_VERSION, kind: "Response", response: "choice", answer: "comparison" });
});

for (const press of [-10, -5, -1, 1, 5, 10] as Press[]) {
  const id = press < 0 ? `press-minus-${-press}` : `press-plus-${press}`;
  byId<HTMLButtonElement>(id).addEventListener("click", () => {
    sendResponse({ v: MESSAGE_VERSION, kind: "Response", response: "adjust", press });
  });
}
byId<HTMLButtonElement>("confirm").addEventListener("click", () => {
  sendResponse({ v: MESSAGE_VERSION, kind: "Response", response: "confirm" });
});

refreshReadouts();
applyDpr();
guard(configureDemo);
window.requestAnimationFrame(frame);
