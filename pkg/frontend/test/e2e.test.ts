import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { tickDt, makeParams } from "../src/friction.js";
import type { InputSample } from "../src/friction.js";
import type { SessionConfig } from "../src/experiment.js";
import { parseResults } from "../src/experiment.js";
import { FrameOrderChecker, MESSAGE_VERSION } from "../src/messages.js";
import { UiSession } from "../src/session.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const FIXTURES = join(HERE, "fixtures");
// Repository root: frontend/test -> frontend -> root.
const REPO = join(HERE, "..", "..");

const CONFIG: SessionConfig = {
  study: "jnd",
  standardMuS: 0.0,
  comparisonLevels: [0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
  reps: 10,
  withString: true,
  seed: 42,
  participantIndex: 3,
};

const DT = tickDt(makeParams(0.7, {}));

/**
 * Constant-speed stroke on the exact tick grid. The sample values are
 * built with the same arithmetic the headless robot uses for its
 * synthetic strokes (t = i * dt, q = (100 * i) * dt, left to right),
 * so the resampled tick inputs are bit-identical to the robot's and
 * the recorded durations must match its output exactly.
 */
function strokeSamples(ticks: number): InputSample[] {
  const out: InputSample[] = [];
  for (let i = 0; i <= ticks; i++) {
    out.push({ t: i * DT, q: 100 * i * DT, contact: true });
  }
  return out;
}

function runScriptedSession(): UiSession {
  const session = new UiSession();
  session.handle({
    v: MESSAGE_VERSION,
    kind: "Configure",
    session: CONFIG,
    friction: { muS: 0.7, overrides: {} },
  });
  const scheduleText = readFileSync(join(FIXTURES, "schedule_j3.jsonl"), "utf-8");
  session.loadSchedule(parseResults(scheduleText));

  const order = new FrameOrderChecker();
  let guard = 0;
  while (session.mode === "experiment") {
    if (guard++ > 1000) {
      throw new Error("scripted session did not converge");
    }
    for (const msg of session.poll()) {
      if (msg.kind === "DisplayFrame") {
        order.accept(msg);
      }
    }
    const stage = session.stage;
    if (stage === "present_standard" || stage === "present_comparison") {
      session.handle({
        v: MESSAGE_VERSION, kind: "InputBatch", samples: strokeSamples(200),
      });
      session.pump();
    } else if (stage === "await_response") {
      session.handle({
        v: MESSAGE_VERSION, kind: "Response", response: "choice",
        answer: "comparison",
      });
      session.pump();
    } else {
      throw new Error(`unexpected stage ${stage}`);
    }
  }
  expect(session.mode).toBe("done");
  return session;
}

describe("scripted discrimination session", () => {
  it("reproduces the headless robot's results file byte for byte", () => {
    const session = runScriptedSession();
    const expected = readFileSync(join(FIXTURES, "robot_j3.jsonl"), "utf-8");
    expect(session.exportResults()).toBe(expected);
  });

  it("exports a results file the reference fit command accepts", () => {
    const session = runScriptedSession();
    const dir = mkdtempSync(join(tmpdir(), "stickslip-e2e-"));
    const resultsPath = join(dir, "results.jsonl");
    writeFileSync(resultsPath, session.exportResults(), "utf-8");

    const proc = spawnSync(
      "python3",
      ["-m", "stickslip.cli", "fit", "--kind", "psychometric",
       "--results", resultsPath],
      { cwd: REPO, encoding: "utf-8" },
    );
    expect(proc.error).toBeUndefined();
    expect(proc.status, proc.stderr).toBe(0);
    const report = JSON.parse(proc.stdout) as Record<string, unknown>;
    expect(report["kind"]).toBe("psychometric");
    expect(report["n_trials"]).toBe(60);
    expect(report["levels"]).toEqual([0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
  });
});
