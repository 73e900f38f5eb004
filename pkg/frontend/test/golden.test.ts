import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { makeParams } from "../src/friction.js";
import {
  type TraceRow, formatTrajectoryCsv, parseTrace, parseTrajectoryCsv, simulateTrace,
} from "../src/traces.js";
import { MESSAGE_VERSION } from "../src/messages.js";
import { UiSession } from "../src/session.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

// The trajectory CSVs under fixtures/ were produced by the reference
// command-line simulator from the committed input traces. These tests
// re-run the same inputs through this port and require byte-identical
// output; any mismatch means the simulation or the number formatting
// drifted, and the fix is in src/, never in the fixtures.

describe("trajectory golden files", () => {
  it("reproduces the default-surface trajectory byte for byte", () => {
    const samples = parseTrace(fixture("drag2s.jsonl"));
    const rows = simulateTrace(samples, makeParams(0.7, {}));
    expect(formatTrajectoryCsv(rows)).toBe(fixture("traj_default.csv"));
  });

  it("reproduces the stick-slip cycling trajectory byte for byte", () => {
    const samples = parseTrace(fixture("drag10x5.jsonl"));
    const params = makeParams(0.7, { muK: 0.1, k: 10.0, c: 2.0, g: 980.0 });
    const rows = simulateTrace(samples, params);
    expect(formatTrajectoryCsv(rows)).toBe(fixture("traj_cycling.csv"));
  });

  it("round-trips the trajectory CSV parser", () => {
    const text = fixture("traj_default.csv");
    const rows = parseTrajectoryCsv(text);
    expect(rows.length).toBe(201);
    expect(rows[0]!.phase).toBe("stick");
  });
});

describe("display frames through the session boundary", () => {
  it("emits frames identical to the offline trajectory for a scripted drag", () => {
    const samples = parseTrace(fixture("drag2s.jsonl"));
    const session = new UiSession();
    session.handle({
      v: MESSAGE_VERSION,
      kind: "Configure",
      session: null,
      friction: { muS: 0.7, overrides: {} },
    });
    session.handle({ v: MESSAGE_VERSION, kind: "InputBatch", samples: [...samples] });
    session.pump();
    const rows: TraceRow[] = [];
    let lastTick = -1;
    for (const msg of session.poll()) {
      if (msg.kind !== "DisplayFrame") {
        continue;
      }
      expect(msg.tick).toBeGreaterThan(lastTick);
      lastTick = msg.tick;
      rows.push({
        t: msg.t,
        q: msg.inputPx,
        p: msg.pointerPx,
        phase: msg.phase,
        springForce: msg.springForce,
        stringLen: msg.stringLen,
      });
    }
    // One frame per trajectory row, including the initial rest state.
    expect(rows.length).toBe(201);
    expect(formatTrajectoryCsv(rows)).toBe(fixture("traj_default.csv"));
  });

  it("streams identically when input arrives in small batches", () => {
    const samples = parseTrace(fixture("drag2s.jsonl"));
    const session = new UiSession();
    session.handle({
      v: MESSAGE_VERSION,
      kind: "Configure",
      session: null,
      friction: { muS: 0.7, overrides: {} },
    });
    const rows: TraceRow[] = [];
    const collect = (): void => {
      for (const msg of session.poll()) {
        if (msg.kind === "DisplayFrame") {
          rows.push({
            t: msg.t, q: msg.inputPx, p: msg.pointerPx, phase: msg.phase,
            springForce: msg.springForce, stringLen: msg.stringLen,
          });
        }
      }
    };
    for (let i = 0; i < samples.length; i += 7) {
      session.handle({
        v: MESSAGE_VERSION,
        kind: "InputBatch",
        samples: samples.slice(i, i + 7),
      });
      session.pump();
      collect();
    }
    expect(formatTrajectoryCsv(rows)).toBe(fixture("traj_default.csv"));
  });
});
