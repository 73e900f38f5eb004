/**
 * Coulomb stick-slip dynamics for a spring-dragged screen pointer.
 *
 * This is a statement-for-statement port of the core simulator so that
 * in-page frames are bit-identical to headless trajectories: the same
 * IEEE-754 doubles come out because the same operations run in the
 * same order. Only +, -, *, /, abs and comparisons occur in the
 * stepper, all of which are exactly specified, so the port carries no
 * tolerance at all. Do not "simplify" arithmetic here; reassociating
 * an expression changes the rounding and breaks frame parity.
 */

export type Phase = "stick" | "slip";

export interface FrictionParams {
  readonly muS: number;
  readonly muK: number;
  readonly k: number;
  readonly c: number;
  readonly g: number;
  readonly stringScale: number;
  readonly simRate: number;
  readonly travelTarget: number;
}

export interface InputSample {
  readonly t: number;
  readonly q: number;
  readonly contact: boolean;
}

export interface SimState {
  readonly phase: Phase;
  readonly p: number;
  readonly v: number;
  readonly q: number;
  readonly t: number;
}

export class ParameterError extends Error {}
export class InputValueError extends Error {}

/** Mass that makes the spring-damper pair critically damped. */
export function derivedMass(k: number, c: number): number {
  if (!(k > 0.0) || !Number.isFinite(k)) {
    throw new ParameterError(`stiffness k must be positive and finite, got ${k}`);
  }
  if (!(c > 0.0) || !Number.isFinite(c)) {
    throw new ParameterError(`damping c must be positive and finite, got ${c}`);
  }
  return (c * c) / (4.0 * k);
}

export interface FrictionOverrides {
  muK?: number;
  k?: number;
  c?: number;
  g?: number;
  stringScale?: number;
  simRate?: number;
  travelTarget?: number;
}

/** Validated parameter set; unspecified fields take the core defaults. */
export function makeParams(muS: number, overrides: FrictionOverrides = {}): FrictionParams {
  const p: FrictionParams = {
    muS,
    muK: overrides.muK ?? 0.1,
    k: overrides.k ?? 0.1,
    c: overrides.c ?? 0.2,
    g: overrides.g ?? 9.8,
    stringScale: overrides.stringScale ?? 2000.0,
    simRate: overrides.simRate ?? 100.0,
    travelTarget: overrides.travelTarget ?? 70.0,
  };
  if (!(p.muS >= 0.0 && Number.isFinite(p.muS))) {
    throw new ParameterError(`mu_s must be >= 0, got ${p.muS}`);
  }
  if (!(p.muK >= 0.0 && Number.isFinite(p.muK))) {
    throw new ParameterError(`mu_k must be >= 0, got ${p.muK}`);
  }
  derivedMass(p.k, p.c);
  if (!(p.g > 0.0 && Number.isFinite(p.g))) {
    throw new ParameterError(`g must be positive, got ${p.g}`);
  }
  if (!(p.stringScale >= 0.0 && Number.isFinite(p.stringScale))) {
    throw new ParameterError(`string_scale must be >= 0, got ${p.stringScale}`);
  }
  if (!(p.simRate > 0.0 && Number.isFinite(p.simRate))) {
    throw new ParameterError(`sim_rate must be positive, got ${p.simRate}`);
  }
  if (!(p.travelTarget > 0.0 && Number.isFinite(p.travelTarget))) {
    throw new ParameterError(`travel_target must be positive, got ${p.travelTarget}`);
  }
  // Stability guard: the stepper resolves decay rate omega = 2k/c only
  // while omega*dt stays clear of the boundary near 2.8.
  if (p.c * p.simRate < p.k) {
    throw new ParameterError(
      `sim_rate ${p.simRate} Hz cannot resolve the decay rate of ` +
      `k=${p.k}, c=${p.c}; need c * sim_rate >= k`);
  }
  return p;
}

export function mass(p: FrictionParams): number {
  return derivedMass(p.k, p.c);
}

export function fSmax(p: FrictionParams): number {
  return p.muS * mass(p) * p.g;
}

export function fK(p: FrictionParams): number {
  return p.muK * mass(p) * p.g;
}

export function tickDt(p: FrictionParams): number {
  return 1.0 / p.simRate;
}

export function breakawayElongation(p: FrictionParams): number {
  return fSmax(p) / p.k;
}

/** Pointer at rest on the input point, stuck. */
export function initialState(q0: number, t0 = 0.0): SimState {
  if (!Number.isFinite(q0)) {
    throw new InputValueError(`initial position must be finite, got ${q0}`);
  }
  return { phase: "stick", p: q0, v: 0.0, q: q0, t: t0 };
}

const MAX_EVENTS_PER_TICK = 8;

function accel(x: number, u: number, s: number,
               m: number, c: number, k: number, fk: number): number {
  return (-k * x - c * u - s * fk) / m;
}

function rk4(x: number, u: number, s: number, h: number,
             m: number, c: number, k: number, fk: number): [number, number] {
  const a1 = accel(x, u, s, m, c, k, fk);
  const x2 = x + 0.5 * h * u;
  const u2 = u + 0.5 * h * a1;
  const a2 = accel(x2, u2, s, m, c, k, fk);
  const x3 = x + 0.5 * h * u2;
  const u3 = u + 0.5 * h * a2;
  const a3 = accel(x3, u3, s, m, c, k, fk);
  const x4 = x + h * u3;
  const u4 = u + h * a3;
  const a4 = accel(x4, u4, s, m, c, k, fk);
  const xNew = x + h * (u + 2.0 * u2 + 2.0 * u3 + u4) / 6.0;
  const uNew = u + h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0;
  return [xNew, uNew];
}

function stepRaw(stick: boolean, p: number, v: number, qOld: number, qNew: number,
                 m: number, c: number, k: number, fsmax: number, fk: number,
                 dt: number): [boolean, number, number] {
  if (stick) {
    // Pointer pinned; only the spring loads as the input moves away.
    return [k * Math.abs(p - qNew) <= fsmax, p, 0.0];
  }

  const vq = (qNew - qOld) / dt;
  let x = p - qOld;
  let u = v - vq;
  let h = dt;
  for (let i = 0; i < MAX_EVENTS_PER_TICK; i++) {
    let s;
    if (u === 0.0) {
      const force = k * Math.abs(x);
      if (force <= fsmax) {
        // Static friction holds at the crossing. The pointer froze at
        // elapsed dt - h into the tick; the input finishes its motion,
        // and if that reloads the spring past breakaway the hold is
        // already gone by tick end.
        const pEnd = qOld + vq * (dt - h) + x;
        return [k * Math.abs(pEnd - qNew) <= fsmax, pEnd, 0.0];
      }
      if (force <= fk) {
        // Spring cannot beat kinetic friction: relative rest persists
        // and the pointer comoves with the input. Reachable only when
        // mu_s < mu_k.
        return [false, qNew + x, vq];
      }
      s = x > 0.0 ? -1.0 : 1.0;
    } else {
      s = u > 0.0 ? 1.0 : -1.0;
    }
    const [x1, u1] = rk4(x, u, s, h, m, c, k, fk);
    const crossed = (u > 0.0 && u1 <= 0.0) || (u < 0.0 && u1 >= 0.0);
    if (!crossed) {
      if (Math.abs(u1) <= fk * dt / m && k * Math.abs(x1) <= fsmax) {
        return [true, qNew + x1, 0.0];
      }
      return [false, qNew + x1, u1 + vq];
    }
    // Locate the crossing by linear back-interpolation of the
    // velocity, land there, and resolve the rest state next pass.
    const theta = u / (u - u1);
    x = x + theta * h * u * 0.5;
    h = h - theta * h;
    u = 0.0;
  }
  // Event cascade did not settle within the cap; hold relative rest.
  return [false, qNew + x, vq];
}

/** Advance the simulation one tick toward a new input sample. */
export function step(state: SimState, params: FrictionParams,
                     sample: InputSample): SimState {
  if (!Number.isFinite(sample.q)) {
    throw new InputValueError(`input position must be finite, got ${sample.q}`);
  }
  if (!Number.isFinite(sample.t)) {
    throw new InputValueError(`input timestamp must be finite, got ${sample.t}`);
  }
  const [stick, p, v] = stepRaw(
    state.phase === "stick", state.p, state.v, state.q, sample.q,
    mass(params), params.c, params.k, fSmax(params), fK(params), tickDt(params),
  );
  return {
    phase: stick ? "stick" : "slip",
    p,
    v,
    q: sample.q,
    t: sample.t,
  };
}
