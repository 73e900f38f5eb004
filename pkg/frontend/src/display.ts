/**
 * Pointer and virtual-string presentation, mirroring the core display
 * composition so drawn geometry equals headless trajectory values.
 */

import { FrictionParams, ParameterError, SimState } from "./friction.js";

export interface DisplayState {
  readonly pointerPx: number;
  readonly stringVisible: boolean;
  readonly stringLen: number;
  readonly stringFrom: number;
  readonly stringTo: number;
}

/** Virtual string length in pixels, `scale * sqrt(spring_force)`. */
export function stringLength(springForce: number, scale: number): number {
  if (!(springForce >= 0.0 && Number.isFinite(springForce))) {
    throw new ParameterError(`spring force must be >= 0, got ${springForce}`);
  }
  return scale * Math.sqrt(springForce);
}

/** Project a simulator state onto the screen. The pointer is drawn
 *  exactly at the simulated position in every phase; the string is
 *  shown only when the session enables it and the device is in
 *  contact. */
export function composeDisplay(state: SimState, params: FrictionParams,
                               withString: boolean, contact = true): DisplayState {
  const force = params.k * Math.abs(state.p - state.q);
  const length = stringLength(force, params.stringScale);
  let direction = 0.0;
  if (state.q > state.p) {
    direction = 1.0;
  } else if (state.q < state.p) {
    direction = -1.0;
  }
  return {
    pointerPx: state.p,
    stringVisible: Boolean(withString && contact),
    stringLen: length,
    stringFrom: state.p,
    stringTo: state.p + direction * length,
  };
}
