// Pure view-model: maps acknowledged session state to what gets drawn.
// All lever angles pass through from the streamed trace untouched — the
// parity invariant (displayed angle === trace value) is enforced by never
// doing arithmetic on them here, only grouping.

import { PulleyPayload } from "./protocol.js";
import { SessionState } from "./store.js";

export interface LeverView {
  layer: number;
  index: number;
  /** exact trace value; inputs may be negative, later layers sit in [0, 1] */
  angle: number;
  /** string into this lever is slack (net input negative); layer 0: false */
  slack: boolean;
  pinnedValue: number | null;
}

export interface ClampViewEntry {
  sendLayer: number;
  send: number;
  recv: number;
  /** arc position = weight, in [-1, 1] */
  position: number;
  /** string from this clamp is taut */
  taut: boolean;
}

export interface ViewState {
  readOnly: boolean;
  banner: string | null;
  revision: number;
  layerSizes: number[];
  levers: LeverView[][];
  clamps: ClampViewEntry[];
  pulleys: PulleyPayload[];
  challenge: SessionState["challenge"];
  report: SessionState["challengeReport"];
  error: SessionState["lastError"];
}

export function viewStateFrom(state: SessionState): ViewState {
  const { network, trace, mechanical } = state;
  const closed = state.connection === "closed";
  const base: ViewState = {
    readOnly: closed || network === null,
    banner: closed
      ? "connection lost: displaying the last acknowledged state, read-only"
      : null,
    revision: state.revision,
    layerSizes: network ? network.layer_sizes : [],
    levers: [],
    clamps: [],
    pulleys: mechanical ? mechanical.pulleys : [],
    challenge: state.challenge,
    report: state.challengeReport,
    error: state.lastError,
  };
  if (!network || !trace || !mechanical) return base;

  base.levers = network.layer_sizes.map((size, layer) =>
    Array.from({ length: size }, (_, index) => {
      const slackRow = trace.slack[layer];
      return {
        layer,
        index,
        angle: trace.outputs[layer][index],
        slack: slackRow ? slackRow[index] : false,
        pinnedValue:
          layer === 0 && String(index) in network.pinned
            ? network.pinned[String(index)]
            : null,
      };
    }),
  );

  for (let k = 0; k < network.weights.length; k++) {
    const matrix = network.weights[k];
    for (let i = 0; i < matrix.length; i++) {
      for (let j = 0; j < matrix[i].length; j++) {
        base.clamps.push({
          sendLayer: k,
          send: j,
          recv: i,
          position: matrix[i][j],
          taut: mechanical.taut[k][i],
        });
      }
    }
  }
  return base;
}

// -- interaction helpers ------------------------------------------------

/** Clamps drag in 0.05 steps: the hand precision the arc scale is ruled in. */
export function snapClamp(position: number): number {
  const snapped = Math.round(position * 20) / 20;
  return Math.min(1, Math.max(-1, snapped));
}

/** Input levers drag continuously, but still inside the mechanical range. */
export function clampAngle(angle: number): number {
  return Math.min(1, Math.max(-1, angle));
}

// -- schematic geometry --------------------------------------------------
// Columns left to right, one per layer; each lever is a beam centered on
// its fulcrum. Sign convention: positive angle tips the beam clockwise.

export const LAYER_SPACING = 280;
export const LEVER_SPACING = 110;
export const ARM_LENGTH = 90;
export const MAX_ROTATION_DEG = 35;
export const MARGIN_X = 130;
export const MARGIN_Y = 90;

export function layerX(layer: number): number {
  return MARGIN_X + layer * LAYER_SPACING;
}

export function fulcrumY(index: number): number {
  return MARGIN_Y + index * LEVER_SPACING;
}

export function rotationDeg(angle: number): number {
  return angle * MAX_ROTATION_DEG;
}

/** Point on a beam at arc position p (signed fraction of the arm). */
export function beamPoint(
  layer: number,
  index: number,
  angle: number,
  p: number,
): { x: number; y: number } {
  const cx = layerX(layer);
  const cy = fulcrumY(index);
  const rad = (rotationDeg(angle) * Math.PI) / 180;
  return {
    x: cx + p * ARM_LENGTH * Math.cos(rad),
    y: cy + p * ARM_LENGTH * Math.sin(rad),
  };
}

/** Inverse of beamPoint's x for clamp dragging: pixel dx -> arc position. */
export function dragToArcPosition(dxPixels: number): number {
  return snapClamp(dxPixels / ARM_LENGTH);
}
