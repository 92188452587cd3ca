// Challenge panel logic: truth-table badges and the reveal overlay.

import { ChallengePayload, NetworkPayload } from "./protocol.js";

export interface Badge {
  bits: number[];
  expected: boolean;
  /** null until the table can be run (e.g. an input still needs pinning) */
  got: boolean | null;
  passed: boolean;
}

export function badges(report: ChallengePayload | null): Badge[] {
  if (!report) return [];
  return report.rows.map((row) => ({
    bits: row.bits,
    expected: row.expected,
    got: row.got,
    passed: row.passed,
  }));
}

export function allPassed(report: ChallengePayload | null): boolean {
  return report !== null && report.ready && report.passed;
}

export interface RevealClamp {
  sendLayer: number;
  send: number;
  recv: number;
  position: number;
}

/** Canonical clamp positions from a reveal, for ghost-highlighting. */
export function revealClamps(
  report: ChallengePayload | null,
): RevealClamp[] | null {
  if (!report || !report.reveal) return null;
  const network: NetworkPayload = report.reveal.network;
  const out: RevealClamp[] = [];
  for (let k = 0; k < network.weights.length; k++) {
    const matrix = network.weights[k];
    for (let i = 0; i < matrix.length; i++) {
      for (let j = 0; j < matrix[i].length; j++) {
        out.push({ sendLayer: k, send: j, recv: i, position: matrix[i][j] });
      }
    }
  }
  return out;
}

export function revealPins(
  report: ChallengePayload | null,
): Record<string, number> | null {
  if (!report || !report.reveal) return null;
  return report.reveal.network.pinned;
}
