// Belief snapshot -> per-edge wall shading. The service exports the
// agent's passability belief per (cell, direction); a low mean means the
// agent suspects a wall, drawn dark. Opacity is 1 - mean so certainty of
// passage fades the line out entirely.

import type { BeliefSnapshotPayload } from "./protocol.js";

export interface EdgeShade {
  col: number;
  row: number;
  dir: "R" | "U" | "L" | "D";
  opacity: number;
}

export function wallOpacity(mean: number): number {
  return Math.min(1, Math.max(0, 1 - mean));
}

export function buildHeatmap(snapshot: BeliefSnapshotPayload): EdgeShade[] {
  const shades: EdgeShade[] = [];
  for (const [key, entry] of Object.entries(snapshot.entries)) {
    const [colStr, rowStr, dir] = key.split(",");
    shades.push({
      col: Number(colStr),
      row: Number(rowStr),
      dir: dir as EdgeShade["dir"],
      opacity: wallOpacity(entry.mean),
    });
  }
  return shades;
}
