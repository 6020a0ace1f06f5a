// Node colors derive solely from the role/layer fields of the response:
// query entities (layer 0) are red, reasoned answers share a blue hue whose
// lightness strictly increases with layer depth (deeper = lighter).

import type { NodeRole } from "./types";

export const QUERY_ENTITY_COLOR = "hsl(2, 72%, 47%)";

const BLUE_HUE = 212;
const BLUE_SATURATION = 68;

export function reasonedLightness(layer: number): number {
  const k = Math.max(1, layer);
  // strictly increasing in k, asymptotically below 88%
  return 88 - 52 / k;
}

export function colorForNode(role: NodeRole, layer: number): string {
  if (role === "query-entity" || layer === 0) {
    return QUERY_ENTITY_COLOR;
  }
  return `hsl(${BLUE_HUE}, ${BLUE_SATURATION}%, ${reasonedLightness(layer)}%)`;
}

export function lightnessOf(color: string): number {
  const match = /hsl\(\s*[\d.]+\s*,\s*[\d.]+%\s*,\s*([\d.]+)%\s*\)/.exec(color);
  if (!match) {
    throw new Error(`not an hsl() color: ${color}`);
  }
  return Number(match[1]);
}

export function isRed(color: string): boolean {
  return color === QUERY_ENTITY_COLOR;
}
