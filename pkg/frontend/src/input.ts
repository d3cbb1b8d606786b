/**
 * Gesture to action mapping. Pure lookups with no game logic: whether a
 * move bumps a wall or a pickup is legal is the server's call; illegal
 * attempts come back as error envelopes and surface as toasts.
 */

import type { ActionPayload, Direction } from "./protocol.js";
import type { ClientState } from "./state.js";
import { cellKey } from "./state.js";

const KEY_DIRECTIONS: Record<string, Direction> = {
  ArrowUp: "north",
  ArrowDown: "south",
  ArrowLeft: "west",
  ArrowRight: "east",
};

/** Arrow keys move; anything else is not ours to handle. */
export function keyToAction(key: string): ActionPayload | null {
  const direction = KEY_DIRECTIONS[key];
  return direction ? { kind: "move", direction } : null;
}

/**
 * Clicking a card on the board picks it up. Only the cell the player is
 * standing on is actionable; clicks elsewhere are ignored rather than
 * pathfound, since routing is the player's job.
 */
export function cellClickToAction(
  state: ClientState,
  x: number,
  y: number,
): ActionPayload | null {
  if (state.pos === null || state.pos[0] !== x || state.pos[1] !== y) return null;
  const cell = state.cells[cellKey(x, y)];
  const card = cell?.cards[0];
  return card ? { kind: "pickup", card } : null;
}

/** Clicking a chip in the hand drops that card on the current cell. */
export function handChipToAction(card: string): ActionPayload {
  return { kind: "drop", card };
}

/** The chat box sends utterances; blank input sends nothing. */
export function chatToAction(text: string): ActionPayload | null {
  const trimmed = text.trim();
  return trimmed.length > 0 ? { kind: "utter", text: trimmed } : null;
}
