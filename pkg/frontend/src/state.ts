/**
 * Client state as a pure fold over the envelope stream.
 *
 * reduce(state, envelope) returns a fresh state and never mutates its
 * arguments, so replaying a recorded stream from initialState reproduces
 * the exact screen state. No game rules live here: cells come only from
 * view envelopes, the hand and position only from the welcome envelope
 * and the seat's own events, and nothing is ever inferred about the
 * partner's whereabouts.
 */

import type {
  Direction,
  Envelope,
  EventPayload,
  Seat,
} from "./protocol.js";

export interface KnownCell {
  cards: string[];
  walls: Direction[];
  /** Envelope seq of the view that last refreshed this cell. */
  seenAt: number;
}

export interface ChatLine {
  actor: Seat;
  text: string;
  gameSeq: number;
}

export interface BumpFlash {
  dir: Direction;
  atSeq: number;
}

export interface Toast {
  code: string;
  message: string;
  atSeq: number;
}

export interface ClientState {
  sessionId: string | null;
  playerId: Seat | null;
  opponent: "agent" | "human" | null;
  width: number;
  height: number;
  visibilityRadius: number;
  moveBudget: number;
  pos: readonly [number, number] | null;
  hand: string[];
  /** Fog of war: only cells a view envelope has revealed, keyed "x,y". */
  cells: Record<string, KnownCell>;
  chat: ChatLine[];
  toasts: Toast[];
  bump: BumpFlash | null;
  straight: string[] | null;
  lastSeq: number;
}

export const initialState: ClientState = {
  sessionId: null,
  playerId: null,
  opponent: null,
  width: 0,
  height: 0,
  visibilityRadius: 0,
  moveBudget: 0,
  pos: null,
  hand: [],
  cells: {},
  chat: [],
  toasts: [],
  bump: null,
  straight: null,
  lastSeq: 0,
};

export function cellKey(x: number, y: number): string {
  return `${x},${y}`;
}

function applyEvent(state: ClientState, seq: number, ev: EventPayload): ClientState {
  switch (ev.kind) {
    case "move_to": {
      const pos = ev.payload.pos as [number, number];
      if (ev.actor !== state.playerId) return state;
      return { ...state, pos: [pos[0], pos[1]], bump: null };
    }
    case "bump": {
      if (ev.actor !== state.playerId) return state;
      return { ...state, bump: { dir: ev.payload.dir as Direction, atSeq: seq } };
    }
    case "pickup": {
      if (ev.actor !== state.playerId) return state;
      return { ...state, hand: [...state.hand, ev.payload.card as string].sort() };
    }
    case "drop": {
      if (ev.actor !== state.playerId) return state;
      const card = ev.payload.card as string;
      const i = state.hand.indexOf(card);
      if (i < 0) return state;
      return { ...state, hand: [...state.hand.slice(0, i), ...state.hand.slice(i + 1)] };
    }
    case "utterance": {
      const line: ChatLine = {
        actor: ev.actor,
        text: ev.payload.text as string,
        gameSeq: ev.game_seq,
      };
      return { ...state, chat: [...state.chat, line] };
    }
  }
}

export function reduce(state: ClientState, env: Envelope): ClientState {
  // Duplicate delivery (e.g. an overlapping resume) must not double-apply.
  if (env.seq <= state.lastSeq) return state;
  const next = ((): ClientState => {
    switch (env.type) {
      case "welcome": {
        const w = env.payload;
        return {
          ...state,
          sessionId: w.session_id,
          playerId: w.player_id,
          opponent: w.opponent,
          width: w.width,
          height: w.height,
          visibilityRadius: w.visibility_radius,
          moveBudget: w.move_budget,
          pos: [w.pos[0], w.pos[1]],
          hand: [...w.hand].sort(),
        };
      }
      case "view": {
        const cells = { ...state.cells };
        for (const cell of env.payload.cells) {
          cells[cellKey(cell.pos[0], cell.pos[1])] = {
            cards: [...cell.cards],
            walls: [...cell.walls],
            seenAt: env.seq,
          };
        }
        return { ...state, cells };
      }
      case "event":
        return applyEvent(state, env.seq, env.payload);
      case "error": {
        const toast: Toast = {
          code: env.payload.code,
          message: env.payload.message,
          atSeq: env.seq,
        };
        return { ...state, toasts: [...state.toasts, toast] };
      }
      case "game_over":
        return { ...state, straight: [...env.payload.straight] };
    }
  })();
  return { ...next, lastSeq: env.seq };
}

/** Fold a whole recorded stream; used by tests to check replay purity. */
export function replay(envelopes: Iterable<Envelope>, from?: ClientState): ClientState {
  let state = from ?? initialState;
  for (const env of envelopes) state = reduce(state, env);
  return state;
}
