/**
 * Message schemas for the gathersix session service.
 *
 * The server speaks newline-free JSON over the websocket, one envelope per
 * message: {"type": ..., "seq": ..., "payload": ...}. Seq numbers are
 * per-seat, start at 1, and never repeat; reconnecting with ?last_seq=N
 * resumes after N. Everything here mirrors those wire shapes exactly and
 * rejects anything that deviates, so schema drift surfaces as a thrown
 * ProtocolError instead of silently wrong rendering.
 */

export type Direction = "north" | "south" | "east" | "west";
export type Seat = "P1" | "P2";

const DIRECTIONS: readonly Direction[] = ["north", "south", "east", "west"];
const SEATS: readonly Seat[] = ["P1", "P2"];

// Ranks as the server prints them: A 2..9 T J Q K, then a suit letter.
const CARD_RE = /^[A23456789TJQK][CDHS]$/;

export type Coord = readonly [number, number];

export interface CellView {
  pos: Coord;
  cards: string[];
  walls: Direction[];
}

export interface WelcomePayload {
  session_id: string;
  player_id: Seat;
  opponent: "agent" | "human";
  width: number;
  height: number;
  visibility_radius: number;
  move_budget: number;
  pos: Coord;
  hand: string[];
}

export interface ViewPayload {
  cells: CellView[];
}

export type EventKind = "move_to" | "pickup" | "drop" | "bump" | "utterance";

export interface EventPayload {
  game_seq: number;
  actor: Seat;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface ErrorPayload {
  code: string;
  message: string;
}

export interface GameOverPayload {
  straight: string[];
}

export type Envelope =
  | { type: "welcome"; seq: number; payload: WelcomePayload }
  | { type: "view"; seq: number; payload: ViewPayload }
  | { type: "event"; seq: number; payload: EventPayload }
  | { type: "error"; seq: number; payload: ErrorPayload }
  | { type: "game_over"; seq: number; payload: GameOverPayload };

export type ActionPayload =
  | { kind: "move"; direction: Direction }
  | { kind: "pickup"; card: string }
  | { kind: "drop"; card: string }
  | { kind: "utter"; text: string };

export interface ClientMessage {
  type: "action";
  payload: ActionPayload;
}

export class ProtocolError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ProtocolError";
  }
}

function fail(path: string, want: string, got: unknown): never {
  throw new ProtocolError(`${path}: expected ${want}, got ${JSON.stringify(got)}`);
}

function asRecord(value: unknown, path: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(path, "an object", value);
  }
  return value as Record<string, unknown>;
}

function asString(value: unknown, path: string): string {
  if (typeof value !== "string") fail(path, "a string", value);
  return value;
}

function asInt(value: unknown, path: string, min: number): number {
  if (typeof value !== "number" || !Number.isInteger(value) || value < min) {
    fail(path, `an integer >= ${min}`, value);
  }
  return value;
}

function asCard(value: unknown, path: string): string {
  const s = asString(value, path);
  if (!CARD_RE.test(s)) fail(path, "a card like 5H or TD", s);
  return s;
}

function asCoord(value: unknown, path: string): Coord {
  if (!Array.isArray(value) || value.length !== 2) fail(path, "an [x, y] pair", value);
  return [asInt(value[0], `${path}[0]`, 0), asInt(value[1], `${path}[1]`, 0)];
}

function asCardList(value: unknown, path: string): string[] {
  if (!Array.isArray(value)) fail(path, "an array of cards", value);
  return value.map((c, i) => asCard(c, `${path}[${i}]`));
}

function asEnum<T extends string>(value: unknown, path: string, options: readonly T[]): T {
  const s = asString(value, path);
  if (!(options as readonly string[]).includes(s)) {
    fail(path, `one of ${options.join("/")}`, s);
  }
  return s as T;
}

function parseWelcome(raw: Record<string, unknown>): WelcomePayload {
  return {
    session_id: asString(raw.session_id, "welcome.session_id"),
    player_id: asEnum(raw.player_id, "welcome.player_id", SEATS),
    opponent: asEnum(raw.opponent, "welcome.opponent", ["agent", "human"] as const),
    width: asInt(raw.width, "welcome.width", 1),
    height: asInt(raw.height, "welcome.height", 1),
    visibility_radius: asInt(raw.visibility_radius, "welcome.visibility_radius", 0),
    move_budget: asInt(raw.move_budget, "welcome.move_budget", 1),
    pos: asCoord(raw.pos, "welcome.pos"),
    hand: asCardList(raw.hand, "welcome.hand"),
  };
}

function parseView(raw: Record<string, unknown>): ViewPayload {
  if (!Array.isArray(raw.cells)) fail("view.cells", "an array", raw.cells);
  const cells = raw.cells.map((entry, i) => {
    const cell = asRecord(entry, `view.cells[${i}]`);
    const extra = Object.keys(cell).filter((k) => !["pos", "cards", "walls"].includes(k));
    if (extra.length > 0) fail(`view.cells[${i}]`, "only pos/cards/walls", extra);
    if (!Array.isArray(cell.walls)) fail(`view.cells[${i}].walls`, "an array", cell.walls);
    return {
      pos: asCoord(cell.pos, `view.cells[${i}].pos`),
      cards: asCardList(cell.cards, `view.cells[${i}].cards`),
      walls: cell.walls.map((w, j) => asEnum(w, `view.cells[${i}].walls[${j}]`, DIRECTIONS)),
    };
  });
  return { cells };
}

const EVENT_KINDS: readonly EventKind[] = ["move_to", "pickup", "drop", "bump", "utterance"];

function parseEvent(raw: Record<string, unknown>): EventPayload {
  const kind = asEnum(raw.kind, "event.kind", EVENT_KINDS);
  const inner = asRecord(raw.payload, "event.payload");
  switch (kind) {
    case "move_to":
      asCoord(inner.pos, "event.payload.pos");
      break;
    case "pickup":
    case "drop":
      asCard(inner.card, "event.payload.card");
      break;
    case "bump":
      asEnum(inner.dir, "event.payload.dir", DIRECTIONS);
      break;
    case "utterance":
      if (asString(inner.text, "event.payload.text").length === 0) {
        fail("event.payload.text", "nonempty text", inner.text);
      }
      break;
  }
  return {
    game_seq: asInt(raw.game_seq, "event.game_seq", 1),
    actor: asEnum(raw.actor, "event.actor", SEATS),
    kind,
    payload: inner,
  };
}

function parseError(raw: Record<string, unknown>): ErrorPayload {
  return {
    code: asString(raw.code, "error.code"),
    message: asString(raw.message, "error.message"),
  };
}

function parseGameOver(raw: Record<string, unknown>): GameOverPayload {
  const straight = asCardList(raw.straight, "game_over.straight");
  if (straight.length !== 6) fail("game_over.straight", "exactly 6 cards", straight);
  return { straight };
}

/**
 * Validate one server message. Accepts the decoded JSON value (or the raw
 * string) and returns a typed envelope; throws ProtocolError on any shape
 * the server contract does not allow.
 */
export function parseEnvelope(raw: unknown): Envelope {
  const data = typeof raw === "string" ? (JSON.parse(raw) as unknown) : raw;
  const env = asRecord(data, "envelope");
  const seq = asInt(env.seq, "envelope.seq", 1);
  const type = asEnum(env.type, "envelope.type", [
    "welcome",
    "view",
    "event",
    "error",
    "game_over",
  ] as const);
  const payload = asRecord(env.payload, `${type}.payload`);
  switch (type) {
    case "welcome":
      return { type, seq, payload: parseWelcome(payload) };
    case "view":
      return { type, seq, payload: parseView(payload) };
    case "event":
      return { type, seq, payload: parseEvent(payload) };
    case "error":
      return { type, seq, payload: parseError(payload) };
    case "game_over":
      return { type, seq, payload: parseGameOver(payload) };
  }
}

/** Wrap an action payload in the client message frame the server expects. */
export function actionMessage(payload: ActionPayload): ClientMessage {
  return { type: "action", payload };
}

export function serializeAction(payload: ActionPayload): string {
  return JSON.stringify(actionMessage(payload));
}
