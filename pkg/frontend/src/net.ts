/**
 * Websocket transport with seq-resume reconnect.
 *
 * Every parsed envelope advances lastSeq; if the socket drops, the next
 * attempt asks the server for ?last_seq=N and the stream continues without
 * gaps or duplicates. The socket constructor is injectable so tests (and
 * non-browser runtimes) can supply one.
 */

import type { ActionPayload, Envelope } from "./protocol.js";
import { parseEnvelope, serializeAction } from "./protocol.js";

/** The subset of the browser WebSocket surface the client relies on. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "open" | "close" | "message",
    listener: (event: { data?: unknown }) => void,
  ): void;
}

export interface ConnectOptions {
  /** HTTP origin of the server, e.g. "http://127.0.0.1:8000". */
  baseUrl: string;
  sessionId: string;
  token: string;
  onEnvelope: (env: Envelope) => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
  /** Resume point; defaults to 0 (full stream). */
  lastSeq?: number;
  /** Reconnect automatically after unexpected closes. Default true. */
  reconnect?: boolean;
  /** Delay between reconnect attempts in ms. Default 500. */
  retryMs?: number;
  /** Socket constructor; defaults to the runtime's WebSocket. */
  makeSocket?: (url: string) => SocketLike;
}

export interface Connection {
  sendAction(payload: ActionPayload): void;
  close(): void;
  readonly lastSeq: number;
}

export function wsUrl(baseUrl: string, sessionId: string, token: string, lastSeq: number): string {
  const ws = baseUrl.replace(/^http/, "ws").replace(/\/$/, "");
  return `${ws}/sessions/${sessionId}/ws?token=${encodeURIComponent(token)}&last_seq=${lastSeq}`;
}

export function connect(opts: ConnectOptions): Connection {
  const makeSocket =
    opts.makeSocket ?? ((url: string) => new WebSocket(url) as unknown as SocketLike);
  const retryMs = opts.retryMs ?? 500;
  let lastSeq = opts.lastSeq ?? 0;
  let socket: SocketLike | null = null;
  let open = false;
  let closedByUser = false;
  const pending: string[] = [];

  function dial(): void {
    opts.onStatus?.("connecting");
    const sock = makeSocket(wsUrl(opts.baseUrl, opts.sessionId, opts.token, lastSeq));
    socket = sock;
    sock.addEventListener("open", () => {
      open = true;
      opts.onStatus?.("open");
      while (pending.length > 0) sock.send(pending.shift() as string);
    });
    sock.addEventListener("message", (event) => {
      const env = parseEnvelope(String(event.data));
      if (env.seq > lastSeq) lastSeq = env.seq;
      opts.onEnvelope(env);
    });
    sock.addEventListener("close", () => {
      open = false;
      socket = null;
      opts.onStatus?.("closed");
      if (!closedByUser && (opts.reconnect ?? true)) {
        setTimeout(dial, retryMs);
      }
    });
  }

  dial();

  return {
    sendAction(payload: ActionPayload): void {
      const frame = serializeAction(payload);
      if (open && socket !== null) {
        socket.send(frame);
      } else {
        pending.push(frame);
      }
    },
    close(): void {
      closedByUser = true;
      socket?.close();
    },
    get lastSeq(): number {
      return lastSeq;
    },
  };
}
