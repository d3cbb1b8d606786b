/**
 * Browser entry point: bootstrap a session over HTTP, then stream
 * envelopes over the websocket, folding each one into ClientState and
 * re-rendering. All interaction goes through input.ts mappings and
 * conn.sendAction; the server is the sole authority on game rules.
 */

import { cellClickToAction, chatToAction, handChipToAction, keyToAction } from "./input.js";
import type { Connection } from "./net.js";
import { connect } from "./net.js";
import type { ActionPayload } from "./protocol.js";
import type { ClientState } from "./state.js";
import { initialState, reduce } from "./state.js";
import { mountFrom, render } from "./render.js";

interface Bootstrap {
  session_id: string;
  player_id: string;
  token: string;
}

async function createSession(baseUrl: string): Promise<Bootstrap> {
  const resp = await fetch(`${baseUrl}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ opponent: "agent" }),
  });
  if (!resp.ok) throw new Error(`create failed: HTTP ${resp.status}`);
  return (await resp.json()) as Bootstrap;
}

async function joinSession(baseUrl: string, sessionId: string): Promise<Bootstrap> {
  const resp = await fetch(`${baseUrl}/sessions/${sessionId}/join`, { method: "POST" });
  if (!resp.ok) throw new Error(`join failed: HTTP ${resp.status}`);
  return (await resp.json()) as Bootstrap;
}

function start(doc: Document, baseUrl: string, boot: Bootstrap): void {
  const mount = mountFrom(doc);
  let state: ClientState = initialState;
  const repaint = (): void => render(doc, mount, state);

  const conn: Connection = connect({
    baseUrl,
    sessionId: boot.session_id,
    token: boot.token,
    onEnvelope: (env) => {
      state = reduce(state, env);
      repaint();
    },
    onStatus: (status) => {
      mount.status.dataset.link = status;
    },
  });

  const send = (action: ActionPayload | null): void => {
    if (action !== null) conn.sendAction(action);
  };

  doc.addEventListener("keydown", (event) => {
    if ((event.target as HTMLElement | null)?.tagName === "INPUT") return;
    const action = keyToAction(event.key);
    if (action !== null) {
      event.preventDefault();
      send(action);
    }
  });

  mount.board.addEventListener("click", (event) => {
    const cell = (event.target as HTMLElement | null)?.closest<HTMLElement>(".cell");
    if (!cell || cell.dataset.x === undefined || cell.dataset.y === undefined) return;
    send(cellClickToAction(state, Number(cell.dataset.x), Number(cell.dataset.y)));
  });

  mount.hand.addEventListener("click", (event) => {
    const chip = (event.target as HTMLElement | null)?.closest<HTMLElement>(".hand-chip");
    if (chip?.dataset.card) send(handChipToAction(chip.dataset.card));
  });

  const form = doc.getElementById("say") as HTMLFormElement;
  const box = doc.getElementById("say-text") as HTMLInputElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    send(chatToAction(box.value));
    box.value = "";
  });

  const setup = doc.getElementById("setup");
  setup?.classList.add("hidden");
  doc.getElementById("game")?.classList.remove("hidden");
  const share = doc.getElementById("share");
  if (share) share.textContent = `session ${boot.session_id} (seat ${boot.player_id})`;
  repaint();
}

export function wireSetup(doc: Document): void {
  const serverBox = doc.getElementById("server") as HTMLInputElement;
  const sessionBox = doc.getElementById("session") as HTMLInputElement;
  const note = doc.getElementById("setup-note") as HTMLElement;
  serverBox.value = serverBox.value || doc.location.origin;

  const params = new URLSearchParams(doc.location.search);
  if (params.has("server")) serverBox.value = params.get("server") as string;
  if (params.has("session")) sessionBox.value = params.get("session") as string;

  const go = async (boot: Promise<Bootstrap>): Promise<void> => {
    note.textContent = "";
    try {
      start(doc, serverBox.value.replace(/\/$/, ""), await boot);
    } catch (err) {
      note.textContent = String(err);
    }
  };

  doc.getElementById("create")?.addEventListener("click", () => {
    void go(createSession(serverBox.value.replace(/\/$/, "")));
  });
  doc.getElementById("join")?.addEventListener("click", () => {
    void go(joinSession(serverBox.value.replace(/\/$/, ""), sessionBox.value.trim()));
  });
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", () => wireSetup(document));
}
