/**
 * DOM projection of ClientState. render() rebuilds the dynamic regions
 * from scratch on every call; all interactivity is wired once in main.ts
 * via event delegation on stable containers, so nothing here holds state.
 */

import type { ClientState, KnownCell } from "./state.js";
import { cellKey } from "./state.js";

function el(doc: Document, tag: string, className?: string, text?: string): HTMLElement {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function isWinningCard(state: ClientState, card: string): boolean {
  return state.straight !== null && state.straight.includes(card);
}

function renderCell(
  doc: Document,
  state: ClientState,
  x: number,
  y: number,
  known: KnownCell | undefined,
): HTMLElement {
  const cell = el(doc, "div", known ? "cell" : "cell fog");
  cell.dataset.x = String(x);
  cell.dataset.y = String(y);
  if (known) {
    for (const wall of known.walls) cell.classList.add(`wall-${wall}`);
    for (const card of known.cards) {
      const chip = el(doc, "span", "card", card);
      if (isWinningCard(state, card)) chip.classList.add("win");
      cell.appendChild(chip);
    }
  }
  if (state.pos !== null && state.pos[0] === x && state.pos[1] === y) {
    cell.classList.add("me");
    if (state.bump !== null) cell.classList.add(`bumped-${state.bump.dir}`);
    cell.appendChild(el(doc, "span", "pawn", state.playerId ?? ""));
  }
  return cell;
}

function renderBoard(doc: Document, root: HTMLElement, state: ClientState): void {
  root.replaceChildren();
  root.style.gridTemplateColumns = `repeat(${state.width}, var(--cell))`;
  for (let y = 0; y < state.height; y += 1) {
    for (let x = 0; x < state.width; x += 1) {
      root.appendChild(renderCell(doc, state, x, y, state.cells[cellKey(x, y)]));
    }
  }
}

function renderHand(doc: Document, root: HTMLElement, state: ClientState): void {
  root.replaceChildren();
  for (const card of state.hand) {
    const chip = el(doc, "button", "card hand-chip", card);
    chip.dataset.card = card;
    chip.title = `drop ${card} here`;
    if (isWinningCard(state, card)) chip.classList.add("win");
    root.appendChild(chip);
  }
}

function renderChat(doc: Document, root: HTMLElement, state: ClientState): void {
  root.replaceChildren();
  for (const line of state.chat) {
    const row = el(doc, "div", "chat-line");
    const who = line.actor === state.playerId ? "you" : line.actor;
    row.appendChild(el(doc, "span", `speaker ${line.actor}`, who));
    row.appendChild(el(doc, "span", "text", line.text));
    root.appendChild(row);
  }
  root.scrollTop = root.scrollHeight;
}

function renderToasts(doc: Document, root: HTMLElement, state: ClientState): void {
  root.replaceChildren();
  // Only the most recent few rejections are worth screen space.
  for (const toast of state.toasts.slice(-3)) {
    root.appendChild(el(doc, "div", "toast", `${toast.code}: ${toast.message}`));
  }
}

function renderStatus(doc: Document, root: HTMLElement, state: ClientState): void {
  root.replaceChildren();
  if (state.playerId === null) {
    root.appendChild(el(doc, "span", "", "connecting..."));
    return;
  }
  root.appendChild(el(doc, "span", "seat", `${state.playerId} vs ${state.opponent}`));
  if (state.straight !== null) {
    root.appendChild(el(doc, "span", "over", `game over: ${state.straight.join(" ")}`));
  }
}

export interface Mount {
  board: HTMLElement;
  hand: HTMLElement;
  chat: HTMLElement;
  toasts: HTMLElement;
  status: HTMLElement;
}

export function mountFrom(doc: Document): Mount {
  const get = (id: string): HTMLElement => {
    const node = doc.getElementById(id);
    if (node === null) throw new Error(`missing #${id} in page`);
    return node;
  };
  return {
    board: get("board"),
    hand: get("hand"),
    chat: get("chat"),
    toasts: get("toasts"),
    status: get("status"),
  };
}

export function render(doc: Document, mount: Mount, state: ClientState): void {
  renderStatus(doc, mount.status, state);
  renderBoard(doc, mount.board, state);
  renderHand(doc, mount.hand, state);
  renderChat(doc, mount.chat, state);
  renderToasts(doc, mount.toasts, state);
}
