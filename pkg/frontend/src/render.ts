// DOM rendering. A static shell is built once; the dynamic regions are
// re-rendered from state. All text lands via textContent, so record
// fields are never interpreted as markup.

import type { RecordCard, SourceStatus } from "./api";
import type { ChatState, SearchState } from "./state";
import { chatEnabled, visibleGroups } from "./state";

export function buildShell(root: HTMLElement): void {
  root.innerHTML = `
    <header class="masthead">
      <h1>Scholarly Gateway</h1>
      <form id="search-form">
        <input id="query-input" type="text" placeholder="Search all sources"
               autocomplete="off" aria-label="Search query">
        <button id="search-button" type="submit" disabled>Search</button>
      </form>
      <div id="search-error" hidden></div>
      <div id="search-meta" hidden></div>
      <div id="source-badges"></div>
      <div id="facet-toggles"></div>
    </header>
    <main>
      <div id="result-groups"></div>
      <p id="empty-state" hidden>No groups to show.</p>
    </main>
    <aside id="chat-panel" data-enabled="false">
      <h2>Ask about these results</h2>
      <p id="chat-hint">Search first to start a conversation.</p>
      <ol id="chat-log"></ol>
      <div id="chat-notice" hidden></div>
      <form id="chat-form">
        <input id="chat-input" type="text" placeholder="Ask a question"
               autocomplete="off" aria-label="Chat question" disabled>
        <button id="chat-button" type="submit" disabled>Send</button>
      </form>
    </aside>
  `;
}

function byId<T extends HTMLElement>(root: HTMLElement, id: string): T {
  const found = root.querySelector<T>(`#${id}`);
  if (!found) throw new Error(`missing shell element #${id}`);
  return found;
}

function text(tag: string, className: string, content: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  node.textContent = content;
  return node;
}

function sourceBadge(status: SourceStatus): HTMLElement {
  const ok = status.status === "ok";
  const badge = text(
    "span",
    ok ? "badge ok" : "badge warn",
    ok ? `${status.id} (${status.records})` : `${status.id}: ${status.status}`,
  );
  if (!ok && status.message) badge.title = status.message;
  return badge;
}

function recordCard(record: RecordCard): HTMLElement {
  const card = document.createElement("article");
  card.className = "record-card";

  const title = document.createElement("h3");
  title.className = "record-title";
  if (record.url) {
    const link = document.createElement("a");
    link.href = record.url;
    link.textContent = record.title;
    title.appendChild(link);
  } else {
    title.textContent = record.title;
  }
  card.appendChild(title);

  if (record.authors.length) {
    card.appendChild(text("p", "record-authors", record.authors.join(", ")));
  }
  const meta = [record.date, record.doi].filter((v): v is string => Boolean(v));
  if (meta.length) {
    card.appendChild(text("p", "record-meta", meta.join(" · ")));
  }
  if (record.abstract) {
    card.appendChild(text("p", "record-abstract", record.abstract));
  }
  const sources = document.createElement("p");
  sources.className = "record-sources";
  for (const source of record.sources) {
    sources.appendChild(text("span", "badge", source));
  }
  card.appendChild(sources);
  return card;
}

export function renderSearch(root: HTMLElement, state: SearchState): void {
  const button = byId<HTMLButtonElement>(root, "search-button");
  const input = byId<HTMLInputElement>(root, "query-input");
  button.disabled = state.loading || input.value.trim() === "";

  const error = byId(root, "search-error");
  error.hidden = state.error === null;
  error.innerHTML = "";
  if (state.error !== null) {
    error.className = "banner error";
    error.appendChild(text("span", "", state.error));
    const retry = text("button", "search-retry", "Retry");
    retry.setAttribute("type", "button");
    error.appendChild(retry);
  }

  const meta = byId(root, "search-meta");
  const badges = byId(root, "source-badges");
  const toggles = byId(root, "facet-toggles");
  const groups = byId(root, "result-groups");
  const empty = byId(root, "empty-state");
  badges.innerHTML = "";
  toggles.innerHTML = "";
  groups.innerHTML = "";

  if (!state.payload) {
    meta.hidden = true;
    empty.hidden = true;
    return;
  }

  meta.hidden = false;
  meta.textContent =
    `${state.payload.unique_records} unique records` +
    ` from ${state.payload.total_records} fetched`;

  for (const status of state.payload.sources) {
    badges.appendChild(sourceBadge(status));
  }

  for (const facet of Object.keys(state.payload.groups)) {
    const toggle = text("button", "facet-toggle", facet);
    toggle.setAttribute("type", "button");
    toggle.dataset.facet = facet;
    toggle.setAttribute(
      "aria-pressed",
      state.hiddenFacets.includes(facet) ? "false" : "true",
    );
    toggles.appendChild(toggle);
  }

  const visible = visibleGroups(state);
  for (const [facet, records] of visible) {
    const section = document.createElement("section");
    section.className = "facet-group";
    section.dataset.facet = facet;
    section.appendChild(text("h2", "", `${facet} (${records.length})`));
    for (const record of records) {
      section.appendChild(recordCard(record));
    }
    groups.appendChild(section);
  }
  empty.hidden = visible.length > 0;
}

export function renderChat(
  root: HTMLElement,
  search: SearchState,
  chat: ChatState,
): void {
  const enabled = chatEnabled(search);
  const panel = byId(root, "chat-panel");
  panel.dataset.enabled = String(enabled);
  byId(root, "chat-hint").hidden = enabled;
  const input = byId<HTMLInputElement>(root, "chat-input");
  const button = byId<HTMLButtonElement>(root, "chat-button");
  input.disabled = !enabled;
  button.disabled = !enabled || chat.pending !== null;

  const log = byId(root, "chat-log");
  log.innerHTML = "";
  chat.turns.forEach((turn, index) => {
    const item = document.createElement("li");
    item.className = "turn";
    item.appendChild(text("p", "bubble question", turn.question));
    item.appendChild(text("p", "bubble answer", turn.answer));
    if (index === chat.turns.length - 1 && chat.supporting.length) {
      const docs = document.createElement("ul");
      docs.className = "supporting";
      for (const doc of chat.supporting) {
        docs.appendChild(text("li", "", `${doc.title} [${doc.sources.join(", ")}]`));
      }
      item.appendChild(docs);
    }
    log.appendChild(item);
  });
  if (chat.pending !== null) {
    const item = document.createElement("li");
    item.className = "turn pending";
    item.appendChild(text("p", "bubble question", chat.pending));
    item.appendChild(text("p", "bubble answer waiting", "…"));
    log.appendChild(item);
  }
  if (chat.failed !== null) {
    const item = document.createElement("li");
    item.className = "turn failed";
    item.appendChild(text("p", "bubble question", chat.failed));
    const retry = text("button", "chat-retry", "Retry");
    retry.setAttribute("type", "button");
    retry.dataset.question = chat.failed;
    item.appendChild(retry);
    log.appendChild(item);
  }

  const notice = byId(root, "chat-notice");
  notice.hidden = chat.notice === null;
  notice.textContent = chat.notice ?? "";
}
