// Application controller: owns state, talks to the gateway client, and
// re-renders after every transition. Chat turns are mirrored from the
// session history endpoint after each send, so the log always matches
// what the server would replay.

import { ApiError, GatewayClient } from "./api";
import {
  ChatState,
  SearchState,
  chatEnabled,
  chatFailed,
  chatNotice,
  chatStarted,
  chatSucceeded,
  initialChatState,
  initialSearchState,
  searchFailed,
  searchStarted,
  searchSucceeded,
  toggleFacet,
} from "./state";
import { buildShell, renderChat, renderSearch } from "./render";

export class App {
  search: SearchState = initialSearchState();
  chat: ChatState = initialChatState();

  private readonly root: HTMLElement;
  private readonly client: GatewayClient;
  private searchAbort: AbortController | null = null;
  private chatBusy = false;
  private inFlight: Promise<unknown>[] = [];

  constructor(root: HTMLElement, client: GatewayClient) {
    this.root = root;
    this.client = client;
    buildShell(root);
    this.wire();
    this.render();
  }

  /** Resolves once every request started so far has settled. */
  async whenIdle(): Promise<void> {
    while (this.inFlight.length) {
      const batch = this.inFlight;
      this.inFlight = [];
      await Promise.allSettled(batch);
    }
  }

  private track<T>(work: Promise<T>): Promise<T> {
    this.inFlight.push(work.catch(() => undefined));
    return work;
  }

  private query<T extends HTMLElement>(selector: string): T {
    const found = this.root.querySelector<T>(selector);
    if (!found) throw new Error(`missing element ${selector}`);
    return found;
  }

  private wire(): void {
    this.query<HTMLFormElement>("#search-form").addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitSearch(this.query<HTMLInputElement>("#query-input").value);
    });
    this.query<HTMLInputElement>("#query-input").addEventListener("input", () => {
      this.render();
    });
    this.query<HTMLFormElement>("#chat-form").addEventListener("submit", (event) => {
      event.preventDefault();
      const input = this.query<HTMLInputElement>("#chat-input");
      const question = input.value.trim();
      if (!question) return;
      input.value = "";
      void this.sendChat(question);
    });
    this.root.addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      const facet = target.closest<HTMLElement>(".facet-toggle");
      if (facet && facet.dataset.facet) {
        this.search = toggleFacet(this.search, facet.dataset.facet);
        this.render();
        return;
      }
      if (target.closest(".search-retry")) {
        void this.submitSearch(this.search.query);
        return;
      }
      const retry = target.closest<HTMLElement>(".chat-retry");
      if (retry && retry.dataset.question) {
        void this.sendChat(retry.dataset.question);
      }
    });
  }

  async submitSearch(rawQuery: string): Promise<void> {
    const query = rawQuery.trim();
    if (!query) return;
    this.searchAbort?.abort();
    const abort = new AbortController();
    this.searchAbort = abort;
    this.search = searchStarted(this.search, query);
    this.render();
    try {
      const payload = await this.track(this.client.search(query, abort.signal));
      if (abort.signal.aborted) return;
      this.search = searchSucceeded(this.search, payload);
      this.chat = initialChatState();
    } catch (error) {
      if (error instanceof DOMException && error.name === "AbortError") return;
      if (abort.signal.aborted) return;
      const message = error instanceof ApiError ? error.message : String(error);
      this.search = searchFailed(this.search, message);
    }
    this.render();
  }

  async sendChat(question: string): Promise<void> {
    if (!chatEnabled(this.search) || this.chatBusy) return;
    const sessionId = this.search.sessionId;
    if (sessionId === null) return;
    this.chatBusy = true;
    this.chat = chatStarted(this.chat, question);
    this.render();
    try {
      const reply = await this.track(this.client.chat(sessionId, question));
      const turns = await this.track(this.client.history(sessionId));
      if (this.search.sessionId === sessionId) {
        this.chat = chatSucceeded(this.chat, turns, reply.supporting);
      }
    } catch (error) {
      if (this.search.sessionId !== sessionId) {
        // a newer search replaced the session; drop the stale failure
      } else if (error instanceof ApiError) {
        this.chat = chatFailed(
          this.chat,
          question,
          chatNotice(error.status, error.code, error.message),
        );
      } else {
        this.chat = chatFailed(this.chat, question, String(error));
      }
    } finally {
      this.chatBusy = false;
    }
    this.render();
  }

  private render(): void {
    renderSearch(this.root, this.search);
    renderChat(this.root, this.search, this.chat);
  }
}

export function mountApp(root: HTMLElement, client: GatewayClient): App {
  return new App(root, client);
}
