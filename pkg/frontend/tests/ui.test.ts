import { beforeEach, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api";
import { App, mountApp } from "../src/app";
import { MockGateway } from "./mock";

interface Harness {
  mock: MockGateway;
  app: App;
  root: HTMLElement;
}

function setup(): Harness {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app") as HTMLElement;
  const mock = new MockGateway();
  const app = mountApp(root, new GatewayClient("", mock.fetch));
  return { mock, app, root };
}

function queryAll(root: HTMLElement, selector: string): HTMLElement[] {
  return Array.from(root.querySelectorAll<HTMLElement>(selector));
}

function textOf(root: HTMLElement, selector: string): string {
  return root.querySelector(selector)?.textContent ?? "";
}

function setInput(root: HTMLElement, selector: string, value: string): void {
  const input = root.querySelector<HTMLInputElement>(selector);
  if (!input) throw new Error(`missing input ${selector}`);
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

function submitForm(root: HTMLElement, selector: string): void {
  const form = root.querySelector<HTMLFormElement>(selector);
  if (!form) throw new Error(`missing form ${selector}`);
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

let harness: Harness;

beforeEach(() => {
  harness = setup();
});

describe("search results", () => {
  it("renders one group per facet in the response", async () => {
    const { app, root } = harness;

    await app.submitSearch("gateway");

    const groups = queryAll(root, "section.facet-group");
    expect(groups.map((g) => g.dataset.facet)).toEqual([
      "Article",
      "Dataset",
      "Person",
    ]);
    expect(queryAll(root, 'section[data-facet="Article"] .record-card')).toHaveLength(2);
    expect(queryAll(root, 'section[data-facet="Dataset"] .record-card')).toHaveLength(1);
    expect(textOf(root, "#search-meta")).toBe("4 unique records from 5 fetched");
  });

  it("renders record fields from the payload only", async () => {
    const { app, root } = harness;

    await app.submitSearch("gateway");

    const article = root.querySelector('section[data-facet="Article"]');
    expect(article?.textContent).toContain("Federated Scholarly Search Gateways");
    expect(article?.textContent).toContain("Alice Brown");
    expect(article?.textContent).toContain("10.1000/fed.1");
    const link = article?.querySelector<HTMLAnchorElement>(".record-title a");
    expect(link?.href).toBe("https://example.org/fed");
    const person = root.querySelector('section[data-facet="Person"]');
    expect(person?.querySelector(".record-title a")).toBeNull();
    expect(person?.querySelector(".record-authors")).toBeNull();
  });

  it("shows a warning badge for a failed source without blocking results", async () => {
    const { app, root } = harness;

    await app.submitSearch("gateway");

    const badges = queryAll(root, "#source-badges .badge");
    expect(badges.map((b) => b.textContent)).toEqual(["alpha (5)", "beta: error"]);
    expect(badges[1].classList.contains("warn")).toBe(true);
    expect(badges[1].title).toBe("connection refused");
    expect(queryAll(root, ".record-card").length).toBeGreaterThan(0);
    expect(root.querySelector("#search-error")?.hasAttribute("hidden")).toBe(true);
  });

  it("disables the submit button while the query is blank", () => {
    const { mock, root } = harness;
    const button = root.querySelector<HTMLButtonElement>("#search-button");

    expect(button?.disabled).toBe(true);
    setInput(root, "#query-input", "   ");
    expect(button?.disabled).toBe(true);
    submitForm(root, "#search-form");
    expect(mock.searchCalls).toBe(0);

    setInput(root, "#query-input", "ranking");
    expect(button?.disabled).toBe(false);
  });

  it("submits trimmed queries from the form", async () => {
    const { app, mock, root } = harness;

    setInput(root, "#query-input", "  neural ranking  ");
    submitForm(root, "#search-form");
    await app.whenIdle();

    expect(mock.searchCalls).toBe(1);
    expect(app.search.payload?.query).toBe("neural ranking");
  });

  it("offers a retry banner after a transport failure", async () => {
    const { app, mock, root } = harness;
    mock.networkDown = true;

    await app.submitSearch("gateway");

    const banner = root.querySelector("#search-error");
    expect(banner?.hasAttribute("hidden")).toBe(false);
    expect(banner?.textContent).toContain("could not reach the gateway");
    const retry = banner?.querySelector<HTMLButtonElement>(".search-retry");
    expect(retry).not.toBeNull();

    mock.networkDown = false;
    retry?.click();
    await app.whenIdle();

    expect(root.querySelector("#search-error")?.hasAttribute("hidden")).toBe(true);
    expect(queryAll(root, "section.facet-group")).toHaveLength(3);
  });

  it("surfaces structured server errors in the banner", async () => {
    const { app, mock, root } = harness;
    mock.failSearch = {
      status: 503,
      code: "no_sources_enabled",
      message: "no sources are enabled",
    };

    await app.submitSearch("gateway");

    expect(textOf(root, "#search-error")).toContain("no sources are enabled");
  });

  it("keeps only the newest of two overlapping searches", async () => {
    const { app, mock } = harness;
    mock.manual = true;

    void app.submitSearch("first");
    void app.submitSearch("second");
    mock.release(1);
    mock.release(0);
    await app.whenIdle();

    expect(mock.searchCalls).toBe(2);
    expect(app.search.payload?.query).toBe("second");
    expect(app.search.error).toBeNull();
  });
});

describe("facet filtering", () => {
  it("hides a toggled-off group and brings it back", async () => {
    const { app, root } = harness;
    await app.submitSearch("gateway");

    const toggle = root.querySelector<HTMLButtonElement>(
      '.facet-toggle[data-facet="Dataset"]',
    );
    toggle?.click();

    expect(root.querySelector('section[data-facet="Dataset"]')).toBeNull();
    expect(queryAll(root, "section.facet-group")).toHaveLength(2);
    expect(
      root
        .querySelector('.facet-toggle[data-facet="Dataset"]')
        ?.getAttribute("aria-pressed"),
    ).toBe("false");

    root.querySelector<HTMLButtonElement>('.facet-toggle[data-facet="Dataset"]')?.click();
    expect(queryAll(root, "section.facet-group")).toHaveLength(3);
  });

  it("shows the empty state when every facet is hidden", async () => {
    const { app, root } = harness;
    await app.submitSearch("gateway");

    for (const facet of ["Article", "Dataset", "Person"]) {
      root
        .querySelector<HTMLButtonElement>(`.facet-toggle[data-facet="${facet}"]`)
        ?.click();
    }

    expect(queryAll(root, "section.facet-group")).toHaveLength(0);
    expect(root.querySelector("#empty-state")?.hasAttribute("hidden")).toBe(false);
  });

  it("preserves hidden facets across a chat exchange", async () => {
    const { app, root } = harness;
    await app.submitSearch("gateway");
    root
      .querySelector<HTMLButtonElement>('.facet-toggle[data-facet="Article"]')
      ?.click();

    await app.sendChat("Does filtering persist?");

    expect(root.querySelector('section[data-facet="Article"]')).toBeNull();
    expect(queryAll(root, "section.facet-group")).toHaveLength(2);
  });
});

describe("chat panel", () => {
  it("stays disabled until a search creates a session", async () => {
    const { app, mock, root } = harness;
    const input = root.querySelector<HTMLInputElement>("#chat-input");

    expect(root.querySelector("#chat-panel")?.getAttribute("data-enabled")).toBe(
      "false",
    );
    expect(input?.disabled).toBe(true);
    await app.sendChat("ignored");
    expect(mock.chatCalls).toBe(0);

    await app.submitSearch("gateway");
    expect(root.querySelector("#chat-panel")?.getAttribute("data-enabled")).toBe(
      "true",
    );
    expect(root.querySelector<HTMLInputElement>("#chat-input")?.disabled).toBe(false);
  });

  it("renders the answer with supporting titles beneath it", async () => {
    const { app, root } = harness;
    await app.submitSearch("gateway");

    setInput(root, "#chat-input", "What is the Kinect corpus?");
    submitForm(root, "#chat-form");
    await app.whenIdle();

    const turns = queryAll(root, "#chat-log li.turn");
    expect(turns).toHaveLength(1);
    expect(textOf(root, ".bubble.question")).toBe("What is the Kinect corpus?");
    expect(textOf(root, ".bubble.answer")).toBe(
      "Stub answer 1 about What is the Kinect corpus?",
    );
    const supporting = queryAll(root, ".supporting li").map((n) => n.textContent);
    expect(supporting).toEqual([
      "Kinect Gesture Corpus [alpha]",
      "Federated Scholarly Search Gateways [alpha]",
    ]);
  });

  it("shows exactly five turns after six questions, matching the history API", async () => {
    const { app, mock, root } = harness;
    await app.submitSearch("gateway");

    for (let i = 1; i <= 6; i += 1) {
      await app.sendChat(`Question number ${i}?`);
    }

    const turns = queryAll(root, "#chat-log li.turn");
    expect(turns).toHaveLength(5);
    const rendered = turns.map((turn) => ({
      question: turn.querySelector(".bubble.question")?.textContent,
      answer: turn.querySelector(".bubble.answer")?.textContent,
    }));
    expect(rendered[0].question).toBe("Question number 2?");
    expect(rendered[4].question).toBe("Question number 6?");

    const served = await new GatewayClient("", mock.fetch).history("sess-1");
    expect(JSON.stringify(rendered)).toBe(JSON.stringify(served));
  });

  it("notices an oversized prompt and keeps the question retriable", async () => {
    const { app, mock, root } = harness;
    await app.submitSearch("gateway");
    mock.failChat = {
      status: 413,
      code: "prompt_too_large",
      message: "prompt exceeds the model context limit",
    };

    await app.sendChat("A very long question");

    expect(textOf(root, "#chat-notice")).toContain("too large");
    const failed = root.querySelector("#chat-log li.turn.failed");
    expect(failed?.textContent).toContain("A very long question");
    expect(failed?.querySelector(".chat-retry")).not.toBeNull();
  });

  it("hints at a new search when the session has expired", async () => {
    const { app, mock, root } = harness;
    await app.submitSearch("gateway");
    mock.failChat = {
      status: 404,
      code: "session_not_found",
      message: "unknown session id",
    };

    await app.sendChat("Anyone home?");

    expect(textOf(root, "#chat-notice")).toContain("new search");
  });

  it("marks a question failed on network loss and retries it", async () => {
    const { app, mock, root } = harness;
    await app.submitSearch("gateway");
    mock.chatNetworkDown = true;

    await app.sendChat("Will this arrive?");

    expect(textOf(root, "#chat-notice")).toContain("retry");
    expect(queryAll(root, "#chat-log li.turn.pending")).toHaveLength(0);
    const retry = root.querySelector<HTMLButtonElement>(".chat-retry");
    expect(retry?.dataset.question).toBe("Will this arrive?");

    mock.chatNetworkDown = false;
    retry?.click();
    await app.whenIdle();

    expect(root.querySelector("#chat-log li.turn.failed")).toBeNull();
    expect(textOf(root, ".bubble.answer")).toContain("Will this arrive?");
    expect(mock.turns).toHaveLength(1);
  });

  it("allows only one in-flight question per session", async () => {
    const { app, mock, root } = harness;
    await app.submitSearch("gateway");
    mock.manual = true;

    void app.sendChat("first question");
    void app.sendChat("second question");

    expect(queryAll(root, "#chat-log li.turn.pending")).toHaveLength(1);
    mock.release(0);
    await app.whenIdle();

    expect(mock.chatCalls).toBe(1);
    expect(mock.turns.map((t) => t.question)).toEqual(["first question"]);

    mock.manual = false;
    await app.sendChat("third question");
    expect(mock.turns.map((t) => t.question)).toEqual([
      "first question",
      "third question",
    ]);
  });

  it("clears the conversation when a new search starts a session", async () => {
    const { app, root } = harness;
    await app.submitSearch("gateway");
    await app.sendChat("Remember me?");
    expect(queryAll(root, "#chat-log li.turn")).toHaveLength(1);

    await app.submitSearch("another topic");

    expect(queryAll(root, "#chat-log li.turn")).toHaveLength(0);
    expect(root.querySelector("#chat-panel")?.getAttribute("data-enabled")).toBe(
      "true",
    );
  });
});
