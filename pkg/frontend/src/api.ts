// Typed client for the gateway JSON API. Every shape here mirrors a
// server payload; the UI renders nothing it did not receive.

export interface SourceStatus {
  id: string;
  status: "ok" | "timeout" | "error";
  latency_seconds: number;
  records: number;
  message: string;
}

export interface RecordCard {
  facet: string;
  title: string;
  authors: string[];
  date: string | null;
  doi: string | null;
  url: string | null;
  abstract: string | null;
  sources: string[];
}

export interface SearchPayload {
  session_id: string;
  query: string;
  groups: Record<string, RecordCard[]>;
  sources: SourceStatus[];
  latency_seconds: number;
  total_records: number;
  unique_records: number;
  skipped_records: number;
}

export interface SupportingDoc {
  title: string;
  sources: string[];
}

export interface ChatPayload {
  session_id: string;
  answer: string;
  supporting: SupportingDoc[];
  history_len: number;
}

export interface HistoryTurn {
  question: string;
  answer: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let code = "http_error";
  let message = `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as { code?: string; message?: string };
    if (body.code) code = body.code;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(response.status, code, message);
}

export class GatewayClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly base = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError(0, "network", `could not reach the gateway: ${String(err)}`);
    }
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  search(query: string, signal?: AbortSignal): Promise<SearchPayload> {
    return this.request<SearchPayload>("/search", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query }),
      signal,
    });
  }

  chat(sessionId: string, question: string): Promise<ChatPayload> {
    return this.request<ChatPayload>("/chat", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ session_id: sessionId, question }),
    });
  }

  history(sessionId: string): Promise<HistoryTurn[]> {
    return this.request<HistoryTurn[]>(`/sessions/${sessionId}/history`);
  }

  health(): Promise<{ status: string; sources: Record<string, boolean> }> {
    return this.request("/health");
  }
}
