// Pure view-state transitions, kept free of DOM and transport concerns
// so they can be exercised directly in tests.

import type { HistoryTurn, SearchPayload, SupportingDoc } from "./api";

export interface SearchState {
  query: string;
  sessionId: string | null;
  payload: SearchPayload | null;
  loading: boolean;
  error: string | null;
  hiddenFacets: string[];
}

export interface ChatState {
  // server-confirmed turns, mirrored from the history endpoint
  turns: HistoryTurn[];
  supporting: SupportingDoc[];
  pending: string | null;
  failed: string | null;
  notice: string | null;
}

export function initialSearchState(): SearchState {
  return {
    query: "",
    sessionId: null,
    payload: null,
    loading: false,
    error: null,
    hiddenFacets: [],
  };
}

export function initialChatState(): ChatState {
  return { turns: [], supporting: [], pending: null, failed: null, notice: null };
}

export function searchStarted(state: SearchState, query: string): SearchState {
  return { ...state, query, loading: true, error: null };
}

export function searchSucceeded(state: SearchState, payload: SearchPayload): SearchState {
  return {
    ...state,
    sessionId: payload.session_id,
    payload,
    loading: false,
    error: null,
    hiddenFacets: [],
  };
}

export function searchFailed(state: SearchState, message: string): SearchState {
  return { ...state, loading: false, error: message };
}

export function toggleFacet(state: SearchState, facet: string): SearchState {
  const hidden = state.hiddenFacets.includes(facet)
    ? state.hiddenFacets.filter((f) => f !== facet)
    : [...state.hiddenFacets, facet];
  return { ...state, hiddenFacets: hidden };
}

export function visibleGroups(state: SearchState): [string, SearchPayload["groups"][string]][] {
  if (!state.payload) return [];
  return Object.entries(state.payload.groups).filter(
    ([facet]) => !state.hiddenFacets.includes(facet),
  );
}

export function chatEnabled(state: SearchState): boolean {
  return state.sessionId !== null;
}

export function chatStarted(state: ChatState, question: string): ChatState {
  return { ...state, pending: question, failed: null, notice: null };
}

export function chatSucceeded(
  state: ChatState,
  turns: HistoryTurn[],
  supporting: SupportingDoc[],
): ChatState {
  return { ...state, turns, supporting, pending: null, failed: null, notice: null };
}

export function chatFailed(state: ChatState, question: string, notice: string): ChatState {
  return { ...state, pending: null, failed: question, notice };
}

export function chatNotice(status: number, code: string, message: string): string {
  if (status === 413 || code === "prompt_too_large") {
    return "Question or context too large for the model. Try a shorter question.";
  }
  if (status === 404 || code === "session_not_found") {
    return "This session has expired. Run a new search to start another one.";
  }
  if (status === 0) {
    return "Could not reach the gateway. The question was not sent; retry below.";
  }
  return message;
}
