// Session view state and its transitions, kept pure for testability.

import type { SessionRound } from "./api.js";

export interface SessionState {
  problemId: string | null;
  sessionId: string | null;
  rounds: SessionRound[];
  inflight: boolean;
  solved: boolean;
  editorLocked: boolean;
  error: string | null;
  errorRetryable: boolean;
}

export function initialState(): SessionState {
  return {
    problemId: null,
    sessionId: null,
    rounds: [],
    inflight: false,
    solved: false,
    editorLocked: false,
    error: null,
    errorRetryable: false,
  };
}

export function selectProblem(state: SessionState, problemId: string): SessionState {
  // picking a problem starts a fresh session view
  return { ...initialState(), problemId };
}

export function submitStarted(state: SessionState): SessionState {
  return { ...state, inflight: true, error: null, errorRetryable: false };
}

export function submitSucceeded(
  state: SessionState,
  sessionId: string,
  solved: boolean,
  rounds: SessionRound[],
): SessionState {
  return {
    ...state,
    inflight: false,
    sessionId,
    solved,
    editorLocked: solved,
    rounds, // always the server's history, never a local accumulation
    error: null,
    errorRetryable: false,
  };
}

export function submitFailed(
  state: SessionState,
  message: string,
  retryable: boolean,
): SessionState {
  // the editor buffer lives in the DOM and is deliberately untouched here
  return { ...state, inflight: false, error: message, errorRetryable: retryable };
}

export function reopenEditor(state: SessionState): SessionState {
  return { ...state, editorLocked: false };
}
