// Typed client for the session service. Only the documented endpoints are
// used; every response is JSON.

export interface ProblemSummary {
  id: string;
  title: string;
  statement: string;
}

export interface RoundResult {
  session_id: string;
  solved: boolean;
  round: number;
  compile_report_messages: string;
  ac_rate: number;
  ac_all: boolean;
  suggestions: string[];
}

export interface SessionRound {
  round: number;
  submitted_code: string;
  compile_report_messages: string;
  ac_rate: number;
  ac_all: boolean;
  suggestions: string[];
}

export interface SessionHistory {
  session_id: string;
  problem_id: string;
  solved: boolean;
  round_count: number;
  rounds: SessionRound[];
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly retryable: boolean,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ApiError(`network failure: ${String(err)}`, 0, true);
  }
  if (!response.ok) {
    let detail = `HTTP ${response.status}`;
    let retryable = response.status >= 502;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "object" && body.detail !== null) {
        detail = body.detail.error ?? JSON.stringify(body.detail);
        retryable = Boolean(body.detail.retryable) || retryable;
      } else if (body && body.detail !== undefined) {
        detail = String(body.detail);
      }
    } catch {
      // keep the status text
    }
    throw new ApiError(detail, response.status, retryable);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  listProblems(): Promise<ProblemSummary[]> {
    return request(`${this.baseUrl}/api/problems`);
  }

  createSession(problemId: string, code: string): Promise<RoundResult> {
    return request(`${this.baseUrl}/api/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ problem_id: problemId, code }),
    });
  }

  submit(sessionId: string, code: string): Promise<RoundResult> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/submit`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ code }),
    });
  }

  getSession(sessionId: string): Promise<SessionHistory> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}`);
  }
}
