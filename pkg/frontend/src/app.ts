// Wires the API client, the session state, and the DOM together.

import { ApiClient, ApiError, ProblemSummary } from "./api.js";
import {
  SessionState,
  initialState,
  reopenEditor,
  selectProblem,
  submitFailed,
  submitStarted,
  submitSucceeded,
} from "./state.js";
import { buildSkeleton, byId, renderProblems, renderState, renderStatement, syncLineNumbers } from "./ui.js";

export class AppController {
  state: SessionState = initialState();
  problems: ProblemSummary[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async init(): Promise<void> {
    buildSkeleton(this.root, {
      onSelectProblem: (id) => this.handleSelect(id),
      onSubmit: () => void this.handleSubmit(),
      onRetry: () => void this.handleSubmit(),
      onReopen: () => this.handleReopen(),
    });
    this.problems = await this.api.listProblems();
    const first = this.problems[0]?.id ?? null;
    this.state = first ? selectProblem(this.state, first) : this.state;
    renderProblems(this.root, this.problems, first);
    renderStatement(this.root, this.problems[0] ?? null);
    renderState(this.root, this.state);
    syncLineNumbers(this.root);
  }

  handleSelect(problemId: string): void {
    this.state = selectProblem(this.state, problemId);
    const problem = this.problems.find((p) => p.id === problemId) ?? null;
    renderStatement(this.root, problem);
    byId<HTMLTextAreaElement>(this.root, "editor").value = "";
    syncLineNumbers(this.root);
    renderState(this.root, this.state);
  }

  async handleSubmit(): Promise<void> {
    const problemId = this.state.problemId;
    if (this.state.inflight || problemId === null) {
      return;
    }
    const code = byId<HTMLTextAreaElement>(this.root, "editor").value;
    this.state = submitStarted(this.state);
    renderState(this.root, this.state);
    try {
      const result = this.state.sessionId
        ? await this.api.submit(this.state.sessionId, code)
        : await this.api.createSession(problemId, code);
      // the timeline always mirrors the server's own history
      const history = await this.api.getSession(result.session_id);
      this.state = submitSucceeded(
        this.state,
        result.session_id,
        history.solved,
        history.rounds,
      );
    } catch (err) {
      const message = err instanceof ApiError ? err.message : String(err);
      const retryable = err instanceof ApiError ? err.retryable : false;
      this.state = submitFailed(this.state, message, retryable);
    }
    renderState(this.root, this.state);
  }

  handleReopen(): void {
    this.state = reopenEditor(this.state);
    renderState(this.root, this.state);
  }
}

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (root) {
    const controller = new AppController(new ApiClient(), root);
    void controller.init();
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap();
}
