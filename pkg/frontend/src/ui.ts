// DOM rendering. Suggestions and compiler messages are always inserted as
// text nodes, and nothing is ever written into the editor programmatically:
// applying the advice is the student's job.

import type { ProblemSummary, SessionRound } from "./api.js";
import type { SessionState } from "./state.js";

export interface Handlers {
  onSelectProblem(problemId: string): void;
  onSubmit(): void;
  onRetry(): void;
  onReopen(): void;
}

export function buildSkeleton(root: HTMLElement, handlers: Handlers): void {
  root.innerHTML = `
    <header class="topbar">
      <h1>DebugTA</h1>
      <select id="problem-select" aria-label="problem"></select>
    </header>
    <main class="columns">
      <section class="pane">
        <h2 id="problem-title"></h2>
        <p id="problem-statement" class="statement"></p>
        <div class="editor-wrap">
          <pre id="line-numbers" class="line-numbers">1</pre>
          <textarea id="editor" spellcheck="false" aria-label="code editor"></textarea>
        </div>
        <div class="submit-row">
          <button id="submit-btn" type="button">Submit</button>
          <button id="reopen-btn" type="button" class="hidden">Reopen editor</button>
          <span id="status" class="status"></span>
        </div>
        <div id="error-banner" class="banner hidden">
          <span id="error-text"></span>
          <button id="retry-btn" type="button">Retry</button>
        </div>
      </section>
      <section class="pane">
        <h2>Rounds</h2>
        <ol id="timeline" class="timeline"></ol>
      </section>
    </main>
  `;
  byId<HTMLSelectElement>(root, "problem-select").addEventListener("change", (event) => {
    handlers.onSelectProblem((event.target as HTMLSelectElement).value);
  });
  byId<HTMLButtonElement>(root, "submit-btn").addEventListener("click", () => handlers.onSubmit());
  byId<HTMLButtonElement>(root, "retry-btn").addEventListener("click", () => handlers.onRetry());
  byId<HTMLButtonElement>(root, "reopen-btn").addEventListener("click", () => handlers.onReopen());
  const editor = byId<HTMLTextAreaElement>(root, "editor");
  editor.addEventListener("input", () => syncLineNumbers(root));
}

export function byId<T extends HTMLElement>(root: HTMLElement, id: string): T {
  const node = root.querySelector(`#${id}`);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

export function syncLineNumbers(root: HTMLElement): void {
  const editor = byId<HTMLTextAreaElement>(root, "editor");
  const count = editor.value.split("\n").length;
  const numbers = Array.from({ length: count }, (_, i) => String(i + 1)).join("\n");
  byId<HTMLPreElement>(root, "line-numbers").textContent = numbers;
}

export function renderProblems(
  root: HTMLElement,
  problems: ProblemSummary[],
  selected: string | null,
): void {
  const select = byId<HTMLSelectElement>(root, "problem-select");
  select.innerHTML = "";
  for (const problem of problems) {
    const option = document.createElement("option");
    option.value = problem.id;
    option.textContent = `${problem.id}: ${problem.title}`;
    option.selected = problem.id === selected;
    select.appendChild(option);
  }
}

export function renderStatement(root: HTMLElement, problem: ProblemSummary | null): void {
  byId(root, "problem-title").textContent = problem ? problem.title : "";
  byId(root, "problem-statement").textContent = problem ? problem.statement : "";
}

function scoreBadge(round: SessionRound): HTMLElement {
  const badge = document.createElement("span");
  badge.className = round.ac_all ? "badge pass" : "badge fail";
  badge.textContent = `${round.ac_rate.toFixed(2)}%`;
  return badge;
}

export function renderTimeline(root: HTMLElement, rounds: SessionRound[]): void {
  const timeline = byId<HTMLOListElement>(root, "timeline");
  timeline.innerHTML = "";
  for (const round of rounds) {
    const item = document.createElement("li");
    item.className = "round";

    const head = document.createElement("div");
    head.className = "round-head";
    const label = document.createElement("strong");
    label.textContent = `Round ${round.round}`;
    head.appendChild(label);
    head.appendChild(scoreBadge(round));
    item.appendChild(head);

    if (round.compile_report_messages) {
      const compile = document.createElement("pre");
      compile.className = "compile-messages";
      compile.textContent = round.compile_report_messages;
      item.appendChild(compile);
    }

    if (round.suggestions.length > 0) {
      const list = document.createElement("ul");
      list.className = "suggestions";
      for (const text of round.suggestions) {
        const card = document.createElement("li");
        card.className = "suggestion-card";
        card.textContent = text;
        list.appendChild(card);
      }
      item.appendChild(list);
    }
    timeline.appendChild(item);
  }
}

export function renderState(root: HTMLElement, state: SessionState): void {
  const submit = byId<HTMLButtonElement>(root, "submit-btn");
  submit.disabled = state.inflight || state.editorLocked;
  const editor = byId<HTMLTextAreaElement>(root, "editor");
  editor.disabled = state.editorLocked;
  byId<HTMLButtonElement>(root, "reopen-btn").classList.toggle("hidden", !state.solved);

  const status = byId(root, "status");
  if (state.inflight) {
    status.textContent = "Judging…";
    status.className = "status";
  } else if (state.solved) {
    status.textContent = "All tests passed";
    status.className = "status solved";
  } else if (state.rounds.length > 0) {
    const last = state.rounds[state.rounds.length - 1];
    status.textContent = `Last score: ${last.ac_rate.toFixed(2)}%`;
    status.className = "status";
  } else {
    status.textContent = "";
    status.className = "status";
  }

  const banner = byId(root, "error-banner");
  banner.classList.toggle("hidden", state.error === null);
  byId(root, "error-text").textContent = state.error ?? "";

  renderTimeline(root, state.rounds);
}
