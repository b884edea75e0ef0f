/** Pure HTML renderers for the transcript and trace viewer.

Everything here maps API data to markup strings; no DOM access, so the
functions are unit-testable under node. All dynamic text is escaped. */

import { traceSteps } from "./diff";
import type { AnswerCategory, AskResponse, ChatTurn, ModelSummary, Trace } from "./types";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const CATEGORY_LABELS: Record<AnswerCategory, string> = {
  KnowledgeModel: "Knowledge",
  MethodTaskModel: "Method-Task",
  MultiModel: "Multi",
  Irrelevant: "Irrelevant",
  Episodic: "Episodic",
};

export function categoryLabel(category: AnswerCategory): string {
  return CATEGORY_LABELS[category] ?? category;
}

export function renderBadge(category: AnswerCategory): string {
  const label = categoryLabel(category);
  return `<span class="badge badge-${category.toLowerCase()}">${escapeHtml(label)}</span>`;
}

export function renderCitations(citedDocIds: string[]): string {
  if (citedDocIds.length === 0) return "";
  const items = citedDocIds
    .map((docId) => `<li class="citation">${escapeHtml(docId)}</li>`)
    .join("");
  const noun = citedDocIds.length === 1 ? "document" : "documents";
  return (
    `<details class="citations"><summary>${citedDocIds.length} cited ${noun}</summary>` +
    `<ul>${items}</ul></details>`
  );
}

export function renderTrace(trace: Trace, usedDefaultInitial: boolean): string {
  const steps = traceSteps(trace.events)
    .map(({ event, changes }) => {
      const transition =
        event.transition_id === null
          ? `<span class="step-transition step-initial">initial state</span>`
          : `<span class="step-transition">${escapeHtml(event.transition_id)}</span>`;
      const diff =
        changes.length === 0
          ? ""
          : `<ul class="step-diff">` +
            changes
              .map(
                (c) =>
                  `<li>${escapeHtml(c.slot)}: ${escapeHtml(String(c.before ?? "-"))}` +
                  ` &rarr; ${escapeHtml(String(c.after))}</li>`,
              )
              .join("") +
            `</ul>`;
      return (
        `<li class="trace-step">` +
        `<span class="step-state">${escapeHtml(event.state_id)}</span> ${transition}` +
        `<p class="step-note">${escapeHtml(event.note)}</p>${diff}</li>`
      );
    })
    .join("");
  const note = usedDefaultInitial
    ? `<p class="trace-note">Ran from the model&#39;s default initial state.</p>`
    : "";
  return (
    `<section class="trace"><h3>Run of ${escapeHtml(trace.task_id)}` +
    ` &middot; ${escapeHtml(trace.outcome)}</h3>${note}` +
    `<ol class="trace-steps">${steps}</ol></section>`
  );
}

function renderAnswer(turn: ChatTurn, answer: AskResponse): string {
  const trace =
    answer.category === "Episodic" && turn.trace !== null
      ? renderTrace(turn.trace, true)
      : "";
  return (
    `<div class="answer">${renderBadge(answer.category)}` +
    `<p class="answer-text">${escapeHtml(answer.text)}</p>` +
    `${renderCitations(answer.cited_doc_ids)}${trace}</div>`
  );
}

export function renderTurn(turn: ChatTurn): string {
  let body: string;
  if (turn.status === "pending") {
    body = `<div class="answer answer-pending">Thinking&hellip;</div>`;
  } else if (turn.status === "error") {
    body =
      `<div class="answer answer-error"><p>${escapeHtml(turn.error ?? "request failed")}</p>` +
      `<button class="retry" data-retry="${turn.id}">Retry</button></div>`;
  } else {
    body = renderAnswer(turn, turn.answer as AskResponse);
  }
  return (
    `<article class="turn turn-${turn.status}" data-turn="${turn.id}">` +
    `<div class="question">${escapeHtml(turn.question)}</div>${body}</article>`
  );
}

export function renderTranscript(turns: readonly ChatTurn[]): string {
  if (turns.length === 0) {
    return `<p class="empty">Ask a question to get started.</p>`;
  }
  return turns.map(renderTurn).join("");
}

export function renderModelOptions(models: ModelSummary[]): string {
  return models
    .map((m) => `<option value="${escapeHtml(m.id)}">${escapeHtml(m.title)}</option>`)
    .join("");
}
