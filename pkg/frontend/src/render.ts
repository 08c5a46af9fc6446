import { escapeHtml } from "./html.js";
import type { QueueState } from "./review.js";
import type { DriftReport, ReviewItem } from "./types.js";

function card(item: ReviewItem, focused: boolean): string {
  const [a, b] = item.candidates;
  const iteration =
    item.iteration !== undefined
      ? `<span class="iteration">prompt iteration ${item.iteration}</span>`
      : "";
  const reasoning = item.raw_response
    ? `<details class="reasoning"><summary>model response</summary>` +
      `<pre>${escapeHtml(item.raw_response)}</pre></details>`
    : "";
  return (
    `<article class="card${focused ? " focused" : ""}" data-doc-id="${escapeHtml(item.doc_id)}">` +
    `<p class="doc-text">${escapeHtml(item.text)}</p>${iteration}` +
    `<div class="choices">` +
    `<button data-doc-id="${escapeHtml(item.doc_id)}" data-winner="${escapeHtml(a)}">${escapeHtml(a)}</button>` +
    `<button data-doc-id="${escapeHtml(item.doc_id)}" data-winner="${escapeHtml(b)}">${escapeHtml(b)}</button>` +
    `</div>${reasoning}</article>`
  );
}

/** Render the review queue. Items appear in queue order with the first card
 * focused; an empty queue shows an explicit empty state; errors render a
 * banner with a retry button instead of silently dropping. */
export function renderQueue(state: QueueState): string {
  const parts: string[] = [];
  if (state.error) {
    parts.push(
      `<div class="banner error">${escapeHtml(state.error)} ` +
        `<button data-action="retry">retry</button></div>`,
    );
  }
  if (state.status === "loading") {
    parts.push(`<p class="loading">loading…</p>`);
  } else if (state.items.length === 0) {
    parts.push(`<p class="empty-state">no items to review</p>`);
  } else {
    parts.push(
      ...state.items.map((item, index) => card(item, index === 0)),
    );
  }
  for (const docId of state.alreadyReviewed) {
    parts.push(
      `<p class="notice">${escapeHtml(docId)} was already reviewed</p>`,
    );
  }
  return `<section class="queue">${parts.join("")}</section>`;
}

export function renderDrift(report: DriftReport): string {
  return (
    `<section class="drift"><span class="badge badge-${escapeHtml(report.verdict)}">` +
    `${escapeHtml(report.verdict)}</span></section>`
  );
}
