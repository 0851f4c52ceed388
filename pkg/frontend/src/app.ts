// DOM wiring: submit an intent, poll the session at 1 s, render views.
// All domain content comes from API payloads; this file only moves it
// into the page.

import {
  ApiError,
  POLL_INTERVAL_MS,
  clarify,
  getDesign,
  getIntent,
  getPlan,
  getSession,
  submitIntent,
} from "./api.js";
import { isTerminal, renderBadges, stageBadges } from "./badges.js";
import { escapeHtml } from "./format.js";
import type { DesignJson, IntentJson, PlanJson, SessionSummary } from "./types.js";
import { renderCosts, renderTimelinePhases } from "./views/costs.js";
import {
  renderClarifyDialog,
  renderConstraints,
  renderDegradedBanner,
  renderGuidance,
  renderHistory,
  renderIntent,
} from "./views/panels.js";
import { renderTimeline } from "./views/timeline.js";
import { renderTopology } from "./views/topology.js";

interface AppState {
  sessionId: string | null;
  session: SessionSummary | null;
  intent: IntentJson | null;
  plan: PlanJson | null;
  design: DesignJson | null;
  activeTab: string;
  error: string | null;
}

const state: AppState = {
  sessionId: null,
  session: null,
  intent: null,
  plan: null,
  design: null,
  activeTab: "intent",
  error: null,
};

let pollTimer: number | undefined;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

async function refresh(): Promise<void> {
  if (!state.sessionId) return;
  try {
    state.session = await getSession(state.sessionId);
    state.error = null;
    state.intent = await getIntent(state.sessionId).catch(() => null);
    state.plan = await getPlan(state.sessionId).catch(() => null);
    state.design = await getDesign(state.sessionId).catch(() => null);
  } catch (err) {
    state.error = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
  }
  render();
  if (state.session && isTerminal(state.session.state)) {
    window.clearInterval(pollTimer);
    pollTimer = undefined;
  }
}

function render(): void {
  const root = el("session-view");
  if (!state.session) {
    root.innerHTML = state.error
      ? `<div class="error-banner">${escapeHtml(state.error)} <button id="retry">retry</button></div>`
      : "<p class=\"muted\">Submit an intent to start.</p>";
    wireRetry();
    return;
  }

  const badges = renderBadges(stageBadges(state.session));
  const banner = state.design?.degraded ? renderDegradedBanner(state.design) : "";
  const errorBanner = state.error
    ? `<div class="error-banner">${escapeHtml(state.error)} <button id="retry">retry</button></div>`
    : "";
  const dialog = renderClarifyDialog(state.session);

  const tabs = ["intent", "guidance", "plan", "design"]
    .map(
      (tab) =>
        `<button class="tab ${state.activeTab === tab ? "active" : ""}" data-tab="${tab}">` +
        `${tab}</button>`
    )
    .join("");

  root.innerHTML =
    `<div class="session-meta">session <code>${escapeHtml(state.session.session_id)}</code> ` +
    `<span class="state">${escapeHtml(state.session.state)}</span></div>` +
    badges +
    errorBanner +
    banner +
    `<nav class="tabs">${tabs}</nav>` +
    `<section class="tab-body">${renderTab()}</section>` +
    dialog;

  wireTabs();
  wireClarify();
  wireRetry();
}

function renderTab(): string {
  switch (state.activeTab) {
    case "intent":
      return state.intent
        ? renderIntent(state.intent) + renderHistory(state.session!)
        : "<p class=\"muted\">No parsed intent yet.</p>" + renderHistory(state.session!);
    case "guidance":
      return state.intent ? renderGuidance(state.intent) : "<p class=\"muted\">Not enriched yet.</p>";
    case "plan":
      return state.plan && state.intent
        ? renderTimeline(state.plan, state.intent)
        : "<p class=\"muted\">No plan yet.</p>";
    case "design":
      if (!state.design) return "<p class=\"muted\">No design yet.</p>";
      return (
        renderTopology(state.design) +
        (state.design.degraded
          ? ""
          : renderConstraints(state.design) +
            renderCosts(state.design) +
            renderTimelinePhases(state.design))
      );
    default:
      return "";
  }
}

function wireTabs(): void {
  document.querySelectorAll<HTMLButtonElement>(".tab").forEach((button) => {
    button.onclick = () => {
      state.activeTab = button.dataset.tab ?? "intent";
      render();
    };
  });
}

function wireClarify(): void {
  const send = document.getElementById("clarify-send");
  if (!(send instanceof HTMLButtonElement)) return;
  send.onclick = async () => {
    const textarea = document.getElementById("clarify-text") as HTMLTextAreaElement;
    const answer = textarea.value.trim();
    if (!answer || !state.sessionId) return;
    send.disabled = true;
    try {
      state.session = await clarify(state.sessionId, answer);
      state.error = null;
      startPolling();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        send.disabled = true; // state moved on; control stays disabled
      }
      state.error = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
    }
    await refresh();
  };
}

function wireRetry(): void {
  const retry = document.getElementById("retry");
  if (retry instanceof HTMLButtonElement) {
    retry.onclick = () => void refresh();
  }
}

function startPolling(): void {
  if (pollTimer !== undefined) window.clearInterval(pollTimer);
  pollTimer = window.setInterval(() => void refresh(), POLL_INTERVAL_MS);
}

export function boot(): void {
  const submit = el("submit") as HTMLButtonElement;
  submit.onclick = async () => {
    const textarea = el("intent-text") as HTMLTextAreaElement;
    const text = textarea.value.trim();
    if (!text) return;
    submit.disabled = true;
    try {
      const created = await submitIntent(text);
      state.sessionId = created.session_id;
      state.activeTab = "intent";
      startPolling();
      await refresh();
    } catch (err) {
      state.error = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
      render();
    } finally {
      submit.disabled = false;
    }
  };
}
