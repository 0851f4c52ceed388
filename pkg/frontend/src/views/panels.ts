// Clarification dialog, degraded banner, constraint report, guidance and
// intent panels. Pure renderers over API payloads.

import { escapeHtml } from "../format.js";
import type { DesignJson, IntentJson, SessionSummary } from "../types.js";

export function renderClarifyDialog(session: SessionSummary): string {
  if (session.state !== "AwaitingClarification" || !session.clarification_hint) {
    return "";
  }
  return (
    '<div class="modal-backdrop"><div class="clarify-dialog" role="dialog">' +
    "<h3>Clarification needed</h3>" +
    `<p class="hint">${escapeHtml(session.clarification_hint)}</p>` +
    '<textarea id="clarify-text" rows="3" placeholder="Your answer"></textarea>' +
    '<button id="clarify-send" class="btn-primary">Send</button>' +
    "</div></div>"
  );
}

export function renderDegradedBanner(design: DesignJson): string {
  if (!design.degraded) return "";
  return (
    '<div class="degraded-banner" role="alert">' +
    "<strong>Unverified design — formal planning failed.</strong>" +
    `<p>${escapeHtml(design.limitation_notice ?? "")}</p>` +
    `<p class="physics">${escapeHtml(design.educational_feedback ?? "")}</p>` +
    "</div>"
  );
}

export function renderConstraints(design: DesignJson): string {
  const report = design.constraint_report ?? [];
  if (!report.length) return "<p>No constraints declared.</p>";
  const rows = report
    .map(
      (c) =>
        `<tr class="status-${c.status}"><td>${escapeHtml(c.name)}</td>` +
        `<td><span class="pill pill-${c.status}">${escapeHtml(c.status)}</span></td>` +
        `<td>${escapeHtml(c.detail)}</td></tr>`
    )
    .join("");
  return `<table class="constraints"><tbody>${rows}</tbody></table>`;
}

export function renderGuidance(intent: IntentJson): string {
  const guidance = intent.guidance ?? [];
  if (!guidance.length) return "<p>No guidance retrieved.</p>";
  const items = guidance
    .map(
      (g) =>
        `<li><span class="doc-id">${escapeHtml(g.doc_id)}</span> ` +
        `${escapeHtml(g.text)}</li>`
    )
    .join("");
  const cited = (intent.standards_cited ?? [])
    .map((s) => `<span class="std">${escapeHtml(s)}</span>`)
    .join(" ");
  return (
    `<ul class="guidance">${items}</ul>` +
    (cited ? `<p class="cited">Standards cited: ${cited}</p>` : "")
  );
}

export function renderIntent(intent: IntentJson): string {
  const sites = intent.sites
    .map((s) => {
      const meta = [s.location, s.role].filter(Boolean).map((x) => escapeHtml(x!));
      return `<li>${escapeHtml(s.name)}${meta.length ? ` <small>(${meta.join(", ")})</small>` : ""}</li>`;
    })
    .join("");
  const cons = intent.constraints;
  const rows: string[] = [];
  if (intent.availability) rows.push(`availability: ${escapeHtml(intent.availability)}`);
  if (cons.latency_ms !== undefined) rows.push(`latency: ${cons.latency_ms} ms`);
  if (cons.budget_usd !== undefined) rows.push(`budget: $${cons.budget_usd}`);
  if (cons.disjoint_paths !== undefined) {
    rows.push(`disjoint paths: ${cons.disjoint_paths}`);
  }
  if (cons.compliance?.length) {
    rows.push(`compliance: ${cons.compliance.map(escapeHtml).join(", ")}`);
  }
  return (
    `<h3>Sites</h3><ul class="sites">${sites}</ul>` +
    (rows.length
      ? `<h3>Constraints</h3><ul class="constraint-list"><li>${rows.join("</li><li>")}</li></ul>`
      : "<p>No constraints declared.</p>")
  );
}

export function renderHistory(session: SessionSummary): string {
  const rows = session.history
    .map(
      (e) =>
        `<tr><td>${escapeHtml(e.stage)}</td><td>${escapeHtml(e.state)}</td>` +
        `<td class="ms">${e.duration_ms} ms</td></tr>`
    )
    .join("");
  return `<table class="history"><tbody>${rows}</tbody></table>`;
}
