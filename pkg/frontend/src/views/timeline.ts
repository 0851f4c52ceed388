// Plan timeline: ordered steps with their cumulative cost, and a budget bar
// comparing the plan total against the intent's budget. All numbers come
// verbatim from the API payloads.

import { escapeHtml, num, usd } from "../format.js";
import type { IntentJson, PlanJson } from "../types.js";

export function renderBudgetBar(plan: PlanJson, intent: IntentJson): string {
  const budget = intent.constraints.budget_usd;
  if (budget === undefined) {
    return `<div class="budget-bar"><em>no budget constraint declared</em></div>`;
  }
  const pct = Math.min(100, (plan.total_cost / budget) * 100);
  return (
    '<div class="budget-bar">' +
    `<div class="budget-track"><div class="budget-fill" style="width:${pct.toFixed(2)}%"></div></div>` +
    `<span class="budget-label">${num(plan.total_cost)} of ${num(budget)} budget</span>` +
    "</div>"
  );
}

export function renderTimeline(plan: PlanJson, intent: IntentJson): string {
  if (!plan.feasible) {
    return (
      '<div class="timeline">' +
      `<p class="infeasible">${escapeHtml(plan.infeasibility_reason ?? "infeasible")}</p>` +
      "</div>"
    );
  }
  const rows = plan.steps
    .map((step, i) => {
      const width = plan.total_cost > 0 ? (step.cumulative_cost / plan.total_cost) * 100 : 0;
      return (
        `<tr><td class="step-no">${i + 1}</td>` +
        `<td class="step-action">(${escapeHtml([step.action, ...step.args].join(" "))})</td>` +
        `<td class="step-cost">${usd(step.cumulative_cost)}` +
        `<div class="cost-meter" style="width:${width.toFixed(2)}%"></div></td></tr>`
      );
    })
    .join("");
  return (
    '<div class="timeline">' +
    renderBudgetBar(plan, intent) +
    `<table class="plan-steps"><thead><tr><th></th><th>action</th>` +
    `<th>cumulative</th></tr></thead><tbody>${rows}</tbody></table>` +
    `<p class="plan-total">total ${usd(plan.total_cost)}` +
    `${plan.validated ? ' <span class="ok">✓ validated</span>' : ""}</p>` +
    "</div>"
  );
}
