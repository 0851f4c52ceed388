// Cost breakdown and bill of materials, straight from the design payload.

import { escapeHtml, usd } from "../format.js";
import type { DesignJson } from "../types.js";

export function renderCosts(design: DesignJson): string {
  const breakdown = design.cost_breakdown ?? {};
  const phases = Object.entries(breakdown)
    .map(
      ([phase, cost]) =>
        `<tr><td>${escapeHtml(phase)}</td><td class="money">${usd(cost)}</td></tr>`
    )
    .join("");
  const total =
    design.grand_total_usd !== undefined
      ? `<tr class="grand"><td>grand total</td><td class="money">${usd(
          design.grand_total_usd
        )}</td></tr>`
      : "";

  const equipment = (design.equipment ?? [])
    .map(
      (line) =>
        `<tr><td>${line.quantity}×</td><td>${escapeHtml(line.model)}</td>` +
        `<td>${escapeHtml(line.item_class)}</td>` +
        `<td>${line.site ? escapeHtml(line.site) : "—"}</td>` +
        `<td class="money">${usd(line.unit_cost_usd)}</td></tr>`
    )
    .join("");

  const routes = design.fiber_routes
    .map(
      (r) =>
        `<tr><td>${escapeHtml(r.pair[0])} ↔ ${escapeHtml(r.pair[1])}</td>` +
        `<td>${escapeHtml(r.fiber_type)}</td>` +
        `<td>${r.length_km != null ? r.length_km + " km" : "length unknown"}</td>` +
        `<td class="money">${r.cost_usd !== undefined ? usd(r.cost_usd) : ""}</td></tr>`
    )
    .join("");

  return (
    '<div class="costs">' +
    `<h3>Cost breakdown</h3><table class="phases"><tbody>${phases}${total}</tbody></table>` +
    (routes
      ? `<h3>Fiber routes</h3><table class="routes"><tbody>${routes}</tbody></table>`
      : "") +
    (equipment
      ? `<h3>Equipment</h3><table class="bom"><thead><tr><th>qty</th><th>model</th>` +
        `<th>class</th><th>site</th><th>unit cost</th></tr></thead>` +
        `<tbody>${equipment}</tbody></table>`
      : "") +
    "</div>"
  );
}

export function renderTimelinePhases(design: DesignJson): string {
  const phases = design.timeline_phases ?? [];
  if (!phases.length) return "";
  const rows = phases
    .map(
      (p) =>
        `<tr><td>week ${p.start_week}</td><td>${escapeHtml(p.name)}</td>` +
        `<td>${p.weeks} wk</td></tr>`
    )
    .join("");
  return (
    '<div class="schedule"><h3>Schedule</h3>' +
    `<table><tbody>${rows}</tbody></table>` +
    (design.timeline_weeks !== undefined
      ? `<p class="schedule-total">${design.timeline_weeks} weeks total</p>`
      : "") +
    "</div>"
  );
}
