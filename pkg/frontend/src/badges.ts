// Stage badge derivation: the badge strip mirrors the service's state
// machine exactly; nothing here invents progress the API did not report.

import type { SessionSummary } from "./types.js";

export type BadgeStatus = "pending" | "running" | "done" | "failed" | "degraded";

export interface StageBadge {
  stage: string;
  label: string;
  status: BadgeStatus;
}

// Pipeline stages in order, with the session states that mark them done.
const STAGES: Array<{ stage: string; label: string; doneStates: string[] }> = [
  { stage: "rephrase", label: "Rephrase", doneStates: ["Rephrasing"] },
  { stage: "parse", label: "Parse", doneStates: ["Parsed"] },
  { stage: "enrich", label: "Enrich", doneStates: ["Enriched"] },
  { stage: "plan", label: "Plan", doneStates: ["PlanReady"] },
  { stage: "design", label: "Design", doneStates: ["DesignReady"] },
];

export function stageBadges(session: SessionSummary): StageBadge[] {
  const reached = new Set(session.history.map((e) => e.state));
  const badges: StageBadge[] = [];
  for (const def of STAGES) {
    let status: BadgeStatus = "pending";
    if (def.doneStates.some((s) => reached.has(s))) {
      status = "done";
    }
    badges.push({ stage: def.stage, label: def.label, status });
  }

  if (session.state === "Failed") {
    const firstPending = badges.find((b) => b.status === "pending");
    if (firstPending) firstPending.status = "failed";
  } else if (session.state === "Degraded") {
    const planBadge = badges.find((b) => b.stage === "plan");
    if (planBadge) planBadge.status = "degraded";
    const designBadge = badges.find((b) => b.stage === "design");
    if (designBadge) designBadge.status = "degraded";
  } else if (session.state === "AwaitingClarification") {
    const parseBadge = badges.find((b) => b.stage === "parse");
    if (parseBadge && parseBadge.status === "pending") parseBadge.status = "running";
  } else if (!isTerminal(session.state)) {
    const firstPending = badges.find((b) => b.status === "pending");
    if (firstPending) firstPending.status = "running";
  }
  return badges;
}

export function isTerminal(state: string): boolean {
  return state === "DesignReady" || state === "Degraded" || state === "Failed";
}

export function renderBadges(badges: StageBadge[]): string {
  return (
    '<div class="badges">' +
    badges
      .map(
        (b) =>
          `<span class="badge badge-${b.status}" data-stage="${b.stage}">` +
          `${b.label}<small>${b.status}</small></span>`
      )
      .join("") +
    "</div>"
  );
}
