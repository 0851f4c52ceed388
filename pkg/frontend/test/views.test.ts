import { describe, expect, it } from "vitest";

import { stageBadges } from "../src/badges.js";
import { renderCosts, renderTimelinePhases } from "../src/views/costs.js";
import {
  renderClarifyDialog,
  renderConstraints,
  renderDegradedBanner,
  renderGuidance,
  renderIntent,
} from "../src/views/panels.js";
import { renderBudgetBar, renderTimeline } from "../src/views/timeline.js";
import { layoutTopology, renderTopology } from "../src/views/topology.js";
import { case1, case2, case3 } from "./fixtures.js";

describe("budget bar (case 1)", () => {
  it("renders the plan total against the declared budget", () => {
    const html = renderBudgetBar(case1.plan, case1.intent);
    expect(html).toContain("1,400,000 of 1,500,000 budget");
  });

  it("keeps the fill width presentational", () => {
    const html = renderBudgetBar(case1.plan, case1.intent);
    expect(html).toMatch(/width:\d+(\.\d+)?%/);
  });

  it("handles unbudgeted intents", () => {
    const html = renderBudgetBar(
      { ...case1.plan, total_cost: 0 },
      { ...case1.intent, constraints: {} }
    );
    expect(html).toContain("no budget constraint");
  });
});

describe("plan timeline (case 1)", () => {
  it("lists all 16 steps with cumulative figures", () => {
    const html = renderTimeline(case1.plan, case1.intent);
    expect(html.match(/<tr>/g)?.length).toBe(17); // header + 16 steps
    expect(html).toContain("(commission-site SITE1)");
    expect(html).toContain("$390,000");
    expect(html).toContain("$765,000");
    expect(html).toContain("total $1,400,000");
  });

  it("marks validated plans", () => {
    expect(renderTimeline(case1.plan, case1.intent)).toContain("validated");
  });
});

describe("clarification dialog (case 2)", () => {
  it("renders the hint exactly when awaiting clarification", () => {
    const html = renderClarifyDialog(case2.session);
    expect(html).toContain(
      "Please specify which sites/facilities you want to connect."
    );
    expect(html).toContain("clarify-send");
  });

  it("renders nothing once the session has moved on", () => {
    expect(renderClarifyDialog(case2.clarified)).toBe("");
    expect(renderClarifyDialog(case1.session)).toBe("");
  });
});

describe("degraded banner (case 3)", () => {
  it("shows the limitation and physics feedback", () => {
    const html = renderDegradedBanner(case3.design);
    expect(html).toContain("Unverified design");
    expect(html).toContain("200,000 km/s");
    expect(html).toContain(case3.design.limitation_notice!.slice(0, 40));
  });

  it("is absent for verified designs", () => {
    expect(renderDegradedBanner(case1.design)).toBe("");
  });
});

describe("stage badges", () => {
  it("marks every stage done for a completed session", () => {
    const badges = stageBadges(case1.session);
    expect(badges.every((b) => b.status === "done")).toBe(true);
  });

  it("parks at parse while awaiting clarification", () => {
    const badges = stageBadges(case2.session);
    const byStage = Object.fromEntries(badges.map((b) => [b.stage, b.status]));
    expect(byStage.rephrase).toBe("done");
    expect(byStage.parse).toBe("running");
    expect(byStage.plan).toBe("pending");
  });

  it("flags plan and design degraded for case 3", () => {
    const badges = stageBadges(case3.session);
    const byStage = Object.fromEntries(badges.map((b) => [b.stage, b.status]));
    expect(byStage.plan).toBe("degraded");
    expect(byStage.design).toBe("degraded");
    expect(byStage.enrich).toBe("done");
  });
});

describe("topology", () => {
  it("is deterministic for a fixed seed", () => {
    expect(renderTopology(case1.design)).toBe(renderTopology(case1.design));
    const a = layoutTopology(case1.design, 42);
    const b = layoutTopology(case1.design, 42);
    expect(a).toEqual(b);
  });

  it("draws a node per site and a line per route", () => {
    const html = renderTopology(case1.design);
    expect(html.match(/<circle/g)?.length).toBe(3 + 3); // 3 sites + 3 legend dots
    expect(html.match(/<line/g)?.length).toBe(3);
    expect(html).toContain("SITE1");
  });

  it("dashes unverified (degraded) links", () => {
    expect(renderTopology(case3.design)).toContain("stroke-dasharray");
  });
});

describe("costs and constraints (case 1)", () => {
  it("renders the phase breakdown and grand total", () => {
    const html = renderCosts(case1.design);
    expect(html).toContain("equipment installation");
    expect(html).toContain("$1,400,000");
  });

  it("renders the constraint report states", () => {
    const html = renderConstraints(case1.design);
    expect(html).toContain("pill-met");
    expect(html).toContain("pill-degraded"); // disjoint_paths relaxation disclosed
  });

  it("renders the schedule with the 18-week total", () => {
    const html = renderTimelinePhases(case1.design);
    expect(html).toContain("18 weeks total");
  });
});

describe("guidance and intent panels", () => {
  it("lists retrieved guidance clauses", () => {
    const html = renderGuidance(case1.intent);
    expect(html).toContain("1+1 fiber protection");
  });

  it("renders sites with roles", () => {
    const html = renderIntent(case1.intent);
    expect(html).toContain("SITE1");
    expect(html).toContain("core");
  });
});
