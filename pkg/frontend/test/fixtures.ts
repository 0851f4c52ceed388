import { readFileSync } from "node:fs";

import type { DesignJson, IntentJson, PlanJson, SessionSummary } from "../src/types.js";

function load<T>(name: string): T {
  const url = new URL(`../fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export const case1 = {
  session: load<SessionSummary>("case1.session.json"),
  intent: load<IntentJson>("case1.intent.json"),
  plan: load<PlanJson>("case1.plan.json"),
  design: load<DesignJson>("case1.design.json"),
};

export const case2 = {
  session: load<SessionSummary>("case2.session.json"),
  clarified: load<SessionSummary>("case2.clarified.session.json"),
  intent: load<IntentJson>("case2.intent.json"),
  design: load<DesignJson>("case2.design.json"),
};

export const case3 = {
  session: load<SessionSummary>("case3.session.json"),
  intent: load<IntentJson>("case3.intent.json"),
  design: load<DesignJson>("case3.design.json"),
};
